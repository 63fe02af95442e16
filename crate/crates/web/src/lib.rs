//! Browser bindings for three interactive views: a corpus-W graph with its
//! measured `η`, its half time-derivative, and the non-tangential maximal
//! function of a heat solution on the flat strip.
//!
//! Every export has a native twin returning [`plab_core::Result`], which is
//! what the tests call.

use plab_core::experiments::corpus::{flat_strip, sample_box, GraphKind};
use plab_core::experiments::{BumpData, StripGeometry};
use plab_core::frac_ops::{apply_multiplier, MultiplierSpec};
use plab_core::functionals::{nontangential_max, ConeSpec};
use plab_core::lewis_murray::parabolic_derivative_bmo;
use plab_core::pullback::CoefficientField;
use plab_core::solver::{solve_dirichlet, SolverConfig};
use plab_core::strip::boundary_of;
use plab_core::{Result, ScalarField};
use wasm_bindgen::prelude::*;

/// Largest accepted `n`; keeps the page responsive.
pub const MAX_CELLS: usize = 48;

/// Row-major `(x, t)` samples, `t` along rows, plus one headline number.
#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct Heatmap {
    width: usize,
    height: usize,
    values: Vec<f64>,
    scalar: f64,
}

#[wasm_bindgen]
impl Heatmap {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.height
    }

    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn scalar(&self) -> f64 {
        self.scalar
    }
}

impl Heatmap {
    fn from_field(f: &ScalarField, scalar: f64) -> Self {
        Self { width: f.spec.counts[0], height: f.spec.counts[1], values: f.values.clone(), scalar }
    }
}

fn check_cells(n: usize) -> Result<()> {
    if !(4..=MAX_CELLS).contains(&n) {
        return Err(plab_core::Error::Invalid(format!("n must lie in 4..={MAX_CELLS}, got {n}")));
    }
    Ok(())
}

fn weierstrass(amplitude: f64, terms: usize, n: usize) -> Result<ScalarField> {
    check_cells(n)?;
    sample_box(&GraphKind::Weierstrass { amplitude, terms, phase: 0.0 }, n)
}

/// The corpus-W graph on `[−1,1]²` with scalar `‖𝔻φ‖_*`.
pub fn graph_view(amplitude: f64, terms: usize, n: usize) -> Result<Heatmap> {
    let phi = weierstrass(amplitude, terms, n)?;
    let eta = parabolic_derivative_bmo(&phi)?;
    Ok(Heatmap::from_field(&phi, eta))
}

/// `D_n φ` of the same graph with scalar `max |D_n φ|`.
pub fn half_derivative_view(amplitude: f64, terms: usize, n: usize) -> Result<Heatmap> {
    let phi = weierstrass(amplitude, terms, n)?;
    let d = apply_multiplier(&phi, MultiplierSpec::DnHalf)?;
    let peak = d.max_abs();
    Ok(Heatmap::from_field(&d, peak))
}

/// `N(u)` for the heat equation on the flat strip with one boundary bump
/// centred at `x = center` of half-width `radius`; scalar `‖N‖_∞/‖f‖_∞`.
pub fn heat_view(center: f64, radius: f64, n: usize) -> Result<Heatmap> {
    check_cells(n)?;
    let geom = StripGeometry::default();
    if !(radius > 0.0 && radius < 0.5 * geom.width) {
        return Err(plab_core::Error::Invalid(format!("radius must lie in (0, {}), got {radius}", 0.5 * geom.width)));
    }
    let strip = flat_strip(&geom, n)?;
    let boundary = boundary_of(&strip)?;
    let data = BumpData { bumps: vec![[1.0, center.rem_euclid(geom.width), radius, 0.5 * geom.duration, 0.3 * geom.duration]] };
    let f = data.sample(&boundary, geom.width);
    let u = solve_dirichlet(&CoefficientField::identity(&strip)?, &f, &SolverConfig::default())?.u;
    let nt = nontangential_max(&u, &ConeSpec::new(1.0, Some(geom.height / 2.0))?)?;
    let fmax = f.max_abs();
    Ok(Heatmap::from_field(&nt, if fmax > 0.0 { nt.max_abs() / fmax } else { 0.0 }))
}

fn js(e: plab_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = graphView)]
pub fn graph_view_js(amplitude: f64, terms: usize, n: usize) -> std::result::Result<Heatmap, JsError> {
    graph_view(amplitude, terms, n).map_err(js)
}

#[wasm_bindgen(js_name = halfDerivativeView)]
pub fn half_derivative_view_js(amplitude: f64, terms: usize, n: usize) -> std::result::Result<Heatmap, JsError> {
    half_derivative_view(amplitude, terms, n).map_err(js)
}

#[wasm_bindgen(js_name = heatView)]
pub fn heat_view_js(center: f64, radius: f64, n: usize) -> std::result::Result<Heatmap, JsError> {
    heat_view(center, radius, n).map_err(js)
}
