//! Deterministic graph and coefficient corpora.
//!
//! Graphs are closed-form functions of `(x, t)` so that every grid level
//! samples the same object. Box members live on `[−1, 1]²` (spatial period 2,
//! time period 2); strip members on `[0, L) × [0, P)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{CorpusConfig, ExperimentConfig, StripGeometry};
use crate::functionals::{carleson_norm_measure, strip_grid, t1_density_gradient, t1_density_oscillation};
use crate::grid::{lip_constant_estimate, GridSpec, ParabolicPoint, Periodicity, ScalarField};
use crate::lewis_murray::parabolic_derivative_bmo;
use crate::pullback::CoefficientField;
use crate::{Error, Result};

/// Closed-form boundary graphs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    /// `slope·x + offset`.
    Affine { slope: f64, offset: f64 },
    /// `A(sin(ωx + φ) + cos(νt) + ½ sin(ωx + φ) cos(νt))`.
    Smooth { amplitude: f64, phase: f64 },
    /// `A(Σ_{k≤K} 2^{−k} cos(2^k ωx + φ) + Σ_{k≤K} 2^{−k} cos(4^k νt))`.
    Weierstrass { amplitude: f64, terms: usize, phase: f64 },
}

impl GraphKind {
    /// Value at `(x, t)` for spatial period `width` and time period `period`.
    pub fn eval(&self, x: f64, t: f64, width: f64, period: f64) -> f64 {
        let w = 2.0 * PI / width;
        let nu = 2.0 * PI / period;
        match *self {
            GraphKind::Affine { slope, offset } => slope * x + offset,
            GraphKind::Smooth { amplitude, phase } => {
                let (s, c) = ((w * x + phase).sin(), (nu * t).cos());
                amplitude * (s + c + 0.5 * s * c)
            }
            GraphKind::Weierstrass { amplitude, terms, phase } => {
                let mut acc = 0.0;
                for k in 0..=terms {
                    let wk = 0.5f64.powi(k as i32);
                    acc += wk * ((1u64 << k) as f64 * w * x + phase).cos();
                    acc += wk * ((1u64 << (2 * k)) as f64 * nu * t).cos();
                }
                amplitude * acc
            }
        }
    }

    /// The same graph with its amplitude (or slope and offset) multiplied.
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            GraphKind::Affine { slope, offset } => GraphKind::Affine { slope: slope * factor, offset: offset * factor },
            GraphKind::Smooth { amplitude, phase } => GraphKind::Smooth { amplitude: amplitude * factor, phase },
            GraphKind::Weierstrass { amplitude, terms, phase } => GraphKind::Weierstrass { amplitude: amplitude * factor, terms, phase },
        }
    }

    /// Periodic in space as well as time.
    pub fn periodic(&self) -> bool {
        !matches!(self, GraphKind::Affine { slope, .. } if *slope != 0.0)
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, GraphKind::Affine { .. })
    }

    fn periodicity(&self) -> Periodicity {
        if self.periodic() {
            Periodicity::Full
        } else {
            Periodicity::Time
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphMember {
    pub name: String,
    pub graph: GraphKind,
    /// Requested `η` when the amplitude was fitted to a target.
    pub eta_target: Option<f64>,
}

/// Box `[−1, 1]²` at step `1/n`: `n`·2 cells in space, `2n²` in time.
pub fn box_grid(n: usize) -> Result<GridSpec> {
    GridSpec::cube_box(1, 1.0 / n as f64, &ParabolicPoint::zero(1), n)
}

/// Sample a graph on the box `[−1, 1]²` at step `1/n`.
pub fn sample_box(graph: &GraphKind, n: usize) -> Result<ScalarField> {
    let g = box_grid(n)?;
    Ok(ScalarField::from_fn(g, graph.periodicity(), |x, t| graph.eval(x[0], t, 2.0, 2.0)))
}

/// Sample a box-corpus graph on an arbitrary one-dimensional grid.
pub fn sample_box_on(graph: &GraphKind, spec: &GridSpec) -> ScalarField {
    ScalarField::from_fn(spec.clone(), Periodicity::None, |x, t| graph.eval(x[0], t, 2.0, 2.0))
}

/// Boundary grid `[0, L) × [0, P)` at step `1/n`.
pub fn strip_boundary_grid(geom: &StripGeometry, n: usize) -> Result<GridSpec> {
    let h = 1.0 / n as f64;
    let nx = cells(geom.width, h)?;
    let nt = cells(geom.period, h * h)?;
    GridSpec::new(1, h, ParabolicPoint::new(vec![0.0], 0.0), vec![nx, nt])
}

/// Sample a periodic graph on the strip boundary grid.
pub fn sample_strip_boundary(graph: &GraphKind, geom: &StripGeometry, n: usize) -> Result<ScalarField> {
    if !graph.periodic() {
        return Err(Error::Invalid("strip graphs must be periodic in x".into()));
    }
    let g = strip_boundary_grid(geom, n)?;
    Ok(ScalarField::from_fn(g, Periodicity::Full, |x, t| graph.eval(x[0], t, geom.width, geom.period)))
}

/// The flattened strip `(0, H) × [0, L) × [0, T)` at step `1/n`.
pub fn flat_strip(geom: &StripGeometry, n: usize) -> Result<GridSpec> {
    strip_grid(1.0 / n as f64, geom.height, geom.width, geom.duration)
}

fn cells(len: f64, step: f64) -> Result<usize> {
    let q = len / step;
    if q.round() < 4.0 || (q - q.round()).abs() > 1e-6 {
        return Err(Error::InvalidGrid(format!("{len} is not a multiple of {step} with at least 4 cells")));
    }
    Ok(q.round() as usize)
}

/// The box corpus: affine controls, smooth graphs and corpus-W members. The
/// first W amplitude carries every truncation `K = 0..=terms`, further
/// amplitudes carry `K ≥ 1`, and one phase-shifted member closes the list.
pub fn box_corpus(cfg: &CorpusConfig) -> Vec<GraphMember> {
    let mut out = Vec::new();
    let plain = |name: String, graph| GraphMember { name, graph, eta_target: None };
    for (i, &slope) in cfg.affine_slopes.iter().enumerate() {
        let offset = if i % 2 == 0 { 0.25 } else { 0.0 };
        out.push(plain(format!("affine_{i}"), GraphKind::Affine { slope, offset }));
    }
    for (i, &amplitude) in cfg.smooth_amplitudes.iter().enumerate() {
        out.push(plain(format!("smooth_{i}"), GraphKind::Smooth { amplitude, phase: 0.5 * i as f64 }));
    }
    for (i, &amplitude) in cfg.w_amplitudes.iter().enumerate() {
        let first = if i == 0 { 0 } else { 1 };
        for terms in first..=cfg.terms {
            out.push(plain(format!("w{i}_k{terms}"), GraphKind::Weierstrass { amplitude, terms, phase: 0.0 }));
        }
    }
    if let Some(&amplitude) = cfg.w_amplitudes.first() {
        out.push(plain("w_shifted".into(), GraphKind::Weierstrass { amplitude, terms: cfg.terms, phase: PI / 3.0 }));
    }
    out
}

/// The strip corpus at step `1/n`: the flat graph plus smooth and corpus-W
/// graphs whose amplitude is fitted so that `‖𝔻φ‖_* = η` for each target.
/// A target that cannot be met is reported with the achieved value.
pub fn strip_corpus(cfg: &CorpusConfig, geom: &StripGeometry, n: usize) -> Result<Vec<GraphMember>> {
    let mut out = vec![GraphMember { name: "flat".into(), graph: GraphKind::Affine { slope: 0.0, offset: 0.0 }, eta_target: Some(0.0) }];
    let unit_w = GraphKind::Weierstrass { amplitude: 1.0, terms: cfg.terms, phase: 0.0 };
    let unit_s = GraphKind::Smooth { amplitude: 1.0, phase: 0.0 };
    let eta_w = parabolic_derivative_bmo(&sample_strip_boundary(&unit_w, geom, n)?)?;
    let eta_s = parabolic_derivative_bmo(&sample_strip_boundary(&unit_s, geom, n)?)?;
    if !(eta_w > 0.0 && eta_s > 0.0) {
        return Err(Error::Calibration(format!("unit graphs have eta {eta_w}, {eta_s}; targets unreachable")));
    }
    let top = cfg.eta_targets.iter().copied().fold(0.0, f64::max);
    if top > 0.0 {
        out.push(GraphMember { name: format!("smooth_eta{top}"), graph: unit_s.scaled(top / eta_s), eta_target: Some(top) });
    }
    for &eta in &cfg.eta_targets {
        if eta > 0.0 {
            out.push(GraphMember { name: format!("w_eta{eta}"), graph: unit_w.scaled(eta / eta_w), eta_target: Some(eta) });
        }
    }
    Ok(out)
}

/// Coefficient families on the physical domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientKind {
    Identity,
    /// `A = I + κ[[s, c/2], [c/2, −s]]`, `B = κ(s, c)/(y₀ + 1/8)` with
    /// `s = sin(2πx/L) cos(2πt/P)`, `c = cos(2πx/L)`. The Carleson densities
    /// scale like `κ²`.
    Perturbed { kappa: f64 },
}

impl CoefficientKind {
    /// `(A, B)` at the physical point `(y₀, x, t)`.
    pub fn eval(&self, y0: f64, x: f64, t: f64, geom: &StripGeometry) -> ([f64; 4], [f64; 2]) {
        match *self {
            CoefficientKind::Identity => ([1.0, 0.0, 0.0, 1.0], [0.0, 0.0]),
            CoefficientKind::Perturbed { kappa } => {
                let s = (2.0 * PI * x / geom.width).sin() * (2.0 * PI * t / geom.period).cos();
                let c = (2.0 * PI * x / geom.width).cos();
                let off = 0.5 * kappa * c;
                let w = kappa / (y0.max(0.0) + 0.125);
                ([1.0 + kappa * s, off, off, 1.0 - kappa * s], [w * s, w * c])
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            CoefficientKind::Identity => "identity".into(),
            CoefficientKind::Perturbed { kappa } => format!("perturbed_k{kappa}"),
        }
    }

    /// Sampled on the flat strip (`y₀ = x₀`).
    pub fn on_flat(&self, strip: &GridSpec, geom: &StripGeometry) -> Result<CoefficientField> {
        CoefficientField::from_fn(strip, |x0, x, t| self.eval(x0, x, t, geom))
    }
}

pub fn coefficient_corpus(cfg: &CorpusConfig) -> Vec<CoefficientKind> {
    let mut out = vec![CoefficientKind::Identity];
    out.extend(cfg.coefficient_scales.iter().map(|&kappa| CoefficientKind::Perturbed { kappa }));
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberRecord {
    pub name: String,
    /// `box` or `strip`.
    pub window: String,
    pub graph: GraphKind,
    pub eta_target: Option<f64>,
    /// `‖𝔻φ‖_*` on the sampled window.
    pub eta: f64,
    pub ell: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub name: String,
    pub coefficients: CoefficientKind,
    pub lambda: f64,
    pub big_lambda: f64,
    pub drift_bound: f64,
    /// Carleson norm of `x₀|∇A|² + x₀³|∂_tA|² + x₀|B|²` on the flat strip.
    pub carleson_gradient: f64,
    /// Carleson norm of the oscillation density on the flat strip.
    pub carleson_oscillation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub seed: u64,
    pub n: usize,
    pub geometry: StripGeometry,
    pub members: Vec<MemberRecord>,
    pub coefficients: Vec<CoefficientRecord>,
    /// Members that could not be generated, with the reason.
    pub failures: Vec<String>,
}

/// Sampled corpus at one grid level.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub box_graphs: Vec<(GraphMember, ScalarField)>,
    pub strip_graphs: Vec<(GraphMember, ScalarField)>,
    pub coefficients: Vec<(CoefficientKind, CoefficientField)>,
    pub manifest: CorpusManifest,
}

fn record(m: &GraphMember, window: &str, phi: &ScalarField) -> Result<MemberRecord> {
    Ok(MemberRecord {
        name: m.name.clone(),
        window: window.into(),
        graph: m.graph.clone(),
        eta_target: m.eta_target,
        eta: parabolic_derivative_bmo(phi)?,
        ell: lip_constant_estimate(phi),
    })
}

/// Build the box and strip corpora plus the coefficient families at step
/// `1/n`, measuring `ℓ`, `η` and the Carleson norms of each member.
pub fn gen_corpus(cfg: &ExperimentConfig, n: usize) -> Result<Corpus> {
    cfg.validate()?;
    let geom = &cfg.strip;
    let mut manifest = CorpusManifest { seed: cfg.seed, n, geometry: geom.clone(), members: Vec::new(), coefficients: Vec::new(), failures: Vec::new() };
    let mut box_graphs = Vec::new();
    for m in box_corpus(&cfg.corpus) {
        let phi = sample_box(&m.graph, n)?;
        match record(&m, "box", &phi) {
            Ok(r) => manifest.members.push(r),
            Err(e) => manifest.failures.push(format!("{}: {e}", m.name)),
        }
        box_graphs.push((m, phi));
    }
    let mut strip_graphs = Vec::new();
    match strip_corpus(&cfg.corpus, geom, n) {
        Ok(list) => {
            for m in list {
                let phi = sample_strip_boundary(&m.graph, geom, n)?;
                match record(&m, "strip", &phi) {
                    Ok(r) => {
                        if let Some(target) = m.eta_target.filter(|&t| t > 0.0) {
                            if (r.eta - target).abs() > 0.15 * target {
                                manifest.failures.push(format!("{}: target eta {target} unreachable, achieved {}", m.name, r.eta));
                            }
                        }
                        manifest.members.push(r);
                    }
                    Err(e) => manifest.failures.push(format!("{}: {e}", m.name)),
                }
                strip_graphs.push((m, phi));
            }
        }
        Err(e) => manifest.failures.push(format!("strip corpus: {e}")),
    }
    let strip = flat_strip(geom, n)?;
    let d = geom.height / 2.0;
    let mut coefficients = Vec::new();
    for kind in coefficient_corpus(&cfg.corpus) {
        let field = kind.on_flat(&strip, geom)?;
        let (lambda, big_lambda) = field.ellipticity();
        let carleson = |dens: Result<ScalarField>| -> f64 {
            dens.and_then(|g| carleson_norm_measure(&g, d)).map_or(f64::NAN, |r| r.norm)
        };
        manifest.coefficients.push(CoefficientRecord {
            name: kind.name(),
            coefficients: kind.clone(),
            lambda,
            big_lambda,
            drift_bound: field.drift_bound(),
            carleson_gradient: carleson(t1_density_gradient(&field)),
            carleson_oscillation: carleson(t1_density_oscillation(&field)),
        });
        coefficients.push((kind, field));
    }
    Ok(Corpus { box_graphs, strip_graphs, coefficients, manifest })
}
