//! Global extension of a boundary graph from a small cube: reflect and tile
//! in time, then blend into the affine function `x·(∇φ)_{Q_r}` outside a
//! spatial cutoff.

use serde::{Deserialize, Serialize};

use crate::bmo::{bmo_norm, dist_to_equicontinuous};
use crate::grid::{cube_average, lip_constant_estimate, GridSpec, ParabolicCube, ParabolicPoint, Periodicity, ScalarField};
use crate::lewis_murray::functional_time_quotient;
use crate::quad::smoothstep;
use crate::{Error, Result};

/// Scales of the construction. `R = 2^k r` with `Rη/2 < r ≤ Rη`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionConfig {
    pub r: f64,
    pub big_r: f64,
    pub k: u32,
    pub eta: f64,
    /// Admissible scale `d′ = η min(r₀, r₁)/2`, informational.
    pub d_prime: f64,
}

impl ExtensionConfig {
    /// Pick `k` from `η` as in the construction; `η ≥ 1` gives `R = r`.
    pub fn from_eta(r: f64, eta: f64, r0: f64, r1: f64) -> Result<Self> {
        if !(r > 0.0) || !(eta >= 0.0) {
            return Err(Error::Invalid(format!("need r > 0 and eta >= 0, got r={r}, eta={eta}")));
        }
        let k = if eta >= 1.0 || eta == 0.0 { 0 } else { (1.0 / eta).log2().ceil() as u32 };
        Ok(Self { r, big_r: r * f64::from(1u32 << k), k, eta, d_prime: eta * r0.min(r1) / 2.0 })
    }
}

fn grid_multiple(v: f64, step: f64, what: &str) -> Result<usize> {
    let q = v / step;
    let n = q.round();
    if n < 1.0 || (q - n).abs() > 1e-6 {
        return Err(Error::Invalid(format!("{what} = {v} is not a positive multiple of {step}")));
    }
    Ok(n as usize)
}

/// Index offset between two aligned axes, `(b_origin − a_origin)/step`.
fn axis_offset(a: f64, b: f64, step: f64) -> Result<i64> {
    let q = (b - a) / step;
    let n = q.round();
    if (q - n).abs() > 1e-6 {
        return Err(Error::Invalid("grids are not aligned".into()));
    }
    Ok(n as i64)
}

/// `φ̃(x,t)`: `φ` on `[−r², r²]`, mirrored about `r²` on `[r², 3r²]`, and
/// periodic with period `4r²`. Returned over one period starting at `−r²`.
pub fn reflect_tile_time(phi: &ScalarField, r: f64) -> Result<ScalarField> {
    let spec = &phi.spec;
    let m = grid_multiple(r, spec.h, "r")?;
    let ta = spec.time_axis();
    let half = m * m;
    let t0 = axis_offset(spec.origin.t, -r * r, spec.dt())?;
    if t0 < 0 || t0 as usize + 2 * half > spec.counts[ta] {
        return Err(Error::OutOfDomain(format!("field must cover t in [-{0}, {0}]", r * r)));
    }
    let mut counts = spec.counts.clone();
    counts[ta] = 4 * half;
    let out = GridSpec::new(spec.n_minus_1, spec.h, ParabolicPoint::new(spec.origin.x.clone(), -r * r), counts)?;
    let shape = out.shape();
    let mut values = Vec::with_capacity(out.len());
    for lin in 0..out.len() {
        let mut idx = out.unravel(lin);
        let j = idx[ta];
        let src = if j < 2 * half { j } else { 4 * half - 1 - j };
        idx[ta] = t0 as usize + src;
        values.push(phi.get(idx));
    }
    debug_assert_eq!(values.len(), shape.iter().product::<usize>());
    let per = if phi.periodicity == Periodicity::Full { Periodicity::Full } else { Periodicity::Time };
    ScalarField::new(out, values, per)
}

fn cutoff_value(config: &ExtensionConfig, x: &[f64]) -> f64 {
    let xi = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if xi < config.r {
        1.0
    } else if xi > 2.0 * config.big_r {
        0.0
    } else {
        1.0 - smoothstep((xi - config.r) / (2.0 * config.big_r - config.r))
    }
}

/// `ρ(|x|_∞)`: 1 below `r`, 0 beyond `2R`, a quintic smoothstep between.
/// Sampled on `spec`, constant in time.
pub fn build_cutoff(config: &ExtensionConfig, spec: &GridSpec) -> ScalarField {
    ScalarField::from_fn(spec.clone(), Periodicity::None, |x, _| cutoff_value(config, x))
}

/// Cube average of the spatial gradient over `Q_r(0,0)`.
pub fn gradient_average(phi: &ScalarField, r: f64) -> Result<Vec<f64>> {
    let q = ParabolicCube::new(ParabolicPoint::zero(phi.spec.n_minus_1), r)?;
    phi.gradient().iter().map(|g| cube_average(g, &q)).collect()
}

/// `Φ = x·g + ρ(φ̃ − x·g)` with `g = (∇φ)_{Q_r}`, on a box of half-width
/// about `3R`, periodic in time with period `4r²`. `φ` must be centred so
/// that `Q_r` sits at the origin and must cover `|x|_∞ ≤ 2R`, `|t| ≤ r²`.
pub fn extend(phi: &ScalarField, config: &ExtensionConfig) -> Result<ScalarField> {
    let spec = &phi.spec;
    let tilde = reflect_tile_time(phi, config.r)?;
    let g = gradient_average(phi, config.r)?;
    let h = spec.h;
    let half_cells = (3.0 * config.big_r / h).ceil() as usize;
    let mut counts = vec![2 * half_cells; spec.n_minus_1];
    counts.push(tilde.spec.counts[tilde.spec.time_axis()]);
    let origin = ParabolicPoint::new(vec![-(half_cells as f64) * h; spec.n_minus_1], tilde.spec.origin.t);
    let out = GridSpec::new(spec.n_minus_1, h, origin, counts)?;
    let offs: Vec<i64> = (0..spec.n_minus_1)
        .map(|a| axis_offset(spec.origin.x[a], out.origin.x[a], h))
        .collect::<Result<_>>()?;
    let ta = out.time_axis();
    let mut values = Vec::with_capacity(out.len());
    for lin in 0..out.len() {
        let idx = out.unravel(lin);
        let x: Vec<f64> = (0..spec.n_minus_1).map(|a| out.coord(a, idx[a])).collect();
        let rho = cutoff_value(config, &x);
        let affine: f64 = x.iter().zip(&g).map(|(a, b)| a * b).sum();
        if rho == 0.0 {
            values.push(affine);
            continue;
        }
        let mut src = [0usize; 3];
        for a in 0..spec.n_minus_1 {
            let i = idx[a] as i64 + offs[a];
            if i < 0 || i as usize >= spec.counts[a] {
                return Err(Error::OutOfDomain(format!("field must cover |x| <= 2R = {}", 2.0 * config.big_r)));
            }
            src[a] = i as usize;
        }
        src[ta] = idx[ta];
        let v = tilde.get(src);
        values.push(if rho == 1.0 { v } else { affine + rho * (v - affine) });
    }
    ScalarField::new(out, values, Periodicity::Time)
}

/// `η` of a graph on its box: the larger of `d(∇φ, C_δ)` (upper bound) and
/// the square root of the time-quotient functional for radii `≤ r1`.
pub fn measure_domain_eta(phi: &ScalarField, r1: f64, delta: &dyn Fn(f64) -> f64) -> Result<f64> {
    let mut dist = 0.0f64;
    for g in phi.gradient() {
        dist = dist.max(dist_to_equicontinuous(&g, delta, 4)?.value);
    }
    let tq = functional_time_quotient(phi, Some(r1))?;
    Ok(dist.max(tq.sqrt()))
}

/// `r₀`: the largest radius `s = s_max 2^{−j} ≥ 2h` with `‖∂_iφ‖_{*,s} ≤ η` for
/// every spatial `i`, where `‖·‖_{*,s}` only sees cubes of radius `≤ s`.
/// `None` when even `2h` fails.
pub fn gradient_scale(phi: &ScalarField, eta: f64, s_max: f64) -> Result<Option<f64>> {
    let grads = phi.gradient();
    let mut s = s_max;
    while s >= 2.0 * phi.spec.h {
        let mut worst = 0.0f64;
        for g in &grads {
            worst = worst.max(bmo_norm(g, None, Some(s))?.norm);
        }
        if worst <= eta {
            return Ok(Some(s));
        }
        s /= 2.0;
    }
    Ok(None)
}

/// Outcome of [`verify_extension`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    /// `Φ = φ` bit for bit on `Q_r`.
    pub exact_on_cube: bool,
    pub lip_phi: f64,
    pub lip_ext: f64,
    /// `Lip(Φ)/Lip(φ)` (0 when both vanish).
    pub lip_ratio: f64,
    pub grad_bmo: f64,
    /// `‖∇Φ‖_* / (η^{0.9} + ηℓ)`.
    pub ratio_iii: f64,
    pub time_quotient: f64,
    /// `B_time(Φ) / η²`.
    pub ratio_iv: f64,
}

impl ExtensionReport {
    pub fn passes(&self, lip_tol: f64, c_ext: f64) -> bool {
        self.exact_on_cube && self.lip_ratio <= 1.0 + lip_tol && self.ratio_iii <= c_ext && self.ratio_iv <= c_ext
    }
}

fn safe_ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        a / b
    }
}

/// Check properties (i) to (iv) of the extension.
pub fn verify_extension(phi: &ScalarField, ext: &ScalarField, config: &ExtensionConfig) -> Result<ExtensionReport> {
    let r = config.r;
    let m = grid_multiple(r, phi.spec.h, "r")?;
    let (ps, es) = (&phi.spec, &ext.spec);
    let mut exact = true;
    let mut p_off = [0i64; 3];
    let mut e_off = [0i64; 3];
    for a in 0..ps.naxes() {
        let (po, eo, half) = if a == ps.time_axis() {
            (ps.origin.t, es.origin.t, (m * m) as f64 * ps.dt())
        } else {
            (ps.origin.x[a], es.origin.x[a], m as f64 * ps.h)
        };
        p_off[a] = axis_offset(po, -half, ps.step(a))?;
        e_off[a] = axis_offset(eo, -half, es.step(a))?;
    }
    let mut len = [1usize; 3];
    for (a, l) in len.iter_mut().enumerate().take(ps.naxes()) {
        *l = if a == ps.time_axis() { 2 * m * m } else { 2 * m };
    }
    'outer: for i2 in 0..len[2] {
        for i1 in 0..len[1] {
            for i0 in 0..len[0] {
                let k = [i0 as i64, i1 as i64, i2 as i64];
                let pi = [(k[0] + p_off[0]) as usize, (k[1] + p_off[1]) as usize, (k[2] + p_off[2]) as usize];
                let ei = [(k[0] + e_off[0]) as usize, (k[1] + e_off[1]) as usize, (k[2] + e_off[2]) as usize];
                if phi.get(pi).to_bits() != ext.get(ei).to_bits() {
                    exact = false;
                    break 'outer;
                }
            }
        }
    }
    let lip_phi = lip_constant_estimate(phi);
    let lip_ext = lip_constant_estimate(ext);
    let mut grad_bmo = 0.0f64;
    for g in ext.gradient() {
        grad_bmo = grad_bmo.max(bmo_norm(&g, None, None)?.norm);
    }
    let time_quotient = functional_time_quotient(ext, None)?;
    let eta = config.eta;
    Ok(ExtensionReport {
        exact_on_cube: exact,
        lip_phi,
        lip_ext,
        lip_ratio: safe_ratio(lip_ext, lip_phi),
        grad_bmo,
        ratio_iii: safe_ratio(grad_bmo, eta.powf(0.9) + eta * lip_phi),
        time_quotient,
        ratio_iv: safe_ratio(time_quotient, eta * eta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_field(h: f64, half: f64, tr: f64, f: impl Fn(&[f64], f64) -> f64) -> ScalarField {
        let nx = (2.0 * half / h).round() as usize;
        let nt = (2.0 * tr / (h * h)).round() as usize;
        let g = GridSpec::new(1, h, ParabolicPoint::new(vec![-half], -tr), vec![nx, nt]).unwrap();
        ScalarField::from_fn(g, Periodicity::None, f)
    }

    #[test]
    fn tent_in_time() {
        let h = 1.0 / 8.0;
        let r = 0.5;
        let phi = box_field(h, 1.0, r * r, |_, t| t);
        let tilde = reflect_tile_time(&phi, r).unwrap();
        let ta = 1;
        let n = tilde.spec.counts[ta];
        assert_eq!(n, 64);
        let peak = (0..n).map(|j| tilde.get([0, j, 0])).fold(f64::MIN, f64::max);
        assert!((peak - (r * r - h * h / 2.0)).abs() < 1e-12);
        assert_eq!(tilde.get([0, 31, 0]), tilde.get([0, 32, 0]));
    }

    #[test]
    fn affine_extends_exactly() {
        let h = 1.0 / 16.0;
        let config = ExtensionConfig::from_eta(0.25, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(config.big_r, 0.5);
        let phi = box_field(h, 1.0, 0.0625, |x, _| 0.5 * x[0]);
        let ext = extend(&phi, &config).unwrap();
        for lin in 0..ext.values.len() {
            let x = ext.spec.coord(0, ext.spec.unravel(lin)[0]);
            assert_eq!(ext.values[lin], 0.5 * x);
        }
        let rep = verify_extension(&phi, &ext, &config).unwrap();
        assert!(rep.exact_on_cube);
        assert_eq!(rep.time_quotient, 0.0);
    }

    #[test]
    fn cutoff_plateaus_and_slope() {
        let config = ExtensionConfig::from_eta(0.25, 0.3, 1.0, 1.0).unwrap();
        let g = GridSpec::new(1, 1.0 / 64.0, ParabolicPoint::new(vec![-3.0], 0.0), vec![384, 4]).unwrap();
        let rho = build_cutoff(&config, &g);
        let d = rho.derivative(0);
        let bound = 2.0 / (2.0 * config.big_r - config.r);
        assert!(d.max_abs() <= bound);
        for lin in 0..rho.values.len() {
            let x = g.coord(0, g.unravel(lin)[0]).abs();
            if x < config.r {
                assert_eq!(rho.values[lin], 1.0);
            }
            if x > 2.0 * config.big_r {
                assert_eq!(rho.values[lin], 0.0);
            }
        }
    }
}
