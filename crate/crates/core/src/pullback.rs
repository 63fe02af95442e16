//! Parabolic mollifier, vertical mollification `P_{γx₀}φ`, the flattening
//! map `ρ(x₀,x,t) = (x₀ + P_{γx₀}φ(x,t), x, t)` and pulled-back coefficients.
//!
//! The convolution is evaluated as `∫P(y,s) φ(x − λy, t − λ²s) dy ds` with a
//! symmetric node rule for the tensor bump and Catmull-Rom interpolation of
//! the samples, so the result is smooth in `λ`, exact on functions affine in
//! `x`, and equal to `φ` at `λ = 0`. Boundary graphs must be periodic in time.
//!
//! Pulled-back coefficients follow from the chain rule and the Piola identity
//! `div_Y F = D⁻¹ div_X(D J⁻¹F)` with `J = [[D, ψ_x], [0, 1]]`, `D = 1 + ψ_{x₀}`:
//!
//! ```text
//! A^v = J⁻¹ A J⁻ᵀ
//! B^v = J⁻¹ B + (ψ_t / D) e₀ + (J⁻¹ Aᵀ J⁻ᵀ) ∇D / D
//! ```

use serde::{Deserialize, Serialize};

use crate::functionals::carleson_norm_measure;
use crate::grid::{GridSpec, ParabolicPoint, Periodicity, ScalarField};
use crate::strip::{self, lin};
use crate::{Error, Result};

fn bump(y: f64) -> f64 {
    if y.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - y * y)).exp()
    }
}

/// Tensor bump `c·exp(−1/(1−x²))·exp(−1/(1−t²))` on `Q₁`, dilated by `γx₀`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub gamma: f64,
    /// Nodes per axis of the symmetric rule on `(−1, 1)`.
    pub nodes: usize,
}

impl MollifierSpec {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Invalid(format!("gamma must be positive, got {gamma}")));
        }
        Ok(Self { gamma, nodes: 16 })
    }

    /// `γ = 1/(8(1 + ℓ))`.
    pub fn for_lipschitz(ell: f64) -> Self {
        Self { gamma: 1.0 / (8.0 * (1.0 + ell.abs())), nodes: 16 }
    }

    /// Nodes `((2i+1) − N)/N` and normalised profile weights.
    pub fn rule(&self) -> Vec<(f64, f64)> {
        let n = self.nodes.max(1);
        let raw: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let y = ((2 * i + 1) as f64 - n as f64) / n as f64;
                (y, bump(y))
            })
            .collect();
        let total: f64 = raw.iter().map(|p| p.1).sum();
        raw.into_iter().map(|(y, w)| (y, w / total)).collect()
    }
}

/// `P` sampled on `Q₁(0,0)` with `n` cells per unit length, mass 1.
pub fn mollifier_kernel(n: usize) -> Result<ScalarField> {
    let h = 1.0 / n as f64;
    let spec = GridSpec::cube_box(1, h, &ParabolicPoint::zero(1), n)?;
    let (nx, nt) = (spec.counts[0], spec.counts[1]);
    let dt = spec.dt();
    let mut values = Vec::with_capacity(spec.len());
    for j in 0..nt {
        let t = ((2 * j + 1) as f64 - nt as f64) * dt / 2.0;
        for i in 0..nx {
            let x = ((2 * i + 1) as f64 - nx as f64) * h / 2.0;
            values.push(bump(x) * bump(t));
        }
    }
    let mass: f64 = values.iter().sum::<f64>() * spec.cell_volume();
    if mass <= 0.0 {
        return Err(Error::Degenerate("kernel grid too coarse".into()));
    }
    for v in &mut values {
        *v /= mass;
    }
    ScalarField::new(spec, values, Periodicity::None)
}

/// Catmull–Rom weights of `Σ_y w_y · line(j − shift·y)` as taps `(offset, weight)`
/// relative to `j`, merged per offset.
fn stencil(rule: &[(f64, f64)], shift: f64) -> Vec<(i64, f64)> {
    let mut taps: std::collections::BTreeMap<i64, f64> = std::collections::BTreeMap::new();
    for &(y, w) in rule {
        let pos = -shift * y;
        let i = pos.floor();
        let f = pos - i;
        let i = i as i64;
        let c = if f == 0.0 {
            [0.0, 1.0, 0.0, 0.0]
        } else {
            let (f2, f3) = (f * f, f * f * f);
            [
                0.5 * (-f + 2.0 * f2 - f3),
                0.5 * (2.0 - 5.0 * f2 + 3.0 * f3),
                0.5 * (f + 4.0 * f2 - 3.0 * f3),
                0.5 * (-f2 + f3),
            ]
        };
        for (o, cw) in c.iter().enumerate() {
            if *cw != 0.0 {
                *taps.entry(i - 1 + o as i64).or_insert(0.0) += w * cw;
            }
        }
    }
    taps.into_iter().collect()
}

struct Mollifier<'a> {
    phi: &'a ScalarField,
    rule: Vec<(f64, f64)>,
    gamma: f64,
    xper: bool,
}

impl<'a> Mollifier<'a> {
    fn new(phi: &'a ScalarField, spec: &MollifierSpec) -> Result<Self> {
        if phi.spec.n_minus_1 != 1 {
            return Err(Error::DimensionMismatch("boundary graphs have one spatial axis".into()));
        }
        if phi.periodicity == Periodicity::None {
            return Err(Error::NotPeriodic);
        }
        Ok(Self { phi, rule: spec.rule(), gamma: spec.gamma, xper: phi.periodicity == Periodicity::Full })
    }

    /// `P_{γx₀}φ` on every `x` cell of the rows `rows` (unwrapped indices,
    /// read modulo the time period). Non-periodic `x` clamps at the ends; callers crop.
    fn level(&self, x0: f64, rows: &[i64]) -> Vec<f64> {
        let spec = &self.phi.spec;
        let (nx, nt) = (spec.counts[0], spec.counts[1]);
        let lam = self.gamma * x0.abs();
        let v = &self.phi.values;
        let xper = self.xper;
        let xi = |i: i64| -> usize {
            if xper {
                i.rem_euclid(nx as i64) as usize
            } else {
                i.clamp(0, nx as i64 - 1) as usize
            }
        };
        let st = lam * lam / spec.dt();
        let pad = st.ceil() as i64 + 2;
        let lo = rows.iter().copied().min().unwrap_or(0) - pad;
        let hi = rows.iter().copied().max().unwrap_or(0) + pad;
        let span = (hi - lo + 1) as usize;
        let mut xpass = vec![0.0; nx * span];
        let xs = stencil(&self.rule, lam / spec.h);
        let ts = stencil(&self.rule, st);
        for (r, out) in xpass.chunks_mut(nx).enumerate() {
            let k = (lo + r as i64).rem_euclid(nt as i64) as usize;
            let row = &v[k * nx..(k + 1) * nx];
            for (j, o) in out.iter_mut().enumerate() {
                *o = xs.iter().map(|&(d, w)| w * row[xi(j as i64 + d)]).sum();
            }
        }
        let mut out = Vec::with_capacity(nx * rows.len());
        for &k in rows {
            for j in 0..nx {
                out.push(ts.iter().map(|&(d, w)| w * xpass[(k + d - lo) as usize * nx + j]).sum());
            }
        }
        out
    }
}

/// `P_{γx₀}φ` for each level. `φ` must be periodic in time; if it is not
/// periodic in `x` the outputs are cropped by the largest footprint.
pub fn vertical_mollify(phi: &ScalarField, spec: &MollifierSpec, x0_levels: &[f64]) -> Result<Vec<ScalarField>> {
    let m = Mollifier::new(phi, spec)?;
    let g = &phi.spec;
    let (nx, nt) = (g.counts[0], g.counts[1]);
    let rows: Vec<i64> = (0..nt as i64).collect();
    let lam_max = x0_levels.iter().fold(0.0f64, |a, v| a.max(spec.gamma * v.abs()));
    let margin = if m.xper { 0 } else { (lam_max / g.h).ceil() as usize + 2 };
    if 2 * margin >= nx {
        return Err(Error::Margin { space: margin, time: 0 });
    }
    let out_spec = GridSpec::new(
        1,
        g.h,
        ParabolicPoint::new(vec![g.origin.x[0] + margin as f64 * g.h], g.origin.t),
        vec![nx - 2 * margin, nt],
    )?;
    x0_levels
        .iter()
        .map(|&x0| {
            let full = m.level(x0, &rows);
            let vals = (0..nt).flat_map(|k| (margin..nx - margin).map(move |j| (k, j))).map(|(k, j)| full[k * nx + j]).collect();
            ScalarField::new(out_spec.clone(), vals, phi.periodicity)
        })
        .collect()
}

/// The flattening map sampled on a strip, with the derivatives of
/// `ψ = P_{γx₀}φ` the pulled-back coefficients need.
#[derive(Clone, Debug)]
pub struct DknsMap {
    pub strip: GridSpec,
    pub gamma: f64,
    pub psi: ScalarField,
    pub psi_x0: ScalarField,
    pub psi_x: ScalarField,
    pub psi_t: ScalarField,
    /// `∂_{x₀}D = ψ_{x₀x₀}`.
    pub d_x0: ScalarField,
    /// `∂_x D = ψ_{x₀x}`.
    pub d_x: ScalarField,
    /// `min D` over the strip; the map is invertible when positive.
    pub certificate: f64,
    faces: Vec<Vec<f64>>,
    centers: Vec<Vec<f64>>,
}

/// Sample the map on `strip`, whose `x` axis must equal the graph's and whose
/// time axis must be aligned with it. `φ` must be periodic in both.
pub fn dkns_map(phi: &ScalarField, spec: &MollifierSpec, strip: &GridSpec) -> Result<DknsMap> {
    strip::check(strip)?;
    if phi.periodicity != Periodicity::Full {
        return Err(Error::NotPeriodic);
    }
    let g = &phi.spec;
    let same_x = g.h == strip.h && g.counts[0] == strip.counts[1] && (g.origin.x[0] - strip.origin.x[1]).abs() < 1e-12 * g.h;
    if !same_x {
        return Err(Error::InvalidGrid("strip x axis must match the graph grid".into()));
    }
    let q = (strip.origin.t - g.origin.t) / g.dt();
    if (q - q.round()).abs() > 1e-6 {
        return Err(Error::InvalidGrid("strip time axis is not aligned with the graph grid".into()));
    }
    let k0 = q.round() as i64;
    let (nx0, nt) = (strip.counts[0], strip.counts[2]);
    let rows: Vec<i64> = (k0 - 1..=k0 + nt as i64).collect();
    let m = Mollifier::new(phi, spec)?;
    let h = strip.h;
    let faces: Vec<Vec<f64>> = (0..=nx0).map(|i| m.level(i as f64 * h, &rows)).collect();
    let centers: Vec<Vec<f64>> = (0..nx0).map(|i| m.level((i as f64 + 0.5) * h, &rows)).collect();
    let mut map = DknsMap {
        strip: strip.clone(),
        gamma: spec.gamma,
        psi: ScalarField::zeros(strip.clone(), Periodicity::None),
        psi_x0: ScalarField::zeros(strip.clone(), Periodicity::None),
        psi_x: ScalarField::zeros(strip.clone(), Periodicity::None),
        psi_t: ScalarField::zeros(strip.clone(), Periodicity::None),
        d_x0: ScalarField::zeros(strip.clone(), Periodicity::None),
        d_x: ScalarField::zeros(strip.clone(), Periodicity::None),
        certificate: 0.0,
        faces,
        centers,
    };
    map.psi = map.derivative(0, 0, 0)?;
    map.psi_x0 = map.derivative(1, 0, 0)?;
    map.psi_x = map.derivative(0, 1, 0)?;
    map.psi_t = map.derivative(0, 0, 1)?;
    map.d_x0 = map.derivative(2, 0, 0)?;
    map.d_x = map.derivative(1, 1, 0)?;
    map.certificate = map.psi_x0.values.iter().fold(f64::INFINITY, |a, v| a.min(1.0 + v));
    if !(map.certificate > 0.0) {
        return Err(Error::NotInvertible(map.certificate));
    }
    Ok(map)
}

impl DknsMap {
    /// `∂^σ_{x₀} ∂^α_x ∂^θ_t ψ` on the strip, `σ ≤ 2`, `θ ≤ 2`.
    pub fn derivative(&self, sigma: usize, alpha: usize, theta: usize) -> Result<ScalarField> {
        if sigma > 2 || theta > 2 {
            return Err(Error::Invalid("derivative orders above 2 in x0 or t are not sampled".into()));
        }
        let s = &self.strip;
        let (nx0, nx, nt) = (s.counts[0], s.counts[1], s.counts[2]);
        let (h, dt) = (s.h, s.dt());
        let ext = nt + 2;
        let mut out = vec![0.0; nx0 * nx * nt];
        for i in 0..nx0 {
            let (f0, c, f1) = (&self.faces[i], &self.centers[i], &self.faces[i + 1]);
            let mut col: Vec<f64> = match sigma {
                0 => c.clone(),
                1 => f0.iter().zip(f1).map(|(a, b)| (b - a) / h).collect(),
                _ => (0..nx * ext).map(|p| (f1[p] - 2.0 * c[p] + f0[p]) / (0.25 * h * h)).collect(),
            };
            let mut a = alpha;
            while a > 0 {
                let second = a >= 2;
                let mut next = vec![0.0; col.len()];
                for k in 0..ext {
                    for j in 0..nx {
                        let (jm, jp) = ((j + nx - 1) % nx, (j + 1) % nx);
                        let r = &col[k * nx..(k + 1) * nx];
                        next[k * nx + j] = if second { (r[jp] - 2.0 * r[j] + r[jm]) / (h * h) } else { (r[jp] - r[jm]) / (2.0 * h) };
                    }
                }
                col = next;
                a -= if second { 2 } else { 1 };
            }
            for k in 0..nt {
                let e = k + 1;
                for j in 0..nx {
                    let at = |kk: usize| col[kk * nx + j];
                    out[lin([nx0, nx, nt], i, j, k)] = match theta {
                        0 => at(e),
                        1 => (at(e + 1) - at(e - 1)) / (2.0 * dt),
                        _ => (at(e + 1) - 2.0 * at(e) + at(e - 1)) / (dt * dt),
                    };
                }
            }
        }
        ScalarField::new(s.clone(), out, Periodicity::None)
    }

    /// `y₀ = x₀ + ψ` at a strip cell.
    pub fn image_height(&self, idx: [usize; 3]) -> f64 {
        self.strip.coord(0, idx[0]) + self.psi.get(idx)
    }
}

/// Drift and diffusion on a strip grid: `a` row-major `[a00, a01, a10, a11]`,
/// `b = [b0, b1]`, in the operator `div(A∇u) + B·∇u`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField {
    pub a: [ScalarField; 4],
    pub b: [ScalarField; 2],
}

type PointCoeffs = ([f64; 4], [f64; 2]);

impl CoefficientField {
    pub fn from_fn(strip: &GridSpec, f: impl Fn(f64, f64, f64) -> PointCoeffs) -> Result<Self> {
        strip::check(strip)?;
        let n = strip.len();
        let mut a: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::with_capacity(n));
        let mut b: [Vec<f64>; 2] = std::array::from_fn(|_| Vec::with_capacity(n));
        for lin in 0..n {
            let idx = strip.unravel(lin);
            let (av, bv) = f(strip.coord(0, idx[0]), strip.coord(1, idx[1]), strip.coord(2, idx[2]));
            for k in 0..4 {
                a[k].push(av[k]);
            }
            for k in 0..2 {
                b[k].push(bv[k]);
            }
        }
        Self::from_values(strip, a, b)
    }

    pub fn constant(strip: &GridSpec, a: [f64; 4], b: [f64; 2]) -> Result<Self> {
        Self::from_fn(strip, |_, _, _| (a, b))
    }

    pub fn identity(strip: &GridSpec) -> Result<Self> {
        Self::constant(strip, [1.0, 0.0, 0.0, 1.0], [0.0, 0.0])
    }

    fn from_values(strip: &GridSpec, a: [Vec<f64>; 4], b: [Vec<f64>; 2]) -> Result<Self> {
        let mk = |v: Vec<f64>| ScalarField::new(strip.clone(), v, Periodicity::None);
        let [a0, a1, a2, a3] = a;
        let [b0, b1] = b;
        Ok(Self { a: [mk(a0)?, mk(a1)?, mk(a2)?, mk(a3)?], b: [mk(b0)?, mk(b1)?] })
    }

    /// Coefficients of the graph-side operator evaluated at the image
    /// `ρ(X,t)` of every strip cell.
    pub fn sampled_on_map(map: &DknsMap, f: impl Fn(f64, f64, f64) -> PointCoeffs) -> Result<Self> {
        let s = &map.strip;
        Self::from_fn(s, |x0, x, t| {
            let idx = [
                ((x0 / s.h) - 0.5).round() as usize,
                ((x - s.origin.x[1]) / s.h - 0.5).round() as usize,
                ((t - s.origin.t) / s.dt() - 0.5).round() as usize,
            ];
            f(map.image_height(idx), x, t)
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.a[0].spec
    }

    pub fn at(&self, p: usize) -> PointCoeffs {
        ([self.a[0].values[p], self.a[1].values[p], self.a[2].values[p], self.a[3].values[p]], [self.b[0].values[p], self.b[1].values[p]])
    }

    /// Extreme eigenvalues of the symmetric part of `A` over the grid.
    pub fn ellipticity(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in 0..self.a[0].values.len() {
            let (a, _) = self.at(p);
            let (s00, s01, s11) = (a[0], 0.5 * (a[1] + a[2]), a[3]);
            let mid = 0.5 * (s00 + s11);
            let rad = (0.25 * (s00 - s11) * (s00 - s11) + s01 * s01).sqrt();
            lo = lo.min(mid - rad);
            hi = hi.max(mid + rad);
        }
        (lo, hi)
    }

    /// `max x₀|B|`.
    pub fn drift_bound(&self) -> f64 {
        let s = self.spec();
        (0..s.len())
            .map(|p| {
                let x0 = s.coord(0, s.unravel(p)[0]);
                x0 * self.b[0].values[p].hypot(self.b[1].values[p])
            })
            .fold(0.0, f64::max)
    }
}

/// Pulled-back coefficients with their measured ellipticity bounds.
#[derive(Clone, Debug)]
pub struct PulledBackCoefficients {
    pub coeffs: CoefficientField,
    pub lambda_v: f64,
    pub big_lambda_v: f64,
}

/// Transform graph-side coefficients (already sampled at the images of the
/// strip cells) through the map.
pub fn pullback_coefficients(omega: &CoefficientField, map: &DknsMap) -> Result<PulledBackCoefficients> {
    if omega.spec() != &map.strip {
        return Err(Error::InvalidGrid("coefficients and map live on different strips".into()));
    }
    let n = map.strip.len();
    let mut a: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::with_capacity(n));
    let mut b: [Vec<f64>; 2] = std::array::from_fn(|_| Vec::with_capacity(n));
    for p in 0..n {
        let (av, bv) = omega.at(p);
        let d = 1.0 + map.psi_x0.values[p];
        let px = map.psi_x.values[p];
        let pt = map.psi_t.values[p];
        let grad_d = [map.d_x0.values[p], map.d_x.values[p]];
        let conj = |m: [f64; 4]| -> [f64; 4] {
            // J⁻¹ M J⁻ᵀ
            let r = [(m[0] - px * m[2]) / d, (m[1] - px * m[3]) / d, m[2], m[3]];
            [(r[0] - px * r[1]) / d, r[1], (r[2] - px * r[3]) / d, r[3]]
        };
        let av2 = conj(av);
        let at2 = conj([av[0], av[2], av[1], av[3]]);
        let jb = [(bv[0] - px * bv[1]) / d, bv[1]];
        let corr = [(at2[0] * grad_d[0] + at2[1] * grad_d[1]) / d, (at2[2] * grad_d[0] + at2[3] * grad_d[1]) / d];
        for k in 0..4 {
            a[k].push(av2[k]);
        }
        b[0].push(jb[0] + pt / d + corr[0]);
        b[1].push(jb[1] + corr[1]);
    }
    let coeffs = CoefficientField::from_values(&map.strip, a, b)?;
    let (lambda_v, big_lambda_v) = coeffs.ellipticity();
    if !(lambda_v > 0.0) {
        return Err(Error::Ellipticity(lambda_v));
    }
    Ok(PulledBackCoefficients { coeffs, lambda_v, big_lambda_v })
}

fn test_bump(z: f64, c: f64, w: f64) -> (f64, f64) {
    let u = z - c;
    if u.abs() >= w {
        return (0.0, 0.0);
    }
    let arg = std::f64::consts::PI * u / (2.0 * w);
    (arg.cos().powi(2), -(std::f64::consts::PI / (2.0 * w)) * (2.0 * arg).sin())
}

/// Weak residual of the pulled-back equation for the pulled-back caloric
/// function `u = e^{−(α²+β²)s} sin(αy₀) sin(βy)` (graph side `A = I`, `B = 0`),
/// against six interior bump test functions. Returns the largest residual
/// relative to the sum of the absolute terms.
pub fn weak_residual_certificate(map: &DknsMap, pulled: &CoefficientField) -> Result<f64> {
    let s = &map.strip;
    let (nx0, nx, nt) = (s.counts[0], s.counts[1], s.counts[2]);
    if nt < 6 || nx0 < 6 {
        return Err(Error::Degenerate("strip too small for the weak-residual test".into()));
    }
    let height = nx0 as f64 * s.h;
    let width = s.extent(1);
    let span = s.extent(2);
    let alpha = std::f64::consts::PI;
    let beta = 2.0 * std::f64::consts::PI / width;
    let v: Vec<f64> = (0..s.len())
        .map(|p| {
            let idx = s.unravel(p);
            let t = s.coord(2, idx[2]);
            let y0 = map.image_height(idx);
            (-(alpha * alpha + beta * beta) * t).exp() * (alpha * y0).sin() * (beta * s.coord(1, idx[1])).sin()
        })
        .collect();
    let [v0, v1, vt] = strip::gradient(&v, s);
    let vol = s.cell_volume();
    let mut worst = 0.0f64;
    for k in 0..6 {
        let c0 = height * (0.35 + 0.05 * k as f64);
        let w0 = height / 5.0;
        let c1 = s.origin.x[1] + width * k as f64 / 6.0;
        let w1 = width / 4.0;
        let ct = s.origin.t + span / 2.0;
        let wt = span / 3.0;
        let (mut res, mut scale) = (0.0, 0.0);
        for i in 0..nx0 {
            let (e0, d0) = test_bump(s.coord(0, i), c0, w0);
            if e0 == 0.0 && d0 == 0.0 {
                continue;
            }
            for kk in 0..nt {
                let (et, dtt) = test_bump(s.coord(2, kk), ct, wt);
                if et == 0.0 && dtt == 0.0 {
                    continue;
                }
                for j in 0..nx {
                    let x = s.coord(1, j);
                    let dx = (x - c1 + width / 2.0).rem_euclid(width) - width / 2.0;
                    let (e1, d1) = test_bump(dx, 0.0, w1);
                    let eta = e0 * e1 * et;
                    let grad = [d0 * e1 * et, e0 * d1 * et];
                    let p = lin([nx0, nx, nt], i, j, kk);
                    let (a, b) = pulled.at(p);
                    let gv = [v0[p], v1[p]];
                    let agv = [a[0] * gv[0] + a[1] * gv[1], a[2] * gv[0] + a[3] * gv[1]];
                    let t1 = vt[p] * eta;
                    let t2 = agv[0] * grad[0] + agv[1] * grad[1];
                    let t3 = -(b[0] * gv[0] + b[1] * gv[1]) * eta;
                    res += (t1 + t2 + t3) * vol;
                    scale += (t1.abs() + t2.abs() + t3.abs()) * vol;
                }
            }
        }
        if scale > 0.0 {
            worst = worst.max(res.abs() / scale);
        }
    }
    Ok(worst)
}

fn lemma_a_hypothesis(sigma: usize, alpha: usize, theta: usize) -> Result<usize> {
    if sigma + theta == 0 && alpha < 2 {
        return Err(Error::Invalid("need sigma + theta >= 1 or |alpha| >= 2".into()));
    }
    Ok(sigma + alpha + theta)
}

fn lemma_a_strip(phi: &ScalarField, d: f64) -> Result<GridSpec> {
    let g = &phi.spec;
    let nx0 = ((d / 4.0) / g.h).round().max(1.0) as usize;
    strip::strip_over(g, nx0, 0, g.counts[1])
}

/// The map on the Lemma A strip `(0, d/4) × graph grid`.
pub fn lemma_a_map(phi: &ScalarField, spec: &MollifierSpec, d: f64) -> Result<DknsMap> {
    dkns_map(phi, spec, &lemma_a_strip(phi, d)?)
}

/// `sup_{r ≤ d/4} ν[(0,r) × Q_r] / |Q_r|` for
/// `dν = (∂^σ_{x₀}∂^α_x∂^θ_t P_{γx₀}φ)² x₀^{2l+2θ−3}`.
pub fn lemma_a_carleson_norm(phi: &ScalarField, spec: &MollifierSpec, sigma: usize, alpha: usize, theta: usize, d: f64) -> Result<f64> {
    lemma_a_carleson_norm_on(&lemma_a_map(phi, spec, d)?, sigma, alpha, theta, d)
}

/// [`lemma_a_carleson_norm`] on a map from [`lemma_a_map`].
pub fn lemma_a_carleson_norm_on(map: &DknsMap, sigma: usize, alpha: usize, theta: usize, d: f64) -> Result<f64> {
    let l = lemma_a_hypothesis(sigma, alpha, theta)?;
    let strip_spec = map.strip.clone();
    let der = map.derivative(sigma, alpha, theta)?;
    let expo = (2 * l + 2 * theta) as i32 - 3;
    let dens: Vec<f64> = (0..strip_spec.len())
        .map(|p| {
            let x0 = strip_spec.coord(0, strip_spec.unravel(p)[0]);
            der.values[p].powi(2) * x0.powi(expo)
        })
        .collect();
    let density = ScalarField::new(strip_spec, dens, Periodicity::None)?;
    // |Q_r| = 4r³ for one lateral axis; the Carleson ratio divides by r³.
    Ok(carleson_norm_measure(&density, d / 4.0)?.norm / 4.0)
}

/// `max |∂^l P_{γx₀}φ| / (η(1+ℓ) x₀^{1−l−θ})` over `x₀ ≤ d/4`.
#[allow(clippy::too_many_arguments)]
pub fn lemma_a_pointwise_bound(
    phi: &ScalarField,
    spec: &MollifierSpec,
    sigma: usize,
    alpha: usize,
    theta: usize,
    d: f64,
    eta: f64,
    ell: f64,
) -> Result<f64> {
    lemma_a_pointwise_bound_on(&lemma_a_map(phi, spec, d)?, sigma, alpha, theta, eta, ell)
}

/// [`lemma_a_pointwise_bound`] on a map from [`lemma_a_map`].
pub fn lemma_a_pointwise_bound_on(map: &DknsMap, sigma: usize, alpha: usize, theta: usize, eta: f64, ell: f64) -> Result<f64> {
    let l = sigma + alpha + theta;
    if l == 0 {
        return Err(Error::Invalid("need l >= 1".into()));
    }
    let strip_spec = &map.strip;
    let der = map.derivative(sigma, alpha, theta)?;
    let mut worst = 0.0f64;
    for p in 0..strip_spec.len() {
        let x0 = strip_spec.coord(0, strip_spec.unravel(p)[0]);
        let num = der.values[p].abs();
        if num == 0.0 {
            continue;
        }
        let den = eta * (1.0 + ell) * x0.powi(1 - l as i32 - theta as i32);
        worst = worst.max(if den > 0.0 { num / den } else { f64::INFINITY });
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn periodic_graph(h: f64, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        let n = (1.0 / h).round() as usize;
        let g = GridSpec::new(1, h, ParabolicPoint::new(vec![0.0], 0.0), vec![n, n * n]).unwrap();
        ScalarField::from_fn(g, Periodicity::Full, |x, t| f(x[0], t))
    }

    #[test]
    fn kernel_mass_and_evenness() {
        let k = mollifier_kernel(8).unwrap();
        let mass: f64 = k.values.iter().sum::<f64>() * k.spec.cell_volume();
        assert!((mass - 1.0).abs() < 1e-12);
        let (nx, nt) = (k.spec.counts[0], k.spec.counts[1]);
        for j in 0..nt {
            for i in 0..nx {
                let v = k.get([i, j, 0]);
                assert_eq!(v, k.get([nx - 1 - i, j, 0]));
                assert_eq!(v, k.get([i, nt - 1 - j, 0]));
            }
        }
    }

    #[test]
    fn affine_and_constant_are_fixed() {
        let g = GridSpec::new(1, 1.0 / 16.0, ParabolicPoint::new(vec![0.0], 0.0), vec![32, 256]).unwrap();
        let phi = ScalarField::from_fn(g, Periodicity::Time, |x, _| 0.75 * x[0] - 0.5);
        let spec = MollifierSpec::new(0.25).unwrap();
        for lvl in vertical_mollify(&phi, &spec, &[0.0, 0.3, 0.9]).unwrap() {
            for p in 0..lvl.values.len() {
                let x = lvl.spec.coord(0, lvl.spec.unravel(p)[0]);
                assert!((lvl.values[p] - (0.75 * x - 0.5)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn zero_graph_gives_identity_pullback() {
        let phi = periodic_graph(1.0 / 8.0, |_, _| 0.0);
        let strip_spec = strip::strip_over(&phi.spec, 4, 0, 8).unwrap();
        let map = dkns_map(&phi, &MollifierSpec::for_lipschitz(0.0), &strip_spec).unwrap();
        assert_eq!(map.certificate, 1.0);
        let omega = CoefficientField::from_fn(&strip_spec, |x0, x, t| ([1.0 + x0, 0.3 * x, -0.1, 2.0 + t], [x, -x0])).unwrap();
        let pulled = pullback_coefficients(&omega, &map).unwrap();
        assert_eq!(pulled.coeffs, omega);
    }
}
