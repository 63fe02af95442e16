//! Parabolic Fourier multipliers and the singular-integral half
//! time-derivative.
//!
//! Transforms use `f̂(k) = Σ f e^{-2πi k·n/N}`, so `∂_j` has symbol `iξ_j` with
//! physical frequencies `ξ = 2πk/L`. With that convention the symbols are
//!
//! | operator | symbol |
//! |---|---|
//! | `D_α` (time) | `|τ|^α` |
//! | `D_n` | `iτ/ρ` |
//! | `𝔻` | `ρ` |
//! | `R_j`, `j < n` | `-iξ_j/ρ` |
//! | `R_n` | `-iτ/ρ²` |
//!
//! where `ρ = ‖(ξ,τ)‖` is the frequency-side parabolic norm. By default this
//! is the positive root of `ρ⁴ = |ξ|²ρ² + τ²`, the norm for which
//! `𝔻 = Σ_j R_j 𝔻_j` holds mode by mode. It is comparable to
//! `|ξ| + |τ|^{1/2}` (which is available as [`SymbolNorm::Sum`]) within a
//! factor of two. Every symbol is zero at the zero frequency.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::grid::{GridSpec, ParabolicPoint, Periodicity, ScalarField};
use crate::quad::smoothstep;
use crate::{Error, Result};

/// Multiplier kinds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MultiplierSpec {
    /// `|τ|^α`, `α ∈ (0, 2)`.
    DAlphaTime(f64),
    /// Parabolic half time-derivative `D_n`.
    DnHalf,
    /// Parabolic derivative `𝔻`.
    DParabolic,
    /// Parabolic Riesz transform `R_j`, `j ∈ 1..=n` with `j = n` the time slot.
    Riesz(usize),
}

/// Frequency-side parabolic norm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymbolNorm {
    /// Root of `ρ⁴ = |ξ|²ρ² + τ²`.
    #[default]
    Implicit,
    /// `|ξ| + |τ|^{1/2}`.
    Sum,
}

impl SymbolNorm {
    pub fn eval(self, xi2: f64, tau: f64) -> f64 {
        match self {
            SymbolNorm::Implicit => (0.5 * (xi2 + (xi2 * xi2 + 4.0 * tau * tau).sqrt())).sqrt(),
            SymbolNorm::Sum => xi2.sqrt() + tau.abs().sqrt(),
        }
    }
}

impl MultiplierSpec {
    fn validate(self, n_minus_1: usize) -> Result<()> {
        match self {
            MultiplierSpec::DAlphaTime(a) if !(a > 0.0 && a < 2.0) => {
                Err(Error::Invalid(format!("alpha must lie in (0,2), got {a}")))
            }
            MultiplierSpec::Riesz(j) if j == 0 || j > n_minus_1 + 1 => {
                Err(Error::Invalid(format!("Riesz index must lie in 1..={}, got {j}", n_minus_1 + 1)))
            }
            _ => Ok(()),
        }
    }

    /// Symbol at physical frequency `(ξ, τ)`.
    pub fn symbol(self, xi: &[f64], tau: f64, norm: SymbolNorm) -> Complex64 {
        let xi2: f64 = xi.iter().map(|v| v * v).sum();
        let rho = norm.eval(xi2, tau);
        if rho == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match self {
            MultiplierSpec::DAlphaTime(a) => Complex64::new(tau.abs().powf(a), 0.0),
            MultiplierSpec::DnHalf => Complex64::new(0.0, tau / rho),
            MultiplierSpec::DParabolic => Complex64::new(rho, 0.0),
            MultiplierSpec::Riesz(j) if j <= xi.len() => Complex64::new(0.0, -xi[j - 1] / rho),
            MultiplierSpec::Riesz(_) => Complex64::new(0.0, -tau / (rho * rho)),
        }
    }

    /// Axis on which the symbol is odd, if any.
    fn odd_axis(self, n_minus_1: usize) -> Option<usize> {
        match self {
            MultiplierSpec::DnHalf => Some(n_minus_1),
            MultiplierSpec::Riesz(j) => Some(j - 1),
            _ => None,
        }
    }
}

/// Angular frequencies `2πk/L` of one axis in FFT order.
pub fn axis_frequencies(n: usize, step: f64) -> Vec<f64> {
    let l = n as f64 * step;
    (0..n)
        .map(|k| {
            let ks = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            2.0 * std::f64::consts::PI * ks / l
        })
        .collect()
}

fn fft_nd(data: &mut [Complex64], shape: [usize; 3], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let strides = [1, shape[0], shape[0] * shape[1]];
    for axis in 0..3 {
        let n = shape[axis];
        if n == 1 {
            continue;
        }
        let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let stride = strides[axis];
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let total = data.len();
        for start in 0..total {
            if (start / stride) % n != 0 {
                continue;
            }
            for (k, l) in line.iter_mut().enumerate() {
                *l = data[start + k * stride];
            }
            fft.process(&mut line);
            for (k, l) in line.iter().enumerate() {
                data[start + k * stride] = *l;
            }
        }
    }
}

struct Spectrum {
    spec: GridSpec,
    shape: [usize; 3],
    data: Vec<Complex64>,
    freqs: Vec<Vec<f64>>,
}

impl Spectrum {
    fn of(f: &ScalarField) -> Result<Self> {
        if f.periodicity != Periodicity::Full {
            return Err(Error::NotPeriodic);
        }
        let shape = f.spec.shape();
        let mut data: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_nd(&mut data, shape, false);
        let freqs = (0..f.spec.naxes()).map(|a| axis_frequencies(f.spec.counts[a], f.spec.step(a))).collect();
        Ok(Self { spec: f.spec.clone(), shape, data, freqs })
    }

    /// Visit every mode with `(linear index, ξ, τ, index)`.
    fn for_each(&self, mut g: impl FnMut(usize, &[f64], f64, [usize; 3])) {
        let na = self.spec.n_minus_1;
        let mut xi = vec![0.0; na];
        for lin in 0..self.data.len() {
            let idx = self.spec.unravel(lin);
            for (a, v) in xi.iter_mut().enumerate() {
                *v = self.freqs[a][idx[a]];
            }
            g(lin, &xi, self.freqs[na][idx[na]], idx);
        }
    }

    fn inverse_real(&self, data: Vec<Complex64>) -> Result<Vec<f64>> {
        let mut data = data;
        fft_nd(&mut data, self.shape, true);
        let n = data.len() as f64;
        let out: Vec<f64> = data.iter().map(|c| c.re / n).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite value after inverse transform".into()));
        }
        Ok(out)
    }
}

/// Apply a multiplier with the default symbol norm.
pub fn apply_multiplier(f: &ScalarField, m: MultiplierSpec) -> Result<ScalarField> {
    apply_multiplier_with(f, m, SymbolNorm::default())
}

/// Apply a multiplier to a fully periodic field. Odd symbols are set to zero
/// on Nyquist modes of their odd axis so the output stays real.
pub fn apply_multiplier_with(f: &ScalarField, m: MultiplierSpec, norm: SymbolNorm) -> Result<ScalarField> {
    m.validate(f.spec.n_minus_1)?;
    let sp = Spectrum::of(f)?;
    let odd = m.odd_axis(f.spec.n_minus_1);
    let mut out = sp.data.clone();
    sp.for_each(|lin, xi, tau, idx| {
        let mut s = m.symbol(xi, tau, norm);
        if let Some(a) = odd {
            let n = f.spec.counts[a];
            if n % 2 == 0 && idx[a] == n / 2 {
                s = Complex64::new(0.0, 0.0);
            }
        }
        out[lin] *= s;
    });
    Ok(f.with_values(sp.inverse_real(out)?))
}

/// Result of [`riesz_decomposition_residual`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszResidual {
    pub value: f64,
    /// `false` when `𝔻f ≡ 0` and the value is an absolute residual.
    pub relative: bool,
}

/// `‖𝔻f − Σ_j R_j 𝔻_j f‖₂ / ‖𝔻f‖₂` with `𝔻_j = ∂_j` for spatial `j` and
/// `𝔻_n = D_n`.
pub fn riesz_decomposition_residual(f: &ScalarField) -> Result<RieszResidual> {
    riesz_decomposition_residual_with(f, SymbolNorm::default())
}

pub fn riesz_decomposition_residual_with(f: &ScalarField, norm: SymbolNorm) -> Result<RieszResidual> {
    let sp = Spectrum::of(f)?;
    let na = f.spec.n_minus_1;
    let zero = Complex64::new(0.0, 0.0);
    let mut lhs = vec![zero; sp.data.len()];
    let mut rhs = vec![zero; sp.data.len()];
    sp.for_each(|lin, xi, tau, _| {
        let v = sp.data[lin];
        lhs[lin] = MultiplierSpec::DParabolic.symbol(xi, tau, norm) * v;
        let mut acc = zero;
        for j in 1..=na {
            let dj = Complex64::new(0.0, xi[j - 1]);
            acc += MultiplierSpec::Riesz(j).symbol(xi, tau, norm) * (dj * v);
        }
        let dn = MultiplierSpec::DnHalf.symbol(xi, tau, norm);
        acc += MultiplierSpec::Riesz(na + 1).symbol(xi, tau, norm) * (dn * v);
        rhs[lin] = acc;
    });
    let a = sp.inverse_real(lhs)?;
    let b = sp.inverse_real(rhs)?;
    let diff: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let base: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if base <= 1e-300 {
        return Ok(RieszResidual { value: diff, relative: false });
    }
    Ok(RieszResidual { value: diff / base, relative: true })
}

/// Make a field periodic: on each non-periodic spatial axis subtract the
/// mean endpoint slope, then taper the outer 10% of every non-periodic axis
/// towards the field mean with a smoothstep window.
pub fn taper_to_periodic(f: &ScalarField) -> ScalarField {
    if f.periodicity == Periodicity::Full {
        return f.clone();
    }
    let spec = &f.spec;
    let s = spec.shape();
    let mut v = f.values.clone();
    for a in 0..spec.n_minus_1 {
        if f.axis_periodic(a) {
            continue;
        }
        let n = s[a];
        let stride = [1, s[0], s[0] * s[1]][a];
        let span = spec.coord(a, n - 1) - spec.coord(a, 0);
        let mut slope = 0.0;
        let mut lines = 0usize;
        for lin in 0..v.len() {
            if spec.unravel(lin)[a] == 0 {
                slope += (v[lin + (n - 1) * stride] - v[lin]) / span;
                lines += 1;
            }
        }
        let slope = slope / lines as f64;
        for (lin, val) in v.iter_mut().enumerate() {
            *val -= slope * spec.coord(a, spec.unravel(lin)[a]);
        }
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let window = |n: usize, i: usize| -> f64 {
        let pos = (i as f64 + 0.5) / n as f64;
        let w = 0.1;
        smoothstep(pos / w) * smoothstep((1.0 - pos) / w)
    };
    for (lin, val) in v.iter_mut().enumerate() {
        let idx = spec.unravel(lin);
        let mut w = 1.0;
        for a in 0..spec.naxes() {
            if !f.axis_periodic(a) {
                w *= window(s[a], idx[a]);
            }
        }
        *val = mean + w * (*val - mean);
    }
    ScalarField { spec: spec.clone(), values: v, periodicity: Periodicity::Full }
}

/// Product-integration weights for `∫ g(u) |u|^{-3/2} du` over `u ≥ Δt`
/// with `g` piecewise linear on the nodes `jΔt`, `j = 1..=jmax`, in units
/// where `Δt = 1`.
fn kernel_weights(jmax: usize) -> Vec<f64> {
    let mut w = vec![0.0; jmax + 1];
    for j in 1..jmax {
        let (a, b) = (j as f64, j as f64 + 1.0);
        let i1 = 2.0 * (a.powf(-0.5) - b.powf(-0.5));
        let i2 = 2.0 * (b.sqrt() - a.sqrt());
        w[j] += b * i1 - i2;
        w[j + 1] += i2 - a * i1;
    }
    w
}

/// `c_n ∫ (f(x,s) − f(x,t)) / |s−t|^{3/2} ds` over `K` periodic images.
///
/// The cell `|s − t| < h²` is excluded. The rest of the window is integrated
/// exactly against the piecewise-linear interpolant of `f`. Beyond the
/// window the constant part `−(f(t) − mean f)·∫|u|^{-3/2}` is added in
/// closed form, which removes the truncation bias of the window.
pub fn pointwise_half_time_derivative(f: &ScalarField, c_n: f64, images: usize) -> Result<ScalarField> {
    let ta = f.spec.time_axis();
    if !f.axis_periodic(ta) {
        return Err(Error::NotPeriodic);
    }
    let images = images.max(1);
    let s = f.spec.shape();
    let nt = s[ta];
    let dt = f.spec.dt();
    let jmax = images * nt / 2;
    let w = kernel_weights(jmax);
    let scale = dt.powf(-0.5);
    let mut wp = vec![0.0; nt];
    for (j, &wj) in w.iter().enumerate().skip(1) {
        wp[j % nt] += wj * scale;
        wp[(nt - j % nt) % nt] += wj * scale;
    }
    let total: f64 = wp.iter().sum();
    let tail = 4.0 / (jmax as f64 * dt).sqrt();
    let col = f.values.len() / nt;
    let mut out = vec![0.0; f.values.len()];
    let mut line = vec![0.0; nt];
    for c in 0..col {
        for (k, l) in line.iter_mut().enumerate() {
            *l = f.values[c + k * col];
        }
        let mean = line.iter().sum::<f64>() / nt as f64;
        for k in 0..nt {
            let mut acc = 0.0;
            for (j, &wj) in wp.iter().enumerate() {
                acc += wj * line[(k + j) % nt];
            }
            acc -= total * line[k];
            acc -= tail * (line[k] - mean);
            out[c + k * col] = c_n * acc;
        }
    }
    Ok(f.with_values(out))
}

/// Relative L² distance `‖a − b‖ / ‖b‖`.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let n: f64 = b.iter().map(|y| y * y).sum();
    (d / n).sqrt()
}

/// Time-harmonic test grid sharing `grid`'s `h`, time origin and time count.
pub fn harmonic_grid(grid: &GridSpec) -> Result<GridSpec> {
    let nt = grid.counts[grid.time_axis()];
    GridSpec::new(1, grid.h, ParabolicPoint::new(vec![0.0], grid.origin.t), vec![4, nt])
}

/// Least-squares `c_n` matching the kernel operator against `|τ|^{1/2}` on
/// `cos(kωt)`, `k = 1..=4`, over `grid`'s time axis.
pub fn calibrate_cn(grid: &GridSpec) -> Result<f64> {
    let g = harmonic_grid(grid)?;
    let nt = g.counts[1];
    let omega = 2.0 * std::f64::consts::PI / g.extent(1);
    let (mut num, mut den) = (0.0, 0.0);
    let mut used = 0;
    for k in 1..=4usize {
        if 2 * k >= nt {
            continue;
        }
        let f = ScalarField::from_fn(g.clone(), Periodicity::Full, |_, t| (k as f64 * omega * t).cos());
        let p = pointwise_half_time_derivative(&f, 1.0, 3)?;
        let m = apply_multiplier(&f, MultiplierSpec::DAlphaTime(0.5))?;
        num += p.values.iter().zip(&m.values).map(|(a, b)| a * b).sum::<f64>();
        den += p.values.iter().map(|a| a * a).sum::<f64>();
        used += 1;
    }
    if used == 0 || den <= 0.0 {
        return Err(Error::Calibration("every calibration harmonic is aliased on this grid".into()));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize, nt: usize) -> GridSpec {
        GridSpec::new(1, 1.0 / n as f64, ParabolicPoint::new(vec![0.0], 0.0), vec![n, nt]).unwrap()
    }

    #[test]
    fn constants_are_annihilated() {
        let f = ScalarField::from_fn(grid(16, 32), Periodicity::Full, |_, _| 3.0);
        for m in [MultiplierSpec::DAlphaTime(0.5), MultiplierSpec::DnHalf, MultiplierSpec::DParabolic, MultiplierSpec::Riesz(1), MultiplierSpec::Riesz(2)] {
            assert!(apply_multiplier(&f, m).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn time_eigenfunction() {
        let g = grid(8, 64);
        let tt = g.extent(1);
        let f = ScalarField::from_fn(g, Periodicity::Full, |_, t| (2.0 * PI * t / tt).cos());
        let out = apply_multiplier(&f, MultiplierSpec::DAlphaTime(0.5)).unwrap();
        let lam = (2.0 * PI / tt).sqrt();
        for (a, b) in out.values.iter().zip(&f.values) {
            assert!((a - lam * b).abs() < 1e-10);
        }
    }

    #[test]
    fn dn_kills_spatial_modes() {
        let g = grid(16, 16);
        let l = g.extent(0);
        let f = ScalarField::from_fn(g, Periodicity::Full, |x, _| (2.0 * PI * x[0] / l).cos());
        assert!(apply_multiplier(&f, MultiplierSpec::DnHalf).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn refuses_non_periodic() {
        let f = ScalarField::zeros(grid(8, 8), Periodicity::None);
        assert!(matches!(apply_multiplier(&f, MultiplierSpec::DParabolic), Err(Error::NotPeriodic)));
    }

    #[test]
    fn sum_norm_breaks_the_decomposition() {
        let g = grid(16, 16);
        let (lx, lt) = (g.extent(0), g.extent(1));
        let f = ScalarField::from_fn(g, Periodicity::Full, |x, t| (2.0 * PI * x[0] / lx).cos() * (2.0 * PI * t / lt).sin());
        assert!(riesz_decomposition_residual(&f).unwrap().value < 1e-12);
        assert!(riesz_decomposition_residual_with(&f, SymbolNorm::Sum).unwrap().value > 1e-2);
    }

    #[test]
    fn kernel_sign_is_negative() {
        let g = grid(4, 256);
        let tt = g.extent(1);
        let f = ScalarField::from_fn(g, Periodicity::Full, |_, t| (2.0 * PI * t / tt).cos());
        let p = pointwise_half_time_derivative(&f, 1.0, 3).unwrap();
        let dot: f64 = p.values.iter().zip(&f.values).map(|(a, b)| a * b).sum();
        assert!(dot < 0.0);
    }
}
