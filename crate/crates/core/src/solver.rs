//! Finite differences for `u_t = div(A∇u) + B·∇u + F` on the strip
//! `(0, H) × [0, L) × [t₀, t₀ + T)`: Dirichlet data `f` at `x₀ = 0` and `g`
//! at `x₀ = H`, periodic in `x`.
//!
//! Time stepping is the θ-scheme on cell-centred times `t_k`, starting from
//! data at `t₀ − dt/2`. The diagonal diffusion is in flux form. The mixed
//! term `2s₀₁u₀₁` uses the seven-point stencil matching the sign of `s₀₁`,
//! and the derivatives of `s₀₁` and of the antisymmetric part of `A` move to
//! the drift. Drift is a blend of centred and upwind differences with weight
//! `w = max(0, 1 − 2a/(|b|h))`, which keeps the off-diagonal entries
//! nonnegative whenever `s_ii ≥ |s₀₁|`. Boundary cells see the ghost value
//! `2f − u` across the face and `f` at the corner neighbours.

use serde::{Deserialize, Serialize};

use crate::grid::{GridSpec, Periodicity, ScalarField};
use crate::pullback::CoefficientField;
use crate::strip::{self, diff, lin, X, X0};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// `1` is implicit Euler, `1/2` Crank-Nicolson.
    pub theta: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { theta: 1.0, tolerance: 1e-10, max_iterations: 2000 }
    }
}

/// Data of one solve. `f` and `top` live on the boundary grid `(x, t)` of
/// the strip; `initial` is `u(·, ·, t₀ − dt/2)` over `(x₀, x)`.
#[derive(Clone, Debug)]
pub struct DirichletProblem<'a> {
    pub coeffs: &'a CoefficientField,
    pub f: &'a ScalarField,
    pub top: Option<&'a ScalarField>,
    pub source: Option<&'a ScalarField>,
    pub initial: Option<&'a [f64]>,
}

#[derive(Clone, Debug)]
pub struct SolutionField {
    pub u: ScalarField,
    pub trace: ScalarField,
    /// Final relative residual of each time step's linear solve.
    pub residuals: Vec<f64>,
    pub iterations: Vec<usize>,
}

/// Ellipticity and drift bounds of a coefficient field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientCertificate {
    pub lambda: f64,
    pub big_lambda: f64,
    /// `max x₀|B|`.
    pub drift_bound: f64,
    /// Cells whose symmetric-part eigenvalues leave `[λ, Λ]`, capped at 32.
    pub violations: Vec<[usize; 3]>,
    pub ok: bool,
}

pub fn validate_coefficients(c: &CoefficientField, lambda: f64, big_lambda: f64) -> CoefficientCertificate {
    let spec = c.spec();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut violations = Vec::new();
    let mut ok = true;
    for p in 0..spec.len() {
        let (a, _) = c.at(p);
        let (s00, s01, s11) = (a[0], 0.5 * (a[1] + a[2]), a[3]);
        let mid = 0.5 * (s00 + s11);
        let rad = (0.25 * (s00 - s11) * (s00 - s11) + s01 * s01).sqrt();
        let (e0, e1) = (mid - rad, mid + rad);
        lo = lo.min(e0);
        hi = hi.max(e1);
        if e0 < lambda || e1 > big_lambda {
            ok = false;
            if violations.len() < 32 {
                violations.push(spec.unravel(p));
            }
        }
    }
    CoefficientCertificate { lambda: lo, big_lambda: hi, drift_bound: c.drift_bound(), violations, ok }
}

const NB: [(i64, i64); 9] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (0, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];
const C: usize = 4;

fn slot(di: i64, dj: i64) -> usize {
    ((dj + 1) * 3 + di + 1) as usize
}

/// `L u = Σ c·u_nb + rhs` at one time level, boundary values folded in.
struct Stencil {
    c: Vec<[f64; 9]>,
    rhs: Vec<f64>,
}

struct Prepared<'a> {
    spec: &'a GridSpec,
    coeffs: &'a CoefficientField,
    /// Drift including derivatives of `s₀₁` and of the antisymmetric part.
    drift: [Vec<f64>; 2],
}

impl<'a> Prepared<'a> {
    fn new(coeffs: &'a CoefficientField) -> Self {
        let spec = coeffs.spec();
        let s = spec.shape();
        let n = spec.len();
        let s01: Vec<f64> = (0..n).map(|p| 0.5 * (coeffs.a[1].values[p] + coeffs.a[2].values[p])).collect();
        let k: Vec<f64> = (0..n).map(|p| 0.5 * (coeffs.a[1].values[p] - coeffs.a[2].values[p])).collect();
        let (s0, s1) = (diff(&s01, s, X0, spec.h, false), diff(&s01, s, X, spec.h, true));
        let (k0, k1) = (diff(&k, s, X0, spec.h, false), diff(&k, s, X, spec.h, true));
        let d0 = (0..n).map(|p| coeffs.b[0].values[p] + s1[p] - k1[p]).collect();
        let d1 = (0..n).map(|p| coeffs.b[1].values[p] + s0[p] + k0[p]).collect();
        Self { spec, coeffs, drift: [d0, d1] }
    }

    fn stencil(&self, k: usize, f: &ScalarField, top: Option<&ScalarField>) -> Stencil {
        let spec = self.spec;
        let s = spec.shape();
        let (nx0, nx) = (s[0], s[1]);
        let h = spec.h;
        let h2 = h * h;
        let a = &self.coeffs.a;
        let at = |field: &ScalarField, i: usize, j: usize| field.values[lin(s, i, j, k)];
        let mut c = vec![[0.0; 9]; nx0 * nx];
        let mut rhs = vec![0.0; nx0 * nx];
        for j in 0..nx {
            let (jm, jp) = ((j + nx - 1) % nx, (j + 1) % nx);
            for i in 0..nx0 {
                let p = lin(s, i, j, k);
                let row = &mut c[i + nx0 * j];
                let s00 = at(&a[0], i, j);
                let s11 = at(&a[3], i, j);
                let s01 = 0.5 * (at(&a[1], i, j) + at(&a[2], i, j));
                let f_up = if i + 1 < nx0 { 0.5 * (s00 + at(&a[0], i + 1, j)) } else { s00 };
                let f_dn = if i > 0 { 0.5 * (s00 + at(&a[0], i - 1, j)) } else { s00 };
                row[slot(1, 0)] += f_up / h2;
                row[slot(-1, 0)] += f_dn / h2;
                row[slot(0, 1)] += 0.5 * (s11 + at(&a[3], i, jp)) / h2;
                row[slot(0, -1)] += 0.5 * (s11 + at(&a[3], i, jm)) / h2;
                let q = s01.abs() / h2;
                for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    row[slot(di, dj)] -= q;
                }
                if s01 >= 0.0 {
                    row[slot(1, 1)] += q;
                    row[slot(-1, -1)] += q;
                } else {
                    row[slot(1, -1)] += q;
                    row[slot(-1, 1)] += q;
                }
                let aeff = [s00 - s01.abs(), s11 - s01.abs()];
                for axis in 0..2 {
                    let b = self.drift[axis][p];
                    if b == 0.0 {
                        continue;
                    }
                    let w = if aeff[axis] <= 0.0 { 1.0 } else { (1.0 - 2.0 * aeff[axis] / (b.abs() * h)).max(0.0) };
                    let (plus, minus) = if axis == 0 { (slot(1, 0), slot(-1, 0)) } else { (slot(0, 1), slot(0, -1)) };
                    row[plus] += (1.0 - w) * b / (2.0 * h);
                    row[minus] -= (1.0 - w) * b / (2.0 * h);
                    if b > 0.0 {
                        row[plus] += w * b / h;
                        row[C] -= w * b / h;
                    } else {
                        row[minus] -= w * b / h;
                        row[C] += w * b / h;
                    }
                }
                let off: f64 = (0..9).filter(|&n| n != C).map(|n| row[n]).sum();
                row[C] -= off;
                // fold in boundary values
                for (n, &(di, dj)) in NB.iter().enumerate() {
                    let ii = i as i64 + di;
                    if ii >= 0 && ii < nx0 as i64 {
                        continue;
                    }
                    let jj = (j as i64 + dj).rem_euclid(nx as i64) as usize;
                    let val = if ii < 0 { f.values[jj + nx * k] } else { top.map_or(0.0, |g| g.values[jj + nx * k]) };
                    let coef = row[n];
                    row[n] = 0.0;
                    if dj == 0 {
                        rhs[i + nx0 * j] += 2.0 * coef * val;
                        row[C] -= coef;
                    } else {
                        rhs[i + nx0 * j] += coef * val;
                    }
                }
            }
        }
        Stencil { c, rhs }
    }
}

fn apply(st: &Stencil, nx0: usize, nx: usize, u: &[f64], out: &mut [f64]) {
    for j in 0..nx {
        for i in 0..nx0 {
            let row = &st.c[i + nx0 * j];
            let mut acc = 0.0;
            for (n, &(di, dj)) in NB.iter().enumerate() {
                let cf = row[n];
                if cf == 0.0 {
                    continue;
                }
                let ii = (i as i64 + di) as usize;
                let jj = (j as i64 + dj).rem_euclid(nx as i64) as usize;
                acc += cf * u[ii + nx0 * jj];
            }
            out[i + nx0 * j] = acc;
        }
    }
}

/// Solve `(I − s·L) x = b` by Jacobi-preconditioned BiCGSTAB.
fn bicgstab(st: &Stencil, scale: f64, nx0: usize, nx: usize, b: &[f64], x: &mut [f64], cfg: &SolverConfig) -> Result<(f64, usize)> {
    let n = b.len();
    let diag: Vec<f64> = st.c.iter().map(|r| 1.0 - scale * r[C]).collect();
    let mut tmp = vec![0.0; n];
    let op = |v: &[f64], out: &mut [f64], tmp: &mut [f64]| {
        apply(st, nx0, nx, v, tmp);
        for q in 0..n {
            out[q] = v[q] - scale * tmp[q];
        }
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok((0.0, 0));
    }
    let mut r = vec![0.0; n];
    op(x, &mut r, &mut tmp);
    for q in 0..n {
        r[q] = b[q] - r[q];
    }
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut res = dot(&r, &r).sqrt() / bnorm;
    for it in 0..cfg.max_iterations {
        if res <= cfg.tolerance {
            return Ok((res, it));
        }
        let rho1 = dot(&r0, &r);
        if rho1 == 0.0 {
            break;
        }
        let beta = (rho1 / rho) * (alpha / omega);
        rho = rho1;
        for q in 0..n {
            p[q] = r[q] + beta * (p[q] - omega * v[q]);
            y[q] = p[q] / diag[q];
        }
        op(&y, &mut v, &mut tmp);
        alpha = rho / dot(&r0, &v);
        for q in 0..n {
            s[q] = r[q] - alpha * v[q];
        }
        if dot(&s, &s).sqrt() / bnorm <= cfg.tolerance {
            for q in 0..n {
                x[q] += alpha * y[q];
            }
            return Ok((dot(&s, &s).sqrt() / bnorm, it + 1));
        }
        for q in 0..n {
            z[q] = s[q] / diag[q];
        }
        op(&z, &mut t, &mut tmp);
        omega = dot(&t, &s) / dot(&t, &t);
        for q in 0..n {
            x[q] += alpha * y[q] + omega * z[q];
            r[q] = s[q] - omega * t[q];
        }
        res = dot(&r, &r).sqrt() / bnorm;
        if omega == 0.0 || !res.is_finite() {
            break;
        }
    }
    if res <= cfg.tolerance {
        return Ok((res, cfg.max_iterations));
    }
    Err(Error::Solver { residual: res, iterations: cfg.max_iterations })
}

fn check_boundary(strip: &GridSpec, g: &ScalarField) -> Result<()> {
    let b = strip::boundary_of(strip)?;
    if g.spec != b {
        return Err(Error::InvalidGrid("boundary data must live on the strip's (x, t) grid".into()));
    }
    Ok(())
}

/// March the θ-scheme over the strip.
pub fn solve(problem: &DirichletProblem, cfg: &SolverConfig) -> Result<SolutionField> {
    let spec = problem.coeffs.spec();
    strip::check(spec)?;
    if !(0.5..=1.0).contains(&cfg.theta) || !(cfg.tolerance > 0.0) {
        return Err(Error::Invalid("theta must lie in [1/2, 1] and the tolerance be positive".into()));
    }
    check_boundary(spec, problem.f)?;
    if let Some(g) = problem.top {
        check_boundary(spec, g)?;
    }
    if let Some(src) = problem.source {
        if &src.spec != spec {
            return Err(Error::InvalidGrid("source must live on the strip".into()));
        }
    }
    let s = spec.shape();
    let (nx0, nx, nt) = (s[0], s[1], s[2]);
    let plane = nx0 * nx;
    if let Some(init) = problem.initial {
        if init.len() != plane {
            return Err(Error::InvalidGrid("initial data must cover (x0, x)".into()));
        }
    }
    let (lo, _) = problem.coeffs.ellipticity();
    if !(lo > 0.0) {
        return Err(Error::Ellipticity(lo));
    }
    let prep = Prepared::new(problem.coeffs);
    let dt = spec.dt();
    let th = cfg.theta;
    let mut prev: Vec<f64> = problem.initial.map_or_else(|| vec![0.0; plane], |v| v.to_vec());
    let mut prev_stencil: Option<Stencil> = None;
    let mut out = Vec::with_capacity(spec.len());
    let mut residuals = Vec::with_capacity(nt);
    let mut iterations = Vec::with_capacity(nt);
    let src = |k: usize, q: usize| problem.source.map_or(0.0, |f| f.values[q + plane * k]);
    let mut lu = vec![0.0; plane];
    for k in 0..nt {
        let st = prep.stencil(k, problem.f, problem.top);
        let mut b: Vec<f64> = (0..plane).map(|q| prev[q] + dt * th * (st.rhs[q] + src(k, q))).collect();
        if th < 1.0 {
            match &prev_stencil {
                Some(ps) => {
                    apply(ps, nx0, nx, &prev, &mut lu);
                    for q in 0..plane {
                        b[q] += dt * (1.0 - th) * (lu[q] + ps.rhs[q] + src(k - 1, q));
                    }
                }
                None => {
                    // first step: the explicit part reuses the current operator
                    apply(&st, nx0, nx, &prev, &mut lu);
                    for q in 0..plane {
                        b[q] += dt * (1.0 - th) * (lu[q] + st.rhs[q] + src(k, q));
                    }
                }
            }
        }
        let mut x = prev.clone();
        let (res, its) = bicgstab(&st, dt * th, nx0, nx, &b, &mut x, cfg)?;
        residuals.push(res);
        iterations.push(its);
        out.extend_from_slice(&x);
        prev = x;
        if th < 1.0 {
            prev_stencil = Some(st);
        }
    }
    Ok(SolutionField {
        u: ScalarField::new(spec.clone(), out, Periodicity::None)?,
        trace: problem.f.clone(),
        residuals,
        iterations,
    })
}

/// Zero initial data, zero top data, no source.
pub fn solve_dirichlet(coeffs: &CoefficientField, f: &ScalarField, cfg: &SolverConfig) -> Result<SolutionField> {
    solve(&DirichletProblem { coeffs, f, top: None, source: None, initial: None }, cfg)
}

/// A parabolic cube `{|x₀ − c₀| < r, |x − c| < r, |t − τ| < r²}` in the strip.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripCube {
    pub center: [f64; 3],
    pub r: f64,
}

/// `max(LHS/MID, MID/RHS)` for the chain
/// `rⁿ(sup_{Q_{r/2}} u)² ≲ sup_t ∫_{Q_r(t)} u² + ∫_{Q_r}|∇u|² ≲ r⁻²∫_{Q_{2r}} u²`.
/// Requires `4Q` inside the strip in `x₀` and `Q_{2r}` inside the time window.
pub fn cacciopoli_ratio(u: &ScalarField, q: &StripCube) -> Result<f64> {
    strip::check(&u.spec)?;
    let spec = &u.spec;
    let s = spec.shape();
    let height = s[0] as f64 * spec.h;
    let [c0, cx, ct] = q.center;
    let r = q.r;
    let (t_lo, t_hi) = (spec.origin.t, spec.origin.t + spec.extent(2));
    if c0 - 4.0 * r < 0.0 || c0 + 4.0 * r > height || ct - 4.0 * r * r < t_lo || ct + 4.0 * r * r > t_hi {
        return Err(Error::OutOfDomain("cube too close to the strip boundary".into()));
    }
    let width = spec.extent(1);
    let [g0, g1, _] = strip::gradient(&u.values, spec);
    let vol = spec.cell_volume();
    let area = spec.h * spec.h;
    let inside = |p: usize, rr: f64| {
        let idx = spec.unravel(p);
        let dx = (spec.coord(1, idx[1]) - cx + width / 2.0).rem_euclid(width) - width / 2.0;
        (spec.coord(0, idx[0]) - c0).abs() < rr && dx.abs() < rr && (spec.coord(2, idx[2]) - ct).abs() < rr * rr
    };
    let (mut sup_half, mut grad, mut rhs) = (0.0f64, 0.0, 0.0);
    let mut slices = vec![0.0; s[2]];
    for p in 0..spec.len() {
        let v = u.values[p];
        if inside(p, 2.0 * r) {
            rhs += v * v * vol;
        }
        if inside(p, r) {
            grad += (g0[p] * g0[p] + g1[p] * g1[p]) * vol;
            slices[spec.unravel(p)[2]] += v * v * area;
        }
        if inside(p, r / 2.0) {
            sup_half = sup_half.max(v.abs());
        }
    }
    let lhs = r * r * sup_half * sup_half;
    let mid = slices.iter().copied().fold(0.0, f64::max) + grad;
    let rhs = rhs / (r * r);
    let ratio = |a: f64, b: f64| if a == 0.0 { 0.0 } else if b == 0.0 { f64::INFINITY } else { a / b };
    Ok(ratio(lhs, mid).max(ratio(mid, rhs)))
}

/// Manufactured-solution cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ManufacturedCase {
    /// `u ≡ 0`.
    Zero,
    /// `u = e^{−2π²t} sin(πx₀) sin(πx)` for the heat equation.
    Heat,
    /// The same `u` with `A = (1 + sin(πx)x₀/4) I` and a matching source.
    Variable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorTable {
    pub h: Vec<f64>,
    pub linf: Vec<f64>,
    pub l2: Vec<f64>,
    /// `log2(e_k / e_{k+1})` between consecutive levels (L∞).
    pub order: Vec<f64>,
}

/// Errors on the strip `(0,1) × [0,2) × [0, duration)` at each step size.
pub fn manufactured_error(case: ManufacturedCase, levels: &[f64], duration: f64, cfg: &SolverConfig) -> Result<ErrorTable> {
    use std::f64::consts::PI;
    let exact = |x0: f64, x: f64, t: f64| match case {
        ManufacturedCase::Zero => 0.0,
        _ => (-2.0 * PI * PI * t).exp() * (PI * x0).sin() * (PI * x).sin(),
    };
    let mut table = ErrorTable { h: Vec::new(), linf: Vec::new(), l2: Vec::new(), order: Vec::new() };
    for &h in levels {
        let nt = (duration / (h * h)).round().max(1.0) as usize;
        let spec = crate::functionals::strip_grid(h, 1.0, 2.0, nt as f64 * h * h)?;
        let coeffs = match case {
            ManufacturedCase::Variable => CoefficientField::from_fn(&spec, |x0, x, _| {
                let a = 1.0 + 0.25 * (PI * x).sin() * x0;
                ([a, 0.0, 0.0, a], [0.0, 0.0])
            })?,
            _ => CoefficientField::identity(&spec)?,
        };
        let source = match case {
            ManufacturedCase::Variable => Some(ScalarField::from_fn(spec.clone(), Periodicity::None, |x, t| {
                let (x0, x1) = (x[0], x[1]);
                let u = exact(x0, x1, t);
                let a = 1.0 + 0.25 * (PI * x1).sin() * x0;
                let (ax0, ax1) = (0.25 * (PI * x1).sin(), 0.25 * PI * (PI * x1).cos() * x0);
                let e = (-2.0 * PI * PI * t).exp();
                let (u0, u1) = (e * PI * (PI * x0).cos() * (PI * x1).sin(), e * PI * (PI * x0).sin() * (PI * x1).cos());
                -2.0 * PI * PI * u + 2.0 * PI * PI * a * u - (ax0 * u0 + ax1 * u1)
            })),
            _ => None,
        };
        let bspec = strip::boundary_of(&spec)?;
        let f = ScalarField::from_fn(bspec.clone(), Periodicity::None, |x, t| exact(0.0, x[0], t));
        let top = ScalarField::from_fn(bspec, Periodicity::None, |x, t| exact(1.0, x[0], t));
        let t_init = spec.origin.t - 0.5 * spec.dt();
        let init: Vec<f64> = (0..spec.counts[1])
            .flat_map(|j| (0..spec.counts[0]).map(move |i| (i, j)))
            .map(|(i, j)| exact(spec.coord(0, i), spec.coord(1, j), t_init))
            .collect();
        let sol = solve(
            &DirichletProblem { coeffs: &coeffs, f: &f, top: Some(&top), source: source.as_ref(), initial: Some(&init) },
            cfg,
        )?;
        let (mut linf, mut l2) = (0.0f64, 0.0);
        for p in 0..spec.len() {
            let idx = spec.unravel(p);
            let e = sol.u.values[p] - exact(spec.coord(0, idx[0]), spec.coord(1, idx[1]), spec.coord(2, idx[2]));
            linf = linf.max(e.abs());
            l2 += e * e * spec.cell_volume();
        }
        table.h.push(h);
        table.linf.push(linf);
        table.l2.push(l2.sqrt());
    }
    for w in table.linf.windows(2) {
        table.order.push(if w[1] == 0.0 { f64::INFINITY } else { (w[0] / w[1]).log2() });
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::strip_grid;

    #[test]
    fn zero_data_gives_zero() {
        let spec = strip_grid(1.0 / 8.0, 0.5, 1.0, 0.25).unwrap();
        let c = CoefficientField::identity(&spec).unwrap();
        let f = ScalarField::zeros(strip::boundary_of(&spec).unwrap(), Periodicity::None);
        let sol = solve_dirichlet(&c, &f, &SolverConfig::default()).unwrap();
        assert!(sol.u.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn identity_and_anisotropic_bounds() {
        let spec = strip_grid(1.0 / 8.0, 0.5, 1.0, 0.0625).unwrap();
        let c = CoefficientField::identity(&spec).unwrap();
        let cert = validate_coefficients(&c, 1.0, 1.0);
        assert!(cert.ok && cert.lambda == 1.0 && cert.big_lambda == 1.0);
        let c = CoefficientField::constant(&spec, [2.0, 0.0, 0.0, 0.5], [0.0, 0.0]).unwrap();
        let cert = validate_coefficients(&c, 0.5, 2.0);
        assert!(cert.ok && cert.lambda == 0.5 && cert.big_lambda == 2.0);
    }

    #[test]
    fn constant_data_is_reproduced() {
        let spec = strip_grid(1.0 / 8.0, 0.5, 1.0, 0.25).unwrap();
        let c = CoefficientField::from_fn(&spec, |x0, x, _| ([1.5, 0.3 * x0, 0.1, 1.0 + 0.2 * x], [0.5 / (x0 + 0.1), -0.2])).unwrap();
        let b = strip::boundary_of(&spec).unwrap();
        let one = ScalarField::from_fn(b, Periodicity::None, |_, _| 1.0);
        let init = vec![1.0; spec.counts[0] * spec.counts[1]];
        let sol = solve(&DirichletProblem { coeffs: &c, f: &one, top: Some(&one), source: None, initial: Some(&init) }, &SolverConfig::default()).unwrap();
        assert!(sol.u.values.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }
}
