//! Cone functionals on the strip `(x₀, x, t)`: non-tangential maximal
//! function, `p`-adapted square and area functions, Carleson norms, Whitney
//! covers of cones and boundary `L^p` norms.
//!
//! Cones sit at boundary points `(0, x, t)`:
//! `Γ_a(x,t) = {(y₀,y,s) : |y − x| + |s − t|^{1/2} < a·y₀}`, decided on cell
//! centres. The lateral axis is periodic, so a cone wider than the period
//! meets periodic copies of a cell once per copy.

use serde::{Deserialize, Serialize};

use crate::grid::{GridSpec, ParabolicPoint, Periodicity, ScalarField};
use crate::pullback::CoefficientField;
use crate::strip::{self, lin, sliding_max, X0};
use crate::{Error, Result};

/// Spatial dimension `n` of the strip `(x₀, x)`.
const N: i32 = 2;

/// Aperture `a` and optional truncation height.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub aperture: f64,
    pub height: Option<f64>,
}

impl ConeSpec {
    pub fn new(aperture: f64, height: Option<f64>) -> Result<Self> {
        if !(aperture > 0.0) || height.is_some_and(|r| !(r > 0.0)) {
            return Err(Error::Invalid("cone needs a > 0 and a positive truncation".into()));
        }
        Ok(Self { aperture, height })
    }

    pub fn widened(&self, factor: f64) -> Self {
        Self { aperture: self.aperture * factor, height: self.height }
    }
}

/// Lateral offsets and time half-windows of the cone slice at level `i`.
fn slice(spec: &GridSpec, cone: &ConeSpec, i: usize) -> Vec<(i64, usize)> {
    let y0 = spec.coord(X0, i);
    if cone.height.is_some_and(|r| y0 >= r) {
        return Vec::new();
    }
    let reach = cone.aperture * y0;
    let (h, dt) = (spec.h, spec.dt());
    let mut out = Vec::new();
    let jmax = (reach / h).ceil() as i64;
    for dj in -jmax..=jmax {
        let rem = reach - (dj.unsigned_abs() as f64) * h;
        if rem <= 0.0 {
            continue;
        }
        let lim = rem * rem;
        let mut w = (lim / dt).ceil() as usize;
        while w > 0 && w as f64 * dt >= lim {
            w -= 1;
        }
        while ((w + 1) as f64) * dt < lim {
            w += 1;
        }
        out.push((dj, w));
    }
    out
}

fn boundary_field(spec: &GridSpec, values: Vec<f64>) -> Result<ScalarField> {
    ScalarField::new(strip::boundary_of(spec)?, values, Periodicity::None)
}

/// `Σ_{cells in Γ(x,t)} v · |cell|` for every boundary point.
fn cone_sum(v: &[f64], spec: &GridSpec, cone: &ConeSpec) -> Vec<f64> {
    let s = spec.shape();
    let (nx0, nx, nt) = (s[0], s[1], s[2]);
    // Accumulated `x`-major so the inner loop runs over contiguous time.
    let mut acc = vec![0.0; nx * nt];
    let mut windows: Vec<(usize, Vec<f64>)> = Vec::new();
    for i in 0..nx0 {
        let sl = slice(spec, cone, i);
        if sl.is_empty() {
            continue;
        }
        let prefixes: Vec<Vec<f64>> = (0..nx).map(|j| strip::prefix((0..nt).map(|k| v[lin(s, i, j, k)]))).collect();
        windows.clear();
        for &(_, w) in &sl {
            if windows.iter().all(|c| c.0 != w) {
                let mut sums = vec![0.0; nx * nt];
                for (j, col) in prefixes.iter().enumerate() {
                    for (k, o) in sums[j * nt..(j + 1) * nt].iter_mut().enumerate() {
                        *o = strip::sliding_sum(col, k, w);
                    }
                }
                windows.push((w, sums));
            }
        }
        for &(dj, w) in &sl {
            let sums = &windows.iter().find(|c| c.0 == w).unwrap().1;
            for j in 0..nx {
                let src = (j as i64 + dj).rem_euclid(nx as i64) as usize;
                let (dst, col) = (&mut acc[j * nt..(j + 1) * nt], &sums[src * nt..(src + 1) * nt]);
                for (o, c) in dst.iter_mut().zip(col) {
                    *o += c;
                }
            }
        }
    }
    let vol = spec.cell_volume();
    let mut out = vec![0.0; nx * nt];
    for j in 0..nx {
        for k in 0..nt {
            out[k * nx + j] = acc[j * nt + k] * vol;
        }
    }
    out
}

/// `N_a(u)(x,t) = sup_{Γ_a(x,t)} |u|` on the boundary grid `(x, t)`.
pub fn nontangential_max(u: &ScalarField, cone: &ConeSpec) -> Result<ScalarField> {
    strip::check(&u.spec)?;
    let spec = &u.spec;
    let s = spec.shape();
    let (nx0, nx, nt) = (s[0], s[1], s[2]);
    let mut out = vec![0.0f64; nx * nt];
    for i in 0..nx0 {
        let sl = slice(spec, cone, i);
        let mut cache: Vec<(usize, Vec<Vec<f64>>)> = Vec::new();
        for &(dj, w) in &sl {
            if !cache.iter().any(|c| c.0 == w) {
                let cols = (0..nx)
                    .map(|j| {
                        let line: Vec<f64> = (0..nt).map(|k| u.values[lin(s, i, j, k)].abs()).collect();
                        sliding_max(&line, w, false)
                    })
                    .collect();
                cache.push((w, cols));
            }
            let cols = &cache.iter().find(|c| c.0 == w).unwrap().1;
            for j in 0..nx {
                let col = &cols[(j as i64 + dj).rem_euclid(nx as i64) as usize];
                for k in 0..nt {
                    let o = &mut out[k * nx + j];
                    *o = o.max(col[k]);
                }
            }
        }
    }
    boundary_field(spec, out)
}

/// `|u|^{p−2}` with the convention that `|∇u|²|u|^{p−2}` vanishes with `∇u`;
/// for `p < 2` the base is `max(|u|, ε)`.
fn weight(u: f64, p: f64, eps: f64) -> f64 {
    if p == 2.0 {
        1.0
    } else if p < 2.0 {
        u.abs().max(eps).powf(p - 2.0)
    } else {
        u.abs().powf(p - 2.0)
    }
}

/// Default regularisation of `|u|` for `p < 2`.
pub const DEFAULT_EPS: f64 = 1e-8;

fn cone_power(u: &ScalarField, cone: &ConeSpec, p: f64, density: Vec<f64>) -> Result<ScalarField> {
    let sums = cone_sum(&density, &u.spec, cone);
    boundary_field(&u.spec, sums.into_iter().map(|v| v.max(0.0).powf(1.0 / p)).collect())
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Invalid(format!("p must lie in (1, inf), got {p}")));
    }
    Ok(())
}

/// Integrand `|∇u|²|u|^{p−2}x₀^{−n}` of `S_p`.
pub fn square_density(u: &ScalarField, p: f64, eps: f64) -> Result<Vec<f64>> {
    strip::check(&u.spec)?;
    let spec = &u.spec;
    let [g0, g1, _] = strip::gradient(&u.values, spec);
    Ok((0..spec.len())
        .map(|q| {
            let g2 = g0[q] * g0[q] + g1[q] * g1[q];
            if g2 == 0.0 {
                return 0.0;
            }
            let x0 = spec.coord(X0, q % spec.counts[0]);
            g2 * weight(u.values[q], p, eps) * x0.powi(-N)
        })
        .collect())
}

/// Integrand `|u_t|²|u|^{p−2}x₀^{2−n}` of `A_p`.
pub fn area_density(u: &ScalarField, p: f64, eps: f64) -> Result<Vec<f64>> {
    strip::check(&u.spec)?;
    let spec = &u.spec;
    let [_, _, gt] = strip::gradient(&u.values, spec);
    Ok((0..spec.len())
        .map(|q| {
            let g2 = gt[q] * gt[q];
            if g2 == 0.0 {
                return 0.0;
            }
            let x0 = spec.coord(X0, q % spec.counts[0]);
            g2 * weight(u.values[q], p, eps) * x0.powi(2 - N)
        })
        .collect())
}

/// `S_{p,a}(u) = (∫_Γ |∇u|²|u|^{p−2} x₀^{−n})^{1/p}`.
pub fn p_square_function(u: &ScalarField, cone: &ConeSpec, p: f64) -> Result<ScalarField> {
    p_square_function_eps(u, cone, p, DEFAULT_EPS)
}

pub fn p_square_function_eps(u: &ScalarField, cone: &ConeSpec, p: f64, eps: f64) -> Result<ScalarField> {
    check_p(p)?;
    cone_power(u, cone, p, square_density(u, p, eps)?)
}

/// `A_{p,a}(u) = (∫_Γ |u_t|²|u|^{p−2} x₀^{2−n})^{1/p}`.
pub fn p_area_function(u: &ScalarField, cone: &ConeSpec, p: f64) -> Result<ScalarField> {
    p_area_function_eps(u, cone, p, DEFAULT_EPS)
}

pub fn p_area_function_eps(u: &ScalarField, cone: &ConeSpec, p: f64, eps: f64) -> Result<ScalarField> {
    check_p(p)?;
    cone_power(u, cone, p, area_density(u, p, eps)?)
}

/// Measure of the set of boundary points whose cone contains a point at
/// height `y₀`: `∫_{|z|<ay₀} 2(ay₀ − |z|)² dz = 4a³y₀³/3`.
pub fn cone_shadow_factor(aperture: f64) -> f64 {
    4.0 * aperture.powi(3) / 3.0
}

/// Box `(0, r) × Q_r(x, t)` reported by [`CarlesonReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlesonBox {
    pub r: f64,
    pub x: f64,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlesonReport {
    pub norm: f64,
    pub argmax: Option<CarlesonBox>,
    /// `(r, sup μ(T(Q_r))/r^{n+1})` per radius.
    pub profile: Vec<(f64, f64)>,
}

/// `sup_{r ≤ d} μ(T(Q_r)) / r^{n+1}` over boxes `(0,r) × Q_r` that fit the
/// strip, with `r` running over multiples of `h`.
pub fn carleson_norm_measure(density: &ScalarField, d: f64) -> Result<CarlesonReport> {
    strip::check(&density.spec)?;
    if density.values.iter().any(|v| *v < 0.0) {
        return Err(Error::Invalid("density must be nonnegative".into()));
    }
    let spec = &density.spec;
    let s = spec.shape();
    let (nx0, nx, nt) = (s[0], s[1], s[2]);
    let h = spec.h;
    let vol = spec.cell_volume();
    let mmax = ((d / h) + 1e-9).floor() as usize;
    let mut col = vec![0.0; nx * nt];
    let mut best = 0.0f64;
    let mut argmax = None;
    let mut profile = Vec::new();
    for m in 1..=mmax.min(nx0) {
        for k in 0..nt {
            for j in 0..nx {
                col[k * nx + j] += density.values[lin(s, m - 1, j, k)];
            }
        }
        let (lx, lt) = (2 * m, 2 * m * m);
        if lt > nt {
            break;
        }
        // lateral window sums, periodic
        let mut lat = vec![0.0; nx * nt];
        for k in 0..nt {
            let ext = strip::prefix((0..nx + lx).map(|q| col[k * nx + q % nx]));
            for j in 0..nx {
                lat[k * nx + j] = ext[j + lx] - ext[j];
            }
        }
        let r = m as f64 * h;
        let scale = vol / r.powi(N + 1);
        let mut level_best = 0.0f64;
        for j in 0..nx {
            let pre = strip::prefix((0..nt).map(|k| lat[k * nx + j]));
            for k in 0..=nt - lt {
                let v = (pre[k + lt] - pre[k]) * scale;
                if v > level_best {
                    level_best = v;
                }
                if v > best {
                    best = v;
                    argmax = Some(CarlesonBox {
                        r,
                        x: spec.origin.x[1] + (j + m) as f64 * h,
                        t: spec.origin.t + (k + m * m) as f64 * spec.dt(),
                    });
                }
            }
        }
        profile.push((r, level_best));
    }
    if profile.is_empty() {
        return Err(Error::Degenerate("no Carleson box fits the strip".into()));
    }
    Ok(CarlesonReport { norm: best, argmax, profile })
}

/// `∫_U |u|^p dμ / (‖μ‖_{C,d} ‖N_a(u)‖_p^p)`; `None` when the denominator
/// vanishes.
pub fn carleson_vs_ntmax_check(density: &ScalarField, u: &ScalarField, cone: &ConeSpec, p: f64, d: f64) -> Result<Option<f64>> {
    if density.spec != u.spec {
        return Err(Error::InvalidGrid("density and u must share the strip".into()));
    }
    let spec = &u.spec;
    let lhs: f64 = u.values.iter().zip(&density.values).map(|(a, m)| a.abs().powf(p) * m).sum::<f64>() * spec.cell_volume();
    let c = carleson_norm_measure(density, d)?.norm;
    let n = nontangential_max(u, cone)?;
    let np = boundary_lp_norm(&n, p, None)?.powf(p);
    if c == 0.0 || np == 0.0 {
        return Ok(if lhs == 0.0 && np > 0.0 { Some(0.0) } else { None });
    }
    Ok(Some(lhs / (c * np)))
}

/// `(Σ |g|^p σ_cell)^{1/p}`; with a graph `φ` on the same grid the surface
/// element is `√(1 + |∇φ|²) dx dt`.
pub fn boundary_lp_norm(g: &ScalarField, p: f64, graph: Option<&ScalarField>) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Invalid(format!("p must lie in [1, inf), got {p}")));
    }
    let cell = g.spec.cell_volume();
    let sigma: Vec<f64> = match graph {
        None => vec![1.0; g.values.len()],
        Some(phi) => {
            if phi.spec != g.spec {
                return Err(Error::InvalidGrid("graph and boundary field differ in grid".into()));
            }
            let grads = phi.gradient();
            (0..g.values.len()).map(|q| (1.0 + grads.iter().map(|d| d.values[q] * d.values[q]).sum::<f64>()).sqrt()).collect()
        }
    };
    let total: f64 = g.values.iter().zip(&sigma).map(|(v, s)| v.abs().powf(p) * s).sum::<f64>() * cell;
    Ok(total.powf(1.0 / p))
}

/// Parabolic cube `[c₀ ± r] × [c ± r] × [τ ± r²]` of a Whitney cover.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhitneyCube {
    pub center: [f64; 3],
    pub r: f64,
}

/// Layer factor `K`: cubes of radius `r` fill heights `[Kr, 2Kr)`. The
/// smallest power of two with `Ka > 2 + √2 + 4a`, and at least 4.
pub fn whitney_factor(aperture: f64) -> usize {
    let need = 2.0 + std::f64::consts::SQRT_2 + 4.0 * aperture;
    let mut k = 4usize;
    while k as f64 * aperture <= need {
        k *= 2;
    }
    k
}

fn cube_meets_cone(c: &WhitneyCube, apex: (f64, f64), a: f64) -> bool {
    let dx = ((c.center[1] - apex.0).abs() - c.r).max(0.0);
    let dt = ((c.center[2] - apex.1).abs() - c.r * c.r).max(0.0);
    dx + dt.sqrt() < a * (c.center[0] + c.r)
}

fn cube_inside_cone(c: &WhitneyCube, apex: (f64, f64), a: f64) -> bool {
    let dx = (c.center[1] - apex.0).abs() + c.r;
    let dt = (c.center[2] - apex.1).abs() + c.r * c.r;
    dx + dt.sqrt() < a * (c.center[0] - c.r)
}

/// Dyadic Whitney cubes (radii `2^{−k}`, `r ≥ r_min`) meeting the cone
/// `Γ_a(apex)` below `height`.
pub fn whitney_cover(apex: (f64, f64), aperture: f64, height: f64, r_min: f64) -> Vec<WhitneyCube> {
    let k = whitney_factor(aperture);
    let mut out = Vec::new();
    for r in whitney_radii(aperture, height, r_min) {
        let reach = aperture * 2.0 * k as f64 * r + 2.0 * r;
        let qx = ((apex.0 - reach) / (2.0 * r)).floor() as i64..=((apex.0 + reach) / (2.0 * r)).ceil() as i64;
        let tr = reach * reach + 2.0 * r * r;
        let qt = ((apex.1 - tr) / (2.0 * r * r)).floor() as i64..=((apex.1 + tr) / (2.0 * r * r)).ceil() as i64;
        for q0 in 0..k / 2 {
            let c0 = k as f64 * r + (2 * q0 + 1) as f64 * r;
            for qxx in qx.clone() {
                for qtt in qt.clone() {
                    let c = WhitneyCube { center: [c0, (2 * qxx + 1) as f64 * r, (2 * qtt + 1) as f64 * r * r], r };
                    if cube_meets_cone(&c, apex, aperture) {
                        out.push(c);
                    }
                }
            }
        }
    }
    out
}

/// Dyadic radii used by [`whitney_cover`], largest first.
fn whitney_radii(aperture: f64, height: f64, r_min: f64) -> Vec<f64> {
    let k = whitney_factor(aperture) as f64;
    let mut r = 1.0f64;
    while k * r >= height {
        r /= 2.0;
    }
    let mut out = Vec::new();
    while r >= r_min {
        out.push(r);
        r /= 2.0;
    }
    out
}

/// Properties of a Whitney cover checked on a lattice of sample points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhitneyCheck {
    pub cubes: usize,
    /// Every sampled point of `Γ_a` at heights `[K r_min, height)` is covered.
    pub covers_cone: bool,
    /// Every cube lies in `Γ_{2a}`.
    pub inside_double_cone: bool,
    /// `4Q` stays above `x₀ = 0` for every cube.
    pub four_q_inside: bool,
    /// Largest number of doubled cubes `2Q` sharing a sampled point.
    pub max_overlap: usize,
}

fn in_cube(c: &WhitneyCube, p: [f64; 3], scale: f64) -> bool {
    let r = c.r * scale;
    (p[0] - c.center[0]).abs() <= r && (p[1] - c.center[1]).abs() <= r && (p[2] - c.center[2]).abs() <= r * r
}

pub fn check_whitney(apex: (f64, f64), aperture: f64, height: f64, r_min: f64, cubes: &[WhitneyCube]) -> WhitneyCheck {
    let k = whitney_factor(aperture) as f64;
    let z_lo = k * whitney_radii(aperture, height, r_min).last().copied().unwrap_or(height);
    let mut covers = true;
    let steps = 12;
    let mut samples: Vec<[f64; 3]> = Vec::new();
    for a in 0..steps {
        let z = z_lo + (height - z_lo) * (a as f64 + 0.5) / steps as f64;
        let w = aperture * z;
        for b in 0..steps {
            let dx = w * (2.0 * (b as f64 + 0.5) / steps as f64 - 1.0);
            let rem = w - dx.abs();
            for c in 0..steps {
                let ds = rem * rem * (2.0 * (c as f64 + 0.5) / steps as f64 - 1.0) * 0.999;
                let p = [z, apex.0 + dx, apex.1 + ds];
                if !cubes.iter().any(|q| in_cube(q, p, 1.0)) {
                    covers = false;
                }
                samples.push(p);
            }
        }
    }
    let max_overlap = samples.iter().map(|p| cubes.iter().filter(|q| in_cube(q, *p, 2.0)).count()).max().unwrap_or(0);
    WhitneyCheck {
        cubes: cubes.len(),
        covers_cone: covers,
        inside_double_cone: cubes.iter().all(|c| cube_inside_cone(c, apex, 2.0 * aperture)),
        four_q_inside: cubes.iter().all(|c| c.center[0] - 4.0 * c.r >= 0.0),
        max_overlap,
    }
}

/// Density `x₀|∇A|² + x₀³|∂_tA|² + x₀|B|²`.
pub fn t1_density_gradient(c: &CoefficientField) -> Result<ScalarField> {
    let spec = c.spec().clone();
    let mut out = vec![0.0; spec.len()];
    for a in &c.a {
        let [d0, d1, dt] = strip::gradient(&a.values, &spec);
        for q in 0..out.len() {
            let x0 = spec.coord(X0, q % spec.counts[0]);
            out[q] += x0 * (d0[q] * d0[q] + d1[q] * d1[q]) + x0.powi(3) * dt[q] * dt[q];
        }
    }
    for q in 0..out.len() {
        let x0 = spec.coord(X0, q % spec.counts[0]);
        out[q] += x0 * (c.b[0].values[q].powi(2) + c.b[1].values[q].powi(2));
    }
    ScalarField::new(spec, out, Periodicity::None)
}

/// Box maximum of `v` over `|Δx₀|, |Δx| ≤ x₀/2`, `|Δt| ≤ x₀²/4` at every
/// cell; the box contains the parabolic ball `B_{x₀/2}`.
fn local_max(v: &[f64], spec: &GridSpec) -> Vec<f64> {
    let s = spec.shape();
    let (nx0, nx, nt) = (s[0], s[1], s[2]);
    let mut out = vec![0.0; v.len()];
    for i in 0..nx0 {
        let x0 = spec.coord(X0, i);
        let w0 = ((x0 / 2.0) / spec.h + 1e-9).floor() as usize;
        let wt = ((x0 * x0 / 4.0) / spec.dt() + 1e-9).floor() as usize;
        let lo = i.saturating_sub(w0);
        let hi = (i + w0).min(nx0 - 1);
        let mut plane = vec![f64::NEG_INFINITY; nx * nt];
        for ii in lo..=hi {
            for k in 0..nt {
                for j in 0..nx {
                    let p = &mut plane[k * nx + j];
                    *p = p.max(v[lin(s, ii, j, k)]);
                }
            }
        }
        for k in 0..nt {
            let row = sliding_max(&plane[k * nx..(k + 1) * nx], w0, true);
            plane[k * nx..(k + 1) * nx].copy_from_slice(&row);
        }
        for j in 0..nx {
            let col: Vec<f64> = (0..nt).map(|k| plane[k * nx + j]).collect();
            for (k, m) in sliding_max(&col, wt, false).into_iter().enumerate() {
                out[lin(s, i, j, k)] = m;
            }
        }
    }
    out
}

/// Density `x₀^{−1} sup_{ij}(osc_{B_{x₀/2}} a_ij)² + x₀ sup_{B_{x₀/2}} |B|²`.
pub fn t1_density_oscillation(c: &CoefficientField) -> Result<ScalarField> {
    let spec = c.spec().clone();
    let mut osc = vec![0.0f64; spec.len()];
    for a in &c.a {
        let hi = local_max(&a.values, &spec);
        let neg: Vec<f64> = a.values.iter().map(|v| -v).collect();
        let lo = local_max(&neg, &spec);
        for q in 0..osc.len() {
            osc[q] = osc[q].max(hi[q] + lo[q]);
        }
    }
    let b2: Vec<f64> = (0..spec.len()).map(|q| c.b[0].values[q].powi(2) + c.b[1].values[q].powi(2)).collect();
    let bmax = local_max(&b2, &spec);
    let out = (0..spec.len())
        .map(|q| {
            let x0 = spec.coord(X0, q % spec.counts[0]);
            osc[q] * osc[q] / x0 + x0 * bmax[q]
        })
        .collect();
    ScalarField::new(spec, out, Periodicity::None)
}

/// Strip over `(0, H) × [0, L) × [0, T)` with step `h`.
pub fn strip_grid(h: f64, height: f64, width: f64, duration: f64) -> Result<GridSpec> {
    let count = |len: f64, step: f64| -> Result<usize> {
        let q = len / step;
        if (q - q.round()).abs() > 1e-6 || q.round() < 1.0 {
            return Err(Error::InvalidGrid(format!("{len} is not a multiple of {step}")));
        }
        Ok(q.round() as usize)
    };
    GridSpec::new(
        2,
        h,
        ParabolicPoint::new(vec![0.0, 0.0], 0.0),
        vec![count(height, h)?, count(width, h)?, count(duration, h * h)?],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(spec: &GridSpec, f: impl Fn(f64, f64, f64) -> f64) -> ScalarField {
        ScalarField::from_fn(spec.clone(), Periodicity::None, |x, t| f(x[0], x[1], t))
    }

    #[test]
    fn carleson_of_height_density() {
        let spec = strip_grid(1.0 / 16.0, 0.5, 1.0, 0.5).unwrap();
        let rep = carleson_norm_measure(&field(&spec, |x0, _, _| x0), 0.5).unwrap();
        for (r, v) in &rep.profile {
            assert!((v - 2.0 * r * r).abs() < 1e-12 * (1.0 + v));
        }
        assert!((rep.norm - 2.0 * 0.25).abs() < 1e-12);
    }

    #[test]
    fn maximal_function_of_height() {
        let spec = strip_grid(1.0 / 16.0, 0.5, 1.0, 0.125).unwrap();
        let u = field(&spec, |x0, _, _| x0);
        let n = nontangential_max(&u, &ConeSpec::new(1.0, Some(0.25)).unwrap()).unwrap();
        let top = 0.25 - 0.5 / 16.0;
        assert!(n.values.iter().all(|v| (v - top).abs() < 1e-15));
    }

    #[test]
    fn whitney_layers() {
        for a in [0.5, 1.0, 2.0] {
            let cubes = whitney_cover((0.3, 0.1), a, 1.0, 1.0 / 32.0);
            let chk = check_whitney((0.3, 0.1), a, 1.0, 1.0 / 32.0, &cubes);
            assert!(chk.covers_cone && chk.max_overlap > 0, "{a}: {chk:?}");
            assert!(chk.inside_double_cone && chk.four_q_inside, "{a}: {chk:?}");
        }
    }
}
