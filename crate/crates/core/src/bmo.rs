//! Parabolic BMO norms and the dyadic inequalities around them.
//!
//! Suprema over cubes are maxima over the sliding family (dyadic cubes plus
//! half-side translates); they are lower bounds of the continuum supremum.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boxsum::PrefixSum;
use crate::grid::{index_cubes, CubeMode, GridSpec, IndexCube, ParabolicCube, Region, ScalarField};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BmoReport {
    pub norm: f64,
    pub argmax_cube: ParabolicCube,
    /// `(r, max mean oscillation at radius r)`, largest radius first.
    pub scale_profile: Vec<(f64, f64)>,
}

fn region_radius(spec: &GridSpec, region: &Region) -> f64 {
    let mut r = f64::INFINITY;
    for a in 0..spec.n_minus_1 {
        r = r.min(0.5 * (region.hi[a] - region.lo[a]) as f64 * spec.h);
    }
    let ta = spec.time_axis();
    r.min((0.5 * (region.hi[ta] - region.lo[ta]) as f64 * spec.dt()).sqrt())
}

/// Largest grid radius `m` (units of `h`) for an optional radius cap.
pub(crate) fn radius_cap(spec: &GridSpec, region: &Region, r_max: Option<f64>) -> usize {
    let r = r_max.unwrap_or_else(|| region_radius(spec, region));
    (r / spec.h + 1e-9).floor() as usize
}

pub(crate) fn report_from(
    spec: &GridSpec,
    cubes: &[IndexCube],
    mut value: impl FnMut(&IndexCube) -> Result<f64>,
) -> Result<BmoReport> {
    if cubes.is_empty() {
        return Err(Error::Degenerate("no cube fits the requested box and radii".into()));
    }
    let mut best = (f64::NEG_INFINITY, cubes[0]);
    let mut profile: Vec<(usize, f64)> = Vec::new();
    for c in cubes {
        let v = value(c)?;
        if v > best.0 {
            best = (v, *c);
        }
        match profile.iter_mut().find(|p| p.0 == c.m) {
            Some(p) => p.1 = p.1.max(v),
            None => profile.push((c.m, v)),
        }
    }
    Ok(BmoReport {
        norm: best.0,
        argmax_cube: spec.cube_of(&best.1),
        scale_profile: profile.into_iter().map(|(m, v)| (m as f64 * spec.h, v)).collect(),
    })
}

fn norm_over(f: &ScalarField, region: Region, m_max: usize, mode: CubeMode) -> Result<BmoReport> {
    let cubes = index_cubes(&f.spec, f.periodicity, region, mode, 1, m_max);
    report_from(&f.spec, &cubes, |c| f.mean_oscillation(c))
}

/// `sup_Q (1/|Q|) ∫_Q |f − f_Q|` over the sliding family, optionally
/// restricted to the box of `restrict` and to radii `≤ r_max`.
pub fn bmo_norm(f: &ScalarField, restrict: Option<&ParabolicCube>, r_max: Option<f64>) -> Result<BmoReport> {
    let region = match restrict {
        Some(q) => Region::from_cube(&f.spec, q)?,
        None => Region::full(&f.spec),
    };
    let m_max = radius_cap(&f.spec, &region, r_max);
    norm_over(f, region, m_max, CubeMode::Sliding)
}

/// BMO over the dyadic family only.
pub fn dyadic_bmo_norm(f: &ScalarField) -> Result<BmoReport> {
    let region = Region::full(&f.spec);
    norm_over(f, region, radius_cap(&f.spec, &region, None), CubeMode::Dyadic)
}

/// `max |f_{Q1} − f_{Q2}|` over face-adjacent dyadic cubes of equal size.
pub fn adjacent_average_gap(f: &ScalarField) -> Result<f64> {
    let spec = &f.spec;
    let region = Region::full(spec);
    let cubes = index_cubes(spec, crate::Periodicity::None, region, CubeMode::Dyadic, 1, radius_cap(spec, &region, None));
    let mut avg: HashMap<(usize, [i64; 3]), f64> = HashMap::new();
    for c in &cubes {
        let key = [c.lo[0] / c.len[0] as i64, c.lo[1] / c.len[1] as i64, c.lo[2] / c.len[2] as i64];
        avg.insert((c.m, key), f.index_cube_average(c)?);
    }
    let mut best = 0.0f64;
    for (&(m, key), &v) in &avg {
        for a in 0..spec.naxes() {
            let mut k = key;
            k[a] += 1;
            if let Some(&w) = avg.get(&(m, k)) {
                best = best.max((v - w).abs());
            }
        }
    }
    Ok(best)
}

/// Averages over corner-anchored cubes `Q̃_ρ(x)` (x in the upper corner) of
/// radius `m` cells; `None` where the cube leaves a non-periodic box.
pub(crate) fn corner_averages(p: &PrefixSum, spec: &GridSpec, m: usize) -> Vec<Option<f64>> {
    let ta = spec.time_axis();
    let mut len = [1usize; 3];
    for (a, l) in len.iter_mut().enumerate().take(spec.naxes()) {
        *l = if a == ta { 2 * m * m } else { 2 * m };
    }
    let count = len.iter().product::<usize>() as f64;
    (0..spec.len())
        .map(|lin| {
            let idx = spec.unravel(lin);
            let mut lo = [0i64; 3];
            for a in 0..3 {
                lo[a] = if a < spec.naxes() { idx[a] as i64 + 1 - len[a] as i64 } else { 0 };
            }
            p.fits(lo, len).then(|| p.box_sum(lo, len) / count)
        })
        .collect()
}

/// Strichartz functional: sup over cubes of
/// `Σ_k (1/|Q|) ∫_Q Σ_ρ |M(f,Q̃_ρ(x)) − M(f,Q̃_ρ(x − ρe_k))|² ln 2`, with
/// dyadic `ρ ≤ r` and the time slot shifted by `ρ²`.
pub fn strichartz_functional(f: &ScalarField) -> Result<f64> {
    let spec = &f.spec;
    let per = f.periodic_axes();
    let shape = spec.shape();
    let region = Region::full(spec);
    let m_max = radius_cap(spec, &region, None);
    let cubes = index_cubes(spec, f.periodicity, region, CubeMode::Sliding, 1, m_max);
    if cubes.is_empty() {
        return Err(Error::Degenerate("no cube fits".into()));
    }
    let pf = PrefixSum::new(&f.values, shape, per);
    let ta = spec.time_axis();
    let mut levels: Vec<(usize, PrefixSum)> = Vec::new();
    let mut m = m_max;
    while m >= 1 {
        let avg = corner_averages(&pf, spec, m);
        let mut g = vec![0.0; spec.len()];
        let mut valid = vec![0.0; spec.len()];
        for lin in 0..spec.len() {
            let Some(v) = avg[lin] else { continue };
            let idx = spec.unravel(lin);
            let mut acc = 0.0;
            let mut ok = true;
            for a in 0..spec.naxes() {
                let sh = if a == ta { m * m } else { m };
                let mut j = idx;
                if idx[a] >= sh {
                    j[a] = idx[a] - sh;
                } else if per[a] {
                    j[a] = (idx[a] + shape[a] - sh % shape[a]) % shape[a];
                } else {
                    ok = false;
                    break;
                }
                match avg[spec.linear(j)] {
                    Some(w) => acc += (v - w) * (v - w),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                g[lin] = acc * std::f64::consts::LN_2;
                valid[lin] = 1.0;
            }
        }
        levels.push((m, PrefixSum::new(&g, shape, per)));
        levels.push((usize::MAX - m, PrefixSum::new(&valid, shape, per)));
        if m % 2 != 0 {
            break;
        }
        m /= 2;
    }
    let mut best = 0.0f64;
    for c in &cubes {
        let count = c.len.iter().product::<usize>() as f64;
        let mut total = 0.0;
        let mut admissible = true;
        for pair in levels.chunks(2) {
            let (m, g) = (&pair[0].0, &pair[0].1);
            if *m > c.m {
                continue;
            }
            if pair[1].1.cube_sum(c) < count - 0.5 {
                admissible = false;
                break;
            }
            total += g.cube_sum(c);
        }
        if admissible {
            best = best.max(total / count);
        }
    }
    Ok(best)
}

/// Average of `f` over the centred box of half-width `m` cells in space
/// and `m²` in time, truncated at non-periodic edges.
pub fn box_mollify(f: &ScalarField, m: usize) -> ScalarField {
    if m == 0 {
        return f.clone();
    }
    let spec = &f.spec;
    let shape = spec.shape();
    let per = f.periodic_axes();
    let p = PrefixSum::new(&f.values, shape, per);
    let ta = spec.time_axis();
    let values = (0..spec.len())
        .map(|lin| {
            let idx = spec.unravel(lin);
            let mut lo = [0i64; 3];
            let mut len = [1usize; 3];
            for a in 0..spec.naxes() {
                let half = if a == ta { m * m } else { m } as i64;
                let (mut l, mut h) = (idx[a] as i64 - half, idx[a] as i64 + half + 1);
                if !per[a] {
                    l = l.max(0);
                    h = h.min(shape[a] as i64);
                }
                lo[a] = l;
                len[a] = (h - l) as usize;
            }
            p.box_sum(lo, len) / len.iter().product::<usize>() as f64
        })
        .collect();
    f.with_values(values)
}

/// Smallest `δ(d)/|g(p) − g(q)|` over dyadic axis lags and random pairs.
fn modulus_factor(g: &ScalarField, delta: &dyn Fn(f64) -> f64) -> f64 {
    let spec = &g.spec;
    let shape = spec.shape();
    let ta = spec.time_axis();
    let mut worst = f64::INFINITY;
    let mut consider = |a: f64, b: f64, d: f64| {
        let diff = (a - b).abs();
        if diff > 0.0 {
            worst = worst.min(delta(d) / diff);
        }
    };
    for lin in 0..spec.len() {
        let idx = spec.unravel(lin);
        for a in 0..spec.naxes() {
            let mut lag = 1;
            while idx[a] + lag < shape[a] {
                let mut j = idx;
                j[a] += lag;
                let d = if a == ta { (lag as f64 * spec.dt()).sqrt() } else { lag as f64 * spec.h };
                consider(g.values[lin], g.get(j), d);
                lag *= 2;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xd17a);
    for _ in 0..10_000 {
        let (p, q) = (rng.gen_range(0..spec.len()), rng.gen_range(0..spec.len()));
        let d = crate::grid::parabolic_dist(&spec.point(spec.unravel(p)), &spec.point(spec.unravel(q)));
        consider(g.values[p], g.values[q], d);
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    /// Upper bound for `d(f, C_δ)`.
    pub value: f64,
    /// Mollification half-width (cells) of the best candidate.
    pub scale: usize,
    /// Rescaling factor applied to the best candidate.
    pub factor: f64,
    /// The best candidate was the constant fallback.
    pub fallback: bool,
}

/// Upper bound for `inf_{g ∈ C_δ} ‖f − g‖_*` over the candidates
/// `mean + c (M_m f − mean)`, `m = 0, 1, 2, 4, ...` (`trials` scales), with
/// `c ≤ 1` the largest factor honouring `δ` on the sampled pairs, plus the
/// constant candidate.
pub fn dist_to_equicontinuous(f: &ScalarField, delta: &dyn Fn(f64) -> f64, trials: usize) -> Result<DistanceReport> {
    let mean = f.mean();
    let mut best = DistanceReport { value: bmo_norm(f, None, None)?.norm, scale: 0, factor: 0.0, fallback: true };
    for k in 0..trials {
        let m = if k == 0 { 0 } else { 1 << (k - 1) };
        let g = box_mollify(f, m);
        let c = modulus_factor(&g, delta).min(1.0);
        if !(c > 0.0) {
            continue;
        }
        let diff = f.with_values(f.values.iter().zip(&g.values).map(|(a, b)| a - (mean + c * (b - mean))).collect());
        let v = bmo_norm(&diff, None, None)?.norm;
        if v < best.value {
            best = DistanceReport { value: v, scale: m, factor: c, fallback: false };
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JonesReport {
    pub ratio: f64,
    /// `‖f‖_{*,Q1} = 0`; the inequality holds trivially.
    pub trivial: bool,
}

/// `|f_{Q0} − f_{Q1}| / (log(2 + l(Q1)/l(Q0)) ‖f‖_{*,Q1})` for `Q0 ⊂ Q1`.
pub fn jones_gap_check(f: &ScalarField, q0: &ParabolicCube, q1: &ParabolicCube) -> Result<JonesReport> {
    if !q1.contains_cube(q0) {
        return Err(Error::Invalid("Q0 must lie inside Q1".into()));
    }
    let a0 = crate::grid::cube_average(f, q0)?;
    let a1 = crate::grid::cube_average(f, q1)?;
    let local = bmo_norm(f, Some(q1), None)?.norm;
    if local == 0.0 {
        return Ok(JonesReport { ratio: 0.0, trivial: true });
    }
    Ok(JonesReport { ratio: (a0 - a1).abs() / ((2.0 + q1.r / q0.r).ln() * local), trivial: false })
}

/// `LHS − RHS` of `(1/|Q|)∫|gh − (gh)_Q| ≤ (2/|Q|)∫|g(h − h_Q)| + (|h_Q|/|Q|)∫|g − g_Q|`.
pub fn stein_product_check(g: &ScalarField, h: &ScalarField, q: &ParabolicCube) -> Result<f64> {
    if g.spec != h.spec {
        return Err(Error::Invalid("g and h must share a grid".into()));
    }
    let c = g.spec.index_cube(q)?;
    let covers = g.covers(&c)?;
    h.covers(&c)?;
    let shape = g.spec.shape();
    let mut idx = Vec::new();
    for &(i2, w2) in &covers[2] {
        for &(i1, w1) in &covers[1] {
            for &(i0, w0) in &covers[0] {
                idx.push((i0 + shape[0] * (i1 + shape[1] * i2), w0 * w1 * w2));
            }
        }
    }
    let w: f64 = idx.iter().map(|p| p.1).sum();
    let avg = |f: &dyn Fn(usize) -> f64| idx.iter().map(|&(l, wt)| wt * f(l)).sum::<f64>() / w;
    let gq = avg(&|l| g.values[l]);
    let hq = avg(&|l| h.values[l]);
    let ghq = avg(&|l| g.values[l] * h.values[l]);
    let lhs = avg(&|l| (g.values[l] * h.values[l] - ghq).abs());
    let rhs = 2.0 * avg(&|l| (g.values[l] * (h.values[l] - hq)).abs()) + hq.abs() * avg(&|l| (g.values[l] - gq).abs());
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{ParabolicPoint, Periodicity};

    fn unit(h: f64) -> GridSpec {
        GridSpec::cube_box(1, h, &ParabolicPoint::zero(1), (1.0 / h).round() as usize).unwrap()
    }

    #[test]
    fn constants_vanish() {
        let f = ScalarField::from_fn(unit(0.125), Periodicity::None, |_, _| 4.0);
        assert_eq!(bmo_norm(&f, None, None).unwrap().norm, 0.0);
        assert_eq!(dyadic_bmo_norm(&f).unwrap().norm, 0.0);
        assert_eq!(adjacent_average_gap(&f).unwrap(), 0.0);
        assert_eq!(strichartz_functional(&f).unwrap(), 0.0);
    }

    #[test]
    fn linear_in_x() {
        let h = 1.0 / 16.0;
        let f = ScalarField::from_fn(unit(h), Periodicity::None, |x, _| x[0]);
        let r = bmo_norm(&f, None, None).unwrap();
        assert!((r.norm - 0.5).abs() <= 2.0 * h);
        assert!((adjacent_average_gap(&f).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_request() {
        let f = ScalarField::from_fn(unit(0.125), Periodicity::None, |x, _| x[0]);
        assert!(matches!(bmo_norm(&f, None, Some(0.01)), Err(Error::Degenerate(_))));
    }
}
