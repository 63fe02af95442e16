//! Helpers for fields on the strip `(x₀, x, t)`: `x₀ ∈ (0, H)` and `t` are
//! open axes, `x` is periodic. Strip fields carry `Periodicity::None` and the
//! lateral wrap is applied here.

use std::collections::VecDeque;

use crate::grid::{GridSpec, ParabolicPoint};
use crate::{Error, Result};

pub(crate) const X0: usize = 0;
pub(crate) const X: usize = 1;
pub(crate) const T: usize = 2;

pub(crate) fn check(spec: &GridSpec) -> Result<()> {
    if spec.n_minus_1 != 2 {
        return Err(Error::DimensionMismatch(format!("strip grids have axes (x0, x, t), got n-1 = {}", spec.n_minus_1)));
    }
    if spec.origin.x[0] != 0.0 {
        return Err(Error::InvalidGrid("strip must start at x0 = 0".into()));
    }
    Ok(())
}

/// Strip over `x₀ ∈ (0, nx0·h)` sharing the lateral and time axes of a
/// boundary grid `(x, t)`, restricted to `nt` time cells from `t_start`.
pub fn strip_over(boundary: &GridSpec, nx0: usize, t_start: usize, nt: usize) -> Result<GridSpec> {
    if boundary.n_minus_1 != 1 {
        return Err(Error::DimensionMismatch("boundary grid must have one spatial axis".into()));
    }
    let t0 = boundary.origin.t + t_start as f64 * boundary.dt();
    GridSpec::new(2, boundary.h, ParabolicPoint::new(vec![0.0, boundary.origin.x[0]], t0), vec![nx0, boundary.counts[0], nt])
}

/// Boundary grid `(x, t)` of a strip.
pub fn boundary_of(strip: &GridSpec) -> Result<GridSpec> {
    GridSpec::new(1, strip.h, ParabolicPoint::new(vec![strip.origin.x[1]], strip.origin.t), vec![strip.counts[1], strip.counts[2]])
}

#[inline]
pub(crate) fn lin(shape: [usize; 3], i: usize, j: usize, k: usize) -> usize {
    i + shape[0] * (j + shape[1] * k)
}

/// Centred first difference along `axis`; one-sided at the ends of open axes.
pub(crate) fn diff(v: &[f64], shape: [usize; 3], axis: usize, step: f64, periodic: bool) -> Vec<f64> {
    let n = shape[axis];
    let stride = match axis {
        0 => 1,
        1 => shape[0],
        _ => shape[0] * shape[1],
    };
    let mut out = vec![0.0; v.len()];
    if n < 2 {
        return out;
    }
    for (p, o) in out.iter_mut().enumerate() {
        let i = (p / stride) % n;
        let base = p - i * stride;
        let at = |q: usize| v[base + q * stride];
        *o = if periodic {
            (at((i + 1) % n) - at((i + n - 1) % n)) / (2.0 * step)
        } else if i == 0 {
            (at(1) - at(0)) / step
        } else if i == n - 1 {
            (at(n - 1) - at(n - 2)) / step
        } else {
            (at(i + 1) - at(i - 1)) / (2.0 * step)
        };
    }
    out
}

/// Strip gradient `(∂₀, ∂₁)` and time derivative.
pub(crate) fn gradient(v: &[f64], spec: &GridSpec) -> [Vec<f64>; 3] {
    let s = spec.shape();
    [diff(v, s, X0, spec.h, false), diff(v, s, X, spec.h, true), diff(v, s, T, spec.dt(), false)]
}

/// `max` of `line` over windows `[k − w, k + w]`, clipped (open) or wrapped.
pub(crate) fn sliding_max(line: &[f64], w: usize, periodic: bool) -> Vec<f64> {
    let n = line.len();
    if periodic && 2 * w + 1 >= n {
        let m = line.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return vec![m; n];
    }
    let get = |q: i64| -> Option<f64> {
        if periodic {
            Some(line[q.rem_euclid(n as i64) as usize])
        } else if q >= 0 && (q as usize) < n {
            Some(line[q as usize])
        } else {
            None
        }
    };
    let mut out = Vec::with_capacity(n);
    let mut dq: VecDeque<(i64, f64)> = VecDeque::new();
    let w = w as i64;
    let mut next = -w;
    for k in 0..n as i64 {
        while next <= k + w {
            if let Some(v) = get(next) {
                while dq.back().is_some_and(|b| b.1 <= v) {
                    dq.pop_back();
                }
                dq.push_back((next, v));
            }
            next += 1;
        }
        while dq.front().is_some_and(|f| f.0 < k - w) {
            dq.pop_front();
        }
        out.push(dq.front().map_or(f64::NEG_INFINITY, |f| f.1));
    }
    out
}

/// Sum of `line` over windows `[k − w, k + w]` clipped to the axis.
pub(crate) fn sliding_sum(prefix: &[f64], k: usize, w: usize) -> f64 {
    let n = prefix.len() - 1;
    let lo = k.saturating_sub(w);
    let hi = (k + w + 1).min(n);
    prefix[hi] - prefix[lo]
}

pub(crate) fn prefix(line: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut acc = 0.0;
    for v in line {
        acc += v;
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sliding_max_matches_brute_force() {
        let line: Vec<f64> = (0..23).map(|i| ((i * 37) % 11) as f64).collect();
        for w in 0..6 {
            for periodic in [false, true] {
                let got = sliding_max(&line, w, periodic);
                for k in 0..line.len() as i64 {
                    let mut m = f64::NEG_INFINITY;
                    for q in k - w as i64..=k + w as i64 {
                        if periodic {
                            m = m.max(line[q.rem_euclid(23) as usize]);
                        } else if (0..23).contains(&q) {
                            m = m.max(line[q as usize]);
                        }
                    }
                    assert_eq!(got[k as usize], m);
                }
            }
        }
    }
}
