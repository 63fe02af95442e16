//! Small numerical helpers shared by several modules.

/// Gauss-Legendre nodes and weights on `[0, 1]`, eight points.
pub(crate) fn gauss8_unit() -> [(f64, f64); 8] {
    const X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
    const W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];
    let mut out = [(0.0, 0.0); 8];
    for k in 0..4 {
        out[2 * k] = (0.5 * (1.0 - X[k]), 0.5 * W[k]);
        out[2 * k + 1] = (0.5 * (1.0 + X[k]), 0.5 * W[k]);
    }
    out
}

/// Quintic smoothstep `6s⁵ − 15s⁴ + 10s³`, clamped to `[0, 1]`.
pub(crate) fn smoothstep(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        s * s * s * (s * (6.0 * s - 15.0) + 10.0)
    }
}

/// Least-squares slope and `R²` of `y` against `x`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_degree_15() {
        let s: f64 = gauss8_unit().iter().map(|(x, w)| w * x.powi(15)).sum();
        assert!((s - 1.0 / 16.0).abs() < 1e-14);
    }
}
