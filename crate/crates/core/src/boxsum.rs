//! Summed-area tables with optional periodic extension per axis.

use crate::grid::IndexCube;

pub(crate) struct PrefixSum {
    n: [usize; 3],
    periodic: [bool; 3],
    s: Vec<f64>,
}

impl PrefixSum {
    pub fn new(values: &[f64], n: [usize; 3], periodic: [bool; 3]) -> Self {
        let (m0, m1) = (n[0] + 1, n[1] + 1);
        let mut s = vec![0.0; m0 * m1 * (n[2] + 1)];
        for i2 in 0..n[2] {
            for i1 in 0..n[1] {
                let mut row = 0.0;
                for i0 in 0..n[0] {
                    row += values[i0 + n[0] * (i1 + n[1] * i2)];
                    let here = (i0 + 1) + m0 * ((i1 + 1) + m1 * (i2 + 1));
                    let below1 = (i0 + 1) + m0 * (i1 + m1 * (i2 + 1));
                    let below2 = (i0 + 1) + m0 * ((i1 + 1) + m1 * i2);
                    let below12 = (i0 + 1) + m0 * (i1 + m1 * i2);
                    s[here] = row + s[below1] + s[below2] - s[below12];
                }
            }
        }
        Self { n, periodic, s }
    }

    fn raw(&self, i: [usize; 3]) -> f64 {
        self.s[i[0] + (self.n[0] + 1) * (i[1] + (self.n[1] + 1) * i[2])]
    }

    /// Sum over `[0, i)` with the periodic extension on periodic axes.
    /// Non-periodic indices must lie in `[0, n]`.
    pub fn at(&self, i: [i64; 3]) -> f64 {
        let mut opts: [[(f64, usize); 2]; 3] = [[(0.0, 0); 2]; 3];
        let mut cnt = [1usize; 3];
        for a in 0..3 {
            let n = self.n[a] as i64;
            if self.periodic[a] {
                let q = i[a].div_euclid(n);
                let r = i[a].rem_euclid(n);
                opts[a][0] = (1.0, r as usize);
                if q != 0 {
                    opts[a][1] = (q as f64, self.n[a]);
                    cnt[a] = 2;
                }
            } else {
                debug_assert!(i[a] >= 0 && i[a] <= n, "prefix index out of range");
                opts[a][0] = (1.0, i[a].clamp(0, n) as usize);
            }
        }
        let mut total = 0.0;
        for c2 in &opts[2][..cnt[2]] {
            for c1 in &opts[1][..cnt[1]] {
                for c0 in &opts[0][..cnt[0]] {
                    total += c0.0 * c1.0 * c2.0 * self.raw([c0.1, c1.1, c2.1]);
                }
            }
        }
        total
    }

    pub fn box_sum(&self, lo: [i64; 3], len: [usize; 3]) -> f64 {
        let mut total = 0.0;
        for corner in 0..8u32 {
            let mut idx = [0i64; 3];
            let mut sign = 1.0;
            for a in 0..3 {
                if corner & (1 << a) != 0 {
                    idx[a] = lo[a] + len[a] as i64;
                } else {
                    idx[a] = lo[a];
                    sign = -sign;
                }
            }
            total += sign * self.at(idx);
        }
        total
    }

    pub fn cube_sum(&self, c: &IndexCube) -> f64 {
        self.box_sum(c.lo, c.len)
    }

    /// Whether a box stays inside the table on non-periodic axes.
    pub fn fits(&self, lo: [i64; 3], len: [usize; 3]) -> bool {
        (0..3).all(|a| self.periodic[a] || (lo[a] >= 0 && lo[a] + len[a] as i64 <= self.n[a] as i64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(v: &[f64], n: [usize; 3], per: [bool; 3], lo: [i64; 3], len: [usize; 3]) -> f64 {
        let mut s = 0.0;
        for k2 in 0..len[2] as i64 {
            for k1 in 0..len[1] as i64 {
                for k0 in 0..len[0] as i64 {
                    let mut i = [lo[0] + k0, lo[1] + k1, lo[2] + k2];
                    for a in 0..3 {
                        if per[a] {
                            i[a] = i[a].rem_euclid(n[a] as i64);
                        }
                    }
                    s += v[i[0] as usize + n[0] * (i[1] as usize + n[1] * i[2] as usize)];
                }
            }
        }
        s
    }

    #[test]
    fn matches_brute_force() {
        let n = [5, 4, 3];
        let v: Vec<f64> = (0..60).map(|k| ((k * 37) % 11) as f64 - 4.0).collect();
        let per = [true, false, true];
        let p = PrefixSum::new(&v, n, per);
        for lo0 in -7..6 {
            for lo2 in -4..3 {
                for (lo1, l1) in [(0, 4), (1, 2), (2, 1)] {
                    let lo = [lo0, lo1, lo2];
                    let len = [7, l1, 5];
                    let b = brute(&v, n, per, lo, len);
                    assert!((p.box_sum(lo, len) - b).abs() < 1e-9);
                }
            }
        }
    }
}
