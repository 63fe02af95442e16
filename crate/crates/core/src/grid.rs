//! Parabolic geometry, sampled fields and cube families.
//!
//! Samples sit at cell centres: along a spatial axis sample `i` lives at
//! `origin + (i + 1/2) h`, along time at `origin_t + (k + 1/2) h²`. A
//! parabolic cube of radius `m h` whose corner sits on a cell wall therefore
//! covers exactly `2m` cells per spatial axis and `2m²` time cells.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point `(x, t)` of `R^{n-1} x R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolicPoint {
    pub x: Vec<f64>,
    pub t: f64,
}

impl ParabolicPoint {
    pub fn new(x: Vec<f64>, t: f64) -> Self {
        Self { x, t }
    }

    pub fn zero(n_minus_1: usize) -> Self {
        Self { x: vec![0.0; n_minus_1], t: 0.0 }
    }
}

/// `|x| + |t|^{1/2}`.
pub fn parabolic_norm(p: &ParabolicPoint) -> f64 {
    p.x.iter().map(|v| v * v).sum::<f64>().sqrt() + p.t.abs().sqrt()
}

/// Parabolic distance `|x - y| + |t - s|^{1/2}`.
pub fn parabolic_dist(a: &ParabolicPoint, b: &ParabolicPoint) -> f64 {
    let dx: f64 = a.x.iter().zip(&b.x).map(|(u, v)| (u - v) * (u - v)).sum();
    dx.sqrt() + (a.t - b.t).abs().sqrt()
}

/// `Q_r(center)`: spatial side `2r`, time side `2r²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolicCube {
    pub center: ParabolicPoint,
    pub r: f64,
}

impl ParabolicCube {
    pub fn new(center: ParabolicPoint, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Invalid(format!("cube radius must be positive, got {r}")));
        }
        Ok(Self { center, r })
    }

    pub fn volume(&self) -> f64 {
        (2.0 * self.r).powi(self.center.x.len() as i32) * 2.0 * self.r * self.r
    }

    pub fn contains(&self, p: &ParabolicPoint) -> bool {
        p.x.iter().zip(&self.center.x).all(|(a, c)| (a - c).abs() <= self.r)
            && (p.t - self.center.t).abs() <= self.r * self.r
    }

    /// Whether `other` lies inside `self` (closed containment).
    pub fn contains_cube(&self, other: &ParabolicCube) -> bool {
        let tol = 1e-12 * (1.0 + self.r);
        other.center.x.iter().zip(&self.center.x).all(|(a, c)| (a - c).abs() + other.r <= self.r + tol)
            && (other.center.t - self.center.t).abs() + other.r * other.r <= self.r * self.r + tol
    }
}

/// Which axes wrap around.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Periodicity {
    None,
    /// Every axis is periodic.
    Full,
    /// Only the time axis is periodic.
    Time,
}

impl Periodicity {
    pub fn axis(self, axis: usize, time_axis: usize) -> bool {
        match self {
            Periodicity::None => false,
            Periodicity::Full => true,
            Periodicity::Time => axis == time_axis,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Periodicity::None => 0,
            Periodicity::Full => 1,
            Periodicity::Time => 2,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(Periodicity::None),
            1 => Some(Periodicity::Full),
            2 => Some(Periodicity::Time),
            _ => None,
        }
    }
}

/// Uniform grid over a space-time box. The time step is `h²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_minus_1: usize,
    pub h: f64,
    /// Lower corner of the box (a cell wall, not a sample).
    pub origin: ParabolicPoint,
    /// Spatial counts followed by the time count.
    pub counts: Vec<usize>,
}

impl GridSpec {
    pub fn new(n_minus_1: usize, h: f64, origin: ParabolicPoint, counts: Vec<usize>) -> Result<Self> {
        if !(1..=2).contains(&n_minus_1) {
            return Err(Error::InvalidGrid(format!("n-1 must be 1 or 2, got {n_minus_1}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGrid(format!("h must be positive, got {h}")));
        }
        if origin.x.len() != n_minus_1 || !origin.t.is_finite() || origin.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("origin does not match n-1 or is not finite".into()));
        }
        if counts.len() != n_minus_1 + 1 {
            return Err(Error::InvalidGrid(format!("expected {} counts, got {}", n_minus_1 + 1, counts.len())));
        }
        if counts.iter().any(|&c| c < 4) {
            return Err(Error::InvalidGrid(format!("every count must be >= 4, got {counts:?}")));
        }
        Ok(Self { n_minus_1, h, origin, counts })
    }

    /// The box of the cube `Q_r(center)` with `r = m h`.
    pub fn cube_box(n_minus_1: usize, h: f64, center: &ParabolicPoint, m: usize) -> Result<Self> {
        let r = m as f64 * h;
        let origin = ParabolicPoint::new(center.x.iter().map(|c| c - r).collect(), center.t - r * r);
        let mut counts = vec![2 * m; n_minus_1];
        counts.push(2 * m * m);
        Self::new(n_minus_1, h, origin, counts)
    }

    pub fn dt(&self) -> f64 {
        self.h * self.h
    }

    pub fn time_axis(&self) -> usize {
        self.n_minus_1
    }

    pub fn naxes(&self) -> usize {
        self.n_minus_1 + 1
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Counts padded to three axes with trailing ones.
    pub fn shape(&self) -> [usize; 3] {
        let mut s = [1; 3];
        s[..self.counts.len()].copy_from_slice(&self.counts);
        s
    }

    pub fn step(&self, axis: usize) -> f64 {
        if axis == self.time_axis() {
            self.dt()
        } else {
            self.h
        }
    }

    pub fn axis_origin(&self, axis: usize) -> f64 {
        if axis == self.time_axis() {
            self.origin.t
        } else {
            self.origin.x[axis]
        }
    }

    /// Coordinate of sample `i` along `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.axis_origin(axis) + (i as f64 + 0.5) * self.step(axis)
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.counts[axis] as f64 * self.step(axis)
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.n_minus_1 as i32) * self.dt()
    }

    /// Largest parabolic radius that fits in the box.
    pub fn box_radius(&self) -> f64 {
        let mut r = f64::INFINITY;
        for a in 0..self.n_minus_1 {
            r = r.min(0.5 * self.extent(a));
        }
        r.min((0.5 * self.extent(self.time_axis())).sqrt())
    }

    pub fn linear(&self, idx: [usize; 3]) -> usize {
        let s = self.shape();
        idx[0] + s[0] * (idx[1] + s[1] * idx[2])
    }

    pub fn unravel(&self, lin: usize) -> [usize; 3] {
        let s = self.shape();
        [lin % s[0], (lin / s[0]) % s[1], lin / (s[0] * s[1])]
    }

    pub fn point(&self, idx: [usize; 3]) -> ParabolicPoint {
        let ta = self.time_axis();
        ParabolicPoint::new((0..self.n_minus_1).map(|a| self.coord(a, idx[a])).collect(), self.coord(ta, idx[ta]))
    }

    /// Grid-aligned index cube for a parabolic cube, if the cube is aligned.
    pub fn index_cube(&self, q: &ParabolicCube) -> Result<IndexCube> {
        let mf = q.r / self.h;
        let m = mf.round();
        if m < 1.0 || (mf - m).abs() > 1e-6 || q.center.x.len() != self.n_minus_1 {
            return Err(Error::OutOfDomain(format!("cube radius {} is not a grid multiple of h={}", q.r, self.h)));
        }
        let m = m as usize;
        let mut lo = [0i64; 3];
        let mut len = [1usize; 3];
        for a in 0..self.naxes() {
            let (c, half, l) = if a == self.time_axis() {
                (q.center.t, (m * m) as f64, 2 * m * m)
            } else {
                (q.center.x[a], m as f64, 2 * m)
            };
            let s = (c - self.axis_origin(a)) / self.step(a) - half;
            let sr = s.round();
            if (s - sr).abs() > 1e-6 {
                return Err(Error::OutOfDomain("cube is not aligned with cell walls".into()));
            }
            lo[a] = sr as i64;
            len[a] = l;
        }
        Ok(IndexCube { lo, len, m })
    }

    pub fn cube_of(&self, c: &IndexCube) -> ParabolicCube {
        let ta = self.time_axis();
        let x = (0..self.n_minus_1)
            .map(|a| self.axis_origin(a) + (c.lo[a] as f64 + c.m as f64) * self.h)
            .collect();
        let t = self.origin.t + (c.lo[ta] as f64 + (c.m * c.m) as f64) * self.dt();
        ParabolicCube { center: ParabolicPoint::new(x, t), r: c.m as f64 * self.h }
    }
}

/// Integer box `[lo, lo + len)` per axis; unused axes have `lo = 0, len = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IndexCube {
    pub lo: [i64; 3],
    pub len: [usize; 3],
    /// Radius in units of `h`.
    pub m: usize,
}

/// Sub-box of a grid, `[lo, hi)` per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Region {
    pub lo: [usize; 3],
    pub hi: [usize; 3],
}

impl Region {
    pub fn full(spec: &GridSpec) -> Self {
        Self { lo: [0; 3], hi: spec.shape() }
    }

    /// Shrink by `space` cells on spatial axes and `time` cells on the time axis.
    pub fn shrink(&self, spec: &GridSpec, space: usize, time: usize) -> Option<Self> {
        let mut r = *self;
        for a in 0..spec.naxes() {
            let k = if a == spec.time_axis() { time } else { space };
            r.lo[a] += k;
            if r.hi[a] < k || r.hi[a] - k <= r.lo[a] {
                return None;
            }
            r.hi[a] -= k;
        }
        Some(r)
    }

    /// Region covered by a parabolic box inside `spec`.
    pub fn from_cube(spec: &GridSpec, q: &ParabolicCube) -> Result<Self> {
        let c = spec.index_cube(q)?;
        let mut r = Region::full(spec);
        for a in 0..spec.naxes() {
            if c.lo[a] < 0 || c.lo[a] as usize + c.len[a] > spec.counts[a] {
                return Err(Error::OutOfDomain("restriction box leaves the field box".into()));
            }
            r.lo[a] = c.lo[a] as usize;
            r.hi[a] = c.lo[a] as usize + c.len[a];
        }
        Ok(r)
    }
}

/// Cube family selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CubeMode {
    Dyadic,
    Sliding,
}

/// Radii `m_max, m_max/2, ...` that stay integral and above `m_min`.
pub(crate) fn dyadic_levels(m_min: usize, m_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut m = m_max;
    while m >= m_min.max(1) {
        out.push(m);
        if m % 2 != 0 {
            break;
        }
        m /= 2;
    }
    out
}

/// Index cubes of the requested family inside `region`. On periodic axes
/// spanning the whole grid a cube longer than the axis wraps around.
pub(crate) fn index_cubes(
    spec: &GridSpec,
    periodicity: Periodicity,
    region: Region,
    mode: CubeMode,
    m_min: usize,
    m_max: usize,
) -> Vec<IndexCube> {
    let ta = spec.time_axis();
    let full = Region::full(spec);
    let mut out = Vec::new();
    for m in dyadic_levels(m_min, m_max) {
        let mut starts: Vec<Vec<i64>> = Vec::with_capacity(3);
        let mut lens = [1usize; 3];
        for a in 0..3 {
            if a >= spec.naxes() {
                starts.push(vec![0]);
                continue;
            }
            let (len, step) = if a == ta { (2 * m * m, m * m) } else { (2 * m, m) };
            let step = if mode == CubeMode::Dyadic { len } else { step };
            lens[a] = len;
            let (lo, hi) = (region.lo[a], region.hi[a]);
            let mut s = Vec::new();
            if lo + len <= hi {
                let mut p = lo;
                while p + len <= hi {
                    s.push(p as i64);
                    p += step;
                }
            } else if periodicity.axis(a, ta) && lo == full.lo[a] && hi == full.hi[a] {
                let mut p = 0;
                while p < hi {
                    s.push(p as i64);
                    p += step;
                }
            }
            starts.push(s);
        }
        for &s2 in &starts[2] {
            for &s1 in &starts[1] {
                for &s0 in &starts[0] {
                    out.push(IndexCube { lo: [s0, s1, s2], len: lens, m });
                }
            }
        }
    }
    out
}

/// Cubes of the dyadic or sliding family with `r_min <= r <= r_max`, all
/// inside the box. An empty result means the request is degenerate.
pub fn enumerate_cubes(spec: &GridSpec, mode: CubeMode, r_min: f64, r_max: f64) -> Vec<ParabolicCube> {
    let m_max = ((r_max.min(spec.box_radius())) / spec.h + 1e-9).floor() as usize;
    let m_min = ((r_min / spec.h) - 1e-9).ceil().max(1.0) as usize;
    index_cubes(spec, Periodicity::None, Region::full(spec), mode, m_min, m_max)
        .iter()
        .map(|c| spec.cube_of(c))
        .collect()
}

/// Indices and multiplicities covered by `[start, start+len)` on one axis.
pub(crate) fn axis_cover(start: i64, len: usize, n: usize, periodic: bool) -> Option<Vec<(usize, f64)>> {
    if !periodic {
        if start < 0 || start as usize + len > n {
            return None;
        }
        return Some((start as usize..start as usize + len).map(|i| (i, 1.0)).collect());
    }
    if len <= n {
        return Some((0..len).map(|k| ((start + k as i64).rem_euclid(n as i64) as usize, 1.0)).collect());
    }
    let mut w = vec![0.0; n];
    let (q, r) = (len / n, len % n);
    for v in w.iter_mut() {
        *v = q as f64;
    }
    for k in 0..r {
        w[(start + k as i64).rem_euclid(n as i64) as usize] += 1.0;
    }
    Some(w.into_iter().enumerate().collect())
}

/// A real field sampled on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    pub periodicity: Periodicity,
}

impl ScalarField {
    pub fn new(spec: GridSpec, values: Vec<f64>, periodicity: Periodicity) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!("{} values for {} samples", values.len(), spec.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("field contains non-finite values".into()));
        }
        Ok(Self { spec, values, periodicity })
    }

    pub fn zeros(spec: GridSpec, periodicity: Periodicity) -> Self {
        let n = spec.len();
        Self { spec, values: vec![0.0; n], periodicity }
    }

    /// Sample `f(x, t)` at every cell centre.
    pub fn from_fn(spec: GridSpec, periodicity: Periodicity, f: impl Fn(&[f64], f64) -> f64) -> Self {
        let s = spec.shape();
        let ta = spec.time_axis();
        let mut values = Vec::with_capacity(spec.len());
        let mut x = vec![0.0; spec.n_minus_1];
        for i2 in 0..s[2] {
            for i1 in 0..s[1] {
                for i0 in 0..s[0] {
                    let idx = [i0, i1, i2];
                    for (a, xa) in x.iter_mut().enumerate() {
                        *xa = spec.coord(a, idx[a]);
                    }
                    values.push(f(&x, spec.coord(ta, idx[ta])));
                }
            }
        }
        Self { spec, values, periodicity }
    }

    pub fn axis_periodic(&self, axis: usize) -> bool {
        self.periodicity.axis(axis, self.spec.time_axis())
    }

    pub fn periodic_axes(&self) -> [bool; 3] {
        let mut p = [false; 3];
        for (a, v) in p.iter_mut().enumerate().take(self.spec.naxes()) {
            *v = self.axis_periodic(a);
        }
        p
    }

    pub fn get(&self, idx: [usize; 3]) -> f64 {
        self.values[self.spec.linear(idx)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { spec: self.spec.clone(), values: self.values.iter().map(|&v| f(v)).collect(), periodicity: self.periodicity }
    }

    pub fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self { spec: self.spec.clone(), values, periodicity: self.periodicity }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Centred difference along `axis`; wraps on periodic axes, one-sided at
    /// other edges.
    pub fn derivative(&self, axis: usize) -> Self {
        let s = self.spec.shape();
        let n = s[axis];
        let step = self.spec.step(axis);
        let per = self.axis_periodic(axis);
        let stride = match axis {
            0 => 1,
            1 => s[0],
            _ => s[0] * s[1],
        };
        let mut out = vec![0.0; self.values.len()];
        for (lin, o) in out.iter_mut().enumerate() {
            let i = self.spec.unravel(lin)[axis];
            let base = lin - i * stride;
            let at = |k: usize| self.values[base + k * stride];
            *o = if per {
                (at((i + 1) % n) - at((i + n - 1) % n)) / (2.0 * step)
            } else if i == 0 {
                (at(1) - at(0)) / step
            } else if i == n - 1 {
                (at(n - 1) - at(n - 2)) / step
            } else {
                (at(i + 1) - at(i - 1)) / (2.0 * step)
            };
        }
        self.with_values(out)
    }

    /// Spatial gradient components.
    pub fn gradient(&self) -> Vec<Self> {
        (0..self.spec.n_minus_1).map(|a| self.derivative(a)).collect()
    }

    /// Sum and total weight over an index cube (wrapping on periodic axes).
    pub(crate) fn cube_sum(&self, c: &IndexCube) -> Result<(f64, f64)> {
        let covers = self.covers(c)?;
        let s = self.spec.shape();
        let mut sum = 0.0;
        let mut wsum = 0.0;
        for &(i2, w2) in &covers[2] {
            for &(i1, w1) in &covers[1] {
                let w12 = w1 * w2;
                let base = s[0] * (i1 + s[1] * i2);
                for &(i0, w0) in &covers[0] {
                    sum += w0 * w12 * self.values[base + i0];
                    wsum += w0 * w12;
                }
            }
        }
        Ok((sum, wsum))
    }

    pub(crate) fn covers(&self, c: &IndexCube) -> Result<[Vec<(usize, f64)>; 3]> {
        let s = self.spec.shape();
        let mut out: [Vec<(usize, f64)>; 3] = [vec![(0, 1.0)], vec![(0, 1.0)], vec![(0, 1.0)]];
        for a in 0..self.spec.naxes() {
            out[a] = axis_cover(c.lo[a], c.len[a], s[a], self.axis_periodic(a))
                .ok_or_else(|| Error::OutOfDomain(format!("cube leaves the box on axis {a}")))?;
        }
        Ok(out)
    }

    pub(crate) fn index_cube_average(&self, c: &IndexCube) -> Result<f64> {
        let (s, w) = self.cube_sum(c)?;
        Ok(s / w)
    }

    /// `(1/|Q|) ∫_Q |f - f_Q|` over an index cube.
    pub(crate) fn mean_oscillation(&self, c: &IndexCube) -> Result<f64> {
        let covers = self.covers(c)?;
        let s = self.spec.shape();
        let (sum, wsum) = self.cube_sum(c)?;
        let avg = sum / wsum;
        let mut dev = 0.0;
        for &(i2, w2) in &covers[2] {
            for &(i1, w1) in &covers[1] {
                let w12 = w1 * w2;
                let base = s[0] * (i1 + s[1] * i2);
                for &(i0, w0) in &covers[0] {
                    dev += w0 * w12 * (self.values[base + i0] - avg).abs();
                }
            }
        }
        Ok(dev / wsum)
    }
}

/// Midpoint-rule average of `f` over `q`.
pub fn cube_average(f: &ScalarField, q: &ParabolicCube) -> Result<f64> {
    let c = f.spec.index_cube(q)?;
    f.index_cube_average(&c)
}

/// Lower bound for the Lip(1,1/2) constant: every nearest-neighbour pair,
/// every dyadic lag along each axis, and a fixed budget of random pairs.
pub fn lip_constant_estimate(phi: &ScalarField) -> f64 {
    let spec = &phi.spec;
    let s = spec.shape();
    let ta = spec.time_axis();
    let per = phi.periodic_axes();
    let dist = |d: [i64; 3]| -> f64 {
        let mut sp = 0.0;
        for a in 0..spec.n_minus_1 {
            let v = d[a] as f64 * spec.h;
            sp += v * v;
        }
        sp.sqrt() + (d[ta] as f64 * spec.dt()).abs().sqrt()
    };
    let mut best = 0.0f64;
    for lin in 0..phi.values.len() {
        let idx = spec.unravel(lin);
        let v = phi.values[lin];
        for a in 0..spec.naxes() {
            let n = s[a];
            let mut lag = 1usize;
            while lag < n {
                let j = idx[a] + lag;
                let j = if j < n {
                    Some(j)
                } else if per[a] {
                    Some(j % n)
                } else {
                    None
                };
                if let Some(j) = j {
                    let mut o = idx;
                    o[a] = j;
                    let mut d = [0i64; 3];
                    d[a] = lag as i64;
                    let q = (phi.get(o) - v).abs() / dist(d);
                    best = best.max(q);
                }
                lag *= 2;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x11b5);
    let budget = 20_000.min(phi.values.len() * 4);
    for _ in 0..budget {
        let a = rng.gen_range(0..phi.values.len());
        let b = rng.gen_range(0..phi.values.len());
        if a == b {
            continue;
        }
        let (ia, ib) = (spec.unravel(a), spec.unravel(b));
        let mut d = [0i64; 3];
        for ax in 0..spec.naxes() {
            let mut k = ib[ax] as i64 - ia[ax] as i64;
            if per[ax] {
                let n = s[ax] as i64;
                k = k.rem_euclid(n);
                if k > n / 2 {
                    k -= n;
                }
            }
            d[ax] = k;
        }
        best = best.max((phi.values[a] - phi.values[b]).abs() / dist(d));
    }
    best
}

/// Boundary graph `x0 = φ(x, t)` with its character.
#[derive(Clone, Debug)]
pub struct GraphDomain {
    pub phi: ScalarField,
    pub lip_const: f64,
    pub eta: f64,
    pub d: f64,
}

impl GraphDomain {
    /// Shift `φ` so that the sample nearest the origin is 0, then measure `ℓ`.
    pub fn normalized(phi: ScalarField, eta: f64, d: f64) -> Self {
        let spec = &phi.spec;
        let mut idx = [0usize; 3];
        for (a, slot) in idx.iter_mut().enumerate().take(spec.naxes()) {
            let k = ((-spec.axis_origin(a)) / spec.step(a) - 0.5).round();
            *slot = k.clamp(0.0, (spec.counts[a] - 1) as f64) as usize;
        }
        let c = phi.get(idx);
        let phi = phi.map(|v| v - c);
        let lip_const = lip_constant_estimate(&phi);
        Self { phi, lip_const, eta, d }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box(h: f64) -> GridSpec {
        GridSpec::cube_box(1, h, &ParabolicPoint::zero(1), (1.0 / h).round() as usize).unwrap()
    }

    #[test]
    fn norms() {
        assert_eq!(parabolic_norm(&ParabolicPoint::new(vec![3.0], 4.0)), 5.0);
        assert_eq!(parabolic_norm(&ParabolicPoint::zero(1)), 0.0);
        let v = parabolic_norm(&ParabolicPoint::new(vec![1.0, 1.0], 0.25));
        assert!((v - (2f64.sqrt() + 0.5)).abs() < 1e-15);
        let d = parabolic_dist(&ParabolicPoint::zero(1), &ParabolicPoint::new(vec![1.0], 1.0));
        assert_eq!(d, 2.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(1, -0.1, ParabolicPoint::zero(1), vec![8, 8]).is_err());
        assert!(GridSpec::new(3, 0.1, ParabolicPoint::zero(3), vec![8, 8, 8, 8]).is_err());
        assert!(GridSpec::new(1, 0.1, ParabolicPoint::zero(1), vec![3, 8]).is_err());
    }

    #[test]
    fn single_cube_when_box_is_a_cube() {
        let g = unit_box(0.125);
        assert_eq!(enumerate_cubes(&g, CubeMode::Dyadic, 1.0, 1.0).len(), 1);
        assert!(enumerate_cubes(&g, CubeMode::Dyadic, 2.0, 2.0).is_empty());
    }

    #[test]
    fn cube_round_trip() {
        let g = unit_box(0.125);
        for q in enumerate_cubes(&g, CubeMode::Sliding, 0.125, 1.0) {
            let c = g.index_cube(&q).unwrap();
            assert_eq!(g.cube_of(&c), q);
        }
    }

    #[test]
    fn averages() {
        let g = unit_box(1.0 / 32.0);
        let q = ParabolicCube::new(ParabolicPoint::zero(1), 1.0).unwrap();
        let c = ScalarField::from_fn(g.clone(), Periodicity::None, |_, _| 2.5);
        assert_eq!(cube_average(&c, &q).unwrap(), 2.5);
        let x = ScalarField::from_fn(g.clone(), Periodicity::None, |x, _| x[0]);
        assert!(cube_average(&x, &q).unwrap().abs() < 1e-15);
        let outside = ParabolicCube::new(ParabolicPoint::new(vec![0.5], 0.0), 1.0).unwrap();
        assert!(matches!(cube_average(&x, &outside), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn lip_of_linear_is_exact() {
        let g = unit_box(1.0 / 16.0);
        let x = ScalarField::from_fn(g.clone(), Periodicity::None, |x, _| x[0]);
        assert!((lip_constant_estimate(&x) - 1.0).abs() < 1e-12);
        let z = ScalarField::zeros(g, Periodicity::None);
        assert_eq!(lip_constant_estimate(&z), 0.0);
    }

    #[test]
    fn wrapped_cover_counts_multiplicity() {
        let c = axis_cover(3, 10, 4, true).unwrap();
        let total: f64 = c.iter().map(|p| p.1).sum();
        assert_eq!(total, 10.0);
        assert!(axis_cover(-1, 2, 4, false).is_none());
    }
}
