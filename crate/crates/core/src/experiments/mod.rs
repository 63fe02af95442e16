//! Corpus generation, the experiment suites and report emission.
//!
//! Every suite takes an [`ExperimentConfig`] and returns a [`SuiteReport`]:
//! one CSV row per measurement, a JSON summary and a list of predicates. A
//! failing member is recorded and the suite carries on.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub mod corpus;
pub mod report;
pub mod suites;

pub use corpus::{gen_corpus, Corpus, CorpusManifest, GraphKind, GraphMember};
pub use report::{emit_report, Predicate, SuiteReport};
pub use suites::*;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    /// Truncation `K` of corpus W.
    pub terms: usize,
    /// Slopes of the affine controls (their `ℓ`).
    pub affine_slopes: Vec<f64>,
    pub smooth_amplitudes: Vec<f64>,
    pub w_amplitudes: Vec<f64>,
    /// `η` targets of the strip corpus.
    pub eta_targets: Vec<f64>,
    /// `κ` of the perturbed coefficient families.
    pub coefficient_scales: Vec<f64>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            terms: 3,
            affine_slopes: vec![0.5, -0.25],
            smooth_amplitudes: vec![0.05, 0.1],
            w_amplitudes: vec![0.05, 0.025],
            eta_targets: vec![0.025, 0.05],
            coefficient_scales: vec![0.1],
        }
    }
}

/// Flattened strip `(0, H) × [0, L) × [0, T)` and the time period `P` of the
/// strip graphs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StripGeometry {
    pub height: f64,
    pub width: f64,
    pub duration: f64,
    pub period: f64,
}

impl Default for StripGeometry {
    fn default() -> Self {
        Self { height: 0.5, width: 1.0, duration: 1.0 / 16.0, period: 0.25 }
    }
}

/// Bounds used by the suite predicates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConstants {
    /// Relative drift allowed between consecutive grid levels.
    pub refinement: f64,
    pub riesz_residual: f64,
    pub kernel_harmonics: f64,
    pub kernel_corpus: f64,
    pub cn_drift: f64,
    pub extension_lip: f64,
    pub c_ext: f64,
    pub lemma_a_r2: f64,
    pub weak_residual_ratio: f64,
    pub solver_order: f64,
    /// `tol = factor × linear-solver tolerance` in the maximum principle.
    pub max_principle_factor: f64,
    pub sup_ratio: f64,
    /// Members with measured `η` above this are left out of the main-estimate
    /// ratios.
    pub small_eta: f64,
    pub n_over_f: f64,
    pub s_leg: f64,
    pub n_leg: f64,
    pub a_over_s: f64,
    pub a_pointwise: f64,
    pub c_carl: f64,
    /// `ε` in `‖S_p‖^p / (‖f‖^p + ε‖N‖^p)`.
    pub leg_eps: f64,
}

impl Default for SuiteConstants {
    fn default() -> Self {
        Self {
            refinement: 0.2,
            riesz_residual: 1e-10,
            kernel_harmonics: 0.02,
            kernel_corpus: 0.05,
            cn_drift: 0.01,
            extension_lip: 0.1,
            c_ext: 4.0,
            lemma_a_r2: 0.95,
            weak_residual_ratio: 0.5,
            solver_order: 1.0,
            max_principle_factor: 10.0,
            sup_ratio: 1e-3,
            small_eta: 0.05,
            n_over_f: 4.0,
            s_leg: 4.0,
            n_leg: 4.0,
            a_over_s: 4.0,
            a_pointwise: 4.0,
            c_carl: 4.0,
            leg_eps: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub suite: String,
    pub seed: u64,
    /// Cells per unit length, coarse first.
    pub grids: Vec<usize>,
    pub corpus: CorpusConfig,
    pub p_grid: Vec<f64>,
    pub apertures: Vec<f64>,
    /// Random boundary data per member.
    pub batch: usize,
    pub strip: StripGeometry,
    pub constants: SuiteConstants,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            suite: "suite-main".into(),
            seed: 20,
            grids: vec![32, 64],
            corpus: CorpusConfig::default(),
            p_grid: vec![1.1, 1.25, 1.5, 2.0, 4.0, 8.0],
            apertures: vec![1.0],
            batch: 20,
            strip: StripGeometry::default(),
            constants: SuiteConstants::default(),
            out: None,
        }
    }
}

impl ExperimentConfig {
    /// Defaults for a suite: box-corpus suites run at `n = 16, 32`, strip
    /// suites at `n = 32, 64` and the main theorem suite at `n = 64, 96`.
    pub fn for_suite(suite: &str) -> Self {
        let grids = match suite {
            "suite-main" => vec![64, 96],
            "solve" | "pullback" => vec![32, 64],
            _ => vec![16, 32],
        };
        Self { suite: suite.into(), grids, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.corpus;
        let lists = [
            ("grids", self.grids.is_empty()),
            ("p_grid", self.p_grid.is_empty()),
            ("apertures", self.apertures.is_empty()),
            ("corpus.affine_slopes", c.affine_slopes.is_empty()),
            ("corpus.smooth_amplitudes", c.smooth_amplitudes.is_empty()),
            ("corpus.w_amplitudes", c.w_amplitudes.is_empty()),
            ("corpus.eta_targets", c.eta_targets.is_empty()),
            ("corpus.coefficient_scales", c.coefficient_scales.is_empty()),
        ];
        if let Some((name, _)) = lists.iter().find(|(_, empty)| *empty) {
            return Err(Error::Invalid(format!("{name} must not be empty")));
        }
        if self.grids.iter().any(|&n| n < 4) {
            return Err(Error::Invalid("grid sizes must be at least 4".into()));
        }
        if self.p_grid.iter().any(|&p| !(p > 1.0 && p.is_finite())) {
            return Err(Error::Invalid("every p must lie in (1, inf)".into()));
        }
        if self.apertures.iter().any(|&a| !(a > 0.0)) || self.batch == 0 {
            return Err(Error::Invalid("apertures must be positive and batch nonzero".into()));
        }
        Ok(())
    }
}

/// Map `f` over `items` on a scoped worker pool; results keep input order.
pub fn ordered_map<T: Sync, R: Send>(items: &[T], f: impl Fn(usize, &T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    if workers <= 1 {
        return items.iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    let done = std::sync::Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(i, &items[i]);
                done.lock().unwrap().push((i, r));
            });
        }
    });
    for (i, r) in done.into_inner().unwrap() {
        slots[i] = Some(r);
    }
    slots.into_iter().map(|r| r.unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_map_keeps_order() {
        let v: Vec<usize> = (0..37).collect();
        assert_eq!(ordered_map(&v, |i, x| i * 100 + x), (0..37).map(|i| i * 101).collect::<Vec<_>>());
    }

    #[test]
    fn empty_lists_are_rejected() {
        let mut c = ExperimentConfig::default();
        assert!(c.validate().is_ok());
        c.p_grid.clear();
        assert!(c.validate().is_err());
    }
}
