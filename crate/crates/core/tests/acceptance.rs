//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Every bound used here is pinned in [`pinned`] or in the `const`s below,
//! independent of the library defaults. Criteria listed in [`KNOWN_FAILING`]
//! are reported as FAIL; the process exits nonzero only when an outcome
//! differs from that list.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use plab_core::bmo::bmo_norm;
use plab_core::experiments::corpus::box_grid;
use plab_core::experiments::report::{Predicate, SuiteReport};
use plab_core::experiments::suites::run_suite;
use plab_core::experiments::{ExperimentConfig, SuiteConstants};
use plab_core::frac_ops::{apply_multiplier, calibrate_cn, MultiplierSpec};
use plab_core::{GridSpec, ParabolicPoint, Periodicity, ScalarField};

const SEED: u64 = 20;

const RIESZ_BUDGET: Duration = Duration::from_secs(60);
const EQUIV_BUDGET: Duration = Duration::from_secs(10 * 60);
const MAIN_BUDGET: Duration = Duration::from_secs(30 * 60);

/// Plane-wave check of `𝔻`.
const PLANE_WAVE_TOL: f64 = 1e-10;
/// Relative gap between calibrated `c_n` and `−1/(2√(2π))`.
const CN_CLOSED_FORM_TOL: f64 = 0.01;

/// Area-function exponents of the pointwise `A ≤ C·S` criterion.
const AREA_P: [f64; 3] = [1.1, 1.5, 2.0];

/// Criteria expected to fail; see the decisions log for the analysis.
const KNOWN_FAILING: [usize; 2] = [5, 9];

fn pinned() -> SuiteConstants {
    SuiteConstants {
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

fn config(suite: &str) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::for_suite(suite);
    cfg.seed = SEED;
    cfg.constants = pinned();
    cfg
}

struct Run {
    report: SuiteReport,
    elapsed: Duration,
}

fn run(suite: &str) -> Result<Run, String> {
    let start = Instant::now();
    let report = run_suite(suite, &config(suite)).map_err(|e| format!("{suite}: {e}"))?;
    Ok(Run { report, elapsed: start.elapsed() })
}

struct Criterion {
    id: usize,
    title: &'static str,
    checks: Vec<Predicate>,
}

impl Criterion {
    fn new(id: usize, title: &'static str) -> Self {
        Self { id, title, checks: Vec::new() }
    }

    fn take(&mut self, run: &Result<Run, String>, keep: impl Fn(&str) -> bool) {
        match run {
            Ok(r) => {
                let picked: Vec<_> = r.report.predicates.iter().filter(|p| keep(&p.name)).cloned().collect();
                if picked.is_empty() {
                    self.checks.push(Predicate::holds(format!("{}_has_predicates", r.report.suite), false));
                }
                self.checks.extend(picked);
            }
            Err(e) => self.checks.push(Predicate::holds(format!("error: {e}"), false)),
        }
    }

    fn budget(&mut self, name: &str, run: &Result<Run, String>, limit: Duration) {
        let secs = run.as_ref().map_or(f64::INFINITY, |r| r.elapsed.as_secs_f64());
        self.checks.push(Predicate::at_most(name, secs, limit.as_secs_f64()));
    }

    fn oracle(&mut self, name: &str, outcome: Result<Predicate, String>) {
        self.checks.push(outcome.unwrap_or_else(|e| Predicate::holds(format!("{name}: {e}"), false)));
    }

    fn pass(&self) -> bool {
        self.checks.iter().all(|p| p.pass)
    }

    fn line(&self) -> String {
        let failed: Vec<String> =
            self.checks.iter().filter(|p| !p.pass).map(|p| format!("{} value={:.4e} bound={:.4e}", p.name, p.value, p.bound)).collect();
        let status = if self.pass() { "PASS" } else { "FAIL" };
        let mut s = format!("{status} criterion {:>2} {} ({} checks)", self.id, self.title, self.checks.len());
        if !failed.is_empty() {
            s.push_str(&format!(" failing: {}", failed.join("; ")));
        }
        s
    }
}

/// `ρ` with `ρ⁴ = ξ²ρ² + τ²`, by bisection.
fn implicit_rho(xi: f64, tau: f64) -> f64 {
    let g = |r: f64| r.powi(4) - xi * xi * r * r - tau * tau;
    let (mut lo, mut hi) = (0.0, xi.abs() + tau.abs().sqrt() + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn plane_wave_oracle() -> Result<Predicate, String> {
    let spec = GridSpec::new(1, 1.0 / 32.0, ParabolicPoint::new(vec![0.0], 0.0), vec![32, 32]).map_err(|e| e.to_string())?;
    let (lx, lt) = (spec.extent(0), spec.extent(1));
    let (kx, kt) = (3.0, 2.0);
    let (xi, tau) = (2.0 * PI * kx / lx, 2.0 * PI * kt / lt);
    let f = ScalarField::from_fn(spec, Periodicity::Full, |x, t| (xi * x[0] + tau * t).cos());
    let d = apply_multiplier(&f, MultiplierSpec::DParabolic).map_err(|e| e.to_string())?;
    let rho = implicit_rho(xi, tau);
    let err = f.values.iter().zip(&d.values).map(|(a, b)| (rho * a - b).abs()).fold(0.0, f64::max) / rho;
    Ok(Predicate::at_most("plane_wave_d_parabolic", err, PLANE_WAVE_TOL))
}

fn cn_closed_form_oracle() -> Result<Predicate, String> {
    let c = calibrate_cn(&box_grid(32).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let exact = -1.0 / (2.0 * (2.0 * PI).sqrt());
    Ok(Predicate::at_most("cn_closed_form", (c / exact - 1.0).abs(), CN_CLOSED_FORM_TOL))
}

/// `f = x` on the box of `Q_d`: the top cube has mean oscillation `d/2`.
fn linear_bmo_oracle() -> Result<Predicate, String> {
    let h = 1.0 / 64.0;
    let m = 16;
    let d = m as f64 * h;
    let spec = GridSpec::cube_box(1, h, &ParabolicPoint::new(vec![0.3], 0.1), m).map_err(|e| e.to_string())?;
    let f = ScalarField::from_fn(spec, Periodicity::None, |x, _| x[0]);
    let norm = bmo_norm(&f, None, None).map_err(|e| e.to_string())?.norm;
    Ok(Predicate::at_most("linear_half_radius", (norm - d / 2.0).abs(), 2.0 * h))
}

fn main() -> ExitCode {
    let frac = run("frac-op");
    let bmo = run("bmo-scan");
    let equiv = run("suite-equiv");
    let ext = run("extend");
    let pull = run("pullback");
    let solve = run("solve");
    let main = run("suite-main");
    let func = run("functionals");

    let mut c1 = Criterion::new(1, "operator identity");
    c1.take(&frac, |n| n == "riesz_residual");
    c1.oracle("plane_wave_d_parabolic", plane_wave_oracle());
    c1.budget("frac_op_seconds", &frac, RIESZ_BUDGET);

    let mut c2 = Criterion::new(2, "kernel and multiplier agreement");
    c2.take(&frac, |n| n.ends_with("_harmonics") || n.ends_with("_corpus_w") || n.starts_with("cn_drift"));
    c2.oracle("cn_closed_form", cn_closed_form_oracle());

    let mut c3 = Criterion::new(3, "BMO axioms");
    c3.take(&bmo, |_| true);
    c3.oracle("linear_half_radius", linear_bmo_oracle());

    let mut c4 = Criterion::new(4, "norm equivalence");
    c4.take(&equiv, |_| true);
    c4.budget("suite_equiv_seconds", &equiv, EQUIV_BUDGET);

    let mut c5 = Criterion::new(5, "extension");
    c5.take(&ext, |_| true);

    let mut c6 = Criterion::new(6, "Lemma A scaling");
    c6.take(&pull, |n| n.contains("lemma_a"));

    let mut c7 = Criterion::new(7, "pullback correctness");
    c7.take(&pull, |n| n == "flat_identity_bit_equal" || n.starts_with("weak_residual") || n == "lambda_v_positive");

    let mut c8 = Criterion::new(8, "solver");
    c8.take(&solve, |_| true);

    let area_p: Vec<String> = AREA_P.iter().map(|p| format!("a_pointwise_p{p}_")).collect();
    let mut c9 = Criterion::new(9, "pointwise area bound");
    c9.take(&main, |n| n.ends_with("_a_pointwise") || n.ends_with("_a_over_s") || area_p.iter().any(|a| n.starts_with(a.as_str())));

    let mut c10 = Criterion::new(10, "main estimate");
    c10.take(&main, |n| {
        n == "no_member_failures"
            || n.contains("n_over_f")
            || n.ends_with("_s_leg")
            || n.ends_with("_n_leg")
            || n.ends_with("_sup_ratio")
    });
    c10.budget("suite_main_seconds", &main, MAIN_BUDGET);

    let mut c11 = Criterion::new(11, "Carleson estimate");
    c11.take(&func, |n| n.starts_with("carleson"));

    let all = [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11];
    for (name, r) in [("frac-op", &frac), ("bmo-scan", &bmo), ("suite-equiv", &equiv), ("extend", &ext), ("pullback", &pull), ("solve", &solve), ("suite-main", &main), ("functionals", &func)] {
        if let Ok(r) = r {
            println!("ran {name} in {:.1}s", r.elapsed.as_secs_f64());
        }
    }
    let mut unexpected = Vec::new();
    for c in &all {
        println!("{}", c.line());
        if c.pass() == KNOWN_FAILING.contains(&c.id) {
            unexpected.push(c.id);
        }
    }
    let passed = all.iter().filter(|c| c.pass()).count();
    println!("{passed}/{} criteria pass; expected failures {:?}", all.len(), KNOWN_FAILING);
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
