//! `plab`: run one experiment suite, or summarise the manifests in a
//! directory. Exits 0 iff every predicate passes.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use plab_core::experiments::report::collect_manifests;
use plab_core::experiments::{emit_report, run_suite, ExperimentConfig};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "plab", version, about = "Parabolic harmonic analysis experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the corpus and its manifest.
    GenCorpus(RunArgs),
    /// Riesz identity and half-derivative kernel calibration.
    FracOp(RunArgs),
    /// Parabolic BMO axioms and the dyadic bracket.
    BmoScan(RunArgs),
    /// Lewis–Murray functionals at the coarsest grid.
    LmEquiv(RunArgs),
    /// Extension operator properties.
    Extend(RunArgs),
    /// Pullback identity, weak residual, ellipticity and Lemma A.
    Pullback(RunArgs),
    /// Solver order, maximum principle and causality.
    Solve(RunArgs),
    /// Carleson estimate and Whitney cover.
    Functionals(RunArgs),
    /// Lewis–Murray equivalence across grid levels.
    SuiteEquiv(RunArgs),
    /// Main estimate, its legs and the area/square comparison.
    SuiteMain(RunArgs),
    /// Summarise the pass manifests in a directory.
    Report {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; its fields override the suite defaults.
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated cells per unit length, coarse first.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Command {
    fn suite(&self) -> Option<(&'static str, &RunArgs)> {
        Some(match self {
            Command::GenCorpus(a) => ("gen-corpus", a),
            Command::FracOp(a) => ("frac-op", a),
            Command::BmoScan(a) => ("bmo-scan", a),
            Command::LmEquiv(a) => ("lm-equiv", a),
            Command::Extend(a) => ("extend", a),
            Command::Pullback(a) => ("pullback", a),
            Command::Solve(a) => ("solve", a),
            Command::Functionals(a) => ("functionals", a),
            Command::SuiteEquiv(a) => ("suite-equiv", a),
            Command::SuiteMain(a) => ("suite-main", a),
            Command::Report { .. } => return None,
        })
    }
}

/// Recursively overlay `top` onto `base`.
fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, t) => *b = t,
    }
}

fn load_config(suite: &str, args: &RunArgs) -> Result<ExperimentConfig> {
    let mut value = serde_json::to_value(ExperimentConfig::for_suite(suite))?;
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let file: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        merge(&mut value, file);
    }
    let mut cfg: ExperimentConfig = serde_json::from_value(value).context("invalid config")?;
    cfg.suite = suite.into();
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(grid) = &args.grid {
        cfg.grids = grid.clone();
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(suite: &str, args: &RunArgs) -> Result<bool> {
    let cfg = load_config(suite, args)?;
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let report = run_suite(suite, &cfg)?;
    for p in &report.predicates {
        println!("{} {} value={:e} bound={:e}", if p.pass { "PASS" } else { "FAIL" }, p.name, p.value, p.bound);
    }
    for f in &report.failures {
        eprintln!("member failure: {f}");
    }
    for path in emit_report(&report, &out)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(report.passed())
}

fn summarise(dir: &Path) -> Result<bool> {
    let manifests = collect_manifests(dir).with_context(|| format!("reading {}", dir.display()))?;
    if manifests.is_empty() {
        bail!("no *.pass.json manifests in {}", dir.display());
    }
    let mut all = true;
    for m in &manifests {
        let failed: Vec<&str> = m.predicates.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
        println!("{} {} (seed {}, {} predicates)", if m.pass { "PASS" } else { "FAIL" }, m.suite, m.seed, m.predicates.len());
        for name in failed {
            println!("  failed: {name}");
        }
        all &= m.pass;
    }
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Report { out } => summarise(out),
        c => {
            let (suite, args) = c.suite().expect("suite subcommand");
            run(suite, args)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
