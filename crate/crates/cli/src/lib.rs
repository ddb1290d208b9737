//! Front end for the `kronecker` binary: spectra, dimension fits and verification reports.

pub mod config;
pub mod suites;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kronecker_nc::spectral::{
    eigen_table, table_csv, weyl_count, CountedOperator, TableOperator, WeylCount,
};
use kronecker_nc::torus::torus_dimension;
use serde_json::json;

use config::{Format, RunConfig};
use suites::{run_suite, Suite, VerifyOptions};

/// JSON report version.
pub const SCHEMA: u32 = 1;

/// Exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "kronecker",
    version,
    about = "Spectral triples on the Kronecker foliation algebra and the noncommutative torus"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Slope component a (decimal, p/q, or float); requires --b.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Slope component b; requires --a.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Pythagorean pair p,q giving a = p/r, b = q/r [default: 3,4].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub pyth: Option<String>,
    /// Rotation angle of the torus algebra.
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    /// Truncation |k|, |l| <= N [default: 3].
    #[arg(long = "N", global = true)]
    pub n: Option<i64>,
    /// Numeric tolerance [default: 1e-10].
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Largest radius for dimension fits.
    #[arg(long, global = true)]
    pub rmax: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Scalar mode [default: exact].
    #[arg(long, global = true, value_enum)]
    pub mode: Option<config::RunMode>,
    /// Seed for randomized probes [default: 7].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectrumOperator {
    Linear,
    Mixed,
    Dirac,
    Torus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DimensionOperator {
    /// Q̃ (alias: qtilde)
    #[value(alias = "qtilde")]
    Linear,
    Dirac,
    Torus,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalue table on the truncated lattice, sorted ascending.
    Spectrum {
        #[arg(long, value_enum)]
        operator: SpectrumOperator,
    },
    /// Run verification suites; exit 0 iff every check passes.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Largest Hankel order scanned for h.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=5))]
        kmax: u64,
        /// Row indices |i| <= range for the h scan.
        #[arg(long, default_value_t = 10)]
        range: i64,
        /// Determinant moduli at or below this count as vanishing.
        #[arg(long, default_value_t = 1e-100)]
        det_threshold: f64,
        /// Negative control: flip one sign in the operators.
        #[arg(long, hide = true)]
        tamper: bool,
    },
    /// Eigenvalue counts N(R) and a fitted power law.
    Dimension {
        #[arg(long, value_enum)]
        operator: DimensionOperator,
        /// Number of radii on the geometric grid.
        #[arg(long, default_value_t = 16)]
        points: usize,
    },
}

fn emit(cfg: &RunConfig, body: &str) -> anyhow::Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, body)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn json_text(v: &serde_json::Value) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn spectrum(cfg: &RunConfig, op: SpectrumOperator) -> anyhow::Result<i32> {
    let table_op = match op {
        SpectrumOperator::Linear => TableOperator::Linear,
        SpectrumOperator::Mixed => TableOperator::Mixed,
        SpectrumOperator::Dirac => TableOperator::Dirac,
        SpectrumOperator::Torus => TableOperator::Torus,
    };
    let rows = eigen_table(table_op, &cfg.params()?, cfg.n);
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => table_csv(&rows),
        Format::Json => json_text(&json!({
            "schema": SCHEMA,
            "command": "spectrum",
            "operator": format!("{op:?}").to_lowercase(),
            "config": cfg,
            "rows": rows,
        }))?,
    };
    emit(cfg, &body)?;
    Ok(EXIT_PASS)
}

fn dimension(cfg: &RunConfig, op: DimensionOperator, points: usize) -> anyhow::Result<i32> {
    let root = (2.0 * std::f64::consts::PI).sqrt();
    let p = cfg.params()?;
    let w: WeylCount = match op {
        DimensionOperator::Linear => weyl_count(
            CountedOperator::Qtilde,
            &p,
            10.0,
            cfg.rmax.unwrap_or(200.0),
            points,
        ),
        DimensionOperator::Dirac => weyl_count(
            CountedOperator::Dirac,
            &p,
            10.0,
            cfg.rmax.unwrap_or(100.0),
            points,
        ),
        DimensionOperator::Torus => {
            torus_dimension(10.0 * root, cfg.rmax.unwrap_or(200.0 * root), points)
        }
    };
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&json!({
            "schema": SCHEMA,
            "command": "dimension",
            "operator": format!("{op:?}").to_lowercase(),
            "config": cfg,
            "counts": w,
        }))?,
        Format::Csv => {
            let mut s = String::from("R,N\n");
            for (r, n) in w.radii.iter().zip(&w.counts) {
                s.push_str(&format!("{r:?},{n}\n"));
            }
            s
        }
    };
    emit(cfg, &body)?;
    Ok(EXIT_PASS)
}

fn verify(cfg: &RunConfig, suite: Suite, opts: VerifyOptions) -> anyhow::Result<i32> {
    let checks = run_suite(suite, cfg, &opts)?;
    let passed = checks.iter().all(|c| c.passed());
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&json!({
            "schema": SCHEMA,
            "command": "verify",
            "suite": suite,
            "config": cfg,
            "options": opts,
            "passed": passed,
            "checks": checks,
        }))?,
        Format::Csv => {
            let mut s = String::from("suite,id,status,max_residual,min_abs_det,witness\n");
            for c in &checks {
                let status = serde_json::to_value(c.status)?;
                s.push_str(&format!(
                    "{},\"{}\",{},{:e},{},\"{}\"\n",
                    c.suite,
                    c.id.replace('"', "'"),
                    status.as_str().unwrap_or_default(),
                    c.max_residual,
                    c.min_abs_det.map(|d| format!("{d:e}")).unwrap_or_default(),
                    c.witness.clone().unwrap_or_default()
                ));
            }
            s
        }
    };
    emit(cfg, &body)?;
    for c in checks.iter().filter(|c| !c.passed()) {
        eprintln!(
            "violated: [{}] {} (witness {})",
            c.suite,
            c.id,
            c.witness.as_deref().unwrap_or("none")
        );
    }
    Ok(if passed { EXIT_PASS } else { EXIT_VIOLATION })
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let cfg = match RunConfig::resolve(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let result = match cli.command {
        Command::Spectrum { operator } => spectrum(&cfg, operator),
        Command::Dimension { operator, points } => {
            if points < 2 {
                eprintln!("error: need at least two radii");
                return EXIT_USAGE;
            }
            dimension(&cfg, operator, points)
        }
        Command::Verify {
            suite,
            kmax,
            range,
            det_threshold,
            tamper,
        } => {
            let opts = VerifyOptions {
                kmax: kmax as usize,
                range,
                det_threshold,
                tamper,
            };
            verify(&cfg, suite, opts)
        }
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        EXIT_VIOLATION
    })
}
