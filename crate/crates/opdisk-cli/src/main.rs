//! Verification CLI: runs the randomized check suites against a chosen
//! algebra and emits JSON reports or the moment-image CSV.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use opdisk::algebra::Algebra;
use opdisk::suites::{moment_image_csv, parse_algebra, run_suite, Report, Suite, SuiteConfig};

#[derive(Parser)]
#[command(
    name = "opdisk",
    version,
    about = "Operator Poincaré disk verification harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Carrier algebra: matrix:N, commutative:K, or scalar.
    #[arg(long, default_value = "matrix:3")]
    algebra: String,
    /// Samples per check.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Base seed for all sample streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Budget for exact-arithmetic identities (scales the pinned per-check
    /// tolerances).
    #[arg(long, default_value_t = 1e-9)]
    tol_exact: f64,
    /// Budget for finite-difference identities.
    #[arg(long, default_value_t = 1e-4)]
    tol_fd: f64,
    /// Central-difference step.
    #[arg(long, default_value_t = 1e-4)]
    fd_step: f64,
}

impl ConfigArgs {
    fn build(&self, algebra: Algebra) -> Result<SuiteConfig, opdisk::Error> {
        let mut cfg = SuiteConfig::new(algebra, self.samples, self.seed)?;
        cfg.tol_exact = self.tol_exact;
        cfg.tol_fd = self.tol_fd;
        cfg.fd_step = self.fd_step;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a check suite and report pass/fail per check.
    Verify {
        #[command(flatten)]
        config: ConfigArgs,
        /// algebraic | differential | scalar_oracle | moment | halfspace | all
        #[arg(long, default_value = "all")]
        suite: String,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the restricted moment image and convexity witnesses as CSV.
    MomentImage {
        #[command(flatten)]
        config: ConfigArgs,
        /// Lattice resolution (scalar algebra) or sqrt of the sample count.
        #[arg(long, default_value_t = 7)]
        grid: usize,
        /// Write the CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run only the classical-disk comparison suite.
    ScalarCompare {
        /// Samples per check.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Base seed for all sample streams.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_or_print(out: Option<&PathBuf>, contents: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn run_and_report(cfg: SuiteConfig, suite: Suite, out: Option<&PathBuf>) -> Result<bool, String> {
    let checks = run_suite(&cfg, suite).map_err(|e| e.to_string())?;
    for c in &checks {
        let flag = if c.passed { "pass" } else { "FAIL" };
        eprintln!(
            "[{flag}] {:32} samples={:<4} max_error={:.3e} tolerance={:.1e}",
            c.check_name, c.samples, c.max_error, c.tolerance
        );
    }
    let report = Report::assemble(cfg, suite.name(), checks);
    let all_passed = report.all_passed;
    if let Some(path) = out {
        std::fs::write(path, report.to_json()).map_err(|e| e.to_string())?;
    } else {
        print!("{}", report.to_json());
    }
    eprintln!(
        "suite '{}': {}",
        report.suite,
        if all_passed {
            "all checks passed"
        } else {
            "FAILURES present"
        }
    );
    Ok(all_passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify { config, suite, out } => (|| -> Result<bool, String> {
            let algebra = parse_algebra(&config.algebra).map_err(|e| e.to_string())?;
            let suite: Suite = suite.parse().map_err(|e: opdisk::Error| e.to_string())?;
            run_and_report(
                config.build(algebra).map_err(|e| e.to_string())?,
                suite,
                out.as_ref(),
            )
        })(),
        Command::MomentImage { config, grid, out } => (|| -> Result<bool, String> {
            let algebra = parse_algebra(&config.algebra).map_err(|e| e.to_string())?;
            let cfg = config.build(algebra).map_err(|e| e.to_string())?;
            let csv = moment_image_csv(&cfg, *grid).map_err(|e| e.to_string())?;
            let all_pass = csv.lines().skip(1).all(|l| l.ends_with("true"));
            write_or_print(out.as_ref(), &csv).map_err(|e| e.to_string())?;
            eprintln!(
                "moment image: {} rows, certificates {}",
                csv.lines().count().saturating_sub(1),
                if all_pass { "all pass" } else { "FAILURES present" }
            );
            Ok(all_pass)
        })(),
        Command::ScalarCompare { samples, seed, out } => (|| -> Result<bool, String> {
            let cfg =
                SuiteConfig::new(Algebra::Scalar, *samples, *seed).map_err(|e| e.to_string())?;
            run_and_report(cfg, Suite::ScalarOracle, out.as_ref())
        })(),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
