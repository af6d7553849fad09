//! Command-line front end: solve one polynomial, print closed forms, run
//! Monte Carlo experiments and sweeps, and run the verification suite.

use clap::{Args, Parser, Subcommand, ValueEnum};
use pevcond::acceptance::{self, Suite};
use pevcond::closedform;
use pevcond::conditioning;
use pevcond::ensembles::{sym_orthonormal_basis, EnsembleSpec};
use pevcond::experiment::{self, ExperimentConfig, SweepGrid};
use pevcond::jsonfmt::{self, fmt_f64};
use pevcond::linalg::Matrix;
use pevcond::matpoly::MatrixPolynomialDoc;
use serde::Serialize;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pevcond",
    version,
    about = "Real polynomial eigenvalues, their condition numbers, and Monte Carlo checks of expected-conditioning formulas"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute eigenvalues and condition numbers of one matrix polynomial
    Solve {
        /// Input JSON: {"n": int, "d": int, "matrices": [[..rows..] ...]}
        #[arg(long)]
        input: PathBuf,
        /// Write the report here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print exact, asymptotic and bound values for an ensemble
    Expect {
        #[arg(long, value_enum)]
        ensemble: ClosedFormEnsemble,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        /// Emit JSON instead of aligned text
        #[arg(long)]
        json: bool,
    },
    /// Estimate the expected condition number by seeded Monte Carlo
    Mc(McArgs),
    /// Run a grid of Monte Carlo cells and write a CSV table
    Sweep {
        /// Grid JSON: {"ensembles": ["gaussian","goe"], "n": [..], "d": [..],
        /// "trials": int, "seed": int, "mom_blocks"?, "trim"?, "workers"?}
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the acceptance suite; exit code 0 iff every criterion passes
    Verify {
        #[arg(long, value_enum, default_value = "full")]
        suite: SuiteArg,
    },
}

#[derive(Args)]
struct McArgs {
    #[arg(long, value_enum)]
    ensemble: McEnsemble,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    /// Median-of-means block count (default ⌈√trials⌉)
    #[arg(long)]
    mom_blocks: Option<usize>,
    /// Symmetric trimming fraction in [0, 0.05]
    #[arg(long, default_value_t = 0.0)]
    trim: f64,
    /// Worker threads (PEVCOND_WORKERS overrides); results are
    /// worker-independent
    #[arg(long)]
    workers: Option<usize>,
    /// Orthonormal basis JSON for the subspace ensemble (list of n×n
    /// matrices); defaults to the symmetric-matrix basis
    #[arg(long)]
    basis: Option<PathBuf>,
    /// Write the JSON report here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write raw per-trial samples as CSV here
    #[arg(long)]
    raw: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClosedFormEnsemble {
    Gaussian,
    Goe,
}

#[derive(Clone, Copy, ValueEnum)]
enum McEnsemble {
    Gaussian,
    Goe,
    Subspace,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Quick,
    Full,
}

#[derive(Serialize)]
struct SolvedEigenvalue {
    alpha: f64,
    beta: f64,
    local_mu: f64,
    sigma_min: f64,
    residual: f64,
}

#[derive(Serialize)]
struct SolveReport {
    eigenvalues: Vec<SolvedEigenvalue>,
    total_mu: f64,
    degenerate: bool,
}

#[derive(Serialize)]
struct ExpectReport {
    ensemble: &'static str,
    n: u32,
    d: u32,
    exact: closedform::ClosedFormValue,
    asymptotic: closedform::ClosedFormValue,
    bound: closedform::ClosedFormValue,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> pevcond::Result<ExitCode> {
    match cli.command {
        Command::Solve { input, output } => {
            let text = fs::read_to_string(&input)?;
            let doc: MatrixPolynomialDoc = serde_json::from_str(&text)
                .map_err(|e| pevcond::Error::BadPolynomial(e.to_string()))?;
            let mp = doc.into_polynomial()?;
            let report = conditioning::total_condition(&mp)?;
            let out = SolveReport {
                eigenvalues: report
                    .records
                    .iter()
                    .map(|r| SolvedEigenvalue {
                        alpha: r.point.alpha(),
                        beta: r.point.beta(),
                        local_mu: r.local_mu,
                        sigma_min: r.sigma_min,
                        residual: r.residual,
                    })
                    .collect(),
                total_mu: report.total_mu,
                degenerate: report.degenerate,
            };
            let json = jsonfmt::to_json_string(&out)?;
            match output {
                Some(path) => fs::write(path, json)?,
                None => println!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Expect { ensemble, n, d, json } => {
            if n < 1 || d < 1 {
                return Err(pevcond::Error::Config("need n ≥ 1 and d ≥ 1".into()));
            }
            let (name, exact, asymptotic, k) = match ensemble {
                ClosedFormEnsemble::Gaussian => (
                    "gaussian",
                    closedform::expected_mu_full_gaussian(n, d),
                    closedform::asymptotic_full_gaussian(n, d),
                    n * n,
                ),
                ClosedFormEnsemble::Goe => (
                    "goe",
                    closedform::expected_mu_goe(n, d),
                    closedform::asymptotic_goe(n, d),
                    n * (n + 1) / 2,
                ),
            };
            let bound = closedform::upper_bound(n, k, d);
            if json {
                let report = ExpectReport {
                    ensemble: name,
                    n,
                    d,
                    exact,
                    asymptotic,
                    bound,
                };
                println!("{}", jsonfmt::to_json_string(&report)?);
            } else {
                println!("ensemble={name} n={n} d={d} (k={k})");
                println!("  exact      {}", fmt_f64(exact.value));
                println!("  asymptotic {}", fmt_f64(asymptotic.value));
                println!("  bound      {}", fmt_f64(bound.value));
                if exact.approximate {
                    println!("  note: exact value uses the asymptotic volume-ratio fallback");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Mc(args) => run_mc(args),
        Command::Sweep { grid, out } => {
            let text = fs::read_to_string(&grid)?;
            let grid: SweepGrid = serde_json::from_str(&text)
                .map_err(|e| pevcond::Error::Config(format!("grid: {e}")))?;
            let rows = experiment::sweep(&grid)?;
            fs::write(&out, experiment::sweep_csv(&rows))?;
            let failures = rows.iter().filter(|r| r.error.is_some()).count();
            println!(
                "wrote {} rows to {} ({} failed cells)",
                rows.len(),
                out.display(),
                failures
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite } => {
            let suite = match suite {
                SuiteArg::Quick => Suite::Quick,
                SuiteArg::Full => Suite::Full,
            };
            let reports = acceptance::run_suite(suite);
            let mut all_ok = true;
            for report in &reports {
                println!("{}", report.line());
                all_ok &= report.passed;
            }
            if all_ok {
                println!("all {} criteria passed", reports.len());
                Ok(ExitCode::SUCCESS)
            } else {
                println!("verification FAILED");
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn run_mc(args: McArgs) -> pevcond::Result<ExitCode> {
    let spec = match args.ensemble {
        McEnsemble::Gaussian => EnsembleSpec::gaussian(args.n, args.d)?,
        McEnsemble::Goe => EnsembleSpec::goe(args.n, args.d)?,
        McEnsemble::Subspace => {
            let basis = match &args.basis {
                Some(path) => {
                    let text = fs::read_to_string(path)?;
                    let rows: Vec<Vec<Vec<f64>>> = serde_json::from_str(&text)
                        .map_err(|e| pevcond::Error::Config(format!("basis: {e}")))?;
                    rows.into_iter()
                        .map(|m| {
                            if m.len() != args.n || m.iter().any(|r| r.len() != args.n) {
                                return Err(pevcond::Error::Config(
                                    "basis matrices must be n×n".into(),
                                ));
                            }
                            Ok(Matrix::from_rows(
                                args.n,
                                args.n,
                                m.into_iter().flatten().collect(),
                            ))
                        })
                        .collect::<pevcond::Result<Vec<_>>>()?
                }
                None => sym_orthonormal_basis(args.n),
            };
            EnsembleSpec::subspace(args.n, args.d, basis)?
        }
    };
    let workers = match std::env::var("PEVCOND_WORKERS") {
        Ok(v) => Some(v.parse::<usize>().map_err(|_| {
            pevcond::Error::Config(format!("PEVCOND_WORKERS must be an integer, got {v:?}"))
        })?),
        Err(_) => args.workers,
    };
    let cfg = ExperimentConfig {
        spec,
        trials: args.trials,
        seed: args.seed,
        mom_blocks: args.mom_blocks,
        trim: args.trim,
        workers,
    };
    let (mut report, samples) = experiment::run_experiment(&cfg)?;
    if let Some(path) = &args.raw {
        fs::write(path, experiment::raw_samples_csv(&samples))?;
        report.per_trial_path = Some(path.display().to_string());
    }
    let summary = format!(
        "{} n={} d={} trials={} seed={}: mean={:.6} ± {:.6}, mom={:.6} (mad {:.6}), trimmed={:.6}{}{}, invalid={}, {:.2}s",
        report.config.ensemble,
        report.config.n,
        report.config.d,
        report.config.trials,
        report.config.seed,
        report.mean,
        report.stderr,
        report.mom,
        report.mom_mad,
        report.trimmed,
        report
            .closed_form
            .map(|c| format!(", exact={:.6}", c.value))
            .unwrap_or_default(),
        format_args!(", bound={:.6}", report.bound.value),
        report.invalid_count,
        report.elapsed_s,
    );
    println!("{summary}");
    if let Some(path) = &args.out {
        fs::write(path, jsonfmt::to_json_string(&report)?)?;
    }
    Ok(ExitCode::SUCCESS)
}
