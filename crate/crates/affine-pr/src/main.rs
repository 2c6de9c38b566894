//! Command-line front end: generate sensing ensembles, simulate
//! measurements, recover signals, check the theory numerically, and run
//! Monte-Carlo sweeps, all over plain text files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use affine_pr::analysis::{run_theory_checks, TheoryCheck, TheoryCheckOptions};
use affine_pr::bench::{emit_records_csv, emit_summary_csv, run_experiment, ExperimentConfig};
use affine_pr::model::{apply_noise, generate_signal, measure, NoiseSpec, SignalDist};
use affine_pr::recovery::{recover, RecoverOptions, Regime, DEFAULT_GEOMETRY_TOL};
use affine_pr::sensing::{
    check_assumption2, devore_pattern, random_bias, randomize_entries, verify_uff, zero_pad,
};
use affine_pr::{io, Error};

#[derive(Parser)]
#[command(
    name = "affine-pr",
    version,
    about = "Sparse phase retrieval from magnitude-squared affine measurements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a deterministic column-sparse sensing matrix and write it out.
    GenMatrix {
        /// Prime row parameter; the pattern gets p^2 rows.
        #[arg(long)]
        p: u64,
        /// Polynomial degree bound; columns overlap in at most k-1 rows.
        #[arg(long)]
        k: usize,
        /// Number of columns (at most p^k).
        #[arg(long)]
        cols: usize,
        /// Pad with empty rows up to this row count.
        #[arg(long)]
        pad_rows: Option<usize>,
        /// Modulus of every entry.
        #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
        phi_c: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Re-verify the overlap and reference-geometry properties after
        /// construction.
        #[arg(long)]
        verify: bool,
    },
    /// Draw a fixed-modulus bias vector and write it out.
    GenBias {
        /// Number of rows.
        #[arg(long)]
        m: usize,
        /// Modulus of every bias entry.
        #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
        b_c: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a sparse signal, measure it, add noise, and write the
    /// measurement vector.
    Simulate {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        bias: PathBuf,
        /// Signal sparsity.
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        noise: NoiseKind,
        /// Outlier count (sparse noise).
        #[arg(long)]
        kv: Option<usize>,
        /// Outlier standard deviation (sparse noise).
        #[arg(long)]
        sigma_v: Option<f64>,
        /// Noise level (bounded noise).
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        seed: u64,
        /// Where the measurement vector goes.
        #[arg(long)]
        out: PathBuf,
        /// Also write the ground-truth signal here.
        #[arg(long)]
        signal_out: Option<PathBuf>,
        /// Signal value distribution.
        #[arg(long, value_enum, default_value_t = DistKind::Gaussian)]
        dist: DistKind,
        /// Variance of the gaussian distribution.
        #[arg(long, default_value_t = 2.0)]
        variance: f64,
        /// Modulus of the circle distribution.
        #[arg(long, default_value_t = 5.0)]
        radius: f64,
    },
    /// Two-stage recovery from a measurement file.
    Recover {
        /// Measurement vector.
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        bias: PathBuf,
        #[arg(long, value_enum)]
        regime: RegimeArg,
        /// Vote threshold for support identification.
        #[arg(long)]
        eta: f64,
        /// Bounded-noise level.
        #[arg(long)]
        eps: Option<f64>,
        /// Geometric tolerance of the majority vote.
        #[arg(long, default_value_t = DEFAULT_GEOMETRY_TOL)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exercise the error bounds and geometric identities on an instance.
    VerifyTheory {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        bias: PathBuf,
        /// Signal file whose support is treated as the true support.
        #[arg(long)]
        support: PathBuf,
        /// Comma-separated checks: identity, bound, floor, concentration.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV output path.
        #[arg(long)]
        out: PathBuf,
        /// Bounded-noise level for the bound check.
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        /// Modulus of the trial signals' entries.
        #[arg(long, default_value_t = 3.0)]
        signal_radius: f64,
    },
    /// Run a Monte-Carlo sweep from a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Directory for records.csv, summary.csv, and config.echo.json.
        #[arg(long)]
        out_dir: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseKind {
    None,
    Sparse,
    Bounded,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    #[value(name = "noisefree", alias = "noise-free")]
    NoiseFree,
    Sparse,
    Bounded,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::NoiseFree => Regime::NoiseFree,
            RegimeArg::Sparse => Regime::Sparse,
            RegimeArg::Bounded => Regime::Bounded,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DistKind {
    Gaussian,
    Circle,
}

fn parse_check(token: &str) -> Result<TheoryCheck, Error> {
    match token {
        // Short command-line spellings and the descriptive names both work.
        "identity" => Ok(TheoryCheck::CollinearityIdentity),
        "bound" => Ok(TheoryCheck::ErrorBound),
        "floor" | "lemma51" => Ok(TheoryCheck::FactorLowerBound),
        other => other.parse(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::GenMatrix {
            p,
            k,
            cols,
            pad_rows,
            phi_c,
            seed,
            out,
            verify,
        } => {
            let mut pattern = devore_pattern(p, k, cols)?;
            if let Some(target) = pad_rows {
                pattern = zero_pad(&pattern, target)?;
            }
            let matrix = randomize_entries(&pattern, phi_c, seed)?;
            io::write_matrix(&out, &matrix)?;
            let d = pattern.uniform_weight().unwrap_or(0);
            println!(
                "wrote {} ({} x {}, {} entries per column, pairwise overlap <= {})",
                out.display(),
                pattern.num_rows(),
                pattern.num_cols(),
                d,
                k - 1
            );
            if verify {
                let report = verify_uff(&pattern, d, k - 1);
                let bias = random_bias(pattern.num_rows(), phi_c, seed)?;
                let geometry = check_assumption2(&matrix, &bias, 1e-9, 2_000_000)?;
                println!(
                    "verified: overlap ok = {} (worst {}), reference geometry ok = {} \
                     (worst area {:.3e} over {} triples)",
                    report.uff_ok,
                    report.worst_overlap,
                    geometry.assumption2_ok,
                    geometry.worst_collinearity,
                    geometry.triples_checked
                );
                if !report.uff_ok || !geometry.assumption2_ok {
                    return Ok(ExitCode::from(2));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::GenBias { m, b_c, seed, out } => {
            let bias = random_bias(m, b_c, seed)?;
            io::write_bias(&out, &bias)?;
            println!("wrote {} ({} rows, modulus {})", out.display(), m, b_c);
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            matrix,
            bias,
            k,
            noise,
            kv,
            sigma_v,
            eps,
            seed,
            out,
            signal_out,
            dist,
            variance,
            radius,
        } => {
            let matrix = io::read_matrix(&matrix)?;
            let bias = io::read_bias(&bias)?;
            let dist = match dist {
                DistKind::Gaussian => SignalDist::ComplexGaussian { variance },
                DistKind::Circle => SignalDist::Circle { radius },
            };
            let noise = match noise {
                NoiseKind::None => NoiseSpec::None,
                NoiseKind::Sparse => {
                    let kv = kv.ok_or_else(|| {
                        Error::Config("sparse noise needs --kv".into())
                    })?;
                    let sigma_v = sigma_v.ok_or_else(|| {
                        Error::Config("sparse noise needs --sigma-v".into())
                    })?;
                    NoiseSpec::Sparse { kv, sigma_v }
                }
                NoiseKind::Bounded => {
                    let eps = eps.ok_or_else(|| {
                        Error::Config("bounded noise needs --eps".into())
                    })?;
                    NoiseSpec::Bounded { eps }
                }
            };
            let signal = generate_signal(matrix.num_cols(), k, dist, seed)?;
            let clean = measure(&matrix, &bias, &signal)?;
            let y = apply_noise(&clean, noise, seed)?;
            io::write_measurement(&out, &y)?;
            println!(
                "wrote {} ({} measurements of a {}-sparse signal)",
                out.display(),
                y.len(),
                k
            );
            if let Some(path) = signal_out {
                io::write_signal(&path, &signal)?;
                println!("wrote {} (ground truth)", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Recover {
            y,
            matrix,
            bias,
            regime,
            eta,
            eps,
            tol,
            out,
        } => {
            let y = io::read_measurement(&y)?;
            let matrix = io::read_matrix(&matrix)?;
            let bias = io::read_bias(&bias)?;
            let mut opts = RecoverOptions::new(regime.into(), eta).with_tol(tol);
            if let Some(eps) = eps {
                opts = opts.with_eps(eps);
            }
            let report = recover(&y, &matrix, &bias, &opts)?;
            io::write_report(&out, &report, &opts)?;
            let failed = report
                .per_entry
                .iter()
                .filter(|e| matches!(e.outcome, affine_pr::recovery::EntryOutcome::Failed(_)))
                .count();
            println!(
                "wrote {} ({} support columns, {} entries failed)",
                out.display(),
                report.support.indices.len(),
                failed
            );
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::VerifyTheory {
            matrix,
            bias,
            support,
            checks,
            trials,
            seed,
            out,
            eps,
            signal_radius,
        } => {
            let matrix = io::read_matrix(&matrix)?;
            let bias = io::read_bias(&bias)?;
            let support_signal = io::read_signal(&support)?;
            if checks.is_empty() {
                return Err(Error::Config("no checks requested".into()));
            }
            let checks = checks
                .iter()
                .map(|c| parse_check(c))
                .collect::<Result<Vec<_>, _>>()?;
            let opts = TheoryCheckOptions {
                trials,
                seed,
                eps,
                signal_radius,
            };
            let rows = run_theory_checks(
                &matrix,
                &bias,
                support_signal.support(),
                &checks,
                &opts,
            )?;
            io::write_theory_rows(&out, &rows)?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            println!(
                "wrote {} ({} checks, {} failed)",
                out.display(),
                rows.len(),
                failed
            );
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Bench {
            config,
            out_dir,
            threads,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let config: ExperimentConfig = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("bad config: {e}")))?;
            let result = match threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::Config(format!("thread pool: {e}")))?
                    .install(|| run_experiment(&config)),
                None => run_experiment(&config),
            }?;
            std::fs::create_dir_all(&out_dir)?;
            std::fs::write(
                out_dir.join("records.csv"),
                emit_records_csv(&result.records),
            )?;
            std::fs::write(
                out_dir.join("summary.csv"),
                emit_summary_csv(&result.summaries),
            )?;
            std::fs::write(
                out_dir.join("config.echo.json"),
                serde_json::to_string_pretty(&config)
                    .map_err(|e| Error::Config(format!("echoing config: {e}")))?,
            )?;
            for warning in &result.warnings {
                eprintln!("warning: {warning}");
            }
            println!(
                "wrote {} ({} records over {} sweep points)",
                out_dir.display(),
                result.records.len(),
                result.summaries.len()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
