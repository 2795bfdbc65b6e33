use anyhow::Context;
use clap::{Parser, Subcommand};
use mpolar::config::ExperimentConfig;
use mpolar::error::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mpolar", version, about = "Truncated-resolvent experiments for multipolar inverse-square potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural hypotheses of the configured potential
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Execute the full staged experiment (validate, sweep, diagnostics)
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// run counterexample studies despite failing hypotheses
        #[arg(long)]
        allow_violations: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Summarize finished runs into one table (verifies artifact digests)
    Report {
        /// run directories containing record.json
        #[arg(long, required = true, num_args = 1..)]
        run_dir: Vec<PathBuf>,
        #[arg(long, default_value = "summary.csv")]
        out: PathBuf,
    },
    /// Frequency sweep of the truncated-resolvent norm
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        lambda_min: Option<f64>,
        #[arg(long)]
        lambda_max: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        /// epsilon as a multiple of lambda
        #[arg(long)]
        eps_policy: Option<f64>,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Single-frequency truncated-resolvent norm
    Norm {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        lambda: f64,
    },
    /// Export the angular mode basis table (index, eigenvalue, multiplicity)
    Modes {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 16.0)]
        max_nu: f64,
        #[arg(long, default_value = "modes.csv")]
        out: PathBuf,
    },
    /// Fit a power law to a sweep CSV
    Fit {
        #[arg(long, value_name = "CSV")]
        input: PathBuf,
        /// lambda window "lo,hi"
        #[arg(long)]
        window: Option<String>,
    },
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<Error>() {
        match e {
            Error::Hypothesis(_) | Error::Config(_) => 2,
            _ => 3,
        }
    } else {
        3
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = mpolar::potential::validate_hypotheses(&cfg.potential, 16);
            for e in &report.entries {
                println!(
                    "{} {} (worst margin {:+.3e})",
                    if e.pass { "PASS" } else { "FAIL" },
                    e.hypothesis,
                    e.worst_margin
                );
            }
            println!("cutoff radii: {:?}", report.cutoff_radii);
            if !report.all_pass() {
                return Err(Error::Hypothesis("validation failed".into()).into());
            }
        }
        Command::Run { config, out_dir, allow_violations, seed, threads } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(t) = threads {
                cfg.threads = t;
            }
            let record = mpolar::report::run_experiment(&cfg, &out_dir, allow_violations)
                .with_context(|| format!("run failed (config digest {})", cfg.digest()))?;
            println!("config digest {}", record.config_digest);
            for s in &record.stages {
                println!(
                    "stage {:<12} {:>10.1} ms{}",
                    s.name,
                    s.wall_ms,
                    if s.cached { " (cached)" } else { "" }
                );
            }
            println!(
                "C_emp {:.6e}  exponent {}",
                record.summary.c_emp,
                record
                    .summary
                    .fitted_exponent
                    .map(|p| format!("{p:.4}"))
                    .unwrap_or_else(|| "-".into())
            );
        }
        Command::Report { run_dir, out } => {
            let records = mpolar::report::emit_report(&run_dir, &out)?;
            println!("wrote {} with {} rows", out.display(), records.len());
        }
        Command::Sweep { config, lambda_min, lambda_max, count, eps_policy, out, threads } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(v) = lambda_min {
                cfg.sweep.lambda_min = v;
            }
            if let Some(v) = lambda_max {
                cfg.sweep.lambda_max = v;
            }
            if let Some(v) = count {
                cfg.sweep.count = v;
            }
            if let Some(v) = eps_policy {
                cfg.sweep.eps_relative = v;
            }
            if let Some(t) = threads {
                cfg.threads = t;
            }
            cfg.validate_schema()?;
            let lambdas = cfg.lambdas();
            let result = mpolar::report::sweep_parallel(&cfg, &lambdas, None)?;
            mpolar::report::write_sweep_csv(&out, &result)?;
            for r in &result.records {
                println!(
                    "lambda {:>10.2}  N {:.6e}  N*sqrt(lambda) {:.6e}  iters {:>5}  residual {:.2e}",
                    r.lambda, r.norm, r.norm_sqrt_lambda, r.iters, r.residual
                );
            }
            if let Some(fit) = &result.fit {
                println!(
                    "fit: N ~ {:.4e} * lambda^{:.4} (R^2 = {:.6})",
                    fit.c, fit.p, fit.r_squared
                );
            }
            println!("C_emp {:.6e}", result.c_emp);
        }
        Command::Norm { config, lambda } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rec = mpolar::report::sweep_point(&cfg, lambda)?;
            println!(
                "lambda {:.3}  norm {:.9e}  norm*sqrt(lambda) {:.9e}  iters {}  residual {:.3e}",
                rec.lambda, rec.norm, rec.norm_sqrt_lambda, rec.iters, rec.residual
            );
        }
        Command::Modes { config, max_nu, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let basis = match cfg.potential.poles.first().and_then(|p| p.angular.clone()) {
                Some(_) => {
                    // resample the table onto a 512-point grid
                    let n = 512;
                    let samples: Vec<f64> = (0..n)
                        .map(|i| {
                            let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                            cfg.potential.poles[0].angular_value(th)
                        })
                        .collect();
                    let count = (max_nu.ceil() as usize + 1) * 2;
                    mpolar::sphere::angular_eigenproblem(&samples, count)?
                }
                None => mpolar::sphere::analytic_basis(cfg.potential.dimension, max_nu)?,
            };
            mpolar::report::write_mode_table(&out, &basis)?;
            println!("wrote {} with {} modes", out.display(), basis.entries.len());
        }
        Command::Fit { input, window } => {
            let text = std::fs::read_to_string(&input)?;
            let mut pts = Vec::new();
            for line in text.lines().skip(1) {
                let f: Vec<&str> = line.split(',').collect();
                if f.len() >= 3 {
                    let l: f64 = f[0].parse().unwrap_or(f64::NAN);
                    let n: f64 = f[2].parse().unwrap_or(f64::NAN);
                    if l.is_finite() && n.is_finite() {
                        pts.push((l, n));
                    }
                }
            }
            let win = match window {
                Some(w) => {
                    let parts: Vec<&str> = w.split(',').collect();
                    if parts.len() != 2 {
                        return Err(Error::Parameter("window must be \"lo,hi\"".into()).into());
                    }
                    (parts[0].parse()?, parts[1].parse()?)
                }
                None => (
                    pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
                    pts.iter().map(|p| p.0).fold(0.0, f64::max),
                ),
            };
            let fit = mpolar::resolvent::fit_power_law(&pts, win)?;
            println!(
                "N ~ {:.6e} * lambda^{:.6} (R^2 = {:.8}, {} outliers)",
                fit.c,
                fit.p,
                fit.r_squared,
                fit.outliers.len()
            );
        }
    }
    Ok(())
}
