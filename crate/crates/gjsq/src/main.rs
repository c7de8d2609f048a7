use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gjsq::experiments::{self, SimSettings, Source};
use gjsq::io::{self, joint_rows, load_config, rate_rows, write_csv, write_json};
use gjsq::summary::{compare, Summary};
use gjsq_core::ctmc::{oracle, DEFAULT_MIN_MASS};
use gjsq_core::sim::estimate_conditional_rates;
use gjsq_core::sqa::fit_range_warning;
use gjsq_core::{DistributionName, JobSizeDistribution, SystemConfig};

/// Two-server processor-sharing systems under generalized join-the-shortest-queue
/// routing: simulation, exact Markov chain and single-queue approximation.
#[derive(Parser)]
#[command(name = "gjsq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON system configuration (keys rates, lambda, jobsize, tie_prob).
    #[arg(long, conflicts_with_all = ["s", "rho", "dist"])]
    config: Option<PathBuf>,
    /// Speed of the fast server; the slow one has unit rate.
    #[arg(long)]
    s: Option<u32>,
    /// Load, arrival rate over total capacity.
    #[arg(long)]
    rho: Option<f64>,
    /// Job-size law: uni, exp, weib or logn.
    #[arg(long)]
    dist: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<SystemConfig> {
        if let Some(p) = &self.config {
            return load_config(p);
        }
        let (Some(s), Some(rho)) = (self.s, self.rho) else {
            bail!("give either --config or both --s and --rho");
        };
        let dist = match &self.dist {
            Some(d) => JobSizeDistribution::named(d.parse::<DistributionName>()?),
            None => JobSizeDistribution::exponential(),
        };
        Ok(SystemConfig::two_server(s, rho, dist)?)
    }
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Departures per replication.
    #[arg(long, default_value_t = 200_000)]
    departures: u64,
    /// Minimum time in a state before a simulated rate is reported.
    #[arg(long, default_value_t = 100.0)]
    min_time: f64,
}

impl SimArgs {
    fn settings(&self) -> SimSettings {
        SimSettings {
            reps: self.reps,
            departures: self.departures,
            seed: self.seed,
            min_time: self.min_time,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Replicated discrete-event simulation.
    Simulate {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Rate rows up to this queue length in CSV output.
        #[arg(long, default_value_t = 40)]
        n_max: usize,
    },
    /// Exact solution of the truncated Markov chain (exponential sizes).
    Oracle {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Single-queue approximation.
    Sqa {
        #[command(flatten)]
        config: ConfigArgs,
        /// Use the Markov chain's exact rates instead of the fitted ones.
        #[arg(long)]
        exact_rates: bool,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
    },
    /// Conditional arrival-rate series from one or more sources.
    Rates {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Source::Oracle, Source::Approximation])]
        sources: Vec<Source>,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
    },
    /// Differences between two JSON summaries, `(a - b) / a`.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = ["mean".to_string(), "std".to_string(), "lambda_bar".to_string()])]
        metrics: Vec<String>,
        /// Exit with status 2 when any difference exceeds this.
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
    },
    /// Queue-length moments: simulation under four job-size laws against the approximation.
    Table2 {
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Data series behind a figure.
    Figure {
        #[arg(value_parser = experiments::FIGURES)]
        id: String,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
    },
}

/// Reports on stderr when the fitted rates are extrapolated.
fn warn_fit_range(cfg: &SystemConfig) {
    if let Some(w) = cfg.integer_s().and_then(|s| fit_range_warning(cfg.load(), s)) {
        eprintln!("warning: {w}");
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut out = io::sink(cli.out.as_deref())?;
    let json = |default| cli.format.map_or(default, |f| f == Format::Json);
    match cli.command {
        Command::Simulate { config, sim, n_max } => {
            let cfg = config.resolve()?;
            let settings = sim.settings();
            let rep = gjsq::par_replicate(&cfg, &settings.options(), settings.reps, settings.seed)?;
            if json(true) {
                write_json(&mut out, &Summary::from_simulation(&cfg, &rep))?;
            } else {
                write_csv(
                    &mut out,
                    &rate_rows(&estimate_conditional_rates(&rep.pooled(), settings.min_time), n_max),
                )?;
            }
        }
        Command::Oracle { config } => {
            let cfg = config.resolve()?;
            let sol = oracle(&cfg, None, DEFAULT_MIN_MASS)?;
            if json(true) {
                write_json(&mut out, &Summary::from_oracle(&cfg, &sol))?;
            } else {
                write_csv(&mut out, &joint_rows(&sol.dist))?;
            }
        }
        Command::Sqa {
            config,
            exact_rates,
            n_max,
        } => {
            let cfg = config.resolve()?;
            if !exact_rates {
                warn_fit_range(&cfg);
            }
            if json(true) {
                let summary = if exact_rates {
                    experiments::sqa_exact_rates_summary(&cfg)?
                } else {
                    experiments::sqa_summary(&cfg)?
                };
                write_json(&mut out, &summary)?;
            } else {
                let source = if exact_rates {
                    Source::Oracle
                } else {
                    Source::Approximation
                };
                let rows = experiments::rates_series(&cfg, &[source], n_max, &SimSettings::default())?;
                write_csv(&mut out, &rows)?;
            }
        }
        Command::Rates {
            config,
            sim,
            sources,
            n_max,
        } => {
            let cfg = config.resolve()?;
            if sources.contains(&Source::Approximation) {
                warn_fit_range(&cfg);
            }
            let rows = experiments::rates_series(&cfg, &sources, n_max, &sim.settings())?;
            if json(false) {
                write_json(&mut out, &rows)?;
            } else {
                write_csv(&mut out, &rows)?;
            }
        }
        Command::Compare { a, b, metrics, tol } => {
            let read = |p: &PathBuf| -> Result<Summary> {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
            };
            let rows = compare(&read(&a)?, &read(&b)?, &metrics, tol)?;
            if json(false) {
                write_json(&mut out, &rows)?;
            } else {
                write_csv(&mut out, &rows)?;
            }
            if rows.iter().any(|r| r.breach) {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Table2 { sim } => {
            let rows = experiments::table2(&sim.settings())?;
            if json(false) {
                write_json(&mut out, &rows)?;
            } else {
                write_csv(&mut out, &rows)?;
            }
        }
        Command::Figure { id, sim, n_max } => {
            let rows = experiments::figure(&id, &sim.settings(), n_max)?;
            if json(false) {
                write_json(&mut out, &rows)?;
            } else {
                write_csv(&mut out, &rows)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    // Usage errors exit with 1; clap's own default of 2 would read as a breach.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
