//! Experiment drivers: the two-server table, rate series and figure data.

use anyhow::{bail, Result};
use gjsq_core::ctmc::{oracle, DEFAULT_MIN_MASS};
use gjsq_core::sim::{estimate_conditional_rates, SimOptions};
use gjsq_core::sqa::pipeline::BD_TOL;
use gjsq_core::sqa::{birth_death_solve, limiting_rates, sqa, sqa_pipeline};
use gjsq_core::{DistributionName, JobSizeDistribution, RateProfile, SystemConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::io::{rate_rows, RateRow};
use crate::par_replicate;
use crate::reference::TABLE2_SQA;
use crate::summary::Summary;

/// Simulation effort. The defaults are desk scale; the published experiments
/// used 2e6 departures and 50 replications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub reps: usize,
    pub departures: u64,
    pub seed: u64,
    /// Minimum time in a state before its conditional rate is reported.
    pub min_time: f64,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            reps: 10,
            departures: 200_000,
            seed: 1,
            min_time: 100.0,
        }
    }
}

impl SimSettings {
    pub fn options(&self) -> SimOptions {
        SimOptions::new(self.departures)
    }
}

pub fn simulate_summary(config: &SystemConfig, sim: &SimSettings) -> Result<Summary> {
    let rep = par_replicate(config, &sim.options(), sim.reps, sim.seed)?;
    Ok(Summary::from_simulation(config, &rep))
}

pub fn oracle_summary(config: &SystemConfig) -> Result<Summary> {
    Ok(Summary::from_oracle(config, &oracle(config, None, DEFAULT_MIN_MASS)?))
}

/// The approximation: fitted and limiting rates fed to birth-death queues.
pub fn sqa_summary(config: &SystemConfig) -> Result<Summary> {
    let r = sqa_pipeline(config)?;
    let parts: Vec<_> = r.servers.iter().map(|v| (&v.profile, &v.solution)).collect();
    let warnings = r.warnings.iter().map(|w| w.to_string()).collect();
    Ok(Summary::from_birth_death("sqa", config, &parts, warnings))
}

/// Birth-death queues driven by the exact rates of the Markov chain. The
/// marginals agree with [`oracle_summary`] up to solver round-off.
pub fn sqa_exact_rates_summary(config: &SystemConfig) -> Result<Summary> {
    let sol = oracle(config, None, DEFAULT_MIN_MASS)?;
    let solutions = sol
        .rates
        .iter()
        .zip(&config.rates)
        .map(|(p, mu)| birth_death_solve(p, *mu, BD_TOL))
        .collect::<gjsq_core::Result<Vec<_>>>()?;
    let parts: Vec<_> = sol.rates.iter().zip(&solutions).collect();
    Ok(Summary::from_birth_death("sqa-exact-rates", config, &parts, Vec::new()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Oracle,
    Approximation,
    Simulation,
}

/// Conditional-rate profiles of `config` from one source.
pub fn rate_profiles(config: &SystemConfig, source: Source, sim: &SimSettings) -> Result<Vec<RateProfile>> {
    Ok(match source {
        Source::Oracle => oracle(config, None, DEFAULT_MIN_MASS)?.rates.to_vec(),
        Source::Approximation => sqa_pipeline(config)?.servers.into_iter().map(|v| v.profile).collect(),
        Source::Simulation => {
            let rep = par_replicate(config, &sim.options(), sim.reps, sim.seed)?;
            estimate_conditional_rates(&rep.pooled(), sim.min_time)
        }
    })
}

pub fn rates_series(
    config: &SystemConfig,
    sources: &[Source],
    n_max: usize,
    sim: &SimSettings,
) -> Result<Vec<RateRow>> {
    let mut rows = Vec::new();
    for src in sources {
        rows.extend(rate_rows(&rate_profiles(config, *src, sim)?, n_max));
    }
    Ok(rows)
}

/// One line of the two-server table: a metric of one cell under one
/// job-size law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub s: u32,
    pub rho: f64,
    pub dist: String,
    pub metric: String,
    pub sim_mean: f64,
    /// Sample standard deviation over replications; absent for one.
    pub sim_sd: Option<f64>,
    pub sqa: f64,
    /// `(sim_mean - sqa) / sim_mean`.
    pub diff: f64,
    pub published_sqa: Option<f64>,
}

pub const TABLE2_GRID: [(u32, f64); 4] = [(2, 0.7), (2, 0.9), (4, 0.7), (4, 0.9)];

pub fn table2(sim: &SimSettings) -> Result<Vec<Table2Row>> {
    let mut rows = Vec::new();
    for (s, rho) in TABLE2_GRID {
        let approx = sqa(rho, s)?;
        let sqa_vals = [
            approx.servers[0].solution.mean,
            approx.servers[0].solution.std,
            approx.servers[1].solution.mean,
            approx.servers[1].solution.std,
        ];
        let published = TABLE2_SQA.iter().find(|c| c.0 == s && c.1 == rho).map(|c| c.2);
        for name in DistributionName::ALL {
            let cfg = SystemConfig::two_server(s, rho, JobSizeDistribution::named(name))?;
            let rep = par_replicate(&cfg, &sim.options(), sim.reps, sim.seed)?;
            let est = [
                rep.servers[0].mean_queue,
                rep.servers[0].std_queue,
                rep.servers[1].mean_queue,
                rep.servers[1].std_queue,
            ];
            for (k, metric) in crate::reference::METRICS.iter().enumerate() {
                rows.push(Table2Row {
                    s,
                    rho,
                    dist: name.as_str().into(),
                    metric: (*metric).into(),
                    sim_mean: est[k].mean,
                    sim_sd: est[k].std,
                    sqa: sqa_vals[k],
                    diff: gjsq_core::sqa::rel_diff(est[k].mean, sqa_vals[k]),
                    published_sqa: published.map(|p| p[k]),
                });
            }
        }
    }
    Ok(rows)
}

/// A point of a figure's data bundle. `series` names the curve, `x` is the
/// abscissa (the load for fig1, the queue length otherwise) and `server` is
/// 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureRow {
    pub figure: String,
    pub series: String,
    pub server: usize,
    pub x: f64,
    pub value: Option<f64>,
    pub stderr: Option<f64>,
}

pub const FIGURES: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "fig5"];

fn profile_rows(figure: &str, series: &str, rows: Vec<RateRow>) -> impl Iterator<Item = FigureRow> {
    let (figure, series) = (figure.to_string(), series.to_string());
    rows.into_iter().map(move |r| FigureRow {
        figure: figure.clone(),
        series: format!("{series},source={}", r.source),
        server: r.server,
        x: r.n as f64,
        value: r.value,
        stderr: r.stderr,
    })
}

/// Data behind a figure; `n_max` bounds the queue lengths of rate plots.
pub fn figure(id: &str, sim: &SimSettings, n_max: usize) -> Result<Vec<FigureRow>> {
    let exp = JobSizeDistribution::exponential;
    let mut out = Vec::new();
    match id {
        "fig1" => {
            // Long-run fraction routed to the slow server against the load.
            let grid: Vec<f64> = (2..=19).map(|k| f64::from(k) * 0.05).collect();
            let points = grid
                .par_iter()
                .map(|&rho| -> Result<_> {
                    let cfg = SystemConfig::two_server(4, rho, exp())?;
                    let rep = par_replicate(&cfg, &sim.options(), sim.reps, sim.seed)?;
                    let f = rep.servers[0].routed_fraction;
                    let exact = oracle(&cfg, None, DEFAULT_MIN_MASS)?.marginals[0].lambda_bar / cfg.lambda;
                    let approx = sqa(rho, 4)?.servers[0].solution.lambda_bar / cfg.lambda;
                    Ok((rho, f, exact, approx))
                })
                .collect::<Result<Vec<_>>>()?;
            for (rho, f, exact, approx) in points {
                let row = |series: &str, value: f64, stderr: Option<f64>| FigureRow {
                    figure: id.into(),
                    series: format!("s=4,dist=exp,source={series}"),
                    server: 1,
                    x: rho,
                    value: Some(value),
                    stderr,
                };
                out.push(row("simulation", f.mean, f.stderr(sim.reps)));
                out.push(row("oracle", exact, None));
                out.push(row("approximation", approx, None));
            }
        }
        "fig2" => {
            for s in [3u32, 4] {
                let cfg = SystemConfig::two_server(s, 0.7, exp())?;
                let series = format!("s={s},rho=0.7");
                let rows = rates_series(&cfg, &[Source::Oracle], n_max, sim)?;
                out.extend(profile_rows(id, &series, rows));
                let lim = limiting_rates(0.7, s)?;
                for n in 0..n_max {
                    for (server, v) in [(1, lim.lam1), (2, lim.lam2[n % s as usize])] {
                        out.push(FigureRow {
                            figure: id.into(),
                            series: format!("{series},source=limit"),
                            server,
                            x: n as f64,
                            value: Some(v),
                            stderr: None,
                        });
                    }
                }
            }
        }
        "fig3" => {
            for rho in [0.7, 0.9] {
                let cfg = SystemConfig::two_server(4, rho, exp())?;
                out.extend(profile_rows(
                    id,
                    &format!("s=4,rho={rho}"),
                    rates_series(&cfg, &[Source::Oracle], n_max, sim)?,
                ));
                for name in DistributionName::ALL {
                    let cfg = SystemConfig::two_server(4, rho, JobSizeDistribution::named(name))?;
                    let rows = rates_series(&cfg, &[Source::Simulation], n_max, sim)?;
                    out.extend(profile_rows(id, &format!("s=4,rho={rho},dist={name}"), rows));
                }
            }
        }
        "fig4" => {
            for s in [3u32, 4] {
                for rho in [0.4, 0.7, 0.9] {
                    let cfg = SystemConfig::two_server(s, rho, exp())?;
                    let rows = rates_series(&cfg, &[Source::Oracle, Source::Approximation], n_max, sim)?;
                    out.extend(profile_rows(id, &format!("s={s},rho={rho}"), rows));
                }
            }
        }
        "fig5" => {
            let rates = vec![1.0, 2.0, 5.0];
            let cfg = SystemConfig::new(rates.clone(), 0.7 * rates.iter().sum::<f64>(), exp())?;
            let rows = rates_series(&cfg, &[Source::Simulation], n_max, sim)?;
            out.extend(profile_rows(id, "rates=1:2:5,rho=0.7,dist=exp", rows));
        }
        other => bail!("unknown figure `{other}`; expected one of {}", FIGURES.join(", ")),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimSettings {
        SimSettings {
            reps: 2,
            departures: 5_000,
            seed: 3,
            min_time: 10.0,
        }
    }

    #[test]
    fn exact_rate_sqa_matches_oracle() {
        let cfg = SystemConfig::two_server(2, 0.7, JobSizeDistribution::exponential()).unwrap();
        let a = oracle_summary(&cfg).unwrap();
        let b = sqa_exact_rates_summary(&cfg).unwrap();
        for (x, y) in a.servers.iter().zip(&b.servers) {
            assert!((x.mean - y.mean).abs() < 1e-9);
            assert!((x.std - y.std).abs() < 1e-9);
        }
    }

    #[test]
    fn unknown_figure_is_rejected() {
        assert!(figure("fig9", &small(), 10).is_err());
    }

    #[test]
    fn fig4_series_are_aligned() {
        let rows = figure("fig4", &small(), 12).unwrap();
        // 6 cells x 2 sources x 2 servers x 12 points.
        assert_eq!(rows.len(), 6 * 2 * 2 * 12);
    }

    #[test]
    fn fig5_has_three_servers() {
        let rows = figure("fig5", &small(), 5).unwrap();
        assert_eq!(rows.iter().map(|r| r.server).max(), Some(3));
    }
}
