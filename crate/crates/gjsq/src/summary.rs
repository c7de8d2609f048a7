//! Scalar summaries shared by `simulate`, `oracle` and `sqa`, and their
//! comparison.

use gjsq_core::ctmc::OracleSolution;
use gjsq_core::sim::Replicated;
use gjsq_core::sqa::{rel_diff, BirthDeathSolution};
use gjsq_core::{RateProfile, SystemConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServerSummary {
    pub mean: f64,
    pub std: f64,
    pub lambda_bar: f64,
    /// Sample standard deviations across replications (simulation only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_sd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_sd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_bar_sd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub routed_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<Option<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub source: String,
    pub config: SystemConfig,
    pub servers: Vec<ServerSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Summary {
    pub fn from_simulation(config: &SystemConfig, rep: &Replicated) -> Self {
        let pooled = rep.pooled();
        let stats = gjsq_core::sim::queue_length_stats(&pooled);
        let servers = rep
            .servers
            .iter()
            .zip(stats)
            .map(|(s, st)| ServerSummary {
                mean: s.mean_queue.mean,
                std: s.std_queue.mean,
                lambda_bar: s.lambda_bar.mean,
                mean_sd: s.mean_queue.std,
                std_sd: s.std_queue.std,
                lambda_bar_sd: s.lambda_bar.std,
                routed_fraction: Some(s.routed_fraction.mean),
                rates: None,
                pi: Some(st.pi),
            })
            .collect();
        Summary {
            source: "simulation".into(),
            config: config.clone(),
            servers,
            warnings: Vec::new(),
        }
    }

    pub fn from_oracle(config: &SystemConfig, sol: &OracleSolution) -> Self {
        let servers = sol
            .marginals
            .iter()
            .zip(&sol.rates)
            .map(|(m, r)| ServerSummary {
                mean: m.mean,
                std: m.std,
                lambda_bar: m.lambda_bar,
                mean_sd: None,
                std_sd: None,
                lambda_bar_sd: None,
                routed_fraction: Some(m.lambda_bar / config.lambda),
                rates: Some(r.values.clone()),
                pi: Some(m.pi.clone()),
            })
            .collect();
        Summary {
            source: "oracle".into(),
            config: config.clone(),
            servers,
            warnings: Vec::new(),
        }
    }

    /// Summary of birth-death solutions, listing rates for the states kept.
    pub fn from_birth_death(
        source: &str,
        config: &SystemConfig,
        parts: &[(&RateProfile, &BirthDeathSolution)],
        warnings: Vec<String>,
    ) -> Self {
        let servers = parts
            .iter()
            .map(|(p, bd)| ServerSummary {
                mean: bd.mean,
                std: bd.std,
                lambda_bar: bd.lambda_bar,
                mean_sd: None,
                std_sd: None,
                lambda_bar_sd: None,
                routed_fraction: Some(bd.lambda_bar / config.lambda),
                rates: Some(p.series(bd.pi.len())),
                pi: Some(bd.pi.clone()),
            })
            .collect();
        Summary {
            source: source.into(),
            config: config.clone(),
            servers,
            warnings,
        }
    }
}

/// One line of a comparison report. `server` is 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffRow {
    pub server: usize,
    pub metric: String,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub abs_diff: f64,
    /// `(a - b) / a`, with `a` as the reference.
    pub rel_diff: Option<f64>,
    pub breach: bool,
}

/// Compares `b` against the reference `a`. Scalar metrics breach when the
/// relative difference exceeds `tol`; the distribution breaches when its
/// largest per-state absolute difference exceeds `tol`.
pub fn compare(a: &Summary, b: &Summary, metrics: &[String], tol: f64) -> anyhow::Result<Vec<DiffRow>> {
    if a.servers.len() != b.servers.len() {
        anyhow::bail!("summaries describe {} and {} servers", a.servers.len(), b.servers.len());
    }
    let mut rows = Vec::new();
    for (i, (x, y)) in a.servers.iter().zip(&b.servers).enumerate() {
        for m in metrics {
            let scalar = |v: &ServerSummary| match m.as_str() {
                "mean" => Ok(v.mean),
                "std" => Ok(v.std),
                "lambda_bar" => Ok(v.lambda_bar),
                other => Err(anyhow::anyhow!("unknown metric `{other}`")),
            };
            if m == "pi" {
                let (p, q) = match (&x.pi, &y.pi) {
                    (Some(p), Some(q)) => (p, q),
                    _ => anyhow::bail!("metric `pi` needs distributions in both summaries"),
                };
                let d = (0..p.len().max(q.len()))
                    .map(|n| (p.get(n).copied().unwrap_or(0.0) - q.get(n).copied().unwrap_or(0.0)).abs())
                    .fold(0.0, f64::max);
                rows.push(DiffRow {
                    server: i + 1,
                    metric: "pi_max_abs".into(),
                    a: None,
                    b: None,
                    abs_diff: d,
                    rel_diff: None,
                    breach: d > tol,
                });
                continue;
            }
            let (va, vb) = (scalar(x)?, scalar(y)?);
            let rel = (va != 0.0).then(|| rel_diff(va, vb));
            let abs = (va - vb).abs();
            rows.push(DiffRow {
                server: i + 1,
                metric: m.clone(),
                a: Some(va),
                b: Some(vb),
                abs_diff: abs,
                rel_diff: rel,
                breach: rel.map_or(abs > tol, |r| r.abs() > tol),
            });
        }
    }
    Ok(rows)
}
