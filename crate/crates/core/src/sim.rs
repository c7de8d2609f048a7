//! Event-driven simulation of processor-sharing servers behind a GJSQ
//! dispatcher.
//!
//! Each server keeps the attained service `v` of any job present since the
//! server was last empty (all jobs at a PS server are served at the same
//! rate). A job is stored by its finish key `v_at_arrival + size`, so the
//! next departure is the smallest key and no per-job updates are needed.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::model::SystemConfig;
use crate::profile::{Provenance, RateProfile, Tail};

/// Run-length controls.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimOptions {
    /// Departures counted after the warm-up; the run ends at the last one.
    pub departures: u64,
    /// Departures discarded before statistics are collected.
    pub warmup_departures: u64,
    /// Optional time limit; required when the arrival rate is zero.
    pub max_time: Option<f64>,
}

impl SimOptions {
    pub fn new(departures: u64) -> Self {
        SimOptions {
            departures,
            warmup_departures: 0,
            max_time: None,
        }
    }
}

/// Counters of one server over the observation window.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ServerCounters {
    pub arrivals: u64,
    /// `arrivals_seeing[n]`: arrivals that found `n` jobs here.
    pub arrivals_seeing: Vec<u64>,
    /// `time_at[n]`: time spent with exactly `n` jobs.
    pub time_at: Vec<f64>,
    /// `seen_by_all[n]`: arrivals to any server that found `n` jobs here.
    pub seen_by_all: Vec<u64>,
    pub departures: u64,
}

/// Whole-run work balance, used to check the event engine.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WorkLedger {
    pub admitted: f64,
    pub remaining: f64,
    /// `sum_i rate_i * busy_time_i`.
    pub served: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimResult {
    pub servers: Vec<ServerCounters>,
    /// Length of the observation window.
    pub t_end: f64,
    pub departures: u64,
    pub replication: u64,
    pub work: WorkLedger,
}

impl SimResult {
    pub fn total_arrivals(&self) -> u64 {
        self.servers.iter().map(|s| s.arrivals).sum()
    }

    /// Checks the exact counter identities.
    pub fn counters_consistent(&self) -> bool {
        self.servers.iter().all(|s| {
            let seen: u64 = s.arrivals_seeing.iter().sum();
            let time: f64 = s.time_at.iter().sum();
            seen == s.arrivals && (time - self.t_end).abs() <= 1e-9 * self.t_end.max(1.0)
        }) && self
            .servers
            .iter()
            .all(|s| s.seen_by_all.iter().sum::<u64>() == self.total_arrivals())
            && self.servers.iter().map(|s| s.departures).sum::<u64>() == self.departures
    }

    /// Relative violation of `admitted - remaining = served`.
    pub fn work_conservation_error(&self) -> f64 {
        let w = self.work;
        (w.admitted - w.remaining - w.served).abs() / w.admitted.max(f64::MIN_POSITIVE)
    }

    /// Sums the counters of several runs of the same system.
    pub fn pooled(results: &[SimResult]) -> Option<SimResult> {
        let first = results.first()?;
        let mut out = first.clone();
        for r in &results[1..] {
            out.t_end += r.t_end;
            out.departures += r.departures;
            out.work.admitted += r.work.admitted;
            out.work.remaining += r.work.remaining;
            out.work.served += r.work.served;
            for (a, b) in out.servers.iter_mut().zip(&r.servers) {
                a.arrivals += b.arrivals;
                a.departures += b.departures;
                add_into(&mut a.arrivals_seeing, &b.arrivals_seeing);
                add_into(&mut a.time_at, &b.time_at);
                add_into(&mut a.seen_by_all, &b.seen_by_all);
            }
        }
        Some(out)
    }
}

fn add_into<T: Copy + Default + core::ops::AddAssign>(a: &mut Vec<T>, b: &[T]) {
    if a.len() < b.len() {
        a.resize(b.len(), T::default());
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += *y;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    // Reversed: `BinaryHeap` is a max-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0)
    }
}

struct Server {
    rate: f64,
    attained: f64,
    jobs: BinaryHeap<Key>,
    busy: f64,
}

impl Server {
    fn next_departure(&self) -> f64 {
        match self.jobs.peek() {
            Some(k) => ((k.0 - self.attained) * self.jobs.len() as f64 / self.rate).max(0.0),
            None => f64::INFINITY,
        }
    }

    fn advance(&mut self, dt: f64) {
        let q = self.jobs.len();
        if q > 0 {
            self.attained += dt * self.rate / q as f64;
            self.busy += dt;
        }
    }
}

/// Random stream of replication `rep` under `master_seed`.
pub fn stream(master_seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(rep);
    rng
}

fn exp_draw<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.sample(Open01);
    -u.ln() / rate
}

/// Simulates from an empty system with replication stream `rep`.
pub fn simulate(config: &SystemConfig, options: &SimOptions, master_seed: u64, rep: u64) -> Result<SimResult> {
    config.validate()?;
    if options.departures == 0 {
        return Err(domain("the number of departures must be positive"));
    }
    if config.lambda == 0.0 && options.max_time.is_none() {
        return Err(domain("an empty system never produces departures; set max_time"));
    }
    if let Some(t) = options.max_time {
        if !(t > 0.0) {
            return Err(domain("max_time must be positive"));
        }
    }
    let mut rng = stream(master_seed, rep);
    let router = config.router();
    let n = config.servers();
    let mut servers: Vec<Server> = config
        .rates
        .iter()
        .map(|&rate| Server {
            rate,
            attained: 0.0,
            jobs: BinaryHeap::new(),
            busy: 0.0,
        })
        .collect();
    let mut counters = vec![ServerCounters::default(); n];
    let mut q = vec![0u64; n];
    let mut admitted = 0.0;
    let mut departed = 0u64;
    let target = options.warmup_departures + options.departures;
    let mut recording = options.warmup_departures == 0;
    let mut t = 0.0;
    let mut t_start = 0.0;
    let horizon = options.max_time.unwrap_or(f64::INFINITY);
    let mut to_arrival = if config.lambda > 0.0 {
        exp_draw(&mut rng, config.lambda)
    } else {
        f64::INFINITY
    };

    loop {
        let (mut dt, mut who) = (to_arrival, None);
        for (i, s) in servers.iter().enumerate() {
            let d = s.next_departure();
            if d < dt {
                dt = d;
                who = Some(i);
            }
        }
        let hit_horizon = t + dt >= horizon;
        if hit_horizon {
            dt = horizon - t;
        }
        for (i, s) in servers.iter_mut().enumerate() {
            if recording {
                let c = &mut counters[i];
                let qi = q[i] as usize;
                if c.time_at.len() <= qi {
                    c.time_at.resize(qi + 1, 0.0);
                }
                c.time_at[qi] += dt;
            }
            s.advance(dt);
        }
        t += dt;
        if hit_horizon {
            break;
        }
        to_arrival -= dt;
        match who {
            None => {
                let u = if router.is_tie(&q) { rng.sample(Open01) } else { 0.0 };
                let i = router.pick(&q, u);
                let size = config.jobsize.sample(&mut rng);
                admitted += size;
                if recording {
                    for (c, &qj) in counters.iter_mut().zip(&q) {
                        let qj = qj as usize;
                        if c.seen_by_all.len() <= qj {
                            c.seen_by_all.resize(qj + 1, 0);
                        }
                        c.seen_by_all[qj] += 1;
                    }
                    let c = &mut counters[i];
                    let qi = q[i] as usize;
                    if c.arrivals_seeing.len() <= qi {
                        c.arrivals_seeing.resize(qi + 1, 0);
                    }
                    c.arrivals_seeing[qi] += 1;
                    c.arrivals += 1;
                }
                let s = &mut servers[i];
                s.jobs.push(Key(s.attained + size));
                q[i] += 1;
                to_arrival = exp_draw(&mut rng, config.lambda);
            }
            Some(i) => {
                let s = &mut servers[i];
                s.jobs.pop();
                q[i] -= 1;
                if q[i] == 0 {
                    s.attained = 0.0;
                }
                departed += 1;
                if recording {
                    counters[i].departures += 1;
                }
                if departed == options.warmup_departures && !recording {
                    recording = true;
                    t_start = t;
                }
                if departed >= target {
                    break;
                }
            }
        }
    }

    let remaining = servers
        .iter()
        .map(|s| s.jobs.iter().map(|k| (k.0 - s.attained).max(0.0)).sum::<f64>())
        .sum();
    let served = servers.iter().map(|s| s.rate * s.busy).sum();
    Ok(SimResult {
        servers: counters,
        t_end: if recording { t - t_start } else { 0.0 },
        departures: departed.saturating_sub(options.warmup_departures),
        replication: rep,
        work: WorkLedger {
            admitted,
            remaining,
            served,
        },
    })
}

/// Simulates `n_departures` departures from an empty system.
pub fn run_simulation(config: &SystemConfig, n_departures: u64, seed: u64) -> Result<SimResult> {
    simulate(config, &SimOptions::new(n_departures), seed, 0)
}

/// `lambda_i(n) = A_{i,n} / T_{i,n}` for states observed longer than
/// `min_time`; standard errors treat the count as Poisson.
pub fn estimate_conditional_rates(result: &SimResult, min_time: f64) -> Vec<RateProfile> {
    result
        .servers
        .iter()
        .map(|c| {
            let (values, errs): (Vec<_>, Vec<_>) = c
                .time_at
                .iter()
                .enumerate()
                .map(|(n, &time)| {
                    if time > min_time && time > 0.0 {
                        let a = c.arrivals_seeing.get(n).copied().unwrap_or(0) as f64;
                        (Some(a / time), Some(a.sqrt() / time))
                    } else {
                        (None, None)
                    }
                })
                .unzip();
            let mut p = RateProfile::new(Provenance::Simulation, values, Tail::Unknown);
            p.stderr = Some(errs);
            p
        })
        .collect()
}

/// `A_i / t_end` per server.
pub fn estimate_time_average_rates(result: &SimResult) -> Vec<f64> {
    result
        .servers
        .iter()
        .map(|c| {
            if result.t_end > 0.0 {
                c.arrivals as f64 / result.t_end
            } else {
                0.0
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QueueStats {
    pub mean: f64,
    pub std: f64,
    /// Time-weighted distribution of the queue length.
    pub pi: Vec<f64>,
}

pub fn queue_length_stats(result: &SimResult) -> Vec<QueueStats> {
    result
        .servers
        .iter()
        .map(|c| {
            let pi: Vec<f64> = if result.t_end > 0.0 {
                c.time_at.iter().map(|t| t / result.t_end).collect()
            } else {
                vec![1.0]
            };
            let mean: f64 = pi.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
            let second: f64 = pi.iter().enumerate().map(|(n, p)| (n * n) as f64 * p).sum();
            QueueStats {
                mean,
                std: (second - mean * mean).max(0.0).sqrt(),
                pi,
            }
        })
        .collect()
}

/// Mean over replications with the sample standard deviation (absent for a
/// single replication).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Estimate {
    pub mean: f64,
    pub std: Option<f64>,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = (xs.len() > 1).then(|| (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt());
        Estimate { mean, std }
    }

    /// Standard error of the mean.
    pub fn stderr(&self, reps: usize) -> Option<f64> {
        self.std.map(|s| s / (reps as f64).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ServerSummary {
    pub mean_queue: Estimate,
    pub std_queue: Estimate,
    pub lambda_bar: Estimate,
    /// Fraction of all arrivals routed here.
    pub routed_fraction: Estimate,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Replicated {
    pub reps: usize,
    pub servers: Vec<ServerSummary>,
    pub results: Vec<SimResult>,
}

impl Replicated {
    pub fn from_results(results: Vec<SimResult>) -> Result<Self> {
        let first = results
            .first()
            .ok_or_else(|| domain("at least one replication is required"))?;
        let n = first.servers.len();
        let stats: Vec<Vec<QueueStats>> = results.iter().map(queue_length_stats).collect();
        let rates: Vec<Vec<f64>> = results.iter().map(estimate_time_average_rates).collect();
        let servers = (0..n)
            .map(|i| {
                let pick =
                    |f: &dyn Fn(usize) -> f64| Estimate::from_samples(&(0..results.len()).map(f).collect::<Vec<_>>());
                ServerSummary {
                    mean_queue: pick(&|r| stats[r][i].mean),
                    std_queue: pick(&|r| stats[r][i].std),
                    lambda_bar: pick(&|r| rates[r][i]),
                    routed_fraction: pick(&|r| {
                        let total = results[r].total_arrivals();
                        if total == 0 {
                            0.0
                        } else {
                            results[r].servers[i].arrivals as f64 / total as f64
                        }
                    }),
                }
            })
            .collect();
        Ok(Replicated {
            reps: results.len(),
            servers,
            results,
        })
    }

    pub fn pooled(&self) -> SimResult {
        SimResult::pooled(&self.results).expect("at least one replication")
    }
}

/// Independent replications on substreams `0..reps` of `master_seed`.
pub fn replicate(config: &SystemConfig, options: &SimOptions, reps: usize, master_seed: u64) -> Result<Replicated> {
    if reps == 0 {
        return Err(domain("at least one replication is required"));
    }
    let results = (0..reps as u64)
        .map(|rep| simulate(config, options, master_seed, rep))
        .collect::<Result<Vec<_>>>()?;
    Replicated::from_results(results)
}
