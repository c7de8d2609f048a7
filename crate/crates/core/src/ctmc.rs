//! Exact equilibrium of the two-server Markovian system on a truncated grid.
//!
//! States `(q1, q2)` live in `[0, k1] x [0, k2]`. Arrivals that would leave
//! the grid are dropped. Both marginals decay geometrically with ratio
//! `alpha = rho^(1+s)`, server 2 once per `s` states, so the default grid is
//! rectangular with `k2 ≈ s k1`.
//!
//! The stationary vector is computed by subtraction-free (GTH) Gaussian
//! elimination on the banded generator. It is accurate to a few ulps
//! *relative to each entry*, so conditional rates remain meaningful for
//! states with probabilities far below machine epsilon.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::jobsize::JobSizeDistribution;
use crate::model::{Router, SystemConfig};
use crate::profile::{Provenance, RateProfile, Tail};

/// States whose marginal probability falls below this are reported absent.
pub const DEFAULT_MIN_MASS: f64 = 1e-14;
/// Adaptive truncation grows the grid until the boundary mass is below this.
pub const TAIL_TARGET: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Truncation {
    pub k1: usize,
    pub k2: usize,
}

impl Truncation {
    /// Grid sized from the decay rate: about `e^-30` mass beyond `k1`, at
    /// least `16 s` server-1 states, and a server-2 range covering the same
    /// number of periods.
    pub fn for_load(rho: f64, s: u32) -> Self {
        let su = s as usize;
        let decay = -(rho.powi(s as i32 + 1)).ln();
        let by_decay = if decay.is_finite() && decay > 0.0 {
            (30.0 / decay).ceil() as usize + 5
        } else {
            20
        };
        // Keep the far corner of the grid, of order alpha^(2 k1), above the
        // floating-point underflow threshold.
        let ceiling = if decay.is_finite() && decay > 0.0 {
            ((300.0 / decay) as usize).max(20)
        } else {
            usize::MAX
        };
        let k1 = by_decay.max(20).max((16 * su).min(ceiling));
        Truncation { k1, k2: su * k1 + su }
    }

    pub fn doubled(self) -> Self {
        Truncation {
            k1: 2 * self.k1,
            k2: 2 * self.k2,
        }
    }

    pub fn states(self) -> usize {
        (self.k1 + 1) * (self.k2 + 1)
    }
}

/// The truncated generator of the `[1, s]` system with exponential sizes.
#[derive(Debug, Clone)]
pub struct TruncatedChain {
    pub s: u32,
    pub lambda: f64,
    pub truncation: Truncation,
    router: Router,
    tie_to_first: f64,
}

impl TruncatedChain {
    /// Number of grid states.
    pub fn len(&self) -> usize {
        self.truncation.states()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Linear index of `(q1, q2)`; `q1` varies fastest.
    #[inline]
    pub fn index(&self, q1: usize, q2: usize) -> usize {
        q2 * (self.truncation.k1 + 1) + q1
    }

    /// Probability that an arrival in `(q1, q2)` joins server 1.
    #[inline]
    pub fn to_first(&self, q1: usize, q2: usize) -> f64 {
        match self.router.compare(0, q1 as u64, 1, q2 as u64) {
            Ordering::Less => 1.0,
            Ordering::Greater => 0.0,
            Ordering::Equal => self.tie_to_first,
        }
    }

    /// Arrival rates `(to server 1, to server 2)` in the truncated chain:
    /// zero where the routed server is at its truncation level.
    #[inline]
    pub fn up_rates(&self, q1: usize, q2: usize) -> (f64, f64) {
        let p = self.to_first(q1, q2);
        let a1 = if q1 < self.truncation.k1 { self.lambda * p } else { 0.0 };
        let a2 = if q2 < self.truncation.k2 {
            self.lambda * (1.0 - p)
        } else {
            0.0
        };
        (a1, a2)
    }

    /// Arrival rate lost at `(q1, q2)` because the grid ends there.
    pub fn dropped_rate(&self, q1: usize, q2: usize) -> f64 {
        let (a1, a2) = self.up_rates(q1, q2);
        self.lambda - a1 - a2
    }

    /// Off-diagonal transitions out of `(q1, q2)` as `((q1', q2'), rate)`.
    pub fn transitions(&self, q1: usize, q2: usize) -> Vec<((usize, usize), f64)> {
        let (a1, a2) = self.up_rates(q1, q2);
        let mut out = Vec::with_capacity(4);
        if a1 > 0.0 {
            out.push(((q1 + 1, q2), a1));
        }
        if a2 > 0.0 {
            out.push(((q1, q2 + 1), a2));
        }
        if q1 > 0 {
            out.push(((q1 - 1, q2), 1.0));
        }
        if q2 > 0 {
            out.push(((q1, q2 - 1), f64::from(self.s)));
        }
        out
    }

    /// All generator entries `(from, to, rate)` including the diagonal.
    pub fn generator_entries(&self) -> Vec<(usize, usize, f64)> {
        let t = self.truncation;
        let mut out = Vec::with_capacity(5 * self.len());
        for q2 in 0..=t.k2 {
            for q1 in 0..=t.k1 {
                let from = self.index(q1, q2);
                let mut total = 0.0;
                for ((a, b), r) in self.transitions(q1, q2) {
                    out.push((from, self.index(a, b), r));
                    total += r;
                }
                out.push((from, from, -total));
            }
        }
        out
    }
}

/// Builds the truncated chain for a canonical `[1, s]` exponential system.
pub fn build_generator(config: &SystemConfig, truncation: Truncation) -> Result<TruncatedChain> {
    config.validate()?;
    let s = config
        .integer_s()
        .ok_or_else(|| domain("the Markov chain needs rates [1, s] with integer s"))?;
    if !matches!(config.jobsize, JobSizeDistribution::Exponential { rate } if rate == 1.0) {
        return Err(domain("the Markov chain needs unit-mean exponential job sizes"));
    }
    if truncation.k1 < 2 || truncation.k2 < 2 * s as usize {
        return Err(domain(format!(
            "truncation ({}, {}) too small: need k1 >= 2 and k2 >= 2s = {}",
            truncation.k1,
            truncation.k2,
            2 * s
        )));
    }
    let chain = TruncatedChain {
        s,
        lambda: config.lambda,
        truncation,
        router: config.router(),
        tie_to_first: config.tie_to_first(),
    };
    debug_assert!(chain.generator_entries().iter().all(|&(i, j, r)| i == j || r >= 0.0));
    Ok(chain)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JointDistribution {
    pub truncation: Truncation,
    /// `pi[q2 * (k1 + 1) + q1]`.
    pub pi: Vec<f64>,
    /// Probability of the outer band: `q1 = k1` or `q2` in the last period.
    pub tail_mass: f64,
    /// `max_j |(pi Q)_j|`.
    pub residual: f64,
}

impl JointDistribution {
    pub fn get(&self, q1: usize, q2: usize) -> f64 {
        self.pi[q2 * (self.truncation.k1 + 1) + q1]
    }

    /// `(q1, q2, probability)` triples in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let w = self.truncation.k1 + 1;
        self.pi.iter().enumerate().map(move |(i, &p)| (i % w, i / w, p))
    }

    /// Marginal of server 1 (`server = 0`) or server 2 (`server = 1`).
    pub fn marginal(&self, server: usize) -> Vec<f64> {
        let t = self.truncation;
        let mut m = vec![0.0; if server == 0 { t.k1 + 1 } else { t.k2 + 1 }];
        for (q1, q2, p) in self.iter() {
            m[if server == 0 { q1 } else { q2 }] += p;
        }
        m
    }
}

/// Banded matrix holding entries with `|i - j| <= b`.
struct Band {
    b: usize,
    w: usize,
    data: Vec<f64>,
}

impl Band {
    fn new(n: usize, b: usize) -> Self {
        let w = 2 * b + 1;
        Band {
            b,
            w,
            data: vec![0.0; n * w],
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        i * self.w + j + self.b - i
    }
}

/// Stationary distribution by GTH elimination.
pub fn solve_stationary(chain: &TruncatedChain) -> Result<JointDistribution> {
    let t = chain.truncation;
    let n = chain.len();
    let b = t.k1 + 1;
    let mut m = Band::new(n, b);
    for q2 in 0..=t.k2 {
        for q1 in 0..=t.k1 {
            let from = chain.index(q1, q2);
            for ((a, c), r) in chain.transitions(q1, q2) {
                let k = m.at(from, chain.index(a, c));
                m.data[k] += r;
            }
        }
    }
    // Eliminate states from the top down, folding each state's outflow into
    // the remaining ones. `pivot[k]` is k's outflow to lower states.
    let mut pivot = vec![0.0; n];
    for k in (1..n).rev() {
        let lo = k.saturating_sub(b);
        let s: f64 = (lo..k).map(|j| m.data[m.at(k, j)]).sum();
        if !(s > 0.0) {
            return Err(Error::Numerical(format!("state {k} has no path towards the origin")));
        }
        pivot[k] = s;
        for i in lo..k {
            let f = m.data[m.at(i, k)];
            if f == 0.0 {
                continue;
            }
            let f = f / s;
            let row_k = m.at(k, 0);
            for j in lo..k {
                if j == i {
                    continue;
                }
                let v = m.data[row_k.wrapping_add(j)];
                if v != 0.0 {
                    let idx = m.at(i, j);
                    m.data[idx] += f * v;
                }
            }
        }
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for k in 1..n {
        let lo = k.saturating_sub(b);
        let inflow: f64 = (lo..k).map(|i| pi[i] * m.data[m.at(i, k)]).sum();
        pi[k] = inflow / pivot[k];
    }
    let total: f64 = pi.iter().sum();
    for p in pi.iter_mut() {
        *p /= total;
    }
    drop(m);

    let s = chain.s as usize;
    let mut tail_mass = 0.0;
    let mut flow = vec![0.0; n];
    for q2 in 0..=t.k2 {
        for q1 in 0..=t.k1 {
            let i = chain.index(q1, q2);
            if q1 == t.k1 || q2 + s > t.k2 {
                tail_mass += pi[i];
            }
            let mut out = 0.0;
            for ((a, c), r) in chain.transitions(q1, q2) {
                flow[chain.index(a, c)] += pi[i] * r;
                out += r;
            }
            flow[i] -= pi[i] * out;
        }
    }
    let residual = flow.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(JointDistribution {
        truncation: t,
        pi,
        tail_mass,
        residual,
    })
}

/// Conditional arrival rates `lambda_i(n)` of both servers, from the
/// probability flows of the truncated chain. States with marginal mass below
/// `min_mass` are absent.
pub fn oracle_conditional_rates(dist: &JointDistribution, chain: &TruncatedChain, min_mass: f64) -> [RateProfile; 2] {
    let t = dist.truncation;
    let mut flow1 = vec![0.0; t.k1 + 1];
    let mut flow2 = vec![0.0; t.k2 + 1];
    for (q1, q2, p) in dist.iter() {
        let (a1, a2) = chain.up_rates(q1, q2);
        flow1[q1] += p * a1;
        flow2[q2] += p * a2;
    }
    let profile = |flow: Vec<f64>, marg: Vec<f64>| {
        let values = flow
            .iter()
            .zip(&marg)
            .map(|(f, m)| (*m >= min_mass && *m > 0.0).then(|| f / m))
            .collect();
        RateProfile::new(Provenance::Oracle, values, Tail::Zero)
    };
    [profile(flow1, dist.marginal(0)), profile(flow2, dist.marginal(1))]
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Marginal {
    pub pi: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    /// Long-run arrival rate to the server.
    pub lambda_bar: f64,
}

pub fn oracle_marginals(dist: &JointDistribution, chain: &TruncatedChain) -> [Marginal; 2] {
    let mut lbar = [0.0; 2];
    for (q1, q2, p) in dist.iter() {
        let (a1, a2) = chain.up_rates(q1, q2);
        lbar[0] += p * a1;
        lbar[1] += p * a2;
    }
    let make = |pi: Vec<f64>, lambda_bar: f64| {
        let mean: f64 = pi.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        let second: f64 = pi.iter().enumerate().map(|(n, p)| (n * n) as f64 * p).sum();
        Marginal {
            std: (second - mean * mean).max(0.0).sqrt(),
            mean,
            pi,
            lambda_bar,
        }
    };
    [make(dist.marginal(0), lbar[0]), make(dist.marginal(1), lbar[1])]
}

/// A solved chain with its derived quantities.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub chain: TruncatedChain,
    pub dist: JointDistribution,
    pub rates: [RateProfile; 2],
    pub marginals: [Marginal; 2],
}

/// Builds and solves the chain, doubling the grid (at most `max_doublings`
/// times) until the boundary band carries less than [`TAIL_TARGET`].
pub fn oracle(config: &SystemConfig, truncation: Option<Truncation>, min_mass: f64) -> Result<OracleSolution> {
    let s = config
        .integer_s()
        .ok_or_else(|| domain("the Markov chain needs rates [1, s] with integer s"))?;
    let mut t = truncation.unwrap_or_else(|| Truncation::for_load(config.load(), s));
    let max_doublings = 3;
    for attempt in 0..=max_doublings {
        let chain = build_generator(config, t)?;
        let dist = solve_stationary(&chain)?;
        if dist.tail_mass < TAIL_TARGET || attempt == max_doublings || truncation.is_some() {
            let rates = oracle_conditional_rates(&dist, &chain, min_mass);
            let marginals = oracle_marginals(&dist, &chain);
            return Ok(OracleSolution {
                chain,
                dist,
                rates,
                marginals,
            });
        }
        t = t.doubled();
    }
    unreachable!("the last attempt always returns")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jobsize::JobSizeDistribution;

    fn cfg(s: u32, rho: f64) -> SystemConfig {
        SystemConfig::two_server(s, rho, JobSizeDistribution::exponential()).unwrap()
    }

    #[test]
    fn generator_structure() {
        let t = Truncation { k1: 6, k2: 20 };
        let c = build_generator(&cfg(4, 0.7), t).unwrap();
        assert_eq!(c.up_rates(0, 0), (0.0, 3.5));
        assert_eq!(c.up_rates(0, 3), (1.75, 1.75));
        let c2 = build_generator(&cfg(2, 0.5), t).unwrap();
        assert_eq!(c2.transitions(1, 0).iter().filter(|(_, r)| *r == 1.0).count(), 1);
        assert!(!c2.transitions(1, 0).iter().any(|((a, b), _)| *a == 1 && *b == 0));
        let mut rows = vec![0.0; c.len()];
        for (i, j, r) in c.generator_entries() {
            rows[i] += r;
            assert!(i == j || r >= 0.0);
        }
        assert!(rows.iter().all(|v| v.abs() < 1e-12));
        assert!(c.dropped_rate(6, 20) > 0.0);
    }

    #[test]
    fn rejects_small_or_unsupported() {
        assert!(build_generator(&cfg(4, 0.5), Truncation { k1: 10, k2: 7 }).is_err());
        assert!(build_generator(&cfg(1, 0.5), Truncation { k1: 1, k2: 10 }).is_err());
        let weib = SystemConfig::two_server(2, 0.5, JobSizeDistribution::named(crate::DistributionName::Weib)).unwrap();
        assert!(build_generator(&weib, Truncation { k1: 10, k2: 30 }).is_err());
    }

    /// Dense Gaussian elimination on the transposed generator, as reference.
    fn dense_stationary(c: &TruncatedChain) -> Vec<f64> {
        let n = c.len();
        let mut a = vec![vec![0.0; n + 1]; n];
        for (i, j, r) in c.generator_entries() {
            a[j][i] += r;
        }
        for j in 0..n {
            a[0][j] = 1.0;
        }
        a[0][n] = 1.0;
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
                .unwrap();
            a.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    if f != 0.0 {
                        for k in col..=n {
                            a[r][k] -= f * a[col][k];
                        }
                    }
                }
            }
        }
        (0..n).map(|i| a[i][n] / a[i][i]).collect()
    }

    #[test]
    fn gth_matches_dense_solve() {
        for (s, rho) in [(1, 0.6), (2, 0.8), (3, 0.5)] {
            let c = build_generator(
                &cfg(s, rho),
                Truncation {
                    k1: 8,
                    k2: 8 * s as usize + 2,
                },
            )
            .unwrap();
            let d = solve_stationary(&c).unwrap();
            let r = dense_stationary(&c);
            for (x, y) in d.pi.iter().zip(&r) {
                assert!((x - y).abs() < 1e-12);
            }
            assert!(d.residual < 1e-12);
        }
    }

    #[test]
    fn empty_system_is_point_mass() {
        let cfg = SystemConfig::two_server(2, 0.0, JobSizeDistribution::exponential()).unwrap();
        let d = solve_stationary(&build_generator(&cfg, Truncation { k1: 5, k2: 12 }).unwrap()).unwrap();
        assert_eq!(d.get(0, 0), 1.0);
        assert_eq!(d.pi.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn symmetric_when_rates_equal() {
        let c = build_generator(&cfg(1, 0.9), Truncation { k1: 40, k2: 40 }).unwrap();
        let d = solve_stationary(&c).unwrap();
        for a in 0..=40 {
            for b in 0..=40 {
                let (x, y) = (d.get(a, b), d.get(b, a));
                assert!((x - y).abs() <= 1e-10 * x.max(y).max(1e-300));
            }
        }
        let m = oracle_marginals(&d, &c);
        assert!((m[0].lambda_bar - m[1].lambda_bar).abs() < 1e-10);
    }

    #[test]
    fn conditional_rates_and_conservation() {
        let sol = oracle(&cfg(4, 0.7), None, DEFAULT_MIN_MASS).unwrap();
        assert!(sol.dist.tail_mass < TAIL_TARGET);
        assert!(sol.dist.residual < 1e-12);
        for n in 0..=2 {
            assert!((sol.rates[1].rate(n).unwrap() - 3.5).abs() < 1e-12);
        }
        for n in 10..=14 {
            let r = sol.rates[0].rate(n).unwrap();
            assert!((r - 0.16807).abs() / 0.16807 < 0.01);
        }
        let [m1, m2] = &sol.marginals;
        assert!((m1.lambda_bar + m2.lambda_bar - 3.5).abs() < 1e-10);
        for (m, p) in [(m1, &sol.rates[0]), (m2, &sol.rates[1])] {
            let lb: f64 = m.pi.iter().enumerate().map(|(n, q)| p.rate(n).unwrap_or(0.0) * q).sum();
            assert!((lb - m.lambda_bar).abs() < 1e-10);
        }
    }

    #[test]
    fn doubling_the_grid_does_not_move_moments() {
        for (s, rho) in [(2, 0.7), (1, 0.9)] {
            let c = cfg(s, rho);
            let t = Truncation::for_load(rho, s);
            let a = oracle(&c, Some(t), DEFAULT_MIN_MASS).unwrap();
            let b = oracle(&c, Some(t.doubled()), DEFAULT_MIN_MASS).unwrap();
            for i in 0..2 {
                assert!((a.marginals[i].mean - b.marginals[i].mean).abs() < 1e-8);
            }
        }
        let m = oracle(&cfg(2, 0.7), None, DEFAULT_MIN_MASS).unwrap().marginals;
        assert!((m[0].mean - 0.92).abs() < 0.01);
    }
}
