//! Shared system description, the GJSQ routing rule and load arithmetic.
//!
//! Server indices are 0-based throughout the crate: server 0 is the unit-rate
//! server and server 1 the rate-`s` server in the canonical two-server case.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::jobsize::JobSizeDistribution;

/// Absolute tolerance for index ties when rates are not all integers. It is
/// scaled up for indices larger than one.
const TIE_TOL: f64 = 1e-12;

/// Integer rates up to this bound are compared exactly in `u128`.
const MAX_EXACT_RATE: f64 = 1e15;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SystemConfig {
    /// Service rates, in work per unit time.
    pub rates: Vec<f64>,
    /// Poisson arrival rate. Zero is accepted as a degenerate empty system.
    pub lambda: f64,
    pub jobsize: JobSizeDistribution,
    /// Per-server tie weights, renormalized over the tied subset on a tie.
    /// Empty means uniform.
    #[cfg_attr(feature = "serde", serde(default))]
    pub tie_prob: Vec<f64>,
}

impl SystemConfig {
    pub fn new(rates: Vec<f64>, lambda: f64, jobsize: JobSizeDistribution) -> Result<Self> {
        let cfg = SystemConfig {
            rates,
            lambda,
            jobsize,
            tie_prob: Vec::new(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical two-server system with rates `[1, s]` at load `rho`.
    pub fn two_server(s: u32, rho: f64, jobsize: JobSizeDistribution) -> Result<Self> {
        if s == 0 {
            return Err(domain("s must be a positive integer"));
        }
        Self::new(vec![1.0, f64::from(s)], rho * (1.0 + f64::from(s)), jobsize)
    }

    pub fn with_tie_prob(mut self, tie_prob: Vec<f64>) -> Result<Self> {
        self.tie_prob = tie_prob;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rates.is_empty() {
            return Err(domain("at least one server is required"));
        }
        if self.rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(domain("service rates must be positive and finite"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(domain("arrival rate must be finite and non-negative"));
        }
        if !self.tie_prob.is_empty() {
            if self.tie_prob.len() != self.rates.len() {
                return Err(domain("tie_prob needs one weight per server"));
            }
            if self.tie_prob.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
                return Err(domain("tie weights must be positive"));
            }
            let total: f64 = self.tie_prob.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(domain("tie_prob must sum to 1"));
            }
        }
        let rho = self.load();
        if rho >= 1.0 {
            return Err(Error::Unstable(rho));
        }
        self.jobsize.validate()
    }

    pub fn load(&self) -> f64 {
        self.lambda / self.rates.iter().sum::<f64>()
    }

    pub fn servers(&self) -> usize {
        self.rates.len()
    }

    /// Returns `s` when the system is the canonical `[1, s]` pair with
    /// integer `s`, the setting of the analytic engines.
    pub fn integer_s(&self) -> Option<u32> {
        match self.rates[..] {
            [one, s] if one == 1.0 && s >= 1.0 && s.fract() == 0.0 && s <= f64::from(u32::MAX) => Some(s as u32),
            _ => None,
        }
    }

    /// Probability that a tie between servers 0 and 1 is resolved in favour
    /// of server 0 (two-server systems only).
    pub fn tie_to_first(&self) -> f64 {
        if self.tie_prob.len() == 2 {
            self.tie_prob[0] / (self.tie_prob[0] + self.tie_prob[1])
        } else {
            0.5
        }
    }

    pub fn router(&self) -> Router {
        Router::new(&self.rates, &self.tie_prob)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RouteDecision {
    Server(usize),
    /// Two or more servers share the smallest index.
    Tie(Vec<usize>),
}

/// The GJSQ index `(q + 1) / rate`.
pub fn gjsq_index(q: u64, rate: f64) -> Result<f64> {
    if !(rate > 0.0) {
        return Err(domain("service rate must be positive"));
    }
    Ok((q as f64 + 1.0) / rate)
}

pub fn gjsq_route(queue_lengths: &[u64], rates: &[f64]) -> Result<RouteDecision> {
    if queue_lengths.is_empty() || queue_lengths.len() != rates.len() {
        return Err(domain("queue lengths and rates must be non-empty and equally long"));
    }
    if rates.iter().any(|r| !(*r > 0.0)) {
        return Err(domain("service rate must be positive"));
    }
    Ok(Router::new(rates, &[]).decide(queue_lengths))
}

/// `lambda / sum(rates)`.
pub fn load(lambda: f64, rates: &[f64]) -> Result<f64> {
    if rates.is_empty() || rates.iter().any(|r| !(*r > 0.0)) {
        return Err(domain("rates must be non-empty and positive"));
    }
    Ok(lambda / rates.iter().sum::<f64>())
}

/// Precomputed routing state for repeated decisions on a fixed rate vector.
#[derive(Debug, Clone)]
pub struct Router {
    rates: Vec<f64>,
    integer_rates: Option<Vec<u128>>,
    weights: Vec<f64>,
}

impl Router {
    pub fn new(rates: &[f64], tie_weights: &[f64]) -> Self {
        let integer_rates = rates
            .iter()
            .map(|&r| (r.fract() == 0.0 && (1.0..=MAX_EXACT_RATE).contains(&r)).then_some(r as u128))
            .collect::<Option<Vec<_>>>();
        let weights = if tie_weights.len() == rates.len() {
            tie_weights.to_vec()
        } else {
            vec![1.0; rates.len()]
        };
        Router {
            rates: rates.to_vec(),
            integer_rates,
            weights,
        }
    }

    /// Orders the indices of servers `i` and `j` at queue lengths `qi`, `qj`.
    #[inline]
    pub fn compare(&self, i: usize, qi: u64, j: usize, qj: u64) -> Ordering {
        if let Some(r) = &self.integer_rates {
            // (qi+1)/ri vs (qj+1)/rj  <=>  (qi+1)*rj vs (qj+1)*ri
            let lhs = (u128::from(qi) + 1) * r[j];
            let rhs = (u128::from(qj) + 1) * r[i];
            return lhs.cmp(&rhs);
        }
        let a = (qi as f64 + 1.0) / self.rates[i];
        let b = (qj as f64 + 1.0) / self.rates[j];
        let tol = TIE_TOL * a.abs().max(b.abs()).max(1.0);
        if (a - b).abs() <= tol {
            Ordering::Equal
        } else if a < b {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    fn argmin(&self, q: &[u64]) -> usize {
        let mut best = 0;
        for i in 1..q.len() {
            if self.compare(i, q[i], best, q[best]) == Ordering::Less {
                best = i;
            }
        }
        best
    }

    pub fn decide(&self, q: &[u64]) -> RouteDecision {
        let best = self.argmin(q);
        let tied: Vec<usize> = (0..q.len())
            .filter(|&i| self.compare(i, q[i], best, q[best]) == Ordering::Equal)
            .collect();
        if tied.len() == 1 {
            RouteDecision::Server(best)
        } else {
            RouteDecision::Tie(tied)
        }
    }

    /// Routes without allocating; `u` in `[0, 1)` resolves ties.
    #[inline]
    pub fn pick(&self, q: &[u64], u: f64) -> usize {
        let best = self.argmin(q);
        let mut total = 0.0;
        let mut count = 0;
        for i in 0..q.len() {
            if self.compare(i, q[i], best, q[best]) == Ordering::Equal {
                total += self.weights[i];
                count += 1;
            }
        }
        if count == 1 {
            return best;
        }
        let mut acc = 0.0;
        let target = u * total;
        let mut last = best;
        for i in 0..q.len() {
            if self.compare(i, q[i], best, q[best]) == Ordering::Equal {
                acc += self.weights[i];
                last = i;
                if target < acc {
                    return i;
                }
            }
        }
        last
    }

    /// Whether the routing decision at `q` is a tie (cheap check).
    #[inline]
    pub fn is_tie(&self, q: &[u64]) -> bool {
        let best = self.argmin(q);
        (0..q.len())
            .filter(|&i| i != best)
            .any(|i| self.compare(i, q[i], best, q[best]) == Ordering::Equal)
    }
}
