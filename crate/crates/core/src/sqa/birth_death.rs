//! Equilibrium of a single birth-death queue with state-dependent arrivals.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::profile::{RateProfile, Tail};

/// Never build more states than this.
pub const MAX_STATES: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BirthDeathSolution {
    pub pi: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    /// Long-run arrival rate `sum_n lambda(n) pi(n)`.
    pub lambda_bar: f64,
    /// Mass beyond the last state, relative to the retained mass.
    pub tail_mass: f64,
}

/// For each phase `o` of a periodic tail, the exact sum
/// `sum_{j >= 1} prod_{k < j} p[(o + k) % L] / mu`, i.e. the tail mass after
/// a state in phase `o` relative to that state's weight.
fn periodic_tail_factors(period: &[f64], mu: f64) -> Result<Vec<f64>> {
    let l = period.len();
    let per: f64 = period.iter().map(|p| p / mu).product();
    if !(per < 1.0) {
        return Err(Error::Divergent(per));
    }
    Ok((0..l)
        .map(|o| {
            let mut w = 1.0;
            let mut sum = 0.0;
            for k in 0..l {
                w *= period[(o + k) % l] / mu;
                sum += w;
            }
            sum / (1.0 - per)
        })
        .collect())
}

/// Solves `pi(n) ∝ prod_{k<n} lambda(k) / mu`.
///
/// The series stops once the mass beyond the current state, computed exactly
/// from the profile's tail, drops below `tol` times the retained mass, or at
/// the first state without a rate (an unobserved state ends the chain).
pub fn birth_death_solve(profile: &RateProfile, mu: f64, tol: f64) -> Result<BirthDeathSolution> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(domain("service rate must be positive"));
    }
    if !(tol > 0.0) {
        return Err(domain("tolerance must be positive"));
    }
    let tail_factor: Vec<f64> = match &profile.tail {
        Tail::Zero | Tail::Unknown => vec![0.0],
        Tail::Constant(c) => {
            let q = c / mu;
            if !(q < 1.0) {
                return Err(Error::Divergent(q));
            }
            vec![q / (1.0 - q)]
        }
        Tail::Periodic(p) if p.is_empty() => vec![0.0],
        Tail::Periodic(p) => periodic_tail_factors(p, mu)?,
    };
    let listed = profile.len();
    let mut weights = vec![1.0];
    let mut total = 1.0;
    let mut tail_mass = 0.0;
    let mut w = 1.0;
    for n in 0..MAX_STATES - 1 {
        if n >= listed {
            // Past the explicit values, weight(n) times the tail factor is the
            // exact mass of states above n.
            let rest = w * tail_factor[n % tail_factor.len()];
            if rest <= tol * total {
                tail_mass = rest / total;
                break;
            }
        }
        let rate = match profile.rate(n) {
            Some(r) if r < 0.0 || !r.is_finite() => {
                return Err(domain("arrival rates must be finite and non-negative"))
            }
            Some(r) if r > 0.0 => r,
            _ => break,
        };
        w *= rate / mu;
        if w == 0.0 {
            break;
        }
        weights.push(w);
        total += w;
    }
    let pi: Vec<f64> = weights.iter().map(|v| v / total).collect();
    let mut mean = 0.0;
    let mut second = 0.0;
    let mut lambda_bar = 0.0;
    for (n, p) in pi.iter().enumerate() {
        let nf = n as f64;
        mean += nf * p;
        second += nf * nf * p;
        lambda_bar += profile.rate(n).unwrap_or(0.0) * p;
    }
    Ok(BirthDeathSolution {
        pi,
        mean,
        std: (second - mean * mean).max(0.0).sqrt(),
        lambda_bar,
        tail_mass,
    })
}
