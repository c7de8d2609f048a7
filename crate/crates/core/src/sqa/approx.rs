//! Regression-fitted conditional arrival rates for small queue lengths,
//! spliced onto the exact limits.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::spectral::LimitingRates;
use crate::profile::{Provenance, RateProfile, Tail};

/// Server 1 uses fitted rates below this queue length.
pub const N1: usize = 3;

/// Largest `s` and smallest `rho` covered by the regression data.
const FIT_MAX_S: u32 = 4;
const FIT_MIN_RHO: f64 = 0.3;
const FIT_MAX_RHO: f64 = 0.99;

/// Inputs outside the range the regression coefficients were fitted on.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitRangeWarning {
    pub s: u32,
    pub rho: f64,
}

impl core::fmt::Display for FitRangeWarning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "s = {}, rho = {} lies outside the fitted range s <= {FIT_MAX_S}, {FIT_MIN_RHO} <= rho <= {FIT_MAX_RHO}; \
             boundary rates are extrapolated",
            self.s, self.rho
        )
    }
}

pub fn fit_range_warning(rho: f64, s: u32) -> Option<FitRangeWarning> {
    (s > FIT_MAX_S || !(FIT_MIN_RHO..=FIT_MAX_RHO).contains(&rho)).then_some(FitRangeWarning { s, rho })
}

fn dot(a: [f64; 5], b: [f64; 5]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Fitted `lambda_1(n)`; the limit `rho^(1+s)` from `n = 3` on.
///
/// Far outside the fitted range the regressions can turn negative; the rate
/// is then clamped to zero.
pub fn approx_rate_server1(n: usize, rho: f64, s: u32) -> f64 {
    let sf = f64::from(s);
    let a = rho.powi(s as i32 + 1);
    let rate = match n {
        0 => {
            a * dot(
                [sf * rho, sf, sf / rho, 1.0, rho * rho / (sf * sf)],
                [0.669, -1.90, 1.23, 1.86, -0.192],
            )
        }
        1 => {
            a * dot(
                [sf * rho * rho, 1.0, 1.0 / rho, 1.0 / (sf * rho), rho.powf(1.0 / sf)],
                [-0.00856, 1.37, -0.0578, 0.123, -0.254],
            )
        }
        2 => {
            a * (1.0
                + dot(
                    [
                        sf * rho,
                        1.0 / (sf * rho),
                        rho / (sf * sf),
                        1.0 / (sf * sf),
                        rho.powf(1.0 / sf),
                    ],
                    [-0.131, -0.820, -6.48, 10.4, 0.893],
                ) / 100.0)
        }
        _ => a,
    };
    rate.max(0.0)
}

/// Fitted `lambda_2(n)` given the limits `lam2_lim[r] = lim lambda_2(s m + r)`.
///
/// Below `s - 1` every arrival joins server 2; between `s - 1` and `2s - 1`
/// the limit of the same phase is inflated by a geometrically damped factor.
pub fn approx_rate_server2(n: usize, rho: f64, s: u32, lam2_lim: &[f64]) -> f64 {
    if s == 1 {
        return approx_rate_server1(n, rho, s);
    }
    let su = s as usize;
    let sf = f64::from(s);
    if n + 2 <= su {
        return rho * (1.0 + sf);
    }
    // The phase of n - s, with -1 wrapping to s - 1, is just n mod s.
    let lim = lam2_lim[n % su];
    if n < 2 * su {
        let damp = (1.0 / sf - rho / (2.0 * sf - 1.0)) / 2f64.powi((n + 1 - su) as i32);
        return (1.0 + damp) * lim;
    }
    lim
}

pub fn approx_profile_server1(rho: f64, s: u32) -> RateProfile {
    let values = (0..N1).map(|n| Some(approx_rate_server1(n, rho, s))).collect();
    RateProfile::new(
        Provenance::Approximation,
        values,
        Tail::Constant(rho.powi(s as i32 + 1)),
    )
}

/// Profile with fitted values below `2s` and the periodic limit beyond.
pub fn approx_profile_server2(rho: f64, s: u32, lim: &LimitingRates) -> RateProfile {
    if s == 1 {
        return approx_profile_server1(rho, s);
    }
    let values: Vec<Option<f64>> = (0..2 * s as usize)
        .map(|n| Some(approx_rate_server2(n, rho, s, &lim.lam2)))
        .collect();
    RateProfile::new(Provenance::Approximation, values, Tail::Periodic(lim.lam2.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sqa::spectral::limiting_rates;

    #[test]
    fn extrapolated_fit_is_never_negative() {
        // At s = 64 with a moderate arrival rate the n = 1 regression is negative.
        let rho = 2.5 / 65.0;
        assert_eq!(approx_rate_server1(1, rho, 64), 0.0);
        assert!(approx_rate_server1(1, 0.7, 4) > 0.0);
    }

    #[test]
    fn server1_published_forms() {
        assert!((approx_rate_server1(5, 0.7, 4) - 0.16807).abs() < 1e-12);
        let (rho, s) = (0.7f64, 2.0f64);
        let expect = rho.powi(3) * (0.669 * s * rho - 1.90 * s + 1.23 * s / rho + 1.86 - 0.192 * rho * rho / (s * s));
        assert!((approx_rate_server1(0, 0.7, 2) - expect).abs() < 1e-14);
        for n in 0..6 {
            assert!(approx_rate_server1(n, 1e-4, 2) < 1e-6);
        }
    }

    #[test]
    fn server2_branches() {
        let lim = limiting_rates(0.7, 4).unwrap();
        assert!((approx_rate_server2(0, 0.7, 4, &lim.lam2) - 3.5).abs() < 1e-12);
        assert!((approx_rate_server2(2, 0.7, 4, &lim.lam2) - 3.5).abs() < 1e-12);
        let f = 1.0 + (0.25 - 0.7 / 7.0);
        assert!((approx_rate_server2(3, 0.7, 4, &lim.lam2) - f * lim.lam2[3]).abs() < 1e-14);
        let f = 1.0 + (0.25 - 0.7 / 7.0) / 2.0;
        assert!((approx_rate_server2(4, 0.7, 4, &lim.lam2) - f * lim.lam2[0]).abs() < 1e-14);
        assert_eq!(approx_rate_server2(12, 0.7, 4, &lim.lam2), lim.lam2[0]);
        assert_eq!(approx_rate_server2(9, 0.3, 1, &[0.0]), approx_rate_server1(9, 0.3, 1));
    }

    #[test]
    fn profiles_splice_limits() {
        let lim = limiting_rates(0.9, 3).unwrap();
        let p2 = approx_profile_server2(0.9, 3, &lim);
        assert_eq!(p2.len(), 6);
        for n in 6..15 {
            assert_eq!(p2.rate(n), Some(lim.lam2[n % 3]));
        }
        let p1 = approx_profile_server1(0.9, 3);
        assert_eq!(p1.rate(40), Some(0.9f64.powi(4)));
    }

    #[test]
    fn warnings() {
        assert!(fit_range_warning(0.7, 4).is_none());
        assert!(fit_range_warning(0.2, 2).is_some());
        assert!(fit_range_warning(0.7, 5).is_some());
    }
}
