//! Unit-mean job-size laws: uniform, exponential, Weibull and log-normal
//! with variances 1/3, 1, 5 and 10.

use alloc::string::ToString;
use core::fmt;
use core::str::FromStr;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};

/// Variance of the `weib` member of the family.
pub const WEIBULL_VARIANCE: f64 = 5.0;
/// Variance of the `logn` member of the family.
pub const LOGNORMAL_VARIANCE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DistributionName {
    Uni,
    Exp,
    Weib,
    Logn,
}

impl DistributionName {
    pub const ALL: [DistributionName; 4] = [Self::Uni, Self::Exp, Self::Weib, Self::Logn];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Uni => "uni",
            Self::Exp => "exp",
            Self::Weib => "weib",
            Self::Logn => "logn",
        }
    }
}

impl fmt::Display for DistributionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistributionName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uni" => Ok(Self::Uni),
            "exp" => Ok(Self::Exp),
            "weib" => Ok(Self::Weib),
            "logn" => Ok(Self::Logn),
            other => Err(Error::UnknownDistribution(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "serde_repr::Repr", into = "serde_repr::Repr"))]
pub enum JobSizeDistribution {
    Uniform {
        lo: f64,
        hi: f64,
    },
    Exponential {
        rate: f64,
    },
    Weibull {
        shape: f64,
        scale: f64,
    },
    /// `exp(mu + sqrt(sigma2) * Z)` with `Z` standard normal.
    LogNormal {
        mu: f64,
        sigma2: f64,
    },
}

pub fn make_distribution(name: DistributionName) -> JobSizeDistribution {
    match name {
        DistributionName::Uni => JobSizeDistribution::Uniform { lo: 0.0, hi: 2.0 },
        DistributionName::Exp => JobSizeDistribution::exponential(),
        DistributionName::Weib => {
            let shape = weibull_shape_for_scv(WEIBULL_VARIANCE);
            let scale = 1.0 / libm::tgamma(1.0 + 1.0 / shape);
            JobSizeDistribution::Weibull { shape, scale }
        }
        DistributionName::Logn => {
            let sigma2 = (1.0 + LOGNORMAL_VARIANCE).ln();
            JobSizeDistribution::LogNormal {
                mu: -sigma2 / 2.0,
                sigma2,
            }
        }
    }
}

/// Weibull shape `k` whose unit-mean member has variance `var`, i.e. the
/// root of `Gamma(1+2/k) / Gamma(1+1/k)^2 = 1 + var`. Bisection in log space
/// on a bracket where the ratio is monotone.
fn weibull_shape_for_scv(var: f64) -> f64 {
    let target = (1.0 + var).ln();
    let g = |k: f64| libm::lgamma(1.0 + 2.0 / k) - 2.0 * libm::lgamma(1.0 + 1.0 / k) - target;
    let (mut lo, mut hi) = (0.05, 50.0);
    // g decreases in k.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

impl JobSizeDistribution {
    pub fn exponential() -> Self {
        JobSizeDistribution::Exponential { rate: 1.0 }
    }

    pub fn named(name: DistributionName) -> Self {
        make_distribution(name)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Uniform { lo, hi } => lo >= 0.0 && hi > lo && hi.is_finite(),
            Self::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            Self::Weibull { shape, scale } => shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite(),
            Self::LogNormal { mu, sigma2 } => mu.is_finite() && sigma2 >= 0.0 && sigma2.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(domain("job-size distribution parameters out of range"))
        }
    }

    /// Closed-form `(mean, variance)`.
    pub fn moments(&self) -> (f64, f64) {
        match *self {
            Self::Uniform { lo, hi } => ((lo + hi) / 2.0, (hi - lo) * (hi - lo) / 12.0),
            Self::Exponential { rate } => (1.0 / rate, 1.0 / (rate * rate)),
            Self::Weibull { shape, scale } => {
                let g1 = libm::tgamma(1.0 + 1.0 / shape);
                let g2 = libm::tgamma(1.0 + 2.0 / shape);
                (scale * g1, scale * scale * (g2 - g1 * g1))
            }
            Self::LogNormal { mu, sigma2 } => {
                let mean = (mu + sigma2 / 2.0).exp();
                (mean, sigma2.exp_m1() * (2.0 * mu + sigma2).exp())
            }
        }
    }

    /// Inverse CDF for the families sampled by inversion; `None` for the
    /// log-normal, which is sampled from a normal draw instead.
    pub fn quantile(&self, u: f64) -> Option<f64> {
        match *self {
            Self::Uniform { lo, hi } => Some(lo + (hi - lo) * u),
            Self::Exponential { rate } => Some(-(-u).ln_1p() / rate),
            Self::Weibull { shape, scale } => Some(scale * (-(-u).ln_1p()).powf(1.0 / shape)),
            Self::LogNormal { .. } => None,
        }
    }

    /// One strictly positive draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::LogNormal { mu, sigma2 } => {
                let z: f64 = rng.sample(StandardNormal);
                (mu + sigma2.sqrt() * z).exp()
            }
            _ => loop {
                let u: f64 = rng.sample(Open01);
                let x = self.quantile(u).unwrap_or(0.0);
                if x > 0.0 {
                    return x;
                }
            },
        }
    }
}

#[cfg(feature = "serde")]
mod serde_repr {
    use super::{make_distribution, DistributionName, JobSizeDistribution};

    #[derive(serde::Serialize, serde::Deserialize)]
    #[serde(untagged)]
    pub enum Repr {
        Named { name: DistributionName },
        Full(Full),
    }

    #[derive(serde::Serialize, serde::Deserialize)]
    #[serde(rename_all = "lowercase")]
    pub enum Full {
        Uniform { lo: f64, hi: f64 },
        Exponential { rate: f64 },
        Weibull { shape: f64, scale: f64 },
        Lognormal { mu: f64, sigma2: f64 },
    }

    impl TryFrom<Repr> for JobSizeDistribution {
        type Error = crate::Error;

        fn try_from(r: Repr) -> crate::Result<Self> {
            let d = match r {
                Repr::Named { name } => make_distribution(name),
                Repr::Full(Full::Uniform { lo, hi }) => JobSizeDistribution::Uniform { lo, hi },
                Repr::Full(Full::Exponential { rate }) => JobSizeDistribution::Exponential { rate },
                Repr::Full(Full::Weibull { shape, scale }) => JobSizeDistribution::Weibull { shape, scale },
                Repr::Full(Full::Lognormal { mu, sigma2 }) => JobSizeDistribution::LogNormal { mu, sigma2 },
            };
            d.validate()?;
            Ok(d)
        }
    }

    impl From<JobSizeDistribution> for Repr {
        fn from(d: JobSizeDistribution) -> Repr {
            Repr::Full(match d {
                JobSizeDistribution::Uniform { lo, hi } => Full::Uniform { lo, hi },
                JobSizeDistribution::Exponential { rate } => Full::Exponential { rate },
                JobSizeDistribution::Weibull { shape, scale } => Full::Weibull { shape, scale },
                JobSizeDistribution::LogNormal { mu, sigma2 } => Full::Lognormal { mu, sigma2 },
            })
        }
    }
}
