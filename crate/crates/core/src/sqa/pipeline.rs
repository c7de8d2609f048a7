//! End-to-end single queue approximation of the two-server system.

use alloc::vec;
use alloc::vec::Vec;

use super::approx::{approx_profile_server1, approx_profile_server2, fit_range_warning, FitRangeWarning};
use super::birth_death::{birth_death_solve, BirthDeathSolution};
use super::spectral::SpectralData;
use crate::error::{domain, Result};
use crate::model::SystemConfig;
use crate::profile::RateProfile;

/// Truncation tolerance of the birth-death series.
pub const BD_TOL: f64 = 1e-12;

/// `(reference - value) / reference`.
pub fn rel_diff(reference: f64, value: f64) -> f64 {
    (reference - value) / reference
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ServerSqa {
    pub profile: RateProfile,
    pub solution: BirthDeathSolution,
}

impl ServerSqa {
    /// Relative differences of (mean, std) against reference values.
    pub fn diffs(&self, ref_mean: f64, ref_std: f64) -> (f64, f64) {
        (
            rel_diff(ref_mean, self.solution.mean),
            rel_diff(ref_std, self.solution.std),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SqaResult {
    pub s: u32,
    pub rho: f64,
    pub spectral: SpectralData,
    /// Server 0 (unit rate) then server 1 (rate `s`).
    pub servers: Vec<ServerSqa>,
    pub warnings: Vec<FitRangeWarning>,
}

/// The SQA at integer `s` and load `rho`.
pub fn sqa(rho: f64, s: u32) -> Result<SqaResult> {
    let spectral = SpectralData::new(rho, s)?;
    let lim = spectral.limiting_rates();
    let p1 = approx_profile_server1(rho, s);
    let p2 = approx_profile_server2(rho, s, &lim);
    let sol1 = birth_death_solve(&p1, 1.0, BD_TOL)?;
    let sol2 = birth_death_solve(&p2, f64::from(s), BD_TOL)?;
    Ok(SqaResult {
        s,
        rho,
        spectral,
        servers: vec![
            ServerSqa {
                profile: p1,
                solution: sol1,
            },
            ServerSqa {
                profile: p2,
                solution: sol2,
            },
        ],
        warnings: fit_range_warning(rho, s).into_iter().collect(),
    })
}

/// The SQA for a canonical `[1, s]` configuration. The job-size law and the
/// tie rule do not enter the approximation.
pub fn sqa_pipeline(config: &SystemConfig) -> Result<SqaResult> {
    config.validate()?;
    let s = config
        .integer_s()
        .ok_or_else(|| domain("the approximation needs rates [1, s] with integer s"))?;
    sqa(config.load(), s)
}
