//! Single queue approximation: each server is replaced by a birth-death
//! queue driven by its conditional arrival rates `lambda_i(n)`.
//!
//! The rates combine exact limits for large `n` ([`spectral`]) with
//! regression fits for small `n` ([`approx`]).

pub mod approx;
pub mod birth_death;
pub mod pipeline;
pub mod spectral;

pub use approx::{
    approx_profile_server1, approx_profile_server2, approx_rate_server1, approx_rate_server2, fit_range_warning,
    FitRangeWarning, N1,
};
pub use birth_death::{birth_death_solve, BirthDeathSolution};
pub use pipeline::{rel_diff, sqa, sqa_pipeline, ServerSqa, SqaResult};
pub use spectral::{
    f_func, g_pm, ineg_ratio, inner_root_neg, inner_roots_pos, ipos_ratio, limiting_rates, solve_coefficients,
    LimitingRates, SpectralData,
};
