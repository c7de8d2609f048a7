//! Two heterogeneous processor-sharing servers behind a generalized
//! join-the-shortest-queue (GJSQ) dispatcher.
//!
//! Three engines live here, all sharing [`model::SystemConfig`]:
//!
//! * [`sim`]: an event-driven simulator for any number of PS servers and any
//!   of the job-size laws in [`jobsize`];
//! * [`ctmc`]: an exact (truncated) solve of the two-server Markov chain with
//!   exponential job sizes, used as ground truth;
//! * [`sqa`]: the single queue approximation, built from exact limiting
//!   conditional arrival rates plus regression fits for small queue lengths.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose to reject NaN; index loops mirror the
// matrix algorithms they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod ctmc;
pub mod error;
pub mod jobsize;
pub mod linalg;
pub mod model;
pub mod profile;
pub mod sim;
pub mod sqa;

pub use error::{Error, Result};
pub use jobsize::{DistributionName, JobSizeDistribution};
pub use model::{gjsq_index, gjsq_route, load, RouteDecision, Router, SystemConfig};
pub use profile::{Provenance, RateProfile, Tail};

/// Complex scalar used throughout the spectral layer.
pub type Complex = num_complex::Complex<f64>;
