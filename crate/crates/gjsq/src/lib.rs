//! File formats, parallel replication and the experiments behind the `gjsq`
//! command-line tool.

pub mod experiments;
pub mod io;
pub mod reference;
pub mod summary;

use gjsq_core::sim::{simulate, Replicated, SimOptions};
use gjsq_core::SystemConfig;
use rayon::prelude::*;

/// [`gjsq_core::sim::replicate`] with replications spread over the rayon
/// pool. Results are identical to the sequential version.
pub fn par_replicate(
    config: &SystemConfig,
    options: &SimOptions,
    reps: usize,
    master_seed: u64,
) -> gjsq_core::Result<Replicated> {
    if reps == 0 {
        return Err(gjsq_core::Error::Domain("at least one replication is required".into()));
    }
    let results = (0..reps as u64)
        .into_par_iter()
        .map(|rep| simulate(config, options, master_seed, rep))
        .collect::<gjsq_core::Result<Vec<_>>>()?;
    Replicated::from_results(results)
}
