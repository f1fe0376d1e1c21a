use rayon::prelude::*;

use super::rng::replication_seed;
use super::sim::{run_with_kind, SummaryReport};
use super::{PredictorKind, Scenario, ScenarioConfig};
use crate::error::Result;

fn jobs(kinds: &[PredictorKind], replications: u64) -> Vec<(PredictorKind, u64)> {
    kinds.iter().flat_map(|&k| (0..replications).map(move |r| (k, r))).collect()
}

fn run_job(base: &Scenario, kind: PredictorKind, replication: u64) -> Result<SummaryReport> {
    let mut scenario = base.clone();
    scenario.config.seed = replication_seed(base.config.seed, replication);
    let mut summary = run_with_kind(&scenario, kind, false)?.summary;
    summary.replication = Some(replication);
    Ok(summary)
}

/// Every (kind, replication) pair, run in parallel; rows ordered by kind as
/// listed, then replication.
pub fn run_sweep(config: &ScenarioConfig, kinds: &[PredictorKind], replications: u64) -> Result<Vec<SummaryReport>> {
    let base = config.validate()?;
    jobs(kinds, replications).into_par_iter().map(|(kind, r)| run_job(&base, kind, r)).collect()
}

/// Same table as [`run_sweep`], computed on the calling thread.
pub fn run_sweep_serial(
    config: &ScenarioConfig,
    kinds: &[PredictorKind],
    replications: u64,
) -> Result<Vec<SummaryReport>> {
    let base = config.validate()?;
    jobs(kinds, replications).into_iter().map(|(kind, r)| run_job(&base, kind, r)).collect()
}
