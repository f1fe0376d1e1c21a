use rand::Rng;
use serde::Serialize;

use super::rng::{seek_slot, substream, Substream};
use super::{PredictorKind, Scenario, ScenarioConfig};
use crate::allocation::{min_allocation, oracle_table, static_baseline, StaticMode};
use crate::error::Result;
use crate::service::{kpis_from_bitmap, FailureKpis};

/// One measured slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotRecord {
    pub slot: u64,
    /// Interference state the transmission experienced.
    pub state: usize,
    /// Entropy (nats) of the belief the allocation was based on; 0 for
    /// prediction-free policies.
    pub belief_entropy: f64,
    pub n: u32,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub kind: PredictorKind,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replication: Option<u64>,
    pub slots: u64,
    pub warmup_slots: u64,
    pub measured_slots: u64,
    pub target_outage: f64,
    /// Fraction of measured slots whose transmission failed.
    pub achieved_outage: f64,
    pub mean_allocation: f64,
    /// Mean allocation an oracle would have used on the same realization.
    pub oracle_mean_allocation: f64,
    pub overhead_vs_oracle: f64,
    pub saturation_count: u64,
    pub failure_kpis: FailureKpis,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slots_csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub summary: SummaryReport,
    pub records: Vec<SlotRecord>,
}

/// Runs the configured predictor and keeps the per-slot records.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunOutcome> {
    let scenario = config.validate()?;
    run_with_kind(&scenario, config.predictor.kind, true)
}

/// Slot loop for one policy.
///
/// Each slot: the policy picks `n` for the upcoming slot from what it knows
/// now, the chain steps, the transmission is attempted over `n` faded
/// branches, and the policy observes the new state. Warmup slots only
/// advance the chain and feed observations.
pub fn run_with_kind(scenario: &Scenario, kind: PredictorKind, keep_records: bool) -> Result<RunOutcome> {
    let cfg = &scenario.config;
    let chain = &scenario.chain;
    let link = &scenario.link;
    let powers = chain.powers();
    let target = cfg.target_outage;

    let oracle = oracle_table(link, chain, target, cfg.n_max)?;
    let constant = match kind {
        PredictorKind::WorstState => Some(static_baseline(link, chain, target, StaticMode::WorstState, cfg.n_max)?[0]),
        PredictorKind::Fixed => Some(
            static_baseline(link, chain, target, StaticMode::FixedN(cfg.predictor.fixed_n.unwrap_or(0)), cfg.n_max)?[0],
        ),
        _ => None,
    };
    let stride = u64::from((2 * cfg.n_max).max(cfg.predictor.fixed_n.unwrap_or(0)));

    let mut chain_rng = substream(cfg.seed, Substream::Chain);
    let mut fading_rng = substream(cfg.seed, Substream::Fading);
    let mut predictor = scenario.build_predictor(kind)?;

    let measured = cfg.slots - cfg.warmup_slots;
    let mut records = Vec::with_capacity(if keep_records { measured as usize } else { 0 });
    let mut failures = Vec::with_capacity(measured as usize);
    let mut total_n: u64 = 0;
    let mut oracle_total: u64 = 0;
    let mut saturations: u64 = 0;

    let mut state = cfg.initial_state;
    if let Some(p) = predictor.as_mut() {
        p.update(state, powers[state]);
    }

    for slot in 0..cfg.slots {
        let next = chain.step(state, &mut chain_rng)?;

        if slot >= cfg.warmup_slots {
            let (n, saturated, entropy) = match (kind, predictor.as_ref()) {
                (PredictorKind::Oracle, Some(p)) => {
                    let pred = p.predict(state, Some(next))?;
                    let d = oracle[next];
                    (d.n, d.saturated, pred.belief.entropy())
                }
                (PredictorKind::Markov | PredictorKind::Average, Some(p)) => {
                    let pred = p.predict(state, None)?;
                    let d = min_allocation(link, &pred.belief, target, cfg.n_max)?;
                    (d.n, d.saturated, pred.belief.entropy())
                }
                (PredictorKind::Diversity, _) => (2 * oracle[next].n, oracle[next].saturated, 0.0),
                (_, _) => (constant.expect("static policy has a constant allocation"), false, 0.0),
            };

            seek_slot(&mut fading_rng, slot, stride);
            let interference = powers[next];
            let success = (0..n).any(|_| {
                let u: f64 = fading_rng.gen();
                let gain = -(1.0 - u).ln();
                link.unit_succeeds(interference, gain)
            });

            total_n += u64::from(n);
            oracle_total += u64::from(oracle[next].n);
            saturations += u64::from(saturated);
            failures.push(!success);
            if keep_records {
                records.push(SlotRecord { slot, state: next, belief_entropy: entropy, n, success });
            }
        }

        if let Some(p) = predictor.as_mut() {
            p.update(next, powers[next]);
        }
        state = next;
    }

    let failed = failures.iter().filter(|&&f| f).count();
    let mean_allocation = total_n as f64 / measured as f64;
    let oracle_mean_allocation = oracle_total as f64 / measured as f64;
    let summary = SummaryReport {
        kind,
        seed: cfg.seed,
        replication: None,
        slots: cfg.slots,
        warmup_slots: cfg.warmup_slots,
        measured_slots: measured,
        target_outage: target,
        achieved_outage: failed as f64 / measured as f64,
        mean_allocation,
        oracle_mean_allocation,
        overhead_vs_oracle: mean_allocation / oracle_mean_allocation - 1.0,
        saturation_count: saturations,
        failure_kpis: kpis_from_bitmap(&failures, cfg.survival_time)?,
        slots_csv: None,
    };
    Ok(RunOutcome { summary, records })
}
