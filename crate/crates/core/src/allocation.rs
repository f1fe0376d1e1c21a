//! Preemptive resource allocation and SLA-staggered degradation.

use serde::{Deserialize, Serialize};

use crate::channel::{LinkModel, MarkovChain};
use crate::error::{invalid, Result};
use crate::prediction::Belief;
use crate::service::SlaTiers;

pub const DEFAULT_N_MAX: u32 = 64;

/// Resource count chosen for one slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AllocationDecision {
    pub n: u32,
    /// The target was unattainable within `n_max`; `n == n_max`.
    pub saturated: bool,
    pub expected_outage: f64,
}

fn check_target(target: f64, n_max: u32) -> Result<()> {
    if !(target > 0.0 && target < 1.0) {
        return Err(invalid(format!("outage target must lie in (0,1), got {target}")));
    }
    if n_max < 1 {
        return Err(invalid("n_max must be >= 1"));
    }
    Ok(())
}

/// Smallest `n` whose expected outage under `belief` is at most `target`.
pub fn min_allocation(link: &LinkModel, belief: &Belief, target: f64, n_max: u32) -> Result<AllocationDecision> {
    check_target(target, n_max)?;
    let mut last = 1.0;
    for n in 1..=n_max {
        let outage = link.expected_outage(belief.weights(), belief.powers(), n)?;
        if outage <= target {
            return Ok(AllocationDecision { n, saturated: false, expected_outage: outage });
        }
        last = outage;
    }
    Ok(AllocationDecision { n: n_max, saturated: true, expected_outage: last })
}

/// Allocation with perfect knowledge of each state, indexed by state.
pub fn oracle_table(link: &LinkModel, chain: &MarkovChain, target: f64, n_max: u32) -> Result<Vec<AllocationDecision>> {
    (0..chain.states()).map(|s| min_allocation(link, &Belief::one_hot(chain.powers(), s)?, target, n_max)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StaticMode {
    /// Always provision for the highest-interference state.
    WorstState,
    FixedN(u32),
}

/// Prediction-free allocation, indexed by state (constant across states).
pub fn static_baseline(
    link: &LinkModel,
    chain: &MarkovChain,
    target: f64,
    mode: StaticMode,
    n_max: u32,
) -> Result<Vec<u32>> {
    let n = match mode {
        StaticMode::WorstState => {
            let worst = Belief::one_hot(chain.powers(), chain.worst_state())?;
            min_allocation(link, &worst, target, n_max)?.n
        }
        StaticMode::FixedN(k) => {
            if k == 0 {
                return Err(invalid("fixed allocation must be >= 1"));
            }
            k
        }
    };
    Ok(vec![n; chain.states()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemLabel {
    Normal,
    Degraded,
    Emergency,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub label: SystemLabel,
    capacity_fraction: f64,
}

impl SystemState {
    pub fn new(label: SystemLabel, capacity_fraction: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&capacity_fraction) {
            return Err(invalid("capacity_fraction must lie in [0,1]"));
        }
        Ok(Self { label, capacity_fraction })
    }

    pub fn normal() -> Self {
        Self { label: SystemLabel::Normal, capacity_fraction: 1.0 }
    }

    pub fn capacity_fraction(&self) -> f64 {
        self.capacity_fraction
    }
}

/// Grants each tier its state-dependent demand in priority order until the
/// available capacity runs out. Returned in the order of `tiers`.
pub fn staggered_degrade(tiers: &SlaTiers, state: SystemState, nominal_capacity: f64) -> Vec<f64> {
    let mut remaining = (nominal_capacity * state.capacity_fraction).max(0.0);
    let mut grants = vec![0.0; tiers.as_slice().len()];
    for i in tiers.priority_order() {
        let tier = &tiers.as_slice()[i];
        let want = match state.label {
            SystemLabel::Normal => tier.demand,
            SystemLabel::Degraded | SystemLabel::Emergency => tier.degraded_demand,
        };
        let grant = want.min(remaining);
        grants[i] = grant;
        remaining -= grant;
    }
    grants
}
