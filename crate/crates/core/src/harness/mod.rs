//! Scenario configuration, the slot-loop simulator, sweeps and persistence.

mod output;
mod rng;
mod sim;
mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::allocation::DEFAULT_N_MAX;
use crate::channel::{LinkModel, MarkovChain};
use crate::error::{Error, Result};
use crate::prediction::{MarkovMle, MovingAverage, Predictor};

pub use output::{emit_plot_data, write_run_outputs, write_slot_csv, write_sweep_outputs, PLOT_HEADER, SLOT_HEADER};
pub use rng::{substream, Substream};
pub use sim::{run_scenario, run_with_kind, RunOutcome, SlotRecord, SummaryReport};
pub use sweep::{run_sweep, run_sweep_serial};

/// Allocation policy driven by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictorKind {
    /// Knows the next interference state.
    Oracle,
    /// Online maximum-likelihood transition estimate.
    Markov,
    /// Point belief on the mean of recent powers.
    Average,
    /// Always provisions for the highest-interference state.
    WorstState,
    /// Oracle allocation plus one redundant copy of every unit.
    Diversity,
    /// Constant `fixed_n` units.
    Fixed,
}

impl PredictorKind {
    pub const ALL: [PredictorKind; 6] = [
        PredictorKind::Oracle,
        PredictorKind::Markov,
        PredictorKind::Average,
        PredictorKind::WorstState,
        PredictorKind::Diversity,
        PredictorKind::Fixed,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PredictorKind::Oracle => "oracle",
            PredictorKind::Markov => "markov",
            PredictorKind::Average => "average",
            PredictorKind::WorstState => "worst_state",
            PredictorKind::Diversity => "diversity",
            PredictorKind::Fixed => "fixed",
        }
    }
}

impl fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PredictorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidInput(format!("unknown predictor kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    /// Linear interference powers, one per state.
    pub powers: Vec<f64>,
    pub transition: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub mean_signal: f64,
    pub noise: f64,
    pub sinr_threshold: f64,
}

fn default_smoothing() -> f64 {
    MarkovMle::DEFAULT_SMOOTHING
}

fn default_forgetting() -> f64 {
    MarkovMle::DEFAULT_FORGETTING
}

fn default_window() -> Option<usize> {
    Some(10)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictorSpec {
    pub kind: PredictorKind,
    /// Laplace pseudo-count for the Markov estimator.
    #[serde(default = "default_smoothing")]
    pub smoothing: f64,
    /// Count decay per observation for the Markov estimator.
    #[serde(default = "default_forgetting")]
    pub forgetting: f64,
    /// Moving-average window; `null` averages the whole history.
    #[serde(default = "default_window")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_n: Option<u32>,
}

impl PredictorSpec {
    pub fn new(kind: PredictorKind) -> Self {
        Self {
            kind,
            smoothing: default_smoothing(),
            forgetting: default_forgetting(),
            window: default_window(),
            fixed_n: None,
        }
    }

    pub fn with_kind(mut self, kind: PredictorKind) -> Self {
        self.kind = kind;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// Write the per-slot CSV alongside the summary.
    #[serde(default = "yes")]
    pub per_slot_csv: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, per_slot_csv: true }
    }
}

fn default_n_max() -> u32 {
    DEFAULT_N_MAX
}

fn default_survival() -> u32 {
    3
}

/// Everything a run needs, as read from the scenario JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub slots: u64,
    #[serde(default)]
    pub warmup_slots: u64,
    #[serde(default)]
    pub initial_state: usize,
    pub chain: ChainConfig,
    pub link: LinkConfig,
    pub target_outage: f64,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    pub predictor: PredictorSpec,
    /// Survival time (slots) used for the failure KPIs in the summary.
    #[serde(default = "default_survival")]
    pub survival_time: u32,
    #[serde(default)]
    pub output: OutputConfig,
}

/// A config whose invariants have been checked.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub chain: MarkovChain,
    pub link: LinkModel,
}

fn config_err(field: &str, reason: impl fmt::Display) -> Error {
    Error::Config { field: field.to_string(), reason: reason.to_string() }
}

impl ScenarioConfig {
    /// Reference scenario: three interference levels `[0, 2, 8]`, a sticky
    /// transition matrix, `S̄ = 10`, `N0 = 1`, `θ = 1`, 1% outage target.
    pub fn reference(kind: PredictorKind, seed: u64, slots: u64) -> Self {
        Self {
            seed,
            slots,
            warmup_slots: 10_000.min(slots.saturating_sub(1)),
            initial_state: 0,
            chain: ChainConfig {
                powers: vec![0.0, 2.0, 8.0],
                transition: vec![vec![0.90, 0.08, 0.02], vec![0.10, 0.80, 0.10], vec![0.05, 0.15, 0.80]],
            },
            link: LinkConfig { mean_signal: 10.0, noise: 1.0, sinr_threshold: 1.0 },
            target_outage: 0.01,
            n_max: DEFAULT_N_MAX,
            predictor: PredictorSpec::new(kind),
            survival_time: default_survival(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<Scenario> {
        if self.slots < 1 {
            return Err(config_err("slots", "must be >= 1"));
        }
        if self.warmup_slots >= self.slots {
            return Err(config_err("warmup_slots", "must be smaller than slots"));
        }
        let chain = MarkovChain::new(self.chain.powers.clone(), self.chain.transition.clone())
            .map_err(|e| config_err("chain", e))?;
        if self.initial_state >= chain.states() {
            return Err(config_err("initial_state", "out of range for the chain"));
        }
        let link = LinkModel::new(self.link.mean_signal, self.link.noise, self.link.sinr_threshold)
            .map_err(|e| config_err("link", e))?;
        if !(self.target_outage > 0.0 && self.target_outage < 1.0) {
            return Err(config_err("target_outage", "must lie in (0,1)"));
        }
        if self.n_max < 1 {
            return Err(config_err("n_max", "must be >= 1"));
        }
        if self.survival_time < 1 {
            return Err(config_err("survival_time", "must be >= 1"));
        }
        let p = &self.predictor;
        if !(p.smoothing.is_finite() && p.smoothing >= 0.0) {
            return Err(config_err("predictor.smoothing", "must be >= 0"));
        }
        if !(p.forgetting > 0.0 && p.forgetting <= 1.0) {
            return Err(config_err("predictor.forgetting", "must lie in (0,1]"));
        }
        if p.window == Some(0) {
            return Err(config_err("predictor.window", "must be >= 1"));
        }
        if p.kind == PredictorKind::Fixed && !matches!(p.fixed_n, Some(k) if k >= 1) {
            return Err(config_err("predictor.fixed_n", "fixed kind needs fixed_n >= 1"));
        }
        Ok(Scenario { config: self.clone(), chain, link })
    }
}

impl Scenario {
    /// Fresh predictor for the learning/oracle kinds; static kinds use none.
    pub(crate) fn build_predictor(&self, kind: PredictorKind) -> Result<Option<Predictor>> {
        let spec = &self.config.predictor;
        let powers = self.chain.powers().to_vec();
        Ok(match kind {
            PredictorKind::Oracle => Some(Predictor::Oracle { powers }),
            PredictorKind::Markov => Some(Predictor::Markov {
                mle: MarkovMle::new(self.chain.states(), spec.smoothing, spec.forgetting)?,
                powers,
            }),
            PredictorKind::Average => Some(Predictor::Average(match spec.window {
                Some(w) => MovingAverage::new(w)?,
                None => MovingAverage::unbounded(),
            })),
            PredictorKind::WorstState | PredictorKind::Diversity | PredictorKind::Fixed => None,
        })
    }
}
