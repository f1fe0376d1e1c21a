//! One-step-ahead interference predictors.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::channel::check_distribution;
use crate::error::{invalid, Error, Result};

/// Distribution over interference power levels.
///
/// Grid predictors put weights on the chain's state powers; the moving
/// average puts a point mass on an interpolated power.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    powers: Vec<f64>,
    weights: Vec<f64>,
}

impl Belief {
    pub fn new(powers: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if powers.len() != weights.len() {
            return Err(invalid("belief powers and weights differ in length"));
        }
        if powers.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(invalid("belief powers must be finite and >= 0"));
        }
        check_distribution(&weights)?;
        Ok(Self { powers, weights })
    }

    pub fn one_hot(powers: &[f64], state: usize) -> Result<Self> {
        if state >= powers.len() {
            return Err(invalid(format!("state {state} out of range")));
        }
        let mut weights = vec![0.0; powers.len()];
        weights[state] = 1.0;
        Self::new(powers.to_vec(), weights)
    }

    pub fn point(power: f64) -> Result<Self> {
        Self::new(vec![power], vec![1.0])
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        self.weights.iter().filter(|&&w| w > 0.0).fold(0.0, |acc, &w| acc - w * w.ln())
    }

    pub fn mean_power(&self) -> f64 {
        self.powers.iter().zip(&self.weights).map(|(p, w)| p * w).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionKind {
    Oracle,
    Markov,
    Average,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub belief: Belief,
    pub kind: PredictionKind,
}

/// Maximum-likelihood transition estimate from a state sequence with
/// Laplace pseudo-count `smoothing`. Rows without observations (and zero
/// smoothing) are uniform.
pub fn mle_estimate(sequence: &[usize], states: usize, smoothing: f64) -> Result<Vec<Vec<f64>>> {
    if sequence.len() < 2 {
        return Err(Error::InsufficientData("need at least two observed states".into()));
    }
    if states == 0 {
        return Err(invalid("state count must be >= 1"));
    }
    if !(smoothing.is_finite() && smoothing >= 0.0) {
        return Err(invalid("smoothing must be >= 0"));
    }
    if let Some(&bad) = sequence.iter().find(|&&s| s >= states) {
        return Err(invalid(format!("state {bad} out of range for {states} states")));
    }
    let mut counts = vec![vec![0.0; states]; states];
    for pair in sequence.windows(2) {
        counts[pair[0]][pair[1]] += 1.0;
    }
    Ok((0..states).map(|i| smoothed_row(&counts[i], smoothing)).collect())
}

fn smoothed_row(counts: &[f64], smoothing: f64) -> Vec<f64> {
    let k = counts.len();
    let total: f64 = counts.iter().sum::<f64>() + smoothing * k as f64;
    if total <= 0.0 {
        return vec![1.0 / k as f64; k];
    }
    counts.iter().map(|c| (c + smoothing) / total).collect()
}

/// Online transition-count estimator with exponential forgetting.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMle {
    counts: Vec<Vec<f64>>,
    smoothing: f64,
    forgetting: f64,
    last: Option<usize>,
}

impl MarkovMle {
    pub const DEFAULT_SMOOTHING: f64 = 1.0;
    pub const DEFAULT_FORGETTING: f64 = 1.0;

    pub fn new(states: usize, smoothing: f64, forgetting: f64) -> Result<Self> {
        if states == 0 {
            return Err(invalid("state count must be >= 1"));
        }
        if !(smoothing.is_finite() && smoothing >= 0.0) {
            return Err(invalid("smoothing must be >= 0"));
        }
        if !(forgetting > 0.0 && forgetting <= 1.0) {
            return Err(invalid("forgetting must lie in (0,1]"));
        }
        Ok(Self { counts: vec![vec![0.0; states]; states], smoothing, forgetting, last: None })
    }

    pub fn states(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<f64>] {
        &self.counts
    }

    /// Seeds the raw counts, e.g. to resume from a previous estimate.
    pub fn with_counts(mut self, counts: Vec<Vec<f64>>) -> Result<Self> {
        let k = self.states();
        if counts.len() != k || counts.iter().any(|r| r.len() != k || r.iter().any(|c| !(*c >= 0.0))) {
            return Err(invalid("counts must be a nonnegative KxK matrix"));
        }
        self.counts = counts;
        Ok(self)
    }

    pub fn last_state(&self) -> Option<usize> {
        self.last
    }

    /// Records a transition into `state` from the previously observed one.
    /// The first observation only sets the reference state.
    pub fn observe(&mut self, state: usize) {
        debug_assert!(state < self.states());
        if let Some(prev) = self.last {
            self.record(prev, state);
        }
        self.last = Some(state);
    }

    /// Decays every count by the forgetting factor, then counts `from → to`.
    pub fn record(&mut self, from: usize, to: usize) {
        if self.forgetting < 1.0 {
            let g = self.forgetting;
            self.counts.iter_mut().flatten().for_each(|c| *c *= g);
        }
        self.counts[from][to] += 1.0;
    }

    pub fn row(&self, state: usize) -> Vec<f64> {
        smoothed_row(&self.counts[state], self.smoothing)
    }

    pub fn estimate(&self) -> Vec<Vec<f64>> {
        (0..self.states()).map(|i| self.row(i)).collect()
    }
}

/// Sliding window over observed interference powers.
#[derive(Debug, Clone, PartialEq)]
pub struct MovingAverage {
    window: VecDeque<f64>,
    capacity: Option<usize>,
    running_sum: f64,
    seen: u64,
}

impl MovingAverage {
    pub fn new(window: usize) -> Result<Self> {
        if window == 0 {
            return Err(invalid("moving-average window must be >= 1"));
        }
        Ok(Self { window: VecDeque::with_capacity(window), capacity: Some(window), running_sum: 0.0, seen: 0 })
    }

    /// Averages over the full history.
    pub fn unbounded() -> Self {
        Self { window: VecDeque::new(), capacity: None, running_sum: 0.0, seen: 0 }
    }

    pub fn push(&mut self, power: f64) {
        self.seen += 1;
        match self.capacity {
            Some(w) => {
                if self.window.len() == w {
                    self.window.pop_front();
                }
                self.window.push_back(power);
            }
            None => self.running_sum += power,
        }
    }

    /// Stored history, oldest first. Empty for the unbounded variant.
    pub fn window(&self) -> Vec<f64> {
        self.window.iter().copied().collect()
    }

    pub fn mean(&self) -> Option<f64> {
        match self.capacity {
            Some(_) if self.window.is_empty() => None,
            Some(_) => Some(self.window.iter().sum::<f64>() / self.window.len() as f64),
            None if self.seen == 0 => None,
            None => Some(self.running_sum / self.seen as f64),
        }
    }
}

/// A predictor instance bound to one simulated link.
#[derive(Debug, Clone)]
pub enum Predictor {
    Oracle { powers: Vec<f64> },
    Markov { mle: MarkovMle, powers: Vec<f64> },
    Average(MovingAverage),
}

impl Predictor {
    pub fn kind(&self) -> PredictionKind {
        match self {
            Predictor::Oracle { .. } => PredictionKind::Oracle,
            Predictor::Markov { .. } => PredictionKind::Markov,
            Predictor::Average(_) => PredictionKind::Average,
        }
    }

    /// Feeds the observed state (and its power) after a slot.
    pub fn update(&mut self, state: usize, power: f64) {
        match self {
            Predictor::Oracle { .. } => {}
            Predictor::Markov { mle, .. } => mle.observe(state),
            Predictor::Average(avg) => avg.push(power),
        }
    }

    pub fn predict(&self, current: usize, true_next: Option<usize>) -> Result<Prediction> {
        let belief = match self {
            Predictor::Oracle { powers } => {
                let next = true_next.ok_or(Error::MissingOracleInput)?;
                Belief::one_hot(powers, next)?
            }
            Predictor::Markov { mle, powers } => {
                if current >= mle.states() {
                    return Err(invalid(format!("state {current} out of range")));
                }
                Belief::new(powers.clone(), mle.row(current))?
            }
            Predictor::Average(avg) => {
                let mean = avg
                    .mean()
                    .ok_or_else(|| Error::InsufficientData("moving average has no observations yet".into()))?;
                Belief::point(mean)?
            }
        };
        Ok(Prediction { belief, kind: self.kind() })
    }
}
