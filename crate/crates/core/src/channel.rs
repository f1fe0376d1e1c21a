//! Markov-modulated interference and Rayleigh-fading outage.
//!
//! A link succeeds on one resource unit when the exponentially distributed
//! channel gain clears the SINR threshold, i.e. with probability
//! `exp(-θ (N0 + I) / S̄)`. With `n` independently faded units the link is in
//! outage only when all of them fail.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

const ROW_SUM_TOL: f64 = 1e-9;
const STATIONARY_RESIDUAL: f64 = 1e-10;

/// Discrete interference process: one power level per state and a
/// row-stochastic transition matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChain", into = "RawChain")]
pub struct MarkovChain {
    powers: Vec<f64>,
    transition: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChain {
    powers: Vec<f64>,
    transition: Vec<Vec<f64>>,
}

impl TryFrom<RawChain> for MarkovChain {
    type Error = Error;

    fn try_from(raw: RawChain) -> Result<Self> {
        MarkovChain::new(raw.powers, raw.transition)
    }
}

impl From<MarkovChain> for RawChain {
    fn from(c: MarkovChain) -> Self {
        RawChain { powers: c.powers, transition: c.transition }
    }
}

impl MarkovChain {
    pub fn new(powers: Vec<f64>, transition: Vec<Vec<f64>>) -> Result<Self> {
        let k = powers.len();
        if k == 0 {
            return Err(invalid("chain needs at least one state"));
        }
        if powers.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(invalid("interference powers must be finite and >= 0"));
        }
        if transition.len() != k || transition.iter().any(|row| row.len() != k) {
            return Err(invalid(format!("transition matrix must be {k}x{k}")));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(invalid(format!("transition row {i} has entries outside [0,1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(invalid(format!("transition row {i} sums to {sum}, not 1")));
            }
        }
        Ok(Self { powers, transition })
    }

    /// Single-state chain with constant interference.
    pub fn constant(power: f64) -> Result<Self> {
        Self::new(vec![power], vec![vec![1.0]])
    }

    pub fn states(&self) -> usize {
        self.powers.len()
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn row(&self, state: usize) -> Result<&[f64]> {
        self.transition
            .get(state)
            .map(Vec::as_slice)
            .ok_or_else(|| invalid(format!("state {state} out of range for {} states", self.states())))
    }

    /// Index of the state with the highest interference power (first on ties).
    pub fn worst_state(&self) -> usize {
        let mut worst = 0;
        for (i, &p) in self.powers.iter().enumerate() {
            if p > self.powers[worst] {
                worst = i;
            }
        }
        worst
    }

    /// Samples the successor of `state` from a single uniform draw.
    pub fn step<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> Result<usize> {
        let row = self.row(state)?;
        let u: f64 = rng.gen();
        Ok(sample_index(row, u))
    }

    /// Unique stationary distribution `π` with `πP = π`.
    ///
    /// Solved as a linear system and then checked by repeated squaring of `P`
    /// so that periodic chains (unique `π` but no limiting distribution) are
    /// rejected along with reducible ones.
    pub fn stationary(&self) -> Result<Vec<f64>> {
        let k = self.states();
        if k == 1 {
            return Ok(vec![1.0]);
        }
        let p = DMatrix::from_fn(k, k, |i, j| self.transition[i][j]);
        // (Pᵀ - I) π = 0 with the last equation replaced by Σπ = 1.
        let mut a = p.transpose() - DMatrix::identity(k, k);
        let mut b = nalgebra::DVector::zeros(k);
        for j in 0..k {
            a[(k - 1, j)] = 1.0;
        }
        b[k - 1] = 1.0;
        let lu = a.lu();
        let det = lu.determinant();
        if det.abs() < 1e-12 {
            return Err(Error::NonErgodic("stationary distribution is not unique".into()));
        }
        let pi = lu.solve(&b).ok_or_else(|| Error::NonErgodic("stationary system is singular".into()))?;
        let mut pi: Vec<f64> = pi.iter().map(|&x| x.max(0.0)).collect();
        normalize(&mut pi);

        // Aperiodicity: P^(2^m) must converge to rows equal to π.
        let mut power = p.clone();
        let mut mixed = false;
        for _ in 0..64 {
            let err = (0..k)
                .flat_map(|i| (0..k).map(move |j| (i, j)))
                .map(|(i, j)| (power[(i, j)] - pi[j]).abs())
                .fold(0.0, f64::max);
            if err < 1e-9 {
                mixed = true;
                break;
            }
            power = &power * &power;
        }
        if !mixed {
            return Err(Error::NonErgodic("chain does not converge to its fixed point (periodic)".into()));
        }

        // Polish the linear solution with a few power steps.
        for _ in 0..100 {
            let next = left_multiply(&pi, &self.transition);
            let residual = residual_inf(&next, &pi);
            pi = next;
            normalize(&mut pi);
            if residual <= STATIONARY_RESIDUAL * 0.01 {
                break;
            }
        }
        let residual = residual_inf(&left_multiply(&pi, &self.transition), &pi);
        if residual > STATIONARY_RESIDUAL {
            return Err(Error::NonErgodic(format!("stationary residual {residual:e} above tolerance")));
        }
        Ok(pi)
    }

    /// Long-run mean interference power.
    pub fn stationary_mean_power(&self) -> Result<f64> {
        let pi = self.stationary()?;
        Ok(pi.iter().zip(&self.powers).map(|(w, p)| w * p).sum())
    }
}

pub(crate) fn sample_index(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (j, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = j;
        }
        acc += w;
        if u < acc {
            return j;
        }
    }
    // u landed in the rounding gap above the cumulative sum.
    last_positive
}

fn left_multiply(pi: &[f64], p: &[Vec<f64>]) -> Vec<f64> {
    let k = pi.len();
    (0..k).map(|j| (0..k).map(|i| pi[i] * p[i][j]).sum()).collect()
}

fn residual_inf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn normalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
}

/// Desired link: mean received signal power, noise floor and SINR threshold,
/// all in linear units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLink", into = "RawLink")]
pub struct LinkModel {
    mean_signal: f64,
    noise: f64,
    sinr_threshold: f64,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    mean_signal: f64,
    noise: f64,
    sinr_threshold: f64,
}

impl TryFrom<RawLink> for LinkModel {
    type Error = Error;

    fn try_from(r: RawLink) -> Result<Self> {
        LinkModel::new(r.mean_signal, r.noise, r.sinr_threshold)
    }
}

impl From<LinkModel> for RawLink {
    fn from(l: LinkModel) -> Self {
        RawLink { mean_signal: l.mean_signal, noise: l.noise, sinr_threshold: l.sinr_threshold }
    }
}

impl LinkModel {
    pub fn new(mean_signal: f64, noise: f64, sinr_threshold: f64) -> Result<Self> {
        if !(mean_signal.is_finite() && mean_signal > 0.0) {
            return Err(invalid("mean_signal must be > 0"));
        }
        if !(noise.is_finite() && noise >= 0.0) {
            return Err(invalid("noise must be >= 0"));
        }
        if !(sinr_threshold.is_finite() && sinr_threshold > 0.0) {
            return Err(invalid("sinr_threshold must be > 0"));
        }
        Ok(Self { mean_signal, noise, sinr_threshold })
    }

    pub fn mean_signal(&self) -> f64 {
        self.mean_signal
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn sinr_threshold(&self) -> f64 {
        self.sinr_threshold
    }

    /// Per-unit success probability under interference power `interference`.
    pub fn success_prob(&self, interference: f64) -> Result<f64> {
        if !(interference >= 0.0) {
            return Err(invalid(format!("interference must be >= 0, got {interference}")));
        }
        Ok((-self.sinr_threshold * (self.noise + interference) / self.mean_signal).exp())
    }

    /// Probability that all `n` independent units fail.
    pub fn outage(&self, interference: f64, n: u32) -> Result<f64> {
        if n == 0 {
            return Err(invalid("resource count must be >= 1"));
        }
        let p = self.success_prob(interference)?;
        Ok(int_pow(1.0 - p, n))
    }

    /// Outage averaged over a belief on interference powers.
    pub fn expected_outage(&self, belief: &[f64], powers: &[f64], n: u32) -> Result<f64> {
        if belief.len() != powers.len() {
            return Err(invalid("belief and powers differ in length"));
        }
        check_distribution(belief)?;
        let mut total = 0.0;
        for (&w, &power) in belief.iter().zip(powers) {
            total += w * self.outage(power, n)?;
        }
        Ok(total)
    }

    /// Whether one fading realization on a unit clears the threshold.
    pub fn unit_succeeds(&self, interference: f64, gain: f64) -> bool {
        self.mean_signal * gain >= self.sinr_threshold * (self.noise + interference)
    }
}

/// `x^n` by square-and-multiply. `powi` is avoided because LLVM may lower it
/// differently per call site, which breaks bit-exact comparisons.
fn int_pow(mut x: f64, mut n: u32) -> f64 {
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= x;
        }
        x *= x;
        n >>= 1;
    }
    acc
}

pub(crate) fn check_distribution(belief: &[f64]) -> Result<()> {
    if belief.is_empty() {
        return Err(invalid("belief must not be empty"));
    }
    if belief.iter().any(|w| !(0.0..=1.0).contains(w)) {
        return Err(invalid("belief entries must lie in [0,1]"));
    }
    let sum: f64 = belief.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(invalid(format!("belief sums to {sum}, not 1")));
    }
    Ok(())
}
