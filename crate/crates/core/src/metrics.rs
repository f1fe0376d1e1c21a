//! Resilience scores over service traces.
//!
//! A disruption window opens at the first sample with `s < 1` and closes at
//! the first later sample with `s >= 1`. Within a window the trough splits
//! absorption from adoption, and the first sample at or above the adoption
//! threshold splits adoption from recovery. All integrals are trapezoidal on
//! the sample grid.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::service::ServiceTrace;

pub const DEFAULT_ADOPTION_THRESHOLD: f64 = 0.5;
pub const DEFAULT_DECAY: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisruptionWindow {
    pub t_detect: f64,
    pub t_trough: f64,
    /// Last sample time when the window is not terminated.
    pub t_recover: f64,
    pub terminated: bool,
    #[serde(skip)]
    pub detect_index: usize,
    #[serde(skip)]
    pub trough_index: usize,
    #[serde(skip)]
    pub recover_index: usize,
}

impl DisruptionWindow {
    /// A window over the samples `[t_start, t_end]`, both of which must be
    /// sample instants. The trough is the first minimum inside.
    pub fn spanning(trace: &ServiceTrace, t_start: f64, t_end: f64) -> Result<Self> {
        let find = |t: f64| {
            trace.times().iter().position(|&x| x == t).ok_or_else(|| invalid(format!("{t} is not a sample instant")))
        };
        let (a, b) = (find(t_start)?, find(t_end)?);
        if b < a {
            return Err(invalid("window end precedes its start"));
        }
        let trough = first_min(&trace.values()[a..=b]) + a;
        Ok(Self::from_indices(trace, a, trough, b, true))
    }

    fn from_indices(trace: &ServiceTrace, detect: usize, trough: usize, recover: usize, terminated: bool) -> Self {
        let t = trace.times();
        Self {
            t_detect: t[detect],
            t_trough: t[trough],
            t_recover: t[recover],
            terminated,
            detect_index: detect,
            trough_index: trough,
            recover_index: recover,
        }
    }

    pub fn duration(&self) -> f64 {
        self.t_recover - self.t_detect
    }
}

fn first_min(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// Maximal disjoint windows where the service level drops below 1.
pub fn detect_disruptions(trace: &ServiceTrace) -> Vec<DisruptionWindow> {
    let s = trace.values();
    let mut windows = Vec::new();
    let mut i = 0;
    while i < s.len() {
        if s[i] >= 1.0 {
            i += 1;
            continue;
        }
        let start = i;
        let mut j = i;
        while j < s.len() && s[j] < 1.0 {
            j += 1;
        }
        let trough = start + first_min(&s[start..j]);
        if j < s.len() {
            windows.push(DisruptionWindow::from_indices(trace, start, trough, j, true));
        } else {
            windows.push(DisruptionWindow::from_indices(trace, start, trough, s.len() - 1, false));
        }
        i = j;
    }
    windows
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseDurations {
    pub absorption: f64,
    pub adoption: f64,
    pub recovery: f64,
}

impl PhaseDurations {
    pub fn as_array(&self) -> [f64; 3] {
        [self.absorption, self.adoption, self.recovery]
    }

    pub fn total(&self) -> f64 {
        self.absorption + self.adoption + self.recovery
    }
}

pub fn segment_phases(
    trace: &ServiceTrace,
    window: &DisruptionWindow,
    adoption_threshold: f64,
) -> Result<PhaseDurations> {
    if !window.terminated {
        return Err(Error::UnterminatedWindow);
    }
    if !(adoption_threshold > 0.0 && adoption_threshold < 1.0) {
        return Err(invalid("adoption threshold must lie in (0,1)"));
    }
    let s = trace.values();
    let t = trace.times();
    let alpha_index = (window.trough_index..=window.recover_index)
        .find(|&i| s[i] >= adoption_threshold)
        .unwrap_or(window.recover_index);
    Ok(PhaseDurations {
        absorption: t[window.trough_index] - t[window.detect_index],
        adoption: t[alpha_index] - t[window.trough_index],
        recovery: t[window.recover_index] - t[alpha_index],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResilienceMethod {
    PhaseWeighted,
    RecoveryArea,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResilienceScore {
    pub value: f64,
    pub method: ResilienceMethod,
}

/// `Σ λ_k · exp(-Δt_k / τ)` over the three phases.
pub fn phase_weighted_resilience(durations: &PhaseDurations, weights: [f64; 3], decay: f64) -> Result<ResilienceScore> {
    if weights.iter().any(|w| !(*w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(invalid("phase weights must be >= 0 and sum to 1"));
    }
    if !(decay > 0.0 && decay.is_finite()) {
        return Err(invalid("decay must be > 0"));
    }
    let value = weights.iter().zip(durations.as_array()).map(|(w, d)| w * (-d / decay).exp()).sum();
    Ok(ResilienceScore { value, method: ResilienceMethod::PhaseWeighted })
}

/// Trapezoidal integral of `f(s)` over sample indices `[a, b]`.
fn integrate(trace: &ServiceTrace, a: usize, b: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (t, s) = (trace.times(), trace.values());
    (a..b).fold(0.0, |acc, i| acc + 0.5 * (f(s[i]) + f(s[i + 1])) * (t[i + 1] - t[i]))
}

/// Normalized area under `min(s, 1)` across the window.
pub fn recovery_area_resilience(trace: &ServiceTrace, window: &DisruptionWindow) -> Result<ResilienceScore> {
    if !window.terminated {
        return Err(Error::UnterminatedWindow);
    }
    let span = window.duration();
    if !(span > 0.0) {
        return Err(invalid("recovery window has zero length"));
    }
    let area = integrate(trace, window.detect_index, window.recover_index, |s| s.min(1.0));
    let value = area / span;
    if !(value > 0.0) {
        return Err(Error::DegenerateRecovery("no service delivered within the window".into()));
    }
    Ok(ResilienceScore { value, method: ResilienceMethod::RecoveryArea })
}

/// Cumulative resilience function: fraction of the in-window service
/// integral accumulated by time `t`.
pub fn crf(trace: &ServiceTrace, window: &DisruptionWindow, t: f64) -> Result<f64> {
    if !window.terminated {
        return Err(Error::UnterminatedWindow);
    }
    if !(t >= window.t_detect && t <= window.t_recover) {
        return Err(invalid(format!("t={t} outside window [{}, {}]", window.t_detect, window.t_recover)));
    }
    let clip = |s: f64| s.max(0.0);
    let total = integrate(trace, window.detect_index, window.recover_index, clip);
    if !(total > 0.0) {
        return Err(Error::DegenerateRecovery("zero service area in window".into()));
    }
    if t == window.t_recover {
        return Ok(1.0);
    }
    let times = trace.times();
    let values = trace.values();
    // Last sample at or before t, within the window.
    let k = window.detect_index + times[window.detect_index..=window.recover_index].partition_point(|&x| x <= t) - 1;
    let mut partial = integrate(trace, window.detect_index, k, clip);
    if t > times[k] {
        let frac = (t - times[k]) / (times[k + 1] - times[k]);
        let s_t = values[k] + frac * (values[k + 1] - values[k]);
        partial += 0.5 * (clip(values[k]) + clip(s_t)) * (t - times[k]);
    }
    Ok((partial / total).min(1.0))
}

/// CRF evaluated at every sample instant of the window.
pub fn crf_curve(trace: &ServiceTrace, window: &DisruptionWindow) -> Result<Vec<(f64, f64)>> {
    trace.times()[window.detect_index..=window.recover_index]
        .iter()
        .map(|&t| crf(trace, window, t).map(|c| (t, c)))
        .collect()
}

/// Scores for one disruption window. Scores are absent for windows that
/// never recover.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowReport {
    #[serde(flatten)]
    pub window: DisruptionWindow,
    pub phases: Option<PhaseDurations>,
    pub phase_weighted: Option<f64>,
    pub recovery_area: Option<f64>,
    /// `(t, CRF(t))` at each sample instant of the window.
    pub crf: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub samples: usize,
    pub adoption_threshold: f64,
    pub decay: f64,
    pub weights: [f64; 3],
    pub windows: Vec<WindowReport>,
}

/// Every score for every disruption in `trace`.
pub fn metrics_report(
    trace: &ServiceTrace,
    adoption_threshold: f64,
    decay: f64,
    weights: [f64; 3],
) -> Result<MetricsReport> {
    if !(adoption_threshold > 0.0 && adoption_threshold < 1.0) {
        return Err(invalid("adoption threshold must lie in (0,1)"));
    }
    // Validate weights and decay up front.
    let zero = PhaseDurations { absorption: 0.0, adoption: 0.0, recovery: 0.0 };
    phase_weighted_resilience(&zero, weights, decay)?;

    let mut windows = Vec::new();
    for window in detect_disruptions(trace) {
        if !window.terminated {
            windows.push(WindowReport {
                window,
                phases: None,
                phase_weighted: None,
                recovery_area: None,
                crf: Vec::new(),
            });
            continue;
        }
        let phases = segment_phases(trace, &window, adoption_threshold)?;
        let phase_weighted = phase_weighted_resilience(&phases, weights, decay)?.value;
        windows.push(WindowReport {
            window,
            phases: Some(phases),
            phase_weighted: Some(phase_weighted),
            recovery_area: recovery_area_resilience(trace, &window).ok().map(|s| s.value),
            crf: crf_curve(trace, &window).unwrap_or_default(),
        });
    }
    Ok(MetricsReport { samples: trace.len(), adoption_threshold, decay, weights, windows })
}
