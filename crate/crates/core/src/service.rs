//! Service-level traces, SLA tiers and failure-pattern KPIs.

use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Time-indexed normalized service level `s(t)`; `1.0` is the desired level.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceTrace {
    times: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TraceRow {
    t: f64,
    s: f64,
}

impl ServiceTrace {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(invalid("trace must contain at least one sample"));
        }
        if times.len() != values.len() {
            return Err(invalid(format!("trace has {} times but {} values", times.len(), values.len())));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(invalid("trace times must be finite"));
        }
        if let Some(w) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(invalid(format!("trace times not strictly increasing at index {}", w + 1)));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid(format!("service level at index {i} must be finite and >= 0")));
        }
        Ok(Self { times, values })
    }

    /// Samples at unit spacing starting from `t = 0`.
    pub fn from_unit_steps(values: Vec<f64>) -> Result<Self> {
        let times = (0..values.len()).map(|i| i as f64).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Reads the `t,s` CSV format.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "s" {
            return Err(invalid(format!(
                "trace header must be `t,s`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for row in rdr.deserialize() {
            let row: TraceRow = row?;
            times.push(row.t);
            values.push(row.s);
        }
        Self::new(times, values)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        for (&t, &s) in self.times.iter().zip(&self.values) {
            wtr.serialize(TraceRow { t, s })?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// One service class with its outage target, survival time and demands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlaTier {
    pub name: String,
    /// Lower is more critical.
    pub priority: u32,
    pub outage_target: f64,
    /// Slots an application tolerates without new data.
    pub survival_time: u32,
    pub demand: f64,
    /// Demand accepted while the system is not in its normal state.
    pub degraded_demand: f64,
}

impl SlaTier {
    pub fn validate(&self) -> Result<()> {
        if !(self.outage_target > 0.0 && self.outage_target < 1.0) {
            return Err(invalid(format!("tier `{}`: outage_target must lie in (0,1)", self.name)));
        }
        if self.survival_time < 1 {
            return Err(invalid(format!("tier `{}`: survival_time must be >= 1", self.name)));
        }
        if !(self.demand.is_finite() && self.degraded_demand >= 0.0 && self.degraded_demand <= self.demand) {
            return Err(invalid(format!("tier `{}`: need 0 <= degraded_demand <= demand", self.name)));
        }
        Ok(())
    }
}

/// A validated set of tiers with unique priorities.
#[derive(Debug, Clone, PartialEq)]
pub struct SlaTiers(Vec<SlaTier>);

impl SlaTiers {
    pub fn new(tiers: Vec<SlaTier>) -> Result<Self> {
        if tiers.is_empty() {
            return Err(invalid("tier set must not be empty"));
        }
        let mut seen = HashSet::new();
        for tier in &tiers {
            tier.validate()?;
            if !seen.insert(tier.priority) {
                return Err(invalid(format!("duplicate tier priority {}", tier.priority)));
            }
        }
        Ok(Self(tiers))
    }

    pub fn as_slice(&self) -> &[SlaTier] {
        &self.0
    }

    pub fn by_name(&self, name: &str) -> Option<&SlaTier> {
        self.0.iter().find(|t| t.name == name)
    }

    /// Indices into the set, most critical first.
    pub fn priority_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.0.len()).collect();
        idx.sort_by_key(|&i| self.0[i].priority);
        idx
    }
}

/// Failure-pattern KPIs over a per-slot failure bitmap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FailureKpis {
    /// Slots per failure run; `f64::INFINITY` when no run occurred.
    pub mtbf: f64,
    pub max_consecutive_failures: usize,
    /// Runs strictly longer than the survival time.
    pub survival_violations: usize,
    pub failure_rate: f64,
    pub failure_runs: usize,
}

/// Lengths of the maximal runs of `true`.
pub fn failure_runs(failures: &[bool]) -> Vec<usize> {
    let mut runs = Vec::new();
    let mut current = 0usize;
    for &f in failures {
        if f {
            current += 1;
        } else if current > 0 {
            runs.push(current);
            current = 0;
        }
    }
    if current > 0 {
        runs.push(current);
    }
    runs
}

pub fn kpis_from_bitmap(failures: &[bool], survival_time: u32) -> Result<FailureKpis> {
    if failures.is_empty() {
        return Err(invalid("failure bitmap must not be empty"));
    }
    if survival_time < 1 {
        return Err(invalid("survival_time must be >= 1"));
    }
    let runs = failure_runs(failures);
    let failed: usize = runs.iter().sum();
    let total = failures.len();
    Ok(FailureKpis {
        mtbf: if runs.is_empty() { f64::INFINITY } else { total as f64 / runs.len() as f64 },
        max_consecutive_failures: runs.iter().copied().max().unwrap_or(0),
        survival_violations: runs.iter().filter(|&&r| r > survival_time as usize).count(),
        failure_rate: failed as f64 / total as f64,
        failure_runs: runs.len(),
    })
}
