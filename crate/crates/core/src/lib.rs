//! Discrete-time resilience toolkit for wireless links and networks.
//!
//! The crate is organised along the life cycle of a disruption:
//!
//! * [`channel`] models Markov-modulated interference and the Rayleigh
//!   outage it causes on a link with `n` redundant resource units.
//! * [`prediction`] forecasts the next interference state (ideal oracle,
//!   online maximum-likelihood Markov estimate, moving average).
//! * [`allocation`] picks the smallest resource count that keeps the
//!   expected outage under an SLA target, plus static baselines and
//!   SLA-staggered degradation.
//! * [`topology`] covers network-scale protection: connectivity, articulation
//!   points, isolation, region-avoiding rerouting, traffic shedding.
//! * [`metrics`] scores service traces (phase-weighted resilience, recovery
//!   area, cumulative resilience function).
//! * [`harness`] wires everything into a seeded slot-loop simulator.

// Input guards are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod channel;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod prediction;
pub mod service;
pub mod topology;

pub use allocation::{AllocationDecision, StaticMode, SystemLabel, SystemState};
pub use channel::{LinkModel, MarkovChain};
pub use error::{Error, Result};
pub use harness::{PredictorKind, ScenarioConfig, SummaryReport};
pub use metrics::{DisruptionWindow, MetricsReport, PhaseDurations, ResilienceMethod, ResilienceScore};
pub use prediction::{Belief, Prediction, PredictionKind};
pub use service::{FailureKpis, ServiceTrace, SlaTier, SlaTiers};
pub use topology::{DisruptionRegion, FlowRequest, NodeId, Topology};
