//! The two admission systems and the reports they produce.
//!
//! Both engines see the whole batch of requests before service starts. The
//! first `home_channels` calls in arrival order are carried by the home BSC.
//! The normal system blocks everything beyond that; the load-balanced system
//! pushes the overflow through a round-robin ready queue and hands each
//! finished call to the next neighbor BSC with a free channel.

mod compare;
mod normal;
mod round_robin;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{BscId, NetworkTopology};
use crate::traffic::{CallRequest, TrafficError};

pub use compare::{compare_systems, ComparisonReport};
pub use normal::simulate_normal;
pub use round_robin::{
    compute_quantum, simulate_load_balanced, slice_execution_time, slices_needed, NeighborRotation,
    QueueEntry, ReadyQueue,
};

pub const DEFAULT_WAITING_MS: f64 = 3.0;
pub const DEFAULT_CONTEXT_SWITCH_MS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    Normal,
    LoadBalanced,
}

impl System {
    pub fn label(self) -> &'static str {
        match self {
            System::Normal => "Normal System",
            System::LoadBalanced => "Load Balance System",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Disposition {
    AcceptedHome,
    HandedOver,
    Blocked,
}

/// What a blocked call adds to a system's total execution time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockedCost {
    /// The call was held for `arrival + waiting` before being rejected.
    #[default]
    Waiting,
    /// Blocked calls cost nothing.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    pub waiting_ms: f64,
    pub context_switch_ms: f64,
    /// Fixed round-robin quantum. When unset the quantum is derived from the
    /// queued calls (mean arrival / queue size).
    pub quantum_override_ms: Option<f64>,
    pub blocked_cost: BlockedCost,
}

impl Default for EngineParams {
    fn default() -> Self {
        EngineParams {
            waiting_ms: DEFAULT_WAITING_MS,
            context_switch_ms: DEFAULT_CONTEXT_SWITCH_MS,
            quantum_override_ms: None,
            blocked_cost: BlockedCost::Waiting,
        }
    }
}

impl EngineParams {
    pub fn validate(&self) -> Result<(), EngineError> {
        if !(self.waiting_ms.is_finite() && self.waiting_ms >= 0.0) {
            return Err(EngineError::InvalidParam {
                key: "waiting_ms",
                value: self.waiting_ms,
            });
        }
        if !(self.context_switch_ms.is_finite() && self.context_switch_ms >= 0.0) {
            return Err(EngineError::InvalidParam {
                key: "context_switch_ms",
                value: self.context_switch_ms,
            });
        }
        if let Some(q) = self.quantum_override_ms {
            if !(q.is_finite() && q > 0.0) {
                return Err(EngineError::InvalidParam {
                    key: "quantum_override_ms",
                    value: q,
                });
            }
        }
        Ok(())
    }

    fn blocked_time(&self, call: &CallRequest) -> f64 {
        match self.blocked_cost {
            BlockedCost::Waiting => normal_execution_time(call, self.waiting_ms),
            BlockedCost::Zero => 0.0,
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("{key} out of range: {value}")]
    InvalidParam { key: &'static str, value: f64 },
    #[error("quantum inputs must be positive (avg arrival range {avg_arrival_range_ms}, ready queue size {ready_queue_size})")]
    NonPositiveQuantumInput {
        avg_arrival_range_ms: f64,
        ready_queue_size: f64,
    },
    #[error(transparent)]
    Traffic(#[from] TrafficError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallRecord {
    pub call_id: u32,
    pub disposition: Disposition,
    pub serving_bsc: Option<BscId>,
    pub execution_time_ms: f64,
    pub slices_used: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub system: System,
    pub records: Vec<CallRecord>,
    pub accepted_home: u32,
    pub handed_over: u32,
    pub blocked: u32,
    /// Calls carried per BSC, home included. Every BSC has an entry.
    pub per_bsc_handled: BTreeMap<BscId, u32>,
    pub total_execution_time_ms: f64,
    pub empirical_blocking: f64,
    /// Quantum used by the round-robin queue; `None` when no call queued.
    pub quantum_ms: Option<f64>,
}

impl SimulationReport {
    pub(crate) fn from_records(
        system: System,
        topology: &NetworkTopology,
        records: Vec<CallRecord>,
        quantum_ms: Option<f64>,
    ) -> Self {
        let mut per_bsc_handled: BTreeMap<BscId, u32> =
            topology.bscs().iter().map(|b| (b.id, 0)).collect();
        let (mut accepted_home, mut handed_over, mut blocked) = (0, 0, 0);
        let mut total_execution_time_ms = 0.0;
        for r in &records {
            match r.disposition {
                Disposition::AcceptedHome => accepted_home += 1,
                Disposition::HandedOver => handed_over += 1,
                Disposition::Blocked => blocked += 1,
            }
            if let Some(b) = r.serving_bsc {
                *per_bsc_handled.entry(b).or_default() += 1;
            }
            total_execution_time_ms += r.execution_time_ms;
        }
        let total = records.len();
        SimulationReport {
            system,
            empirical_blocking: blocking_ratio(blocked, total),
            records,
            accepted_home,
            handed_over,
            blocked,
            per_bsc_handled,
            total_execution_time_ms,
            quantum_ms,
        }
    }

    pub fn total_calls(&self) -> u32 {
        self.accepted_home + self.handed_over + self.blocked
    }

    pub fn handled_by(&self, id: BscId) -> u32 {
        self.per_bsc_handled.get(&id).copied().unwrap_or(0)
    }

    /// Checks every report invariant against the topology it was run on.
    pub fn check_invariants(&self, topology: &NetworkTopology) -> Result<(), String> {
        let n = self.records.len() as u32;
        if self.total_calls() != n {
            return Err(format!(
                "counts {} + {} + {} != {n} records",
                self.accepted_home, self.handed_over, self.blocked
            ));
        }
        let expected = blocking_ratio(self.blocked, self.records.len());
        if self.empirical_blocking != expected {
            return Err(format!(
                "empirical_blocking {} != {expected}",
                self.empirical_blocking
            ));
        }
        if self.accepted_home > topology.home_channels() {
            return Err("home BSC over capacity".into());
        }
        for b in topology.bscs() {
            if self.handled_by(b.id) > b.free_channels {
                return Err(format!("{} over capacity", b.id));
            }
        }
        if self
            .per_bsc_handled
            .keys()
            .any(|id| !topology.contains(*id))
        {
            return Err("per_bsc_handled names an unknown BSC".into());
        }
        let carried: u32 = self.per_bsc_handled.values().sum();
        if carried != self.accepted_home + self.handed_over {
            return Err("per-BSC tallies disagree with counts".into());
        }
        for r in &self.records {
            let ok = match r.disposition {
                Disposition::AcceptedHome => {
                    r.serving_bsc == Some(BscId::HOME) && r.slices_used == 0
                }
                Disposition::HandedOver => {
                    r.serving_bsc
                        .is_some_and(|b| !b.is_home() && topology.contains(b))
                        && r.slices_used >= 1
                }
                Disposition::Blocked => r.serving_bsc.is_none() && r.slices_used == 0,
            };
            if !ok || r.execution_time_ms.is_nan() || r.execution_time_ms < 0.0 {
                return Err(format!("call {} record inconsistent: {r:?}", r.call_id));
            }
        }
        Ok(())
    }
}

/// Blocked over total, 0 for an empty run.
pub(crate) fn blocking_ratio(blocked: u32, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        f64::from(blocked) / total as f64
    }
}

/// Normal-system per-call cost: arrival time plus fixed waiting time.
pub fn normal_execution_time(call: &CallRequest, waiting_ms: f64) -> f64 {
    call.arrival_time_ms + waiting_ms
}

fn home_record(call: &CallRequest, params: &EngineParams) -> CallRecord {
    CallRecord {
        call_id: call.id,
        disposition: Disposition::AcceptedHome,
        serving_bsc: Some(BscId::HOME),
        execution_time_ms: normal_execution_time(call, params.waiting_ms),
        slices_used: 0,
    }
}

fn blocked_record(call: &CallRequest, params: &EngineParams) -> CallRecord {
    CallRecord {
        call_id: call.id,
        disposition: Disposition::Blocked,
        serving_bsc: None,
        execution_time_ms: params.blocked_time(call),
        slices_used: 0,
    }
}
