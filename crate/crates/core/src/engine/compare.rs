use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::topology::{neighbor_ids, BscId, NetworkTopology};
use crate::traffic::CallRequest;

use super::{simulate_load_balanced, simulate_normal, EngineError, EngineParams, SimulationReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub normal: SimulationReport,
    pub load_balanced: SimulationReport,
    /// Normal minus load-balanced blocking, in percentage points.
    pub blocking_reduction_pp: f64,
    /// Normal minus load-balanced total execution time.
    pub execution_time_reduction_ms: f64,
    /// Handed-over calls per neighbor BSC in the load-balanced run.
    pub handovers_per_bsc: BTreeMap<BscId, u32>,
}

/// Runs both systems on the same workload.
pub fn compare_systems(
    topology: &NetworkTopology,
    calls: &[CallRequest],
    params: &EngineParams,
) -> Result<ComparisonReport, EngineError> {
    let normal = simulate_normal(topology, calls, params);
    let load_balanced = simulate_load_balanced(topology, calls, params)?;
    let handovers_per_bsc = neighbor_ids(topology)
        .into_iter()
        .map(|b| (b, load_balanced.handled_by(b)))
        .collect();
    Ok(ComparisonReport {
        blocking_reduction_pp: (normal.empirical_blocking - load_balanced.empirical_blocking)
            * 100.0,
        execution_time_reduction_ms: normal.total_execution_time_ms
            - load_balanced.total_execution_time_ms,
        handovers_per_bsc,
        normal,
        load_balanced,
    })
}
