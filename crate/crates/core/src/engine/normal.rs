use crate::topology::{BscId, ChannelLedger, NetworkTopology};
use crate::traffic::CallRequest;

use super::{blocked_record, home_record, EngineParams, SimulationReport, System};

/// Baseline admission: carry calls on the home BSC until its channels run
/// out, block the rest.
pub fn simulate_normal(
    topology: &NetworkTopology,
    calls: &[CallRequest],
    params: &EngineParams,
) -> SimulationReport {
    debug_assert!(calls
        .windows(2)
        .all(|w| w[0].arrival_time_ms <= w[1].arrival_time_ms));

    let mut ledger = ChannelLedger::new(topology);
    let records = calls
        .iter()
        .map(|call| match ledger.assign(BscId::HOME) {
            Ok(()) => home_record(call, params),
            Err(_) => blocked_record(call, params),
        })
        .collect();
    SimulationReport::from_records(System::Normal, topology, records, None)
}
