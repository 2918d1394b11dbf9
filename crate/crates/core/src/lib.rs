//! Deterministic simulator of GSM-style call admission.
//!
//! A home BSC carries calls until its channel pool is exhausted. The normal
//! system blocks the overflow; the load-balanced system services it through
//! a round-robin ready queue and hands each call over to a neighbor BSC.
//! Both run on identical seeded workloads so their blocking and execution
//! times can be compared directly, alongside analytical Erlang B figures.

pub mod cli;
pub mod engine;
pub mod teletraffic;
pub mod topology;
pub mod traffic;

pub use engine::{
    compare_systems, compute_quantum, simulate_load_balanced, simulate_normal,
    slice_execution_time, BlockedCost, CallRecord, ComparisonReport, Disposition, EngineError,
    EngineParams, SimulationReport, System,
};
pub use teletraffic::{
    blocking_sweep, empirical_blocking, erlang_b, BlockingCurvePoint, OfferedLoad,
};
pub use topology::{
    build_topology, neighbor_ids, BscId, ChannelLedger, NetworkTopology, TopologyConfig,
};
pub use traffic::{average_arrival_range, generate_workload, CallRequest, WorkloadParams};
