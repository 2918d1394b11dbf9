//! Report serialization: JSON documents, CSV tables and the console block.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::engine::{
    BlockedCost, CallRecord, ComparisonReport, EngineParams, SimulationReport, System,
};
use crate::topology::{neighbor_ids, BscId, NetworkTopology};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub n_calls: u32,
    /// `None` when the workload was imported from a file.
    pub seed: Option<u64>,
    pub bsc_channels: Vec<u32>,
    pub waiting_ms: f64,
    pub context_switch_ms: f64,
    pub quantum_ms: Option<f64>,
    pub blocked_cost: BlockedCost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub accepted_home: u32,
    pub handed_over: u32,
    pub blocked: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub system: System,
    pub params: ReportParams,
    pub counts: Counts,
    pub per_bsc_handled: BTreeMap<BscId, u32>,
    pub total_execution_time_ms: f64,
    pub empirical_blocking: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<CallRecord>>,
}

impl JsonReport {
    pub fn new(
        report: &SimulationReport,
        topology: &NetworkTopology,
        engine: &EngineParams,
        seed: Option<u64>,
        full: bool,
    ) -> Self {
        JsonReport {
            system: report.system,
            params: ReportParams {
                n_calls: report.total_calls(),
                seed,
                bsc_channels: topology.bscs().iter().map(|b| b.free_channels).collect(),
                waiting_ms: engine.waiting_ms,
                context_switch_ms: engine.context_switch_ms,
                quantum_ms: report.quantum_ms,
                blocked_cost: engine.blocked_cost,
            },
            counts: Counts {
                accepted_home: report.accepted_home,
                handed_over: report.handed_over,
                blocked: report.blocked,
            },
            per_bsc_handled: report.per_bsc_handled.clone(),
            total_execution_time_ms: report.total_execution_time_ms,
            empirical_blocking: report.empirical_blocking,
            records: full.then(|| report.records.clone()),
        }
    }

    /// Rebuilds the engine report; only possible for `--full` documents.
    pub fn to_simulation_report(&self) -> Option<SimulationReport> {
        Some(SimulationReport {
            system: self.system,
            records: self.records.clone()?,
            accepted_home: self.counts.accepted_home,
            handed_over: self.counts.handed_over,
            blocked: self.counts.blocked,
            per_bsc_handled: self.per_bsc_handled.clone(),
            total_execution_time_ms: self.total_execution_time_ms,
            empirical_blocking: self.empirical_blocking,
            quantum_ms: self.params.quantum_ms,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deltas {
    pub blocking_reduction_pp: f64,
    pub execution_time_reduction_ms: f64,
    pub handovers_per_bsc: BTreeMap<BscId, u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonComparison {
    pub normal: JsonReport,
    pub load_balanced: JsonReport,
    pub deltas: Deltas,
}

impl JsonComparison {
    pub fn new(
        cmp: &ComparisonReport,
        topology: &NetworkTopology,
        engine: &EngineParams,
        seed: Option<u64>,
        full: bool,
    ) -> Self {
        JsonComparison {
            normal: JsonReport::new(&cmp.normal, topology, engine, seed, full),
            load_balanced: JsonReport::new(&cmp.load_balanced, topology, engine, seed, full),
            deltas: Deltas {
                blocking_reduction_pp: cmp.blocking_reduction_pp,
                execution_time_reduction_ms: cmp.execution_time_reduction_ms,
                handovers_per_bsc: cmp.handovers_per_bsc.clone(),
            },
        }
    }
}

/// Per-call CSV: `call_id,disposition,serving_bsc,execution_time_ms,slices_used`.
pub fn write_records_csv<W: Write>(records: &[CallRecord], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record([
        "call_id",
        "disposition",
        "serving_bsc",
        "execution_time_ms",
        "slices_used",
    ])?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Side-by-side CSV: `metric,normal,load_balanced,delta` with delta = normal − LB.
pub fn write_comparison_csv<W: Write>(cmp: &ComparisonReport, out: W) -> csv::Result<()> {
    let (ns, lb) = (&cmp.normal, &cmp.load_balanced);
    let mut rows: Vec<(String, f64, f64)> = vec![
        (
            "accepted_home".into(),
            ns.accepted_home.into(),
            lb.accepted_home.into(),
        ),
        (
            "handed_over".into(),
            ns.handed_over.into(),
            lb.handed_over.into(),
        ),
        ("blocked".into(), ns.blocked.into(), lb.blocked.into()),
        (
            "empirical_blocking".into(),
            ns.empirical_blocking,
            lb.empirical_blocking,
        ),
        (
            "total_execution_time_ms".into(),
            ns.total_execution_time_ms,
            lb.total_execution_time_ms,
        ),
    ];
    for (&b, &lb_count) in &lb.per_bsc_handled {
        rows.push((
            format!("handled_{}", b.to_string().to_lowercase()),
            ns.handled_by(b).into(),
            lb_count.into(),
        ));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["metric", "normal", "load_balanced", "delta"])?;
    for (metric, a, b) in rows {
        w.write_record([metric, a.to_string(), b.to_string(), (a - b).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Console summary laid out like the original simulator's command window.
pub fn console_block(report: &SimulationReport, topology: &NetworkTopology) -> String {
    let mut s = String::new();
    let home = topology.home();
    let n = report.total_calls();
    let _ = writeln!(s, "system have {} cell per BSC", home.cells);
    let _ = writeln!(s, "channel free {} = {}", home.id, home.free_channels);
    let _ = writeln!(s, "number of call request = {n}");
    if n > home.free_channels {
        let _ = writeln!(s, "{} overloaded", home.id);
    }
    let _ = writeln!(s, "{}", report.system.label());
    match report.system {
        System::Normal => {
            let _ = writeln!(s, "Accepted calls = {}", report.accepted_home);
        }
        System::LoadBalanced => {
            if let Some(q) = report.quantum_ms {
                let _ = writeln!(s, "Quantum Time = {q:.4} MS");
            }
            let _ = writeln!(s, "Number of Handover calls = {}", report.handed_over);
            let neighbors = neighbor_ids(topology);
            for &b in &neighbors {
                let _ = writeln!(s, "channel free {b} = {}", topology.channels(b));
            }
            for &b in &neighbors {
                let _ = writeln!(s, "{b} Handeled = {}", report.handled_by(b));
            }
        }
    }
    let _ = writeln!(s, "Blocked calls = {}", report.blocked);
    let _ = writeln!(
        s,
        "Total execution time = {:.4} MS",
        report.total_execution_time_ms
    );
    let _ = writeln!(s, "Blocking probability = {:.6}", report.empirical_blocking);
    s
}

pub fn comparison_block(cmp: &ComparisonReport, topology: &NetworkTopology) -> String {
    let mut s = console_block(&cmp.normal, topology);
    s.push('\n');
    s.push_str(&console_block(&cmp.load_balanced, topology));
    s.push('\n');
    let _ = writeln!(
        s,
        "Blocking reduction = {:.4} percentage points",
        cmp.blocking_reduction_pp
    );
    let _ = writeln!(
        s,
        "Execution time reduction = {:.4} MS",
        cmp.execution_time_reduction_ms
    );
    s
}
