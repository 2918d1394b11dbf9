//! Synthetic call-request workloads.
//!
//! Arrivals are uniform over a fixed window and positions uniform over the
//! square simulation area. Both come from one ChaCha8 generator keyed by the
//! seed, with a separate stream per concern so that changing how positions
//! are drawn never perturbs arrival times.

use std::io::{Read, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::NetworkTopology;

pub const DEFAULT_ARRIVAL_WINDOW_MS: f64 = 2000.0;
/// Fits in a single round-robin slice at the reference quantum (0.4850 ms).
pub const DEFAULT_DEMAND_MS: f64 = 0.4;

const ARRIVAL_STREAM: u64 = 0;
const POSITION_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallRequest {
    pub id: u32,
    pub arrival_time_ms: f64,
    pub position: (f64, f64),
    pub demand_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadParams {
    pub n_calls: u32,
    pub seed: u64,
    pub arrival_window_ms: f64,
    pub demand_ms: f64,
}

impl Default for WorkloadParams {
    fn default() -> Self {
        WorkloadParams {
            n_calls: 900,
            seed: 42,
            arrival_window_ms: DEFAULT_ARRIVAL_WINDOW_MS,
            demand_ms: DEFAULT_DEMAND_MS,
        }
    }
}

#[derive(Debug, Error)]
pub enum TrafficError {
    #[error("arrival_window_ms must be positive and finite, got {0}")]
    InvalidWindow(f64),
    #[error("demand_ms must be positive and finite, got {0}")]
    InvalidDemand(f64),
    #[error("average arrival range is undefined on empty workload")]
    EmptyWorkload,
    #[error("workload line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("workload csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("workload io: {0}")]
    Io(#[from] std::io::Error),
}

impl WorkloadParams {
    pub fn validate(&self) -> Result<(), TrafficError> {
        if !(self.arrival_window_ms.is_finite() && self.arrival_window_ms > 0.0) {
            return Err(TrafficError::InvalidWindow(self.arrival_window_ms));
        }
        if !(self.demand_ms.is_finite() && self.demand_ms > 0.0) {
            return Err(TrafficError::InvalidDemand(self.demand_ms));
        }
        Ok(())
    }
}

/// Generates `n_calls` requests sorted by arrival, with ids `0..n` in that
/// order. The output is a pure function of `(params, topology)`.
pub fn generate_workload(
    params: &WorkloadParams,
    topology: &NetworkTopology,
) -> Result<Vec<CallRequest>, TrafficError> {
    params.validate()?;
    let n = params.n_calls as usize;
    let area = topology.area_km();

    let mut arrivals_rng = ChaCha8Rng::seed_from_u64(params.seed);
    arrivals_rng.set_stream(ARRIVAL_STREAM);
    let mut positions_rng = ChaCha8Rng::seed_from_u64(params.seed);
    positions_rng.set_stream(POSITION_STREAM);

    let mut draws: Vec<(f64, (f64, f64))> = (0..n)
        .map(|_| {
            let t = arrivals_rng.random_range(0.0..=params.arrival_window_ms);
            let x = positions_rng.random_range(0.0..=area);
            let y = positions_rng.random_range(0.0..=area);
            (t, (x, y))
        })
        .collect();
    // Stable sort keeps draw order among equal timestamps.
    draws.sort_by(|a, b| a.0.total_cmp(&b.0));

    Ok(draws
        .into_iter()
        .enumerate()
        .map(|(i, (arrival_time_ms, position))| CallRequest {
            id: i as u32,
            arrival_time_ms,
            position,
            demand_ms: params.demand_ms,
        })
        .collect())
}

/// Mean arrival timestamp of `calls`, the numerator of the quantum formula.
pub fn average_arrival_range(calls: &[CallRequest]) -> Result<f64, TrafficError> {
    if calls.is_empty() {
        return Err(TrafficError::EmptyWorkload);
    }
    let sum: f64 = calls.iter().map(|c| c.arrival_time_ms).sum();
    Ok(sum / calls.len() as f64)
}

#[derive(Debug, Serialize, Deserialize)]
struct WorkloadRow {
    id: u32,
    arrival_ms: f64,
    x_km: f64,
    y_km: f64,
    demand_ms: f64,
}

/// Writes one call per line: `id,arrival_ms,x_km,y_km,demand_ms`.
///
/// Floats use the shortest round-trip representation, so reading the file
/// back yields bit-identical requests.
pub fn write_workload<W: Write>(calls: &[CallRequest], out: W) -> Result<(), TrafficError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(["id", "arrival_ms", "x_km", "y_km", "demand_ms"])?;
    for c in calls {
        w.serialize(WorkloadRow {
            id: c.id,
            arrival_ms: c.arrival_time_ms,
            x_km: c.position.0,
            y_km: c.position.1,
            demand_ms: c.demand_ms,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a workload written by [`write_workload`]. Rows must be sorted by
/// arrival and carry ids `0..n` in order; demands must be positive.
pub fn read_workload<R: Read>(input: R) -> Result<Vec<CallRequest>, TrafficError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut calls: Vec<CallRequest> = Vec::new();
    for row in rdr.deserialize::<WorkloadRow>() {
        let row = row?;
        let line = calls.len() as u64 + 2;
        let bad = |message: String| TrafficError::Malformed { line, message };
        if row.id as usize != calls.len() {
            return Err(bad(format!(
                "expected id {}, found {}",
                calls.len(),
                row.id
            )));
        }
        if !(row.arrival_ms.is_finite() && row.arrival_ms >= 0.0) {
            return Err(bad(format!("invalid arrival_ms {}", row.arrival_ms)));
        }
        if let Some(prev) = calls.last() {
            if row.arrival_ms < prev.arrival_time_ms {
                return Err(bad("arrivals not sorted ascending".to_string()));
            }
        }
        if !(row.demand_ms.is_finite() && row.demand_ms > 0.0) {
            return Err(bad(format!("invalid demand_ms {}", row.demand_ms)));
        }
        if !(row.x_km.is_finite() && row.y_km.is_finite()) {
            return Err(bad("non-finite position".to_string()));
        }
        calls.push(CallRequest {
            id: row.id,
            arrival_time_ms: row.arrival_ms,
            position: (row.x_km, row.y_km),
            demand_ms: row.demand_ms,
        });
    }
    Ok(calls)
}
