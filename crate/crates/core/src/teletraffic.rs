//! Erlang B blocking, offered load and the blocking-vs-load sweep.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{
    simulate_load_balanced, simulate_normal, EngineError, EngineParams, SimulationReport,
};
use crate::topology::NetworkTopology;
use crate::traffic::{generate_workload, WorkloadParams};

#[derive(Debug, Error)]
pub enum TeletrafficError {
    #[error("offered load must be a non-negative finite number of erlangs, got {0}")]
    InvalidLoad(f64),
    #[error("arrival rate must be non-negative and finite, got {0}")]
    InvalidArrivalRate(f64),
    #[error("departure rate must be positive and finite, got {0}")]
    InvalidDepartureRate(f64),
    #[error("load levels must be ascending ({prev} followed by {next})")]
    LevelsNotAscending { prev: u32, next: u32 },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("sweep output: {0}")]
    Io(#[from] std::io::Error),
}

/// Offered traffic in erlangs, `A = λ / μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OfferedLoad {
    pub erlangs: f64,
    pub lambda_per_s: Option<f64>,
    pub mu_per_s: Option<f64>,
}

impl OfferedLoad {
    pub fn from_erlangs(erlangs: f64) -> Result<Self, TeletrafficError> {
        if !(erlangs.is_finite() && erlangs >= 0.0) {
            return Err(TeletrafficError::InvalidLoad(erlangs));
        }
        Ok(OfferedLoad {
            erlangs,
            lambda_per_s: None,
            mu_per_s: None,
        })
    }

    pub fn from_rates(lambda_per_s: f64, mu_per_s: f64) -> Result<Self, TeletrafficError> {
        if !(lambda_per_s.is_finite() && lambda_per_s >= 0.0) {
            return Err(TeletrafficError::InvalidArrivalRate(lambda_per_s));
        }
        if !(mu_per_s.is_finite() && mu_per_s > 0.0) {
            return Err(TeletrafficError::InvalidDepartureRate(mu_per_s));
        }
        Ok(OfferedLoad {
            erlangs: lambda_per_s / mu_per_s,
            lambda_per_s: Some(lambda_per_s),
            mu_per_s: Some(mu_per_s),
        })
    }
}

/// Erlang B blocking probability for `n_channels` trunks offered `load`.
///
/// Uses the recurrence `E(0) = 1`, `E(n) = A·E(n-1) / (n + A·E(n-1))`,
/// which equals `(A^N/N!) / Σ A^i/i!` without overflowing for large `N`.
pub fn erlang_b(load: &OfferedLoad, n_channels: u32) -> Result<f64, TeletrafficError> {
    let a = load.erlangs;
    if !(a.is_finite() && a >= 0.0) {
        return Err(TeletrafficError::InvalidLoad(a));
    }
    let mut e = 1.0;
    for n in 1..=n_channels {
        let ae = a * e;
        e = ae / (f64::from(n) + ae);
    }
    Ok(e)
}

/// Blocked calls over total requests; 0 for an empty run.
pub fn empirical_blocking(report: &SimulationReport) -> f64 {
    let total = report.total_calls();
    if total == 0 {
        0.0
    } else {
        f64::from(report.blocked) / f64::from(total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockingCurvePoint {
    pub n_calls: u32,
    pub ns_blocking: f64,
    pub lb_blocking: f64,
}

/// Seed for the workload at load level `n_calls`, derived from the base seed.
pub fn level_seed(base_seed: u64, n_calls: u32) -> u64 {
    // splitmix64 finalizer
    let mut z = base_seed.wrapping_add(u64::from(n_calls).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs both systems at every load level. `workload` supplies the base seed,
/// arrival window and demand; its `n_calls` is ignored.
pub fn blocking_sweep(
    topology: &NetworkTopology,
    levels: &[u32],
    workload: &WorkloadParams,
    params: &EngineParams,
) -> Result<Vec<BlockingCurvePoint>, TeletrafficError> {
    if let Some(w) = levels.windows(2).find(|w| w[0] > w[1]) {
        return Err(TeletrafficError::LevelsNotAscending {
            prev: w[0],
            next: w[1],
        });
    }
    levels
        .par_iter()
        .map(|&n_calls| {
            let level = WorkloadParams {
                n_calls,
                seed: level_seed(workload.seed, n_calls),
                ..workload.clone()
            };
            let calls = generate_workload(&level, topology).map_err(EngineError::from)?;
            let ns = simulate_normal(topology, &calls, params);
            let lb = simulate_load_balanced(topology, &calls, params)?;
            Ok(BlockingCurvePoint {
                n_calls,
                ns_blocking: empirical_blocking(&ns),
                lb_blocking: empirical_blocking(&lb),
            })
        })
        .collect()
}

/// CSV with header `n_calls,ns_blocking,lb_blocking`, six decimals.
pub fn write_sweep_csv<W: Write>(
    points: &[BlockingCurvePoint],
    mut out: W,
) -> Result<(), TeletrafficError> {
    writeln!(out, "n_calls,ns_blocking,lb_blocking")?;
    for p in points {
        writeln!(
            out,
            "{},{:.6},{:.6}",
            p.n_calls, p.ns_blocking, p.lb_blocking
        )?;
    }
    out.flush()?;
    Ok(())
}
