//! Run configuration: a flat `key = value` file, overridden by flags.
//!
//! ```text
//! bsc_channels = [313, 346, 382]
//! cells_per_bsc = 7
//! area_km = 1.0
//! n_calls = 900
//! seed = 42
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::engine::{BlockedCost, EngineParams};
use crate::topology::{
    build_topology, NetworkTopology, TopologyConfig, DEFAULT_AREA_KM, DEFAULT_BSC_CHANNELS,
    DEFAULT_CELLS_PER_BSC,
};
use crate::traffic::WorkloadParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Every key is optional; unset keys fall back to the reference scenario.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub bsc_channels: Option<Vec<i64>>,
    pub cells_per_bsc: Option<i64>,
    pub area_km: Option<f64>,
    pub n_calls: Option<u32>,
    pub seed: Option<u64>,
    pub arrival_window_ms: Option<f64>,
    pub demand_ms: Option<f64>,
    pub context_switch_ms: Option<f64>,
    pub waiting_ms: Option<f64>,
    pub quantum_override_ms: Option<f64>,
    pub blocked_cost: Option<BlockedCost>,
    pub format: Option<OutputFormat>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid `{key}`{}: {message}", .line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Invalid {
        key: &'static str,
        line: Option<usize>,
        message: String,
    },
}

impl RunConfig {
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string().trim_end().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<(Self, String), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Ok((Self::from_toml_str(&text, path)?, text))
    }

    /// Keys set in `overrides` replace the ones here.
    pub fn merge(self, overrides: RunConfig) -> RunConfig {
        RunConfig {
            bsc_channels: overrides.bsc_channels.or(self.bsc_channels),
            cells_per_bsc: overrides.cells_per_bsc.or(self.cells_per_bsc),
            area_km: overrides.area_km.or(self.area_km),
            n_calls: overrides.n_calls.or(self.n_calls),
            seed: overrides.seed.or(self.seed),
            arrival_window_ms: overrides.arrival_window_ms.or(self.arrival_window_ms),
            demand_ms: overrides.demand_ms.or(self.demand_ms),
            context_switch_ms: overrides.context_switch_ms.or(self.context_switch_ms),
            waiting_ms: overrides.waiting_ms.or(self.waiting_ms),
            quantum_override_ms: overrides.quantum_override_ms.or(self.quantum_override_ms),
            blocked_cost: overrides.blocked_cost.or(self.blocked_cost),
            format: overrides.format.or(self.format),
            output: overrides.output.or(self.output),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Resolved {
    pub topology: NetworkTopology,
    pub workload: WorkloadParams,
    pub engine: EngineParams,
    pub format: Option<OutputFormat>,
    pub output: Option<PathBuf>,
}

/// Line of `key = ...` in the config text, 1-based.
fn key_line(source: Option<&str>, key: &str) -> Option<usize> {
    source?
        .lines()
        .position(|l| {
            l.trim_start()
                .strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}

/// Applies defaults and validates. `source` is the config file text, used
/// to point diagnostics at a line.
pub fn resolve(config: &RunConfig, source: Option<&str>) -> Result<Resolved, ConfigError> {
    let invalid = |key: &'static str, message: String| ConfigError::Invalid {
        key,
        line: key_line(source, key),
        message,
    };

    let channels = config
        .bsc_channels
        .clone()
        .unwrap_or_else(|| DEFAULT_BSC_CHANNELS.to_vec());
    let cells = config.cells_per_bsc.unwrap_or(DEFAULT_CELLS_PER_BSC);
    let area_km = config.area_km.unwrap_or(DEFAULT_AREA_KM);
    let topology =
        build_topology(&TopologyConfig::uniform(&channels, cells, area_km)).map_err(|e| {
            use crate::topology::TopologyError as T;
            let key = match e {
                T::InvalidArea(_) => "area_km",
                T::InvalidCells { .. } => "cells_per_bsc",
                _ => "bsc_channels",
            };
            invalid(key, e.to_string())
        })?;

    let defaults = WorkloadParams::default();
    let workload = WorkloadParams {
        n_calls: config.n_calls.unwrap_or(defaults.n_calls),
        seed: config.seed.unwrap_or(defaults.seed),
        arrival_window_ms: config
            .arrival_window_ms
            .unwrap_or(defaults.arrival_window_ms),
        demand_ms: config.demand_ms.unwrap_or(defaults.demand_ms),
    };
    workload.validate().map_err(|e| {
        use crate::traffic::TrafficError as T;
        let key = match e {
            T::InvalidWindow(_) => "arrival_window_ms",
            _ => "demand_ms",
        };
        invalid(key, e.to_string())
    })?;

    let engine_defaults = EngineParams::default();
    let engine = EngineParams {
        waiting_ms: config.waiting_ms.unwrap_or(engine_defaults.waiting_ms),
        context_switch_ms: config
            .context_switch_ms
            .unwrap_or(engine_defaults.context_switch_ms),
        quantum_override_ms: config.quantum_override_ms,
        blocked_cost: config.blocked_cost.unwrap_or(engine_defaults.blocked_cost),
    };
    engine.validate().map_err(|e| match e {
        crate::engine::EngineError::InvalidParam { key, .. } => invalid(key, e.to_string()),
        other => invalid("engine", other.to_string()),
    })?;

    Ok(Resolved {
        topology,
        workload,
        engine,
        format: config.format,
        output: config.output.clone(),
    })
}
