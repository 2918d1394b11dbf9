//! Network structure: one MSC, a home BSC and its neighbors, and the
//! channel pools that bound how many calls each controller can carry.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Free channels per BSC in the reference scenario (BSC1, BSC2, BSC3).
pub const DEFAULT_BSC_CHANNELS: [i64; 3] = [313, 346, 382];
pub const DEFAULT_CELLS_PER_BSC: i64 = 7;
pub const DEFAULT_AREA_KM: f64 = 1.0;

/// Index of a base-station controller. `0` is always the home BSC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BscId(pub usize);

impl BscId {
    pub const HOME: BscId = BscId(0);

    pub fn index(self) -> usize {
        self.0
    }

    pub fn is_home(self) -> bool {
        self.0 == 0
    }
}

/// Displays the 1-based operator label, so index 0 prints as `BSC1`.
impl fmt::Display for BscId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BSC{}", self.0 + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BscConfig {
    pub id: BscId,
    /// Cells under this controller. Only used for placement and display.
    pub cells: u32,
    pub free_channels: u32,
}

/// Unvalidated description of a BSC, as read from configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BscSpec {
    pub id: usize,
    pub cells: i64,
    pub free_channels: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopologyConfig {
    pub msc_id: String,
    pub bscs: Vec<BscSpec>,
    pub area_km: f64,
}

impl TopologyConfig {
    /// One BSC per entry of `channels`, all with the same cell count.
    pub fn uniform(channels: &[i64], cells_per_bsc: i64, area_km: f64) -> Self {
        TopologyConfig {
            msc_id: "MSC1".to_string(),
            bscs: channels
                .iter()
                .enumerate()
                .map(|(id, &free_channels)| BscSpec {
                    id,
                    cells: cells_per_bsc,
                    free_channels,
                })
                .collect(),
            area_km,
        }
    }
}

impl Default for TopologyConfig {
    fn default() -> Self {
        TopologyConfig::uniform(
            &DEFAULT_BSC_CHANNELS,
            DEFAULT_CELLS_PER_BSC,
            DEFAULT_AREA_KM,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("at least one neighbor required: topology has {0} BSC(s), need >= 2")]
    TooFewBscs(usize),
    #[error("BSC {id}: negative channel count {channels}")]
    NegativeChannels { id: usize, channels: i64 },
    #[error("BSC {id}: channel count {channels} out of range")]
    ChannelsOutOfRange { id: usize, channels: i64 },
    #[error("BSC {id}: cell count must be >= 1, got {cells}")]
    InvalidCells { id: usize, cells: i64 },
    #[error("area_km must be a positive finite number, got {0}")]
    InvalidArea(f64),
    #[error("duplicate BSC id {0}")]
    DuplicateId(usize),
    #[error("BSC id {id} out of range for {count} BSC(s)")]
    IdOutOfRange { id: usize, count: usize },
}

/// Validated, immutable network structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkTopology {
    msc_id: String,
    bscs: Vec<BscConfig>,
    area_km: f64,
}

impl NetworkTopology {
    pub fn msc_id(&self) -> &str {
        &self.msc_id
    }

    /// Controllers ordered by id; `bscs()[0]` is home.
    pub fn bscs(&self) -> &[BscConfig] {
        &self.bscs
    }

    pub fn bsc_count(&self) -> usize {
        self.bscs.len()
    }

    pub fn area_km(&self) -> f64 {
        self.area_km
    }

    pub fn home(&self) -> &BscConfig {
        &self.bscs[0]
    }

    pub fn home_channels(&self) -> u32 {
        self.home().free_channels
    }

    pub fn channels(&self, id: BscId) -> u32 {
        self.bscs[id.0].free_channels
    }

    pub fn neighbor_channels_total(&self) -> u64 {
        self.bscs[1..]
            .iter()
            .map(|b| u64::from(b.free_channels))
            .sum()
    }

    pub fn contains(&self, id: BscId) -> bool {
        id.0 < self.bscs.len()
    }
}

pub fn build_topology(config: &TopologyConfig) -> Result<NetworkTopology, TopologyError> {
    let count = config.bscs.len();
    if count < 2 {
        return Err(TopologyError::TooFewBscs(count));
    }
    if !(config.area_km.is_finite() && config.area_km > 0.0) {
        return Err(TopologyError::InvalidArea(config.area_km));
    }

    let mut seen = BTreeSet::new();
    let mut bscs = Vec::with_capacity(count);
    for spec in &config.bscs {
        if !seen.insert(spec.id) {
            return Err(TopologyError::DuplicateId(spec.id));
        }
        if spec.id >= count {
            return Err(TopologyError::IdOutOfRange { id: spec.id, count });
        }
        if spec.free_channels < 0 {
            return Err(TopologyError::NegativeChannels {
                id: spec.id,
                channels: spec.free_channels,
            });
        }
        let free_channels =
            u32::try_from(spec.free_channels).map_err(|_| TopologyError::ChannelsOutOfRange {
                id: spec.id,
                channels: spec.free_channels,
            })?;
        let cells = match u32::try_from(spec.cells) {
            Ok(c) if c >= 1 => c,
            _ => {
                return Err(TopologyError::InvalidCells {
                    id: spec.id,
                    cells: spec.cells,
                })
            }
        };
        bscs.push(BscConfig {
            id: BscId(spec.id),
            cells,
            free_channels,
        });
    }
    bscs.sort_by_key(|b| b.id);

    Ok(NetworkTopology {
        msc_id: config.msc_id.clone(),
        bscs,
        area_km: config.area_km,
    })
}

/// Every BSC except home, ascending. This is the round-robin rotation order.
pub fn neighbor_ids(topology: &NetworkTopology) -> Vec<BscId> {
    topology.bscs[1..].iter().map(|b| b.id).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("{0} has no free channel")]
    Exhausted(BscId),
    #[error("{0} has no assigned channel to release")]
    NothingAssigned(BscId),
    #[error("{0} is not part of the topology")]
    UnknownBsc(BscId),
}

/// Remaining-channel counters for one simulation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelLedger {
    initial: Vec<u32>,
    remaining: Vec<u32>,
}

impl ChannelLedger {
    pub fn new(topology: &NetworkTopology) -> Self {
        let initial: Vec<u32> = topology.bscs.iter().map(|b| b.free_channels).collect();
        ChannelLedger {
            remaining: initial.clone(),
            initial,
        }
    }

    pub fn initial(&self, id: BscId) -> u32 {
        self.initial[id.0]
    }

    pub fn remaining(&self, id: BscId) -> u32 {
        self.remaining[id.0]
    }

    pub fn assigned(&self, id: BscId) -> u32 {
        self.initial[id.0] - self.remaining[id.0]
    }

    pub fn has_free(&self, id: BscId) -> bool {
        self.remaining.get(id.0).is_some_and(|&r| r > 0)
    }

    pub fn assign(&mut self, id: BscId) -> Result<(), LedgerError> {
        let slot = self
            .remaining
            .get_mut(id.0)
            .ok_or(LedgerError::UnknownBsc(id))?;
        if *slot == 0 {
            return Err(LedgerError::Exhausted(id));
        }
        *slot -= 1;
        Ok(())
    }

    pub fn release(&mut self, id: BscId) -> Result<(), LedgerError> {
        let initial = *self.initial.get(id.0).ok_or(LedgerError::UnknownBsc(id))?;
        let slot = &mut self.remaining[id.0];
        if *slot == initial {
            return Err(LedgerError::NothingAssigned(id));
        }
        *slot += 1;
        Ok(())
    }
}
