//! Measurement settings: two angles per unit, where a unit is either a single
//! party or a whole region sharing its angles.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{PibiError, Result};
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SettingsMode {
    PerParty,
    PerRegion,
}

/// Angles `theta[unit][setting]` in radians, stored modulo 2π.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSettings {
    pub mode: SettingsMode,
    angles: Vec<[f64; 2]>,
}

impl MeasurementSettings {
    pub fn per_party(angles: Vec<[f64; 2]>) -> Result<Self> {
        Self::build(SettingsMode::PerParty, angles)
    }

    pub fn per_region(angles: Vec<[f64; 2]>) -> Result<Self> {
        Self::build(SettingsMode::PerRegion, angles)
    }

    fn build(mode: SettingsMode, angles: Vec<[f64; 2]>) -> Result<Self> {
        if angles.is_empty() {
            return Err(PibiError::InvalidInput("settings need at least one unit".into()));
        }
        if angles.iter().flatten().any(|a| !a.is_finite()) {
            return Err(PibiError::InvalidInput("angles must be finite".into()));
        }
        let angles = angles
            .into_iter()
            .map(|[a, b]| [a.rem_euclid(TAU), b.rem_euclid(TAU)])
            .collect();
        Ok(MeasurementSettings { mode, angles })
    }

    /// Identical angles for every unit.
    pub fn uniform(mode: SettingsMode, units: usize, theta0: f64, theta1: f64) -> Result<Self> {
        Self::build(mode, vec![[theta0, theta1]; units])
    }

    pub fn num_units(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[[f64; 2]] {
        &self.angles
    }

    pub fn angle(&self, unit: usize, setting: usize) -> f64 {
        self.angles[unit][setting]
    }

    pub fn set_angle(&mut self, unit: usize, setting: usize, theta: f64) {
        self.angles[unit][setting] = theta.rem_euclid(TAU);
    }

    /// Expand to one angle pair per party under the given partition.
    ///
    /// Per-party settings pass through (after a length check); per-region
    /// settings are replicated across the parties of each block.
    pub fn expand_per_party(&self, partition: &Partition) -> Result<MeasurementSettings> {
        match self.mode {
            SettingsMode::PerParty => {
                if self.angles.len() != partition.n() {
                    return Err(PibiError::Dimension(format!(
                        "{} per-party angle pairs for {} parties",
                        self.angles.len(),
                        partition.n()
                    )));
                }
                Ok(self.clone())
            }
            SettingsMode::PerRegion => {
                if self.angles.len() != partition.num_blocks() {
                    return Err(PibiError::Dimension(format!(
                        "{} per-region angle pairs for {} blocks",
                        self.angles.len(),
                        partition.num_blocks()
                    )));
                }
                let mut out = Vec::with_capacity(partition.n());
                for (block, &size) in partition.sizes().iter().enumerate() {
                    for _ in 0..size {
                        out.push(self.angles[block]);
                    }
                }
                Ok(MeasurementSettings {
                    mode: SettingsMode::PerParty,
                    angles: out,
                })
            }
        }
    }

    /// Angle pairs of the parties inside each block, per-party mode only.
    pub fn block_angles(&self, partition: &Partition) -> Result<Vec<Vec<[f64; 2]>>> {
        let expanded = self.expand_per_party(partition)?;
        Ok(partition
            .block_ranges()
            .into_iter()
            .map(|r| expanded.angles[r].to_vec())
            .collect())
    }
}
