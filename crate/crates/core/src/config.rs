use crate::geometry::TAU;
use crate::plan::DEFAULT_ENUMERATION_LIMIT;
use serde::{Deserialize, Serialize};

/// Construction and verification settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PackConfig {
    /// Regions whose governing scale is at most this are filled by grids.
    pub base_cutoff: f64,
    /// Aspect constant `c` of Type 1 rectangles.
    pub c: f64,
    /// Maximum number of placements materialized for verification.
    pub limit: u64,
    /// Tolerance for geometric predicates.
    pub tau: f64,
    /// Uniform coverage samples; seams get an extra tenth of this.
    pub samples: u64,
    pub seed: u64,
}

impl Default for PackConfig {
    fn default() -> Self {
        Self {
            base_cutoff: 100.0,
            c: 7.0,
            limit: DEFAULT_ENUMERATION_LIMIT,
            tau: TAU,
            samples: 1_000_000,
            seed: 0,
        }
    }
}
