//! Spherical hole descriptions shared by the generator, the repair
//! optimizer, the detector and the serialization layer.

use serde::{Deserialize, Serialize};

use crate::cloud::{dist, PointCloud};
use crate::error::{Error, Result};

/// A ball-shaped defect: points strictly inside `B(center, radius)` are
/// considered missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleSpec {
    /// Ambient-space center.
    pub center: Vec<f64>,
    /// Strictly positive radius.
    pub radius: f64,
}

impl HoleSpec {
    /// Creates a validated hole description.
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        let hole = HoleSpec { center, radius };
        hole.validate(None)?;
        Ok(hole)
    }

    /// Checks finiteness, positivity, and (optionally) the ambient dimension.
    pub fn validate(&self, expect_dim: Option<usize>) -> Result<()> {
        if self.center.is_empty() {
            return Err(Error::invalid("hole center must have at least one coordinate"));
        }
        if let Some(pos) = self.center.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "hole center coordinate {pos} is not finite"
            )));
        }
        if !self.radius.is_finite() || self.radius <= 0.0 {
            return Err(Error::invalid(format!(
                "hole radius must be finite and > 0, got {}",
                self.radius
            )));
        }
        if let Some(dim) = expect_dim {
            if self.center.len() != dim {
                return Err(Error::invalid(format!(
                    "hole center has dimension {}, expected {}",
                    self.center.len(),
                    dim
                )));
            }
        }
        Ok(())
    }

    /// Whether `point` lies strictly inside the hole.
    pub fn contains(&self, point: &[f64]) -> bool {
        dist(&self.center, point) < self.radius
    }

    /// Distance from `point` to the hole center.
    pub fn center_dist(&self, point: &[f64]) -> f64 {
        dist(&self.center, point)
    }
}

/// Validates a hole list against a cloud's ambient dimension.
pub fn validate_holes(holes: &[HoleSpec], cloud: &PointCloud) -> Result<()> {
    for (k, hole) in holes.iter().enumerate() {
        hole.validate(Some(cloud.ambient_dim()))
            .map_err(|e| Error::invalid(format!("holes[{k}]: {e}")))?;
    }
    Ok(())
}
