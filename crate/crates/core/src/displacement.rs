use nalgebra::DVector;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::baseline::BaselineSummary;
use crate::cloud::PointCloud;
use crate::config::DriftConfig;
use crate::error::{DriftError, Result};
use crate::report::MaybeInf;

/// The pull a single new point exerts on the baseline center.
#[derive(Debug, Clone)]
pub struct Force {
    /// Identifier of the new point, when its cloud carries ids.
    pub id: Option<String>,
    /// The force vector `x_i - mu`.
    pub vector: DVector<f64>,
    /// Euclidean norm of the force vector.
    pub raw_magnitude: f64,
    /// `|F| * exp(-k |F|)`: influence that fades with distance.
    pub faded_magnitude: f64,
    /// `|F| / pooled_std`; `+inf` when the baseline has zero spread.
    pub spread_relative_magnitude: f64,
}

impl Serialize for Force {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Force", 5)?;
        s.serialize_field("id", &self.id)?;
        s.serialize_field("vector", &self.vector.iter().copied().collect::<Vec<f64>>())?;
        s.serialize_field("raw_magnitude", &self.raw_magnitude)?;
        s.serialize_field("faded_magnitude", &self.faded_magnitude)?;
        // Degenerate baselines have no spread; JSON carries the sentinel.
        s.serialize_field(
            "spread_relative_magnitude",
            &MaybeInf(self.spread_relative_magnitude),
        )?;
        s.end()
    }
}

/// Per-new-point forces against a frozen baseline center.
#[derive(Debug, Clone)]
pub struct ForceField {
    forces: Vec<Force>,
    center: DVector<f64>,
}

impl Serialize for ForceField {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ForceField", 2)?;
        s.serialize_field("forces", &self.forces)?;
        s.serialize_field("center", &self.center.iter().copied().collect::<Vec<f64>>())?;
        s.end()
    }
}

impl ForceField {
    pub fn forces(&self) -> &[Force] {
        &self.forces
    }

    /// The baseline mean the forces were measured against.
    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn len(&self) -> usize {
        self.forces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forces.is_empty()
    }
}

/// Compute one force per new point, order preserved: `F_i = x_i - mu`.
pub fn force_field(
    baseline: &BaselineSummary,
    new_cloud: &PointCloud,
    cfg: &DriftConfig,
) -> Result<ForceField> {
    if new_cloud.dim() != baseline.dim() {
        return Err(DriftError::DimensionMismatch {
            expected: baseline.dim(),
            actual: new_cloud.dim(),
        });
    }
    let pooled = baseline.pooled_std();
    let forces = (0..new_cloud.len())
        .map(|i| {
            let vector = new_cloud.point(i) - baseline.mean();
            let raw = vector.norm();
            Force {
                id: new_cloud.ids().map(|ids| ids[i].clone()),
                raw_magnitude: raw,
                faded_magnitude: raw * (-cfg.fade_k * raw).exp(),
                spread_relative_magnitude: if pooled > 0.0 {
                    raw / pooled
                } else {
                    f64::INFINITY
                },
                vector,
            }
        })
        .collect();
    Ok(ForceField {
        forces,
        center: baseline.mean().clone(),
    })
}

/// Average displacement `D`: the arithmetic mean of the raw force magnitudes.
///
/// Faded and spread-relative magnitudes are reported alongside in the force
/// field but never enter `D`.
pub fn average_displacement(field: &ForceField) -> Result<f64> {
    if field.is_empty() {
        return Err(DriftError::EmptyField);
    }
    let sum: f64 = field.forces().iter().map(|f| f.raw_magnitude).sum();
    Ok(sum / field.len() as f64)
}
