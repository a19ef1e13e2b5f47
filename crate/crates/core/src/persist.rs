use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::baseline::BaselineSummary;
use crate::cloud::PointCloud;
use crate::config::DriftConfig;
use crate::error::{DriftError, Result};
use crate::report::ConfigEcho;

/// Version of the baseline file layout.
pub const BASELINE_SCHEMA_VERSION: u32 = 1;

/// Self-describing on-disk form of a fitted baseline. Matrices are stored
/// as row lists so the file is readable without this crate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaselineFile {
    pub schema_version: u32,
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub stds: Vec<f64>,
    pub bandwidths: Vec<f64>,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub feature_names: Option<Vec<String>>,
    pub retained_points: Vec<Vec<f64>>,
    pub config_echo: ConfigEcho,
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

fn rows_matrix(rows: &[Vec<f64>], what: &'static str) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return Err(DriftError::EmptyCloud);
    }
    let d = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(DriftError::RaggedRows {
                row: i,
                expected: d,
                actual: row.len(),
            });
        }
    }
    let _ = what;
    Ok(DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]))
}

impl BaselineFile {
    pub fn from_summary(summary: &BaselineSummary, cfg: &DriftConfig) -> Self {
        BaselineFile {
            schema_version: BASELINE_SCHEMA_VERSION,
            mean: summary.mean().iter().copied().collect(),
            covariance: matrix_rows(summary.covariance()),
            eigenvalues: summary.eigenvalues().iter().copied().collect(),
            eigenvectors: matrix_rows(summary.eigenvectors()),
            stds: summary.stds().iter().copied().collect(),
            bandwidths: summary.bandwidths().iter().copied().collect(),
            count: summary.count(),
            feature_names: summary
                .retained_points()
                .feature_names()
                .map(|n| n.to_vec()),
            retained_points: matrix_rows(summary.retained_points().points()),
            config_echo: ConfigEcho::from(cfg),
        }
    }

    pub fn into_summary(&self) -> Result<BaselineSummary> {
        let points = rows_matrix(&self.retained_points, "retained_points")?;
        let cloud = PointCloud::new(points, None, self.feature_names.clone())?;
        BaselineSummary::from_parts(
            DVector::from_column_slice(&self.mean),
            rows_matrix(&self.covariance, "covariance")?,
            DVector::from_column_slice(&self.eigenvalues),
            rows_matrix(&self.eigenvectors, "eigenvectors")?,
            DVector::from_column_slice(&self.stds),
            DVector::from_column_slice(&self.bandwidths),
            self.count,
            cloud,
        )
    }

    /// The configuration the baseline was fitted under.
    pub fn config(&self) -> DriftConfig {
        DriftConfig::from(&self.config_echo)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("baseline serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| DriftError::InvalidConfig(format!("baseline file: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::fit_baseline;

    #[test]
    fn baseline_file_round_trips_through_json() {
        let cloud = PointCloud::new(
            DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 2.0, 0.5, 1.0, 2.0]),
            None,
            Some(vec!["x".into(), "y".into()]),
        )
        .unwrap();
        let cfg = DriftConfig::default();
        let summary = fit_baseline(&cloud, &cfg).unwrap();
        let file = BaselineFile::from_summary(&summary, &cfg);
        let json = file.to_json_pretty();
        let back = BaselineFile::from_json(&json).unwrap();
        let restored = back.into_summary().unwrap();
        assert_eq!(restored.mean(), summary.mean());
        assert_eq!(restored.covariance(), summary.covariance());
        assert_eq!(restored.eigenvalues(), summary.eigenvalues());
        assert_eq!(restored.bandwidths(), summary.bandwidths());
        assert_eq!(restored.count(), summary.count());
        assert_eq!(
            restored.retained_points().feature_names(),
            summary.retained_points().feature_names()
        );
        // Serialization is deterministic: same summary, same bytes.
        assert_eq!(json, BaselineFile::from_summary(&summary, &cfg).to_json_pretty());
    }
}
