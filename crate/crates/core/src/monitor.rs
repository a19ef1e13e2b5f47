use nalgebra::{DMatrix, DVector};

use crate::baseline::{fit_baseline, BaselineSummary};
use crate::cloud::PointCloud;
use crate::config::DriftConfig;
use crate::density::{kl_divergence, wasserstein_1d, DensityModel};
use crate::displacement::{average_displacement, force_field};
use crate::error::{DriftError, Result};
use crate::report::{ConfigEcho, DeformationReport, MaybeInf, StrainAggregates, REPORT_SCHEMA_VERSION};
use crate::shape::shape_deformation;
use crate::strain::{default_eval_points, strain_summary};

/// Single-pass mean and scatter accumulator with an exact parallel merge,
/// for rebuilding baselines over streams without a second pass.
///
/// The scatter matrix `m2` accumulates so that `covariance = m2 / (count-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningStats {
    count: usize,
    mean: DVector<f64>,
    m2: DMatrix<f64>,
}

impl RunningStats {
    pub fn new(dim: usize) -> Self {
        RunningStats {
            count: 0,
            mean: DVector::zeros(dim),
            m2: DMatrix::zeros(dim, dim),
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Running mean; zero vector before the first update.
    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// Accumulated scatter matrix.
    pub fn m2(&self) -> &DMatrix<f64> {
        &self.m2
    }

    /// Unbiased covariance `m2 / (count - 1)`; needs at least two points.
    pub fn covariance(&self) -> Result<DMatrix<f64>> {
        if self.count < 2 {
            return Err(DriftError::TooFewPoints {
                needed: 2,
                actual: self.count,
            });
        }
        Ok(&self.m2 / (self.count - 1) as f64)
    }

    /// Fold one point in. The scatter increment `(n-1)/n * delta delta^T`
    /// is formed from a single outer product, so `m2` stays exactly
    /// symmetric.
    pub fn update(&mut self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(DriftError::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        self.count += 1;
        let n = self.count as f64;
        let delta = x - &self.mean;
        self.mean += &delta / n;
        let weight = (n - 1.0) / n;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                self.m2[(i, j)] += weight * delta[i] * delta[j];
            }
        }
        Ok(())
    }

    /// Exact parallel combination of two accumulators (Chan's formula).
    pub fn merge(&self, other: &RunningStats) -> Result<RunningStats> {
        if self.dim() != other.dim() {
            return Err(DriftError::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        if self.count == 0 {
            return Ok(other.clone());
        }
        if other.count == 0 {
            return Ok(self.clone());
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let total = na + nb;
        let delta = &other.mean - &self.mean;
        let mean = (&self.mean * na + &other.mean * nb) / total;
        let weight = na * nb / total;
        let mut m2 = &self.m2 + &other.m2;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                m2[(i, j)] += weight * delta[i] * delta[j];
            }
        }
        Ok(RunningStats {
            count: self.count + other.count,
            mean,
            m2,
        })
    }

    /// Fold in every point of a cloud.
    pub fn update_cloud(&mut self, cloud: &PointCloud) -> Result<()> {
        for i in 0..cloud.len() {
            self.update(&cloud.point(i))?;
        }
        Ok(())
    }
}

/// Evaluate one batch against a frozen baseline, producing the full metric
/// bundle. Batches with fewer than two points degrade to a displacement-only
/// partial report instead of erroring the stream.
pub fn evaluate_batch(
    baseline: &BaselineSummary,
    batch: &PointCloud,
    cfg: &DriftConfig,
) -> Result<DeformationReport> {
    cfg.validate()?;
    if batch.dim() != baseline.dim() {
        return Err(DriftError::DimensionMismatch {
            expected: baseline.dim(),
            actual: batch.dim(),
        });
    }

    let field = force_field(baseline, batch, cfg)?;
    let average = average_displacement(&field)?;

    let mut report = DeformationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        average_displacement: average,
        eigen_ratios: None,
        rotation_angles_rad: None,
        degenerate_flags: None,
        d_mu: None,
        d_sigma: None,
        d_total: None,
        drifted: None,
        kl_estimate: None,
        wasserstein_per_feature: None,
        wasserstein_mean: None,
        strain: None,
        partial: true,
        skipped_rows: None,
        config_echo: ConfigEcho::from(cfg),
    };

    if batch.len() < 2 {
        return Ok(report);
    }

    let new_summary = fit_baseline(batch, cfg)?;
    let shape = shape_deformation(baseline, &new_summary, cfg)?;

    let old_model = DensityModel::from_baseline(baseline);
    let new_model = DensityModel::from_baseline(&new_summary);
    let kl = kl_divergence(&old_model, &new_model, cfg)?;

    let d = baseline.dim();
    let mut per_feature = Vec::with_capacity(d);
    for j in 0..d {
        per_feature.push(wasserstein_1d(
            &baseline.retained_points().feature_column(j),
            &batch.feature_column(j),
        )?);
    }
    let wasserstein_mean = per_feature.iter().sum::<f64>() / d as f64;

    let eval = default_eval_points(baseline);
    let strain = strain_summary(&old_model, &new_model, &eval, cfg)?;

    report.eigen_ratios = Some(shape.stretch_ratios.iter().copied().map(MaybeInf).collect());
    report.rotation_angles_rad = Some(shape.rotation_angles_rad);
    report.degenerate_flags = Some(shape.degenerate_flags);
    report.d_mu = Some(shape.d_mu);
    report.d_sigma = Some(shape.d_sigma);
    report.d_total = Some(shape.d_total);
    report.drifted = Some(shape.drifted);
    report.kl_estimate = Some(kl);
    report.wasserstein_per_feature = Some(per_feature);
    report.wasserstein_mean = Some(wasserstein_mean);
    report.strain = Some(StrainAggregates {
        mean_abs_normal: strain.mean_abs_normal,
        mean_abs_shear: strain.mean_abs_shear,
        mean_volumetric: strain.mean_volumetric,
    });
    report.partial = false;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn stats_of(values: &[f64]) -> RunningStats {
        let mut stats = RunningStats::new(1);
        for &v in values {
            stats.update(&DVector::from_column_slice(&[v])).unwrap();
        }
        stats
    }

    #[test]
    fn update_tracks_mean_and_sample_variance() {
        let stats = stats_of(&[1.0, 2.0, 3.0, 4.0]);
        assert_relative_eq!(stats.mean()[0], 2.5, epsilon = 1e-12);
        assert_relative_eq!(
            stats.covariance().unwrap()[(0, 0)],
            5.0 / 3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn first_update_sets_mean_and_zero_scatter() {
        let mut stats = RunningStats::new(2);
        stats
            .update(&DVector::from_column_slice(&[3.0, -1.0]))
            .unwrap();
        assert_eq!(stats.count(), 1);
        assert_eq!(stats.mean(), &DVector::from_column_slice(&[3.0, -1.0]));
        assert!(stats.m2().iter().all(|&v| v == 0.0));
        assert!(stats.covariance().is_err());
    }

    #[test]
    fn merge_equals_concatenation() {
        let a = stats_of(&[1.0, 2.0]);
        let b = stats_of(&[3.0, 4.0]);
        let merged = a.merge(&b).unwrap();
        let direct = stats_of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(merged.count(), 4);
        assert_relative_eq!(merged.mean()[0], direct.mean()[0], epsilon = 1e-12);
        assert_relative_eq!(
            merged.covariance().unwrap()[(0, 0)],
            direct.covariance().unwrap()[(0, 0)],
            epsilon = 1e-12
        );
    }

    #[test]
    fn merge_with_empty_is_identity_and_commutative() {
        let a = stats_of(&[1.0, 5.0, -2.0]);
        let empty = RunningStats::new(1);
        assert_eq!(a.merge(&empty).unwrap(), a);
        assert_eq!(empty.merge(&a).unwrap(), a);

        let b = stats_of(&[0.5, 0.25]);
        let ab = a.merge(&b).unwrap();
        let ba = b.merge(&a).unwrap();
        assert_eq!(ab.count(), ba.count());
        assert_relative_eq!(ab.mean()[0], ba.mean()[0], epsilon = 1e-12);
        assert_relative_eq!(
            ab.covariance().unwrap()[(0, 0)],
            ba.covariance().unwrap()[(0, 0)],
            epsilon = 1e-12
        );
    }

    fn ages_around(center: f64) -> PointCloud {
        let rows: Vec<Vec<f64>> = (-5..=5).map(|i| vec![center + i as f64]).collect();
        PointCloud::from_rows(&rows).unwrap()
    }

    #[test]
    fn healthcare_age_shift_trips_the_threshold() {
        let baseline = fit_baseline(&ages_around(55.0), &DriftConfig::default()).unwrap();
        let cfg = DriftConfig {
            alpha: 1.0,
            beta: 0.0,
            threshold: 10.0,
            ..DriftConfig::default()
        };
        let report = evaluate_batch(&baseline, &ages_around(70.0), &cfg).unwrap();
        assert_relative_eq!(report.d_mu.unwrap(), 15.0, epsilon = 1e-9);
        assert_relative_eq!(report.d_total.unwrap(), 15.0, epsilon = 1e-9);
        assert_eq!(report.drifted, Some(true));
        assert!(!report.partial);
    }

    #[test]
    fn identical_batch_reports_no_drift() {
        let cloud = PointCloud::from_rows(&[
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![2.0, 2.0],
            vec![-1.0, 0.5],
        ])
        .unwrap();
        let baseline = fit_baseline(&cloud, &DriftConfig::default()).unwrap();
        let cfg = DriftConfig {
            threshold: 0.5,
            ..DriftConfig::default()
        };
        let report = evaluate_batch(&baseline, &cloud, &cfg).unwrap();
        for r in report.eigen_ratios.as_ref().unwrap() {
            assert_relative_eq!(r.0, 1.0, epsilon = 1e-12);
        }
        assert_eq!(report.kl_estimate, Some(0.0));
        assert_eq!(report.d_mu, Some(0.0));
        assert_eq!(report.d_sigma, Some(0.0));
        assert_eq!(report.drifted, Some(false));
        assert!(report
            .wasserstein_per_feature
            .unwrap()
            .iter()
            .all(|&w| w == 0.0));
    }

    #[test]
    fn single_point_batch_degrades_to_partial() {
        let baseline = fit_baseline(&ages_around(0.0), &DriftConfig::default()).unwrap();
        let batch = PointCloud::from_rows(&[vec![4.0]]).unwrap();
        let report = evaluate_batch(&baseline, &batch, &DriftConfig::default()).unwrap();
        assert!(report.partial);
        assert_eq!(report.eigen_ratios, None);
        assert_eq!(report.d_mu, None);
        assert_eq!(report.drifted, None);
        assert_eq!(report.strain, None);
        assert_relative_eq!(report.average_displacement, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn report_json_is_bit_identical_across_runs() {
        let baseline = fit_baseline(&ages_around(10.0), &DriftConfig::default()).unwrap();
        let batch = ages_around(12.5);
        let a = evaluate_batch(&baseline, &batch, &DriftConfig::default()).unwrap();
        let b = evaluate_batch(&baseline, &batch, &DriftConfig::default()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn verdict_is_monotone_in_the_threshold() {
        let baseline = fit_baseline(&ages_around(0.0), &DriftConfig::default()).unwrap();
        let batch = ages_around(3.0);
        let mut last_drifted = true;
        for threshold in [0.5, 1.0, 2.0, 4.0, 8.0, f64::INFINITY] {
            let cfg = DriftConfig {
                alpha: 1.0,
                beta: 0.0,
                threshold,
                ..DriftConfig::default()
            };
            let drifted = evaluate_batch(&baseline, &batch, &cfg)
                .unwrap()
                .drifted
                .unwrap();
            assert!(
                !(drifted && !last_drifted),
                "raising T must never switch the verdict on"
            );
            last_drifted = drifted;
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let baseline = fit_baseline(&ages_around(0.0), &DriftConfig::default()).unwrap();
        let batch = PointCloud::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            evaluate_batch(&baseline, &batch, &DriftConfig::default()).unwrap_err(),
            DriftError::DimensionMismatch { .. }
        ));
    }
}
