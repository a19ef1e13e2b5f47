use nalgebra::{DMatrix, DVector};

use crate::baseline::{fit_baseline, BaselineSummary};
use crate::cloud::PointCloud;
use crate::config::DriftConfig;
use crate::density::DensityModel;
use crate::error::{DriftError, Result};

/// Default step scale for the outer finite difference: the per-axis step is
/// `bandwidth_k * STRAIN_STEP_SCALE`.
pub const STRAIN_STEP_SCALE: f64 = 0.1;

/// Above this dimension the strain summary works in the PCA-reduced space
/// instead of the full feature space.
pub const STRAIN_FULL_SPACE_MAX_DIM: usize = 20;

/// Local deformation at one point: displacement, its spatial gradient, and
/// the derived normal / shear / volumetric readouts.
#[derive(Debug, Clone)]
pub struct StrainSample {
    /// Where the sample was taken.
    pub location: DVector<f64>,
    /// Displacement field value `v(x)`.
    pub displacement: DVector<f64>,
    /// Strain tensor `grad v(x)`, row `j` differentiates `v_j`.
    pub tensor: DMatrix<f64>,
    /// Diagonal of the tensor: per-axis stretch (+) or compression (-).
    pub normal: DVector<f64>,
    /// Symmetric part of the tensor with zero diagonal: relationship shifts
    /// between axis pairs.
    pub shear: DMatrix<f64>,
    /// Trace of the tensor: overall expansion or contraction.
    pub volumetric: f64,
}

impl StrainSample {
    fn from_tensor(location: DVector<f64>, displacement: DVector<f64>, tensor: DMatrix<f64>) -> Self {
        let d = tensor.nrows();
        let normal = DVector::from_fn(d, |i, _| tensor[(i, i)]);
        let mut shear = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    shear[(i, j)] = 0.5 * (tensor[(i, j)] + tensor[(j, i)]);
                }
            }
        }
        let volumetric = normal.iter().sum();
        StrainSample {
            location,
            displacement,
            tensor,
            normal,
            shear,
            volumetric,
        }
    }
}

/// Aggregated strain over an evaluation set.
#[derive(Debug, Clone)]
pub struct StrainSummary {
    pub samples: Vec<StrainSample>,
    /// Mean `|normal_i|` per axis: the data-drift signal.
    pub mean_abs_normal: Vec<f64>,
    /// Mean `|shear_ij|` per axis pair `(i, j)`, `i < j`: the concept-drift
    /// signal.
    pub mean_abs_shear: Vec<(usize, usize, f64)>,
    /// Mean signed volumetric strain.
    pub mean_volumetric: f64,
}

fn check_model_dims(old: &DensityModel, new: &DensityModel) -> Result<()> {
    if old.dim() != new.dim() {
        return Err(DriftError::DimensionMismatch {
            expected: old.dim(),
            actual: new.dim(),
        });
    }
    Ok(())
}

/// Displacement field `v(x) = grad p_new(x) - grad p_old(x)`, with the
/// gradients taken in closed form from the Gaussian mixtures and the
/// proportionality constant fixed at 1.
pub fn displacement_at(
    old: &DensityModel,
    new: &DensityModel,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    check_model_dims(old, new)?;
    let (_, grad_new) = new.density_and_gradient(x)?;
    let (_, grad_old) = old.density_and_gradient(x)?;
    Ok(grad_new - grad_old)
}

/// Strain of an arbitrary displacement field by central finite differences
/// with per-axis absolute steps.
///
/// This is the seam the KDE-backed `strain_at` routes through, so tests can
/// inject analytic fields and check recovery independently of the density
/// machinery.
pub fn strain_from_field<F>(field: F, x: &DVector<f64>, steps: &DVector<f64>) -> Result<StrainSample>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let d = x.len();
    if steps.len() != d {
        return Err(DriftError::ShapeMismatch {
            what: "finite-difference steps",
            expected: d,
            actual: steps.len(),
        });
    }
    if steps.iter().any(|&s| !(s > 0.0)) {
        return Err(DriftError::InvalidConfig(
            "finite-difference steps must be positive".to_string(),
        ));
    }
    let displacement = field(x)?;
    if displacement.len() != d {
        return Err(DriftError::DimensionMismatch {
            expected: d,
            actual: displacement.len(),
        });
    }
    let mut tensor = DMatrix::zeros(d, d);
    for k in 0..d {
        let mut fwd = x.clone();
        let mut bwd = x.clone();
        fwd[k] += steps[k];
        bwd[k] -= steps[k];
        let column = (field(&fwd)? - field(&bwd)?) / (2.0 * steps[k]);
        for j in 0..d {
            tensor[(j, k)] = column[j];
        }
    }
    Ok(StrainSample::from_tensor(x.clone(), displacement, tensor))
}

/// Strain tensor of the KDE displacement field at `x`.
///
/// Outer derivative by central differences with step `h_k * step_scale`,
/// where `h_k` is the old model's bandwidth along axis `k`.
pub fn strain_at(
    old: &DensityModel,
    new: &DensityModel,
    x: &DVector<f64>,
    step_scale: f64,
) -> Result<StrainSample> {
    check_model_dims(old, new)?;
    if !(step_scale > 0.0) {
        return Err(DriftError::InvalidConfig(format!(
            "step_scale must be positive, got {step_scale}"
        )));
    }
    let steps = old.bandwidths() * step_scale;
    strain_from_field(|q| displacement_at(old, new, q), x, &steps)
}

/// The default strain evaluation set: the baseline points plus their mean.
pub fn default_eval_points(baseline: &BaselineSummary) -> PointCloud {
    let cloud = baseline.retained_points();
    let mut rows: Vec<Vec<f64>> = (0..cloud.len())
        .map(|i| cloud.points().row(i).iter().copied().collect())
        .collect();
    rows.push(baseline.mean().iter().copied().collect());
    PointCloud::from_rows(&rows).expect("baseline points are always a valid cloud")
}

/// Per-point strain samples plus aggregates over an evaluation set.
///
/// Above `STRAIN_FULL_SPACE_MAX_DIM` dimensions the computation moves to the
/// top `cfg.reduce_dims` principal axes of the old model's points; reported
/// axis indices then refer to that reduced space.
pub fn strain_summary(
    old: &DensityModel,
    new: &DensityModel,
    eval_points: &PointCloud,
    cfg: &DriftConfig,
) -> Result<StrainSummary> {
    check_model_dims(old, new)?;
    if eval_points.is_empty() {
        return Err(DriftError::EmptyEvaluationSet);
    }
    if eval_points.dim() != old.dim() {
        return Err(DriftError::DimensionMismatch {
            expected: old.dim(),
            actual: eval_points.dim(),
        });
    }

    if old.dim() > STRAIN_FULL_SPACE_MAX_DIM {
        let (old_r, new_r, eval_r) = reduce_for_strain(old, new, eval_points, cfg)?;
        return strain_summary(&old_r, &new_r, &eval_r, cfg);
    }

    let samples: Vec<StrainSample> = (0..eval_points.len())
        .map(|i| strain_at(old, new, &eval_points.point(i), STRAIN_STEP_SCALE))
        .collect::<Result<_>>()?;

    let d = old.dim();
    let n = samples.len() as f64;
    let mean_abs_normal: Vec<f64> = (0..d)
        .map(|i| samples.iter().map(|s| s.normal[i].abs()).sum::<f64>() / n)
        .collect();
    let mut mean_abs_shear = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            let mean = samples.iter().map(|s| s.shear[(i, j)].abs()).sum::<f64>() / n;
            mean_abs_shear.push((i, j, mean));
        }
    }
    let mean_volumetric = samples.iter().map(|s| s.volumetric).sum::<f64>() / n;

    Ok(StrainSummary {
        samples,
        mean_abs_normal,
        mean_abs_shear,
        mean_volumetric,
    })
}

/// Project both models and the evaluation set onto the top principal axes
/// of the old model's points. Bandwidths are refitted by Scott's rule in the
/// reduced space.
fn reduce_for_strain(
    old: &DensityModel,
    new: &DensityModel,
    eval_points: &PointCloud,
    cfg: &DriftConfig,
) -> Result<(DensityModel, DensityModel, PointCloud)> {
    use crate::geometry::fit_projection;

    let r = cfg.reduce_dims.min(old.dim());
    let old_cloud = PointCloud::new(old.source_points().clone(), None, None)?;
    let basis_fit = fit_baseline(&old_cloud, cfg)?;
    let projection = fit_projection(&basis_fit, r)?;

    let project = |matrix: &DMatrix<f64>| -> Result<PointCloud> {
        let rows: Vec<Vec<f64>> = (0..matrix.nrows())
            .map(|i| {
                let p = matrix.row(i).transpose();
                projection.project(&p).iter().copied().collect()
            })
            .collect();
        PointCloud::from_rows(&rows)
    };

    let old_proj = project(old.source_points())?;
    let new_proj = project(new.source_points())?;
    let eval_proj = project(eval_points.points())?;

    let scott = |cloud: &PointCloud| -> Result<DensityModel> {
        let summary = fit_baseline(cloud, &DriftConfig::default())?;
        DensityModel::new(cloud, summary.bandwidths().clone())
    };
    Ok((scott(&old_proj)?, scott(&new_proj)?, eval_proj))
}
