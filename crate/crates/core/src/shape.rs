use nalgebra::{DMatrix, DVector};

use crate::baseline::BaselineSummary;
use crate::config::DriftConfig;
use crate::error::{DriftError, Result};

/// Relative tolerance below which an eigenvalue counts as zero when
/// forming stretch/compress ratios.
const ZERO_EIG_REL: f64 = 1e-10;

/// Covariance-based global deformation between two summaries.
///
/// `stretch_ratios[i]` is `lambda_new_i / lambda_old_i` (1 when both vanish,
/// `+inf` when only the old one does). `rotation_angles_rad[i]` is the angle
/// between the rank-i eigenvectors, folded into `[0, pi/2]` by the absolute
/// dot product. `degenerate_flags[i]` marks axes whose eigenvector direction
/// is unreliable because adjacent eigenvalues nearly tie (or vanish) in
/// either summary; angles on flagged axes are reported but meaningless.
#[derive(Debug, Clone)]
pub struct ShapeDeformation {
    pub stretch_ratios: Vec<f64>,
    pub rotation_angles_rad: Vec<f64>,
    pub degenerate_flags: Vec<bool>,
    pub d_mu: f64,
    pub d_sigma: f64,
    pub d_total: f64,
    pub drifted: bool,
}

fn check_dims(old: &BaselineSummary, new: &BaselineSummary) -> Result<()> {
    if old.dim() != new.dim() {
        return Err(DriftError::DimensionMismatch {
            expected: old.dim(),
            actual: new.dim(),
        });
    }
    Ok(())
}

/// Per-axis stretch/compress ratios `lambda_new_i / lambda_old_i` over the
/// descending-sorted spectra, with sentinel handling for vanished axes.
///
/// Returns the ratios plus flags marking the sentinel axes.
pub fn eigen_ratios(
    old: &BaselineSummary,
    new: &BaselineSummary,
) -> Result<(Vec<f64>, Vec<bool>)> {
    check_dims(old, new)?;
    let lam_old = old.eigenvalues();
    let lam_new = new.eigenvalues();
    let tol = ZERO_EIG_REL * lam_old[0].max(lam_new[0]);

    let mut ratios = Vec::with_capacity(lam_old.len());
    let mut flags = Vec::with_capacity(lam_old.len());
    for i in 0..lam_old.len() {
        let old_zero = lam_old[i] <= tol;
        let new_zero = lam_new[i] <= tol;
        if old_zero && new_zero {
            ratios.push(1.0);
            flags.push(true);
        } else if old_zero {
            ratios.push(f64::INFINITY);
            flags.push(true);
        } else {
            ratios.push(lam_new[i] / lam_old[i]);
            flags.push(false);
        }
    }
    Ok((ratios, flags))
}

/// Flags for axes whose eigenvector is ill-defined: the axis participates in
/// a near-tie with an adjacent eigenvalue (ratio below `eig_tol`) or its
/// eigenvalue is numerically zero.
pub fn degeneracy_flags(eigenvalues: &DVector<f64>, eig_tol: f64) -> Vec<bool> {
    let d = eigenvalues.len();
    let zero_tol = ZERO_EIG_REL * eigenvalues[0].abs();
    let tied = |hi: f64, lo: f64| -> bool {
        if lo <= zero_tol {
            hi <= zero_tol
        } else {
            hi / lo < eig_tol
        }
    };
    (0..d)
        .map(|i| {
            let zero = eigenvalues[i] <= zero_tol;
            let tie_below = i + 1 < d && tied(eigenvalues[i], eigenvalues[i + 1]);
            let tie_above = i > 0 && tied(eigenvalues[i - 1], eigenvalues[i]);
            zero || tie_below || tie_above
        })
        .collect()
}

/// Rotation angles `acos(|u_old_i . u_new_i|)` between rank-matched
/// eigenvectors, each in `[0, pi/2]`, plus degeneracy flags combined from
/// both summaries.
pub fn rotation_angles(
    old: &BaselineSummary,
    new: &BaselineSummary,
    eig_tol: f64,
) -> Result<(Vec<f64>, Vec<bool>)> {
    check_dims(old, new)?;
    let d = old.dim();
    let mut angles = Vec::with_capacity(d);
    for i in 0..d {
        let dot = old
            .eigenvectors()
            .column(i)
            .dot(&new.eigenvectors().column(i));
        angles.push(dot.abs().clamp(0.0, 1.0).acos());
    }
    let flags_old = degeneracy_flags(old.eigenvalues(), eig_tol);
    let flags_new = degeneracy_flags(new.eigenvalues(), eig_tol);
    let flags = flags_old
        .into_iter()
        .zip(flags_new)
        .map(|(a, b)| a || b)
        .collect();
    Ok((angles, flags))
}

/// Euclidean distance between the two means.
pub fn mean_shift(old_mean: &DVector<f64>, new_mean: &DVector<f64>) -> Result<f64> {
    if old_mean.len() != new_mean.len() {
        return Err(DriftError::DimensionMismatch {
            expected: old_mean.len(),
            actual: new_mean.len(),
        });
    }
    Ok((new_mean - old_mean).norm())
}

/// Frobenius norm of the covariance difference (square root included).
pub fn covariance_shift(old_cov: &DMatrix<f64>, new_cov: &DMatrix<f64>) -> Result<f64> {
    if old_cov.shape() != new_cov.shape() || old_cov.nrows() != old_cov.ncols() {
        return Err(DriftError::DimensionMismatch {
            expected: old_cov.nrows(),
            actual: new_cov.nrows(),
        });
    }
    Ok((new_cov - old_cov).norm())
}

/// Composite drift index `alpha * d_mu + beta * d_sigma` with a strict
/// threshold comparison.
pub fn composite_index(d_mu: f64, d_sigma: f64, cfg: &DriftConfig) -> (f64, bool) {
    let d_total = cfg.alpha * d_mu + cfg.beta * d_sigma;
    (d_total, d_total > cfg.threshold)
}

/// The full covariance-based deformation bundle between two summaries.
pub fn shape_deformation(
    old: &BaselineSummary,
    new: &BaselineSummary,
    cfg: &DriftConfig,
) -> Result<ShapeDeformation> {
    let (stretch_ratios, ratio_flags) = eigen_ratios(old, new)?;
    let (rotation_angles_rad, angle_flags) = rotation_angles(old, new, cfg.eig_tol)?;
    let degenerate_flags = ratio_flags
        .into_iter()
        .zip(angle_flags)
        .map(|(a, b)| a || b)
        .collect();
    let d_mu = mean_shift(old.mean(), new.mean())?;
    let d_sigma = covariance_shift(old.covariance(), new.covariance())?;
    let (d_total, drifted) = composite_index(d_mu, d_sigma, cfg);
    Ok(ShapeDeformation {
        stretch_ratios,
        rotation_angles_rad,
        degenerate_flags,
        d_mu,
        d_sigma,
        d_total,
        drifted,
    })
}
