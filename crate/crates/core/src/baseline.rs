use nalgebra::{DMatrix, DVector};

use crate::cloud::PointCloud;
use crate::config::DriftConfig;
use crate::error::{DriftError, Result};

/// Relative tolerance under which a negative eigenvalue counts as rounding
/// noise and is clamped to zero.
const EIG_CLAMP_REL: f64 = 1e-10;

/// Floor used for the bandwidth of a zero-variance feature, so the KDE
/// stays defined on degenerate clouds.
const DEGENERATE_BANDWIDTH_FLOOR: f64 = 1e-6;

/// Fitted statistics of a baseline cloud: mean, covariance, sorted
/// eigenpairs, per-feature spreads, KDE bandwidths, and the retained points.
///
/// Eigenvalues are sorted descending and column `i` of `eigenvectors` pairs
/// with `eigenvalues[i]`. Each eigenvector column is sign-fixed so its
/// largest-magnitude entry is positive, which keeps rotation angles
/// reproducible across platforms.
#[derive(Debug, Clone)]
pub struct BaselineSummary {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    stds: DVector<f64>,
    bandwidths: DVector<f64>,
    count: usize,
    retained_points: PointCloud,
}

impl BaselineSummary {
    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Eigenvalues of the covariance, sorted descending, clamped at zero.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvector columns; column `i` pairs with eigenvalue `i`.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn stds(&self) -> &DVector<f64> {
        &self.stds
    }

    pub fn bandwidths(&self) -> &DVector<f64> {
        &self.bandwidths
    }

    /// Number of points the summary was fitted on.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn retained_points(&self) -> &PointCloud {
        &self.retained_points
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Mean of the per-feature standard deviations, the "spread" scale used
    /// by spread-relative force magnitudes.
    pub fn pooled_std(&self) -> f64 {
        self.stds.iter().sum::<f64>() / self.stds.len() as f64
    }

    /// Reassemble a summary from stored parts (baseline files); re-derives
    /// nothing and trusts the parts after basic shape checks.
    pub fn from_parts(
        mean: DVector<f64>,
        covariance: DMatrix<f64>,
        eigenvalues: DVector<f64>,
        eigenvectors: DMatrix<f64>,
        stds: DVector<f64>,
        bandwidths: DVector<f64>,
        count: usize,
        retained_points: PointCloud,
    ) -> Result<Self> {
        let d = mean.len();
        let all_match = covariance.nrows() == d
            && covariance.ncols() == d
            && eigenvalues.len() == d
            && eigenvectors.nrows() == d
            && eigenvectors.ncols() == d
            && stds.len() == d
            && bandwidths.len() == d
            && retained_points.dim() == d;
        if !all_match {
            return Err(DriftError::DimensionMismatch {
                expected: d,
                actual: covariance.nrows(),
            });
        }
        if count < 2 {
            return Err(DriftError::TooFewPoints {
                needed: 2,
                actual: count,
            });
        }
        Ok(BaselineSummary {
            mean,
            covariance,
            eigenvalues,
            eigenvectors,
            stds,
            bandwidths,
            count,
            retained_points,
        })
    }
}

/// Fit mean, unbiased covariance, sorted eigenpairs, and KDE bandwidths on
/// a cloud of at least two points.
pub fn fit_baseline(cloud: &PointCloud, cfg: &DriftConfig) -> Result<BaselineSummary> {
    cfg.validate()?;
    let n = cloud.len();
    let d = cloud.dim();
    if n < 2 {
        return Err(DriftError::TooFewPoints {
            needed: 2,
            actual: n,
        });
    }

    let points = cloud.points();
    let mut mean = DVector::zeros(d);
    for i in 0..n {
        mean += points.row(i).transpose();
    }
    mean /= n as f64;

    let mut covariance = DMatrix::zeros(d, d);
    for i in 0..n {
        let dev = points.row(i).transpose() - &mean;
        covariance += &dev * dev.transpose();
    }
    covariance /= (n - 1) as f64;

    let (eigenvalues, eigenvectors) = sorted_symmetric_eigen(&covariance)?;

    let stds = DVector::from_fn(d, |j, _| covariance[(j, j)].max(0.0).sqrt());

    let bandwidths = match &cfg.bandwidth_override {
        Some(h) => {
            if h.len() != d {
                return Err(DriftError::ShapeMismatch {
                    what: "bandwidth_override",
                    expected: d,
                    actual: h.len(),
                });
            }
            DVector::from_column_slice(h)
        }
        None => scott_bandwidths(&stds, n),
    };

    Ok(BaselineSummary {
        mean,
        covariance,
        eigenvalues,
        eigenvectors,
        stds,
        bandwidths,
        count: n,
        retained_points: cloud.clone(),
    })
}

/// Scott's rule per feature: `h_j = std_j * m^(-1/(d+4))`, with a positive
/// floor for zero-variance features.
pub fn scott_bandwidths(stds: &DVector<f64>, count: usize) -> DVector<f64> {
    let d = stds.len();
    let factor = (count as f64).powf(-1.0 / (d as f64 + 4.0));
    let mean_std = stds.iter().sum::<f64>() / d as f64;
    let degenerate = DEGENERATE_BANDWIDTH_FLOOR.max(1e-3 * mean_std);
    DVector::from_fn(d, |j, _| {
        let h = stds[j] * factor;
        if h > 0.0 {
            h
        } else {
            degenerate
        }
    })
}

/// Eigendecomposition of a symmetric matrix with the crate's conventions:
/// descending eigenvalues, tiny negatives clamped to zero, and each
/// eigenvector column flipped so its largest-magnitude entry is positive.
pub fn sorted_symmetric_eigen(matrix: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let d = matrix.nrows();
    let eig = matrix.clone().symmetric_eigen();

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues of a finite symmetric matrix are finite")
    });

    let max_abs = order
        .iter()
        .map(|&i| eig.eigenvalues[i].abs())
        .fold(0.0_f64, f64::max);
    let clamp_tol = EIG_CLAMP_REL * max_abs;

    let mut values = DVector::zeros(d);
    let mut vectors = DMatrix::zeros(d, d);
    for (rank, &src) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[src];
        if lambda < -clamp_tol {
            return Err(DriftError::Internal(format!(
                "covariance eigenvalue {lambda} is negative beyond rounding tolerance {clamp_tol}"
            )));
        }
        values[rank] = lambda.max(0.0);

        let mut col = eig.eigenvectors.column(src).clone_owned();
        let mut max_idx = 0;
        for i in 1..d {
            if col[i].abs() > col[max_idx].abs() {
                max_idx = i;
            }
        }
        if col[max_idx] < 0.0 {
            col = -col;
        }
        vectors.set_column(rank, &col);
    }
    Ok((values, vectors))
}
