use nalgebra::{DMatrix, DVector};

use crate::baseline::{fit_baseline, BaselineSummary};
use crate::cloud::PointCloud;
use crate::config::DriftConfig;
use crate::density::DensityModel;
use crate::error::{DriftError, Result};
use crate::strain::displacement_at;

/// An affine map onto the top principal axes of a baseline:
/// `project(x) = basis^T (x - origin)`.
#[derive(Debug, Clone)]
pub struct Projection {
    basis: DMatrix<f64>,
    origin: DVector<f64>,
    rank: usize,
}

impl Projection {
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn origin(&self) -> &DVector<f64> {
        &self.origin
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        self.basis.transpose() * (x - &self.origin)
    }

    /// Project a displacement (a difference of points): drops the origin.
    pub fn project_vector(&self, v: &DVector<f64>) -> DVector<f64> {
        self.basis.transpose() * v
    }
}

/// Projection onto the top `r` baseline eigenvectors.
pub fn fit_projection(baseline: &BaselineSummary, r: usize) -> Result<Projection> {
    let d = baseline.dim();
    if r < 1 || r > d {
        return Err(DriftError::BadRank { rank: r, dim: d });
    }
    let basis = baseline.eigenvectors().columns(0, r).clone_owned();
    Ok(Projection {
        basis,
        origin: baseline.mean().clone(),
        rank: r,
    })
}

#[inline]
fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull of raw 2D points by the monotone chain, counterclockwise,
/// collinear interior points excluded. One point yields itself, two distinct
/// points a segment.
pub fn convex_hull_points(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_unstable_by(|a, b| a.partial_cmp(b).expect("hull points must be finite"));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }

    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Convex hull of a 2D point cloud.
pub fn convex_hull_2d(cloud: &PointCloud) -> Result<Vec<[f64; 2]>> {
    if cloud.dim() != 2 {
        return Err(DriftError::DimensionMismatch {
            expected: 2,
            actual: cloud.dim(),
        });
    }
    let pts: Vec<[f64; 2]> = (0..cloud.len())
        .map(|i| [cloud.points()[(i, 0)], cloud.points()[(i, 1)]])
        .collect();
    Ok(convex_hull_points(&pts))
}

/// One deformation frame at interpolation fraction `t`.
#[derive(Debug, Clone)]
pub struct SnapshotFrame {
    pub t: f64,
    /// Projected baseline points moved by `t` times their display
    /// displacement.
    pub points: Vec<[f64; 2]>,
    /// Hull of the moved baseline points.
    pub hull_baseline: Vec<[f64; 2]>,
    /// Hull of the projected new points (constant across frames).
    pub hull_new: Vec<[f64; 2]>,
    /// Force arrows `[x, y, dx, dy]`: anchored at the undeformed position,
    /// the tip coincides with the point's current position.
    pub arrows: Vec<[f64; 4]>,
}

/// Interpolated 2D views of the deformation at a sequence of fractions.
#[derive(Debug, Clone)]
pub struct SnapshotSeries {
    pub fractions: Vec<f64>,
    pub frames: Vec<SnapshotFrame>,
}

fn validate_fractions(fractions: &[f64]) -> Result<()> {
    if fractions.is_empty() {
        return Err(DriftError::InvalidConfig(
            "fractions must not be empty".to_string(),
        ));
    }
    for w in fractions.windows(2) {
        if !(w[0] <= w[1]) {
            return Err(DriftError::InvalidConfig(
                "fractions must be sorted ascending".to_string(),
            ));
        }
    }
    let first = fractions[0];
    let last = *fractions.last().expect("non-empty");
    if first != 0.0 || last != 1.0 || fractions.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(DriftError::InvalidConfig(
            "fractions must lie in [0, 1] and include 0 and 1".to_string(),
        ));
    }
    Ok(())
}

/// Build the deformation snapshot series.
///
/// The display space is the top-2 principal plane of the baseline (a 1D
/// baseline is padded with a zero second coordinate). The displacement field
/// is evaluated in the models' full space at each baseline point, projected,
/// and scaled by one common factor `c` so that the mean displayed magnitude
/// equals the projected mean shift; `c = 0` when the field vanishes.
pub fn snapshot_series(
    baseline: &PointCloud,
    new_cloud: &PointCloud,
    old_model: &DensityModel,
    new_model: &DensityModel,
    fractions: &[f64],
) -> Result<SnapshotSeries> {
    validate_fractions(fractions)?;
    let d = baseline.dim();
    for (dim, what) in [
        (new_cloud.dim(), "new cloud"),
        (old_model.dim(), "old model"),
        (new_model.dim(), "new model"),
    ] {
        if dim != d {
            let _ = what;
            return Err(DriftError::DimensionMismatch {
                expected: d,
                actual: dim,
            });
        }
    }

    let summary = fit_baseline(baseline, &DriftConfig::default())?;
    let r = 2.min(d);
    let projection = fit_projection(&summary, r)?;
    let plane = |v: &DVector<f64>| -> [f64; 2] {
        if r == 2 {
            [v[0], v[1]]
        } else {
            [v[0], 0.0]
        }
    };

    let base_proj: Vec<[f64; 2]> = (0..baseline.len())
        .map(|i| plane(&projection.project(&baseline.point(i))))
        .collect();
    let new_proj: Vec<[f64; 2]> = (0..new_cloud.len())
        .map(|i| plane(&projection.project(&new_cloud.point(i))))
        .collect();
    let hull_new = convex_hull_points(&new_proj);

    // Display field: projected KDE displacement, rescaled so the mean
    // magnitude reproduces the projected center shift.
    let mut displayed: Vec<[f64; 2]> = Vec::with_capacity(baseline.len());
    let mut mean_norm = 0.0;
    for i in 0..baseline.len() {
        let v = displacement_at(old_model, new_model, &baseline.point(i))?;
        let w = plane(&projection.project_vector(&v));
        mean_norm += (w[0] * w[0] + w[1] * w[1]).sqrt();
        displayed.push(w);
    }
    mean_norm /= baseline.len() as f64;

    let mut new_mean = DVector::zeros(d);
    for i in 0..new_cloud.len() {
        new_mean += new_cloud.point(i);
    }
    new_mean /= new_cloud.len() as f64;
    let shift = plane(&projection.project_vector(&(&new_mean - summary.mean())));
    let target = (shift[0] * shift[0] + shift[1] * shift[1]).sqrt();

    let c = if mean_norm > 0.0 { target / mean_norm } else { 0.0 };
    for w in &mut displayed {
        w[0] *= c;
        w[1] *= c;
    }

    let frames = fractions
        .iter()
        .map(|&t| {
            let points: Vec<[f64; 2]> = base_proj
                .iter()
                .zip(&displayed)
                .map(|(p, w)| [p[0] + t * w[0], p[1] + t * w[1]])
                .collect();
            let arrows: Vec<[f64; 4]> = base_proj
                .iter()
                .zip(&displayed)
                .map(|(p, w)| [p[0], p[1], t * w[0], t * w[1]])
                .collect();
            SnapshotFrame {
                t,
                hull_baseline: convex_hull_points(&points),
                hull_new: hull_new.clone(),
                points,
                arrows,
            }
        })
        .collect();

    Ok(SnapshotSeries {
        fractions: fractions.to_vec(),
        frames,
    })
}
