use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::baseline::BaselineSummary;
use crate::cloud::PointCloud;
use crate::config::DriftConfig;
use crate::error::{DriftError, Result};
use crate::ingest::TokenizedText;

const INV_SQRT_2PI: f64 = 0.3989422804014327;

/// Standard normal density.
#[inline]
fn phi(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// A product-Gaussian kernel density estimate: an equal-weight mixture of
/// axis-aligned Gaussians, one per source point, with per-feature bandwidths.
#[derive(Debug, Clone)]
pub struct DensityModel {
    points: DMatrix<f64>,
    bandwidths: DVector<f64>,
}

impl DensityModel {
    pub fn new(points: &PointCloud, bandwidths: DVector<f64>) -> Result<Self> {
        if bandwidths.len() != points.dim() {
            return Err(DriftError::ShapeMismatch {
                what: "bandwidths",
                expected: points.dim(),
                actual: bandwidths.len(),
            });
        }
        if bandwidths.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
            return Err(DriftError::InvalidConfig(
                "KDE bandwidths must be positive and finite".to_string(),
            ));
        }
        Ok(DensityModel {
            points: points.points().clone(),
            bandwidths,
        })
    }

    /// Model over a baseline's retained points with its fitted bandwidths.
    pub fn from_baseline(baseline: &BaselineSummary) -> Self {
        DensityModel {
            points: baseline.retained_points().points().clone(),
            bandwidths: baseline.bandwidths().clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn bandwidths(&self) -> &DVector<f64> {
        &self.bandwidths
    }

    pub fn source_points(&self) -> &DMatrix<f64> {
        &self.points
    }

    /// Source point `i` as an owned vector.
    pub fn source_point(&self, i: usize) -> DVector<f64> {
        self.points.row(i).transpose()
    }

    fn check_query(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(DriftError::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Density and its gradient at `x`, sharing one pass over the mixture.
    ///
    /// Gradients are exact mixture derivatives: for each kernel term the
    /// partial along axis `k` is `-z_k / h_k` times the term itself.
    pub fn density_and_gradient(&self, x: &DVector<f64>) -> Result<(f64, DVector<f64>)> {
        self.check_query(x)?;
        let (m, d) = (self.len(), self.dim());
        let mut density = 0.0;
        let mut gradient = DVector::zeros(d);
        let mut z = vec![0.0; d];
        for i in 0..m {
            let mut term = 1.0;
            for j in 0..d {
                let h = self.bandwidths[j];
                z[j] = (x[j] - self.points[(i, j)]) / h;
                term *= phi(z[j]) / h;
            }
            density += term;
            for j in 0..d {
                gradient[j] += term * (-z[j] / self.bandwidths[j]);
            }
        }
        let scale = 1.0 / m as f64;
        Ok((density * scale, gradient * scale))
    }
}

/// Evaluate the KDE density at `x`.
pub fn kde_density(model: &DensityModel, x: &DVector<f64>) -> Result<f64> {
    model.check_query(x)?;
    let (m, d) = (model.len(), model.dim());
    let mut density = 0.0;
    for i in 0..m {
        let mut term = 1.0;
        for j in 0..d {
            let h = model.bandwidths[j];
            term *= phi((x[j] - model.points[(i, j)]) / h) / h;
        }
        density += term;
    }
    Ok(density / m as f64)
}

/// Signed local density difference `new(x) - old(x)`: positive means the
/// region densified, negative means it thinned.
pub fn density_difference(
    old: &DensityModel,
    new: &DensityModel,
    x: &DVector<f64>,
) -> Result<f64> {
    if old.dim() != new.dim() {
        return Err(DriftError::DimensionMismatch {
            expected: old.dim(),
            actual: new.dim(),
        });
    }
    Ok(kde_density(new, x)? - kde_density(old, x)?)
}

/// Sample-based KL estimate between two KDEs, averaged over the old model's
/// own points with a density floor:
/// `(1/m) sum_x ln(max(p(x), floor) / max(q(x), floor))`.
///
/// This is an estimator, not the exact divergence, and can come out
/// negative; `kl_discrete` is the exact companion on finite supports.
pub fn kl_divergence(old: &DensityModel, new: &DensityModel, cfg: &DriftConfig) -> Result<f64> {
    if old.dim() != new.dim() {
        return Err(DriftError::DimensionMismatch {
            expected: old.dim(),
            actual: new.dim(),
        });
    }
    let m = old.len();
    let mut sum = 0.0;
    for i in 0..m {
        let x = old.source_point(i);
        let p = kde_density(old, &x)?.max(cfg.kl_floor);
        let q = kde_density(new, &x)?.max(cfg.kl_floor);
        sum += (p / q).ln();
    }
    Ok(sum / m as f64)
}

/// Exact discrete KL divergence `sum p_i ln(p_i / q_i)` in nats.
///
/// Both arguments must sum to 1 within 1e-9. A `q_i = 0` with `p_i > 0`
/// yields the `+inf` sentinel rather than an error.
pub fn kl_discrete(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(DriftError::DimensionMismatch {
            expected: p.len(),
            actual: q.len(),
        });
    }
    for (name, dist) in [("p", p), ("q", q)] {
        if dist.is_empty() {
            return Err(DriftError::NotADistribution(format!("{name} is empty")));
        }
        if dist.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(DriftError::NotADistribution(format!(
                "{name} has a negative or non-finite entry"
            )));
        }
        let total: f64 = dist.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(DriftError::NotADistribution(format!(
                "{name} sums to {total}, expected 1"
            )));
        }
    }
    let mut sum = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi == 0.0 {
                return Ok(f64::INFINITY);
            }
            sum += pi * (pi / qi).ln();
        }
    }
    Ok(sum)
}

/// Wasserstein-1 distance between two empirical 1D distributions: the
/// integral of the absolute CDF difference over the merged sample grid.
///
/// For equal sample sizes this reduces to the mean absolute difference of
/// the sorted order statistics.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(DriftError::EmptySample);
    }
    let sort = |v: &[f64]| -> Vec<f64> {
        let mut s = v.to_vec();
        s.sort_unstable_by(|x, y| x.partial_cmp(y).expect("samples must be finite"));
        s
    };
    let sa = sort(a);
    let sb = sort(b);
    let mut grid: Vec<f64> = sa.iter().chain(sb.iter()).copied().collect();
    grid.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());

    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let mut total = 0.0;
    for w in grid.windows(2) {
        let (z0, z1) = (w[0], w[1]);
        if z1 <= z0 {
            continue;
        }
        let fa = sa.partition_point(|&v| v <= z0) as f64 / na;
        let fb = sb.partition_point(|&v| v <= z0) as f64 / nb;
        total += (fa - fb).abs() * (z1 - z0);
    }
    Ok(total)
}

/// Cosine distance `1 - u.v / (|u| |v|)`, in `[0, 2]`.
pub fn cosine_deformation(u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    if u.len() != v.len() {
        return Err(DriftError::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Err(DriftError::ZeroVector);
    }
    if u == v {
        return Ok(0.0);
    }
    let cos = (u.dot(v) / (nu * nv)).clamp(-1.0, 1.0);
    Ok(1.0 - cos)
}

/// Wasserstein distance between the word distributions of two texts: each
/// text contributes one sample per union-vocabulary token, valued at that
/// token's relative frequency.
pub fn text_frequency_wasserstein(old: &TokenizedText, new: &TokenizedText) -> Result<f64> {
    if old.total() == 0 || new.total() == 0 {
        return Err(DriftError::EmptyText);
    }
    let union: BTreeSet<&str> = old
        .counts()
        .keys()
        .chain(new.counts().keys())
        .map(String::as_str)
        .collect();
    let a: Vec<f64> = union.iter().map(|w| old.relative_frequency(w)).collect();
    let b: Vec<f64> = union.iter().map(|w| new.relative_frequency(w)).collect();
    wasserstein_1d(&a, &b)
}

/// L2 distance between the relative-frequency vectors of two texts over
/// their union vocabulary.
pub fn frequency_l2(old: &TokenizedText, new: &TokenizedText) -> Result<f64> {
    if old.total() == 0 || new.total() == 0 {
        return Err(DriftError::EmptyText);
    }
    let union: BTreeSet<&str> = old
        .counts()
        .keys()
        .chain(new.counts().keys())
        .map(String::as_str)
        .collect();
    let mut sum = 0.0;
    for word in union {
        let p_old = old.relative_frequency(word);
        let p_new = new.relative_frequency(word);
        let diff = p_old - p_new;
        sum += diff * diff;
    }
    Ok(sum.sqrt())
}
