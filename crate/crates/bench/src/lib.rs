//! Deterministic data generators shared by the benchmarks.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use driftfield::{fit_baseline, BaselineSummary, DriftConfig, PointCloud};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random cloud with per-axis scales `1, 2, ..., d`.
pub fn random_cloud(seed: u64, n: usize, d: usize) -> PointCloud {
    let mut rng = rng(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..d)
                .map(|j| (rng.random::<f64>() * 2.0 - 1.0) * (j + 1) as f64)
                .collect()
        })
        .collect();
    PointCloud::from_rows(&rows).unwrap()
}

pub fn summary_of(cloud: &PointCloud) -> BaselineSummary {
    fit_baseline(cloud, &DriftConfig::default()).unwrap()
}

/// Random query points inside the unit-ish box of a cloud's scale.
pub fn random_queries(seed: u64, n: usize, d: usize) -> Vec<DVector<f64>> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| DVector::from_fn(d, |j, _| (rng.random::<f64>() * 2.0 - 1.0) * (j + 1) as f64))
        .collect()
}
