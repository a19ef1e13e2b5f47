use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nalgebra::DVector;
use rand::Rng;

use driftfield::{
    convex_hull_points, default_eval_points, evaluate_batch, fit_baseline, force_field,
    kde_density, kl_divergence, strain_summary, wasserstein_1d, DensityModel, DriftConfig,
    RunningStats,
};
use driftfield_bench::{random_cloud, random_queries, rng, summary_of};

fn bench_fitting(c: &mut Criterion) {
    let cloud = random_cloud(1, 5_000, 8);
    c.bench_function("fit_baseline_5000x8", |b| {
        b.iter(|| fit_baseline(black_box(&cloud), &DriftConfig::default()).unwrap())
    });

    let baseline = summary_of(&cloud);
    let batch = random_cloud(2, 1_000, 8);
    c.bench_function("force_field_1000_new_points", |b| {
        b.iter(|| force_field(black_box(&baseline), black_box(&batch), &DriftConfig::default()))
    });
}

fn bench_density(c: &mut Criterion) {
    let cloud = random_cloud(3, 500, 4);
    let model = DensityModel::from_baseline(&summary_of(&cloud));
    let queries = random_queries(4, 200, 4);
    c.bench_function("kde_density_200_queries_500x4", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for q in &queries {
                acc += kde_density(black_box(&model), q).unwrap();
            }
            acc
        })
    });

    let other = DensityModel::from_baseline(&summary_of(&random_cloud(5, 500, 4)));
    c.bench_function("kl_estimate_500x4", |b| {
        b.iter(|| kl_divergence(black_box(&model), black_box(&other), &DriftConfig::default()))
    });
}

fn bench_strain(c: &mut Criterion) {
    let old_cloud = random_cloud(6, 100, 3);
    let old = summary_of(&old_cloud);
    let new = summary_of(&random_cloud(7, 100, 3));
    let old_model = DensityModel::from_baseline(&old);
    let new_model = DensityModel::from_baseline(&new);
    let eval = default_eval_points(&old);
    c.bench_function("strain_summary_101_eval_points_100x3", |b| {
        b.iter(|| {
            strain_summary(
                black_box(&old_model),
                black_box(&new_model),
                &eval,
                &DriftConfig::default(),
            )
        })
    });
}

fn bench_distances(c: &mut Criterion) {
    let mut generator = rng(8);
    let a: Vec<f64> = (0..5_000).map(|_| generator.random::<f64>() * 10.0).collect();
    let b: Vec<f64> = (0..5_000).map(|_| generator.random::<f64>() * 10.0 + 1.0).collect();
    c.bench_function("wasserstein_1d_5000", |bch| {
        bch.iter(|| wasserstein_1d(black_box(&a), black_box(&b)))
    });

    let pts: Vec<[f64; 2]> = (0..20_000)
        .map(|_| [generator.random::<f64>() * 100.0, generator.random::<f64>() * 100.0])
        .collect();
    c.bench_function("convex_hull_20000", |bch| {
        bch.iter(|| convex_hull_points(black_box(&pts)))
    });
}

fn bench_streaming(c: &mut Criterion) {
    let mut generator = rng(9);
    let rows: Vec<DVector<f64>> = (0..50_000)
        .map(|_| DVector::from_fn(8, |_, _| generator.random::<f64>()))
        .collect();
    c.bench_function("running_stats_update_50000x8", |b| {
        b.iter(|| {
            let mut stats = RunningStats::new(8);
            for row in &rows {
                stats.update(black_box(row)).unwrap();
            }
            stats
        })
    });

    let baseline = summary_of(&random_cloud(10, 400, 4));
    let batch = random_cloud(11, 100, 4);
    c.bench_function("evaluate_batch_100x4_vs_400x4", |b| {
        b.iter(|| evaluate_batch(black_box(&baseline), black_box(&batch), &DriftConfig::default()))
    });
}

criterion_group!(
    benches,
    bench_fitting,
    bench_density,
    bench_strain,
    bench_distances,
    bench_streaming
);
criterion_main!(benches);
