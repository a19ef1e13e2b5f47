//! Geometric drift detection over point clouds.
//!
//! New data is read as a set of forces deforming the vector-space
//! representation of a baseline dataset. The crate quantifies that
//! deformation from several angles:
//!
//! - **displacement**: per-point force vectors against the baseline center
//!   and their average magnitude;
//! - **shape**: covariance eigen-structure changes (stretch/compress ratios,
//!   eigenvector rotation angles) and the composite index
//!   `alpha * D_mu + beta * D_sigma` with a drift threshold;
//! - **density**: product-Gaussian KDE, local density differences, a
//!   sample-based KL estimate with an exact discrete companion, 1D
//!   Wasserstein distance, and text-frequency metrics;
//! - **strain**: a displacement field from density gradients and its spatial
//!   gradient, read out as normal / shear / volumetric strain;
//! - **geometry**: PCA projection, 2D convex hulls, and interpolated
//!   deformation snapshots;
//! - **monitor**: incremental mean/covariance accumulators with exact merge,
//!   and batch evaluation producing a serializable report.
//!
//! Everything is deterministic given inputs and configuration; all types are
//! immutable after construction and safe to share across threads.

pub mod baseline;
pub mod cloud;
pub mod config;
pub mod density;
pub mod displacement;
pub mod error;
pub mod geometry;
pub mod ingest;
pub mod monitor;
pub mod persist;
pub mod report;
pub mod shape;
pub mod strain;

pub use baseline::{fit_baseline, scott_bandwidths, sorted_symmetric_eigen, BaselineSummary};
pub use cloud::{validate_cloud, PointCloud};
pub use config::DriftConfig;
pub use density::{
    cosine_deformation, density_difference, frequency_l2, kde_density, kl_discrete,
    kl_divergence, text_frequency_wasserstein, wasserstein_1d, DensityModel,
};
pub use displacement::{average_displacement, force_field, Force, ForceField};
pub use error::{DriftError, Result};
pub use geometry::{
    convex_hull_2d, convex_hull_points, fit_projection, snapshot_series, Projection,
    SnapshotFrame, SnapshotSeries,
};
pub use ingest::{
    embed_text, frequency_weighted_centroid, load_csv, load_embedding_table, parse_csv_row,
    parse_csv_str, to_csv_string, tokenize, EmbeddedText, Embedder, EmbeddingTable,
    TokenizedText,
};
pub use monitor::{evaluate_batch, RunningStats};
pub use persist::{BaselineFile, BASELINE_SCHEMA_VERSION};
pub use report::{
    ConfigEcho, DeformationReport, MaybeInf, StrainAggregates, REPORT_SCHEMA_VERSION,
};
pub use shape::{
    composite_index, covariance_shift, degeneracy_flags, eigen_ratios, mean_shift,
    rotation_angles, shape_deformation, ShapeDeformation,
};
pub use strain::{
    default_eval_points, displacement_at, strain_at, strain_from_field, strain_summary,
    StrainSample, StrainSummary, STRAIN_STEP_SCALE,
};
