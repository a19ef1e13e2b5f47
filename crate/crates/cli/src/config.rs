use std::path::PathBuf;

use clap::Args;
use driftfield::{DriftConfig, DriftError, MaybeInf, Result};
use serde::Deserialize;

/// Environment variable naming a fallback config file.
pub const CONFIG_ENV_VAR: &str = "DRIFTFIELD_CONFIG";

/// Default snapshot interpolation fractions.
pub const DEFAULT_FRACTIONS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
/// Default fallback embedding dimension for text drift.
pub const DEFAULT_TEXT_DIM: usize = 64;

/// Tuning flags shared by every subcommand. Precedence is flags over the
/// config file (`--config`, else `DRIFTFIELD_CONFIG`) over built-in
/// defaults.
#[derive(Debug, Args)]
pub struct CommonOpts {
    /// Fading-influence rate k
    #[arg(long = "k", value_name = "K")]
    pub fade_k: Option<f64>,

    /// Weight of the mean-shift term in the composite index
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Weight of the covariance-shift term in the composite index
    #[arg(long)]
    pub beta: Option<f64>,

    /// Drift threshold T; "inf" reports without ever flagging
    #[arg(long)]
    pub threshold: Option<f64>,

    /// Comma-separated per-feature KDE bandwidths overriding Scott's rule
    #[arg(long, value_name = "H1,H2,...")]
    pub bandwidth: Option<String>,

    /// Dimension of the snapshot/hull display space
    #[arg(long)]
    pub reduce_dims: Option<usize>,

    /// Density floor for the KL estimator
    #[arg(long)]
    pub kl_floor: Option<f64>,

    /// Adjacent-eigenvalue ratio below which an axis is flagged degenerate
    #[arg(long)]
    pub eig_tol: Option<f64>,

    /// Seed for the deterministic fallback embedder
    #[arg(long)]
    pub seed: Option<u64>,

    /// JSON config file
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

/// Optional settings accepted in a JSON config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    fade_k: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    threshold: Option<MaybeInf>,
    bandwidth_override: Option<Vec<f64>>,
    reduce_dims: Option<usize>,
    kl_floor: Option<f64>,
    eig_tol: Option<f64>,
    seed: Option<u64>,
    fractions: Option<Vec<f64>>,
    dim: Option<usize>,
}

/// Settings that live beside `DriftConfig`: snapshot fractions and the
/// fallback embedding dimension.
#[derive(Debug, Clone)]
pub struct CliExtras {
    pub fractions: Vec<f64>,
    pub dim: usize,
}

fn load_file_config(opts: &CommonOpts) -> Result<FileConfig> {
    let path = match &opts.config {
        Some(p) => Some(p.clone()),
        None => std::env::var_os(CONFIG_ENV_VAR).map(PathBuf::from),
    };
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(&p)?;
            serde_json::from_str(&text).map_err(|e| {
                DriftError::InvalidConfig(format!("config file {}: {e}", p.display()))
            })
        }
    }
}

fn parse_bandwidths(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|cell| {
            cell.trim()
                .parse::<f64>()
                .map_err(|_| DriftError::InvalidConfig(format!("bad bandwidth entry {cell:?}")))
        })
        .collect()
}

/// Parse a comma-separated fraction list from `--fractions`.
pub fn parse_fractions(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|cell| {
            cell.trim()
                .parse::<f64>()
                .map_err(|_| DriftError::InvalidConfig(format!("bad fraction {cell:?}")))
        })
        .collect()
}

/// Resolve flags, config file, and defaults into the effective settings.
pub fn resolve(opts: &CommonOpts) -> Result<(DriftConfig, CliExtras)> {
    let file = load_file_config(opts)?;
    let defaults = DriftConfig::default();

    let bandwidth_override = match &opts.bandwidth {
        Some(spec) => Some(parse_bandwidths(spec)?),
        None => file.bandwidth_override,
    };

    let cfg = DriftConfig {
        fade_k: opts.fade_k.or(file.fade_k).unwrap_or(defaults.fade_k),
        alpha: opts.alpha.or(file.alpha).unwrap_or(defaults.alpha),
        beta: opts.beta.or(file.beta).unwrap_or(defaults.beta),
        threshold: opts
            .threshold
            .or(file.threshold.map(|t| t.0))
            .unwrap_or(defaults.threshold),
        bandwidth_override,
        reduce_dims: opts
            .reduce_dims
            .or(file.reduce_dims)
            .unwrap_or(defaults.reduce_dims),
        kl_floor: opts.kl_floor.or(file.kl_floor).unwrap_or(defaults.kl_floor),
        eig_tol: opts.eig_tol.or(file.eig_tol).unwrap_or(defaults.eig_tol),
        seed: opts.seed.or(file.seed).unwrap_or(defaults.seed),
    };
    cfg.validate()?;

    let extras = CliExtras {
        fractions: file.fractions.unwrap_or_else(|| DEFAULT_FRACTIONS.to_vec()),
        dim: file.dim.unwrap_or(DEFAULT_TEXT_DIM),
    };
    Ok((cfg, extras))
}
