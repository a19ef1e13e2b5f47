use crate::error::{DriftError, Result};

/// Default fading-influence rate `k`.
pub const DEFAULT_FADE_K: f64 = 1.0;
/// Default composite-index weights.
pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_BETA: f64 = 1.0;
/// Default dimension of the snapshot/hull display space.
pub const DEFAULT_REDUCE_DIMS: usize = 2;
/// Default density floor for the KL estimator.
pub const DEFAULT_KL_FLOOR: f64 = 1e-12;
/// Default adjacent-eigenvalue ratio below which an axis is flagged degenerate.
pub const DEFAULT_EIG_TOL: f64 = 1.05;
/// Default seed for the deterministic fallback embedder.
pub const DEFAULT_SEED: u64 = 42;

/// Tuning knobs shared by every analysis.
///
/// `threshold` defaults to `+inf`, which means "report only, never flag
/// drift"; operators opt into a verdict by setting a finite value.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftConfig {
    /// Fading-influence rate `k` in the force magnitude `|d| * exp(-k |d|)`.
    pub fade_k: f64,
    /// Weight of the mean-shift term in the composite index.
    pub alpha: f64,
    /// Weight of the covariance-shift term in the composite index.
    pub beta: f64,
    /// Composite-index drift threshold; strict comparison.
    pub threshold: f64,
    /// Per-feature KDE bandwidths; `None` selects Scott's rule.
    pub bandwidth_override: Option<Vec<f64>>,
    /// Target dimension of the snapshot/hull display space.
    pub reduce_dims: usize,
    /// Density clamp applied inside the KL estimator.
    pub kl_floor: f64,
    /// Degeneracy flag ratio for adjacent eigenvalues.
    pub eig_tol: f64,
    /// Seed of the deterministic fallback embedder.
    pub seed: u64,
}

impl Default for DriftConfig {
    fn default() -> Self {
        DriftConfig {
            fade_k: DEFAULT_FADE_K,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            threshold: f64::INFINITY,
            bandwidth_override: None,
            reduce_dims: DEFAULT_REDUCE_DIMS,
            kl_floor: DEFAULT_KL_FLOOR,
            eig_tol: DEFAULT_EIG_TOL,
            seed: DEFAULT_SEED,
        }
    }
}

impl DriftConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fade_k >= 0.0) {
            return Err(DriftError::InvalidConfig(format!(
                "fade_k must be nonnegative, got {}",
                self.fade_k
            )));
        }
        if !(self.alpha >= 0.0) || !(self.beta >= 0.0) {
            return Err(DriftError::InvalidConfig(format!(
                "alpha and beta must be nonnegative, got alpha={} beta={}",
                self.alpha, self.beta
            )));
        }
        if !(self.alpha + self.beta > 0.0) {
            return Err(DriftError::InvalidConfig(
                "alpha + beta must be positive".to_string(),
            ));
        }
        if !(self.threshold >= 0.0) {
            return Err(DriftError::InvalidConfig(format!(
                "threshold must be nonnegative, got {}",
                self.threshold
            )));
        }
        if let Some(h) = &self.bandwidth_override {
            if h.is_empty() || h.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                return Err(DriftError::InvalidConfig(
                    "bandwidth_override entries must be positive and finite".to_string(),
                ));
            }
        }
        if self.reduce_dims < 2 {
            return Err(DriftError::InvalidConfig(format!(
                "reduce_dims must be at least 2, got {}",
                self.reduce_dims
            )));
        }
        if !(self.kl_floor > 0.0) || !self.kl_floor.is_finite() {
            return Err(DriftError::InvalidConfig(format!(
                "kl_floor must be positive and finite, got {}",
                self.kl_floor
            )));
        }
        if !(self.eig_tol >= 1.0) || !self.eig_tol.is_finite() {
            return Err(DriftError::InvalidConfig(format!(
                "eig_tol must be a finite ratio >= 1, got {}",
                self.eig_tol
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        DriftConfig::default().validate().unwrap();
    }

    #[test]
    fn zero_weights_rejected() {
        let cfg = DriftConfig {
            alpha: 0.0,
            beta: 0.0,
            ..DriftConfig::default()
        };
        assert!(matches!(
            cfg.validate().unwrap_err(),
            DriftError::InvalidConfig(_)
        ));
    }

    #[test]
    fn negative_fade_rejected() {
        let cfg = DriftConfig {
            fade_k: -0.5,
            ..DriftConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn nonpositive_bandwidth_override_rejected() {
        let cfg = DriftConfig {
            bandwidth_override: Some(vec![1.0, 0.0]),
            ..DriftConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
