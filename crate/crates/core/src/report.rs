use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::DriftConfig;

/// The report schema version; bumps on any field change.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// A float that serializes infinities as the string sentinels `"inf"` /
/// `"-inf"`, since JSON has no infinity literal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaybeInf(pub f64);

impl From<f64> for MaybeInf {
    fn from(v: f64) -> Self {
        MaybeInf(v)
    }
}

impl Serialize for MaybeInf {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            serializer.serialize_f64(self.0)
        } else if self.0 == f64::INFINITY {
            serializer.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            serializer.serialize_str("-inf")
        } else {
            Err(serde::ser::Error::custom("NaN is not representable"))
        }
    }
}

impl<'de> Deserialize<'de> for MaybeInf {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(v) => Ok(MaybeInf(v)),
            Raw::Text(s) => match s.as_str() {
                "inf" => Ok(MaybeInf(f64::INFINITY)),
                "-inf" => Ok(MaybeInf(f64::NEG_INFINITY)),
                other => Err(D::Error::custom(format!(
                    "expected a number, \"inf\" or \"-inf\", got {other:?}"
                ))),
            },
        }
    }
}

/// The configuration a report or baseline file was produced under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub fade_k: f64,
    pub alpha: f64,
    pub beta: f64,
    pub threshold: MaybeInf,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bandwidth_override: Option<Vec<f64>>,
    pub reduce_dims: usize,
    pub kl_floor: f64,
    pub eig_tol: f64,
    pub seed: u64,
}

impl From<&DriftConfig> for ConfigEcho {
    fn from(cfg: &DriftConfig) -> Self {
        ConfigEcho {
            fade_k: cfg.fade_k,
            alpha: cfg.alpha,
            beta: cfg.beta,
            threshold: MaybeInf(cfg.threshold),
            bandwidth_override: cfg.bandwidth_override.clone(),
            reduce_dims: cfg.reduce_dims,
            kl_floor: cfg.kl_floor,
            eig_tol: cfg.eig_tol,
            seed: cfg.seed,
        }
    }
}

impl From<&ConfigEcho> for DriftConfig {
    fn from(echo: &ConfigEcho) -> Self {
        DriftConfig {
            fade_k: echo.fade_k,
            alpha: echo.alpha,
            beta: echo.beta,
            threshold: echo.threshold.0,
            bandwidth_override: echo.bandwidth_override.clone(),
            reduce_dims: echo.reduce_dims,
            kl_floor: echo.kl_floor,
            eig_tol: echo.eig_tol,
            seed: echo.seed,
        }
    }
}

/// Strain aggregates as they appear in reports. Shear entries are
/// `[i, j, value]` triples over axis pairs `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrainAggregates {
    pub mean_abs_normal: Vec<f64>,
    pub mean_abs_shear: Vec<(usize, usize, f64)>,
    pub mean_volumetric: f64,
}

/// The full metric bundle of one batch evaluation.
///
/// Shape, density, and strain fields are absent on partial reports (batches
/// too small for covariance); `partial` is then true. `skipped_rows` only
/// appears in streaming mode, counting malformed rows dropped since the
/// previous report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeformationReport {
    pub schema_version: u32,
    pub average_displacement: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eigen_ratios: Option<Vec<MaybeInf>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rotation_angles_rad: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub degenerate_flags: Option<Vec<bool>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d_mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d_sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d_total: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub drifted: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kl_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wasserstein_per_feature: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wasserstein_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub strain: Option<StrainAggregates>,
    pub partial: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skipped_rows: Option<u64>,
    pub config_echo: ConfigEcho,
}

impl DeformationReport {
    /// Compact single-line JSON, deterministic for identical inputs.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }

    /// Flat `key,value` lines for the CSV output format. Array entries are
    /// indexed (`eigen_ratios.0`), shear entries keyed by their axis pair.
    pub fn to_csv(&self) -> String {
        let mut lines: Vec<String> = Vec::new();
        let fmt = |v: f64| -> String {
            if v.is_finite() {
                format!("{v}")
            } else if v > 0.0 {
                "inf".to_string()
            } else {
                "-inf".to_string()
            }
        };
        lines.push(format!("schema_version,{}", self.schema_version));
        lines.push(format!(
            "average_displacement,{}",
            fmt(self.average_displacement)
        ));
        if let Some(ratios) = &self.eigen_ratios {
            for (i, r) in ratios.iter().enumerate() {
                lines.push(format!("eigen_ratios.{i},{}", fmt(r.0)));
            }
        }
        if let Some(angles) = &self.rotation_angles_rad {
            for (i, a) in angles.iter().enumerate() {
                lines.push(format!("rotation_angles_rad.{i},{}", fmt(*a)));
            }
        }
        if let Some(flags) = &self.degenerate_flags {
            for (i, f) in flags.iter().enumerate() {
                lines.push(format!("degenerate_flags.{i},{f}"));
            }
        }
        if let Some(v) = self.d_mu {
            lines.push(format!("d_mu,{}", fmt(v)));
        }
        if let Some(v) = self.d_sigma {
            lines.push(format!("d_sigma,{}", fmt(v)));
        }
        if let Some(v) = self.d_total {
            lines.push(format!("d_total,{}", fmt(v)));
        }
        if let Some(v) = self.drifted {
            lines.push(format!("drifted,{v}"));
        }
        if let Some(v) = self.kl_estimate {
            lines.push(format!("kl_estimate,{}", fmt(v)));
        }
        if let Some(ws) = &self.wasserstein_per_feature {
            for (i, w) in ws.iter().enumerate() {
                lines.push(format!("wasserstein_per_feature.{i},{}", fmt(*w)));
            }
        }
        if let Some(v) = self.wasserstein_mean {
            lines.push(format!("wasserstein_mean,{}", fmt(v)));
        }
        if let Some(strain) = &self.strain {
            for (i, v) in strain.mean_abs_normal.iter().enumerate() {
                lines.push(format!("strain.mean_abs_normal.{i},{}", fmt(*v)));
            }
            for (i, j, v) in &strain.mean_abs_shear {
                lines.push(format!("strain.mean_abs_shear.{i}_{j},{}", fmt(*v)));
            }
            lines.push(format!(
                "strain.mean_volumetric,{}",
                fmt(strain.mean_volumetric)
            ));
        }
        lines.push(format!("partial,{}", self.partial));
        if let Some(v) = self.skipped_rows {
            lines.push(format!("skipped_rows,{v}"));
        }
        lines.join("\n") + "\n"
    }
}
