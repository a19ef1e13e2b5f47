use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::cloud::PointCloud;
use crate::error::{DriftError, Result};

/// A token-to-vector mapping loaded from an embedding table file.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    entries: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize, entries: HashMap<String, Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(DriftError::InvalidConfig(
                "embedding dimension must be at least 1".to_string(),
            ));
        }
        for (token, vector) in &entries {
            if vector.len() != dim {
                return Err(DriftError::ShapeMismatch {
                    what: "embedding vector",
                    expected: dim,
                    actual: vector.len(),
                });
            }
            if vector.iter().any(|v| !v.is_finite()) {
                return Err(DriftError::InvalidConfig(format!(
                    "embedding for token {token:?} has a non-finite entry"
                )));
            }
        }
        Ok(EmbeddingTable { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.entries.get(token).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Lowercased word tokens of a text plus their counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedText {
    tokens: Vec<String>,
    counts: BTreeMap<String, u64>,
}

impl TokenizedText {
    /// Tokens in original order (occurrences, not distinct).
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    /// Total number of token occurrences.
    pub fn total(&self) -> u64 {
        self.tokens.len() as u64
    }

    /// Distinct tokens in order of first occurrence.
    pub fn distinct_tokens(&self) -> Vec<&str> {
        let mut seen = BTreeMap::new();
        let mut out = Vec::new();
        for token in &self.tokens {
            if seen.insert(token.clone(), ()).is_none() {
                out.push(token.as_str());
            }
        }
        out
    }

    /// `count(word) / total`, zero for absent words or empty text.
    pub fn relative_frequency(&self, word: &str) -> f64 {
        if self.tokens.is_empty() {
            return 0.0;
        }
        *self.counts.get(word).unwrap_or(&0) as f64 / self.tokens.len() as f64
    }
}

/// Split a text into lowercase word tokens: maximal runs of alphanumeric
/// characters, everything else a separator.
pub fn tokenize(text: &str) -> TokenizedText {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for run in lowered.split(|c: char| !c.is_alphanumeric()) {
        if run.is_empty() {
            continue;
        }
        *counts.entry(run.to_string()).or_insert(0) += 1;
        tokens.push(run.to_string());
    }
    TokenizedText { tokens, counts }
}

/// How tokens were mapped to vectors: a supplied table or the seeded
/// hash fallback.
#[derive(Debug, Clone)]
pub enum Embedder<'a> {
    Table(&'a EmbeddingTable),
    Fallback { seed: u64, dim: usize },
}

/// An embedded text: one point per distinct token, in order of first
/// occurrence, plus the tokens a supplied table did not cover.
#[derive(Debug, Clone)]
pub struct EmbeddedText {
    pub cloud: PointCloud,
    pub skipped: Vec<String>,
}

/// Embed the distinct tokens of a text.
///
/// With a table, missing tokens are skipped and reported. The fallback is a
/// deterministic seeded hash embedder producing unit-norm vectors, so the
/// whole pipeline works without any external model artifact.
pub fn embed_text(text: &TokenizedText, embedder: Embedder<'_>) -> Result<EmbeddedText> {
    let dim = match embedder {
        Embedder::Table(table) => table.dim(),
        Embedder::Fallback { dim, .. } => {
            if dim == 0 {
                return Err(DriftError::InvalidConfig(
                    "fallback embedding dimension must be at least 1".to_string(),
                ));
            }
            dim
        }
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut ids: Vec<String> = Vec::new();
    let mut skipped: Vec<String> = Vec::new();
    for token in text.distinct_tokens() {
        match embedder {
            Embedder::Table(table) => match table.get(token) {
                Some(vector) => {
                    rows.push(vector.to_vec());
                    ids.push(token.to_string());
                }
                None => skipped.push(token.to_string()),
            },
            Embedder::Fallback { seed, .. } => {
                rows.push(fallback_vector(seed, token, dim));
                ids.push(token.to_string());
            }
        }
    }
    if rows.is_empty() {
        return Err(DriftError::EmptyVocabulary);
    }
    let matrix = nalgebra::DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    Ok(EmbeddedText {
        cloud: PointCloud::new(matrix, Some(ids), None)?,
        skipped,
    })
}

/// Centroid of an embedded text, weighting each distinct token's vector by
/// its occurrence count; equals the mean over token occurrences.
pub fn frequency_weighted_centroid(
    text: &TokenizedText,
    embedded: &EmbeddedText,
) -> Result<nalgebra::DVector<f64>> {
    let ids = embedded
        .cloud
        .ids()
        .ok_or_else(|| DriftError::Internal("embedded cloud lost its token ids".to_string()))?;
    let mut centroid = nalgebra::DVector::zeros(embedded.cloud.dim());
    let mut weight_total = 0.0;
    for (i, token) in ids.iter().enumerate() {
        let weight = *text.counts().get(token).unwrap_or(&0) as f64;
        centroid += embedded.cloud.point(i) * weight;
        weight_total += weight;
    }
    if weight_total == 0.0 {
        return Err(DriftError::EmptyVocabulary);
    }
    Ok(centroid / weight_total)
}

/// Unit-norm fallback vector for a token: entry `i` comes from a stable
/// 64-bit hash of `(seed, token, i)` mapped to `[-1, 1]`.
pub fn fallback_vector(seed: u64, token: &str, dim: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim)
        .map(|i| {
            let h = stable_hash(seed, token.as_bytes(), i as u64);
            (h as f64 / u64::MAX as f64) * 2.0 - 1.0
        })
        .collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in &mut v {
            *x /= norm;
        }
    } else {
        v[0] = 1.0;
    }
    v
}

/// FNV-1a over (seed, bytes, index), finished with a splitmix64 avalanche.
/// Hand-rolled so vectors are identical across platforms and releases.
fn stable_hash(seed: u64, bytes: &[u8], index: u64) -> u64 {
    const FNV_OFFSET: u64 = 0xcbf29ce484222325;
    const FNV_PRIME: u64 = 0x100000001b3;
    let mut h = FNV_OFFSET;
    for chunk in seed
        .to_le_bytes()
        .iter()
        .chain(bytes.iter())
        .chain(index.to_le_bytes().iter())
    {
        h ^= u64::from(*chunk);
        h = h.wrapping_mul(FNV_PRIME);
    }
    // splitmix64 finalizer
    h = h.wrapping_add(0x9e3779b97f4a7c15);
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d049bb133111eb);
    h ^ (h >> 31)
}

/// Parse CSV text (RFC-4180 subset without quoting) into a cloud.
///
/// Row indices in errors count data rows from zero, after any header.
pub fn parse_csv_str(text: &str, has_header: bool) -> Result<PointCloud> {
    let mut lines = text.lines();
    let mut feature_names: Option<Vec<String>> = None;
    if has_header {
        match lines.next() {
            Some(header) => {
                feature_names = Some(header.split(',').map(|s| s.trim().to_string()).collect());
            }
            None => return Err(DriftError::EmptyCloud),
        }
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (row_idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        match width {
            None => width = Some(cells.len()),
            Some(w) if w != cells.len() => {
                return Err(DriftError::RaggedRows {
                    row: row_idx,
                    expected: w,
                    actual: cells.len(),
                });
            }
            _ => {}
        }
        let mut row = Vec::with_capacity(cells.len());
        for (col_idx, cell) in cells.iter().enumerate() {
            let value: f64 = cell
                .trim()
                .parse()
                .map_err(|_| DriftError::Parse {
                    row: row_idx,
                    col: col_idx,
                })?;
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(DriftError::EmptyCloud);
    }
    if let (Some(names), Some(w)) = (&feature_names, width) {
        if names.len() != w {
            return Err(DriftError::RaggedRows {
                row: 0,
                expected: names.len(),
                actual: w,
            });
        }
    }
    let d = rows[0].len();
    let matrix = nalgebra::DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
    PointCloud::new(matrix, None, feature_names)
}

/// Load a numeric CSV file as a point cloud, preserving row order.
pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<PointCloud> {
    let text = std::fs::read_to_string(path)?;
    parse_csv_str(&text, has_header)
}

/// Serialize a cloud back to CSV with shortest-round-trip numbers.
pub fn to_csv_string(cloud: &PointCloud) -> String {
    let mut out = String::new();
    if let Some(names) = cloud.feature_names() {
        out.push_str(&names.join(","));
        out.push('\n');
    }
    for i in 0..cloud.len() {
        let row: Vec<String> = (0..cloud.dim())
            .map(|j| format!("{}", cloud.points()[(i, j)]))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parse a single CSV data row (no header) into a point.
pub fn parse_csv_row(line: &str, expected_dim: Option<usize>) -> Result<Vec<f64>> {
    let cells: Vec<&str> = line.split(',').collect();
    if let Some(d) = expected_dim {
        if cells.len() != d {
            return Err(DriftError::RaggedRows {
                row: 0,
                expected: d,
                actual: cells.len(),
            });
        }
    }
    cells
        .iter()
        .enumerate()
        .map(|(col, cell)| {
            cell.trim()
                .parse()
                .map_err(|_| DriftError::Parse { row: 0, col })
        })
        .collect()
}

/// Load an embedding table: one line per token, `token<TAB>v1,v2,...`.
pub fn load_embedding_table(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let text = std::fs::read_to_string(path)?;
    let mut entries = HashMap::new();
    let mut dim: Option<usize> = None;
    for (row, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (token, rest) = line.split_once('\t').ok_or(DriftError::Parse { row, col: 0 })?;
        let vector: Vec<f64> = rest
            .split(',')
            .enumerate()
            .map(|(col, cell)| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| DriftError::Parse { row, col: col + 1 })
            })
            .collect::<Result<_>>()?;
        match dim {
            None => dim = Some(vector.len()),
            Some(d) if d != vector.len() => {
                return Err(DriftError::RaggedRows {
                    row,
                    expected: d,
                    actual: vector.len(),
                });
            }
            _ => {}
        }
        entries.insert(token.to_string(), vector);
    }
    let dim = dim.ok_or(DriftError::EmptyVocabulary)?;
    EmbeddingTable::new(dim, entries)
}
