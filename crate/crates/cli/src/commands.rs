use std::io::{BufRead, Write};
use std::path::Path;

use driftfield::{
    cosine_deformation, embed_text, evaluate_batch, fit_baseline, frequency_l2,
    frequency_weighted_centroid, load_csv, load_embedding_table, parse_csv_row,
    snapshot_series, text_frequency_wasserstein, tokenize, BaselineFile, BaselineSummary,
    DensityModel, DriftConfig, DriftError, Embedder, PointCloud, Result, SnapshotFrame,
};
use serde::Serialize;

use crate::config::CliExtras;

/// Exit code signalling a detected drift, distinct from errors (1) so
/// schedulers can branch on it.
pub const EXIT_DRIFT: i32 = 3;
pub const EXIT_OK: i32 = 0;

fn load_baseline_file(path: &Path) -> Result<(BaselineSummary, BaselineFile)> {
    let text = std::fs::read_to_string(path)?;
    let file = BaselineFile::from_json(&text)?;
    let summary = file.into_summary()?;
    Ok((summary, file))
}

/// `baseline`: fit a summary from CSV and write the self-describing file.
pub fn cmd_baseline(
    input: &Path,
    out: &Path,
    has_header: bool,
    cfg: &DriftConfig,
) -> Result<i32> {
    let cloud = load_csv(input, has_header)?;
    let summary = fit_baseline(&cloud, cfg)?;
    let file = BaselineFile::from_summary(&summary, cfg);
    std::fs::write(out, file.to_json_pretty() + "\n")?;
    Ok(EXIT_OK)
}

/// `detect`: evaluate one batch against a stored baseline and print the
/// report; exit 3 when the composite index crosses the threshold.
pub fn cmd_detect(
    baseline_path: &Path,
    new_path: &Path,
    has_header: bool,
    format: &str,
    cfg: &DriftConfig,
) -> Result<i32> {
    let (summary, _) = load_baseline_file(baseline_path)?;
    let batch = load_csv(new_path, has_header)?;
    let report = evaluate_batch(&summary, &batch, cfg)?;
    match format {
        "json" => println!("{}", report.to_json()),
        "csv" => print!("{}", report.to_csv()),
        other => {
            return Err(DriftError::InvalidConfig(format!(
                "unknown format {other:?}, expected json or csv"
            )))
        }
    }
    Ok(if report.drifted == Some(true) {
        EXIT_DRIFT
    } else {
        EXIT_OK
    })
}

/// The text drift report: exactly the six metric fields.
#[derive(Debug, Serialize)]
struct TextDriftReport {
    original_length_chars: usize,
    drifted_length_chars: usize,
    length_change_pct: f64,
    deformation_cosine: f64,
    shape_change_l2: f64,
    wasserstein: f64,
}

/// `text-drift`: compare two text files through the embedding pipeline.
pub fn cmd_text_drift(
    original: &Path,
    drifted: &Path,
    embeddings: Option<&Path>,
    dim: usize,
    cfg: &DriftConfig,
) -> Result<i32> {
    let original_text = std::fs::read_to_string(original)?;
    let drifted_text = std::fs::read_to_string(drifted)?;
    let original_tokens = tokenize(&original_text);
    let drifted_tokens = tokenize(&drifted_text);
    if original_tokens.total() == 0 || drifted_tokens.total() == 0 {
        return Err(DriftError::EmptyText);
    }

    let table = match embeddings {
        Some(path) => Some(load_embedding_table(path)?),
        None => None,
    };
    let embedder = match &table {
        Some(t) => Embedder::Table(t),
        None => Embedder::Fallback {
            seed: cfg.seed,
            dim,
        },
    };

    let original_embedded = embed_text(&original_tokens, embedder.clone())?;
    let drifted_embedded = embed_text(&drifted_tokens, embedder)?;
    for (name, embedded) in [
        ("original", &original_embedded),
        ("drifted", &drifted_embedded),
    ] {
        if !embedded.skipped.is_empty() {
            eprintln!(
                "note: {} tokens of the {name} text missing from the embedding table: {}",
                embedded.skipped.len(),
                embedded.skipped.join(", ")
            );
        }
    }

    let centroid_original =
        frequency_weighted_centroid(&original_tokens, &original_embedded)?;
    let centroid_drifted = frequency_weighted_centroid(&drifted_tokens, &drifted_embedded)?;

    let original_length_chars = original_text.chars().count();
    let drifted_length_chars = drifted_text.chars().count();
    let pct = 100.0 * (1.0 - drifted_length_chars as f64 / original_length_chars as f64);
    let report = TextDriftReport {
        original_length_chars,
        drifted_length_chars,
        length_change_pct: (pct * 10.0).round() / 10.0,
        deformation_cosine: cosine_deformation(&centroid_original, &centroid_drifted)?,
        shape_change_l2: frequency_l2(&original_tokens, &drifted_tokens)?,
        wasserstein: text_frequency_wasserstein(&original_tokens, &drifted_tokens)?,
    };
    println!(
        "{}",
        serde_json::to_string(&report).expect("report serialization cannot fail")
    );
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct FrameJson<'a> {
    t: f64,
    points: &'a [[f64; 2]],
    hull_baseline: &'a [[f64; 2]],
    hull_new: &'a [[f64; 2]],
    arrows: &'a [[f64; 4]],
}

impl<'a> FrameJson<'a> {
    fn new(frame: &'a SnapshotFrame) -> Self {
        FrameJson {
            t: frame.t,
            points: &frame.points,
            hull_baseline: &frame.hull_baseline,
            hull_new: &frame.hull_new,
            arrows: &frame.arrows,
        }
    }
}

/// `snapshots`: write one plottable JSON frame per interpolation fraction.
pub fn cmd_snapshots(
    baseline_path: &Path,
    new_path: &Path,
    has_header: bool,
    fractions: &[f64],
    out_dir: &Path,
    cfg: &DriftConfig,
) -> Result<i32> {
    let baseline = load_csv(baseline_path, has_header)?;
    let new_cloud = load_csv(new_path, has_header)?;
    let old_model = DensityModel::from_baseline(&fit_baseline(&baseline, cfg)?);
    let new_model = DensityModel::from_baseline(&fit_baseline(&new_cloud, cfg)?);
    let series = snapshot_series(&baseline, &new_cloud, &old_model, &new_model, fractions)?;

    std::fs::create_dir_all(out_dir)?;
    for (index, frame) in series.frames.iter().enumerate() {
        let path = out_dir.join(format!("frame_{index:03}.json"));
        let json = serde_json::to_string_pretty(&FrameJson::new(frame))
            .expect("frame serialization cannot fail");
        std::fs::write(&path, json + "\n")?;
        println!("{}", path.display());
    }
    Ok(EXIT_OK)
}

/// `stream`: consume newline-delimited CSV rows on stdin, emitting one
/// report line per batch. Malformed rows are skipped with a diagnostic and
/// counted in the next report.
pub fn cmd_stream(
    baseline_path: &Path,
    batch_size: usize,
    cfg: &DriftConfig,
    input: &mut dyn BufRead,
    output: &mut dyn Write,
) -> Result<i32> {
    if batch_size == 0 {
        return Err(DriftError::InvalidConfig(
            "batch size must be at least 1".to_string(),
        ));
    }
    let (summary, _) = load_baseline_file(baseline_path)?;
    let dim = summary.dim();

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(batch_size);
    let mut skipped: u64 = 0;
    let mut any_drift = false;

    let emit = |rows: &mut Vec<Vec<f64>>, skipped: &mut u64, output: &mut dyn Write| -> Result<bool> {
        let cloud = PointCloud::from_rows(rows)?;
        let mut report = evaluate_batch(&summary, &cloud, cfg)?;
        if *skipped > 0 {
            report.skipped_rows = Some(*skipped);
            *skipped = 0;
        }
        writeln!(output, "{}", report.to_json())?;
        output.flush()?;
        rows.clear();
        Ok(report.drifted == Some(true))
    };

    for line in input.lines() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        match parse_csv_row(&line, Some(dim)) {
            Ok(row) => rows.push(row),
            Err(err) => {
                eprintln!("skipping malformed row: {err}");
                skipped += 1;
                continue;
            }
        }
        if rows.len() == batch_size {
            any_drift |= emit(&mut rows, &mut skipped, output)?;
        }
    }
    if !rows.is_empty() {
        any_drift |= emit(&mut rows, &mut skipped, output)?;
    } else if skipped > 0 {
        eprintln!("{skipped} malformed rows after the last report");
    }

    Ok(if any_drift { EXIT_DRIFT } else { EXIT_OK })
}

/// Parse and validate snapshot fractions from flag or config.
pub fn effective_fractions(flag: Option<&str>, extras: &CliExtras) -> Result<Vec<f64>> {
    match flag {
        Some(spec) => crate::config::parse_fractions(spec),
        None => Ok(extras.fractions.clone()),
    }
}
