//! On-disk artifact formats for the pipeline stages.
//!
//! Every file carries the config hash and seed for provenance: JSON files as
//! fields, CSV files as a leading `#` comment line. Wall-clock measurements
//! live only in `timings_*.json` sidecars; everything else is byte-identical
//! across reruns of the same seeded configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::build_catalog;
use crate::error::{Error, Result};
use crate::features::{ExtractStats, FeatureTable};
use crate::ingest::IngestReport;
use crate::learn::EvaluationReport;
use crate::matrix::Matrix;
use crate::select::{RankingResult, SelectionResult};
use crate::types::Label;

pub const MATRIX_FILE: &str = "matrix.csv";
pub const MASK_FILE: &str = "mask.csv";
pub const COLORS_FILE: &str = "colors.csv";
pub const EXTRACT_META_FILE: &str = "extract_meta.json";
pub const RANKINGS_FILE: &str = "rankings.json";
pub const SELECTION_FILE: &str = "selection.json";
pub const SELECTION_CURVE_FILE: &str = "selection_curve.csv";
pub const MODELS_REPORT_FILE: &str = "models_report.json";
pub const MODELS_REPORT_CSV: &str = "models_report.csv";
pub const ABLATION_FILE: &str = "ablation.json";
pub const ABLATION_CSV: &str = "ablation.csv";
pub const REPORT_FILE: &str = "report.json";

/// Provenance stamp shared by all artifacts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    fn comment_line(&self) -> String {
        format!("# config_hash={} seed={}\n", self.config_hash, self.seed)
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::io(path.display().to_string(), e)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::InvalidConfig(format!("serialize {}: {e}", path.display())))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let data = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&data).map_err(|e| Error::SchemaMismatch {
        expected: format!("parseable {}", path.display()),
        found: e.to_string(),
    })
}

/// Extraction metadata: enough to rebuild the in-memory table (with
/// `matrix.csv`, `mask.csv`, `colors.csv`) and to audit the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractMeta {
    pub schema: String,
    #[serde(flatten)]
    pub provenance: Provenance,
    pub dataset_id: String,
    pub rows: usize,
    pub features: Vec<String>,
    pub platform_defaults: BTreeMap<String, String>,
    pub source_vocab_size: usize,
    pub ingest: IngestReport,
    /// Accounts whose content features are fully masked (no tweets).
    pub accounts_without_tweets: BTreeMap<String, usize>,
}

pub const EXTRACT_SCHEMA: &str = "botminer-extract/v1";

fn float_cell(v: f64) -> String {
    // Shortest representation that round-trips exactly.
    format!("{v}")
}

fn write_value_csv(
    path: &Path,
    provenance: &Provenance,
    header: &[String],
    table: &FeatureTable,
    values: &Matrix,
) -> Result<()> {
    let mut out = Vec::new();
    out.extend_from_slice(provenance.comment_line().as_bytes());
    let mut line = String::from("account_id,label");
    for name in header {
        line.push(',');
        line.push_str(name);
    }
    line.push('\n');
    out.extend_from_slice(line.as_bytes());
    for r in 0..values.rows() {
        let mut line = format!("{},{}", table.account_ids[r], table.labels[r]);
        for c in 0..values.cols() {
            line.push(',');
            line.push_str(&float_cell(values.get(r, c)));
        }
        line.push('\n');
        out.extend_from_slice(line.as_bytes());
    }
    write_atomic(path, &out)
}

pub fn write_extract(
    dir: &Path,
    provenance: &Provenance,
    table: &FeatureTable,
    ingest: &IngestReport,
    stats: &ExtractStats,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let names = table.catalog.names();
    let written: Vec<PathBuf> = [
        MATRIX_FILE,
        MASK_FILE,
        COLORS_FILE,
        EXTRACT_META_FILE,
        "timings_extract.json",
    ]
    .iter()
    .map(|f| dir.join(f))
    .collect();

    let run = (|| -> Result<()> {
        write_value_csv(&dir.join(MATRIX_FILE), provenance, &names, table, &table.matrix)?;
        write_value_csv(&dir.join(MASK_FILE), provenance, &names, table, &table.mask)?;
        write_colors_csv(&dir.join(COLORS_FILE), provenance, table)?;
        write_json(
            &dir.join(EXTRACT_META_FILE),
            &ExtractMeta {
                schema: EXTRACT_SCHEMA.to_string(),
                provenance: provenance.clone(),
                dataset_id: table.dataset_id.clone(),
                rows: table.matrix.rows(),
                features: names.clone(),
                platform_defaults: table.platform_defaults.clone(),
                source_vocab_size: table.source_vocab_size,
                ingest: ingest.clone(),
                accounts_without_tweets: stats.accounts_without_tweets.clone(),
            },
        )?;
        write_json(&dir.join("timings_extract.json"), &TimingsFile {
            provenance: provenance.clone(),
            seconds: stats.family_seconds.clone(),
            wall_seconds: stats.wall_seconds,
        })
    })();

    if run.is_err() {
        // No partial outputs on failure.
        for f in &written {
            let _ = fs::remove_file(f);
        }
    }
    run
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingsFile {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub seconds: BTreeMap<String, f64>,
    pub wall_seconds: f64,
}

use crate::catalog::COLOR_FIELDS;
use crate::features::account::ProfileColors;

fn write_colors_csv(path: &Path, provenance: &Provenance, table: &FeatureTable) -> Result<()> {
    let mut out = Vec::new();
    out.extend_from_slice(provenance.comment_line().as_bytes());
    let mut header = String::from("account_id");
    for f in COLOR_FIELDS {
        header.push(',');
        header.push_str(f);
    }
    header.push_str(",profile_background_image_url,profile_background_tile\n");
    out.extend_from_slice(header.as_bytes());
    for (id, colors) in table.account_ids.iter().zip(&table.colors) {
        let mut line = id.clone();
        for f in COLOR_FIELDS {
            line.push(',');
            if let Some(Some(v)) = colors.fields.get(f) {
                line.push_str(v);
            }
        }
        line.push(',');
        if let Some(url) = &colors.background_image_url {
            line.push_str(url);
        }
        line.push(',');
        line.push_str(if colors.background_tile { "1" } else { "0" });
        line.push('\n');
        out.extend_from_slice(line.as_bytes());
    }
    write_atomic(path, &out)
}

fn csv_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path.display().to_string(), io),
            other => Error::InvalidConfig(format!("{}: {other:?}", path.display())),
        })
}

fn read_value_csv(path: &Path, expected_features: &[String]) -> Result<(Vec<String>, Vec<Label>, Matrix)> {
    let mut reader = csv_reader(path)?;
    let headers = reader
        .headers()
        .map_err(|e| Error::SchemaMismatch {
            expected: "csv header".into(),
            found: format!("{}: {e}", path.display()),
        })?
        .clone();
    let names: Vec<&str> = headers.iter().skip(2).collect();
    if names != expected_features.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(Error::SchemaMismatch {
            expected: format!("{} catalog columns", expected_features.len()),
            found: format!("{} mismatched columns in {}", names.len(), path.display()),
        });
    }
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::SchemaMismatch {
            expected: "csv row".into(),
            found: format!("{}: {e}", path.display()),
        })?;
        ids.push(record.get(0).unwrap_or_default().to_string());
        labels.push(match record.get(1) {
            Some("bot") => Label::Bot,
            Some("human") => Label::Human,
            other => {
                return Err(Error::SchemaMismatch {
                    expected: "label human|bot".into(),
                    found: format!("{other:?}"),
                })
            }
        });
        let mut row = Vec::with_capacity(expected_features.len());
        for cell in record.iter().skip(2) {
            row.push(cell.parse::<f64>().map_err(|e| Error::SchemaMismatch {
                expected: "float cell".into(),
                found: format!("{cell:?}: {e}"),
            })?);
        }
        rows.push(row);
    }
    Ok((ids, labels, Matrix::from_rows(rows)))
}

fn read_colors_csv(path: &Path) -> Result<Vec<ProfileColors>> {
    let mut reader = csv_reader(path)?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::SchemaMismatch {
            expected: "colors row".into(),
            found: format!("{}: {e}", path.display()),
        })?;
        let mut fields = BTreeMap::new();
        for (i, f) in COLOR_FIELDS.iter().enumerate() {
            let cell = record.get(i + 1).unwrap_or_default();
            fields.insert(
                f.to_string(),
                (!cell.is_empty()).then(|| cell.to_string()),
            );
        }
        let url = record.get(6).unwrap_or_default();
        out.push(ProfileColors {
            fields,
            background_image_url: (!url.is_empty()).then(|| url.to_string()),
            background_tile: record.get(7) == Some("1"),
        });
    }
    Ok(out)
}

/// Rebuild the feature table from the extract artifacts.
pub fn load_extract(dir: &Path) -> Result<(FeatureTable, ExtractMeta)> {
    let meta: ExtractMeta = read_json(&dir.join(EXTRACT_META_FILE))?;
    if meta.schema != EXTRACT_SCHEMA {
        return Err(Error::SchemaMismatch {
            expected: EXTRACT_SCHEMA.into(),
            found: meta.schema,
        });
    }
    let catalog = build_catalog(&meta.dataset_id)?;
    let names = catalog.names();
    if names != meta.features {
        return Err(Error::SchemaMismatch {
            expected: "catalog matching dataset".into(),
            found: "extract_meta feature list differs".into(),
        });
    }
    let (ids, labels, matrix) = read_value_csv(&dir.join(MATRIX_FILE), &names)?;
    let (_, _, mask) = read_value_csv(&dir.join(MASK_FILE), &names)?;
    let colors = read_colors_csv(&dir.join(COLORS_FILE))?;
    Ok((
        FeatureTable {
            dataset_id: meta.dataset_id.clone(),
            catalog,
            account_ids: ids,
            labels,
            matrix,
            mask,
            colors,
            platform_defaults: meta.platform_defaults.clone(),
            source_vocab_size: meta.source_vocab_size,
        },
        meta,
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankingsFile {
    pub schema: String,
    #[serde(flatten)]
    pub provenance: Provenance,
    pub rankings: Vec<RankingResult>,
}

pub const RANKINGS_SCHEMA: &str = "botminer-rankings/v1";

pub fn write_rankings(
    dir: &Path,
    provenance: &Provenance,
    table: &FeatureTable,
    rankings: &[RankingResult],
) -> Result<()> {
    write_json(
        &dir.join(RANKINGS_FILE),
        &RankingsFile {
            schema: RANKINGS_SCHEMA.to_string(),
            provenance: provenance.clone(),
            rankings: rankings.to_vec(),
        },
    )?;
    let sub = dir.join("rankings");
    fs::create_dir_all(&sub).map_err(|e| io_err(&sub, e))?;
    for ranking in rankings {
        let mut out = Vec::new();
        out.extend_from_slice(provenance.comment_line().as_bytes());
        out.extend_from_slice(b"feature,score,source\n");
        for (name, score) in &ranking.scores {
            let source = table
                .catalog
                .get(name)
                .map(|d| match d.source {
                    crate::catalog::FeatureSource::Account => "account",
                    crate::catalog::FeatureSource::Content => "content",
                })
                .unwrap_or("unknown");
            out.extend_from_slice(format!("{name},{:.4},{source}\n", score).as_bytes());
        }
        write_atomic(&sub.join(format!("{}.csv", ranking.method)), &out)?;
    }
    Ok(())
}

pub fn load_rankings(dir: &Path) -> Result<RankingsFile> {
    let file: RankingsFile = read_json(&dir.join(RANKINGS_FILE))?;
    if file.schema != RANKINGS_SCHEMA {
        return Err(Error::SchemaMismatch {
            expected: RANKINGS_SCHEMA.into(),
            found: file.schema,
        });
    }
    Ok(file)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionFile {
    pub schema: String,
    #[serde(flatten)]
    pub provenance: Provenance,
    pub method: String,
    pub chosen_k: usize,
    pub chosen_features: Vec<String>,
    /// (k, mean accuracy); runtimes live in `timings_select.json`.
    pub curve: Vec<(usize, f64)>,
}

pub const SELECTION_SCHEMA: &str = "botminer-selection/v1";

pub fn write_selection(dir: &Path, provenance: &Provenance, sel: &SelectionResult) -> Result<()> {
    write_json(
        &dir.join(SELECTION_FILE),
        &SelectionFile {
            schema: SELECTION_SCHEMA.to_string(),
            provenance: provenance.clone(),
            method: sel.ranking.method.clone(),
            chosen_k: sel.chosen_k,
            chosen_features: sel.chosen_features.clone(),
            curve: sel
                .accuracy_curve
                .iter()
                .map(|p| (p.k, p.mean_accuracy))
                .collect(),
        },
    )?;
    let mut curve_csv = Vec::new();
    curve_csv.extend_from_slice(provenance.comment_line().as_bytes());
    curve_csv.extend_from_slice(b"k,accuracy\n");
    for p in &sel.accuracy_curve {
        curve_csv.extend_from_slice(format!("{},{:.4}\n", p.k, p.mean_accuracy).as_bytes());
    }
    write_atomic(&dir.join(SELECTION_CURVE_FILE), &curve_csv)?;
    write_json(
        &dir.join("timings_select.json"),
        &SelectTimings {
            provenance: provenance.clone(),
            per_k_seconds: sel
                .accuracy_curve
                .iter()
                .map(|p| (p.k, p.runtime_seconds))
                .collect(),
        },
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectTimings {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub per_k_seconds: Vec<(usize, f64)>,
}

pub fn load_selection(dir: &Path) -> Result<SelectionFile> {
    let file: SelectionFile = read_json(&dir.join(SELECTION_FILE))?;
    if file.schema != SELECTION_SCHEMA {
        return Err(Error::SchemaMismatch {
            expected: SELECTION_SCHEMA.into(),
            found: file.schema,
        });
    }
    Ok(file)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelsReportFile {
    pub schema: String,
    #[serde(flatten)]
    pub provenance: Provenance,
    pub features_used: Vec<String>,
    /// Sorted by mean accuracy, best first; train times in
    /// `timings_train.json`.
    pub models: Vec<ModelRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelRow {
    pub model_id: String,
    pub folds: usize,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub auc_mean: f64,
    pub recall_mean: f64,
    pub precision_mean: f64,
    pub f1_mean: f64,
}

pub const MODELS_SCHEMA: &str = "botminer-models/v1";

pub fn write_train(
    dir: &Path,
    provenance: &Provenance,
    features_used: &[String],
    reports: &[EvaluationReport],
) -> Result<()> {
    let rows: Vec<ModelRow> = reports
        .iter()
        .map(|r| ModelRow {
            model_id: r.model_id.clone(),
            folds: r.folds,
            accuracy_mean: r.accuracy.mean,
            accuracy_std: r.accuracy.std,
            auc_mean: r.auc.mean,
            recall_mean: r.recall.mean,
            precision_mean: r.precision.mean,
            f1_mean: r.f1.mean,
        })
        .collect();
    write_json(
        &dir.join(MODELS_REPORT_FILE),
        &ModelsReportFile {
            schema: MODELS_SCHEMA.to_string(),
            provenance: provenance.clone(),
            features_used: features_used.to_vec(),
            models: rows.clone(),
        },
    )?;
    let mut csv = Vec::new();
    csv.extend_from_slice(provenance.comment_line().as_bytes());
    csv.extend_from_slice(b"model,accuracy,auc,recall,precision,f1\n");
    for row in &rows {
        csv.extend_from_slice(
            format!(
                "{},{:.4},{:.4},{:.4},{:.4},{:.4}\n",
                row.model_id,
                row.accuracy_mean,
                row.auc_mean,
                row.recall_mean,
                row.precision_mean,
                row.f1_mean
            )
            .as_bytes(),
        );
    }
    write_atomic(&dir.join(MODELS_REPORT_CSV), &csv)?;
    write_json(
        &dir.join("timings_train.json"),
        &TrainTimings {
            provenance: provenance.clone(),
            train_time_seconds: reports
                .iter()
                .map(|r| (r.model_id.clone(), r.train_time_seconds))
                .collect(),
        },
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainTimings {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub train_time_seconds: BTreeMap<String, f64>,
}

pub fn load_train(dir: &Path) -> Result<ModelsReportFile> {
    let file: ModelsReportFile = read_json(&dir.join(MODELS_REPORT_FILE))?;
    if file.schema != MODELS_SCHEMA {
        return Err(Error::SchemaMismatch {
            expected: MODELS_SCHEMA.into(),
            found: file.schema,
        });
    }
    Ok(file)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationRow {
    pub configuration: String,
    pub available: bool,
    pub n_features: usize,
    pub chosen_k: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationFile {
    pub schema: String,
    #[serde(flatten)]
    pub provenance: Provenance,
    pub method: String,
    pub rows: Vec<AblationRow>,
}

pub const ABLATION_SCHEMA: &str = "botminer-ablation/v1";

pub fn write_ablation(dir: &Path, file: &AblationFile) -> Result<()> {
    write_json(&dir.join(ABLATION_FILE), file)?;
    let mut csv = Vec::new();
    csv.extend_from_slice(file.provenance.comment_line().as_bytes());
    csv.extend_from_slice(b"configuration,accuracy\n");
    for row in &file.rows {
        if row.available {
            csv.extend_from_slice(
                format!("{},{:.4}\n", row.configuration, row.accuracy).as_bytes(),
            );
        } else {
            csv.extend_from_slice(format!("{},unavailable\n", row.configuration).as_bytes());
        }
    }
    write_atomic(&dir.join(ABLATION_CSV), &csv)
}

pub fn load_ablation(dir: &Path) -> Result<AblationFile> {
    let file: AblationFile = read_json(&dir.join(ABLATION_FILE))?;
    if file.schema != ABLATION_SCHEMA {
        return Err(Error::SchemaMismatch {
            expected: ABLATION_SCHEMA.into(),
            found: file.schema,
        });
    }
    Ok(file)
}
