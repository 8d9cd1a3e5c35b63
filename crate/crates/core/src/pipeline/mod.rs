//! Experiment orchestration: extract, rank, select, train, ablate and
//! report, runnable in memory or staged through files. The file route and
//! the in-memory route produce identical results for a fixed seed.

pub mod artifacts;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog::FeatureSource;
use crate::error::{Error, Result};
use crate::features::{extract_features, ExtractInput, ExtractStats, FeatureTable};
use crate::ingest::{ingest, IngestReport};
use crate::learn::{
    cross_validate, CvData, CvSpec, EvaluationReport, Hyperparams, MODEL_IDS,
};
use crate::rng::derive_seed;
use crate::select::{rank, select_topk, BinSpec, RankingResult, SelectionResult, RANK_METHODS};
use crate::textstats::NgramProfileDetector;
use crate::types::DatasetManifest;

use artifacts::{
    load_selection, write_ablation, write_extract, write_rankings, write_selection, write_train,
    AblationFile, AblationRow, Provenance, ABLATION_SCHEMA,
};

/// Feature-selection settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionCfg {
    pub method: String,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_patience")]
    pub patience: usize,
}

fn default_k_max() -> usize {
    40
}

fn default_patience() -> usize {
    2
}

impl Default for SelectionCfg {
    fn default() -> Self {
        SelectionCfg {
            method: "rf_importance".into(),
            k_max: default_k_max(),
            patience: default_patience(),
        }
    }
}

/// A full experiment configuration. The seed is mandatory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub manifest: DatasetManifest,
    #[serde(default)]
    pub selection: SelectionCfg,
    #[serde(default)]
    pub cv: CvSpec,
    #[serde(default = "default_models")]
    pub models: Vec<String>,
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub hyper: Hyperparams,
}

fn default_models() -> Vec<String> {
    MODEL_IDS.iter().map(|m| m.to_string()).collect()
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<ExperimentConfig> {
        let data = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        serde_json::from_str(&data)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    /// Check invariants that must hold before any stage runs.
    pub fn validate(&self) -> Result<()> {
        for (role, path) in &self.manifest.paths {
            if !path.exists() {
                return Err(Error::InvalidConfig(format!(
                    "manifest path for role `{role}` does not exist: {}",
                    path.display()
                )));
            }
        }
        if !RANK_METHODS.contains(&self.selection.method.as_str()) {
            return Err(Error::InvalidConfig(format!(
                "unknown selection method: {}",
                self.selection.method
            )));
        }
        if self.selection.k_max < 1 || self.selection.patience < 1 {
            return Err(Error::InvalidConfig(
                "k_max and patience must be >= 1".into(),
            ));
        }
        for m in &self.models {
            if !MODEL_IDS.contains(&m.as_str()) {
                return Err(Error::UnknownModel(m.clone()));
            }
        }
        if self.cv.folds < 2 {
            return Err(Error::InvalidConfig("cv.folds must be >= 2".into()));
        }
        Ok(())
    }

    /// Hash of the canonical JSON serialization, for provenance stamps. The
    /// output directory is excluded: it names where results land, not what
    /// the experiment is.
    pub fn config_hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        let mut hex = String::with_capacity(16);
        for b in &digest[..8] {
            hex.push_str(&format!("{b:02x}"));
        }
        hex
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            config_hash: self.config_hash(),
            seed: self.seed,
        }
    }
}

/// Everything the extract stage produces.
pub struct ExtractOutput {
    pub table: FeatureTable,
    pub ingest_report: IngestReport,
    pub stats: ExtractStats,
}

/// Ingest the manifest's dataset and extract the feature table.
pub fn run_extract(config: &ExperimentConfig) -> Result<ExtractOutput> {
    let catalog = crate::build_catalog(&config.manifest.dataset_id)?;
    let (accounts, tweets, ingest_report) = ingest(&config.manifest)?;
    let detector = NgramProfileDetector::bundled();
    let input = ExtractInput {
        dataset_id: &config.manifest.dataset_id,
        catalog: &catalog,
        accounts: &accounts,
        tweets: &tweets,
        platform_defaults: &config.manifest.platform_defaults,
        detector: &detector,
    };
    let (table, stats) = extract_features(&input)?;
    Ok(ExtractOutput {
        table,
        ingest_report,
        stats,
    })
}

/// Extract stage with artifact output.
pub fn cmd_extract(config: &ExperimentConfig) -> Result<ExtractOutput> {
    let out = run_extract(config)?;
    write_extract(
        &config.output_dir,
        &config.provenance(),
        &out.table,
        &out.ingest_report,
        &out.stats,
    )?;
    Ok(out)
}

/// All four ranking methods over the extracted table.
pub fn run_rank(config: &ExperimentConfig, table: &FeatureTable) -> Result<Vec<RankingResult>> {
    let names = table.catalog.names();
    RANK_METHODS
        .iter()
        .map(|method| {
            rank(
                &table.matrix,
                &table.labels,
                &names,
                method,
                BinSpec::default(),
                derive_seed(config.seed, "rank", 0),
            )
        })
        .collect()
}

pub fn cmd_rank(config: &ExperimentConfig) -> Result<Vec<RankingResult>> {
    let (table, _) = artifacts::load_extract(&config.output_dir)?;
    let rankings = run_rank(config, &table)?;
    write_rankings(&config.output_dir, &config.provenance(), &table, &rankings)?;
    Ok(rankings)
}

/// Rank with the configured method and walk the top-k curve.
pub fn run_select(config: &ExperimentConfig, table: &FeatureTable) -> Result<SelectionResult> {
    let names = table.catalog.names();
    let ranking = rank(
        &table.matrix,
        &table.labels,
        &names,
        &config.selection.method,
        BinSpec::default(),
        derive_seed(config.seed, "rank", 0),
    )?;
    let fold_fit = table.color_fold_fit();
    let data = CvData {
        matrix: &table.matrix,
        labels: &table.labels,
        fold_fit: Some(&fold_fit),
    };
    select_topk(
        &data,
        &names,
        &ranking,
        config.selection.k_max,
        config.selection.patience,
        &config.cv,
        &config.hyper,
        derive_seed(config.seed, "select", 0),
    )
}

pub fn cmd_select(config: &ExperimentConfig) -> Result<SelectionResult> {
    let (table, _) = artifacts::load_extract(&config.output_dir)?;
    let selection = run_select(config, &table)?;
    write_selection(&config.output_dir, &config.provenance(), &selection)?;
    Ok(selection)
}

/// Cross-validate every configured model on the chosen features, sorted by
/// mean accuracy (best first).
pub fn run_train(
    config: &ExperimentConfig,
    table: &FeatureTable,
    chosen: &[String],
) -> Result<Vec<EvaluationReport>> {
    let sub = table.subset(chosen);
    let fold_fit = sub.color_fold_fit();
    let data = CvData {
        matrix: &sub.matrix,
        labels: &sub.labels,
        fold_fit: Some(&fold_fit),
    };
    let mut reports = Vec::with_capacity(config.models.len());
    for model_id in &config.models {
        reports.push(cross_validate(
            model_id,
            &data,
            &config.cv,
            &config.hyper,
            derive_seed(config.seed, model_id, 0),
            None,
        )?);
    }
    reports.sort_by(|a, b| {
        b.accuracy
            .mean
            .total_cmp(&a.accuracy.mean)
            .then_with(|| a.model_id.cmp(&b.model_id))
    });
    Ok(reports)
}

pub fn cmd_train(config: &ExperimentConfig) -> Result<Vec<EvaluationReport>> {
    let (table, _) = artifacts::load_extract(&config.output_dir)?;
    // Train on the selected subset when a selection ran; otherwise use the
    // full catalog.
    let chosen = match load_selection(&config.output_dir) {
        Ok(sel) => sel.chosen_features,
        Err(Error::IoFailure { .. }) => table.catalog.names(),
        Err(e) => return Err(e),
    };
    let reports = run_train(config, &table, &chosen)?;
    write_train(&config.output_dir, &config.provenance(), &chosen, &reports)?;
    Ok(reports)
}

/// Ablation: select + evaluate with account-only, content-only and combined
/// feature sets. The combined run uses exactly the union of the two partial
/// catalogs.
pub fn run_ablate(config: &ExperimentConfig, table: &FeatureTable) -> Result<AblationFile> {
    let subsets = [
        ("account", Some(FeatureSource::Account)),
        ("content", Some(FeatureSource::Content)),
        ("combined", None),
    ];
    let mut rows = Vec::new();
    for (name, source) in subsets {
        let names: Vec<String> = table
            .catalog
            .iter()
            .filter(|d| source.map_or(true, |s| d.source == s))
            .map(|d| d.name.clone())
            .collect();
        if names.is_empty() {
            rows.push(AblationRow {
                configuration: name.to_string(),
                available: false,
                n_features: 0,
                chosen_k: 0,
                accuracy: 0.0,
            });
            continue;
        }
        let sub = table.subset(&names);
        let sub_cfg = ExperimentConfig {
            selection: SelectionCfg {
                method: config.selection.method.clone(),
                k_max: config.selection.k_max,
                patience: config.selection.patience,
            },
            ..config.clone()
        };
        let selection = run_select(&sub_cfg, &sub)?;
        let accuracy = selection
            .accuracy_curve
            .get(selection.chosen_k - 1)
            .map(|p| p.mean_accuracy)
            .unwrap_or(0.0);
        rows.push(AblationRow {
            configuration: name.to_string(),
            available: true,
            n_features: names.len(),
            chosen_k: selection.chosen_k,
            accuracy,
        });
    }
    Ok(AblationFile {
        schema: ABLATION_SCHEMA.to_string(),
        provenance: config.provenance(),
        method: config.selection.method.clone(),
        rows,
    })
}

pub fn cmd_ablate(config: &ExperimentConfig) -> Result<AblationFile> {
    let (table, _) = artifacts::load_extract(&config.output_dir)?;
    let ablation = run_ablate(config, &table)?;
    write_ablation(&config.output_dir, &ablation)?;
    Ok(ablation)
}

/// Consolidated report: merges whatever stage artifacts exist in the output
/// directory into one JSON document plus figure-ready CSVs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConsolidatedReport {
    pub schema: String,
    pub config_hash: String,
    pub seed: u64,
    pub dataset_id: String,
    pub extract: Option<artifacts::ExtractMeta>,
    pub rankings: Option<artifacts::RankingsFile>,
    pub selection: Option<artifacts::SelectionFile>,
    pub models: Option<artifacts::ModelsReportFile>,
    pub ablation: Option<AblationFile>,
    pub timings: BTreeMap<String, serde_json::Value>,
}

pub const REPORT_SCHEMA: &str = "botminer-report/v1";

pub fn cmd_report(output_dir: &Path) -> Result<ConsolidatedReport> {
    let extract = artifacts::load_extract(output_dir)
        .ok()
        .map(|(_, meta)| meta);
    let rankings = artifacts::load_rankings(output_dir).ok();
    let selection = artifacts::load_selection(output_dir).ok();
    let models = artifacts::load_train(output_dir).ok();
    let ablation = artifacts::load_ablation(output_dir).ok();
    if extract.is_none()
        && rankings.is_none()
        && selection.is_none()
        && models.is_none()
        && ablation.is_none()
    {
        return Err(Error::NothingToReport);
    }

    let mut timings = BTreeMap::new();
    for stage in ["extract", "select", "train"] {
        let path = output_dir.join(format!("timings_{stage}.json"));
        if let Ok(v) = artifacts::read_json::<serde_json::Value>(&path) {
            timings.insert(stage.to_string(), v);
        }
    }

    let provenance = extract
        .as_ref()
        .map(|m| m.provenance.clone())
        .or_else(|| rankings.as_ref().map(|r| r.provenance.clone()))
        .or_else(|| selection.as_ref().map(|s| s.provenance.clone()))
        .or_else(|| models.as_ref().map(|m| m.provenance.clone()))
        .or_else(|| ablation.as_ref().map(|a| a.provenance.clone()))
        .expect("at least one artifact present");

    let report = ConsolidatedReport {
        schema: REPORT_SCHEMA.to_string(),
        config_hash: provenance.config_hash.clone(),
        seed: provenance.seed,
        dataset_id: extract
            .as_ref()
            .map(|m| m.dataset_id.clone())
            .unwrap_or_default(),
        extract,
        rankings,
        selection,
        models,
        ablation,
        timings,
    };
    artifacts::write_json(&output_dir.join(artifacts::REPORT_FILE), &report)?;

    // Figure-ready plot data.
    if let Some(rankings) = &report.rankings {
        for ranking in &rankings.rankings {
            let src = output_dir.join("rankings").join(format!("{}.csv", ranking.method));
            let dst = output_dir.join(format!("fig_ranking_{}.csv", ranking.method));
            if src.exists() {
                std::fs::copy(&src, &dst).map_err(|e| Error::io(dst.display().to_string(), e))?;
            }
        }
    }
    if let Some(selection) = &report.selection {
        let seconds: BTreeMap<usize, f64> = report
            .timings
            .get("select")
            .and_then(|v| serde_json::from_value::<artifacts::SelectTimings>(v.clone()).ok())
            .map(|t| t.per_k_seconds.into_iter().collect())
            .unwrap_or_default();
        let mut csv = Vec::new();
        csv.extend_from_slice(
            format!(
                "# config_hash={} seed={}\n",
                report.config_hash, report.seed
            )
            .as_bytes(),
        );
        csv.extend_from_slice(b"k,accuracy,seconds\n");
        for (k, accuracy) in &selection.curve {
            let secs = seconds.get(k).copied().unwrap_or(0.0);
            csv.extend_from_slice(format!("{k},{accuracy:.4},{secs:.4}\n").as_bytes());
        }
        std::fs::write(output_dir.join("fig_curve.csv"), csv)
            .map_err(|e| Error::io("fig_curve.csv", e))?;
    }
    Ok(report)
}
