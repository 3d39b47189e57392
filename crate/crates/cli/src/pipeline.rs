//! Dataset loading and per-model preparation shared by the commands.

use anyhow::{ensure, Context, Result};
use qkml_core::dataset::{
    apply_scaler, engineer_features, filter_status, fit_scaler, generate, load_csv, select_top_k,
    subsample, train_test_split, EngineerSummary, ScalerParams, StatusSummary,
};
use qkml_core::Dataset;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Source, DEFAULT_QSVM_SUBSAMPLE, DEFAULT_QSVM_TOP_K};

/// Rows kept by the reference cleaning of the full export.
pub const REFERENCE_KEPT_ROWS: usize = 5497;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub source: String,
    pub seed: u64,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<StatusSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engineering: Option<EngineerSummary>,
    pub kept_rows: usize,
    pub class_counts: [usize; 2],
    pub feature_names: Vec<String>,
    pub dataset_sha256: String,
}

pub struct Loaded {
    pub dataset: Dataset,
    pub summary: IngestSummary,
    pub from_csv: bool,
}

pub fn load(cfg: &ExperimentConfig) -> Result<Loaded> {
    let source = cfg.source()?;
    let (dataset, status, engineering, label, from_csv) = match source {
        Source::Synthetic { kind, size, noise } => {
            let ds = generate(kind, size, noise, cfg.seed)
                .with_context(|| format!("generating synthetic {kind} data"))?;
            let label = format!("synthetic:{kind}(n={size}, noise={noise})");
            (ds, None, None, label, false)
        }
        Source::Csv { path, features } => {
            let table = load_csv(&path).with_context(|| format!("loading {}", path.display()))?;
            let (kept, status) = filter_status(&table, &features.status_column)
                .with_context(|| format!("filtering {}", path.display()))?;
            log::info!(
                "status filter kept {} of {} rows (reference cleaning: {REFERENCE_KEPT_ROWS})",
                status.kept_rows,
                status.input_rows
            );
            let (ds, eng) = engineer_features(&kept, &features)
                .with_context(|| format!("engineering features from {}", path.display()))?;
            for (reason, count) in &eng.drop_reasons {
                log::info!("dropped {count} row(s) at feature {reason}");
            }
            let label = path.file_name().map_or_else(
                || path.display().to_string(),
                |f| f.to_string_lossy().into_owned(),
            );
            (ds, Some(status), Some(eng), format!("csv:{label}"), true)
        }
    };
    let summary = IngestSummary {
        source: label,
        seed: cfg.seed,
        config_hash: cfg.hash(),
        status,
        engineering,
        kept_rows: dataset.len(),
        class_counts: dataset.class_counts(),
        feature_names: dataset.feature_names.clone(),
        dataset_sha256: dataset.content_hash(),
    };
    Ok(Loaded {
        dataset,
        summary,
        from_csv,
    })
}

#[derive(Debug, Clone)]
pub struct Prepared {
    pub train: Dataset,
    pub test: Dataset,
    pub scaler: Option<ScalerParams>,
    /// Indices into the scaled feature list.
    pub selected: Option<Vec<usize>>,
    pub train_rows_before_subsample: usize,
}

/// Split, optional training subsample, scaling fit on train, then top-k
/// feature selection on the scaled training split.
pub fn prepare(cfg: &ExperimentConfig, loaded: &Loaded, quantum: bool) -> Result<Prepared> {
    let d = &cfg.dataset;
    let (mut train, mut test) =
        train_test_split(&loaded.dataset, d.test_fraction, cfg.seed, d.stratify)
            .context("splitting dataset")?;
    let before = train.len();
    let cap = d
        .subsample
        .or((quantum && loaded.from_csv).then_some(DEFAULT_QSVM_SUBSAMPLE));
    if let Some(size) = cap {
        if size < train.len() {
            train = subsample(&train, size, cfg.seed);
            log::info!("subsampled training rows {before} -> {}", train.len());
        }
    }
    let [c0, c1] = train.class_counts();
    ensure!(
        c0 > 0 && c1 > 0,
        "training split has a single class ({c0} vs {c1}); adjust seed or test_fraction"
    );
    let scaler = match cfg.scaler_mode(quantum) {
        Some(mode) => {
            let p = fit_scaler(&train, mode).context("fitting scaler")?;
            train = apply_scaler(&p, &train);
            test = apply_scaler(&p, &test);
            Some(p)
        }
        None => None,
    };
    ensure!(train.dim() > 0, "no usable features remain after scaling");
    let k = d.select_k.or(quantum.then_some(DEFAULT_QSVM_TOP_K));
    let selected = match k {
        Some(k) if k < train.dim() => {
            let idx = select_top_k(&train, k).context("selecting features")?;
            train = train.select_features(&idx);
            test = test.select_features(&idx);
            log::info!("selected features: {}", train.feature_names.join(", "));
            Some(idx)
        }
        _ => None,
    };
    Ok(Prepared {
        train,
        test,
        scaler,
        selected,
        train_rows_before_subsample: before,
    })
}
