use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use qkml_core::baselines::{predict_forest, predict_tree, train_forest, train_tree};
use qkml_core::hybrid::{compare_hybrid, curve_csv, DenseNet, EpochStats};
use qkml_core::kernel::{
    cross_kernel, gram_matrix, matrix_hash, metadata_path, verify_qkgm, write_qkgm, KernelMetadata,
    QKGM_VERSION,
};
use qkml_core::metrics::{confusion_matrix, fmt2, render_report, ClassificationReport};
use qkml_core::svm::{fit_classical, predict, train_svm};
use qkml_core::{ConfusionMatrix, CrossKernel, Dataset, ForestConfig};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, FeatureMapConfig, ModelConfig};
use crate::pipeline::{self, IngestSummary, Prepared};
use crate::stage::Stage;

pub const SUMMARY_FILE: &str = "dataset_summary.json";
pub const DATASET_FILE: &str = "dataset.json";
pub const CURVES_FILE: &str = "curves.csv";
pub const HYBRID_MANIFEST_FILE: &str = "hybrid_manifest.json";
pub const REPORT_SUMMARY_FILE: &str = "summary.txt";
pub const KERNEL_FILE: &str = "kernel.qkgm";

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub fn ingest(cfg: &ExperimentConfig, out: &Path) -> Result<IngestSummary> {
    let loaded = pipeline::load(cfg)?;
    let mut stage = Stage::new(out)?;
    stage.write(SUMMARY_FILE, pretty(&loaded.summary)?)?;
    stage.write(DATASET_FILE, pretty(&loaded.dataset)?)?;
    stage.commit()?;
    log::info!(
        "ingested {} rows, {} features, classes {:?}",
        loaded.summary.kept_rows,
        loaded.dataset.dim(),
        loaded.summary.class_counts
    );
    Ok(loaded.summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResults {
    pub model: String,
    pub seed: u64,
    pub config_hash: String,
    pub dataset_sha256: String,
    pub n_train: usize,
    pub n_test: usize,
    pub features: Vec<String>,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub report: ClassificationReport,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
}

struct Fitted {
    train_pred: Vec<u8>,
    test_pred: Vec<u8>,
    model_json: String,
    notes: BTreeMap<String, String>,
}

fn accuracy(truth: &[u8], pred: &[u8]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    truth.iter().zip(pred).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}

fn fit(cfg: &ExperimentConfig, prep: &Prepared) -> Result<Fitted> {
    let (train, test) = (&prep.train, &prep.test);
    let mut notes = BTreeMap::new();
    let fitted = match &cfg.model {
        ModelConfig::Dt { .. } => {
            let tc = cfg.model.tree_config().expect("tree model");
            let tree = train_tree(&train.features, &train.labels, &tc, None)?;
            notes.insert("depth".into(), tree.depth().to_string());
            notes.insert("leaves".into(), tree.leaf_count().to_string());
            let run = |ds: &Dataset| -> Result<Vec<u8>> {
                ds.features
                    .iter()
                    .map(|x| Ok(predict_tree(&tree, x)?))
                    .collect()
            };
            Fitted {
                train_pred: run(train)?,
                test_pred: run(test)?,
                model_json: pretty(&tree)?,
                notes,
            }
        }
        ModelConfig::Rf {
            n_trees,
            mtry,
            bootstrap,
            ..
        } => {
            let tc = cfg.model.tree_config().expect("tree model");
            let fc = ForestConfig {
                n_trees: *n_trees,
                mtry: *mtry,
                bootstrap: *bootstrap,
                seed: cfg.seed,
            };
            let forest = train_forest(&train.features, &train.labels, &tc, &fc)?;
            notes.insert("mtry".into(), fc.resolved_mtry(train.dim()).to_string());
            let run = |ds: &Dataset| -> Result<Vec<u8>> {
                ds.features
                    .iter()
                    .map(|x| Ok(predict_forest(&forest, x)?))
                    .collect()
            };
            Fitted {
                train_pred: run(train)?,
                test_pred: run(test)?,
                model_json: pretty(&forest)?,
                notes,
            }
        }
        ModelConfig::Svm { .. } => {
            let sc = cfg.model.svm_config(train.dim()).expect("svm model");
            let kernel = sc.kernel.classical().expect("classical kernel");
            let model = fit_classical(&train.features, &train.labels, &sc)?;
            notes.insert("iterations".into(), model.iterations.to_string());
            notes.insert(
                "support_vectors".into(),
                model.support_indices.len().to_string(),
            );
            let train_k = kernel.cross(&train.features, &train.features)?;
            let test_k = kernel.cross(&test.features, &train.features)?;
            Fitted {
                train_pred: predict(&model, &train_k)?,
                test_pred: predict(&model, &test_k)?,
                model_json: format!("{}\n", model.to_json()?),
                notes,
            }
        }
        ModelConfig::Qsvm { feature_map, .. } => {
            let sc = cfg.model.svm_config(train.dim()).expect("svm model");
            let spec = feature_map.spec(train.dim());
            let started = Instant::now();
            let gram = gram_matrix(&spec, &train.features).context("computing quantum Gram")?;
            log::info!(
                "quantum Gram {}x{} in {:.2?}",
                gram.size(),
                gram.size(),
                started.elapsed()
            );
            let model = train_svm(&gram, &train.labels, &sc)?;
            if !model.converged {
                log::warn!("SMO stopped at the iteration cap before reaching tolerance");
            }
            notes.insert("iterations".into(), model.iterations.to_string());
            notes.insert(
                "support_vectors".into(),
                model.support_indices.len().to_string(),
            );
            notes.insert("qubits".into(), spec.num_qubits.to_string());
            let train_k =
                CrossKernel::from_entries(gram.size(), gram.size(), gram.entries().to_vec())?;
            let test_k = cross_kernel(&spec, &test.features, &train.features)?;
            Fitted {
                train_pred: predict(&model, &train_k)?,
                test_pred: predict(&model, &test_k)?,
                model_json: format!("{}\n", model.to_json()?),
                notes,
            }
        }
    };
    Ok(fitted)
}

pub fn benchmark(cfg: &ExperimentConfig, out: &Path) -> Result<BenchmarkResults> {
    let name = cfg.model.name();
    let loaded = pipeline::load(cfg)?;
    let prep = pipeline::prepare(cfg, &loaded, cfg.model.is_quantum())?;
    ensure!(!prep.test.is_empty(), "test split is empty");
    let fitted = fit(cfg, &prep).with_context(|| format!("training model {name}"))?;
    let confusion = confusion_matrix(&prep.test.labels, &fitted.test_pred)?;
    let report = ClassificationReport::from_confusion(&confusion);
    let results = BenchmarkResults {
        model: name.to_string(),
        seed: cfg.seed,
        config_hash: cfg.hash(),
        dataset_sha256: loaded.summary.dataset_sha256.clone(),
        n_train: prep.train.len(),
        n_test: prep.test.len(),
        features: prep.train.feature_names.clone(),
        train_accuracy: accuracy(&prep.train.labels, &fitted.train_pred),
        test_accuracy: report.accuracy,
        confusion,
        report: report.clone(),
        notes: fitted.notes,
    };
    let mut text = render_report(&report);
    writeln!(
        text,
        "\nmodel {name}  seed {}  config {}",
        cfg.seed,
        &results.config_hash[..16]
    )?;
    let mut stage = Stage::new(out)?;
    stage.write(&format!("report_{name}.txt"), &text)?;
    stage.write(&format!("confusion_{name}.csv"), results.confusion.to_csv())?;
    stage.write(&format!("results_{name}.json"), pretty(&results)?)?;
    stage.write(&format!("model_{name}.json"), &fitted.model_json)?;
    stage.commit()?;
    log::info!(
        "{name}: train accuracy {:.4}, test accuracy {:.4}",
        results.train_accuracy,
        results.test_accuracy
    );
    Ok(results)
}

/// Exports the quantum Gram of the prepared training rows.
pub fn kernel_export(cfg: &ExperimentConfig, path: &Path) -> Result<KernelMetadata> {
    let loaded = pipeline::load(cfg)?;
    let prep = pipeline::prepare(cfg, &loaded, true)?;
    let fm = match &cfg.model {
        ModelConfig::Qsvm { feature_map, .. } => feature_map.clone(),
        _ => FeatureMapConfig::default(),
    };
    let spec = fm.spec(prep.train.dim());
    let gram = gram_matrix(&spec, &prep.train.features)?;
    let meta = KernelMetadata {
        format_version: QKGM_VERSION,
        n: gram.size(),
        feature_map: spec,
        input_sha256: matrix_hash(&prep.train.features),
        kernel_sha256: gram.content_hash(),
        config_hash: Some(cfg.hash()),
        seed: Some(cfg.seed),
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .context("kernel export path has no file name")?
        .to_string_lossy()
        .into_owned();
    let mut stage = Stage::new(&dir)?;
    let staged = stage.path(&name);
    let side = metadata_path(Path::new(&name));
    stage.path(&side.to_string_lossy());
    write_qkgm(&staged, &gram, &meta)?;
    stage.commit()?;
    log::info!("wrote {}x{} kernel to {}", meta.n, meta.n, path.display());
    Ok(meta)
}

pub fn kernel_verify(path: &Path) -> Result<KernelMetadata> {
    let (gram, meta) =
        verify_qkgm(path).with_context(|| format!("verifying {}", path.display()))?;
    ensure!(
        gram.size() == meta.n,
        "metadata says n = {} but payload has n = {}",
        meta.n,
        gram.size()
    );
    Ok(meta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridManifest {
    pub seed: u64,
    pub config_hash: String,
    pub dataset_sha256: String,
    pub quanv: qkml_core::QuanvSpec,
    pub quanv_circuit_sha256: String,
    pub classical_sizes: Vec<usize>,
    pub hybrid_sizes: Vec<usize>,
    pub train: qkml_core::TrainConfig,
    pub n_train: usize,
    pub n_val: usize,
    pub classical_final: EpochStats,
    pub hybrid_final: EpochStats,
    pub curves_file: String,
}

pub fn hybrid(cfg: &ExperimentConfig, out: &Path) -> Result<HybridManifest> {
    let started = Instant::now();
    let loaded = pipeline::load(cfg)?;
    let prep = pipeline::prepare(cfg, &loaded, true)?;
    let h = &cfg.hybrid;
    if h.quanv.window > prep.train.dim() {
        bail!(
            "hybrid.quanv.window = {} exceeds the {} prepared features; lower the window or select_k",
            h.quanv.window,
            prep.train.dim()
        );
    }
    let net = h.net_config(cfg.seed);
    let train_cfg = h.train_config(cfg.seed);
    let cmp = compare_hybrid(&prep.train, &prep.test, &h.quanv, &net, &train_cfg)
        .context("running hybrid comparison")?;
    let last = |hist: &qkml_core::TrainHistory| *hist.last().expect("epochs >= 1");
    let manifest = HybridManifest {
        seed: cfg.seed,
        config_hash: cfg.hash(),
        dataset_sha256: loaded.summary.dataset_sha256.clone(),
        quanv: h.quanv,
        quanv_circuit_sha256: cmp.quanv_circuit_hash.clone(),
        classical_sizes: DenseNet::from_config(prep.train.dim(), &net)?.sizes(),
        hybrid_sizes: DenseNet::from_config(cmp.hybrid_input_width, &net)?.sizes(),
        train: train_cfg,
        n_train: prep.train.len(),
        n_val: prep.test.len(),
        classical_final: last(&cmp.classical),
        hybrid_final: last(&cmp.hybrid),
        curves_file: CURVES_FILE.to_string(),
    };
    let mut stage = Stage::new(out)?;
    stage.write(CURVES_FILE, curve_csv(&cmp))?;
    stage.write(HYBRID_MANIFEST_FILE, pretty(&manifest)?)?;
    stage.commit()?;
    log::info!(
        "hybrid run finished in {:.2?}: classical train/val {:.3}/{:.3}, hybrid {:.3}/{:.3}",
        started.elapsed(),
        manifest.classical_final.train_accuracy,
        manifest.classical_final.val_accuracy,
        manifest.hybrid_final.train_accuracy,
        manifest.hybrid_final.val_accuracy
    );
    Ok(manifest)
}

/// Collects every `results_*.json` in `out` into one table.
pub fn report(out: &Path) -> Result<String> {
    let mut results: Vec<BenchmarkResults> = Vec::new();
    let entries =
        fs::read_dir(out).with_context(|| format!("reading output directory {}", out.display()))?;
    for entry in entries {
        let path = entry?.path();
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned());
        if let Some(name) = name {
            if name.starts_with("results_") && name.ends_with(".json") {
                let text = fs::read_to_string(&path)?;
                results.push(
                    serde_json::from_str(&text)
                        .with_context(|| format!("parsing {}", path.display()))?,
                );
            }
        }
    }
    let hybrid: Option<HybridManifest> = match fs::read_to_string(out.join(HYBRID_MANIFEST_FILE)) {
        Ok(text) => Some(serde_json::from_str(&text).context("parsing hybrid manifest")?),
        Err(_) => None,
    };
    ensure!(
        !results.is_empty() || hybrid.is_some(),
        "no benchmark results or hybrid manifest in {}; run `benchmark` or `hybrid` first",
        out.display()
    );
    results.sort_by(|a, b| a.model.cmp(&b.model));

    let mut text = String::new();
    if !results.is_empty() {
        writeln!(
            text,
            "{:<6} {:>9} {:>9} {:>9} {:>9} {:>7}  {:<8} config",
            "model", "train", "test", "macro-f1", "wtd-f1", "n_test", "seed"
        )?;
        for r in &results {
            writeln!(
                text,
                "{:<6} {:>9} {:>9} {:>9} {:>9} {:>7}  {:<8} {}",
                r.model,
                fmt2(r.train_accuracy),
                fmt2(r.test_accuracy),
                fmt2(r.report.macro_avg.f1),
                fmt2(r.report.weighted_avg.f1),
                r.n_test,
                r.seed,
                &r.config_hash[..16]
            )?;
        }
    }
    if let Some(m) = &hybrid {
        if !text.is_empty() {
            text.push('\n');
        }
        writeln!(text, "hybrid ({} epochs, seed {})", m.train.epochs, m.seed)?;
        for (arm, e) in [("classical", m.classical_final), ("hybrid", m.hybrid_final)] {
            writeln!(
                text,
                "  {:<9} train {} val {}  loss {:.4}",
                arm,
                fmt2(e.train_accuracy),
                fmt2(e.val_accuracy),
                e.train_loss
            )?;
        }
    }
    let mut stage = Stage::new(out)?;
    stage.write(REPORT_SUMMARY_FILE, &text)?;
    stage.commit()?;
    Ok(text)
}
