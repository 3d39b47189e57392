//! Experiment configuration files.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qkml_core::dataset::{FeatureConfig, ScalerMode, SyntheticKind};
use qkml_core::feature_map::{Entanglement, FeatureMapKind, FeatureMapSpec};
use qkml_core::hybrid::{NetConfig, QuanvSpec, TrainConfig};
use qkml_core::svm::{SvmConfig, SvmKernel};
use qkml_core::{ForestConfig, TreeConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Training rows kept for the quantum SVM when reading the full CSV.
pub const DEFAULT_QSVM_SUBSAMPLE: usize = 500;
pub const DEFAULT_QSVM_TOP_K: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Drives the split, subsampling, forest bagging and net training.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub hybrid: HybridConfig,
    /// Not part of the config hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// Angles in [0, π] for quantum models, standardization otherwise.
    Auto,
    MinMaxToPi,
    Standardize,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_config: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic_noise: Option<f64>,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default)]
    pub stratify: bool,
    #[serde(default = "default_scaling")]
    pub scaling: Scaling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub select_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsample: Option<usize>,
}

fn default_test_fraction() -> f64 {
    0.2
}

fn default_scaling() -> Scaling {
    Scaling::Auto
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            csv: None,
            feature_config: None,
            synthetic: None,
            synthetic_size: None,
            synthetic_noise: None,
            test_fraction: default_test_fraction(),
            stratify: false,
            scaling: Scaling::Auto,
            select_k: None,
            subsample: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvmKernelKind {
    Linear,
    Rbf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureMapConfig {
    #[serde(default = "default_map_kind")]
    pub kind: FeatureMapKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repetitions: Option<usize>,
    #[serde(default = "default_entanglement")]
    pub entanglement: Entanglement,
}

fn default_map_kind() -> FeatureMapKind {
    FeatureMapKind::ZzEntangling
}

fn default_entanglement() -> Entanglement {
    Entanglement::Linear
}

impl Default for FeatureMapConfig {
    fn default() -> Self {
        FeatureMapConfig {
            kind: default_map_kind(),
            repetitions: None,
            entanglement: default_entanglement(),
        }
    }
}

impl FeatureMapConfig {
    pub fn spec(&self, num_qubits: usize) -> FeatureMapSpec {
        let base = match self.kind {
            FeatureMapKind::AngleY => FeatureMapSpec::angle_y(num_qubits),
            FeatureMapKind::ZzEntangling => FeatureMapSpec::zz(num_qubits),
        };
        let base = base.with_entanglement(self.entanglement);
        match self.repetitions {
            Some(r) => base.with_repetitions(r),
            None => base,
        }
    }
}

fn default_c() -> f64 {
    1.0
}
fn default_tolerance() -> f64 {
    1e-3
}
fn default_max_passes() -> usize {
    50
}
fn default_max_depth() -> usize {
    TreeConfig::default().max_depth
}
fn default_min_split() -> usize {
    TreeConfig::default().min_samples_split
}
fn default_min_leaf() -> usize {
    TreeConfig::default().min_samples_leaf
}
fn default_n_trees() -> usize {
    ForestConfig::default().n_trees
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Dt {
        #[serde(default = "default_max_depth")]
        max_depth: usize,
        #[serde(default = "default_min_split")]
        min_samples_split: usize,
        #[serde(default = "default_min_leaf")]
        min_samples_leaf: usize,
    },
    Rf {
        #[serde(default = "default_n_trees")]
        n_trees: usize,
        #[serde(default)]
        mtry: Option<usize>,
        #[serde(default = "yes")]
        bootstrap: bool,
        #[serde(default = "default_max_depth")]
        max_depth: usize,
        #[serde(default = "default_min_split")]
        min_samples_split: usize,
        #[serde(default = "default_min_leaf")]
        min_samples_leaf: usize,
    },
    Svm {
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
        #[serde(default = "default_max_passes")]
        max_passes: usize,
        kernel: SvmKernelKind,
        /// RBF width; defaults to 1 / (number of features).
        #[serde(default)]
        gamma: Option<f64>,
    },
    Qsvm {
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
        #[serde(default = "default_max_passes")]
        max_passes: usize,
        #[serde(default)]
        feature_map: FeatureMapConfig,
    },
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::Qsvm {
            c: default_c(),
            tolerance: default_tolerance(),
            max_passes: default_max_passes(),
            feature_map: FeatureMapConfig::default(),
        }
    }
}

impl ModelConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::Dt { .. } => "dt",
            ModelConfig::Rf { .. } => "rf",
            ModelConfig::Svm { .. } => "svm",
            ModelConfig::Qsvm { .. } => "qsvm",
        }
    }

    pub fn is_quantum(&self) -> bool {
        matches!(self, ModelConfig::Qsvm { .. })
    }

    pub fn tree_config(&self) -> Option<TreeConfig> {
        match *self {
            ModelConfig::Dt {
                max_depth,
                min_samples_split,
                min_samples_leaf,
            }
            | ModelConfig::Rf {
                max_depth,
                min_samples_split,
                min_samples_leaf,
                ..
            } => Some(TreeConfig {
                max_depth,
                min_samples_split,
                min_samples_leaf,
                ..TreeConfig::default()
            }),
            _ => None,
        }
    }

    pub fn svm_config(&self, num_features: usize) -> Option<SvmConfig> {
        match *self {
            ModelConfig::Svm {
                c,
                tolerance,
                max_passes,
                kernel,
                gamma,
            } => Some(SvmConfig {
                c,
                tolerance,
                max_passes,
                kernel: match kernel {
                    SvmKernelKind::Linear => SvmKernel::Linear,
                    SvmKernelKind::Rbf => SvmKernel::Rbf {
                        gamma: gamma.unwrap_or(1.0 / num_features.max(1) as f64),
                    },
                },
                class_weight: None,
            }),
            ModelConfig::Qsvm {
                c,
                tolerance,
                max_passes,
                ..
            } => Some(SvmConfig {
                c,
                tolerance,
                max_passes,
                kernel: SvmKernel::Precomputed,
                class_weight: None,
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridConfig {
    #[serde(default)]
    pub quanv: QuanvSpec,
    #[serde(default = "default_hidden")]
    pub hidden: Vec<usize>,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
}

fn default_hidden() -> Vec<usize> {
    NetConfig::default().hidden
}
fn default_epochs() -> usize {
    TrainConfig::default().epochs
}
fn default_lr() -> f64 {
    TrainConfig::default().learning_rate
}
fn default_batch() -> usize {
    TrainConfig::default().batch_size
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig {
            quanv: QuanvSpec::default(),
            hidden: default_hidden(),
            epochs: default_epochs(),
            learning_rate: default_lr(),
            batch_size: default_batch(),
        }
    }
}

impl HybridConfig {
    pub fn net_config(&self, seed: u64) -> NetConfig {
        NetConfig {
            hidden: self.hidden.clone(),
            init_seed: seed,
        }
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            seed,
        }
    }
}

/// Where the rows come from after resolving config and flags.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Csv {
        path: PathBuf,
        features: FeatureConfig,
    },
    Synthetic {
        kind: SyntheticKind,
        size: usize,
        noise: f64,
    },
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("parsing experiment config")
    }

    /// Reads a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = Self::from_toml(&text).with_context(|| format!("in {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut Option<PathBuf>| {
            if let Some(p) = p {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        };
        rebase(&mut cfg.dataset.csv);
        rebase(&mut cfg.dataset.feature_config);
        rebase(&mut cfg.output_dir);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.dataset;
        if d.csv.is_some() && d.synthetic.is_some() {
            bail!("dataset: set either `csv` or `synthetic`, not both");
        }
        if d.csv.is_none() && d.synthetic.is_none() {
            bail!("dataset: no source; set `csv`, `synthetic`, or pass --synthetic");
        }
        for p in [&d.csv, &d.feature_config].into_iter().flatten() {
            if !p.exists() {
                bail!("dataset: path {} does not exist", p.display());
            }
        }
        if !(d.test_fraction > 0.0 && d.test_fraction < 1.0) {
            bail!(
                "dataset.test_fraction must be in (0, 1), got {}",
                d.test_fraction
            );
        }
        if d.select_k == Some(0) {
            bail!("dataset.select_k must be >= 1");
        }
        if d.subsample.is_some_and(|s| s < 4) {
            bail!("dataset.subsample must be >= 4");
        }
        if let Some(svm) = self.model.svm_config(1) {
            svm.validate().context("model")?;
        }
        if let Some(tree) = self.model.tree_config() {
            tree.validate().context("model")?;
        }
        if let ModelConfig::Rf { n_trees: 0, .. } = self.model {
            bail!("model.n_trees must be >= 1");
        }
        self.hybrid.quanv.validate().context("hybrid.quanv")?;
        self.hybrid.train_config(0).validate().context("hybrid")?;
        Ok(())
    }

    pub fn source(&self) -> Result<Source> {
        let d = &self.dataset;
        if let Some(kind) = d.synthetic {
            return Ok(Source::Synthetic {
                kind,
                size: d.synthetic_size.unwrap_or(kind.default_size()),
                noise: d.synthetic_noise.unwrap_or(kind.default_noise()),
            });
        }
        let path = d.csv.clone().context("dataset: no source")?;
        let features = match &d.feature_config {
            Some(p) => FeatureConfig::load(p)
                .with_context(|| format!("loading feature config {}", p.display()))?,
            None => FeatureConfig::crunchbase_default(),
        };
        Ok(Source::Csv { path, features })
    }

    pub fn scaler_mode(&self, quantum: bool) -> Option<ScalerMode> {
        match self.dataset.scaling {
            Scaling::Auto if quantum => Some(ScalerMode::MinMaxToPi),
            Scaling::Auto => Some(ScalerMode::Standardize),
            Scaling::MinMaxToPi => Some(ScalerMode::MinMaxToPi),
            Scaling::Standardize => Some(ScalerMode::Standardize),
            Scaling::None => None,
        }
    }

    /// SHA-256 of the config as JSON, with the output directory left out.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        let json = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }
}
