//! Quantum-kernel and classical binary classifiers.
//!
//! Everything runs on an exact dense statevector simulator, so results are
//! deterministic given a seed. The modules build on each other in order:
//! [`statevector`] → [`feature_map`] → [`kernel`] → [`svm`], with
//! [`baselines`], [`metrics`], [`dataset`] and [`hybrid`] alongside.

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod feature_map;
pub mod hybrid;
pub mod kernel;
pub mod metrics;
pub mod statevector;
pub mod svm;

pub use baselines::{ForestConfig, ForestModel, TreeConfig, TreeNode};
pub use dataset::{Dataset, SyntheticKind};
pub use error::{Error, Result};
pub use feature_map::{Entanglement, FeatureMapKind, FeatureMapSpec};
pub use hybrid::{NetConfig, QuanvSpec, TrainConfig, TrainHistory};
pub use kernel::{ClassicalKernel, CrossKernel, GramMatrix, KernelMetadata};
pub use metrics::{ClassificationReport, ConfusionMatrix};
pub use statevector::{Circuit, Gate, GateKind, StateVector};
pub use svm::{SvmConfig, SvmKernel, SvmModel};
