//! Hybrid experiment: the same dense classifier trained on raw features and
//! on the output of a frozen quanvolutional layer.

mod net;
mod quanv;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

pub use net::{
    train_dense, DenseNet, EpochStats, Gradients, Layer, NetConfig, TrainConfig, TrainHistory,
};
pub use quanv::{build_quanv_circuit, quanv_transform, QuanvLayer, QuanvSpec};

pub const CURVE_HEADER: &str = "epoch,arm,train_loss,train_acc,val_loss,val_acc";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridComparison {
    pub classical: TrainHistory,
    pub hybrid: TrainHistory,
    pub quanv_circuit_hash: String,
    pub hybrid_input_width: usize,
}

/// Trains both arms with identical net and train configs. Only the input
/// width differs.
pub fn compare_hybrid(
    train: &Dataset,
    val: &Dataset,
    spec: &QuanvSpec,
    net_config: &NetConfig,
    train_config: &TrainConfig,
) -> Result<HybridComparison> {
    if train.dim() != val.dim() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            got: val.dim(),
        });
    }
    let layer = QuanvLayer::new(*spec)?;
    let width = spec.output_width(train.dim())?;
    let circuit_before = layer.circuit_hash();

    let net = DenseNet::from_config(train.dim(), net_config)?;
    let (_, classical) = train_dense(
        net,
        &train.features,
        &train.labels,
        Some((&val.features, &val.labels)),
        train_config,
    )?;

    let qx = layer.transform_rows(&train.features)?;
    let qv = layer.transform_rows(&val.features)?;
    let net = DenseNet::from_config(width, net_config)?;
    let (_, hybrid) = train_dense(
        net,
        &qx,
        &train.labels,
        Some((&qv, &val.labels)),
        train_config,
    )?;

    let quanv_circuit_hash = layer.circuit_hash();
    assert_eq!(
        circuit_before, quanv_circuit_hash,
        "quanv layer must stay frozen"
    );
    Ok(HybridComparison {
        classical,
        hybrid,
        quanv_circuit_hash,
        hybrid_input_width: width,
    })
}

/// One row per (epoch, arm); floats use shortest round-trip formatting.
pub fn curve_csv(cmp: &HybridComparison) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for (arm, hist) in [("classical", &cmp.classical), ("hybrid", &cmp.hybrid)] {
        for (k, e) in hist.epochs.iter().enumerate() {
            writeln!(
                out,
                "{},{arm},{},{},{},{}",
                k + 1,
                e.train_loss,
                e.train_accuracy,
                e.val_loss,
                e.val_accuracy
            )
            .expect("writing to a String cannot fail");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate, SyntheticKind};

    fn tiny() -> (Dataset, Dataset) {
        let ds = generate(SyntheticKind::Blobs, 40, 0.3, 2).unwrap();
        (
            ds.subset(&(0..30).collect::<Vec<_>>()),
            ds.subset(&(30..40).collect::<Vec<_>>()),
        )
    }

    #[test]
    fn cosine_layer_harness() {
        let (train, val) = tiny();
        let spec = QuanvSpec {
            window: 1,
            stride: 1,
            circuit_seed: 0,
            layers: 0,
        };
        let cfg = TrainConfig {
            epochs: 3,
            ..TrainConfig::default()
        };
        let cmp = compare_hybrid(&train, &val, &spec, &NetConfig::default(), &cfg).unwrap();
        assert_eq!(cmp.classical.len(), 3);
        assert_eq!(cmp.hybrid.len(), 3);
        let csv = curve_csv(&cmp);
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.starts_with(CURVE_HEADER));
    }

    #[test]
    fn repeatable() {
        let (train, val) = tiny();
        let spec = QuanvSpec {
            window: 2,
            stride: 1,
            circuit_seed: 5,
            layers: 2,
        };
        let cfg = TrainConfig {
            epochs: 4,
            ..TrainConfig::default()
        };
        let a = compare_hybrid(&train, &val, &spec, &NetConfig::default(), &cfg).unwrap();
        let b = compare_hybrid(&train, &val, &spec, &NetConfig::default(), &cfg).unwrap();
        assert_eq!(curve_csv(&a), curve_csv(&b));
    }
}
