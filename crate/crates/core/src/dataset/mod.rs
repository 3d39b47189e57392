//! Tabular data pipeline: CSV ingestion, status filtering, feature
//! engineering, splitting, scaling and feature selection.

pub mod csv_table;
pub mod features;
pub mod prep;
pub mod synthetic;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use csv_table::{filter_status, load_csv, parse_csv, status_label, RawTable, StatusSummary};
pub use features::{engineer_features, EngineerSummary, FeatureConfig, FeatureRule};
pub use prep::{
    apply_scaler, fit_scaler, select_top_k, subsample, train_test_split, ScalerMode, ScalerParams,
};
pub use synthetic::{generate, SyntheticKind};

/// Numeric features with binary labels (1 = exited, 0 = closed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        features: Vec<Vec<f64>>,
        labels: Vec<u8>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let ds = Dataset {
            features,
            labels,
            feature_names,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.features.len(),
                got: self.labels.len(),
            });
        }
        let d = self.feature_names.len();
        for (i, row) in self.features.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(i));
            }
        }
        if let Some(&bad) = self.labels.iter().find(|&&l| l > 1) {
            return Err(Error::NonBinaryLabel(bad));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    /// Count of (class 0, class 1).
    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.len() - ones, ones]
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            features: idx.iter().map(|&i| self.features[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    pub fn select_features(&self, cols: &[usize]) -> Dataset {
        Dataset {
            features: self
                .features
                .iter()
                .map(|r| cols.iter().map(|&c| r[c]).collect())
                .collect(),
            labels: self.labels.clone(),
            feature_names: cols
                .iter()
                .map(|&c| self.feature_names[c].clone())
                .collect(),
        }
    }

    /// SHA-256 over names, labels and feature bits.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for name in &self.feature_names {
            h.update(name.as_bytes());
            h.update([0u8]);
        }
        h.update(&self.labels);
        for row in &self.features {
            for v in row {
                h.update(v.to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}
