//! Splitting, scaling and feature selection. Scalers are fit on the training
//! split only and then applied to both splits.

use std::f64::consts::PI;

use rand::seq::{index::sample, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// Test size is ⌊n·f⌋ with a minimum of 1; order is a seeded shuffle.
pub fn train_test_split(
    ds: &Dataset,
    test_fraction: f64,
    seed: u64,
    stratify: bool,
) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "test_fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    let n = ds.len();
    if n < 2 {
        return Err(Error::InvalidConfig(format!("cannot split {n} rows")));
    }
    let [c0, c1] = ds.class_counts();
    if c0 == 0 || c1 == 0 {
        return Err(Error::SingleClass);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (train, test) = if stratify {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for class in [0u8, 1] {
            let mut idx: Vec<usize> = (0..n).filter(|&i| ds.labels[i] == class).collect();
            idx.shuffle(&mut rng);
            let k = ((idx.len() as f64 * test_fraction).floor() as usize).max(1);
            if k >= idx.len() {
                return Err(Error::InvalidConfig(format!(
                    "class {class} has {} rows, too few to stratify",
                    idx.len()
                )));
            }
            test.extend_from_slice(&idx[..k]);
            train.extend_from_slice(&idx[k..]);
        }
        (train, test)
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let k = ((n as f64 * test_fraction).floor() as usize).max(1);
        if k >= n {
            return Err(Error::InvalidConfig(format!(
                "test size {k} leaves no training rows"
            )));
        }
        let train = idx[k..].to_vec();
        idx.truncate(k);
        (train, idx)
    };
    Ok((ds.subset(&train), ds.subset(&test)))
}

/// Seeded subsample without replacement, keeping original row order.
pub fn subsample(ds: &Dataset, size: usize, seed: u64) -> Dataset {
    if size >= ds.len() {
        return ds.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, ds.len(), size).into_vec();
    idx.sort_unstable();
    ds.subset(&idx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalerMode {
    /// Train min ↦ 0, train max ↦ π; other values clamped into [0, π].
    MinMaxToPi,
    /// Zero mean, unit population variance.
    Standardize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub mode: ScalerMode,
    /// Source feature indices that survive (constant features are dropped).
    pub kept: Vec<usize>,
    /// (min, max) or (mean, stddev) per kept feature.
    pub params: Vec<(f64, f64)>,
    pub dropped: Vec<String>,
}

pub fn fit_scaler(train: &Dataset, mode: ScalerMode) -> Result<ScalerParams> {
    if train.is_empty() {
        return Err(Error::Empty("scaler fit data"));
    }
    let n = train.len() as f64;
    let mut kept = Vec::new();
    let mut params = Vec::new();
    let mut dropped = Vec::new();
    for j in 0..train.dim() {
        let col = train.features.iter().map(|r| r[j]);
        let p = match mode {
            ScalerMode::MinMaxToPi => {
                let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
                (hi > lo).then_some((lo, hi))
            }
            ScalerMode::Standardize => {
                let mean = col.clone().sum::<f64>() / n;
                let var = col.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                let sd = var.sqrt();
                (sd > 0.0).then_some((mean, sd))
            }
        };
        match p {
            Some(p) => {
                kept.push(j);
                params.push(p);
            }
            None => dropped.push(train.feature_names[j].clone()),
        }
    }
    if !dropped.is_empty() {
        log::warn!("dropping constant features: {}", dropped.join(", "));
    }
    Ok(ScalerParams {
        mode,
        kept,
        params,
        dropped,
    })
}

pub fn apply_scaler(params: &ScalerParams, ds: &Dataset) -> Dataset {
    let features = ds
        .features
        .iter()
        .map(|row| {
            params
                .kept
                .iter()
                .zip(&params.params)
                .map(|(&j, &(a, b))| match params.mode {
                    ScalerMode::MinMaxToPi => ((row[j] - a) / (b - a) * PI).clamp(0.0, PI),
                    ScalerMode::Standardize => (row[j] - a) / b,
                })
                .collect()
        })
        .collect();
    Dataset {
        features,
        labels: ds.labels.clone(),
        feature_names: params
            .kept
            .iter()
            .map(|&j| ds.feature_names[j].clone())
            .collect(),
    }
}

/// Indices (ascending) of the `k` features with the largest class-mean
/// separation |μ₁ − μ₀| / σ. Ties prefer lower indices.
pub fn select_top_k(train: &Dataset, k: usize) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    let d = train.dim();
    if k >= d {
        return Ok((0..d).collect());
    }
    let [n0, n1] = train.class_counts();
    if n0 == 0 || n1 == 0 {
        return Err(Error::SingleClass);
    }
    let n = train.len() as f64;
    let mut scores: Vec<(usize, f64)> = (0..d)
        .map(|j| {
            let (mut s0, mut s1, mut s) = (0.0, 0.0, 0.0);
            for (row, &l) in train.features.iter().zip(&train.labels) {
                if l == 1 {
                    s1 += row[j];
                } else {
                    s0 += row[j];
                }
                s += row[j];
            }
            let mean = s / n;
            let var = train
                .features
                .iter()
                .map(|r| (r[j] - mean) * (r[j] - mean))
                .sum::<f64>()
                / n;
            let gap = (s1 / n1 as f64 - s0 / n0 as f64).abs();
            let score = if var > 0.0 { gap / var.sqrt() } else { 0.0 };
            (j, score)
        })
        .collect();
    scores.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut chosen: Vec<usize> = scores[..k].iter().map(|&(j, _)| j).collect();
    chosen.sort_unstable();
    Ok(chosen)
}
