//! Bagged random forest over CART trees.
//!
//! Tree `k` draws its bootstrap sample and per-split feature subsets from a
//! generator seeded with `seed + k`, so parallel and serial builds agree.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{check_xy, grow, predict_tree, FeatureSampler, TreeConfig, TreeNode};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Features considered per split. `None` means ⌈√d⌉.
    #[serde(default)]
    pub mtry: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 101,
            mtry: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn resolved_mtry(&self, d: usize) -> usize {
        self.mtry
            .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
            .max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<TreeNode>,
    pub config: ForestConfig,
    pub tree_config: TreeConfig,
}

pub fn train_forest(
    x: &[Vec<f64>],
    y: &[u8],
    tree_config: &TreeConfig,
    config: &ForestConfig,
) -> Result<ForestModel> {
    tree_config.validate()?;
    let d = check_xy(x, y)?;
    if config.n_trees == 0 {
        return Err(Error::InvalidConfig("n_trees must be >= 1".into()));
    }
    let mtry = config.resolved_mtry(d);
    if mtry > d {
        return Err(Error::InvalidConfig(format!(
            "mtry {mtry} exceeds feature count {d}"
        )));
    }
    let n = x.len();
    let trees = (0..config.n_trees)
        .into_par_iter()
        .map(|k| {
            let tree_seed = config.seed.wrapping_add(k as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
            let idx: Vec<usize> = if config.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let split_seed: u64 = rng.random();
            let mut sampler = Some(FeatureSampler::new(split_seed, mtry));
            grow(x, y, &idx, tree_config, 0, &mut sampler)
        })
        .collect();
    Ok(ForestModel {
        trees,
        config: *config,
        tree_config: *tree_config,
    })
}

/// Majority vote; an exact tie goes to class 0.
pub fn predict_forest(forest: &ForestModel, x: &[f64]) -> Result<u8> {
    let votes: Vec<u8> = forest
        .trees
        .iter()
        .map(|t| predict_tree(t, x))
        .collect::<Result<_>>()?;
    Ok(majority(&votes))
}

pub fn majority(votes: &[u8]) -> u8 {
    let ones = votes.iter().filter(|&&v| v == 1).count();
    u8::from(ones * 2 > votes.len())
}
