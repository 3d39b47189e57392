//! CART classification tree with Gini impurity.
//!
//! Candidate thresholds are midpoints between consecutive distinct sorted
//! values. Gain ties are broken by lowest feature index, then lowest
//! threshold. A node splits only if the split strictly lowers weighted Gini.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum impurity decrease that counts as "strictly lower".
const MIN_GAIN: f64 = 1e-12;
/// Impurities closer than this are treated as tied.
pub const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    #[default]
    Gini,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    #[serde(default)]
    pub criterion: Criterion,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: 8,
            min_samples_split: 2,
            min_samples_leaf: 1,
            criterion: Criterion::Gini,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth == 0 {
            return Err(Error::InvalidConfig("max_depth must be >= 1".into()));
        }
        if self.min_samples_split < 2 {
            return Err(Error::InvalidConfig(
                "min_samples_split must be >= 2".into(),
            ));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::InvalidConfig("min_samples_leaf must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        class_counts: [usize; 2],
        predicted_class: u8,
    },
    Split {
        feature_index: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn leaf(class_counts: [usize; 2]) -> Self {
        // exact tie goes to class 0
        let predicted_class = u8::from(class_counts[1] > class_counts[0]);
        TreeNode::Leaf {
            class_counts,
            predicted_class,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }
}

/// 1 − Σ p_k² over two classes.
pub fn gini_impurity(class_counts: [usize; 2]) -> Result<f64> {
    let total = class_counts[0] + class_counts[1];
    if total == 0 {
        return Err(Error::Empty("node with no samples"));
    }
    let t = total as f64;
    let p0 = class_counts[0] as f64 / t;
    let p1 = class_counts[1] as f64 / t;
    Ok(1.0 - p0 * p0 - p1 * p1)
}

fn gini_unchecked(c: [usize; 2]) -> f64 {
    gini_impurity(c).unwrap_or(0.0)
}

/// Best split found for a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature_index: usize,
    pub threshold: f64,
    /// Size-weighted Gini of the two children.
    pub weighted_impurity: f64,
}

fn counts(labels: &[u8], idx: &[usize]) -> [usize; 2] {
    let mut c = [0usize; 2];
    for &i in idx {
        c[labels[i] as usize] += 1;
    }
    c
}

/// Scans the given features (in ascending order) for the lowest weighted
/// impurity split that respects `min_samples_leaf`.
pub(crate) fn best_split(
    x: &[Vec<f64>],
    y: &[u8],
    idx: &[usize],
    features: &[usize],
    min_samples_leaf: usize,
) -> Option<Split> {
    let total = counts(y, idx);
    let n = idx.len();
    let mut best: Option<Split> = None;
    let mut order: Vec<usize> = idx.to_vec();
    for &f in features {
        order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
        let mut left = [0usize; 2];
        for k in 0..n - 1 {
            left[y[order[k]] as usize] += 1;
            let lo = x[order[k]][f];
            let hi = x[order[k + 1]][f];
            if lo == hi {
                continue;
            }
            let n_left = k + 1;
            let n_right = n - n_left;
            if n_left < min_samples_leaf || n_right < min_samples_leaf {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let w = (n_left as f64 * gini_unchecked(left) + n_right as f64 * gini_unchecked(right))
                / n as f64;
            let threshold = lo + (hi - lo) / 2.0;
            // ties within TIE_EPS keep the earliest (feature, threshold)
            if best.is_none_or(|b| w < b.weighted_impurity - TIE_EPS) {
                best = Some(Split {
                    feature_index: f,
                    threshold,
                    weighted_impurity: w,
                });
            }
        }
    }
    best
}

/// Per-split feature subsampling for forests.
#[derive(Debug)]
pub(crate) struct FeatureSampler {
    rng: ChaCha8Rng,
    mtry: usize,
}

impl FeatureSampler {
    pub(crate) fn new(seed: u64, mtry: usize) -> Self {
        FeatureSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            mtry,
        }
    }

    fn pick(&mut self, d: usize) -> Vec<usize> {
        if self.mtry >= d {
            return (0..d).collect();
        }
        let mut f = sample(&mut self.rng, d, self.mtry).into_vec();
        f.sort_unstable();
        f
    }
}

pub(crate) fn check_xy(x: &[Vec<f64>], y: &[u8]) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::Empty("training rows"));
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let d = x[0].len();
    for (i, row) in x.iter().enumerate() {
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
    if let Some(&bad) = y.iter().find(|&&l| l > 1) {
        return Err(Error::NonBinaryLabel(bad));
    }
    Ok(d)
}

pub(crate) fn grow(
    x: &[Vec<f64>],
    y: &[u8],
    idx: &[usize],
    config: &TreeConfig,
    depth: usize,
    sampler: &mut Option<FeatureSampler>,
) -> TreeNode {
    let c = counts(y, idx);
    let n = idx.len();
    if c[0] == 0 || c[1] == 0 || depth >= config.max_depth || n < config.min_samples_split {
        return TreeNode::leaf(c);
    }
    let d = x[idx[0]].len();
    let features = match sampler {
        Some(s) => s.pick(d),
        None => (0..d).collect(),
    };
    let parent = gini_unchecked(c);
    let split = match best_split(x, y, idx, &features, config.min_samples_leaf) {
        Some(s) if parent - s.weighted_impurity > MIN_GAIN => s,
        _ => return TreeNode::leaf(c),
    };
    let (left, right): (Vec<usize>, Vec<usize>) = idx
        .iter()
        .partition(|&&i| x[i][split.feature_index] <= split.threshold);
    let left = grow(x, y, &left, config, depth + 1, sampler);
    let right = grow(x, y, &right, config, depth + 1, sampler);
    TreeNode::Split {
        feature_index: split.feature_index,
        threshold: split.threshold,
        left: Box::new(left),
        right: Box::new(right),
    }
}

/// Grows a tree greedily. With `feature_subset` set, each split considers
/// only `mtry` features drawn with the given seed.
pub fn train_tree(
    x: &[Vec<f64>],
    y: &[u8],
    config: &TreeConfig,
    feature_subset: Option<(u64, usize)>,
) -> Result<TreeNode> {
    config.validate()?;
    check_xy(x, y)?;
    let idx: Vec<usize> = (0..x.len()).collect();
    let mut sampler = feature_subset.map(|(seed, mtry)| FeatureSampler::new(seed, mtry.max(1)));
    Ok(grow(x, y, &idx, config, 0, &mut sampler))
}

pub fn predict_tree(tree: &TreeNode, x: &[f64]) -> Result<u8> {
    let mut node = tree;
    loop {
        match node {
            TreeNode::Leaf {
                predicted_class, ..
            } => return Ok(*predicted_class),
            TreeNode::Split {
                feature_index,
                threshold,
                left,
                right,
            } => {
                let v = *x.get(*feature_index).ok_or(Error::MissingFeature {
                    index: *feature_index,
                    len: x.len(),
                })?;
                node = if v <= *threshold { left } else { right };
            }
        }
    }
}
