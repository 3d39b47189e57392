//! Soft-margin kernel SVM trained by sequential minimal optimization.
//!
//! The dual is solved in its minimization form
//! `min ½ αᵀQα − eᵀα` with `Q_ij = y_i y_j K_ij`, `0 ≤ α_i ≤ C_i`, `yᵀα = 0`.
//! Each step picks the maximal violating index `i` and a second index `j`
//! by second-order gain, then solves the two-variable subproblem in closed
//! form. Selection is deterministic, so no seed is involved.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{ClassicalKernel, CrossKernel, GramMatrix};

/// Alphas above this count as support vectors.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;
/// Largest Gram size for which the PSD check runs before training.
pub const PSD_CHECK_LIMIT: usize = 2000;
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SvmKernel {
    Precomputed,
    Linear,
    Rbf { gamma: f64 },
}

impl SvmKernel {
    pub fn classical(&self) -> Option<ClassicalKernel> {
        match *self {
            SvmKernel::Precomputed => None,
            SvmKernel::Linear => Some(ClassicalKernel::Linear),
            SvmKernel::Rbf { gamma } => Some(ClassicalKernel::Rbf { gamma }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub c: f64,
    pub tolerance: f64,
    pub max_passes: usize,
    pub kernel: SvmKernel,
    /// Per-class multipliers on C, indexed by label. Off by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_weight: Option<[f64; 2]>,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            tolerance: 1e-3,
            max_passes: 50,
            kernel: SvmKernel::Precomputed,
            class_weight: None,
        }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "C must be > 0, got {}",
                self.c
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        if self.max_passes == 0 {
            return Err(Error::InvalidConfig("max_passes must be >= 1".into()));
        }
        if let SvmKernel::Rbf { gamma } = self.kernel {
            if gamma.is_nan() || gamma <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "gamma must be > 0, got {gamma}"
                )));
            }
        }
        if let Some(w) = self.class_weight {
            if w.iter().any(|v| v.is_nan() || *v <= 0.0) {
                return Err(Error::InvalidConfig("class weights must be > 0".into()));
            }
        }
        Ok(())
    }

    fn upper_bound(&self, label: u8) -> f64 {
        self.class_weight
            .map_or(self.c, |w| self.c * w[label as usize])
    }
}

/// Maps binary labels to the signed form used in the dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    pub negative: u8,
    pub positive: u8,
}

impl Default for LabelMap {
    fn default() -> Self {
        LabelMap {
            negative: 0,
            positive: 1,
        }
    }
}

impl LabelMap {
    pub fn sign(&self, label: u8) -> f64 {
        if label == self.positive {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub support_indices: Vec<usize>,
    /// Training labels in signed form, aligned with `alphas`.
    pub signed_labels: Vec<f64>,
    pub label_map: LabelMap,
    pub config: SvmConfig,
    /// Content hash of the training Gram matrix.
    pub kernel_hash: String,
    pub iterations: usize,
    pub converged: bool,
}

impl SvmModel {
    pub fn train_size(&self) -> usize {
        self.alphas.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn check_labels(labels: &[u8]) -> Result<()> {
    if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
        return Err(Error::NonBinaryLabel(bad));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// Dual objective in maximization form: Σα − ½ ΣΣ α_i α_j y_i y_j K_ij.
pub fn dual_objective(gram: &GramMatrix, signed: &[f64], alphas: &[f64]) -> f64 {
    let n = gram.size();
    let mut quad = 0.0;
    for i in 0..n {
        if alphas[i] == 0.0 {
            continue;
        }
        let row = gram.row(i);
        let mut s = 0.0;
        for j in 0..n {
            s += alphas[j] * signed[j] * row[j];
        }
        quad += alphas[i] * signed[i] * s;
    }
    alphas.iter().sum::<f64>() - 0.5 * quad
}

pub fn train_svm(gram: &GramMatrix, labels: &[u8], config: &SvmConfig) -> Result<SvmModel> {
    config.validate()?;
    let n = gram.size();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: labels.len(),
        });
    }
    check_labels(labels)?;
    if n <= PSD_CHECK_LIMIT {
        let min_eig = gram.min_eigenvalue();
        if min_eig < -1e-6 {
            log::warn!("gram matrix is not PSD (min eigenvalue {min_eig:e}); training anyway");
        }
    } else {
        log::debug!("skipping PSD check for n={n}");
    }

    let label_map = LabelMap::default();
    let y: Vec<f64> = labels.iter().map(|&l| label_map.sign(l)).collect();
    let bound: Vec<f64> = labels.iter().map(|&l| config.upper_bound(l)).collect();
    let diag: Vec<f64> = (0..n).map(|i| gram.get(i, i)).collect();

    let mut alpha = vec![0.0; n];
    // gradient of the minimization objective: G = Qα − e
    let mut grad = vec![-1.0; n];

    let max_iter = config.max_passes.saturating_mul(n.max(100));
    let mut iterations = 0;
    let mut converged = false;

    let in_up = |a: f64, yi: f64, c: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let in_low = |a: f64, yi: f64, c: f64| (yi < 0.0 && a < c) || (yi > 0.0 && a > 0.0);

    while iterations < max_iter {
        // maximal violating i over I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if in_up(alpha[t], y[t], bound[t]) {
                let v = -y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i_sel = Some(t);
                }
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j_sel = None;
        let mut best_gain = f64::INFINITY;
        if let Some(i) = i_sel {
            let ki = gram.row(i);
            for t in 0..n {
                if !in_low(alpha[t], y[t], bound[t]) {
                    continue;
                }
                let v = -y[t] * grad[t];
                gmin = gmin.min(v);
                let b = gmax - v;
                if b > 0.0 {
                    let mut a = diag[i] + diag[t] - 2.0 * ki[t];
                    if a <= 0.0 {
                        a = TAU;
                    }
                    let gain = -(b * b) / a;
                    if gain < best_gain {
                        best_gain = gain;
                        j_sel = Some(t);
                    }
                }
            }
        }
        let (i, j) = match (i_sel, j_sel) {
            (Some(i), Some(j)) if gmax - gmin >= config.tolerance => (i, j),
            _ => {
                converged = true;
                break;
            }
        };

        let kij = gram.get(i, j);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (ci, cj) = (bound[i], bound[j]);
        if y[i] != y[j] {
            let mut quad = diag[i] + diag[j] + 2.0 * y[i] * y[j] * kij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let mut quad = diag[i] + diag[j] - 2.0 * kij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let di = alpha[i] - old_i;
        let dj = alpha[j] - old_j;
        let (ki, kj) = (gram.row(i), gram.row(j));
        for t in 0..n {
            grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
        }
        iterations += 1;
    }
    if !converged {
        log::warn!("SMO stopped after {iterations} iterations without meeting tolerance");
    }

    let bias = -rho(&alpha, &grad, &y, &bound);
    let support_indices = alpha
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > SUPPORT_THRESHOLD)
        .map(|(i, _)| i)
        .collect();
    Ok(SvmModel {
        alphas: alpha,
        bias,
        support_indices,
        signed_labels: y,
        label_map,
        config: *config,
        kernel_hash: gram.content_hash(),
        iterations,
        converged,
    })
}

/// Offset from free multipliers, or the midpoint of the feasible interval
/// when every multiplier sits at a bound.
fn rho(alpha: &[f64], grad: &[f64], y: &[f64], bound: &[f64]) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= bound[t] {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    if free > 0 {
        free_sum / free as f64
    } else {
        (ub + lb) / 2.0
    }
}

/// Σ α_i y_i k_i + b over one row of kernel values against the training set.
pub fn decision_function(model: &SvmModel, kernel_row: &[f64]) -> Result<f64> {
    if kernel_row.len() != model.train_size() {
        return Err(Error::DimensionMismatch {
            expected: model.train_size(),
            got: kernel_row.len(),
        });
    }
    let s: f64 = model
        .support_indices
        .iter()
        .map(|&i| model.alphas[i] * model.signed_labels[i] * kernel_row[i])
        .sum();
    Ok(s + model.bias)
}

/// Labels for each cross-kernel row; a decision value of exactly 0 maps to class 1.
pub fn predict(model: &SvmModel, cross: &CrossKernel) -> Result<Vec<u8>> {
    if cross.rows() > 0 && cross.cols() != model.train_size() {
        return Err(Error::DimensionMismatch {
            expected: model.train_size(),
            got: cross.cols(),
        });
    }
    (0..cross.rows())
        .map(|i| {
            decision_function(model, cross.row(i)).map(|d| {
                if d >= 0.0 {
                    model.label_map.positive
                } else {
                    model.label_map.negative
                }
            })
        })
        .collect()
}

/// Trains on raw rows with the config's classical kernel.
pub fn fit_classical(rows: &[Vec<f64>], labels: &[u8], config: &SvmConfig) -> Result<SvmModel> {
    let kernel = config
        .kernel
        .classical()
        .ok_or_else(|| Error::InvalidConfig("fit_classical needs a linear or rbf kernel".into()))?;
    train_svm(&kernel.gram(rows)?, labels, config)
}

/// Largest KKT violation `max_{I_up}(−y∇) − min_{I_low}(−y∇)` for a trained model.
pub fn kkt_gap(gram: &GramMatrix, model: &SvmModel) -> f64 {
    let n = gram.size();
    let y = &model.signed_labels;
    let mut up = f64::NEG_INFINITY;
    let mut low = f64::INFINITY;
    for t in 0..n {
        let row = gram.row(t);
        let qa: f64 = (0..n).map(|s| y[s] * row[s] * model.alphas[s]).sum::<f64>() * y[t];
        let g = qa - 1.0;
        let c = model.config.upper_bound(if y[t] > 0.0 { 1 } else { 0 });
        let a = model.alphas[t];
        let v = -y[t] * g;
        if (y[t] > 0.0 && a < c) || (y[t] < 0.0 && a > 0.0) {
            up = up.max(v);
        }
        if (y[t] < 0.0 && a < c) || (y[t] > 0.0 && a > 0.0) {
            low = low.min(v);
        }
    }
    (up - low).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> (GramMatrix, Vec<u8>) {
        let rows = vec![vec![1.0], vec![-1.0]];
        (ClassicalKernel::Linear.gram(&rows).unwrap(), vec![1, 0])
    }

    #[test]
    fn analytic_two_point_solution() {
        let (g, y) = two_point();
        let cfg = SvmConfig {
            c: 10.0,
            ..SvmConfig::default()
        };
        let m = train_svm(&g, &y, &cfg).unwrap();
        assert!((m.alphas[0] - 0.5).abs() < 1e-6);
        assert!((m.alphas[1] - 0.5).abs() < 1e-6);
        assert!(m.bias.abs() < 1e-6);
        let d = decision_function(&m, g.row(0)).unwrap();
        assert!((d - 1.0).abs() < 1e-6);
        assert!(m.converged);
    }

    #[test]
    fn zero_alphas_give_bias() {
        let (g, y) = two_point();
        let mut m = train_svm(&g, &y, &SvmConfig::default()).unwrap();
        m.alphas = vec![0.0, 0.0];
        m.support_indices.clear();
        m.bias = 0.3;
        assert_eq!(decision_function(&m, &[5.0, -2.0]).unwrap(), 0.3);
        assert!(decision_function(&m, &[1.0]).is_err());
    }

    #[test]
    fn flipping_labels_flips_decision() {
        let rows = vec![
            vec![0.0, 1.0],
            vec![1.0, 0.2],
            vec![2.0, 2.0],
            vec![-1.0, 0.5],
        ];
        let g = ClassicalKernel::Rbf { gamma: 0.7 }.gram(&rows).unwrap();
        let y = vec![1, 0, 1, 0];
        let flipped: Vec<u8> = y.iter().map(|l| 1 - l).collect();
        let a = train_svm(&g, &y, &SvmConfig::default()).unwrap();
        let b = train_svm(&g, &flipped, &SvmConfig::default()).unwrap();
        let probe = ClassicalKernel::Rbf { gamma: 0.7 }
            .cross(&[vec![0.3, 0.9]], &rows)
            .unwrap();
        let da = decision_function(&a, probe.row(0)).unwrap();
        let db = decision_function(&b, probe.row(0)).unwrap();
        assert!((da + db).abs() < 1e-9);
    }

    #[test]
    fn sign_rule_and_tie() {
        let (g, y) = two_point();
        let mut m = train_svm(&g, &y, &SvmConfig::default()).unwrap();
        m.alphas = vec![1.0, 0.0];
        m.support_indices = vec![0];
        m.bias = 0.0;
        let cross = CrossKernel::from_entries(3, 2, vec![2.0, 0.0, -0.5, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(predict(&m, &cross).unwrap(), vec![1, 0, 1]);
        let empty = CrossKernel::from_entries(0, 2, vec![]).unwrap();
        assert!(predict(&m, &empty).unwrap().is_empty());
        let wrong = CrossKernel::from_entries(1, 3, vec![0.0; 3]).unwrap();
        assert!(predict(&m, &wrong).is_err());
    }

    #[test]
    fn conflicting_duplicates_stay_bounded() {
        let rows = vec![vec![0.5], vec![0.5], vec![2.0], vec![-2.0]];
        let g = ClassicalKernel::Rbf { gamma: 1.0 }.gram(&rows).unwrap();
        let cfg = SvmConfig {
            c: 0.1,
            ..SvmConfig::default()
        };
        let m = train_svm(&g, &[1, 0, 1, 0], &cfg).unwrap();
        assert!(m.alphas.iter().all(|&a| (0.0..=0.1 + 1e-12).contains(&a)));
        let s: f64 = m
            .alphas
            .iter()
            .zip(&m.signed_labels)
            .map(|(a, y)| a * y)
            .sum();
        assert!(s.abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (g, _) = two_point();
        assert!(matches!(
            train_svm(&g, &[1, 1], &SvmConfig::default()),
            Err(Error::SingleClass)
        ));
        assert!(matches!(
            train_svm(&g, &[1], &SvmConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            train_svm(&g, &[1, 2], &SvmConfig::default()),
            Err(Error::NonBinaryLabel(2))
        ));
        let bad = SvmConfig {
            c: 0.0,
            ..SvmConfig::default()
        };
        assert!(train_svm(&g, &[1, 0], &bad).is_err());
    }

    #[test]
    fn class_weight_scales_box() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 * 0.3]).collect();
        let y = vec![0, 1, 0, 1, 0, 1];
        let g = ClassicalKernel::Rbf { gamma: 2.0 }.gram(&rows).unwrap();
        let cfg = SvmConfig {
            c: 0.5,
            class_weight: Some([2.0, 1.0]),
            ..SvmConfig::default()
        };
        let m = train_svm(&g, &y, &cfg).unwrap();
        for (a, l) in m.alphas.iter().zip(&y) {
            let cap = if *l == 0 { 1.0 } else { 0.5 };
            assert!(*a <= cap + 1e-12);
        }
    }

    #[test]
    fn model_json_round_trip() {
        let (g, y) = two_point();
        let m = train_svm(&g, &y, &SvmConfig::default()).unwrap();
        let back = SvmModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
