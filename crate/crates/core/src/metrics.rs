//! Binary confusion matrices and classification reports.
//!
//! Each class is treated in turn as the positive class:
//! precision = TP / (TP + FP), recall = TP / (TP + FN), f1 is their harmonic
//! mean, and accuracy = (TP + TN) / total. A rate whose denominator is zero
//! is reported as 0 and flagged.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rows are the true class, columns the predicted class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 2]; 2],
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        self.counts[0][0] + self.counts[1][1]
    }

    /// Two-by-two CSV with a header row of predicted classes.
    pub fn to_csv(&self) -> String {
        let c = &self.counts;
        format!(
            "true\\pred,0,1\n0,{},{}\n1,{},{}\n",
            c[0][0], c[0][1], c[1][0], c[1][1]
        )
    }
}

fn check_pair(y_true: &[u8], y_pred: &[u8]) -> Result<()> {
    if y_true.is_empty() {
        return Err(Error::Empty("label vector"));
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    if let Some(&bad) = y_true.iter().chain(y_pred).find(|&&l| l > 1) {
        return Err(Error::NonBinaryLabel(bad));
    }
    Ok(())
}

pub fn confusion_matrix(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix> {
    check_pair(y_true, y_pred)?;
    let mut counts = [[0u64; 2]; 2];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        counts[t as usize][p as usize] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    /// Set when precision, recall or f1 had a zero denominator.
    #[serde(default)]
    pub undefined: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub per_class: [ClassMetrics; 2],
    pub accuracy: f64,
    pub macro_avg: Averages,
    pub weighted_avg: Averages,
    pub total_support: u64,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

impl ClassificationReport {
    pub fn from_confusion(cm: &ConfusionMatrix) -> Self {
        let c = &cm.counts;
        let total = cm.total();
        let per_class = [0usize, 1].map(|k| {
            let other = 1 - k;
            let tp = c[k][k];
            let fp = c[other][k];
            let fn_ = c[k][other];
            let (precision, p_undef) = ratio(tp, tp + fp);
            let (recall, r_undef) = ratio(tp, tp + fn_);
            ClassMetrics {
                precision,
                recall,
                f1: f1_score(precision, recall),
                support: tp + fn_,
                undefined: p_undef || r_undef || precision + recall == 0.0,
            }
        });
        let (accuracy, _) = ratio(cm.trace(), total);
        Self::assemble(per_class, accuracy)
    }

    /// Builds averages from per-class rows and an accuracy figure.
    pub fn assemble(per_class: [ClassMetrics; 2], accuracy: f64) -> Self {
        let total: u64 = per_class.iter().map(|m| m.support).sum();
        let mean = |f: fn(&ClassMetrics) -> f64| (f(&per_class[0]) + f(&per_class[1])) / 2.0;
        let weighted = |f: fn(&ClassMetrics) -> f64| {
            if total == 0 {
                0.0
            } else {
                per_class
                    .iter()
                    .map(|m| f(m) * m.support as f64)
                    .sum::<f64>()
                    / total as f64
            }
        };
        ClassificationReport {
            per_class,
            accuracy,
            macro_avg: Averages {
                precision: mean(|m| m.precision),
                recall: mean(|m| m.recall),
                f1: mean(|m| m.f1),
            },
            weighted_avg: Averages {
                precision: weighted(|m| m.precision),
                recall: weighted(|m| m.recall),
                f1: weighted(|m| m.f1),
            },
            total_support: total,
        }
    }
}

pub fn classification_report(y_true: &[u8], y_pred: &[u8]) -> Result<ClassificationReport> {
    Ok(ClassificationReport::from_confusion(&confusion_matrix(
        y_true, y_pred,
    )?))
}

/// Round half up to two decimals. The 1e-9 nudge absorbs binary
/// representation error, so 0.665 rounds to 0.67.
pub fn round2(x: f64) -> f64 {
    cents(x) as f64 / 100.0
}

fn cents(x: f64) -> i64 {
    (x * 100.0 + 1e-9 + 0.5).floor() as i64
}

/// Two-decimal display string using [`round2`].
pub fn fmt2(x: f64) -> String {
    let c = cents(x);
    format!("{}.{:02}", c / 100, c % 100)
}

/// Fixed-width table: header, two class rows, accuracy, macro and weighted
/// averages, laid out like the familiar classification report.
pub fn render_report(report: &ClassificationReport) -> String {
    let mut out = String::new();
    let label_w = 12;
    let _ = writeln!(
        out,
        "{:>label_w$} {:>9} {:>9} {:>9} {:>9}",
        "", "precision", "recall", "f1-score", "support"
    );
    out.push('\n');
    for (k, m) in report.per_class.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:>label_w$} {:>9} {:>9} {:>9} {:>9}",
            format!("Class {k}"),
            fmt2(m.precision),
            fmt2(m.recall),
            fmt2(m.f1),
            m.support
        );
    }
    out.push('\n');
    let _ = writeln!(
        out,
        "{:>label_w$} {:>9} {:>9} {:>9} {:>9}",
        "accuracy",
        "",
        "",
        fmt2(report.accuracy),
        report.total_support
    );
    for (name, avg) in [
        ("macro avg", &report.macro_avg),
        ("weighted avg", &report.weighted_avg),
    ] {
        let _ = writeln!(
            out,
            "{:>label_w$} {:>9} {:>9} {:>9} {:>9}",
            name,
            fmt2(avg.precision),
            fmt2(avg.recall),
            fmt2(avg.f1),
            report.total_support
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_counts() {
        assert_eq!(
            confusion_matrix(&[0, 1], &[0, 1]).unwrap().counts,
            [[1, 0], [0, 1]]
        );
        assert_eq!(
            confusion_matrix(&[0, 0, 1, 1], &[0, 1, 1, 1])
                .unwrap()
                .counts,
            [[1, 1], [0, 2]]
        );
        assert_eq!(
            confusion_matrix(&[1, 1], &[0, 0]).unwrap().counts,
            [[0, 0], [2, 0]]
        );
        assert!(confusion_matrix(&[], &[]).is_err());
        assert!(confusion_matrix(&[0, 1], &[0]).is_err());
        assert!(confusion_matrix(&[0, 3], &[0, 1]).is_err());
    }

    #[test]
    fn hand_report() {
        let r = classification_report(&[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap();
        assert_eq!(r.accuracy, 0.75);
        assert!((r.per_class[1].precision - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.per_class[1].recall, 1.0);
        assert_eq!(r.per_class[0].precision, 1.0);
        assert_eq!(r.per_class[0].recall, 0.5);
        assert_eq!(r.total_support, 4);
    }

    #[test]
    fn zero_denominators_are_flagged() {
        let r = classification_report(&[1, 1], &[1, 1]).unwrap();
        assert_eq!(r.per_class[0].precision, 0.0);
        assert!(r.per_class[0].undefined);
        assert!(!r.per_class[1].undefined);
        assert_eq!(r.per_class[0].support, 0);
    }

    #[test]
    fn display_rounding() {
        assert_eq!(fmt2(0.665), "0.67");
        assert_eq!(fmt2(0.7399), "0.74");
        assert_eq!(fmt2(1.0), "1.00");
        assert_eq!(fmt2(0.0), "0.00");
        assert_eq!(fmt2(0.005), "0.01");
        assert_eq!(fmt2(0.68109), "0.68");
        assert!((round2(0.665) - 0.67).abs() < 1e-12);
        assert!((round2(0.6649) - 0.66).abs() < 1e-12);
    }

    #[test]
    fn first_report_row() {
        let rows = [
            ClassMetrics {
                precision: 0.60,
                recall: 0.58,
                f1: 0.59,
                support: 432,
                undefined: false,
            },
            ClassMetrics {
                precision: 0.73,
                recall: 0.75,
                f1: f1_score(0.73, 0.75),
                support: 668,
                undefined: false,
            },
        ];
        let r = ClassificationReport::assemble(rows, 0.68);
        let text = render_report(&r);
        let class1 = text.lines().find(|l| l.contains("Class 1")).unwrap();
        let fields: Vec<_> = class1.split_whitespace().skip(2).collect();
        assert_eq!(fields, ["0.73", "0.75", "0.74", "668"]);
    }

    #[test]
    fn perfect_and_stable() {
        let r = classification_report(&[0, 1], &[0, 1]).unwrap();
        let a = render_report(&r);
        assert_eq!(a, render_report(&r));
        for line in a
            .lines()
            .filter(|l| l.contains("Class") || l.contains("avg"))
        {
            let rates: Vec<_> = line
                .split_whitespace()
                .filter(|f| f.contains('.'))
                .collect();
            assert!(rates.iter().all(|f| *f == "1.00"), "{line}");
        }
    }

    #[test]
    fn csv_layout() {
        let cm = confusion_matrix(&[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap();
        assert_eq!(cm.to_csv(), "true\\pred,0,1\n0,1,1\n1,0,2\n");
    }
}
