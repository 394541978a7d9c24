//! Confusion matrices, per-class scores and one-vs-rest ROC-AUC.

use serde::{Deserialize, Serialize};

use super::{MlError, CLASS_COUNT};
use crate::stats::midranks;

/// Rows are true classes, columns predicted classes.
pub type ConfusionMatrix = [[u64; CLASS_COUNT]; CLASS_COUNT];

pub fn confusion_matrix(y_true: &[usize], y_pred: &[usize]) -> Result<ConfusionMatrix, MlError> {
    if y_true.len() != y_pred.len() {
        return Err(MlError::LengthMismatch { x: y_true.len(), y: y_pred.len() });
    }
    let mut m = [[0u64; CLASS_COUNT]; CLASS_COUNT];
    for (row, (&t, &p)) in y_true.iter().zip(y_pred).enumerate() {
        if t >= CLASS_COUNT {
            return Err(MlError::Label { row, label: t });
        }
        if p >= CLASS_COUNT {
            return Err(MlError::Label { row, label: p });
        }
        m[t][p] += 1;
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

/// Scores of one evaluation fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub per_class: [ClassMetrics; CLASS_COUNT],
    pub accuracy: f64,
    pub macro_avg: ClassMetrics,
    pub weighted_avg: ClassMetrics,
    pub roc_auc_macro: f64,
    pub roc_auc_weighted: f64,
    pub confusion: ConfusionMatrix,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-class precision, recall and F1 (0 where undefined), plus accuracy
/// and macro/support-weighted averages.
pub fn class_metrics(
    m: &ConfusionMatrix,
) -> ([ClassMetrics; CLASS_COUNT], f64, ClassMetrics, ClassMetrics) {
    let total: u64 = m.iter().flatten().sum();
    let mut per = [ClassMetrics::default(); CLASS_COUNT];
    for k in 0..CLASS_COUNT {
        let tp = m[k][k];
        let support: u64 = m[k].iter().sum();
        let predicted: u64 = (0..CLASS_COUNT).map(|t| m[t][k]).sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        per[k] = ClassMetrics { precision, recall, f1, support };
    }
    let accuracy = ratio((0..CLASS_COUNT).map(|k| m[k][k]).sum(), total);
    let avg = |w: &dyn Fn(&ClassMetrics) -> f64| {
        let ws: f64 = per.iter().map(w).sum();
        let f = |g: fn(&ClassMetrics) -> f64| {
            if ws == 0.0 {
                0.0
            } else {
                per.iter().map(|c| w(c) * g(c)).sum::<f64>() / ws
            }
        };
        ClassMetrics { precision: f(|c| c.precision), recall: f(|c| c.recall), f1: f(|c| c.f1), support: total }
    };
    let macro_avg = avg(&|_| 1.0);
    let weighted_avg = avg(&|c| c.support as f64);
    (per, accuracy, macro_avg, weighted_avg)
}

/// One-vs-rest ROC-AUC per class from the rank-sum identity, returned with
/// the macro and support-weighted means. Errors when a class has no
/// positives or no negatives.
pub fn roc_auc_ovr(y_true: &[usize], proba: &[[f64; CLASS_COUNT]]) -> Result<([f64; CLASS_COUNT], f64, f64), MlError> {
    if y_true.len() != proba.len() {
        return Err(MlError::LengthMismatch { x: proba.len(), y: y_true.len() });
    }
    let n = y_true.len();
    let mut auc = [0.0; CLASS_COUNT];
    let mut support = [0usize; CLASS_COUNT];
    for k in 0..CLASS_COUNT {
        let scores: Vec<f64> = proba.iter().map(|p| p[k]).collect();
        let ranks = midranks(&scores);
        let pos: Vec<usize> = (0..n).filter(|&i| y_true[i] == k).collect();
        let (np, nn) = (pos.len(), n - pos.len());
        if np == 0 || nn == 0 {
            return Err(MlError::MissingClass(k));
        }
        let rank_sum: f64 = pos.iter().map(|&i| ranks[i]).sum();
        let npf = np as f64;
        auc[k] = (rank_sum - npf * (npf + 1.0) / 2.0) / (npf * nn as f64);
        support[k] = np;
    }
    let macro_auc = auc.iter().sum::<f64>() / CLASS_COUNT as f64;
    let weighted = auc.iter().zip(support).map(|(a, s)| a * s as f64).sum::<f64>() / n as f64;
    Ok((auc, macro_auc, weighted))
}

/// All fold scores from true labels and predicted probabilities.
pub fn fold_metrics(y_true: &[usize], proba: &[[f64; CLASS_COUNT]]) -> Result<FoldMetrics, MlError> {
    let pred: Vec<usize> = proba.iter().map(|p| super::argmax(p)).collect();
    let confusion = confusion_matrix(y_true, &pred)?;
    let (per_class, accuracy, macro_avg, weighted_avg) = class_metrics(&confusion);
    let (_, roc_auc_macro, roc_auc_weighted) = roc_auc_ovr(y_true, proba)?;
    Ok(FoldMetrics { per_class, accuracy, macro_avg, weighted_avg, roc_auc_macro, roc_auc_weighted, confusion })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_hand_tally() {
        let t = [0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 2];
        let p = [0, 1, 0, 1, 1, 2, 1, 2, 2, 0, 2, 1];
        let m = confusion_matrix(&t, &p).unwrap();
        assert_eq!(m, [[2, 1, 0], [0, 3, 1], [1, 1, 3]]);
        let (per, acc, mac, w) = class_metrics(&m);
        assert_eq!(acc, 8.0 / 12.0);
        assert_eq!(per[1].precision, 3.0 / 5.0);
        assert_eq!(per[2].recall, 3.0 / 5.0);
        assert_eq!(per[0].support, 3);
        assert!((mac.recall - (2.0 / 3.0 + 0.75 + 0.6) / 3.0).abs() < 1e-15);
        // Support-weighted recall equals accuracy.
        assert!((w.recall - acc).abs() < 1e-15);
        assert!(matches!(confusion_matrix(&[3], &[0]), Err(MlError::Label { row: 0, label: 3 })));
    }

    #[test]
    fn diagonal_and_single_column() {
        let y = [0, 1, 2, 2];
        let m = confusion_matrix(&y, &y).unwrap();
        assert_eq!(m, [[1, 0, 0], [0, 1, 0], [0, 0, 2]]);
        let m = confusion_matrix(&y, &[1; 4]).unwrap();
        assert_eq!(m.iter().map(|r| r[1]).sum::<u64>(), 4);
        let (per, _, _, _) = class_metrics(&m);
        assert_eq!(per[0].precision, 0.0);
    }

    #[test]
    fn auc_by_pair_count() {
        let y = [0, 1, 2, 0, 1, 2, 1];
        let p = [
            [0.7, 0.2, 0.1],
            [0.3, 0.4, 0.3],
            [0.1, 0.3, 0.6],
            [0.4, 0.4, 0.2],
            [0.5, 0.3, 0.2],
            [0.2, 0.2, 0.6],
            [0.1, 0.8, 0.1],
        ];
        let (auc, _, _) = roc_auc_ovr(&y, &p).unwrap();
        for k in 0..3 {
            let mut hits = 0.0;
            let mut pairs = 0.0;
            for i in 0..7 {
                for j in 0..7 {
                    if y[i] == k && y[j] != k {
                        pairs += 1.0;
                        hits += if p[i][k] > p[j][k] {
                            1.0
                        } else if p[i][k] == p[j][k] {
                            0.5
                        } else {
                            0.0
                        };
                    }
                }
            }
            assert!((auc[k] - hits / pairs).abs() < 1e-15);
        }
    }
}
