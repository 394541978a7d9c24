//! Stratified k-fold cross-validation and classification reports.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{fold_metrics, ClassMetrics, ConfusionMatrix, FoldMetrics};
use super::{check_design, Classifier, MlError, ModelSpec, CLASS_COUNT};

/// Held-out row indices per fold. Each class is shuffled with `seed` and
/// dealt round-robin, continuing the deal across classes so that fold sizes
/// stay balanced.
pub fn stratified_folds(y: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>, MlError> {
    if k < 2 {
        return Err(MlError::Params("k must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for class in 0..CLASS_COUNT {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        if members.len() < k {
            return Err(MlError::TooFewForFolds { class, count: members.len(), k });
        }
        members.shuffle(&mut rng);
        for i in members {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation across folds.
    pub std: f64,
}

impl MeanStd {
    pub fn of(xs: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = xs.into_iter().collect();
        let (mean, std) = crate::stats::mean_std(&v);
        MeanStd { mean, std }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassSummary {
    pub precision: MeanStd,
    pub recall: MeanStd,
    pub f1: MeanStd,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub model: String,
    pub k: usize,
    pub seed: u64,
    pub n: usize,
    pub per_class: [ClassSummary; CLASS_COUNT],
    pub accuracy: MeanStd,
    pub roc_auc: MeanStd,
    pub roc_auc_weighted: MeanStd,
    pub macro_avg: ClassSummary,
    pub weighted_avg: ClassSummary,
    /// Pooled over all held-out folds.
    pub confusion: ConfusionMatrix,
    pub folds: Vec<FoldMetrics>,
}

fn summarize(folds: &[FoldMetrics], pick: impl Fn(&FoldMetrics) -> ClassMetrics, support: u64) -> ClassSummary {
    ClassSummary {
        precision: MeanStd::of(folds.iter().map(|f| pick(f).precision)),
        recall: MeanStd::of(folds.iter().map(|f| pick(f).recall)),
        f1: MeanStd::of(folds.iter().map(|f| pick(f).f1)),
        support,
    }
}

/// Train on k−1 folds, score the held-out fold, aggregate mean ± std.
pub fn cross_validate(
    spec: &ModelSpec,
    x: &[Vec<f64>],
    y: &[usize],
    feature_names: &[String],
    k: usize,
    seed: u64,
) -> Result<CvReport, MlError> {
    check_design(x, y, feature_names)?;
    let folds = stratified_folds(y, k, seed)?;
    let results: Vec<Result<FoldMetrics, MlError>> = folds
        .par_iter()
        .map(|test| {
            let mut held = vec![false; y.len()];
            for &i in test {
                held[i] = true;
            }
            let train: Vec<usize> = (0..y.len()).filter(|&i| !held[i]).collect();
            let tx: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
            let ty: Vec<usize> = train.iter().map(|&i| y[i]).collect();
            let model = spec.fit(&tx, &ty, feature_names)?;
            let proba: Vec<[f64; CLASS_COUNT]> = test.iter().map(|&i| model.predict_proba(&x[i])).collect();
            let truth: Vec<usize> = test.iter().map(|&i| y[i]).collect();
            fold_metrics(&truth, &proba)
        })
        .collect();
    let folds: Vec<FoldMetrics> = results.into_iter().collect::<Result<_, _>>()?;

    let mut confusion = [[0u64; CLASS_COUNT]; CLASS_COUNT];
    for f in &folds {
        for (t, row) in f.confusion.iter().enumerate() {
            for (p, v) in row.iter().enumerate() {
                confusion[t][p] += v;
            }
        }
    }
    let support = |c: usize| confusion[c].iter().sum::<u64>();
    let per_class = std::array::from_fn(|c| summarize(&folds, |f| f.per_class[c], support(c)));
    Ok(CvReport {
        model: spec.name().to_string(),
        k,
        seed,
        n: y.len(),
        per_class,
        accuracy: MeanStd::of(folds.iter().map(|f| f.accuracy)),
        roc_auc: MeanStd::of(folds.iter().map(|f| f.roc_auc_macro)),
        roc_auc_weighted: MeanStd::of(folds.iter().map(|f| f.roc_auc_weighted)),
        macro_avg: summarize(&folds, |f| f.macro_avg, y.len() as u64),
        weighted_avg: summarize(&folds, |f| f.weighted_avg, y.len() as u64),
        confusion,
        folds,
    })
}

fn pm(v: MeanStd) -> String {
    format!("{:.2} ± {:.2}", v.mean, v.std)
}

impl CvReport {
    /// Markdown classification report: per-class rows with ± bounds, then
    /// accuracy, ROC-AUC and the macro/weighted averages.
    pub fn to_markdown(&self, title: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "### {title}\n");
        let _ = writeln!(
            s,
            "Model `{}`, stratified {}-fold cross-validation (seed {}), n = {}. Bounds are the sample standard deviation across folds.\n",
            self.model, self.k, self.seed, self.n
        );
        let _ = writeln!(s, "| Class | Precision | Recall | f1-score | Support |");
        let _ = writeln!(s, "|---|---|---|---|---|");
        for (c, m) in self.per_class.iter().enumerate() {
            let _ = writeln!(s, "| {c} | {} | {} | {} | {} |", pm(m.precision), pm(m.recall), pm(m.f1), m.support);
        }
        let _ = writeln!(s, "| Accuracy | {} | | | {} |", pm(self.accuracy), self.n);
        let _ = writeln!(s, "| roc_auc | {} | | | |", pm(self.roc_auc));
        let _ = writeln!(s, "| roc_auc (weighted) | {} | | | |", pm(self.roc_auc_weighted));
        for (name, m) in [("Macro avg", &self.macro_avg), ("Weighted avg", &self.weighted_avg)] {
            let _ = writeln!(
                s,
                "| {name} | {:.2} | {:.2} | {:.2} | {} |",
                m.precision.mean, m.recall.mean, m.f1.mean, m.support
            );
        }
        s
    }

    /// `true_class,pred_0,pred_1,pred_2` rows.
    pub fn confusion_csv(&self) -> String {
        let mut s = String::from("true_class,pred_0,pred_1,pred_2\n");
        for (t, row) in self.confusion.iter().enumerate() {
            let _ = writeln!(s, "{t},{},{},{}", row[0], row[1], row[2]);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::{generic_names, synthetic, CartParams, ForestParams, GbtParams};
    use proptest::prelude::*;

    #[test]
    fn separable_is_perfect() {
        let (x, y) = synthetic::threshold_1d(90, 0, 1);
        let r = cross_validate(&ModelSpec::default(), &x, &y, &generic_names(1), 4, 0).unwrap();
        assert_eq!(r.accuracy, MeanStd { mean: 1.0, std: 0.0 });
        for t in 0..3 {
            for p in 0..3 {
                assert_eq!(r.confusion[t][p] > 0, t == p);
            }
        }
        let md = r.to_markdown("Separable");
        assert!(md.contains("| Accuracy | 1.00 ± 0.00 |"));
    }

    #[test]
    fn blobs_and_shuffled_control() {
        let (x, y) = synthetic::blobs(300, 7);
        let names = generic_names(2);
        let gbt = cross_validate(&ModelSpec::default(), &x, &y, &names, 4, 7).unwrap();
        assert!(gbt.accuracy.mean >= 0.95, "{}", gbt.accuracy.mean);
        let rf = cross_validate(&ModelSpec::RandomForest(ForestParams::default()), &x, &y, &names, 4, 7).unwrap();
        assert!((rf.accuracy.mean - gbt.accuracy.mean).abs() <= 0.05);
        let dt = cross_validate(&ModelSpec::DecisionTree(CartParams::default()), &x, &y, &names, 4, 7).unwrap();
        assert!((dt.accuracy.mean - gbt.accuracy.mean).abs() <= 0.05);
        let ys = synthetic::shuffled(&y, 11);
        let ctl = cross_validate(&ModelSpec::default(), &x, &ys, &names, 4, 7).unwrap();
        assert!((0.23..=0.43).contains(&ctl.accuracy.mean), "{}", ctl.accuracy.mean);
        let sum: u64 = ctl.confusion.iter().flatten().sum();
        assert_eq!(sum, 300);
    }

    #[test]
    fn too_few_members() {
        let y = [0, 0, 0, 0, 1, 1, 1, 1, 2, 2];
        assert!(matches!(stratified_folds(&y, 3, 0), Err(MlError::TooFewForFolds { class: 2, count: 2, k: 3 })));
    }

    #[test]
    fn report_matches_confusion() {
        let (x, y) = synthetic::blobs(60, 3);
        let spec = ModelSpec::Gbt(GbtParams { rounds: 5, ..Default::default() });
        let r = cross_validate(&spec, &x, &y, &generic_names(2), 3, 1).unwrap();
        for c in 0..3 {
            assert_eq!(r.per_class[c].support, 20);
        }
        assert!(r.confusion_csv().starts_with("true_class,pred_0,pred_1,pred_2\n0,"));
    }

    proptest! {
        #[test]
        fn folds_are_stratified(counts in prop::array::uniform3(4usize..40), k in 2usize..5, seed in any::<u64>()) {
            let y: Vec<usize> = (0..3).flat_map(|c| std::iter::repeat(c).take(counts[c])).collect();
            let folds = stratified_folds(&y, k, seed).unwrap();
            let mut seen = vec![0; y.len()];
            for f in &folds {
                for &i in f {
                    seen[i] += 1;
                }
                for c in 0..3 {
                    let have = f.iter().filter(|&&i| y[i] == c).count() as f64;
                    let want = counts[c] as f64 / k as f64;
                    prop_assert!((have - want).abs() <= 1.0);
                }
            }
            prop_assert!(seen.iter().all(|&s| s == 1));
        }
    }
}
