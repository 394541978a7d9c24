//! Path-dependent TreeSHAP for boosted models, importance summaries and
//! beeswarm exports.
//!
//! Attributions are on the margin scale: for every sample and class,
//! `Σ values + base_value` equals the model's raw margin.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ml::{GbtModel, Tree, TreeNode, CLASS_COUNT};
use crate::netfeat::{format_float, quantile_sorted};

#[derive(Debug, thiserror::Error)]
pub enum ExplainError {
    #[error("tree {tree} node {node} has no cover statistics")]
    MissingCover { tree: usize, node: usize },
    #[error("sample {row} has {got} features, model expects {expected}")]
    Shape { row: usize, got: usize, expected: usize },
    #[error("non-finite feature value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy)]
struct PathElement {
    feature: Option<usize>,
    zero: f64,
    one: f64,
    weight: f64,
}

fn extend(path: &mut Vec<PathElement>, zero: f64, one: f64, feature: Option<usize>) {
    let l = path.len();
    path.push(PathElement { feature, zero, one, weight: if l == 0 { 1.0 } else { 0.0 } });
    let lf = (l + 1) as f64;
    for i in (0..l).rev() {
        path[i + 1].weight += one * path[i].weight * (i + 1) as f64 / lf;
        path[i].weight = zero * path[i].weight * (l - i) as f64 / lf;
    }
}

fn unwind(path: &mut Vec<PathElement>, index: usize) {
    let l = path.len() - 1;
    let PathElement { one, zero, .. } = path[index];
    let lf = (l + 1) as f64;
    let mut next = path[l].weight;
    for i in (0..l).rev() {
        if one != 0.0 {
            let tmp = path[i].weight;
            path[i].weight = next * lf / ((i + 1) as f64 * one);
            next = tmp - path[i].weight * zero * (l - i) as f64 / lf;
        } else {
            path[i].weight = path[i].weight * lf / (zero * (l - i) as f64);
        }
    }
    // Weights stay in place; only the element data shifts down.
    for i in index..l {
        path[i].feature = path[i + 1].feature;
        path[i].zero = path[i + 1].zero;
        path[i].one = path[i + 1].one;
    }
    path.pop();
}

fn unwound_sum(path: &[PathElement], index: usize) -> f64 {
    let l = path.len() - 1;
    let PathElement { one, zero, .. } = path[index];
    let lf = (l + 1) as f64;
    let mut total = 0.0;
    if one != 0.0 {
        let mut next = path[l].weight;
        for i in (0..l).rev() {
            let tmp = next * lf / ((i + 1) as f64 * one);
            total += tmp;
            next = path[i].weight - tmp * zero * (l - i) as f64 / lf;
        }
    } else {
        for i in (0..l).rev() {
            total += path[i].weight * lf / (zero * (l - i) as f64);
        }
    }
    total
}

fn recurse(
    tree: &Tree<f64>,
    x: &[f64],
    phi: &mut [f64],
    node: usize,
    mut path: Vec<PathElement>,
    zero: f64,
    one: f64,
    feature: Option<usize>,
) {
    extend(&mut path, zero, one, feature);
    match &tree.nodes[node] {
        TreeNode::Leaf { value, .. } => {
            for i in 1..path.len() {
                let w = unwound_sum(&path, i);
                let e = path[i];
                phi[e.feature.expect("non-root path element")] += w * (e.one - e.zero) * value;
            }
        }
        TreeNode::Split { feature: f, threshold, left, right, cover } => {
            let (hot, cold) = if x[*f] < *threshold { (*left, *right) } else { (*right, *left) };
            let hot_zero = tree.nodes[hot].cover() / cover;
            let cold_zero = tree.nodes[cold].cover() / cover;
            let (mut in_zero, mut in_one) = (1.0, 1.0);
            if let Some(k) = path.iter().position(|e| e.feature == Some(*f)) {
                in_zero = path[k].zero;
                in_one = path[k].one;
                unwind(&mut path, k);
            }
            recurse(tree, x, phi, hot, path.clone(), hot_zero * in_zero, in_one, Some(*f));
            recurse(tree, x, phi, cold, path, cold_zero * in_zero, 0.0, Some(*f));
        }
    }
}

fn check_covers(tree: &Tree<f64>, index: usize) -> Result<(), ExplainError> {
    match tree.nodes.iter().position(|n| !(n.cover() > 0.0)) {
        Some(node) => Err(ExplainError::MissingCover { tree: index, node }),
        None => Ok(()),
    }
}

/// Exact Shapley values of one tree's output at `x`, with the
/// cover-weighted conditional expectation as the value function.
pub fn tree_shap_single(tree: &Tree<f64>, x: &[f64], n_features: usize) -> Vec<f64> {
    let mut phi = vec![0.0; n_features];
    recurse(tree, x, &mut phi, 0, Vec::new(), 1.0, 1.0, None);
    phi
}

/// Cover-weighted mean leaf value.
pub fn tree_expected_value(tree: &Tree<f64>) -> f64 {
    let root = tree.nodes[0].cover();
    tree.nodes
        .iter()
        .map(|n| match n {
            TreeNode::Leaf { value, cover } => value * cover / root,
            TreeNode::Split { .. } => 0.0,
        })
        .sum()
}

/// Per-class base values: base score plus the learning-rate-scaled
/// expected value of every tree.
pub fn base_values(model: &GbtModel) -> [f64; CLASS_COUNT] {
    let lr = model.learning_rate();
    std::array::from_fn(|k| model.base_score + model.class_trees(k).map(|t| lr * tree_expected_value(t)).sum::<f64>())
}

/// Per-class attributions at `x` and the per-class base values.
pub fn tree_shap(model: &GbtModel, x: &[f64]) -> Result<([Vec<f64>; CLASS_COUNT], [f64; CLASS_COUNT]), ExplainError> {
    let p = model.feature_names.len();
    if x.len() != p {
        return Err(ExplainError::Shape { row: 0, got: x.len(), expected: p });
    }
    for (i, round) in model.trees.iter().enumerate() {
        for (k, t) in round.iter().enumerate() {
            check_covers(t, i * CLASS_COUNT + k)?;
        }
    }
    Ok((shap_unchecked(model, x), base_values(model)))
}

fn shap_unchecked(model: &GbtModel, x: &[f64]) -> [Vec<f64>; CLASS_COUNT] {
    let p = model.feature_names.len();
    let lr = model.learning_rate();
    std::array::from_fn(|k| {
        let mut acc = vec![0.0; p];
        for t in model.class_trees(k) {
            for (a, v) in acc.iter_mut().zip(tree_shap_single(t, x, p)) {
                *a += lr * v;
            }
        }
        acc
    })
}

/// Attributions for a whole design matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapMatrix {
    pub n_features: usize,
    /// `values[sample][class][feature]`.
    pub values: Vec<[Vec<f64>; CLASS_COUNT]>,
    pub base_values: [f64; CLASS_COUNT],
}

impl ShapMatrix {
    pub fn n_samples(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, sample: usize, class: usize, feature: usize) -> f64 {
        self.values[sample][class][feature]
    }

    /// `Σ_f values + base` for one sample and class.
    pub fn reconstructed_margin(&self, sample: usize, class: usize) -> f64 {
        self.values[sample][class].iter().sum::<f64>() + self.base_values[class]
    }
}

pub fn shap_matrix(model: &GbtModel, x: &[Vec<f64>]) -> Result<ShapMatrix, ExplainError> {
    let p = model.feature_names.len();
    for (row, r) in x.iter().enumerate() {
        if r.len() != p {
            return Err(ExplainError::Shape { row, got: r.len(), expected: p });
        }
        if let Some(column) = r.iter().position(|v| !v.is_finite()) {
            return Err(ExplainError::NonFinite { row, column });
        }
    }
    for (i, round) in model.trees.iter().enumerate() {
        for (k, t) in round.iter().enumerate() {
            check_covers(t, i * CLASS_COUNT + k)?;
        }
    }
    let values = x.par_iter().map(|r| shap_unchecked(model, r)).collect();
    Ok(ShapMatrix { n_features: p, values, base_values: base_values(model) })
}

/// Mean |SHAP| per class and feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceSummary {
    pub feature_names: Vec<String>,
    /// `mean_abs[class][feature]`.
    pub mean_abs: [Vec<f64>; CLASS_COUNT],
    /// Feature indices by descending summed class importance.
    pub ranking: Vec<usize>,
}

fn rank_desc(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx
}

impl ImportanceSummary {
    pub fn from_shap(shap: &ShapMatrix, feature_names: &[String]) -> Self {
        let n = shap.n_samples().max(1) as f64;
        let mean_abs: [Vec<f64>; CLASS_COUNT] = std::array::from_fn(|k| {
            (0..shap.n_features)
                .map(|f| shap.values.iter().map(|s| s[k][f].abs()).sum::<f64>() / n)
                .collect()
        });
        let totals: Vec<f64> = (0..shap.n_features).map(|f| mean_abs.iter().map(|c| c[f]).sum()).collect();
        ImportanceSummary { feature_names: feature_names.to_vec(), mean_abs, ranking: rank_desc(&totals) }
    }

    /// Feature indices by descending importance within one class.
    pub fn class_ranking(&self, class: usize) -> Vec<usize> {
        rank_desc(&self.mean_abs[class])
    }

    /// Names of the `n` most important features for `class`.
    pub fn top(&self, class: usize, n: usize) -> Vec<&str> {
        self.class_ranking(class).into_iter().take(n).map(|f| self.feature_names[f].as_str()).collect()
    }

    /// `class,feature,mean_abs_shap,rank` with 1-based ranks within class.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "class,feature,mean_abs_shap,rank")?;
        for k in 0..CLASS_COUNT {
            let order = self.class_ranking(k);
            let mut rank = vec![0; order.len()];
            for (r, &f) in order.iter().enumerate() {
                rank[f] = r + 1;
            }
            for (f, name) in self.feature_names.iter().enumerate() {
                writeln!(w, "{k},{name},{},{}", format_float(self.mean_abs[k][f]), rank[f])?;
            }
        }
        Ok(())
    }
}

pub fn mean_abs_shap(model: &GbtModel, x: &[Vec<f64>]) -> Result<ImportanceSummary, ExplainError> {
    Ok(ImportanceSummary::from_shap(&shap_matrix(model, x)?, &model.feature_names))
}

/// Feature-value bands used to colour beeswarm points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tercile {
    Weak,
    Moderate,
    Strong,
}

impl Tercile {
    pub fn as_str(self) -> &'static str {
        match self {
            Tercile::Weak => "weak",
            Tercile::Moderate => "moderate",
            Tercile::Strong => "strong",
        }
    }
}

/// Cut points at the 33.3 and 66.7 percentiles (linear interpolation).
pub fn tercile_cuts(column: &[f64]) -> (f64, f64) {
    let mut s = column.to_vec();
    s.sort_by(f64::total_cmp);
    (quantile_sorted(&s, 1.0 / 3.0), quantile_sorted(&s, 2.0 / 3.0))
}

/// `≤ q1` weak, `≤ q2` moderate, otherwise strong. A constant column is all weak.
pub fn tercile(value: f64, cuts: (f64, f64)) -> Tercile {
    if value <= cuts.0 {
        Tercile::Weak
    } else if value <= cuts.1 {
        Tercile::Moderate
    } else {
        Tercile::Strong
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeeswarmRow {
    pub feature: String,
    pub sample: usize,
    pub shap_value: f64,
    pub feature_value: f64,
    pub tercile: Tercile,
}

/// Long-format rows for one class, feature-major.
pub fn beeswarm_export(x: &[Vec<f64>], shap: &ShapMatrix, class: usize, feature_names: &[String]) -> Vec<BeeswarmRow> {
    let mut rows = Vec::with_capacity(x.len() * shap.n_features);
    for (f, name) in feature_names.iter().enumerate().take(shap.n_features) {
        let col: Vec<f64> = x.iter().map(|r| r[f]).collect();
        let cuts = tercile_cuts(&col);
        for (s, r) in x.iter().enumerate() {
            rows.push(BeeswarmRow {
                feature: name.clone(),
                sample: s,
                shap_value: shap.get(s, class, f),
                feature_value: r[f],
                tercile: tercile(r[f], cuts),
            });
        }
    }
    rows
}

/// `sample_id,class,feature,shap_value,feature_value`.
pub fn write_shap_csv<W: Write>(
    mut w: W,
    sample_ids: &[String],
    x: &[Vec<f64>],
    shap: &ShapMatrix,
    feature_names: &[String],
) -> std::io::Result<()> {
    writeln!(w, "sample_id,class,feature,shap_value,feature_value")?;
    for (s, id) in sample_ids.iter().enumerate() {
        for k in 0..CLASS_COUNT {
            for (f, name) in feature_names.iter().enumerate() {
                writeln!(w, "{id},{k},{name},{},{}", format_float(shap.get(s, k, f)), format_float(x[s][f]))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::{generic_names, synthetic, train_gbt, GbtParams, FORMAT_VERSION};
    use crate::oracles;
    use proptest::prelude::*;

    fn stump() -> Tree<f64> {
        Tree {
            nodes: vec![
                TreeNode::Split { feature: 0, threshold: 0.5, left: 1, right: 2, cover: 4.0 },
                TreeNode::Leaf { value: -1.0, cover: 3.0 },
                TreeNode::Leaf { value: 2.0, cover: 1.0 },
            ],
        }
    }

    #[test]
    fn constant_tree_has_no_attribution() {
        let t = Tree::leaf(1.5, 10.0);
        assert_eq!(tree_shap_single(&t, &[0.3, 7.0], 2), vec![0.0, 0.0]);
        assert_eq!(tree_expected_value(&t), 1.5);
    }

    #[test]
    fn stump_closed_form() {
        let t = stump();
        let base = tree_expected_value(&t);
        assert_eq!(base, -0.25);
        let phi = tree_shap_single(&t, &[1.0, 9.0], 2);
        assert_eq!(phi, vec![2.0 - base, 0.0]);
        let phi = tree_shap_single(&t, &[0.0, 9.0], 2);
        assert_eq!(phi, vec![-1.0 - base, 0.0]);
    }

    #[test]
    fn repeated_feature_on_path() {
        let t = Tree {
            nodes: vec![
                TreeNode::Split { feature: 0, threshold: 0.5, left: 1, right: 2, cover: 10.0 },
                TreeNode::Split { feature: 0, threshold: 0.2, left: 3, right: 4, cover: 6.0 },
                TreeNode::Split { feature: 1, threshold: 0.5, left: 5, right: 6, cover: 4.0 },
                TreeNode::Leaf { value: 1.0, cover: 2.0 },
                TreeNode::Leaf { value: 3.0, cover: 4.0 },
                TreeNode::Leaf { value: -2.0, cover: 1.0 },
                TreeNode::Leaf { value: 5.0, cover: 3.0 },
            ],
        };
        for x in [[0.1, 0.0], [0.3, 0.9], [0.7, 0.1], [0.7, 0.9]] {
            let phi = tree_shap_single(&t, &x, 2);
            let want = oracles::shapley_by_coalitions(&t, &x, 2);
            for f in 0..2 {
                assert!((phi[f] - want[f]).abs() < 1e-12, "{x:?}: {phi:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn local_accuracy_on_trained_model() {
        let (x, y) = synthetic::blobs(90, 4);
        let m = train_gbt(&x, &y, &generic_names(2), &GbtParams { rounds: 20, ..Default::default() }).unwrap();
        let s = shap_matrix(&m, &x).unwrap();
        for (i, r) in x.iter().enumerate() {
            let margins = m.margins(r);
            for k in 0..CLASS_COUNT {
                assert!((s.reconstructed_margin(i, k) - margins[k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn missing_cover_is_an_error() {
        let mut t = stump();
        if let TreeNode::Leaf { cover, .. } = &mut t.nodes[2] {
            *cover = 0.0;
        }
        let m = GbtModel {
            format_version: FORMAT_VERSION,
            feature_names: generic_names(1),
            params: GbtParams::default(),
            base_score: 0.5,
            trees: vec![vec![stump(), stump(), t]],
        };
        assert!(matches!(tree_shap(&m, &[0.0]), Err(ExplainError::MissingCover { tree: 2, node: 2 })));
    }

    #[test]
    fn single_feature_model_ranks_first() {
        let (x, y) = synthetic::threshold_1d(120, 3, 2);
        // Move the informative column to index 3.
        let x: Vec<Vec<f64>> = x.iter().map(|r| vec![r[1], r[2], r[3], r[0]]).collect();
        let m = train_gbt(&x, &y, &generic_names(4), &GbtParams { rounds: 10, max_depth: 2, ..Default::default() }).unwrap();
        let used: std::collections::BTreeSet<usize> = m.trees.iter().flatten().flat_map(|t| t.features()).collect();
        assert_eq!(used.into_iter().collect::<Vec<_>>(), vec![3]);
        let imp = mean_abs_shap(&m, &x).unwrap();
        assert_eq!(imp.ranking[0], 3);
        for k in 0..CLASS_COUNT {
            assert!(imp.mean_abs[k][3] > 0.0);
            for f in 0..3 {
                assert_eq!(imp.mean_abs[k][f], 0.0);
            }
        }
        let mut out = Vec::new();
        imp.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("class,feature,mean_abs_shap,rank\n0,f0,0,2\n"));
        assert!(text.contains("\n0,f3,"));
    }

    #[test]
    fn terciles_and_beeswarm() {
        assert_eq!(tercile(5.0, tercile_cuts(&[5.0, 5.0, 5.0])), Tercile::Weak);
        let cuts = tercile_cuts(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        assert_eq!(cuts, (3.0, 5.0));
        assert_eq!(tercile(3.0, cuts), Tercile::Weak);
        assert_eq!(tercile(4.0, cuts), Tercile::Moderate);
        assert_eq!(tercile(6.0, cuts), Tercile::Strong);

        let (x, y) = synthetic::blobs(30, 1);
        let m = train_gbt(&x, &y, &generic_names(2), &GbtParams { rounds: 3, ..Default::default() }).unwrap();
        let s = shap_matrix(&m, &x[..1]).unwrap();
        assert_eq!(beeswarm_export(&x[..1], &s, 0, &generic_names(2)).len(), 2);
        let s = shap_matrix(&m, &x).unwrap();
        assert_eq!(beeswarm_export(&x, &s, 2, &generic_names(2)).len(), 60);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_coalition_oracle(seed in any::<u64>()) {
            let (tree, x) = oracles::random_shap_case(seed, 4, 3);
            let phi = tree_shap_single(&tree, &x, 4);
            let want = oracles::shapley_by_coalitions(&tree, &x, 4);
            let used: Vec<usize> = tree.features().collect();
            for f in 0..4 {
                prop_assert!((phi[f] - want[f]).abs() < 1e-9);
                if !used.contains(&f) {
                    prop_assert_eq!(phi[f], 0.0);
                }
            }
        }

        #[test]
        fn mirrored_duplicates_share_credit(seed in any::<u64>(), v in 0.0f64..1.0) {
            // Same tree once on feature 0 and once on feature 1, evaluated where x0 = x1.
            let (t, _) = oracles::random_shap_case(seed, 1, 3);
            let mut mirror = t.clone();
            for n in &mut mirror.nodes {
                if let TreeNode::Split { feature, .. } = n {
                    *feature = 1;
                }
            }
            let x = [v, v];
            let a = tree_shap_single(&t, &x, 2);
            let b = tree_shap_single(&mirror, &x, 2);
            let sum = [a[0] + b[0], a[1] + b[1]];
            prop_assert!((sum[0] - sum[1]).abs() < 1e-9);
        }

        #[test]
        fn ensemble_additivity(seed in any::<u64>()) {
            let (t1, x) = oracles::random_shap_case(seed, 4, 3);
            let (t2, _) = oracles::random_shap_case(seed ^ 0x5555, 4, 3);
            let m = GbtModel {
                format_version: FORMAT_VERSION,
                feature_names: generic_names(4),
                params: GbtParams { learning_rate: 0.7, ..Default::default() },
                base_score: 0.5,
                trees: vec![vec![t1.clone(), Tree::leaf(0.0, 1.0), Tree::leaf(0.0, 1.0)], vec![t2.clone(), Tree::leaf(0.0, 1.0), Tree::leaf(0.0, 1.0)]],
            };
            let (phi, base) = tree_shap(&m, &x).unwrap();
            let a = tree_shap_single(&t1, &x, 4);
            let b = tree_shap_single(&t2, &x, 4);
            for f in 0..4 {
                prop_assert!((phi[0][f] - 0.7 * (a[f] + b[f])).abs() < 1e-9);
                prop_assert_eq!(phi[1][f], 0.0);
            }
            prop_assert!((phi[0].iter().sum::<f64>() + base[0] - m.margins(&x)[0]).abs() < 1e-9);
        }
    }
}
