//! CART classification trees (Gini) and bagged random forests.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{grow, presort, GrowParams, Objective, Tree};
use super::{argmax, check_design, Classifier, MlError, CLASS_COUNT, FORMAT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CartParams {
    /// `None` grows until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams { max_depth: None, min_samples_split: 2, min_samples_leaf: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    pub tree: CartParams,
    /// Features tried per split; `None` means ⌊√p⌋.
    pub max_features: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_trees: 100, tree: CartParams::default(), max_features: None, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub format_version: u32,
    pub feature_names: Vec<String>,
    pub params: CartParams,
    /// Leaves hold class fractions.
    pub tree: Tree<[f64; CLASS_COUNT]>,
}

impl Classifier for DecisionTree {
    fn predict_proba(&self, x: &[f64]) -> [f64; CLASS_COUNT] {
        *self.tree.predict(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub format_version: u32,
    pub feature_names: Vec<String>,
    pub params: ForestParams,
    pub trees: Vec<Tree<[f64; CLASS_COUNT]>>,
}

impl Classifier for RandomForest {
    /// Fraction of trees voting for each class.
    fn predict_proba(&self, x: &[f64]) -> [f64; CLASS_COUNT] {
        let mut votes = [0.0; CLASS_COUNT];
        for t in &self.trees {
            votes[argmax(t.predict(x))] += 1.0;
        }
        let n = self.trees.len().max(1) as f64;
        votes.map(|v| v / n)
    }
}

struct Gini<'a> {
    y: &'a [usize],
    w: &'a [f64],
    min_samples_split: f64,
    min_samples_leaf: f64,
}

fn gini_score(c: &[f64; CLASS_COUNT]) -> f64 {
    let total: f64 = c.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    // −(weighted Gini impurity) = Σc²/W − W.
    c.iter().map(|v| v * v).sum::<f64>() / total - total
}

impl Objective for Gini<'_> {
    type Stats = [f64; CLASS_COUNT];
    type Leaf = [f64; CLASS_COUNT];

    fn row_stats(&self, row: usize) -> Self::Stats {
        let mut s = [0.0; CLASS_COUNT];
        s[self.y[row]] = self.w[row];
        s
    }
    fn add(acc: &mut Self::Stats, s: &Self::Stats) {
        for k in 0..CLASS_COUNT {
            acc[k] += s[k];
        }
    }
    fn sub(a: &Self::Stats, b: &Self::Stats) -> Self::Stats {
        let mut out = *a;
        for k in 0..CLASS_COUNT {
            out[k] -= b[k];
        }
        out
    }
    fn score(&self, s: &Self::Stats) -> f64 {
        gini_score(s)
    }
    fn cover(&self, s: &Self::Stats) -> f64 {
        s.iter().sum()
    }
    fn child_ok(&self, s: &Self::Stats) -> bool {
        s.iter().sum::<f64>() >= self.min_samples_leaf
    }
    fn splittable(&self, s: &Self::Stats) -> bool {
        let total: f64 = s.iter().sum();
        total >= self.min_samples_split && s.iter().filter(|&&v| v > 0.0).count() > 1
    }
    fn accept(&self, gain: f64) -> bool {
        gain > -1e-12
    }
    fn leaf(&self, s: &Self::Stats) -> Self::Leaf {
        let total: f64 = s.iter().sum();
        s.map(|v| v / total)
    }
}

fn fit_cart(
    x: &[Vec<f64>],
    y: &[usize],
    weights: &[f64],
    n_features: usize,
    params: &CartParams,
    features: &mut dyn FnMut() -> Vec<usize>,
) -> Tree<[f64; CLASS_COUNT]> {
    let rows: Vec<usize> = (0..x.len()).filter(|&i| weights[i] > 0.0).collect();
    let sorted = presort(x, &rows, n_features);
    let obj = Gini {
        y,
        w: weights,
        min_samples_split: params.min_samples_split as f64,
        min_samples_leaf: params.min_samples_leaf.max(1) as f64,
    };
    grow(&obj, x, sorted, &GrowParams { max_depth: params.max_depth }, features)
}

pub fn train_decision_tree(
    x: &[Vec<f64>],
    y: &[usize],
    feature_names: &[String],
    params: &CartParams,
) -> Result<DecisionTree, MlError> {
    let p = check_design(x, y, feature_names)?;
    let w = vec![1.0; x.len()];
    let mut all = || (0..p).collect();
    Ok(DecisionTree {
        format_version: FORMAT_VERSION,
        feature_names: feature_names.to_vec(),
        params: *params,
        tree: fit_cart(x, y, &w, p, params, &mut all),
    })
}

pub fn train_random_forest(
    x: &[Vec<f64>],
    y: &[usize],
    feature_names: &[String],
    params: &ForestParams,
) -> Result<RandomForest, MlError> {
    let p = check_design(x, y, feature_names)?;
    if params.n_trees == 0 {
        return Err(MlError::Params("n_trees must be at least 1".into()));
    }
    let m = params.max_features.unwrap_or(((p as f64).sqrt().floor() as usize).max(1)).clamp(1, p);
    let n = x.len();
    let trees = (0..params.n_trees)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(t as u64);
            let mut w = vec![0.0; n];
            for _ in 0..n {
                w[rng.gen_range(0..n)] += 1.0;
            }
            let mut pick = || {
                let mut f = sample(&mut rng, p, m).into_vec();
                f.sort_unstable();
                f
            };
            fit_cart(x, y, &w, p, &params.tree, &mut pick)
        })
        .collect();
    Ok(RandomForest { format_version: FORMAT_VERSION, feature_names: feature_names.to_vec(), params: *params, trees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::{fixtures, generic_names};

    #[test]
    fn single_class_is_one_leaf() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let y = vec![1; 8];
        let t = train_decision_tree(&x, &y, &generic_names(1), &CartParams::default()).unwrap();
        assert_eq!(t.tree.nodes.len(), 1);
        assert_eq!(t.predict_proba(&[3.0]), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn cart_fits_training_data() {
        let (x, y) = fixtures::blobs(120, 5);
        let t = train_decision_tree(&x, &y, &generic_names(2), &CartParams::default()).unwrap();
        t.tree.validate().unwrap();
        assert!(x.iter().zip(&y).all(|(r, &k)| t.predict(r) == k));
        let shallow = CartParams { max_depth: Some(1), ..Default::default() };
        let s = train_decision_tree(&x, &y, &generic_names(2), &shallow).unwrap();
        assert_eq!(s.tree.depth(), 1);
    }

    #[test]
    fn forest_votes() {
        let (x, y) = fixtures::blobs(150, 9);
        let params = ForestParams { n_trees: 25, seed: 4, ..Default::default() };
        let f = train_random_forest(&x, &y, &generic_names(2), &params).unwrap();
        for r in &x {
            let p = f.predict_proba(r);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for v in p {
                assert_eq!((v * 25.0).fract(), 0.0);
            }
        }
        let acc = x.iter().zip(&y).filter(|(r, &k)| f.predict(r) == k).count();
        assert!(acc >= 145, "{acc}");
        let again = train_random_forest(&x, &y, &generic_names(2), &params).unwrap();
        assert_eq!(serde_json::to_string(&f).unwrap(), serde_json::to_string(&again).unwrap());
    }
}
