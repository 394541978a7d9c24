//! Gradient-boosted regression trees with a softmax objective.

use serde::{Deserialize, Serialize};

use super::tree::{grow, presort, GrowParams, Objective, Tree};
use super::{check_design, softmax, Classifier, MlError, CLASS_COUNT, FORMAT_VERSION};

/// Floor on per-row hessians.
const MIN_HESSIAN: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbtParams {
    pub rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub lambda_l2: f64,
    pub min_child_weight: f64,
    pub base_score: f64,
    /// Recorded for reproducibility; training itself has no random steps.
    pub seed: u64,
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams {
            rounds: 100,
            max_depth: 6,
            learning_rate: 0.3,
            lambda_l2: 1.0,
            min_child_weight: 1.0,
            base_score: 0.5,
            seed: 0,
        }
    }
}

impl GbtParams {
    pub fn validate(&self) -> Result<(), MlError> {
        let bad = |m: &str| Err(MlError::Params(m.to_string()));
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return bad("learning_rate must be positive");
        }
        if !(self.lambda_l2 >= 0.0) {
            return bad("lambda_l2 must be non-negative");
        }
        if !(self.min_child_weight >= 0.0) {
            return bad("min_child_weight must be non-negative");
        }
        if !self.base_score.is_finite() {
            return bad("base_score must be finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub format_version: u32,
    pub feature_names: Vec<String>,
    pub params: GbtParams,
    pub base_score: f64,
    /// `trees[round][class]`; leaf values are raw Newton weights.
    pub trees: Vec<Vec<Tree<f64>>>,
}

impl GbtModel {
    pub fn rounds(&self) -> usize {
        self.trees.len()
    }

    pub fn learning_rate(&self) -> f64 {
        self.params.learning_rate
    }

    /// Per-class raw scores before the softmax.
    pub fn margins(&self, x: &[f64]) -> [f64; CLASS_COUNT] {
        let lr = self.params.learning_rate;
        let mut m = [self.base_score; CLASS_COUNT];
        for round in &self.trees {
            for (k, tree) in round.iter().enumerate() {
                m[k] += lr * tree.predict(x);
            }
        }
        m
    }

    /// Trees of one class in boosting order.
    pub fn class_trees(&self, class: usize) -> impl Iterator<Item = &Tree<f64>> {
        self.trees.iter().map(move |r| &r[class])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, MlError> {
        let m: GbtModel = serde_json::from_str(s).map_err(|e| MlError::Model(e.to_string()))?;
        if m.format_version != FORMAT_VERSION {
            return Err(MlError::Model(format!("unsupported format_version {}", m.format_version)));
        }
        for (r, round) in m.trees.iter().enumerate() {
            if round.len() != CLASS_COUNT {
                return Err(MlError::Model(format!("round {r} has {} trees", round.len())));
            }
            for t in round {
                t.validate().map_err(|e| MlError::Model(format!("round {r}: {e}")))?;
            }
        }
        Ok(m)
    }
}

impl Classifier for GbtModel {
    fn predict_proba(&self, x: &[f64]) -> [f64; CLASS_COUNT] {
        softmax(self.margins(x))
    }
}

struct GradHess<'a> {
    g: &'a [f64],
    h: &'a [f64],
    lambda: f64,
    min_child_weight: f64,
}

impl Objective for GradHess<'_> {
    type Stats = (f64, f64);
    type Leaf = f64;

    fn row_stats(&self, row: usize) -> (f64, f64) {
        (self.g[row], self.h[row])
    }
    fn add(acc: &mut (f64, f64), s: &(f64, f64)) {
        acc.0 += s.0;
        acc.1 += s.1;
    }
    fn sub(a: &(f64, f64), b: &(f64, f64)) -> (f64, f64) {
        (a.0 - b.0, a.1 - b.1)
    }
    fn score(&self, s: &(f64, f64)) -> f64 {
        0.5 * s.0 * s.0 / (s.1 + self.lambda)
    }
    fn cover(&self, s: &(f64, f64)) -> f64 {
        s.1
    }
    fn child_ok(&self, s: &(f64, f64)) -> bool {
        s.1 >= self.min_child_weight
    }
    fn splittable(&self, _: &(f64, f64)) -> bool {
        true
    }
    fn accept(&self, gain: f64) -> bool {
        gain > 0.0
    }
    fn leaf(&self, s: &(f64, f64)) -> f64 {
        -s.0 / (s.1 + self.lambda)
    }
}

/// Mean multiclass log-loss of probability rows against labels.
pub fn log_loss(probs: &[[f64; CLASS_COUNT]], y: &[usize]) -> f64 {
    let total: f64 = probs.iter().zip(y).map(|(p, &k)| -p[k].max(1e-300).ln()).sum();
    total / y.len() as f64
}

/// Train and return the model with the training log-loss after each round
/// (entry 0 is the loss of the base score alone).
pub fn train_gbt_with_history(
    x: &[Vec<f64>],
    y: &[usize],
    feature_names: &[String],
    params: &GbtParams,
) -> Result<(GbtModel, Vec<f64>), MlError> {
    params.validate()?;
    let n_features = check_design(x, y, feature_names)?;
    let mut present = [false; CLASS_COUNT];
    for &k in y {
        present[k] = true;
    }
    if let Some(k) = present.iter().position(|p| !p) {
        return Err(MlError::MissingClass(k));
    }
    let n = x.len();
    let rows: Vec<usize> = (0..n).collect();
    let sorted = presort(x, &rows, n_features);
    let mut margins = vec![[params.base_score; CLASS_COUNT]; n];
    let mut probs: Vec<[f64; CLASS_COUNT]> = margins.iter().map(|m| softmax(*m)).collect();
    let mut history = vec![log_loss(&probs, y)];
    let mut trees = Vec::with_capacity(params.rounds);
    let grow_params = GrowParams { max_depth: Some(params.max_depth) };
    let mut g = vec![0.0; n];
    let mut h = vec![0.0; n];
    for _ in 0..params.rounds {
        let mut round = Vec::with_capacity(CLASS_COUNT);
        for k in 0..CLASS_COUNT {
            for i in 0..n {
                let p = probs[i][k];
                g[i] = p - if y[i] == k { 1.0 } else { 0.0 };
                h[i] = (2.0 * p * (1.0 - p)).max(MIN_HESSIAN);
            }
            let obj = GradHess { g: &g, h: &h, lambda: params.lambda_l2, min_child_weight: params.min_child_weight };
            let mut all = || (0..n_features).collect();
            round.push(grow(&obj, x, sorted.clone(), &grow_params, &mut all));
        }
        for (i, m) in margins.iter_mut().enumerate() {
            for (k, tree) in round.iter().enumerate() {
                m[k] += params.learning_rate * tree.predict(&x[i]);
            }
            probs[i] = softmax(*m);
        }
        history.push(log_loss(&probs, y));
        trees.push(round);
    }
    let model = GbtModel {
        format_version: FORMAT_VERSION,
        feature_names: feature_names.to_vec(),
        params: *params,
        base_score: params.base_score,
        trees,
    };
    Ok((model, history))
}

pub fn train_gbt(x: &[Vec<f64>], y: &[usize], feature_names: &[String], params: &GbtParams) -> Result<GbtModel, MlError> {
    train_gbt_with_history(x, y, feature_names, params).map(|(m, _)| m)
}
