//! Tree-family classifiers and cross-validated evaluation.
//!
//! Three learners share one exact greedy tree grower: softmax
//! gradient boosting ([`gbt`]), CART with Gini impurity and random forests
//! ([`forest`]). All predict over three creativity classes.

pub mod cv;
pub mod forest;
pub mod gbt;
pub mod metrics;
pub mod synthetic;
pub mod tree;

use serde::{Deserialize, Serialize};

pub use cv::{cross_validate, stratified_folds, CvReport, MeanStd};
pub use forest::{train_decision_tree, train_random_forest, CartParams, DecisionTree, ForestParams, RandomForest};
pub use gbt::{train_gbt, train_gbt_with_history, GbtModel, GbtParams};
pub use metrics::{confusion_matrix, roc_auc_ovr, ClassMetrics, ConfusionMatrix, FoldMetrics};
pub use tree::{Tree, TreeNode};

pub const CLASS_COUNT: usize = 3;
/// Version tag written into serialized models.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum MlError {
    #[error("empty design matrix")]
    Empty,
    #[error("{x} feature rows but {y} labels")]
    LengthMismatch { x: usize, y: usize },
    #[error("row {row} has {got} features, expected {expected}")]
    Ragged { row: usize, got: usize, expected: usize },
    #[error("{names} feature names for {columns} columns")]
    Names { names: usize, columns: usize },
    #[error("non-finite feature value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("label {label} at row {row} is outside 0..{CLASS_COUNT}")]
    Label { row: usize, label: usize },
    #[error("class {0} does not occur in the training labels")]
    MissingClass(usize),
    #[error("class {class} has {count} members, fewer than {k} folds; use a smaller k")]
    TooFewForFolds { class: usize, count: usize, k: usize },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("invalid model: {0}")]
    Model(String),
}

/// A fitted model producing class probabilities.
pub trait Classifier {
    fn predict_proba(&self, x: &[f64]) -> [f64; CLASS_COUNT];

    fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.predict_proba(x))
    }
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in v.iter().enumerate() {
        if p > v[best] {
            best = i;
        }
    }
    best
}

pub fn softmax(m: [f64; CLASS_COUNT]) -> [f64; CLASS_COUNT] {
    let top = m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e = m.map(|v| (v - top).exp());
    let s: f64 = e.iter().sum();
    e.map(|v| v / s)
}

/// `f0, f1, …` names for synthetic designs.
pub fn generic_names(p: usize) -> Vec<String> {
    (0..p).map(|i| format!("f{i}")).collect()
}

/// Validate shapes, labels and finiteness; returns the feature count.
pub(crate) fn check_design(x: &[Vec<f64>], y: &[usize], names: &[String]) -> Result<usize, MlError> {
    if x.is_empty() {
        return Err(MlError::Empty);
    }
    if x.len() != y.len() {
        return Err(MlError::LengthMismatch { x: x.len(), y: y.len() });
    }
    let p = x[0].len();
    if names.len() != p {
        return Err(MlError::Names { names: names.len(), columns: p });
    }
    for (row, r) in x.iter().enumerate() {
        if r.len() != p {
            return Err(MlError::Ragged { row, got: r.len(), expected: p });
        }
        if let Some(column) = r.iter().position(|v| !v.is_finite()) {
            return Err(MlError::NonFinite { row, column });
        }
    }
    if let Some(row) = y.iter().position(|&k| k >= CLASS_COUNT) {
        return Err(MlError::Label { row, label: y[row] });
    }
    Ok(p)
}

/// Learner choice plus its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Gbt(GbtParams),
    DecisionTree(CartParams),
    RandomForest(ForestParams),
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Gbt(GbtParams::default())
    }
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Gbt(_) => "gbt",
            ModelSpec::DecisionTree(_) => "decision_tree",
            ModelSpec::RandomForest(_) => "random_forest",
        }
    }

    pub fn fit(&self, x: &[Vec<f64>], y: &[usize], feature_names: &[String]) -> Result<Model, MlError> {
        Ok(match self {
            ModelSpec::Gbt(p) => Model::Gbt(train_gbt(x, y, feature_names, p)?),
            ModelSpec::DecisionTree(p) => Model::DecisionTree(train_decision_tree(x, y, feature_names, p)?),
            ModelSpec::RandomForest(p) => Model::RandomForest(train_random_forest(x, y, feature_names, p)?),
        })
    }
}

/// Any fitted learner, serialized with a `kind` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Gbt(GbtModel),
    DecisionTree(DecisionTree),
    RandomForest(RandomForest),
}

impl Model {
    pub fn feature_names(&self) -> &[String] {
        match self {
            Model::Gbt(m) => &m.feature_names,
            Model::DecisionTree(m) => &m.feature_names,
            Model::RandomForest(m) => &m.feature_names,
        }
    }

    pub fn as_gbt(&self) -> Option<&GbtModel> {
        match self {
            Model::Gbt(m) => Some(m),
            _ => None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, MlError> {
        let m: Model = serde_json::from_str(s).map_err(|e| MlError::Model(e.to_string()))?;
        let version = match &m {
            Model::Gbt(g) => {
                // Re-run the structural checks.
                GbtModel::from_json(&serde_json::to_string(g).expect("model serializes"))?;
                g.format_version
            }
            Model::DecisionTree(t) => {
                t.tree.validate().map_err(MlError::Model)?;
                t.format_version
            }
            Model::RandomForest(f) => {
                for t in &f.trees {
                    t.validate().map_err(MlError::Model)?;
                }
                f.format_version
            }
        };
        if version != FORMAT_VERSION {
            return Err(MlError::Model(format!("unsupported format_version {version}")));
        }
        Ok(m)
    }
}

impl Classifier for Model {
    fn predict_proba(&self, x: &[f64]) -> [f64; CLASS_COUNT] {
        match self {
            Model::Gbt(m) => m.predict_proba(x),
            Model::DecisionTree(m) => m.predict_proba(x),
            Model::RandomForest(m) => m.predict_proba(x),
        }
    }
}

#[cfg(test)]
pub(crate) use synthetic as fixtures;
