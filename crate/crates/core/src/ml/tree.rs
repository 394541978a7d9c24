//! Binary decision trees stored as flat node arrays, and an exact greedy
//! grower shared by the boosted and CART learners.

use serde::{Deserialize, Serialize};

/// Tree node. Rows with `x[feature] < threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode<V> {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        cover: f64,
    },
    Leaf {
        value: V,
        cover: f64,
    },
}

impl<V> TreeNode<V> {
    pub fn cover(&self) -> f64 {
        match self {
            TreeNode::Split { cover, .. } | TreeNode::Leaf { cover, .. } => *cover,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }
}

/// A tree rooted at `nodes[0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree<V> {
    pub nodes: Vec<TreeNode<V>>,
}

impl<V> Tree<V> {
    pub fn leaf(value: V, cover: f64) -> Self {
        Tree { nodes: vec![TreeNode::Leaf { value, cover }] }
    }

    /// Index of the leaf reached by `x`.
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Leaf { .. } => return i,
                TreeNode::Split { feature, threshold, left, right, .. } => {
                    i = if x[*feature] < *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> &V {
        match &self.nodes[self.leaf_index(x)] {
            TreeNode::Leaf { value, .. } => value,
            TreeNode::Split { .. } => unreachable!(),
        }
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn go<V>(t: &Tree<V>, i: usize) -> usize {
            match &t.nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(t, *left).max(go(t, *right)),
            }
        }
        go(self, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    /// Features used by any split.
    pub fn features(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            TreeNode::Split { feature, .. } => Some(*feature),
            TreeNode::Leaf { .. } => None,
        })
    }

    /// Structural check: children indices in range, every non-root node
    /// referenced exactly once, covers additive and positive.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen = vec![0u8; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if !(n.cover() > 0.0) {
                return Err(format!("node {i} has non-positive cover"));
            }
            if let TreeNode::Split { left, right, cover, .. } = n {
                for &c in [left, right] {
                    if c >= self.nodes.len() || c == 0 {
                        return Err(format!("node {i} has invalid child {c}"));
                    }
                    seen[c] += 1;
                }
                let sum = self.nodes[*left].cover() + self.nodes[*right].cover();
                if (sum - cover).abs() > 1e-9 * cover.abs().max(1.0) {
                    return Err(format!("node {i} cover {cover} != children {sum}"));
                }
            }
        }
        if seen.iter().skip(1).any(|&s| s != 1) {
            return Err("node referenced zero or multiple times".into());
        }
        Ok(())
    }
}

/// Split criterion plugged into [`grow`].
pub(crate) trait Objective {
    type Stats: Copy + Default;
    type Leaf;

    fn row_stats(&self, row: usize) -> Self::Stats;
    fn add(acc: &mut Self::Stats, s: &Self::Stats);
    fn sub(a: &Self::Stats, b: &Self::Stats) -> Self::Stats;
    /// Node score; gain of a split = score(L) + score(R) − score(P).
    fn score(&self, s: &Self::Stats) -> f64;
    fn cover(&self, s: &Self::Stats) -> f64;
    fn child_ok(&self, s: &Self::Stats) -> bool;
    fn splittable(&self, s: &Self::Stats) -> bool;
    fn accept(&self, gain: f64) -> bool;
    fn leaf(&self, s: &Self::Stats) -> Self::Leaf;
}

pub(crate) struct GrowParams {
    pub max_depth: Option<usize>,
}

/// Per-feature row orderings, sorted by (value, row index).
pub(crate) fn presort(x: &[Vec<f64>], rows: &[usize], n_features: usize) -> Vec<Vec<usize>> {
    (0..n_features)
        .map(|f| {
            let mut r = rows.to_vec();
            r.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
            r
        })
        .collect()
}

/// Midpoint between two distinct sorted values, nudged so that `lo` goes
/// left and `hi` goes right.
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) / 2.0;
    if m > lo && m <= hi {
        m
    } else {
        hi
    }
}

struct Best {
    gain: f64,
    feature: usize,
    threshold: f64,
}

/// Exact greedy growth. `features` yields the candidate features for each
/// node (all of them, or a random subset for forests).
pub(crate) fn grow<O: Objective>(
    obj: &O,
    x: &[Vec<f64>],
    sorted: Vec<Vec<usize>>,
    params: &GrowParams,
    features: &mut dyn FnMut() -> Vec<usize>,
) -> Tree<O::Leaf> {
    let n_rows = x.len();
    let mut nodes: Vec<Option<TreeNode<O::Leaf>>> = vec![None];
    let mut go_left = vec![false; n_rows];
    build(obj, x, sorted, params, features, 0, 0, &mut nodes, &mut go_left);
    Tree { nodes: nodes.into_iter().map(|n| n.expect("every node is filled")).collect() }
}

#[allow(clippy::too_many_arguments)]
fn build<O: Objective>(
    obj: &O,
    x: &[Vec<f64>],
    sorted: Vec<Vec<usize>>,
    params: &GrowParams,
    features: &mut dyn FnMut() -> Vec<usize>,
    slot: usize,
    depth: usize,
    nodes: &mut Vec<Option<TreeNode<O::Leaf>>>,
    go_left: &mut [bool],
) -> f64 {
    let mut total = O::Stats::default();
    for &r in &sorted[0] {
        O::add(&mut total, &obj.row_stats(r));
    }
    let cover = obj.cover(&total);
    let depth_ok = params.max_depth.map_or(true, |d| depth < d);
    let best = if depth_ok && obj.splittable(&total) { find_split(obj, x, &sorted, &total, features) } else { None };
    let Some(best) = best else {
        nodes[slot] = Some(TreeNode::Leaf { value: obj.leaf(&total), cover });
        return cover;
    };

    for &r in &sorted[0] {
        go_left[r] = x[r][best.feature] < best.threshold;
    }
    let (mut left_lists, mut right_lists) = (Vec::with_capacity(sorted.len()), Vec::with_capacity(sorted.len()));
    for list in sorted {
        let (l, r): (Vec<usize>, Vec<usize>) = list.into_iter().partition(|&i| go_left[i]);
        left_lists.push(l);
        right_lists.push(r);
    }
    let left = nodes.len();
    let right = left + 1;
    nodes.push(None);
    nodes.push(None);
    let lc = build(obj, x, left_lists, params, features, left, depth + 1, nodes, go_left);
    let rc = build(obj, x, right_lists, params, features, right, depth + 1, nodes, go_left);
    let cover = lc + rc;
    nodes[slot] = Some(TreeNode::Split { feature: best.feature, threshold: best.threshold, left, right, cover });
    cover
}

fn find_split<O: Objective>(
    obj: &O,
    x: &[Vec<f64>],
    sorted: &[Vec<usize>],
    total: &O::Stats,
    features: &mut dyn FnMut() -> Vec<usize>,
) -> Option<Best> {
    let parent = obj.score(total);
    let mut best: Option<Best> = None;
    for f in features() {
        let list = &sorted[f];
        let mut left = O::Stats::default();
        for w in 0..list.len().saturating_sub(1) {
            O::add(&mut left, &obj.row_stats(list[w]));
            let (lo, hi) = (x[list[w]][f], x[list[w + 1]][f]);
            if lo == hi {
                continue;
            }
            let right = O::sub(total, &left);
            if !obj.child_ok(&left) || !obj.child_ok(&right) {
                continue;
            }
            let gain = obj.score(&left) + obj.score(&right) - parent;
            if obj.accept(gain) && best.as_ref().map_or(true, |b| gain > b.gain) {
                best = Some(Best { gain, feature: f, threshold: midpoint(lo, hi) });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_separates_adjacent_floats() {
        let lo = 1.0f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let m = midpoint(lo, hi);
        assert!(lo < m && m <= hi);
        assert!(!(hi < m) && lo < m);
        assert_eq!(midpoint(1.0, 3.0), 2.0);
    }

    #[test]
    fn validate_catches_bad_cover() {
        let t: Tree<f64> = Tree {
            nodes: vec![
                TreeNode::Split { feature: 0, threshold: 0.5, left: 1, right: 2, cover: 3.0 },
                TreeNode::Leaf { value: 0.0, cover: 1.0 },
                TreeNode::Leaf { value: 1.0, cover: 1.0 },
            ],
        };
        assert!(t.validate().is_err());
        assert_eq!(t.depth(), 1);
        assert_eq!(*t.predict(&[0.0]), 0.0);
        assert_eq!(*t.predict(&[0.5]), 1.0);
    }
}
