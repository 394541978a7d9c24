//! Global network features and the 13-column feature matrix.
//!
//! Metrics run on [`SimpleGraph`], an index-based adjacency view of a
//! [`Tfmn`] whose node indices follow the lexicographic lemma order.

use std::collections::VecDeque;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emotions::EmotionProfile;
use crate::tfmn::Tfmn;

pub const FEATURE_COUNT: usize = 13;

/// Column order of every feature vector and matrix.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "ASPL",
    "Clustering_coefficient",
    "Degree_centrality",
    "Diameter",
    "PageRank_centrality",
    "Anger",
    "Anticipation",
    "Disgust",
    "Fear",
    "Joy",
    "Sadness",
    "Surprise",
    "Trust",
];

/// Number of leading network columns in [`FEATURE_NAMES`].
pub const NETWORK_FEATURES: usize = 5;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("pagerank did not converge after {iterations} iterations (residual {residual:e})")]
    PageRankDiverged { iterations: usize, residual: f64 },
    #[error("damping must lie in (0, 1), got {0}")]
    BadDamping(f64),
    #[error("feature matrix header mismatch: {0}")]
    Header(String),
    #[error("row {row}, column `{column}`: {message}")]
    Cell {
        row: usize,
        column: String,
        message: String,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("empty feature matrix")]
    Empty,
}

/// Undirected simple graph on `0..n`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn with_nodes(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
        }
    }

    /// Build from an edge list; duplicates and self-loops are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::with_nodes(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a == b || self.adj[a].contains(&b) {
            return;
        }
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn from_tfmn(tfmn: &Tfmn) -> Self {
        let names: Vec<&str> = tfmn.nodes().map(|(n, _)| n).collect();
        let index = |name: &str| names.binary_search(&name).expect("edge endpoint is a node");
        let mut g = Self::with_nodes(names.len());
        for (a, b) in tfmn.edges() {
            g.add_edge(index(a), index(b));
        }
        g
    }

    /// BFS hop counts from `source`; `usize::MAX` marks unreachable nodes.
    pub fn bfs(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.node_count()];
        let mut out = Vec::new();
        for s in 0..self.node_count() {
            if seen[s] {
                continue;
            }
            let mut comp: Vec<usize> = self
                .bfs(s)
                .iter()
                .enumerate()
                .filter(|(_, &d)| d != usize::MAX)
                .map(|(v, _)| v)
                .collect();
            comp.sort_unstable();
            for &v in &comp {
                seen[v] = true;
            }
            out.push(comp);
        }
        out
    }

    /// Largest component; ties go to the lexicographically smallest node set.
    pub fn largest_component(&self) -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        for comp in self.components() {
            best = match best {
                None => Some(comp),
                Some(b) if comp.len() > b.len() || (comp.len() == b.len() && comp < b) => Some(comp),
                keep => keep,
            };
        }
        best.unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentMode {
    /// Path metrics on the largest connected component.
    #[default]
    Largest,
    /// Mean of the per-component values over components with at least 2 nodes.
    MeanOverComponents,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeMode {
    /// deg(v) / (n - 1).
    #[default]
    Normalized,
    /// Plain mean degree.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PageRankMode {
    #[default]
    Mean,
    Max,
    /// Population standard deviation.
    Std,
}

impl FromStr for PageRankMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(PageRankMode::Mean),
            "max" => Ok(PageRankMode::Max),
            "std" => Ok(PageRankMode::Std),
            other => Err(format!("unknown pagerank mode `{other}`")),
        }
    }
}

impl FromStr for ComponentMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "largest" | "lcc" => Ok(ComponentMode::Largest),
            "mean-over-components" => Ok(ComponentMode::MeanOverComponents),
            other => Err(format!("unknown component mode `{other}`")),
        }
    }
}

impl FromStr for DegreeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "normalized" => Ok(DegreeMode::Normalized),
            "raw" => Ok(DegreeMode::Raw),
            other => Err(format!("unknown degree mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PageRankParams {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tol: 1e-10,
            max_iter: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct NetFeatConfig {
    pub components: ComponentMode,
    pub degree: DegreeMode,
    pub pagerank_mode: PageRankMode,
    pub pagerank: PageRankParams,
}

/// (sum of pairwise distances, pair count, eccentricity max) within `nodes`.
fn path_stats(g: &SimpleGraph, nodes: &[usize]) -> (f64, usize, usize) {
    let mut total = 0usize;
    let mut pairs = 0usize;
    let mut diameter = 0usize;
    for &s in nodes {
        let dist = g.bfs(s);
        for &t in nodes {
            if t > s {
                total += dist[t];
                pairs += 1;
            }
            diameter = diameter.max(dist[t]);
        }
    }
    (total as f64, pairs, diameter)
}

fn per_component<F: Fn(&[usize]) -> f64>(g: &SimpleGraph, mode: ComponentMode, f: F) -> f64 {
    match mode {
        ComponentMode::Largest => {
            let lcc = g.largest_component();
            if lcc.len() < 2 {
                0.0
            } else {
                f(&lcc)
            }
        }
        ComponentMode::MeanOverComponents => {
            let values: Vec<f64> = g
                .components()
                .iter()
                .filter(|c| c.len() >= 2)
                .map(|c| f(c))
                .collect();
            if values.is_empty() {
                0.0
            } else {
                values.iter().sum::<f64>() / values.len() as f64
            }
        }
    }
}

/// Average shortest-path length over unordered node pairs.
pub fn aspl(g: &SimpleGraph, mode: ComponentMode) -> f64 {
    per_component(g, mode, |nodes| {
        let (total, pairs, _) = path_stats(g, nodes);
        total / pairs as f64
    })
}

/// Longest shortest path.
pub fn diameter(g: &SimpleGraph, mode: ComponentMode) -> f64 {
    per_component(g, mode, |nodes| path_stats(g, nodes).2 as f64)
}

/// Local clustering coefficient of `v`; 0 when deg(v) < 2.
pub fn local_clustering(g: &SimpleGraph, v: usize) -> f64 {
    let nbrs = g.neighbours(v);
    let k = nbrs.len();
    if k < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if g.neighbours(a).contains(&b) {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (k * (k - 1)) as f64
}

/// Mean local clustering over all nodes.
pub fn mean_clustering(g: &SimpleGraph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    (0..n).map(|v| local_clustering(g, v)).sum::<f64>() / n as f64
}

pub fn mean_degree_centrality(g: &SimpleGraph, mode: DegreeMode) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let mean_degree = 2.0 * g.edge_count() as f64 / n as f64;
    match mode {
        DegreeMode::Raw => mean_degree,
        DegreeMode::Normalized if n < 2 => 0.0,
        DegreeMode::Normalized => mean_degree / (n - 1) as f64,
    }
}

/// PageRank by power iteration. Isolated nodes spread their mass uniformly.
pub fn pagerank(g: &SimpleGraph, params: &PageRankParams) -> Result<Vec<f64>, FeatureError> {
    let d = params.damping;
    if !(d > 0.0 && d < 1.0) {
        return Err(FeatureError::BadDamping(d));
    }
    let n = g.node_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..params.max_iter {
        let dangling: f64 = (0..n).filter(|&v| g.degree(v) == 0).map(|v| rank[v]).sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        next.fill(base);
        for u in 0..n {
            let deg = g.degree(u);
            if deg > 0 {
                let share = d * rank[u] / deg as f64;
                for &v in g.neighbours(u) {
                    next[v] += share;
                }
            }
        }
        // Renormalize against rounding drift.
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        residual = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if residual < params.tol {
            return Ok(rank);
        }
    }
    Err(FeatureError::PageRankDiverged {
        iterations: params.max_iter,
        residual,
    })
}

/// Collapse a PageRank vector into one number; empty vectors give 0.
pub fn pagerank_feature(ranks: &[f64], mode: PageRankMode) -> f64 {
    if ranks.is_empty() {
        return 0.0;
    }
    let n = ranks.len() as f64;
    let mean = ranks.iter().sum::<f64>() / n;
    match mode {
        PageRankMode::Mean => mean,
        PageRankMode::Max => ranks.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        PageRankMode::Std => (ranks.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkFeatures {
    pub aspl: f64,
    pub diameter: f64,
    pub clustering: f64,
    pub degree_centrality: f64,
    pub pagerank_centrality: f64,
}

pub fn network_features(g: &SimpleGraph, cfg: &NetFeatConfig) -> Result<NetworkFeatures, FeatureError> {
    let ranks = pagerank(g, &cfg.pagerank)?;
    Ok(NetworkFeatures {
        aspl: aspl(g, cfg.components),
        diameter: diameter(g, cfg.components),
        clustering: mean_clustering(g),
        degree_centrality: mean_degree_centrality(g, cfg.degree),
        pagerank_centrality: pagerank_feature(&ranks, cfg.pagerank_mode),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub story_id: String,
    pub values: [f64; FEATURE_COUNT],
}

impl FeatureVector {
    pub fn from_parts(story_id: &str, net: &NetworkFeatures, profile: &EmotionProfile) -> Self {
        let mut values = [0.0; FEATURE_COUNT];
        values[0] = net.aspl;
        values[1] = net.clustering;
        values[2] = net.degree_centrality;
        values[3] = net.diameter;
        values[4] = net.pagerank_centrality;
        values[NETWORK_FEATURES..].copy_from_slice(&profile.z);
        Self {
            story_id: story_id.to_string(),
            values,
        }
    }
}

/// Raw (unscaled) feature vector of one story.
pub fn featurize(
    story_id: &str,
    tfmn: &Tfmn,
    profile: &EmotionProfile,
    cfg: &NetFeatConfig,
) -> Result<FeatureVector, FeatureError> {
    let g = SimpleGraph::from_tfmn(tfmn);
    let net = network_features(&g, cfg)?;
    Ok(FeatureVector::from_parts(story_id, &net, profile))
}

/// Per-column (min, max) fitted on a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl ScalingParams {
    pub fn fit(rows: &[[f64; FEATURE_COUNT]]) -> Self {
        let mut min = vec![f64::INFINITY; FEATURE_COUNT];
        let mut max = vec![f64::NEG_INFINITY; FEATURE_COUNT];
        for row in rows {
            for (j, &x) in row.iter().enumerate() {
                min[j] = min[j].min(x);
                max[j] = max[j].max(x);
            }
        }
        Self { min, max }
    }

    pub fn scale(&self, row: &[f64; FEATURE_COUNT]) -> [f64; FEATURE_COUNT] {
        let mut out = [0.0; FEATURE_COUNT];
        for j in 0..FEATURE_COUNT {
            let range = self.max[j] - self.min[j];
            out[j] = if range > 0.0 {
                (row[j] - self.min[j]) / range
            } else {
                0.0
            };
        }
        out
    }

    pub fn unscale(&self, row: &[f64; FEATURE_COUNT]) -> [f64; FEATURE_COUNT] {
        let mut out = [0.0; FEATURE_COUNT];
        for j in 0..FEATURE_COUNT {
            out[j] = row[j] * (self.max[j] - self.min[j]) + self.min[j];
        }
        out
    }
}

/// Min-max scale the rows, fitting parameters first when none are given.
pub fn minmax_scale(
    rows: &[[f64; FEATURE_COUNT]],
    params: Option<&ScalingParams>,
) -> (Vec<[f64; FEATURE_COUNT]>, ScalingParams) {
    let params = params.cloned().unwrap_or_else(|| ScalingParams::fit(rows));
    (rows.iter().map(|r| params.scale(r)).collect(), params)
}

/// Stories × 13 features, keyed by story id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub story_ids: Vec<String>,
    pub rows: Vec<[f64; FEATURE_COUNT]>,
}

impl FeatureMatrix {
    pub fn from_vectors(vectors: Vec<FeatureVector>) -> Self {
        let mut m = Self::default();
        for v in vectors {
            m.story_ids.push(v.story_id);
            m.rows.push(v.values);
        }
        m
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn row_of(&self, story_id: &str) -> Option<&[f64; FEATURE_COUNT]> {
        self.story_ids
            .iter()
            .position(|s| s == story_id)
            .map(|i| &self.rows[i])
    }

    pub fn scaled(&self, params: Option<&ScalingParams>) -> (FeatureMatrix, ScalingParams) {
        let (rows, params) = minmax_scale(&self.rows, params);
        (
            FeatureMatrix {
                story_ids: self.story_ids.clone(),
                rows,
            },
            params,
        )
    }

    /// CSV with a `story_id` column followed by [`FEATURE_NAMES`].
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), FeatureError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["story_id"];
        header.extend(FEATURE_NAMES);
        w.write_record(&header)?;
        for (id, row) in self.story_ids.iter().zip(&self.rows) {
            let mut rec = vec![id.clone()];
            rec.extend(row.iter().map(|x| format_float(*x)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, FeatureError> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        let got: Vec<&str> = header.iter().collect();
        let mut expected = vec!["story_id"];
        expected.extend(FEATURE_NAMES);
        if got != expected {
            return Err(FeatureError::Header(format!(
                "expected `{}`, found `{}`",
                expected.join(","),
                got.join(",")
            )));
        }
        let mut m = Self::default();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let mut row = [0.0f64; FEATURE_COUNT];
            for (j, slot) in row.iter_mut().enumerate() {
                let cell = &rec[j + 1];
                *slot = cell.parse().map_err(|_| FeatureError::Cell {
                    row: i + 2,
                    column: FEATURE_NAMES[j].to_string(),
                    message: format!("`{cell}` is not a number"),
                })?;
                if !slot.is_finite() {
                    return Err(FeatureError::Cell {
                        row: i + 2,
                        column: FEATURE_NAMES[j].to_string(),
                        message: "non-finite value".into(),
                    });
                }
            }
            m.story_ids.push(rec[0].to_string());
            m.rows.push(row);
        }
        Ok(m)
    }
}

/// Shortest representation that parses back to the same f64.
pub fn format_float(x: f64) -> String {
    let s = format!("{x}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Column summary in the mean / std / quartile layout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnSummary {
    pub mean: f64,
    /// Sample standard deviation.
    pub std: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn summarize_column(values: &[f64]) -> ColumnSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    ColumnSummary {
        mean,
        std,
        q25: quantile_sorted(&sorted, 0.25),
        q50: quantile_sorted(&sorted, 0.5),
        q75: quantile_sorted(&sorted, 0.75),
    }
}

/// Summary table (rows mean, std, 25%, 50%, 75%) as CSV.
pub fn write_summary_csv<W: Write>(m: &FeatureMatrix, writer: W) -> Result<(), FeatureError> {
    if m.is_empty() {
        return Err(FeatureError::Empty);
    }
    let summaries: Vec<ColumnSummary> = (0..FEATURE_COUNT).map(|j| summarize_column(&m.column(j))).collect();
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["stat"];
    header.extend(FEATURE_NAMES);
    w.write_record(&header)?;
    let rows: [(&str, fn(&ColumnSummary) -> f64); 5] = [
        ("mean", |s| s.mean),
        ("std", |s| s.std),
        ("25%", |s| s.q25),
        ("50%", |s| s.q50),
        ("75%", |s| s.q75),
    ];
    for (name, get) in rows {
        let mut rec = vec![name.to_string()];
        rec.extend(summaries.iter().map(|s| format!("{:.6}", get(s))));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles;

    fn complete(n: usize) -> SimpleGraph {
        let mut g = SimpleGraph::with_nodes(n);
        for a in 0..n {
            for b in a + 1..n {
                g.add_edge(a, b);
            }
        }
        g
    }

    fn path(n: usize) -> SimpleGraph {
        SimpleGraph::from_edges(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
    }

    fn cycle(n: usize) -> SimpleGraph {
        SimpleGraph::from_edges(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    fn star(leaves: usize) -> SimpleGraph {
        SimpleGraph::from_edges(leaves + 1, &(1..=leaves).map(|i| (0, i)).collect::<Vec<_>>())
    }

    const LCC: ComponentMode = ComponentMode::Largest;

    #[test]
    fn aspl_examples() {
        assert_eq!(aspl(&complete(3), LCC), 1.0);
        assert!((aspl(&path(3), LCC) - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(aspl(&SimpleGraph::with_nodes(1), LCC), 0.0);
        assert_eq!(aspl(&SimpleGraph::default(), LCC), 0.0);
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter(&complete(5), LCC), 1.0);
        assert_eq!(diameter(&path(5), LCC), 4.0);
        assert_eq!(diameter(&cycle(6), LCC), 3.0);
    }

    #[test]
    fn clustering_examples() {
        assert_eq!(mean_clustering(&complete(3)), 1.0);
        assert_eq!(mean_clustering(&star(3)), 0.0);
        // K4 minus edge (2,3)
        let g = SimpleGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        assert!((mean_clustering(&g) - 5.0 / 6.0).abs() < 1e-15);
        assert!((mean_clustering(&g) - oracles::mean_clustering_bruteforce(&oracles::adjacency(&g))).abs() < 1e-15);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(mean_degree_centrality(&complete(6), DegreeMode::Normalized), 1.0);
        assert_eq!(mean_degree_centrality(&star(3), DegreeMode::Normalized), 0.5);
        assert_eq!(mean_degree_centrality(&SimpleGraph::with_nodes(3), DegreeMode::Normalized), 0.0);
        assert_eq!(mean_degree_centrality(&star(3), DegreeMode::Raw), 1.5);
    }

    #[test]
    fn pagerank_examples() {
        let p = PageRankParams::default();
        let r = pagerank(&cycle(4), &p).unwrap();
        assert!(r.iter().all(|x| (x - 0.25).abs() < 1e-12));
        assert!(pagerank_feature(&r, PageRankMode::Std) < 1e-12);

        let s = pagerank(&star(3), &p).unwrap();
        let dense = oracles::pagerank_dense(&oracles::adjacency(&star(3)), 0.85);
        for (a, b) in s.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((pagerank_feature(&s, PageRankMode::Max) - dense[0]).abs() < 1e-9);
        assert!((pagerank_feature(&s, PageRankMode::Mean) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pagerank_isolated_nodes_and_errors() {
        let g = SimpleGraph::from_edges(3, &[(0, 1)]);
        let r = pagerank(&g, &PageRankParams::default()).unwrap();
        assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let dense = oracles::pagerank_dense(&oracles::adjacency(&g), 0.85);
        for (a, b) in r.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(matches!(
            pagerank(&g, &PageRankParams { damping: 1.0, ..Default::default() }),
            Err(FeatureError::BadDamping(_))
        ));
        let stubborn = PageRankParams {
            tol: 0.0,
            max_iter: 3,
            ..Default::default()
        };
        assert!(matches!(
            pagerank(&path(4), &stubborn),
            Err(FeatureError::PageRankDiverged { iterations: 3, .. })
        ));
    }

    #[test]
    fn largest_component_tie_break() {
        // {0,1} and {2,3}: equal size, pick {0,1}
        let g = SimpleGraph::from_edges(5, &[(2, 3), (0, 1)]);
        assert_eq!(g.largest_component(), vec![0, 1]);
        // path of 3 plus an edge: path wins on size
        let g = SimpleGraph::from_edges(5, &[(0, 4), (1, 2), (2, 3)]);
        assert_eq!(g.largest_component(), vec![1, 2, 3]);
        assert!((aspl(&g, LCC) - 4.0 / 3.0).abs() < 1e-15);
        assert!((aspl(&g, ComponentMode::MeanOverComponents) - (4.0 / 3.0 + 1.0) / 2.0).abs() < 1e-15);
        assert_eq!(diameter(&g, ComponentMode::MeanOverComponents), 1.5);
    }

    #[test]
    fn triangle_feature_vector() {
        let mut t = Tfmn::new();
        t.add_edge("a", "b");
        t.add_edge("b", "c");
        t.add_edge("a", "c");
        let f = featurize("s", &t, &EmotionProfile { low_coverage: false, ..EmotionProfile::zero() }, &NetFeatConfig::default()).unwrap();
        let mut expected = [0.0; FEATURE_COUNT];
        expected[..5].copy_from_slice(&[1.0, 1.0, 1.0, 1.0, 1.0 / 3.0]);
        for (a, b) in f.values.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_graph_vector() {
        let mut profile = EmotionProfile::zero();
        profile.z[4] = 2.5;
        let f = featurize("s", &Tfmn::new(), &profile, &NetFeatConfig::default()).unwrap();
        assert_eq!(&f.values[..5], &[0.0; 5]);
        assert_eq!(f.values[9], 2.5);
        assert_eq!(FEATURE_NAMES[9], "Joy");
    }

    #[test]
    fn scaling_examples() {
        let mut rows = vec![[0.0; FEATURE_COUNT]; 3];
        for (i, r) in rows.iter_mut().enumerate() {
            r[0] = 2.0 + 2.0 * i as f64;
            r[1] = 7.0;
            r[2] = -(i as f64);
        }
        let (scaled, params) = minmax_scale(&rows, None);
        assert_eq!(scaled.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
        assert!(scaled.iter().all(|r| r[1] == 0.0));
        let (again, _) = minmax_scale(&rows, Some(&params));
        assert_eq!(again, scaled);
        for j in [0, 2] {
            let col: Vec<f64> = again.iter().map(|r| r[j]).collect();
            assert_eq!(col.iter().copied().fold(f64::INFINITY, f64::min), 0.0);
            assert_eq!(col.iter().copied().fold(f64::NEG_INFINITY, f64::max), 1.0);
        }
    }

    #[test]
    fn matrix_csv_round_trip_and_header_check() {
        let m = FeatureMatrix {
            story_ids: vec!["a".into(), "b,c".into()],
            rows: vec![[0.1; FEATURE_COUNT], [1.0 / 3.0; FEATURE_COUNT]],
        };
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert_eq!(FeatureMatrix::read_csv(buf.as_slice()).unwrap(), m);
        let text = String::from_utf8(buf).unwrap().replace("Joy", "Glee");
        assert!(matches!(FeatureMatrix::read_csv(text.as_bytes()), Err(FeatureError::Header(_))));
    }

    #[test]
    fn summary_quartiles() {
        let s = summarize_column(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert_eq!(s.q25, 1.75);
        assert_eq!(s.q50, 2.5);
        assert_eq!(s.q75, 3.25);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn metrics_match_oracles(g in oracles::arb_graph(20)) {
                let adj = oracles::adjacency(&g);
                let (o_aspl, o_diam) = oracles::lcc_path_metrics(&adj);
                prop_assert!((aspl(&g, LCC) - o_aspl).abs() < 1e-9);
                prop_assert!((diameter(&g, LCC) - o_diam).abs() < 1e-9);
                prop_assert!((mean_clustering(&g) - oracles::mean_clustering_bruteforce(&adj)).abs() < 1e-9);
                prop_assert!((mean_degree_centrality(&g, DegreeMode::Normalized) - oracles::mean_degree_centrality(&adj)).abs() < 1e-9);
                let r = pagerank(&g, &PageRankParams::default()).unwrap();
                let dense = oracles::pagerank_dense(&adj, 0.85);
                for (a, b) in r.iter().zip(&dense) {
                    prop_assert!((a - b).abs() < 1e-9);
                    prop_assert!(*a >= 0.0);
                }
                if !r.is_empty() {
                    prop_assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                }
                if g.largest_component().len() >= 2 {
                    prop_assert!(aspl(&g, LCC) <= diameter(&g, LCC));
                }
            }

            #[test]
            fn metrics_invariant_under_relabeling(g in oracles::arb_graph(15), seed in any::<u64>()) {
                let n = g.node_count();
                let perm = oracles::permutation(n, seed);
                let mut h = SimpleGraph::with_nodes(n);
                for a in 0..n {
                    for &b in g.neighbours(a) {
                        h.add_edge(perm[a], perm[b]);
                    }
                }
                // LCC tie-breaking depends on labels, so compare on a
                // component-order-free quantity when sizes tie.
                let cfg = NetFeatConfig { components: ComponentMode::MeanOverComponents, ..Default::default() };
                let a = network_features(&g, &cfg).unwrap();
                let b = network_features(&h, &cfg).unwrap();
                prop_assert!((a.aspl - b.aspl).abs() < 1e-12);
                prop_assert!((a.diameter - b.diameter).abs() < 1e-12);
                prop_assert!((a.clustering - b.clustering).abs() < 1e-12);
                prop_assert!((a.degree_centrality - b.degree_centrality).abs() < 1e-12);
                prop_assert!((a.pagerank_centrality - b.pagerank_centrality).abs() < 1e-12);
                let ra = pagerank(&g, &PageRankParams::default()).unwrap();
                let rb = pagerank(&h, &PageRankParams::default()).unwrap();
                for v in 0..n {
                    prop_assert!((ra[v] - rb[perm[v]]).abs() < 1e-9);
                }
            }

            #[test]
            fn unscale_recovers_inputs(rows in prop::collection::vec(prop::array::uniform13(-100f64..100.0), 2..20)) {
                let (scaled, params) = minmax_scale(&rows, None);
                for (orig, s) in rows.iter().zip(&scaled) {
                    let back = params.unscale(s);
                    for j in 0..FEATURE_COUNT {
                        if params.max[j] > params.min[j] {
                            prop_assert!((back[j] - orig[j]).abs() < 1e-12);
                        }
                        prop_assert!((0.0..=1.0).contains(&s[j]));
                    }
                }
            }
        }
    }
}
