//! Rank tests and correlations.
//!
//! All p-values are two-sided. [`mann_whitney_u`] reports U for its first
//! argument.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

/// Largest pooled sample size for which the exact U distribution is used.
pub const MWU_EXACT_MAX: usize = 16;
/// Largest sample size for which Spearman's p is computed by exact permutation.
pub const SPEARMAN_EXACT_MAX: usize = 9;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StatsError {
    #[error("need at least {needed} observations, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("samples have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
    #[error("exact method requested but the data contain ties")]
    TiesInExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    NormalApprox,
    TDistribution,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::NormalApprox => "normal_approx",
            Method::TDistribution => "t_distribution",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: Method,
    pub n1: usize,
    pub n2: usize,
    pub degenerate: bool,
}

/// Significance stars: `*` below 0.05, `**` below 0.01, `***` below 0.001.
pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

fn check_finite(xs: &[f64]) -> Result<(), StatsError> {
    match xs.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(StatsError::NonFinite(i)),
        None => Ok(()),
    }
}

/// 1-based midranks: tied values share the mean of the ranks they span.
pub fn midranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        let r = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

/// Sizes of the tie groups (only groups of two or more).
fn tie_groups(xs: &[f64]) -> Vec<usize> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let mut j = i + 1;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if j - i > 1 {
            out.push(j - i);
        }
        i = j;
    }
    out
}

fn normal_two_sided(z: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * n.sf(z.abs())).min(1.0)
}

// ---------------------------------------------------------------------------
// Mann–Whitney U

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MwuMethod {
    /// Exact when the pooled size is at most [`MWU_EXACT_MAX`] and there are no ties.
    #[default]
    Auto,
    Exact,
    Normal,
}

pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    mann_whitney_u_with(a, b, MwuMethod::Auto)
}

pub fn mann_whitney_u_with(a: &[f64], b: &[f64], method: MwuMethod) -> Result<TestResult, StatsError> {
    let (n1, n2) = (a.len(), b.len());
    if n1 == 0 || n2 == 0 {
        return Err(StatsError::TooFew { needed: 1, got: n1.min(n2) });
    }
    check_finite(a)?;
    check_finite(b)?;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n1f = n1 as f64;
    let n2f = n2 as f64;
    if pooled.iter().all(|&v| v == pooled[0]) {
        return Ok(TestResult {
            statistic: n1f * n2f / 2.0,
            p_value: 1.0,
            method: Method::NormalApprox,
            n1,
            n2,
            degenerate: true,
        });
    }
    let ranks = midranks(&pooled);
    let r1: f64 = ranks[..n1].iter().sum();
    let u = r1 - n1f * (n1f + 1.0) / 2.0;
    let ties = tie_groups(&pooled);
    let exact = match method {
        MwuMethod::Auto => ties.is_empty() && n1 + n2 <= MWU_EXACT_MAX,
        MwuMethod::Exact if !ties.is_empty() => return Err(StatsError::TiesInExact),
        MwuMethod::Exact => true,
        MwuMethod::Normal => false,
    };
    let (p_value, method) = if exact {
        (mwu_exact_p(n1, n2, u.round() as usize), Method::Exact)
    } else {
        let n = n1f + n2f;
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0));
        let var = n1f * n2f / 12.0 * ((n + 1.0) - tie_term);
        let mu = n1f * n2f / 2.0;
        let dev = ((u - mu).abs() - 0.5).max(0.0);
        (normal_two_sided(dev / var.sqrt()), Method::NormalApprox)
    };
    Ok(TestResult { statistic: u, p_value, method, n1, n2, degenerate: false })
}

/// Two-sided exact p for U = `u` under H0, via the recurrence
/// f(m, n, u) = f(m−1, n, u−n) + f(m, n−1, u).
fn mwu_exact_p(n1: usize, n2: usize, u: usize) -> f64 {
    let max_u = n1 * n2;
    // table[j][k] holds counts for (i, j) with U = k, built up over i.
    let mut prev: Vec<Vec<f64>> = (0..=n2).map(|_| vec![1.0]).collect();
    for i in 1..=n1 {
        let mut cur: Vec<Vec<f64>> = Vec::with_capacity(n2 + 1);
        cur.push(vec![1.0]);
        for j in 1..=n2 {
            let mut row = vec![0.0; i * j + 1];
            for (k, &c) in prev[j].iter().enumerate() {
                row[k + j] += c;
            }
            for (k, &c) in cur[j - 1].iter().enumerate() {
                row[k] += c;
            }
            cur.push(row);
        }
        prev = cur;
    }
    let dist = &prev[n2];
    debug_assert_eq!(dist.len(), max_u + 1);
    let total: f64 = dist.iter().sum();
    let lower: f64 = dist[..=u].iter().sum();
    let upper: f64 = dist[u..].iter().sum();
    (2.0 * lower.min(upper) / total).min(1.0)
}

// ---------------------------------------------------------------------------
// Correlations

fn check_pair(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFew { needed: 3, got: x.len() });
    }
    check_finite(x)?;
    check_finite(y)
}

fn correlation(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance("x"));
    }
    if syy == 0.0 {
        return Err(StatsError::ZeroVariance("y"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn t_test_p(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    check_pair(x, y)?;
    let r = correlation(x, y)?;
    Ok(TestResult {
        statistic: r,
        p_value: t_test_p(r, x.len()),
        method: Method::TDistribution,
        n1: x.len(),
        n2: y.len(),
        degenerate: false,
    })
}

/// Pearson on midranks. Exact permutation p for n ≤ [`SPEARMAN_EXACT_MAX`]
/// without ties, t approximation otherwise.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    check_pair(x, y)?;
    let rx = midranks(x);
    let ry = midranks(y);
    let rho = correlation(&rx, &ry)?;
    let n = x.len();
    let no_ties = tie_groups(x).is_empty() && tie_groups(y).is_empty();
    let (p_value, method) = if no_ties && n <= SPEARMAN_EXACT_MAX {
        let d: i64 = rx.iter().zip(&ry).map(|(a, b)| ((a - b) as i64).pow(2)).sum();
        (spearman_exact_p(n, d), Method::Exact)
    } else {
        (t_test_p(rho, n), Method::TDistribution)
    };
    Ok(TestResult { statistic: rho, p_value, method, n1: n, n2: n, degenerate: false })
}

/// P(|ρ| ≥ |ρ_obs|) over all n! rank permutations, with ρ_obs given by its
/// integer sum of squared rank differences `d`. Counts Σd² by dynamic
/// programming over the set of ranks already placed.
fn spearman_exact_p(n: usize, d: i64) -> f64 {
    let max_d = (n * (n * n - 1) / 3) as usize;
    let full = (1usize << n) - 1;
    let mut dp = vec![vec![0u64; max_d + 1]; full + 1];
    dp[0][0] = 1;
    for mask in 0..full {
        let pos = mask.count_ones() as i64;
        for s in 0..=max_d {
            let c = dp[mask][s];
            if c == 0 {
                continue;
            }
            for r in 0..n {
                if mask & (1 << r) == 0 {
                    let add = ((r as i64 - pos) * (r as i64 - pos)) as usize;
                    dp[mask | (1 << r)][s + add] += c;
                }
            }
        }
    }
    // |ρ| compares as |n(n²−1) − 6D|.
    let scale = (n * (n * n - 1)) as i64;
    let obs = (scale - 6 * d).abs();
    let dist = &dp[full];
    let total: u64 = dist.iter().sum();
    let hits: u64 = dist
        .iter()
        .enumerate()
        .filter(|(s, _)| (scale - 6 * *s as i64).abs() >= obs)
        .map(|(_, c)| c)
        .sum();
    hits as f64 / total as f64
}

/// Pair counts behind Kendall's τ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PairCounts {
    pub concordant: u64,
    pub discordant: u64,
    /// Pairs tied in x only.
    pub ties_x: u64,
    /// Pairs tied in y only.
    pub ties_y: u64,
    /// Pairs tied in both.
    pub ties_xy: u64,
}

/// Knight's O(n log n) pair classification.
pub fn kendall_pair_counts(x: &[f64], y: &[f64]) -> PairCounts {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));
    let choose2 = |t: u64| t * t.saturating_sub(1) / 2;

    let mut tied_x = 0u64;
    let mut tied_xy = 0u64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && x[idx[j]] == x[idx[i]] {
            j += 1;
        }
        tied_x += choose2((j - i) as u64);
        let mut k = i;
        while k < j {
            let mut l = k + 1;
            while l < j && y[idx[l]] == y[idx[k]] {
                l += 1;
            }
            tied_xy += choose2((l - k) as u64);
            k = l;
        }
        i = j;
    }

    let mut ys: Vec<f64> = idx.iter().map(|&k| y[k]).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut ys, &mut buf);

    let mut tied_y = 0u64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && ys[j] == ys[i] {
            j += 1;
        }
        tied_y += choose2((j - i) as u64);
        i = j;
    }

    let total = choose2(n as u64);
    let discordant = swaps;
    let concordant = total + tied_xy - tied_x - tied_y - discordant;
    PairCounts {
        concordant,
        discordant,
        ties_x: tied_x - tied_xy,
        ties_y: tied_y - tied_xy,
        ties_xy: tied_xy,
    }
}

/// Stable merge sort returning the number of strict inversions.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid], &mut buf[..mid]) + merge_count(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Kendall τ-b with a tie-corrected normal approximation for p.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    check_pair(x, y)?;
    let c = kendall_pair_counts(x, y);
    let n = x.len();
    let total = (n * (n - 1) / 2) as f64;
    let tx = (c.ties_x + c.ties_xy) as f64;
    let ty = (c.ties_y + c.ties_xy) as f64;
    if tx == total {
        return Err(StatsError::ZeroVariance("x"));
    }
    if ty == total {
        return Err(StatsError::ZeroVariance("y"));
    }
    let s = c.concordant as f64 - c.discordant as f64;
    let tau = (s / ((total - tx) * (total - ty)).sqrt()).clamp(-1.0, 1.0);

    let tie_sums = |v: &[f64]| {
        let g = tie_groups(v);
        let f = |h: fn(f64) -> f64| g.iter().map(|&t| h(t as f64)).sum::<f64>();
        (
            f(|t| t * (t - 1.0) / 2.0),
            f(|t| t * (t - 1.0) * (t - 2.0)),
            f(|t| t * (t - 1.0) * (2.0 * t + 5.0)),
        )
    };
    let (xtie, x0, x1) = tie_sums(x);
    let (ytie, y0, y1) = tie_sums(y);
    let nf = n as f64;
    let m = nf * (nf - 1.0);
    let var = (m * (2.0 * nf + 5.0) - x1 - y1) / 18.0 + 2.0 * xtie * ytie / m + x0 * y0 / (9.0 * m * (nf - 2.0));
    let p_value = if var > 0.0 { normal_two_sided(s / var.sqrt()) } else { 1.0 };
    Ok(TestResult { statistic: tau, p_value, method: Method::NormalApprox, n1: n, n2: n, degenerate: false })
}

// ---------------------------------------------------------------------------
// Column-wise group comparison

/// One row of a two-group feature comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub feature: String,
    pub statistic: f64,
    pub p_value: f64,
    pub stars: String,
    pub mean_a: f64,
    pub std_a: f64,
    pub mean_b: f64,
    pub std_b: f64,
    pub degenerate: bool,
}

/// Mean and sample standard deviation (0 for fewer than two values).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Mann–Whitney U per named column, group `a` first.
pub fn compare_columns<'a>(
    columns: impl IntoIterator<Item = (&'a str, Vec<f64>, Vec<f64>)>,
) -> Result<Vec<ComparisonRow>, StatsError> {
    columns
        .into_iter()
        .map(|(name, a, b)| {
            let t = mann_whitney_u(&a, &b)?;
            let (mean_a, std_a) = mean_std(&a);
            let (mean_b, std_b) = mean_std(&b);
            Ok(ComparisonRow {
                feature: name.to_string(),
                statistic: t.statistic,
                p_value: t.p_value,
                stars: stars(t.p_value).to_string(),
                mean_a,
                std_a,
                mean_b,
                std_b,
                degenerate: t.degenerate,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn mwu_examples() {
        let t = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.method, Method::Exact);
        assert!(close(t.p_value, 0.1, 1e-12));

        let a = [1.0, 2.0, 2.0, 5.0];
        let t = mann_whitney_u(&a, &a).unwrap();
        assert_eq!(t.statistic, 8.0);
        assert_eq!(t.method, Method::NormalApprox);

        let t = mann_whitney_u(&[3.0, 3.0], &[3.0; 5]).unwrap();
        assert!(t.degenerate);
        assert_eq!((t.statistic, t.p_value), (5.0, 1.0));
    }

    #[test]
    fn mwu_normal_matches_reference_values() {
        // scipy.stats.mannwhitneyu(..., method="asymptotic")
        let a = [1.0, 4.0, 2.0, 7.0, 7.0, 3.0, 9.0, 12.0, 6.0];
        let b = [5.0, 8.0, 10.0, 11.0, 14.0, 13.0, 15.0, 8.0, 16.0, 17.0];
        let t = mann_whitney_u_with(&a, &b, MwuMethod::Normal).unwrap();
        assert_eq!(t.statistic, 11.0);
        assert!(close(t.p_value, 0.006_187_687_152_073_793, 1e-12), "{}", t.p_value);
    }

    #[test]
    fn exact_requires_tie_free() {
        assert_eq!(
            mann_whitney_u_with(&[1.0, 2.0], &[2.0, 3.0], MwuMethod::Exact),
            Err(StatsError::TiesInExact)
        );
    }

    #[test]
    fn correlation_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!(close(pearson(&x, &x).unwrap().statistic, 1.0, 1e-15));
        assert!(close(pearson(&x, &neg).unwrap().statistic, -1.0, 1e-15));
        let cube: Vec<f64> = x.iter().map(|v| v * v * v).collect();
        assert_eq!(spearman(&x, &cube).unwrap().statistic, 1.0);
        assert_eq!(kendall_tau(&x, &x).unwrap().statistic, 1.0);
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap().statistic, -1.0);
        assert_eq!(pearson(&[1.0, 1.0, 1.0], &x[..3]), Err(StatsError::ZeroVariance("x")));
        assert!(matches!(pearson(&x, &x[..4]), Err(StatsError::LengthMismatch(5, 4))));
    }

    #[test]
    fn pearson_reference_p() {
        // scipy.stats.pearsonr
        let x = [2.0, 4.0, 5.0, 7.0, 9.0, 10.0, 11.0, 15.0];
        let y = [1.0, 3.0, 2.0, 6.0, 5.0, 9.0, 7.0, 8.0];
        let t = pearson(&x, &y).unwrap();
        assert!(close(t.statistic, 0.876_155_666_983_189, 1e-12), "{}", t.statistic);
        assert!(close(t.p_value, 0.004_318_487_491_282_414, 1e-9), "{}", t.p_value);
    }

    #[test]
    fn kendall_reference_with_ties() {
        // scipy.stats.kendalltau(method="asymptotic")
        let x = [12.0, 2.0, 1.0, 12.0, 2.0];
        let y = [1.0, 4.0, 7.0, 1.0, 0.0];
        let t = kendall_tau(&x, &y).unwrap();
        assert!(close(t.statistic, -0.471_404_520_791_031_7, 1e-12), "{}", t.statistic);
        assert!(close(t.p_value, 0.282_745_459_932_774_67, 1e-9), "{}", t.p_value);
    }

    #[test]
    fn spearman_exact_small() {
        // Perfect order with n = 4: only the identity and the reversal reach |ρ| = 1.
        let t = spearman(&[1.0, 2.0, 3.0, 4.0], &[10.0, 20.0, 30.0, 40.0]).unwrap();
        assert_eq!(t.method, Method::Exact);
        assert!(close(t.p_value, 2.0 / 24.0, 1e-15));
    }

    #[test]
    fn stars_thresholds() {
        assert_eq!(stars(0.0009), "***");
        assert_eq!(stars(0.001), "**");
        assert_eq!(stars(0.0099), "**");
        assert_eq!(stars(0.01), "*");
        assert_eq!(stars(0.05), "");
    }

    #[test]
    fn compare_flags_shift() {
        let a: Vec<f64> = (0..20).map(|i| i as f64 * 0.01).collect();
        let b: Vec<f64> = a.iter().map(|v| v + 5.0).collect();
        let rows = compare_columns([("Joy", a.clone(), b), ("Anger", a.clone(), a)]).unwrap();
        assert_eq!(rows[0].stars, "***");
        assert_eq!(rows[0].statistic, 0.0);
        assert!(rows[1].p_value > 0.9);
    }

    fn distinct(n: usize, seed: u64) -> Vec<f64> {
        oracles::permutation(n, seed).into_iter().map(|v| v as f64 * 1.5 - 3.0).collect()
    }

    proptest! {
        #[test]
        fn mwu_statistics_sum(a in prop::collection::vec(0u8..6, 1..12), b in prop::collection::vec(0u8..6, 1..12)) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let u_ab = mann_whitney_u(&a, &b).unwrap().statistic;
            let u_ba = mann_whitney_u(&b, &a).unwrap().statistic;
            prop_assert_eq!(u_ab + u_ba, (a.len() * b.len()) as f64);
            let p = mann_whitney_u(&a, &b).unwrap().p_value;
            prop_assert!((0.0..=1.0).contains(&p));
        }

        #[test]
        fn mwu_exact_matches_enumeration(n1 in 1usize..8, n2 in 1usize..8, seed in any::<u64>()) {
            let pooled = distinct(n1 + n2, seed);
            let (a, b) = pooled.split_at(n1);
            let t = mann_whitney_u_with(a, b, MwuMethod::Exact).unwrap();
            let (u, p) = oracles::mwu_enumerate(a, b);
            prop_assert_eq!(t.statistic, u);
            prop_assert!((t.p_value - p).abs() < 1e-12);
        }

        #[test]
        fn spearman_exact_matches_permutations(n in 3usize..8, s1 in any::<u64>(), s2 in any::<u64>()) {
            let x = distinct(n, s1);
            let y = distinct(n, s2);
            let t = spearman(&x, &y).unwrap();
            prop_assert!((t.p_value - oracles::spearman_permutation_p(&x, &y)).abs() < 1e-12);
        }

        #[test]
        fn kendall_matches_pairs(x in prop::collection::vec(0u8..5, 3..25), seed in any::<u64>()) {
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let y: Vec<f64> = oracles::permutation(x.len(), seed).into_iter().map(|v| (v % 4) as f64).collect();
            let c = kendall_pair_counts(&x, &y);
            let o = oracles::kendall_pairs(&x, &y);
            prop_assert_eq!((c.concordant, c.discordant, c.ties_x, c.ties_y, c.ties_xy), o);
        }

        #[test]
        fn correlations_invariant(x in prop::collection::vec(-50.0f64..50.0, 5..30), seed in any::<u64>(), scale in 0.5f64..4.0, shift in -10.0f64..10.0) {
            let y: Vec<f64> = oracles::permutation(x.len(), seed).into_iter().map(|v| v as f64).collect();
            prop_assume!(x.iter().any(|&v| v != x[0]));
            let x2: Vec<f64> = x.iter().map(|v| v * scale + shift).collect();
            let x3: Vec<f64> = x.iter().map(|v| v.exp().min(1e300) + v).collect();
            let p1 = pearson(&x, &y).unwrap().statistic;
            prop_assert!((p1 - pearson(&x2, &y).unwrap().statistic).abs() < 1e-12);
            let s1 = spearman(&x, &y).unwrap().statistic;
            prop_assert!((s1 - spearman(&x3, &y).unwrap().statistic).abs() < 1e-12);
            let k1 = kendall_tau(&x, &y).unwrap().statistic;
            prop_assert!((k1 - kendall_tau(&x3, &y).unwrap().statistic).abs() < 1e-12);
        }
    }
}
