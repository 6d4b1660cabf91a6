//! Descriptive statistics, per-function ranking, rank aggregation, the
//! Friedman statistic and the Wilcoxon matched-pairs signed-rank test.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Mean and sample standard deviation (divisor `n - 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

/// Recorded in results metadata next to every standard deviation.
pub const STD_KIND: &str = "sample";

pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::Usage("cannot summarize an empty sample".into()));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(Summary { mean, std, n })
}

/// Average ranks (1-based) of `keys`, smallest first. Exactly equal keys
/// share the mean of the positions they occupy.
fn average_ranks(keys: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    let mut ranks = vec![0.0; keys.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && keys[order[end]] == keys[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end share their average.
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    ranks
}

fn rank_keys(keys: &[Option<f64>]) -> Vec<f64> {
    let present: Vec<usize> = (0..keys.len()).filter(|&i| keys[i].is_some()).collect();
    let missing: Vec<usize> = (0..keys.len()).filter(|&i| keys[i].is_none()).collect();
    let mut ranks = vec![0.0; keys.len()];
    let present_keys: Vec<f64> = present.iter().map(|&i| keys[i].unwrap()).collect();
    for (slot, r) in present.iter().zip(average_ranks(&present_keys)) {
        ranks[*slot] = r;
    }
    // Missing cells tie with each other after every present cell.
    let shared = present.len() as f64 + (missing.len() as f64 + 1.0) / 2.0;
    for i in missing {
        ranks[i] = shared;
    }
    ranks
}

/// Ranks one function's per-algorithm means; rank 1 is the best.
///
/// `None` marks a missing cell, which ranks after all present ones.
pub fn rank_row(means: &[Option<f64>], minimize: bool) -> Vec<f64> {
    let keys: Vec<Option<f64>> = means
        .iter()
        .map(|m| m.map(|v| if minimize { v } else { -v }))
        .collect();
    rank_keys(&keys)
}

/// Ranks means by their distance to the function's optimum value, closest
/// first. Identical to [`rank_row`] whenever no mean lies below `f_min`.
pub fn rank_row_by_gap(means: &[Option<f64>], f_min: f64) -> Vec<f64> {
    let keys: Vec<Option<f64>> = means.iter().map(|m| m.map(|v| (v - f_min).abs())).collect();
    rank_keys(&keys)
}

/// Benchmark block a function id belongs to, for subtotals.
pub fn function_group(id: &str) -> Option<&'static str> {
    let upper = id.trim().to_ascii_uppercase();
    if let Some(n) = upper.strip_prefix("CEC").and_then(|s| s.parse::<u32>().ok()) {
        return (1..=10).contains(&n).then_some("CEC01-CEC10");
    }
    match upper.strip_prefix('F').and_then(|s| s.parse::<u32>().ok()) {
        Some(1..=7) => Some("F1-F7"),
        Some(8..=23) => Some("F8-F23"),
        _ => None,
    }
}

const GROUP_ORDER: [&str; 3] = ["F1-F7", "F8-F23", "CEC01-CEC10"];

/// Per-function ranks of `k` algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub algorithms: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupRanks {
    pub name: String,
    pub n_functions: usize,
    pub totals: Vec<f64>,
    pub averages: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankSummary {
    pub n_functions: usize,
    pub totals: Vec<f64>,
    pub averages: Vec<f64>,
    /// Subtotals for the benchmark blocks present in the table, in
    /// F1-F7, F8-F23, CEC01-CEC10 order.
    pub groups: Vec<GroupRanks>,
}

impl RankTable {
    pub fn new(algorithms: Vec<String>) -> Self {
        RankTable {
            algorithms,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, function: impl Into<String>, ranks: Vec<f64>) {
        assert_eq!(ranks.len(), self.algorithms.len(), "one rank per algorithm");
        self.rows.push((function.into(), ranks));
    }

    pub fn ranks_of(&self, function: &str) -> Option<&[f64]> {
        self.rows
            .iter()
            .find(|(f, _)| f == function)
            .map(|(_, r)| r.as_slice())
    }

    /// Column sums and means, overall and per benchmark block.
    pub fn aggregate(&self) -> RankSummary {
        let (totals, averages) = column_stats(self.rows.iter().map(|(_, r)| r), self.algorithms.len());
        let mut by_group: BTreeMap<&str, Vec<&Vec<f64>>> = BTreeMap::new();
        for (f, r) in &self.rows {
            if let Some(g) = function_group(f) {
                by_group.entry(g).or_default().push(r);
            }
        }
        let groups = GROUP_ORDER
            .iter()
            .filter_map(|g| by_group.get(g).map(|rows| (g, rows)))
            .map(|(g, rows)| {
                let (totals, averages) = column_stats(rows.iter().copied(), self.algorithms.len());
                GroupRanks {
                    name: g.to_string(),
                    n_functions: rows.len(),
                    totals,
                    averages,
                }
            })
            .collect();
        RankSummary {
            n_functions: self.rows.len(),
            totals,
            averages,
            groups,
        }
    }
}

fn column_stats<'a>(rows: impl Iterator<Item = &'a Vec<f64>>, k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut totals = vec![0.0; k];
    let mut n = 0usize;
    for r in rows {
        for (t, v) in totals.iter_mut().zip(r) {
            *t += v;
        }
        n += 1;
    }
    let averages = totals
        .iter()
        .map(|t| if n == 0 { 0.0 } else { t / n as f64 })
        .collect();
    (totals, averages)
}

/// Friedman's chi-square from per-algorithm rank sums over `n_functions`
/// problems: `12 / (N k (k+1)) * sum(R_j^2) - 3 N (k+1)`.
pub fn friedman_statistic(totals: &[f64], n_functions: usize, k: usize) -> f64 {
    let n = n_functions as f64;
    let kf = k as f64;
    let sum_sq: f64 = totals.iter().map(|r| r * r).sum();
    12.0 / (n * kf * (kf + 1.0)) * sum_sq - 3.0 * n * (kf + 1.0)
}

/// Upper-tail p-value of the Friedman statistic against chi-square with
/// `k - 1` degrees of freedom.
pub fn friedman_p_value(statistic: f64, k: usize) -> f64 {
    if k < 2 {
        return 1.0;
    }
    let dist = ChiSquared::new((k - 1) as f64).expect("positive degrees of freedom");
    (1.0 - dist.cdf(statistic.max(0.0))).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WilcoxonMethod {
    Exact,
    NormalApprox,
    Degenerate,
}

impl WilcoxonMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            WilcoxonMethod::Exact => "exact",
            WilcoxonMethod::NormalApprox => "normal",
            WilcoxonMethod::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// Pairs with a nonzero difference.
    pub n_effective: usize,
    /// Rank sum of positive differences `a - b`.
    pub w_plus: f64,
    /// Rank sum of negative differences.
    pub w_minus: f64,
    /// `min(w_plus, w_minus)`.
    pub w_statistic: f64,
    /// Two-sided.
    pub p_value: f64,
    pub method: WilcoxonMethod,
}

/// Largest effective sample size that gets an exact p-value.
pub const EXACT_LIMIT: usize = 25;

/// Two-sided Wilcoxon matched-pairs signed-rank test on `a[i] - b[i]`.
///
/// Zero differences are dropped and tied magnitudes share average ranks.
/// Up to [`EXACT_LIMIT`] effective pairs the p-value is exact (the null
/// distribution of the positive rank sum is built over all `2^n` sign
/// patterns); above that a continuity-corrected normal approximation with
/// tie-corrected variance is used.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::Usage(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Usage("paired samples are empty".into()));
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            n_effective: 0,
            w_plus: 0.0,
            w_minus: 0.0,
            w_statistic: 0.0,
            p_value: 1.0,
            method: WilcoxonMethod::Degenerate,
        });
    }

    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&magnitudes);
    // Average ranks are multiples of 1/2; doubling keeps the arithmetic exact.
    let doubled: Vec<u64> = ranks.iter().map(|r| (r * 2.0).round() as u64).collect();
    let w_plus2: u64 = doubled
        .iter()
        .zip(&diffs)
        .filter(|(_, d)| **d > 0.0)
        .map(|(r, _)| r)
        .sum();
    let total2: u64 = doubled.iter().sum();
    let w_minus2 = total2 - w_plus2;
    let w2 = w_plus2.min(w_minus2);

    let (p_value, method) = if n <= EXACT_LIMIT {
        let counts = signed_rank_null_counts(&doubled);
        let tail: u64 = counts[..=w2 as usize].iter().sum();
        let p = 2.0 * tail as f64 / (1u64 << n) as f64;
        (p.min(1.0), WilcoxonMethod::Exact)
    } else {
        (normal_p_value(w2 as f64 / 2.0, n, &magnitudes), WilcoxonMethod::NormalApprox)
    };

    Ok(WilcoxonResult {
        n_effective: n,
        w_plus: w_plus2 as f64 / 2.0,
        w_minus: w_minus2 as f64 / 2.0,
        w_statistic: w2 as f64 / 2.0,
        p_value,
        method,
    })
}

/// Number of sign patterns giving each positive rank sum, indexed by the
/// (doubled) sum.
pub fn signed_rank_null_counts(doubled_ranks: &[u64]) -> Vec<u64> {
    let total: u64 = doubled_ranks.iter().sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in doubled_ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    counts
}

fn normal_p_value(w: f64, n: usize, magnitudes: &[f64]) -> f64 {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let mut sorted = magnitudes.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn summaries() {
        assert_eq!(summarize(&[3.0, 3.0, 3.0]).unwrap(), Summary { mean: 3.0, std: 0.0, n: 3 });
        let s = summarize(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((s.mean, s.std), (2.0, 1.0));
        assert!(summarize(&[]).is_err());
        assert_eq!(summarize(&[4.0]).unwrap().std, 0.0);
    }

    #[test]
    fn rank_rows_from_published_means() {
        let f5 = [Some(8.587858), Some(374.9048), Some(8.935518), Some(21.58376)];
        assert_eq!(rank_row(&f5, true), vec![1.0, 4.0, 2.0, 3.0]);
        let f8 = [Some(-2855.11), Some(-2814.14), None, Some(-10502.1)];
        assert_eq!(rank_row(&f8, true), vec![2.0, 3.0, 4.0, 1.0]);
        assert_eq!(rank_row(&[Some(1.0); 4], true), vec![2.5; 4]);
    }

    #[test]
    fn gap_ranking_uses_distance_to_target() {
        // Six-hump camel means: raw means would put the second algorithm first.
        let f16 = [Some(-1.03162), Some(-1.03163), None, Some(-1.00442)];
        assert_eq!(rank_row(&f16, true), vec![2.0, 1.0, 4.0, 3.0]);
        assert_eq!(rank_row_by_gap(&f16, -1.0316), vec![1.0, 2.0, 4.0, 3.0]);
    }

    #[test]
    fn missing_cells_share_trailing_ranks() {
        assert_eq!(rank_row(&[None, Some(2.0), None, Some(1.0)], true), vec![3.5, 2.0, 3.5, 1.0]);
        assert_eq!(rank_row(&[Some(1.0), Some(2.0)], false), vec![2.0, 1.0]);
    }

    #[test]
    fn groups() {
        assert_eq!(function_group("F7"), Some("F1-F7"));
        assert_eq!(function_group("F8"), Some("F8-F23"));
        assert_eq!(function_group("Cec04"), Some("CEC01-CEC10"));
        assert_eq!(function_group("F24"), None);
    }

    #[test]
    fn single_row_aggregate() {
        let mut t = RankTable::new(vec!["a".into(), "b".into()]);
        t.push("F1", vec![2.0, 1.0]);
        let s = t.aggregate();
        assert_eq!(s.totals, vec![2.0, 1.0]);
        assert_eq!(s.averages, vec![2.0, 1.0]);
        assert_eq!(s.groups.len(), 1);
    }

    #[test]
    fn friedman_examples() {
        assert_relative_eq!(friedman_statistic(&[1.0, 2.0], 1, 2), 1.0, epsilon = 1e-12);
        // N = 5, k = 3, all rank sums equal N(k+1)/2.
        assert_relative_eq!(friedman_statistic(&[10.0, 10.0, 10.0], 5, 3), 0.0, epsilon = 1e-12);
        assert_relative_eq!(friedman_p_value(0.0, 3), 1.0);
    }

    #[test]
    fn wilcoxon_degenerate_and_errors() {
        let r = wilcoxon_signed_rank(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!(r.method, WilcoxonMethod::Degenerate);
        assert_eq!(r.p_value, 1.0);
        assert!(wilcoxon_signed_rank(&[1.0], &[1.0, 2.0]).is_err());
        assert!(wilcoxon_signed_rank(&[], &[]).is_err());
    }

    #[test]
    fn wilcoxon_five_positive() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [0.0; 5];
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(r.method, WilcoxonMethod::Exact);
        assert_eq!(r.w_statistic, 0.0);
        assert_eq!(r.w_plus, 15.0);
        assert_eq!(r.p_value, 0.0625);
    }

    #[test]
    fn wilcoxon_large_sample_uses_normal_approximation() {
        let a: Vec<f64> = (0..40).map(|i| i as f64 + 0.5).collect();
        let b: Vec<f64> = (0..40).map(|i| if i % 3 == 0 { i as f64 + 1.0 } else { i as f64 }).collect();
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(r.method, WilcoxonMethod::NormalApprox);
        assert!(r.p_value > 0.0 && r.p_value < 0.5);
        // All differences equal in magnitude: ties only.
        assert_eq!(r.w_plus + r.w_minus, 40.0 * 41.0 / 2.0);
    }

    #[test]
    fn null_counts_sum_to_all_sign_patterns() {
        let counts = signed_rank_null_counts(&[2, 4, 6, 8]);
        assert_eq!(counts.iter().sum::<u64>(), 16);
        assert_eq!(counts[0], 1);
        assert_eq!(counts[20], 1);
    }
}
