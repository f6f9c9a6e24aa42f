//! Rank-sum and paired-bootstrap significance tests.

use rand::Rng;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Largest per-sample size handled by exact enumeration.
pub const EXACT_LIMIT: usize = 8;
pub const MIN_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatMethod {
    Exact,
    NormalApprox,
    Bootstrap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatTestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: StatMethod,
}

/// Midranks (1-based) of `values`, ties sharing the average rank.
pub(crate) fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Two-sided Wilcoxon rank-sum test. The statistic is the rank sum of `a`.
/// Exact over all `C(n+m, n)` assignments when both sizes are at most 8,
/// otherwise the tie-corrected normal approximation with continuity
/// correction.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<StatTestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::param("sample", "contains NaN"));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let statistic: f64 = ranks[..a.len()].iter().sum();
    if a.len() <= EXACT_LIMIT && b.len() <= EXACT_LIMIT {
        Ok(StatTestResult {
            statistic,
            p_value: exact_p(&ranks, a.len()),
            method: StatMethod::Exact,
        })
    } else {
        Ok(StatTestResult {
            statistic,
            p_value: normal_p(&pooled, statistic, a.len(), b.len()),
            method: StatMethod::NormalApprox,
        })
    }
}

/// Counts subsets of size `n` by doubled rank sum, which is an integer for
/// midranks, so the two-sided comparison is exact.
fn exact_p(ranks: &[f64], n: usize) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    // counts[k][s]: subsets of size k with doubled sum s.
    let mut counts = vec![vec![0u64; max_sum + 1]; n + 1];
    counts[0][0] = 1;
    for &r in &doubled {
        for k in (1..=n).rev() {
            for s in (r..=max_sum).rev() {
                counts[k][s] += counts[k - 1][s - r];
            }
        }
    }
    let center = (n * (ranks.len() + 1)) as i64;
    let observed: i64 = doubled[..n].iter().sum::<usize>() as i64;
    let threshold = (observed - center).abs();
    let total: u64 = counts[n].iter().sum();
    let extreme: u64 = counts[n]
        .iter()
        .enumerate()
        .filter(|&(s, _)| (s as i64 - center).abs() >= threshold)
        .map(|(_, &c)| c)
        .sum();
    extreme as f64 / total as f64
}

fn normal_p(pooled: &[f64], statistic: f64, n: usize, m: usize) -> f64 {
    let total = (n + m) as f64;
    let mut sorted = pooled.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        let t = (end - start) as f64;
        tie_term += t * t * t - t;
        start = end;
    }
    let mu = n as f64 * (total + 1.0) / 2.0;
    let var = n as f64 * m as f64 / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((statistic - mu).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

/// Paired bootstrap: the fraction of resamples (paired indices drawn with
/// replacement) in which `mean(a) <= mean(b)`. Pairs are sorted first so the
/// result does not depend on their order. The statistic is
/// `mean(a) - mean(b)` on the full sample.
pub fn paired_bootstrap(a: &[f64], b: &[f64], resamples: usize, seed: u64) -> Result<StatTestResult> {
    if a.len() != b.len() {
        return Err(Error::Invalid(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if resamples < MIN_RESAMPLES {
        return Err(Error::param(
            "resamples",
            format!("must be at least {MIN_RESAMPLES}, got {resamples}"),
        ));
    }
    let mut pairs: Vec<(f64, f64)> = a.iter().copied().zip(b.iter().copied()).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let n = pairs.len();
    let mut rng = rng_from_seed(seed);
    let mut not_better = 0usize;
    for _ in 0..resamples {
        let (mut sa, mut sb) = (0.0, 0.0);
        for _ in 0..n {
            let (x, y) = pairs[rng.gen_range(0..n)];
            sa += x;
            sb += y;
        }
        if sa <= sb {
            not_better += 1;
        }
    }
    let statistic = (a.iter().sum::<f64>() - b.iter().sum::<f64>()) / n as f64;
    Ok(StatTestResult {
        statistic,
        p_value: not_better as f64 / resamples as f64,
        method: StatMethod::Bootstrap,
    })
}
