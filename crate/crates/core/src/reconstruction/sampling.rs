use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::TokenId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplingStrategy {
    /// Sample from the full distribution.
    #[default]
    Unrestricted,
    /// Sample from the k most probable tokens, renormalized.
    TopK(usize),
}

impl std::fmt::Display for SamplingStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SamplingStrategy::Unrestricted => write!(f, "unrestricted"),
            SamplingStrategy::TopK(k) => write!(f, "topk:{k}"),
        }
    }
}

impl std::str::FromStr for SamplingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "unrestricted" {
            return Ok(SamplingStrategy::Unrestricted);
        }
        let k = s
            .strip_prefix("topk:")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k >= 1)
            .ok_or_else(|| {
                Error::param(
                    "sampling",
                    format!("{s:?} is not `unrestricted` or `topk:K` with K >= 1"),
                )
            })?;
        Ok(SamplingStrategy::TopK(k))
    }
}

/// Zeroes all but the `k` largest entries (lowest id wins ties). When `k`
/// already covers every non-zero entry the input is returned bit-for-bit.
fn top_k_weights(p: &[f64], k: usize) -> Vec<f64> {
    let nonzero = p.iter().filter(|&&x| x > 0.0).count();
    if k >= nonzero {
        return p.to_vec();
    }
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
    let mut out = vec![0.0; p.len()];
    for &i in &order[..k] {
        out[i] = p[i];
    }
    out
}

/// The renormalized top-k distribution.
pub fn top_k_distribution(p: &[f64], k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::param("top_k", "k must be at least 1"));
    }
    let mut w = top_k_weights(p, k);
    let total = checked_total(&w, 0)?;
    for x in &mut w {
        *x /= total;
    }
    Ok(w)
}

fn checked_total(weights: &[f64], position: usize) -> Result<f64> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidDistribution {
            position,
            message: "invalid distribution: negative or non-finite entry".into(),
        });
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidDistribution {
            position,
            message: "invalid distribution: all entries are zero".into(),
        });
    }
    Ok(total)
}

/// Inverse-CDF draw from unnormalized non-negative weights.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<usize> {
    let total = checked_total(weights, 0)?;
    Ok(draw(weights, total, rng))
}

fn draw<R: Rng + ?Sized>(weights: &[f64], total: f64, rng: &mut R) -> usize {
    let target = rng.gen::<f64>() * total;
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            cumulative += w;
            last_positive = i;
            if cumulative > target {
                return i;
            }
        }
    }
    last_positive
}

/// One independent draw per distribution, one uniform variate each.
pub fn sample_tokens<R: Rng + ?Sized>(
    distributions: &[Vec<f64>],
    strategy: SamplingStrategy,
    rng: &mut R,
) -> Result<Vec<TokenId>> {
    distributions
        .iter()
        .enumerate()
        .map(|(position, p)| {
            let weights = match strategy {
                SamplingStrategy::Unrestricted => std::borrow::Cow::Borrowed(p.as_slice()),
                SamplingStrategy::TopK(0) => return Err(Error::param("top_k", "k must be at least 1")),
                SamplingStrategy::TopK(k) => std::borrow::Cow::Owned(top_k_weights(p, k)),
            };
            let total = checked_total(&weights, position)?;
            Ok(draw(&weights, total, rng) as TokenId)
        })
        .collect()
}
