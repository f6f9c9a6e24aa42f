//! The reconstruction function: backends that turn a corrupted sequence into
//! per-position token distributions, sampling strategies, and the
//! corrupt/reconstruct chain.

mod count_mlm;
mod gibbs;
mod remote;
mod sampling;

pub use count_mlm::{train_count_mlm, ContextShape, CountEntry, CountMlmModel};
pub use gibbs::{corrupt_and_reconstruct, gibbs_chain, GibbsChainConfig};
pub use remote::{densify_response, PredictRequest, RemoteBackend};
pub use sampling::{sample_index, sample_tokens, top_k_distribution, SamplingStrategy};

use rand::Rng;

use crate::corpus::{TokenId, Vocabulary};
use crate::corruption::CorruptionResult;
use crate::error::{Error, Result};

/// Internal tolerance on distribution sums.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

/// Maps a corrupted sequence to one distribution over the vocabulary per
/// requested position. Implementations must be pure functions of their
/// inputs; the augmenter calls them concurrently.
pub trait ReconstructionBackend: Send + Sync {
    fn vocab(&self) -> &Vocabulary;

    fn predict(&self, tokens: &[TokenId], positions: &[usize]) -> Result<Vec<Vec<f64>>>;
}

/// Backend that answers every position with the same distribution.
#[derive(Debug, Clone)]
pub struct FixedBackend {
    vocab: Vocabulary,
    distribution: Vec<f64>,
}

impl FixedBackend {
    pub fn new(vocab: Vocabulary, distribution: Vec<f64>) -> Result<Self> {
        validate_distribution(&distribution, vocab.len(), 0)?;
        Ok(FixedBackend { vocab, distribution })
    }
}

impl ReconstructionBackend for FixedBackend {
    fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    fn predict(&self, _tokens: &[TokenId], positions: &[usize]) -> Result<Vec<Vec<f64>>> {
        Ok(vec![self.distribution.clone(); positions.len()])
    }
}

pub(crate) fn validate_distribution(p: &[f64], vocab_size: usize, position: usize) -> Result<()> {
    let fail = |message: String| Err(Error::InvalidDistribution { position, message });
    if p.len() != vocab_size {
        return fail(format!(
            "length {} does not match vocabulary size {vocab_size}",
            p.len()
        ));
    }
    if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return fail(format!("entry {bad} is negative or non-finite"));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return fail(format!("sums to {sum}"));
    }
    Ok(())
}

/// Predicts every corrupted position, samples replacements and substitutes
/// them. Positions outside the corruption are never touched.
pub fn reconstruct<B, R>(
    corruption: &CorruptionResult,
    backend: &B,
    strategy: SamplingStrategy,
    rng: &mut R,
) -> Result<Vec<TokenId>>
where
    B: ReconstructionBackend + ?Sized,
    R: Rng + ?Sized,
{
    let mut out = corruption.corrupted_tokens.clone();
    if corruption.positions.is_empty() {
        return Ok(out);
    }
    let distributions = backend.predict(&corruption.corrupted_tokens, &corruption.positions)?;
    if distributions.len() != corruption.positions.len() {
        return Err(Error::Protocol(format!(
            "backend returned {} distributions for {} positions",
            distributions.len(),
            corruption.positions.len()
        )));
    }
    let sampled = sample_tokens(&distributions, strategy, rng)?;
    for (&pos, token) in corruption.positions.iter().zip(sampled) {
        out[pos] = token;
    }
    Ok(out)
}
