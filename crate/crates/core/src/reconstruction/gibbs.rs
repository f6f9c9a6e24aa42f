use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{reconstruct, ReconstructionBackend, SamplingStrategy};
use crate::corpus::TokenId;
use crate::corruption::{mlm_corrupt, CorruptionConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsChainConfig {
    pub steps: usize,
    pub corruption: CorruptionConfig,
    pub strategy: SamplingStrategy,
}

/// One corrupt-then-reconstruct step.
pub fn corrupt_and_reconstruct<B, R>(
    tokens: &[TokenId],
    corruption: &CorruptionConfig,
    strategy: SamplingStrategy,
    backend: &B,
    rng: &mut R,
) -> Result<Vec<TokenId>>
where
    B: ReconstructionBackend + ?Sized,
    R: Rng + ?Sized,
{
    let corrupted = mlm_corrupt(tokens, corruption, backend.vocab(), rng)?;
    reconstruct(&corrupted, backend, strategy, rng)
}

/// Runs the alternating corrupt/reconstruct chain from `start` and returns
/// all `steps` visited states (the start state excluded).
pub fn gibbs_chain<B, R>(
    start: &[TokenId],
    config: &GibbsChainConfig,
    backend: &B,
    rng: &mut R,
) -> Result<Vec<Vec<TokenId>>>
where
    B: ReconstructionBackend + ?Sized,
    R: Rng + ?Sized,
{
    if config.steps == 0 {
        return Err(Error::param("steps", "chain needs at least one step"));
    }
    let mut states = Vec::with_capacity(config.steps);
    let mut current = start.to_vec();
    for _ in 0..config.steps {
        current = corrupt_and_reconstruct(&current, &config.corruption, config.strategy, backend, rng)?;
        states.push(current.clone());
    }
    Ok(states)
}
