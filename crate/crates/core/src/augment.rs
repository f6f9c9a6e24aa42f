//! The augmentation driver: for every example `i` and every `j` in `1..=m`,
//! corrupt, reconstruct and label with a generator seeded from
//! `(master_seed, i, j)`. Output is the original examples followed by the
//! augmented ones in `(i, j)` order. Work runs on the current rayon pool and
//! the output does not depend on its size.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, Example, Provenance, TextDataset, TokenId, Vocabulary};
use crate::corruption::{eda_corrupt, word_dropout_corrupt, CorruptionConfig, EdaMix};
use crate::error::{Error, Result};
use crate::labeling::{assign_label, LabelPolicy};
use crate::reconstruction::{corrupt_and_reconstruct, ReconstructionBackend, SamplingStrategy};
use crate::rng::{substream, SeededRng};

#[derive(Debug, Clone)]
pub struct AugmentConfig {
    pub corruption: CorruptionConfig,
    pub strategy: SamplingStrategy,
    pub policy: LabelPolicy,
    pub num_aug: usize,
    pub master_seed: u64,
    pub keep_duplicates: bool,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            corruption: CorruptionConfig::default(),
            strategy: SamplingStrategy::Unrestricted,
            policy: LabelPolicy::Preserve,
            num_aug: 5,
            master_seed: 0,
            keep_duplicates: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentReport {
    pub num_original: usize,
    pub num_generated: usize,
    pub duplicate_count: usize,
    /// Mean fraction of positions differing from the parent, over all samples.
    pub mean_token_change_rate: f64,
}

/// Baseline corruptions that skip reconstruction.
#[derive(Debug, Clone)]
pub enum BaselineMethod {
    WordDropout {
        p: f64,
    },
    Eda {
        alpha: f64,
        mix: EdaMix,
        synonyms: HashMap<TokenId, Vec<TokenId>>,
    },
}

/// Corrupt/reconstruct augmentation of `dataset` with `backend`.
pub fn ssmba_augment<B>(
    dataset: &Dataset<TokenId>,
    backend: &B,
    config: &AugmentConfig,
) -> Result<(Dataset<TokenId>, AugmentReport)>
where
    B: ReconstructionBackend + ?Sized,
{
    config.corruption.validate()?;
    dataset.check_vocabulary(backend.vocab())?;
    generate(dataset, config, |tokens, rng| {
        corrupt_and_reconstruct(tokens, &config.corruption, config.strategy, backend, rng)
    })
}

/// Word-dropout or EDA augmentation with the same bookkeeping as
/// [`ssmba_augment`]; `config.corruption` and `config.strategy` are unused.
pub fn baseline_augment(
    dataset: &Dataset<TokenId>,
    vocab: &Vocabulary,
    method: &BaselineMethod,
    config: &AugmentConfig,
) -> Result<(Dataset<TokenId>, AugmentReport)> {
    dataset.check_vocabulary(vocab)?;
    match method {
        BaselineMethod::WordDropout { p } => generate(dataset, config, |tokens, rng| {
            word_dropout_corrupt(tokens, *p, vocab, rng).map(|r| r.corrupted_tokens)
        }),
        BaselineMethod::Eda { alpha, mix, synonyms } => generate(dataset, config, |tokens, rng| {
            eda_corrupt(tokens, *alpha, mix, synonyms, rng)
        }),
    }
}

fn generate<F>(
    dataset: &Dataset<TokenId>,
    config: &AugmentConfig,
    sample: F,
) -> Result<(Dataset<TokenId>, AugmentReport)>
where
    F: Fn(&[TokenId], &mut SeededRng) -> Result<Vec<TokenId>> + Sync,
{
    if config.num_aug == 0 {
        return Err(Error::param("num_aug", "must be at least 1"));
    }
    config.policy.check_classes(&dataset.classes)?;

    let jobs: Vec<(usize, usize)> = (0..dataset.len())
        .flat_map(|i| (1..=config.num_aug).map(move |j| (i, j)))
        .collect();
    let run = |&(i, j): &(usize, usize)| -> Result<Example<TokenId>> {
        let parent = &dataset.examples[i];
        let mut rng = substream(config.master_seed, i as u64, j as u64);
        let tokens = sample(&parent.tokens, &mut rng)?;
        let label = assign_label(&tokens, &parent.label, &config.policy)?;
        Ok(Example {
            tokens,
            label,
            domain: parent.domain.clone(),
            provenance: Provenance::Augmented {
                parent: i,
                aug_index: j,
            },
        })
    };
    let samples: Vec<Example<TokenId>> = jobs.par_iter().map(run).collect::<Result<_>>()?;

    let mut change_total = 0.0;
    let mut duplicate_count = 0;
    let mut kept = Vec::with_capacity(samples.len());
    for (idx, sample) in samples.iter().enumerate() {
        let (i, j) = jobs[idx];
        let parent = &dataset.examples[i].tokens;
        change_total += change_rate(parent, &sample.tokens);
        let siblings = &samples[idx + 1 - j..idx];
        let duplicate = sample.tokens == *parent || siblings.iter().any(|s| s.tokens == sample.tokens);
        if duplicate {
            duplicate_count += 1;
        }
        if config.keep_duplicates || !duplicate {
            kept.push(sample.clone());
        }
    }

    let report = AugmentReport {
        num_original: dataset.len(),
        num_generated: kept.len(),
        duplicate_count,
        mean_token_change_rate: if samples.is_empty() {
            0.0
        } else {
            change_total / samples.len() as f64
        },
    };
    let mut examples = dataset.examples.clone();
    examples.extend(kept);
    Ok((dataset.with_examples(examples), report))
}

/// Turns an augmentation result back into text. Originals keep their
/// source text; an augmented token equal to its parent's id at the same
/// position keeps the parent's surface, so out-of-vocabulary words survive
/// untouched positions.
pub fn decode_augmented(augmented: &Dataset<TokenId>, original: &TextDataset, vocab: &Vocabulary) -> TextDataset {
    let examples = augmented
        .examples
        .iter()
        .enumerate()
        .map(|(k, e)| match e.provenance {
            Provenance::Original if k < original.len() => original.examples[k].clone(),
            Provenance::Augmented { parent, .. } if parent < original.len() => {
                let parent_text = &original.examples[parent].tokens;
                let parent_ids = &augmented.examples[parent].tokens;
                let tokens = if e.tokens.len() == parent_ids.len() {
                    e.tokens
                        .iter()
                        .zip(parent_ids)
                        .zip(parent_text)
                        .map(|((&t, &p), surface)| {
                            if t == p {
                                surface.clone()
                            } else {
                                vocab.decode(t).to_string()
                            }
                        })
                        .collect()
                } else {
                    vocab.decode_all(&e.tokens)
                };
                Example {
                    tokens,
                    label: e.label.clone(),
                    domain: e.domain.clone(),
                    provenance: e.provenance,
                }
            }
            _ => Example {
                tokens: vocab.decode_all(&e.tokens),
                label: e.label.clone(),
                domain: e.domain.clone(),
                provenance: e.provenance,
            },
        })
        .collect();
    original.with_examples(examples)
}

/// Differing aligned positions plus the length difference, over the longer length.
fn change_rate(parent: &[TokenId], child: &[TokenId]) -> f64 {
    let longest = parent.len().max(child.len());
    if longest == 0 {
        return 0.0;
    }
    let differing = parent.iter().zip(child).filter(|(a, b)| a != b).count() + parent.len().abs_diff(child.len());
    differing as f64 / longest as f64
}
