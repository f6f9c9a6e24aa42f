//! Corruption functions: MLM-style corruption and the word-dropout and EDA
//! baselines.

use std::collections::HashMap;
use std::fs;
use std::hash::Hash;
use std::path::Path;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{TokenId, Vocabulary};
use crate::error::{Error, Result};

const FRACTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionConfig {
    /// Fraction of eligible tokens selected for corruption.
    pub corrupt_pct: f64,
    pub mask_frac: f64,
    pub random_frac: f64,
    pub keep_frac: f64,
    /// Never select positions holding reserved tokens.
    pub exclude_reserved: bool,
}

impl Default for CorruptionConfig {
    fn default() -> Self {
        CorruptionConfig {
            corrupt_pct: 0.45,
            mask_frac: 0.8,
            random_frac: 0.1,
            keep_frac: 0.1,
            exclude_reserved: true,
        }
    }
}

impl CorruptionConfig {
    pub fn with_pct(corrupt_pct: f64) -> Self {
        CorruptionConfig {
            corrupt_pct,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.corrupt_pct) {
            return Err(Error::param(
                "corrupt_pct",
                format!("{} is outside [0, 1]", self.corrupt_pct),
            ));
        }
        let fracs = [self.mask_frac, self.random_frac, self.keep_frac];
        if fracs.iter().any(|f| !f.is_finite() || *f < 0.0) {
            return Err(Error::param("split", "mask/random/keep fractions must be non-negative"));
        }
        let sum: f64 = fracs.iter().sum();
        if (sum - 1.0).abs() > FRACTION_TOLERANCE {
            return Err(Error::param(
                "split",
                format!("mask/random/keep fractions sum to {sum}, not 1"),
            ));
        }
        Ok(())
    }

    /// Number of positions corrupted out of `eligible`: round half up, at
    /// least one whenever `corrupt_pct > 0`.
    pub fn corrupted_count(&self, eligible: usize) -> usize {
        if eligible == 0 || self.corrupt_pct <= 0.0 {
            return 0;
        }
        // the epsilon keeps exact halves such as 0.45 * 10 from rounding down
        let n = (self.corrupt_pct * eligible as f64 + 0.5 + 1e-9).floor() as usize;
        n.clamp(1, eligible)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CorruptionAction {
    Masked,
    Randomized,
    Kept,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorruptionResult {
    pub corrupted_tokens: Vec<TokenId>,
    /// Sorted corrupted indices.
    pub positions: Vec<usize>,
    /// Parallel to `positions`.
    pub actions: Vec<CorruptionAction>,
}

impl CorruptionResult {
    pub fn unchanged(tokens: &[TokenId]) -> Self {
        CorruptionResult {
            corrupted_tokens: tokens.to_vec(),
            positions: Vec::new(),
            actions: Vec::new(),
        }
    }
}

/// MLM corruption: select `corrupted_count(|E|)` eligible positions uniformly
/// without replacement, then mask, randomize or keep each one.
pub fn mlm_corrupt<R: Rng + ?Sized>(
    tokens: &[TokenId],
    config: &CorruptionConfig,
    vocab: &Vocabulary,
    rng: &mut R,
) -> Result<CorruptionResult> {
    config.validate()?;
    if tokens.is_empty() {
        return Err(Error::Invalid("cannot corrupt an empty example".into()));
    }
    let eligible: Vec<usize> = (0..tokens.len())
        .filter(|&i| !(config.exclude_reserved && Vocabulary::is_reserved(tokens[i])))
        .collect();
    let n = config.corrupted_count(eligible.len());
    if n == 0 {
        return Ok(CorruptionResult::unchanged(tokens));
    }
    if config.random_frac > 0.0 && vocab.num_regular() == 0 {
        return Err(Error::Invalid(
            "random replacement needs at least one non-reserved token".into(),
        ));
    }

    let mut positions: Vec<usize> = index::sample(rng, eligible.len(), n)
        .into_iter()
        .map(|i| eligible[i])
        .collect();
    positions.sort_unstable();

    let mut corrupted = tokens.to_vec();
    let mut actions = Vec::with_capacity(n);
    let first_regular = Vocabulary::NUM_RESERVED as TokenId;
    for &pos in &positions {
        let u: f64 = rng.gen();
        let action = if u < config.mask_frac {
            CorruptionAction::Masked
        } else if u < config.mask_frac + config.random_frac {
            CorruptionAction::Randomized
        } else {
            CorruptionAction::Kept
        };
        match action {
            CorruptionAction::Masked => corrupted[pos] = vocab.mask_id(),
            CorruptionAction::Randomized => corrupted[pos] = rng.gen_range(first_regular..vocab.len() as TokenId),
            CorruptionAction::Kept => {}
        }
        actions.push(action);
    }
    Ok(CorruptionResult {
        corrupted_tokens: corrupted,
        positions,
        actions,
    })
}

/// Replaces each position with the blank token independently with probability `p`.
pub fn word_dropout_corrupt<R: Rng + ?Sized>(
    tokens: &[TokenId],
    p: f64,
    vocab: &Vocabulary,
    rng: &mut R,
) -> Result<CorruptionResult> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("dropout probability", format!("{p} is outside [0, 1]")));
    }
    let mut result = CorruptionResult::unchanged(tokens);
    for (i, token) in result.corrupted_tokens.iter_mut().enumerate() {
        if rng.gen_bool(p) {
            *token = vocab.blank_id();
            result.positions.push(i);
            result.actions.push(CorruptionAction::Masked);
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdaOperation {
    SynonymReplace,
    RandomInsert,
    RandomSwap,
    RandomDelete,
}

/// Weights over (synonym-replace, random-insert, random-swap, random-delete).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdaMix(pub [f64; 4]);

impl Default for EdaMix {
    fn default() -> Self {
        EdaMix([0.25; 4])
    }
}

impl EdaMix {
    pub fn only(op: EdaOperation) -> Self {
        let mut w = [0.0; 4];
        w[op as usize] = 1.0;
        EdaMix(w)
    }

    fn validate(&self) -> Result<()> {
        let sum: f64 = self.0.iter().sum();
        if self.0.iter().any(|w| !w.is_finite() || *w < 0.0) || (sum - 1.0).abs() > FRACTION_TOLERANCE {
            return Err(Error::param(
                "eda op mix",
                format!("weights {:?} must be non-negative and sum to 1", self.0),
            ));
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> EdaOperation {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let ops = [
            EdaOperation::SynonymReplace,
            EdaOperation::RandomInsert,
            EdaOperation::RandomSwap,
            EdaOperation::RandomDelete,
        ];
        for (op, w) in ops.iter().zip(self.0) {
            acc += w;
            if u < acc {
                return *op;
            }
        }
        // rounding slack: last op with positive weight
        ops.into_iter()
            .zip(self.0)
            .rev()
            .find(|(_, w)| *w > 0.0)
            .map(|(op, _)| op)
            .unwrap()
    }
}

/// Easy-data-augmentation edits: `max(1, round(alpha * len))` edits drawn
/// from the op mix. Synonym edits on words without synonyms do nothing and
/// the sentence never shrinks below one token.
pub fn eda_corrupt<T, R>(
    tokens: &[T],
    alpha: f64,
    mix: &EdaMix,
    synonyms: &HashMap<T, Vec<T>>,
    rng: &mut R,
) -> Result<Vec<T>>
where
    T: Clone + Eq + Hash,
    R: Rng + ?Sized,
{
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param("eda alpha", format!("{alpha} is outside [0, 1]")));
    }
    mix.validate()?;
    let mut out = tokens.to_vec();
    if out.is_empty() {
        return Ok(out);
    }
    let edits = ((alpha * out.len() as f64).round() as usize).max(1);
    for _ in 0..edits {
        match mix.draw(rng) {
            EdaOperation::SynonymReplace => {
                let i = rng.gen_range(0..out.len());
                if let Some(choices) = synonyms.get(&out[i]).filter(|c| !c.is_empty()) {
                    out[i] = choices[rng.gen_range(0..choices.len())].clone();
                }
            }
            EdaOperation::RandomInsert => {
                let source = rng.gen_range(0..out.len());
                if let Some(choices) = synonyms.get(&out[source]).filter(|c| !c.is_empty()) {
                    let word = choices[rng.gen_range(0..choices.len())].clone();
                    let at = rng.gen_range(0..=out.len());
                    out.insert(at, word);
                }
            }
            EdaOperation::RandomSwap => {
                if out.len() >= 2 {
                    let i = rng.gen_range(0..out.len());
                    let j = (i + rng.gen_range(1..out.len())) % out.len();
                    out.swap(i, j);
                }
            }
            EdaOperation::RandomDelete => {
                if out.len() > 1 {
                    let i = rng.gen_range(0..out.len());
                    out.remove(i);
                }
            }
        }
    }
    Ok(out)
}

/// Parses a synonym table: one `word<TAB>syn1,syn2,...` entry per line;
/// blank lines and `#` comments are skipped.
pub fn parse_synonym_table(text: &str, origin: &Path) -> Result<HashMap<String, Vec<String>>> {
    let mut table = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            continue;
        }
        let (word, syns) = trimmed
            .split_once('\t')
            .ok_or_else(|| Error::parse(origin, idx + 1, "expected word<TAB>synonym list"))?;
        let word = word.trim();
        if word.is_empty() {
            return Err(Error::parse(origin, idx + 1, "empty headword"));
        }
        let syns: Vec<String> = syns
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        table.entry(word.to_string()).or_insert_with(Vec::new).extend(syns);
    }
    Ok(table)
}

pub fn load_synonym_table(path: impl AsRef<Path>) -> Result<HashMap<String, Vec<String>>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_synonym_table(&text, path)
}
