use std::collections::HashMap;

use super::dataset::TextDataset;
use crate::error::{Error, Result};

pub type TokenId = u32;

pub const MASK: &str = "<mask>";
pub const UNK: &str = "<unk>";
pub const BLANK: &str = "<blank>";

const RESERVED: [&str; 3] = [MASK, UNK, BLANK];

/// Bidirectional token map. Ids `0..3` are the reserved mask, unknown and
/// blank tokens; corpus tokens follow in descending frequency order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    surface_to_id: HashMap<String, TokenId>,
    id_to_surface: Vec<String>,
}

impl Vocabulary {
    pub const MASK_ID: TokenId = 0;
    pub const UNK_ID: TokenId = 1;
    pub const BLANK_ID: TokenId = 2;
    pub const NUM_RESERVED: usize = RESERVED.len();

    /// Vocabulary holding the reserved tokens followed by `surfaces` in order.
    /// Duplicates and reserved surfaces in `surfaces` are rejected.
    pub fn from_surfaces<I, S>(surfaces: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary {
            surface_to_id: HashMap::new(),
            id_to_surface: Vec::new(),
        };
        for reserved in RESERVED {
            vocab.push(reserved.to_string());
        }
        for surface in surfaces {
            let surface = surface.into();
            if surface.is_empty() || surface.chars().any(char::is_whitespace) {
                return Err(Error::Invalid(format!("invalid vocabulary token {surface:?}")));
            }
            if vocab.surface_to_id.contains_key(&surface) {
                return Err(Error::Invalid(format!("duplicate vocabulary token {surface:?}")));
            }
            vocab.push(surface);
        }
        Ok(vocab)
    }

    fn push(&mut self, surface: String) {
        let id = self.id_to_surface.len() as TokenId;
        self.surface_to_id.insert(surface.clone(), id);
        self.id_to_surface.push(surface);
    }

    pub fn len(&self) -> usize {
        self.id_to_surface.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_surface.is_empty()
    }

    /// Number of non-reserved tokens.
    pub fn num_regular(&self) -> usize {
        self.len() - Self::NUM_RESERVED
    }

    pub fn mask_id(&self) -> TokenId {
        Self::MASK_ID
    }

    pub fn unk_id(&self) -> TokenId {
        Self::UNK_ID
    }

    pub fn blank_id(&self) -> TokenId {
        Self::BLANK_ID
    }

    pub fn is_reserved(id: TokenId) -> bool {
        (id as usize) < Self::NUM_RESERVED
    }

    pub fn get(&self, surface: &str) -> Option<TokenId> {
        self.surface_to_id.get(surface).copied()
    }

    /// Id of `surface`, or the unknown-token id.
    pub fn encode(&self, surface: &str) -> TokenId {
        self.get(surface).unwrap_or(Self::UNK_ID)
    }

    pub fn encode_all<S: AsRef<str>>(&self, surfaces: &[S]) -> Vec<TokenId> {
        surfaces.iter().map(|s| self.encode(s.as_ref())).collect()
    }

    /// Panics if `id` is out of range.
    pub fn decode(&self, id: TokenId) -> &str {
        &self.id_to_surface[id as usize]
    }

    pub fn decode_all(&self, ids: &[TokenId]) -> Vec<String> {
        ids.iter().map(|&id| self.decode(id).to_string()).collect()
    }

    /// Surfaces in id order, reserved tokens included.
    pub fn surfaces(&self) -> &[String] {
        &self.id_to_surface
    }

    /// Iterator over non-reserved ids.
    pub fn regular_ids(&self) -> impl Iterator<Item = TokenId> {
        (Self::NUM_RESERVED as TokenId)..(self.len() as TokenId)
    }
}

/// Builds a vocabulary from every token with frequency `>= min_count`.
/// Ids follow descending frequency, ties broken lexicographically.
pub fn build_vocabulary(datasets: &[&TextDataset], min_count: usize) -> Result<Vocabulary> {
    if min_count == 0 {
        return Err(Error::param("min_count", "must be at least 1"));
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut total = 0usize;
    for dataset in datasets {
        for example in &dataset.examples {
            for token in &example.tokens {
                total += 1;
                if !RESERVED.contains(&token.as_str()) {
                    *counts.entry(token.as_str()).or_default() += 1;
                }
            }
        }
    }
    if total == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut kept: Vec<(&str, usize)> = counts.into_iter().filter(|&(_, c)| c >= min_count).collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Vocabulary::from_surfaces(kept.into_iter().map(|(s, _)| s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{tokenize, Dataset, Example, LabelValue};

    fn text_dataset(lines: &[&str]) -> TextDataset {
        let examples = lines
            .iter()
            .map(|l| Example::original(tokenize(l), LabelValue::Hard(0), "d"))
            .collect();
        Dataset::new(examples, vec!["c".into()], vec!["d".into()]).unwrap()
    }

    #[test]
    fn frequency_then_lexicographic_order() {
        let ds = text_dataset(&["a b", "a c"]);
        let vocab = build_vocabulary(&[&ds], 1).unwrap();
        assert_eq!(vocab.surfaces(), [MASK, UNK, BLANK, "a", "b", "c"]);
        assert_eq!(vocab.len(), 6);
    }

    #[test]
    fn min_count_threshold() {
        let ds = text_dataset(&["a b", "a c"]);
        let vocab = build_vocabulary(&[&ds], 2).unwrap();
        assert_eq!(vocab.surfaces(), [MASK, UNK, BLANK, "a"]);
        assert_eq!(vocab.encode("b"), vocab.unk_id());
        assert_eq!(vocab.encode("a"), 3);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let ds = text_dataset(&[]);
        assert!(matches!(build_vocabulary(&[&ds], 1), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn reserved_tokens_are_distinct() {
        let vocab = Vocabulary::from_surfaces(["x"]).unwrap();
        assert_eq!(vocab.get(MASK), Some(vocab.mask_id()));
        assert_eq!(vocab.get(UNK), Some(vocab.unk_id()));
        assert_eq!(vocab.get(BLANK), Some(vocab.blank_id()));
        assert!(Vocabulary::from_surfaces(["x", "x"]).is_err());
        assert!(Vocabulary::from_surfaces([MASK]).is_err());
    }
}
