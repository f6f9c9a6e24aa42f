//! Data model, tokenization, vocabularies, JSONL ingestion and the synthetic
//! multi-domain corpus generator.

mod dataset;
mod jsonl;
mod synthetic;
mod vocab;

pub(crate) use dataset::argmax as argmax_of;
pub use dataset::{Dataset, Example, LabelValue, Provenance, TextDataset};
pub use jsonl::{load_jsonl, load_jsonl_with_classes, read_jsonl, write_jsonl, write_jsonl_to};
pub use synthetic::{generate_synthetic, SyntheticSpec};
pub use vocab::{build_vocabulary, TokenId, Vocabulary, BLANK, MASK, UNK};

const SPLIT_PUNCTUATION: &[char] = &['.', ',', '!', '?', ';', ':'];

/// Lowercases, splits on whitespace and breaks `.,!?;:` out into standalone
/// tokens. Other punctuation (apostrophes, hyphens) stays inside words.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for word in text.split_whitespace() {
        let mut current = String::new();
        for ch in word.chars() {
            if SPLIT_PUNCTUATION.contains(&ch) {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                tokens.push(ch.to_string());
            } else {
                current.extend(ch.to_lowercase());
            }
        }
        if !current.is_empty() {
            tokens.push(current);
        }
    }
    tokens
}
