use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::vocab::{TokenId, Vocabulary};
use crate::error::{Error, Result};

const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// A training target: a class index or a distribution over classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LabelValue {
    Hard(usize),
    Soft(Vec<f64>),
}

impl LabelValue {
    /// Validates a soft label and wraps it.
    pub fn soft(probabilities: Vec<f64>) -> Result<Self> {
        check_simplex(&probabilities)?;
        Ok(LabelValue::Soft(probabilities))
    }

    /// One-hot for hard labels, the vector itself for soft labels.
    pub fn to_distribution(&self, num_classes: usize) -> Vec<f64> {
        match self {
            LabelValue::Hard(class) => {
                let mut dist = vec![0.0; num_classes];
                dist[*class] = 1.0;
                dist
            }
            LabelValue::Soft(p) => p.clone(),
        }
    }

    /// The hard class, or the most probable class (lowest index on ties).
    pub fn argmax(&self) -> usize {
        match self {
            LabelValue::Hard(class) => *class,
            LabelValue::Soft(p) => argmax(p),
        }
    }

    fn validate(&self, num_classes: usize) -> Result<()> {
        match self {
            LabelValue::Hard(class) if *class >= num_classes => Err(Error::ClassMismatch(format!(
                "class index {class} out of range for {num_classes} classes"
            ))),
            LabelValue::Hard(_) => Ok(()),
            LabelValue::Soft(p) if p.len() != num_classes => Err(Error::ClassMismatch(format!(
                "soft label has {} entries, expected {num_classes}",
                p.len()
            ))),
            LabelValue::Soft(p) => check_simplex(p),
        }
    }
}

/// Index of the largest entry; the lowest index wins ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn check_simplex(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Invalid("empty probability vector".into()));
    }
    if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(Error::Invalid(format!(
            "probability vector has negative or non-finite entries: {p:?}"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
        return Err(Error::Invalid(format!("probability vector sums to {sum}, not 1")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Original,
    Augmented { parent: usize, aug_index: usize },
}

/// One labelled, domain-tagged token sequence. `T` is a token id for encoded
/// data and a `String` for raw text.
#[derive(Debug, Clone, PartialEq)]
pub struct Example<T = TokenId> {
    pub tokens: Vec<T>,
    pub label: LabelValue,
    pub domain: String,
    pub provenance: Provenance,
}

impl<T> Example<T> {
    pub fn original(tokens: Vec<T>, label: LabelValue, domain: impl Into<String>) -> Self {
        Example {
            tokens,
            label,
            domain: domain.into(),
            provenance: Provenance::Original,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T = TokenId> {
    pub examples: Vec<Example<T>>,
    pub classes: Vec<String>,
    pub domains: Vec<String>,
}

pub type TextDataset = Dataset<String>;

impl<T> Dataset<T> {
    /// Checks labels against `classes` and domains against `domains`.
    pub fn new(examples: Vec<Example<T>>, classes: Vec<String>, domains: Vec<String>) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::ClassMismatch("dataset has no classes".into()));
        }
        let known: HashSet<&str> = domains.iter().map(String::as_str).collect();
        for (i, example) in examples.iter().enumerate() {
            if example.tokens.is_empty() {
                return Err(Error::Invalid(format!("example {i} has no tokens")));
            }
            example.label.validate(classes.len())?;
            if !known.contains(example.domain.as_str()) {
                return Err(Error::Invalid(format!(
                    "example {i} has unknown domain {:?}",
                    example.domain
                )));
            }
        }
        Ok(Dataset {
            examples,
            classes,
            domains,
        })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Same class and domain lists, different examples.
    pub fn with_examples(&self, examples: Vec<Example<T>>) -> Self {
        Dataset {
            examples,
            classes: self.classes.clone(),
            domains: self.domains.clone(),
        }
    }

    fn map_tokens<U>(&self, f: impl Fn(&[T]) -> Vec<U>) -> Dataset<U> {
        Dataset {
            examples: self
                .examples
                .iter()
                .map(|e| Example {
                    tokens: f(&e.tokens),
                    label: e.label.clone(),
                    domain: e.domain.clone(),
                    provenance: e.provenance,
                })
                .collect(),
            classes: self.classes.clone(),
            domains: self.domains.clone(),
        }
    }
}

impl<T: Clone> Dataset<T> {
    /// Examples tagged with `domain`; the domain list is kept intact.
    pub fn filter_domain(&self, domain: &str) -> Self {
        self.with_examples(self.examples.iter().filter(|e| e.domain == domain).cloned().collect())
    }
}

impl TextDataset {
    pub fn encode(&self, vocab: &Vocabulary) -> Dataset<TokenId> {
        self.map_tokens(|tokens| vocab.encode_all(tokens))
    }
}

impl Dataset<TokenId> {
    pub fn decode(&self, vocab: &Vocabulary) -> TextDataset {
        self.map_tokens(|tokens| vocab.decode_all(tokens))
    }

    /// Fails if any token id is outside `vocab`.
    pub fn check_vocabulary(&self, vocab: &Vocabulary) -> Result<()> {
        for (i, example) in self.examples.iter().enumerate() {
            if let Some(&bad) = example.tokens.iter().find(|&&t| t as usize >= vocab.len()) {
                return Err(Error::VocabularyMismatch(format!(
                    "example {i} has token id {bad} but the vocabulary has {} entries",
                    vocab.len()
                )));
            }
        }
        Ok(())
    }
}
