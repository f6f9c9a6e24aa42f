//! Bag-of-words classifiers used as teachers and students. Both accept soft
//! label targets.

mod logistic;
mod naive_bayes;
mod serialize;

pub use logistic::{lr_fit, LogisticHyperparameters, LogisticModel};
pub use naive_bayes::{nb_fit, NaiveBayesModel};
pub use serialize::{load_classifier, save_classifier};

use crate::corpus::{Dataset, TokenId};
use crate::error::Result;

pub trait Classifier: Send + Sync {
    fn classes(&self) -> &[String];

    /// Probability vector over `classes()`.
    fn predict_proba(&self, tokens: &[TokenId]) -> Vec<f64>;

    /// Most probable class, lowest index on ties.
    fn predict(&self, tokens: &[TokenId]) -> usize {
        crate::corpus::argmax_of(&self.predict_proba(tokens))
    }
}

/// Classifier families the CLI and evaluation harness can train.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    NaiveBayes,
    Logistic,
}

impl std::str::FromStr for ClassifierKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nb" => Ok(ClassifierKind::NaiveBayes),
            "lr" => Ok(ClassifierKind::Logistic),
            _ => Err(crate::Error::param("model", format!("{s:?} is not `nb` or `lr`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierModel {
    NaiveBayes(NaiveBayesModel),
    Logistic(LogisticModel),
}

impl ClassifierModel {
    pub fn fit(kind: ClassifierKind, dataset: &Dataset<TokenId>, vocab_size: usize) -> Result<Self> {
        Self::fit_seeded(kind, dataset, vocab_size, 0)
    }

    /// Default hyperparameters; `seed` only affects logistic regression.
    pub fn fit_seeded(kind: ClassifierKind, dataset: &Dataset<TokenId>, vocab_size: usize, seed: u64) -> Result<Self> {
        match kind {
            ClassifierKind::NaiveBayes => nb_fit(dataset, vocab_size, 1.0).map(ClassifierModel::NaiveBayes),
            ClassifierKind::Logistic => {
                let hyper = LogisticHyperparameters {
                    seed,
                    ..Default::default()
                };
                lr_fit(dataset, vocab_size, &hyper).map(ClassifierModel::Logistic)
            }
        }
    }
}

impl Classifier for ClassifierModel {
    fn classes(&self) -> &[String] {
        match self {
            ClassifierModel::NaiveBayes(m) => m.classes(),
            ClassifierModel::Logistic(m) => m.classes(),
        }
    }

    fn predict_proba(&self, tokens: &[TokenId]) -> Vec<f64> {
        match self {
            ClassifierModel::NaiveBayes(m) => m.predict_proba(tokens),
            ClassifierModel::Logistic(m) => m.predict_proba(tokens),
        }
    }
}

/// Sorted (token, count) pairs; the canonical order makes every sum over a
/// bag independent of token order.
pub(crate) fn bag_of_words(tokens: &[TokenId], vocab_size: usize) -> Vec<(usize, f64)> {
    let mut sorted: Vec<usize> = tokens
        .iter()
        .map(|&t| {
            if (t as usize) < vocab_size {
                t as usize
            } else {
                crate::corpus::Vocabulary::UNK_ID as usize
            }
        })
        .collect();
    sorted.sort_unstable();
    let mut bag: Vec<(usize, f64)> = Vec::new();
    for t in sorted {
        match bag.last_mut() {
            Some((last, count)) if *last == t => *count += 1.0,
            _ => bag.push((t, 1.0)),
        }
    }
    bag
}

/// Numerically stable softmax.
pub(crate) fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}
