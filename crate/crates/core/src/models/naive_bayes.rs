use super::{bag_of_words, softmax, Classifier};
use crate::corpus::{Dataset, TokenId};
use crate::error::{Error, Result};

/// Multinomial naive Bayes with add-k smoothed token likelihoods.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    pub(crate) classes: Vec<String>,
    pub(crate) smoothing_k: f64,
    pub(crate) log_priors: Vec<f64>,
    /// `classes x vocab_size`, row-major.
    pub(crate) log_likelihoods: Vec<f64>,
    pub(crate) vocab_size: usize,
}

/// Soft labels contribute fractional counts weighted by class probability.
pub fn nb_fit(dataset: &Dataset<TokenId>, vocab_size: usize, smoothing_k: f64) -> Result<NaiveBayesModel> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(smoothing_k.is_finite() && smoothing_k > 0.0) {
        return Err(Error::param(
            "nb smoothing k",
            format!("{smoothing_k} must be positive"),
        ));
    }
    let num_classes = dataset.num_classes();
    let mut label_mass = vec![0.0; num_classes];
    let mut token_mass = vec![0.0; num_classes];
    let mut counts = vec![0.0; num_classes * vocab_size];
    for example in &dataset.examples {
        let weights = example.label.to_distribution(num_classes);
        let bag = bag_of_words(&example.tokens, vocab_size);
        let length: f64 = bag.iter().map(|(_, c)| c).sum();
        for (c, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            label_mass[c] += w;
            token_mass[c] += w * length;
            let row = &mut counts[c * vocab_size..(c + 1) * vocab_size];
            for &(t, n) in &bag {
                row[t] += w * n;
            }
        }
    }
    let total_mass: f64 = label_mass.iter().sum();
    if total_mass <= 0.0 {
        return Err(Error::Invalid("naive Bayes: zero total label mass".into()));
    }
    let log_priors = label_mass.iter().map(|m| (m / total_mass).ln()).collect();
    let mut log_likelihoods = counts;
    for c in 0..num_classes {
        let denom = token_mass[c] + smoothing_k * vocab_size as f64;
        for x in &mut log_likelihoods[c * vocab_size..(c + 1) * vocab_size] {
            *x = ((*x + smoothing_k) / denom).ln();
        }
    }
    Ok(NaiveBayesModel {
        classes: dataset.classes.clone(),
        smoothing_k,
        log_priors,
        log_likelihoods,
        vocab_size,
    })
}

impl NaiveBayesModel {
    pub fn log_priors(&self) -> &[f64] {
        &self.log_priors
    }

    pub fn log_likelihood(&self, class: usize, token: TokenId) -> f64 {
        self.log_likelihoods[class * self.vocab_size + token as usize]
    }

    pub fn smoothing_k(&self) -> f64 {
        self.smoothing_k
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }
}

impl Classifier for NaiveBayesModel {
    fn classes(&self) -> &[String] {
        &self.classes
    }

    fn predict_proba(&self, tokens: &[TokenId]) -> Vec<f64> {
        let bag = bag_of_words(tokens, self.vocab_size);
        let scores: Vec<f64> = (0..self.classes.len())
            .map(|c| {
                let row = &self.log_likelihoods[c * self.vocab_size..(c + 1) * self.vocab_size];
                self.log_priors[c] + bag.iter().map(|&(t, n)| n * row[t]).sum::<f64>()
            })
            .collect();
        softmax(&scores)
    }
}
