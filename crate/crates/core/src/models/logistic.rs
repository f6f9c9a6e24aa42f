//! Multinomial logistic regression on bag-of-words counts, trained to
//! minimize `KL(target || softmax(Wx + b))` plus an L2 penalty on `W`.
//! Hard labels become one-hot targets, where the loss is cross-entropy.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{bag_of_words, softmax, Classifier};
use crate::corpus::{Dataset, TokenId};
use crate::error::{Error, Result};
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticHyperparameters {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub l2: f64,
    pub seed: u64,
}

impl Default for LogisticHyperparameters {
    fn default() -> Self {
        LogisticHyperparameters {
            learning_rate: 0.1,
            epochs: 20,
            batch_size: 16,
            l2: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub(crate) classes: Vec<String>,
    pub(crate) vocab_size: usize,
    /// `classes x vocab_size`, row-major.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub(crate) hyper: LogisticHyperparameters,
    /// Full-data objective after each epoch.
    pub(crate) epoch_losses: Vec<f64>,
}

struct Row {
    bag: Vec<(usize, f64)>,
    target: Vec<f64>,
}

fn rows(dataset: &Dataset<TokenId>, vocab_size: usize) -> Vec<Row> {
    dataset
        .examples
        .iter()
        .map(|e| Row {
            bag: bag_of_words(&e.tokens, vocab_size),
            target: e.label.to_distribution(dataset.num_classes()),
        })
        .collect()
}

pub fn lr_fit(dataset: &Dataset<TokenId>, vocab_size: usize, hyper: &LogisticHyperparameters) -> Result<LogisticModel> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if hyper.batch_size == 0
        || !(hyper.learning_rate.is_finite() && hyper.learning_rate > 0.0)
        || !(hyper.l2.is_finite() && hyper.l2 >= 0.0)
    {
        return Err(Error::param(
            "logistic hyperparameters",
            "batch size and learning rate must be positive, l2 non-negative",
        ));
    }
    let mut model = LogisticModel::zeros(dataset.classes.clone(), vocab_size, hyper.clone());
    let data = rows(dataset, vocab_size);
    let mut order: Vec<usize> = (0..data.len()).collect();
    for epoch in 0..hyper.epochs {
        order.sort_unstable();
        order.shuffle(&mut substream(hyper.seed, epoch as u64, 0));
        for batch in order.chunks(hyper.batch_size) {
            let batch: Vec<&Row> = batch.iter().map(|&i| &data[i]).collect();
            let (grad_w, grad_b) = model.gradient_rows(&batch);
            for (w, g) in model.weights.iter_mut().zip(&grad_w) {
                *w -= hyper.learning_rate * g;
            }
            for (b, g) in model.bias.iter_mut().zip(&grad_b) {
                *b -= hyper.learning_rate * g;
            }
        }
        let all: Vec<&Row> = data.iter().collect();
        let loss = model.objective_rows(&all);
        if !loss.is_finite() {
            return Err(Error::Diverged { epoch: epoch + 1, loss });
        }
        model.epoch_losses.push(loss);
    }
    Ok(model)
}

impl LogisticModel {
    pub fn zeros(classes: Vec<String>, vocab_size: usize, hyper: LogisticHyperparameters) -> Self {
        let c = classes.len();
        LogisticModel {
            classes,
            vocab_size,
            weights: vec![0.0; c * vocab_size],
            bias: vec![0.0; c],
            hyper,
            epoch_losses: Vec::new(),
        }
    }

    pub fn hyperparameters(&self) -> &LogisticHyperparameters {
        &self.hyper
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn epoch_losses(&self) -> &[f64] {
        &self.epoch_losses
    }

    fn logits(&self, bag: &[(usize, f64)]) -> Vec<f64> {
        (0..self.classes.len())
            .map(|c| {
                let row = &self.weights[c * self.vocab_size..(c + 1) * self.vocab_size];
                self.bias[c] + bag.iter().map(|&(t, n)| n * row[t]).sum::<f64>()
            })
            .collect()
    }

    fn objective_rows(&self, rows: &[&Row]) -> f64 {
        let mut kl = 0.0;
        for row in rows {
            let p = softmax(&self.logits(&row.bag));
            for (t, q) in row.target.iter().zip(&p) {
                if *t > 0.0 {
                    kl += t * (t.ln() - q.ln());
                }
            }
        }
        let penalty: f64 = self.weights.iter().map(|w| w * w).sum::<f64>();
        kl / rows.len() as f64 + 0.5 * self.hyper.l2 * penalty
    }

    fn gradient_rows(&self, rows: &[&Row]) -> (Vec<f64>, Vec<f64>) {
        let v = self.vocab_size;
        let scale = 1.0 / rows.len() as f64;
        let mut grad_w: Vec<f64> = self.weights.iter().map(|w| self.hyper.l2 * w).collect();
        let mut grad_b = vec![0.0; self.classes.len()];
        for row in rows {
            let p = softmax(&self.logits(&row.bag));
            for c in 0..self.classes.len() {
                let delta = (p[c] - row.target[c]) * scale;
                grad_b[c] += delta;
                for &(t, n) in &row.bag {
                    grad_w[c * v + t] += delta * n;
                }
            }
        }
        (grad_w, grad_b)
    }

    /// Mean `KL(target || prediction)` over `dataset` plus `l2/2 * |W|^2`.
    pub fn objective(&self, dataset: &Dataset<TokenId>) -> f64 {
        let data = rows(dataset, self.vocab_size);
        let refs: Vec<&Row> = data.iter().collect();
        self.objective_rows(&refs)
    }

    /// Analytic gradient of [`objective`](Self::objective) with respect to
    /// the weights and the bias.
    pub fn gradient(&self, dataset: &Dataset<TokenId>) -> (Vec<f64>, Vec<f64>) {
        let data = rows(dataset, self.vocab_size);
        let refs: Vec<&Row> = data.iter().collect();
        self.gradient_rows(&refs)
    }
}

impl Classifier for LogisticModel {
    fn classes(&self) -> &[String] {
        &self.classes
    }

    fn predict_proba(&self, tokens: &[TokenId]) -> Vec<f64> {
        softmax(&self.logits(&bag_of_words(tokens, self.vocab_size)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Example, LabelValue};

    fn dataset(rows: &[(&[TokenId], LabelValue)]) -> Dataset<TokenId> {
        let examples = rows
            .iter()
            .map(|(t, l)| Example::original(t.to_vec(), l.clone(), "d"))
            .collect();
        Dataset::new(examples, vec!["neg".into(), "pos".into()], vec!["d".into()]).unwrap()
    }

    #[test]
    fn zero_model_is_uniform() {
        let m = LogisticModel::zeros(vec!["a".into(), "b".into(), "c".into()], 6, Default::default());
        assert_eq!(m.predict_proba(&[3, 4]), vec![1.0 / 3.0; 3]);
    }

    #[test]
    fn empty_input_is_softmax_of_bias() {
        let mut m = LogisticModel::zeros(vec!["a".into(), "b".into()], 4, Default::default());
        m.bias = vec![0.0, 2.0f64.ln()];
        let p = m.predict_proba(&[]);
        assert!((p[0] - 1.0 / 3.0).abs() < 1e-15 && (p[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn separable_toy_set() {
        let ds = dataset(&[
            (&[3, 5], LabelValue::Hard(0)),
            (&[3, 3, 6], LabelValue::Hard(0)),
            (&[3, 7], LabelValue::Hard(0)),
            (&[4, 5], LabelValue::Hard(1)),
            (&[4, 4, 6], LabelValue::Hard(1)),
            (&[4, 7], LabelValue::Hard(1)),
        ]);
        let m = lr_fit(&ds, 8, &LogisticHyperparameters::default()).unwrap();
        for e in &ds.examples {
            assert_eq!(m.predict(&e.tokens), e.label.argmax());
        }
        for pair in m.epoch_losses().windows(2) {
            assert!(pair[1] <= pair[0], "{:?}", m.epoch_losses());
        }
    }

    #[test]
    fn uniform_targets_learn_uniform_predictions() {
        let u = LabelValue::Soft(vec![0.5, 0.5]);
        let ds = dataset(&[
            (&[3, 5], u.clone()),
            (&[4], u.clone()),
            (&[5, 6, 6], u.clone()),
            (&[7], u),
        ]);
        let m = lr_fit(&ds, 8, &LogisticHyperparameters::default()).unwrap();
        for e in &ds.examples {
            for p in m.predict_proba(&e.tokens) {
                assert!((p - 0.5).abs() < 0.05);
            }
        }
    }

    #[test]
    fn hard_and_one_hot_soft_fit_identically() {
        let hard = dataset(&[
            (&[3, 5], LabelValue::Hard(0)),
            (&[4, 6], LabelValue::Hard(1)),
            (&[3], LabelValue::Hard(0)),
        ]);
        let soft = hard.with_examples(
            hard.examples
                .iter()
                .map(|e| Example::original(e.tokens.clone(), LabelValue::Soft(e.label.to_distribution(2)), "d"))
                .collect(),
        );
        let hyper = LogisticHyperparameters {
            seed: 17,
            ..Default::default()
        };
        let a = lr_fit(&hard, 8, &hyper).unwrap();
        let b = lr_fit(&soft, 8, &hyper).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.bias, b.bias);
    }

    #[test]
    fn divergence_is_reported() {
        let ds = dataset(&[(&[3; 50], LabelValue::Hard(0)), (&[4; 50], LabelValue::Hard(1))]);
        let hyper = LogisticHyperparameters {
            learning_rate: 1e300,
            ..Default::default()
        };
        let err = lr_fit(&ds, 8, &hyper).unwrap_err();
        assert!(matches!(err, Error::Diverged { epoch: 1, .. }), "{err}");
    }
}
