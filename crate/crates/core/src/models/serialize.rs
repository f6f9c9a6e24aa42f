//! Versioned flat-text classifier files.
//!
//! ```text
//! nb v1 k=<float>                 | lr v1 learning_rate=.. epochs=.. batch_size=.. l2=.. seed=..
//! classes <n>, then one name per line
//! vocab <n>, then one surface per line
//! nb: log_priors line, then one log-likelihood row per class
//! lr: one weight row per class, then the bias line
//! ```
//! Floats use Rust's shortest round-trip formatting, so loading reproduces
//! predictions bit-for-bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{ClassifierModel, LogisticHyperparameters, LogisticModel, NaiveBayesModel};
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

fn row(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn classifier_to_text(model: &ClassifierModel, vocab: &Vocabulary) -> String {
    let mut out = String::new();
    let (classes, vocab_size) = match model {
        ClassifierModel::NaiveBayes(m) => {
            writeln!(out, "nb v1 k={}", m.smoothing_k).unwrap();
            (&m.classes, m.vocab_size)
        }
        ClassifierModel::Logistic(m) => {
            let h = &m.hyper;
            writeln!(
                out,
                "lr v1 learning_rate={} epochs={} batch_size={} l2={} seed={}",
                h.learning_rate, h.epochs, h.batch_size, h.l2, h.seed
            )
            .unwrap();
            (&m.classes, m.vocab_size)
        }
    };
    assert_eq!(vocab_size, vocab.len(), "classifier and vocabulary disagree on size");
    writeln!(out, "classes {}", classes.len()).unwrap();
    for c in classes {
        writeln!(out, "{c}").unwrap();
    }
    writeln!(out, "vocab {}", vocab.len()).unwrap();
    for s in vocab.surfaces() {
        writeln!(out, "{s}").unwrap();
    }
    match model {
        ClassifierModel::NaiveBayes(m) => {
            writeln!(out, "{}", row(&m.log_priors)).unwrap();
            for r in m.log_likelihoods.chunks(m.vocab_size) {
                writeln!(out, "{}", row(r)).unwrap();
            }
        }
        ClassifierModel::Logistic(m) => {
            for r in m.weights.chunks(m.vocab_size) {
                writeln!(out, "{}", row(r)).unwrap();
            }
            writeln!(out, "{}", row(&m.bias)).unwrap();
        }
    }
    out
}

pub fn save_classifier(model: &ClassifierModel, vocab: &Vocabulary, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, classifier_to_text(model, vocab)).map_err(|e| Error::io(path, e))
}

pub fn load_classifier(path: impl AsRef<Path>) -> Result<(ClassifierModel, Vocabulary)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    classifier_from_text(&text, path)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    origin: &'a Path,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l)
            }
            None => Err(Error::parse(
                self.origin,
                self.line + 1,
                format!("unexpected end of file, expected {what}"),
            )),
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.origin, self.line, message)
    }

    fn list(&mut self, keyword: &str) -> Result<Vec<String>> {
        let header = self.next(keyword)?;
        let n: usize = header
            .strip_prefix(keyword)
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| self.err(format!("expected `{keyword} <n>`")))?;
        (0..n).map(|_| self.next(keyword).map(str::to_string)).collect()
    }

    fn floats(&mut self, expected: usize) -> Result<Vec<f64>> {
        let l = self.next("parameter row")?;
        let values: Vec<f64> = l
            .split(' ')
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| self.err(format!("bad number: {e}")))?;
        if values.len() != expected {
            return Err(self.err(format!("expected {expected} values, found {}", values.len())));
        }
        Ok(values)
    }
}

fn field<T: std::str::FromStr>(fields: &[&str], name: &str) -> Option<T> {
    fields
        .iter()
        .find_map(|f| f.strip_prefix(name).and_then(|r| r.strip_prefix('=')))
        .and_then(|v| v.parse().ok())
}

pub fn classifier_from_text(text: &str, origin: &Path) -> Result<(ClassifierModel, Vocabulary)> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        origin,
        line: 0,
    };
    let header = lines.next("header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let kind = match fields.as_slice() {
        ["nb", "v1", ..] => "nb",
        ["lr", "v1", ..] => "lr",
        _ => return Err(lines.err(format!("unknown classifier header {header:?}"))),
    };
    let classes = lines.list("classes")?;
    let surfaces = lines.list("vocab")?;
    let reserved = Vocabulary::from_surfaces(std::iter::empty::<String>())?;
    if surfaces.len() < Vocabulary::NUM_RESERVED || surfaces[..Vocabulary::NUM_RESERVED] != *reserved.surfaces() {
        return Err(lines.err("vocabulary must start with the reserved tokens"));
    }
    let vocab = Vocabulary::from_surfaces(surfaces.into_iter().skip(Vocabulary::NUM_RESERVED))
        .map_err(|e| lines.err(e.to_string()))?;
    let v = vocab.len();
    let model = if kind == "nb" {
        let smoothing_k = field(&fields, "k").ok_or_else(|| Error::parse(origin, 1, "missing k"))?;
        let log_priors = lines.floats(classes.len())?;
        let mut log_likelihoods = Vec::with_capacity(classes.len() * v);
        for _ in 0..classes.len() {
            log_likelihoods.extend(lines.floats(v)?);
        }
        ClassifierModel::NaiveBayes(NaiveBayesModel {
            classes,
            smoothing_k,
            log_priors,
            log_likelihoods,
            vocab_size: v,
        })
    } else {
        let missing = |name: &str| Error::parse(origin, 1, format!("missing {name}"));
        let hyper = LogisticHyperparameters {
            learning_rate: field(&fields, "learning_rate").ok_or_else(|| missing("learning_rate"))?,
            epochs: field(&fields, "epochs").ok_or_else(|| missing("epochs"))?,
            batch_size: field(&fields, "batch_size").ok_or_else(|| missing("batch_size"))?,
            l2: field(&fields, "l2").ok_or_else(|| missing("l2"))?,
            seed: field(&fields, "seed").ok_or_else(|| missing("seed"))?,
        };
        let mut weights = Vec::with_capacity(classes.len() * v);
        for _ in 0..classes.len() {
            weights.extend(lines.floats(v)?);
        }
        let bias = lines.floats(classes.len())?;
        let mut model = LogisticModel::zeros(classes, v, hyper);
        model.weights = weights;
        model.bias = bias;
        ClassifierModel::Logistic(model)
    };
    Ok((model, vocab))
}
