//! The synthetic multi-domain benchmark: per-domain train and test splits,
//! a count MLM fitted on the pooled training text, and a trainer that
//! augments each domain's training set before fitting a student.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;

use super::{evaluate_matrix, DomainMatrix};
use crate::augment::{baseline_augment, ssmba_augment, AugmentConfig, BaselineMethod};
use crate::corpus::{build_vocabulary, generate_synthetic, Dataset, SyntheticSpec, TokenId, Vocabulary};
use crate::corruption::{CorruptionConfig, EdaMix};
use crate::error::{Error, Result};
use crate::labeling::{LabelPolicy, Teacher};
use crate::models::{ClassifierKind, ClassifierModel};
use crate::reconstruction::{train_count_mlm, CountMlmModel, SamplingStrategy};
use crate::rng::{mix64, rng_from_seed};

#[derive(Debug, Clone, PartialEq)]
pub enum AugmentMethod {
    None,
    Ssmba,
    WordDropout { p: f64 },
    Eda { alpha: f64 },
}

impl std::fmt::Display for AugmentMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AugmentMethod::None => write!(f, "none"),
            AugmentMethod::Ssmba => write!(f, "ssmba"),
            AugmentMethod::WordDropout { p } => write!(f, "dropout:{p}"),
            AugmentMethod::Eda { alpha } => write!(f, "eda:{alpha}"),
        }
    }
}

impl std::str::FromStr for AugmentMethod {
    type Err = Error;

    /// `none`, `ssmba`, `dropout[:P]` (default 0.1) or `eda[:ALPHA]` (default 0.1).
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let rate = |default: f64| -> Result<f64> {
            match arg {
                None => Ok(default),
                Some(a) => a
                    .parse::<f64>()
                    .ok()
                    .filter(|v| (0.0..=1.0).contains(v))
                    .ok_or_else(|| Error::param("method", format!("{a:?} is not a rate in [0, 1]"))),
            }
        };
        match name {
            "none" if arg.is_none() => Ok(AugmentMethod::None),
            "ssmba" if arg.is_none() => Ok(AugmentMethod::Ssmba),
            "dropout" => Ok(AugmentMethod::WordDropout { p: rate(0.1)? }),
            "eda" => Ok(AugmentMethod::Eda { alpha: rate(0.1)? }),
            _ => Err(Error::param("method", format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelPolicyKind {
    Preserve,
    Hard,
    Soft,
}

impl std::str::FromStr for LabelPolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "preserve" => Ok(LabelPolicyKind::Preserve),
            "hard" => Ok(LabelPolicyKind::Hard),
            "soft" => Ok(LabelPolicyKind::Soft),
            _ => Err(Error::param("label", format!("{s:?} is not preserve, hard or soft"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    /// `examples_per_domain` covers train and test together.
    pub synthetic: SyntheticSpec,
    pub train_per_domain: usize,
    pub data_seed: u64,
    pub mlm_order: usize,
    pub mlm_smoothing: f64,
    pub classifier: ClassifierKind,
    pub method: AugmentMethod,
    pub corruption: CorruptionConfig,
    pub strategy: SamplingStrategy,
    pub label_policy: LabelPolicyKind,
    pub num_aug: usize,
    /// Per-domain training size after nested subsampling; `None` uses all.
    pub train_size: Option<usize>,
}

impl Default for BenchmarkConfig {
    /// 4 domains, 2000 training and 1000 test examples each, naive Bayes.
    fn default() -> Self {
        BenchmarkConfig {
            synthetic: SyntheticSpec::standard(4, 3000, 2),
            train_per_domain: 2000,
            data_seed: 0,
            mlm_order: 1,
            mlm_smoothing: 0.01,
            classifier: ClassifierKind::NaiveBayes,
            method: AugmentMethod::Ssmba,
            corruption: CorruptionConfig::default(),
            strategy: SamplingStrategy::Unrestricted,
            label_policy: LabelPolicyKind::Preserve,
            num_aug: 5,
            train_size: None,
        }
    }
}

/// Generated splits plus everything derived from them once.
#[derive(Debug, Clone)]
pub struct BenchmarkData {
    pub vocab: Vocabulary,
    pub train: Vec<Dataset<TokenId>>,
    pub test: Vec<Dataset<TokenId>>,
    pub mlm: Arc<CountMlmModel>,
    /// Same-lexicon, same-polarity sentiment words, for EDA.
    pub synonyms: HashMap<TokenId, Vec<TokenId>>,
}

impl BenchmarkData {
    pub fn build(config: &BenchmarkConfig) -> Result<Self> {
        let spec = &config.synthetic;
        if config.train_per_domain == 0 || config.train_per_domain >= spec.examples_per_domain {
            return Err(Error::param(
                "train_per_domain",
                format!(
                    "must be in 1..{}, got {}",
                    spec.examples_per_domain, config.train_per_domain
                ),
            ));
        }
        let text = generate_synthetic(spec, config.data_seed)?;
        let vocab = build_vocabulary(&[&text], 1)?;
        let all = text.encode(&vocab);
        let mut train = Vec::new();
        let mut test = Vec::new();
        for domain in &all.domains {
            let examples = all.filter_domain(domain).examples;
            let (a, b) = examples.split_at(config.train_per_domain);
            train.push(all.with_examples(a.to_vec()));
            test.push(all.with_examples(b.to_vec()));
        }
        let pooled = all.with_examples(train.iter().flat_map(|d| d.examples.iter().cloned()).collect());
        let mlm = Arc::new(train_count_mlm(
            &pooled,
            &vocab,
            config.mlm_order,
            config.mlm_smoothing,
        )?);

        let mut lexicons = vec![&spec.sentiment_lexicon];
        lexicons.extend(&spec.domain_sentiment_lexicons);
        let mut synonyms = HashMap::new();
        for (pos, neg) in lexicons {
            for group in [pos, neg] {
                let ids: Vec<TokenId> = group.iter().filter_map(|w| vocab.get(w)).collect();
                for &id in &ids {
                    synonyms.insert(id, ids.iter().copied().filter(|&o| o != id).collect());
                }
            }
        }
        Ok(BenchmarkData {
            vocab,
            train,
            test,
            mlm,
            synonyms,
        })
    }

    /// Same splits with an MLM of another context order.
    pub fn with_mlm_order(&self, order: usize, smoothing_k: f64) -> Result<Self> {
        let first = &self.train[0];
        let pooled = first.with_examples(self.train.iter().flat_map(|d| d.examples.iter().cloned()).collect());
        Ok(BenchmarkData {
            mlm: Arc::new(train_count_mlm(&pooled, &self.vocab, order, smoothing_k)?),
            ..self.clone()
        })
    }
}

/// The first `size` elements of a seeded permutation, in original order.
/// Smaller sizes under the same seed are subsets of larger ones.
pub fn nested_subsample<T: Clone>(dataset: &Dataset<T>, size: usize, seed: u64) -> Result<Dataset<T>> {
    if size == 0 || size > dataset.len() {
        return Err(Error::param(
            "dataset_size",
            format!("must be in 1..={}, got {size}", dataset.len()),
        ));
    }
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let mut chosen = order[..size].to_vec();
    chosen.sort_unstable();
    Ok(dataset.with_examples(chosen.into_iter().map(|i| dataset.examples[i].clone()).collect()))
}

/// Trains one student per (seed, domain) on the augmented training split and
/// scores it on every test split. Seeds drive augmentation and, for
/// logistic regression, shuffling; the data itself is fixed by `data_seed`.
pub fn run_benchmark(data: &BenchmarkData, config: &BenchmarkConfig, seeds: &[u64]) -> Result<DomainMatrix> {
    let vocab_size = data.vocab.len();
    let trainer = |train: &Dataset<TokenId>, d: usize, seed: u64| -> Result<ClassifierModel> {
        let train = match config.train_size {
            Some(n) => nested_subsample(train, n, mix64(config.data_seed, d as u64, 1))?,
            None => train.clone(),
        };
        let augmented = augment_split(data, config, &train, mix64(seed, d as u64, 0))?;
        ClassifierModel::fit_seeded(config.classifier, &augmented, vocab_size, seed)
    };
    evaluate_matrix(&data.train, &data.test, trainer, seeds)
}

fn augment_split(
    data: &BenchmarkData,
    config: &BenchmarkConfig,
    train: &Dataset<TokenId>,
    master_seed: u64,
) -> Result<Dataset<TokenId>> {
    if config.num_aug == 0 || config.method == AugmentMethod::None {
        return Ok(train.clone());
    }
    let policy = match config.label_policy {
        LabelPolicyKind::Preserve => LabelPolicy::Preserve,
        kind => {
            let teacher = ClassifierModel::fit(config.classifier, train, data.vocab.len())?;
            let teacher = Teacher::new(Arc::new(teacher));
            if kind == LabelPolicyKind::Hard {
                LabelPolicy::Hard(teacher)
            } else {
                LabelPolicy::Soft(teacher)
            }
        }
    };
    let augment = AugmentConfig {
        corruption: config.corruption.clone(),
        strategy: config.strategy,
        policy,
        num_aug: config.num_aug,
        master_seed,
        keep_duplicates: true,
    };
    let (out, _) = match &config.method {
        AugmentMethod::Ssmba => ssmba_augment(train, data.mlm.as_ref(), &augment)?,
        AugmentMethod::WordDropout { p } => {
            baseline_augment(train, &data.vocab, &BaselineMethod::WordDropout { p: *p }, &augment)?
        }
        AugmentMethod::Eda { alpha } => {
            let method = BaselineMethod::Eda {
                alpha: *alpha,
                mix: EdaMix::default(),
                synonyms: data.synonyms.clone(),
            };
            baseline_augment(train, &data.vocab, &method, &augment)?
        }
        AugmentMethod::None => unreachable!("handled above"),
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchmarkConfig {
        BenchmarkConfig {
            synthetic: SyntheticSpec::standard(2, 150, 2),
            train_per_domain: 100,
            num_aug: 2,
            ..Default::default()
        }
    }

    #[test]
    fn splits_have_requested_sizes() {
        let data = BenchmarkData::build(&small()).unwrap();
        assert_eq!(data.train.len(), 2);
        assert!(data.train.iter().all(|d| d.len() == 100));
        assert!(data.test.iter().all(|d| d.len() == 50));
        assert_eq!(data.train[1].examples[0].domain, "d1");
    }

    #[test]
    fn nested_subsamples_are_nested() {
        let data = BenchmarkData::build(&small()).unwrap();
        let big = nested_subsample(&data.train[0], 80, 9).unwrap();
        let mid = nested_subsample(&data.train[0], 20, 9).unwrap();
        let small = nested_subsample(&data.train[0], 5, 9).unwrap();
        assert_eq!((big.len(), mid.len(), small.len()), (80, 20, 5));
        assert!(mid.examples.iter().all(|e| big.examples.contains(e)));
        assert!(small.examples.iter().all(|e| mid.examples.contains(e)));
        assert!(nested_subsample(&data.train[0], 101, 9).is_err());
    }

    #[test]
    fn every_method_runs() {
        let data = BenchmarkData::build(&small()).unwrap();
        for method in ["none", "ssmba", "dropout:0.2", "eda"] {
            let config = BenchmarkConfig {
                method: method.parse().unwrap(),
                ..small()
            };
            let m = run_benchmark(&data, &config, &[0, 1]).unwrap();
            assert_eq!(m.accuracy.len(), 2);
            assert!(m.accuracy.iter().flatten().flatten().all(|a| (0.0..=1.0).contains(a)));
        }
    }

    #[test]
    fn teacher_policies_run() {
        let data = BenchmarkData::build(&small()).unwrap();
        for policy in [LabelPolicyKind::Hard, LabelPolicyKind::Soft] {
            let config = BenchmarkConfig {
                label_policy: policy,
                ..small()
            };
            run_benchmark(&data, &config, &[0]).unwrap();
        }
    }

    #[test]
    fn method_names_round_trip() {
        for s in ["none", "ssmba", "dropout:0.45", "eda:0.2"] {
            assert_eq!(s.parse::<AugmentMethod>().unwrap().to_string(), s);
        }
        assert!("dropout:2".parse::<AugmentMethod>().is_err());
    }
}
