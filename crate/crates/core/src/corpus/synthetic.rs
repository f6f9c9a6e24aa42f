//! Synthetic multi-domain sentiment corpus with a known labelling rule.
//!
//! Every sentence is a run of domain filler words with a contiguous block of
//! sentiment words inserted at a random offset. Sentiment words come from a
//! lexicon shared by all domains or, with probability
//! `domain_sentiment_rate`, from the domain's own sentiment lexicon, so a
//! classifier trained on one domain meets unfamiliar sentiment words in the
//! others. The label is a pure function of the sentiment-word counts.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::dataset::{Example, LabelValue, TextDataset};
use crate::error::{Error, Result};
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub num_domains: usize,
    pub examples_per_domain: usize,
    /// 2 (neg/pos) or 5 (star buckets "1".."5").
    pub num_classes: usize,
    /// Shared (positive, negative) sentiment words.
    pub sentiment_lexicon: (Vec<String>, Vec<String>),
    pub domain_filler_lexicons: Vec<Vec<String>>,
    /// Per-domain (positive, negative) sentiment words; may be empty lists.
    pub domain_sentiment_lexicons: Vec<(Vec<String>, Vec<String>)>,
    /// Probability a sentiment slot draws from the domain lexicon.
    pub domain_sentiment_rate: f64,
    /// Probability a slot takes the sentence's dominant polarity.
    pub polarity_coherence: f64,
    /// Inclusive sentence length bounds in tokens.
    pub length_range: (usize, usize),
    /// Inclusive bounds on the number of sentiment slots.
    pub sentiment_slots_range: (usize, usize),
}

impl SyntheticSpec {
    /// A benchmark-sized spec with generated lexicons: 40 filler words per
    /// domain, 4+4 shared sentiment words and 10+10 domain sentiment words.
    pub fn standard(num_domains: usize, examples_per_domain: usize, num_classes: usize) -> Self {
        let words = |prefix: &str, n: usize| -> Vec<String> { (0..n).map(|i| format!("{prefix}{i}")).collect() };
        SyntheticSpec {
            num_domains,
            examples_per_domain,
            num_classes,
            sentiment_lexicon: (words("good", 4), words("bad", 4)),
            domain_filler_lexicons: (0..num_domains)
                .map(|d| words(&format!("{}w", domain_name(d)), 40))
                .collect(),
            domain_sentiment_lexicons: (0..num_domains)
                .map(|d| {
                    (
                        words(&format!("{}good", domain_name(d)), 10),
                        words(&format!("{}bad", domain_name(d)), 10),
                    )
                })
                .collect(),
            domain_sentiment_rate: 0.7,
            polarity_coherence: 0.85,
            length_range: (8, 16),
            sentiment_slots_range: (1, 4),
        }
    }

    pub fn domain_names(&self) -> Vec<String> {
        (0..self.num_domains).map(domain_name).collect()
    }

    pub fn class_names(&self) -> Vec<String> {
        match self.num_classes {
            2 => vec!["neg".into(), "pos".into()],
            _ => (1..=self.num_classes).map(|i| i.to_string()).collect(),
        }
    }

    /// All positive words, shared and domain-specific.
    pub fn positive_words(&self) -> HashSet<&str> {
        let mut set: HashSet<&str> = self.sentiment_lexicon.0.iter().map(String::as_str).collect();
        for (pos, _) in &self.domain_sentiment_lexicons {
            set.extend(pos.iter().map(String::as_str));
        }
        set
    }

    /// All negative words, shared and domain-specific.
    pub fn negative_words(&self) -> HashSet<&str> {
        let mut set: HashSet<&str> = self.sentiment_lexicon.1.iter().map(String::as_str).collect();
        for (_, neg) in &self.domain_sentiment_lexicons {
            set.extend(neg.iter().map(String::as_str));
        }
        set
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::param("synthetic spec", m));
        if self.num_domains == 0 {
            return fail("num_domains must be positive");
        }
        if self.num_classes != 2 && self.num_classes != 5 {
            return fail("num_classes must be 2 or 5");
        }
        if self.domain_filler_lexicons.len() != self.num_domains {
            return fail("need one filler lexicon per domain");
        }
        if !self.domain_sentiment_lexicons.is_empty() && self.domain_sentiment_lexicons.len() != self.num_domains {
            return fail("need zero or one domain sentiment lexicon per domain");
        }
        if self.sentiment_lexicon.0.is_empty() || self.sentiment_lexicon.1.is_empty() {
            return fail("shared positive and negative lexicons must be non-empty");
        }
        if self.domain_filler_lexicons.iter().any(Vec::is_empty) {
            return fail("filler lexicons must be non-empty");
        }
        let (slots_min, slots_max) = self.sentiment_slots_range;
        if slots_min < 1 || slots_min > slots_max {
            return fail("sentiment slots range must satisfy 1 <= min <= max");
        }
        let (len_min, len_max) = self.length_range;
        if len_min < 1 || len_min > len_max {
            return fail("length range must satisfy 1 <= min <= max");
        }
        for p in [self.domain_sentiment_rate, self.polarity_coherence] {
            if !(0.0..=1.0).contains(&p) {
                return fail("rates must lie in [0, 1]");
            }
        }
        let pos = self.positive_words();
        let neg = self.negative_words();
        if !pos.is_disjoint(&neg) {
            return fail("positive and negative lexicons overlap");
        }
        for filler in self.domain_filler_lexicons.iter().flatten() {
            if pos.contains(filler.as_str()) || neg.contains(filler.as_str()) {
                return fail("filler lexicons overlap the sentiment lexicons");
            }
        }
        Ok(())
    }
}

fn domain_name(d: usize) -> String {
    format!("d{d}")
}

/// Label rule shared by the generator and by consumers that re-derive labels.
pub(crate) fn label_for_counts(num_classes: usize, positives: usize, negatives: usize) -> usize {
    if num_classes == 2 {
        usize::from(positives > negatives)
    } else {
        (num_classes * positives / (positives + negatives)).min(num_classes - 1)
    }
}

/// Deterministic in `(spec, seed)`.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<TextDataset> {
    spec.validate()?;
    let domains = spec.domain_names();
    let mut examples = Vec::with_capacity(spec.num_domains * spec.examples_per_domain);
    for (d, domain) in domains.iter().enumerate() {
        let mut rng = substream(seed, d as u64, 0);
        for _ in 0..spec.examples_per_domain {
            let (tokens, label) = sentence(spec, d, &mut rng);
            examples.push(Example::original(tokens, LabelValue::Hard(label), domain.clone()));
        }
    }
    TextDataset::new(examples, spec.class_names(), domains)
}

fn sentence<R: Rng>(spec: &SyntheticSpec, domain: usize, rng: &mut R) -> (Vec<String>, usize) {
    let (slots_min, slots_max) = spec.sentiment_slots_range;
    let (polarities, label) = loop {
        let k = rng.gen_range(slots_min..=slots_max);
        let dominant: bool = rng.gen();
        let polarities: Vec<bool> = (0..k)
            .map(|_| {
                if rng.gen_bool(spec.polarity_coherence) {
                    dominant
                } else {
                    !dominant
                }
            })
            .collect();
        let positives = polarities.iter().filter(|&&p| p).count();
        let negatives = k - positives;
        if spec.num_classes == 2 && positives == negatives {
            continue;
        }
        break (polarities, label_for_counts(spec.num_classes, positives, negatives));
    };

    let own = spec.domain_sentiment_lexicons.get(domain);
    let sentiment: Vec<String> = polarities
        .iter()
        .map(|&positive| {
            let shared = if positive {
                &spec.sentiment_lexicon.0
            } else {
                &spec.sentiment_lexicon.1
            };
            let local = own.map(|(p, n)| if positive { p } else { n }).filter(|l| !l.is_empty());
            let lexicon = match local {
                Some(l) if rng.gen_bool(spec.domain_sentiment_rate) => l,
                _ => shared,
            };
            lexicon.choose(rng).expect("non-empty lexicon").clone()
        })
        .collect();

    let (len_min, len_max) = spec.length_range;
    let length = rng.gen_range(len_min..=len_max).max(sentiment.len());
    let fillers = &spec.domain_filler_lexicons[domain];
    let mut tokens: Vec<String> = (0..length - sentiment.len())
        .map(|_| fillers.choose(rng).expect("non-empty lexicon").clone())
        .collect();
    let offset = rng.gen_range(0..=tokens.len());
    tokens.splice(offset..offset, sentiment);
    (tokens, label)
}
