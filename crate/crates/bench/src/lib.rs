//! Shared fixtures for the benchmarks.

use ssmba_core::corpus::{build_vocabulary, generate_synthetic, Dataset, SyntheticSpec, TokenId, Vocabulary};
use ssmba_core::reconstruction::{train_count_mlm, CountMlmModel};

pub struct Fixture {
    pub vocab: Vocabulary,
    pub data: Dataset<TokenId>,
    pub mlm: CountMlmModel,
}

/// Synthetic corpus of `domains x per_domain` examples with a count MLM
/// trained on all of it.
pub fn fixture(domains: usize, per_domain: usize, order: usize) -> Fixture {
    let text = generate_synthetic(&SyntheticSpec::standard(domains, per_domain, 2), 0).expect("synthetic corpus");
    let vocab = build_vocabulary(&[&text], 1).expect("vocabulary");
    let data = text.encode(&vocab);
    let mlm = train_count_mlm(&data, &vocab, order, 0.1).expect("count mlm");
    Fixture { vocab, data, mlm }
}
