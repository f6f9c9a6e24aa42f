//! In-domain / out-of-domain evaluation, ablation sweeps and significance
//! tests.

mod benchmark;
mod stats;
mod sweep;

pub use benchmark::{nested_subsample, run_benchmark, AugmentMethod, BenchmarkConfig, BenchmarkData, LabelPolicyKind};
pub use stats::{paired_bootstrap, wilcoxon_rank_sum, StatMethod, StatTestResult, MIN_RESAMPLES};
pub use sweep::{run_sweep, sweep_to_tsv, SweepAxis, SweepRow, SweepSpec};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::corpus::{Dataset, TokenId};
use crate::error::{Error, Result};
use crate::models::Classifier;

/// Accuracies indexed `[seed][train domain][test domain]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainMatrix {
    pub domains: Vec<String>,
    pub seeds: Vec<u64>,
    pub accuracy: Vec<Vec<Vec<f64>>>,
}

impl DomainMatrix {
    pub fn num_domains(&self) -> usize {
        self.domains.len()
    }

    /// Mean over seeds of one (train, test) cell.
    pub fn pair_mean(&self, train: usize, test: usize) -> f64 {
        mean(self.accuracy.iter().map(|m| m[train][test]))
    }

    /// Diagonal cells averaged over seeds, in domain order.
    pub fn id_pair_means(&self) -> Vec<f64> {
        (0..self.num_domains()).map(|d| self.pair_mean(d, d)).collect()
    }

    /// Off-diagonal cells averaged over seeds, row-major.
    pub fn ood_pair_means(&self) -> Vec<f64> {
        self.off_diagonal().map(|(a, b)| self.pair_mean(a, b)).collect()
    }

    /// Diagonal mean of each seed's matrix.
    pub fn per_seed_id(&self) -> Vec<f64> {
        self.accuracy
            .iter()
            .map(|m| mean((0..m.len()).map(|d| m[d][d])))
            .collect()
    }

    /// Off-diagonal mean of each seed's matrix.
    pub fn per_seed_ood(&self) -> Vec<f64> {
        self.accuracy
            .iter()
            .map(|m| mean(self.off_diagonal().map(|(a, b)| m[a][b])))
            .collect()
    }

    pub fn id_mean(&self) -> f64 {
        mean(self.per_seed_id().into_iter())
    }

    pub fn ood_mean(&self) -> f64 {
        mean(self.per_seed_ood().into_iter())
    }

    /// Sample standard deviation of the per-seed OOD means; 0 for one seed.
    pub fn ood_std(&self) -> f64 {
        sample_std(&self.per_seed_ood())
    }

    /// Concatenates matrices over disjoint seed sets.
    pub fn concat(parts: Vec<DomainMatrix>) -> Result<DomainMatrix> {
        let mut iter = parts.into_iter();
        let mut out = iter.next().ok_or(Error::EmptyDataset)?;
        for part in iter {
            if part.domains != out.domains {
                return Err(Error::Invalid("cannot join matrices over different domains".into()));
            }
            out.seeds.extend(part.seeds);
            out.accuracy.extend(part.accuracy);
        }
        Ok(out)
    }

    /// One `seed train test accuracy` row per cell, 6 decimals.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("seed\ttrain\ttest\taccuracy\n");
        for (seed, m) in self.seeds.iter().zip(&self.accuracy) {
            for (a, row) in m.iter().enumerate() {
                for (b, acc) in row.iter().enumerate() {
                    out.push_str(&format!("{seed}\t{}\t{}\t{acc:.6}\n", self.domains[a], self.domains[b]));
                }
            }
        }
        out
    }

    pub fn summary(&self) -> serde_json::Value {
        json!({
            "domains": self.domains,
            "seeds": self.seeds,
            "id_mean": self.id_mean(),
            "ood_mean": self.ood_mean(),
            "ood_std": self.ood_std(),
            "per_seed_ood": self.per_seed_ood(),
            "id_pair_means": self.id_pair_means(),
            "ood_pair_means": self.ood_pair_means(),
        })
    }

    fn off_diagonal(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.num_domains();
        (0..n).flat_map(move |a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
    }
}

/// Fraction of examples whose argmax prediction equals the hard label.
pub fn accuracy<C: Classifier + ?Sized>(model: &C, test: &Dataset<TokenId>) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let correct = test
        .examples
        .iter()
        .filter(|e| model.predict(&e.tokens) == e.label.argmax())
        .count();
    Ok(correct as f64 / test.len() as f64)
}

/// Fits `trainer(train_set, domain_index, seed)` for every training domain
/// and seed, then scores it on every test domain. Jobs run on the current
/// rayon pool; the result is in seed-then-domain order.
pub fn evaluate_matrix<C, F>(
    train_sets: &[Dataset<TokenId>],
    test_sets: &[Dataset<TokenId>],
    trainer: F,
    seeds: &[u64],
) -> Result<DomainMatrix>
where
    C: Classifier,
    F: Fn(&Dataset<TokenId>, usize, u64) -> Result<C> + Sync,
{
    if train_sets.len() < 2 || train_sets.len() != test_sets.len() {
        return Err(Error::Invalid(format!(
            "need matching train and test sets for at least 2 domains, got {} and {}",
            train_sets.len(),
            test_sets.len()
        )));
    }
    if seeds.is_empty() {
        return Err(Error::param("seeds", "at least one seed is required"));
    }
    let classes = &train_sets[0].classes;
    for ds in train_sets.iter().chain(test_sets) {
        if &ds.classes != classes {
            return Err(Error::ClassMismatch(format!(
                "classes {:?} differ from {classes:?}",
                ds.classes
            )));
        }
    }
    let domains = train_sets
        .iter()
        .enumerate()
        .map(|(d, ds)| match ds.examples.first() {
            Some(e) => e.domain.clone(),
            None => format!("domain{d}"),
        })
        .collect();

    let n = train_sets.len();
    let jobs: Vec<(usize, usize)> = (0..seeds.len()).flat_map(|s| (0..n).map(move |d| (s, d))).collect();
    let rows: Vec<Vec<f64>> = jobs
        .par_iter()
        .map(|&(s, d)| {
            let model = trainer(&train_sets[d], d, seeds[s])?;
            if model.classes() != classes.as_slice() {
                return Err(Error::ClassMismatch(format!(
                    "trained model classes {:?} differ from {classes:?}",
                    model.classes()
                )));
            }
            test_sets.iter().map(|t| accuracy(&model, t)).collect()
        })
        .collect::<Result<_>>()?;
    let accuracy = rows.chunks(n).map(|c| c.to_vec()).collect();
    Ok(DomainMatrix {
        domains,
        seeds: seeds.to_vec(),
        accuracy,
    })
}

pub(crate) fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

pub(crate) fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values.iter().copied());
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}
