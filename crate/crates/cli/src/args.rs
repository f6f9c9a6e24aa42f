use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Corrupt-and-reconstruct data augmentation for text classification.
///
/// Every flag can also be set in a `--config` file of `key = value` lines
/// (`#` starts a comment; keys are flag names without the leading dashes).
/// Precedence: command-line flag, then config file, then `SSMBA_SEED`
/// (seeds only), then the built-in default.
/// Relative paths in a config file are resolved against its directory.
#[derive(Debug, Parser)]
#[command(name = "ssmba", version, args_override_self = true)]
pub struct Cli {
    /// Config file of `key = value` defaults for the chosen command.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads; output does not depend on this.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the synthetic multi-domain sentiment corpus, one JSONL file per domain.
    Synth(SynthArgs),
    /// Train the count-based masked-token model on one or more JSONL files.
    TrainMlm(TrainMlmArgs),
    /// Train a bag-of-words classifier.
    TrainClf(TrainClfArgs),
    /// Augment a JSONL dataset.
    Augment(AugmentArgs),
    /// Train on each domain and score on every domain; writes a TSV matrix and a JSON summary.
    ///
    /// The TSV has a header and one `seed train test accuracy` row per cell,
    /// accuracies with 6 decimals. The JSON summary holds the domains, seeds,
    /// in-domain and out-of-domain means, the standard deviation of per-seed
    /// out-of-domain means, and per-pair means averaged over seeds.
    Eval(EvalArgs),
    /// Sweep one setting on the synthetic benchmark; writes a TSV table.
    ///
    /// The TSV has a header `<axis> id_mean ood_mean ood_std` and one row per
    /// value, numbers with 6 decimals. Seeds 0..N drive augmentation; the
    /// data is fixed by --data-seed. The optional JSON adds per-seed
    /// out-of-domain accuracies.
    Sweep(SweepArgs),
    /// Significance test between two score files (one number per line).
    ///
    /// `wilcoxon` runs a two-sided rank-sum test (exact when both samples
    /// have at most 8 values); `bootstrap` reports the fraction of paired
    /// resamples in which the first system does not beat the second.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 4)]
    pub domains: usize,
    #[arg(long, default_value_t = 2000)]
    pub per_domain: usize,
    /// 2 (neg/pos) or 5 (star ratings).
    #[arg(long, default_value_t = 2)]
    pub classes: usize,
    #[arg(long, env = "SSMBA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving `<domain>.jsonl`.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainMlmArgs {
    /// Training JSONL files, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    /// Maximum context half-width.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Add-k smoothing constant.
    #[arg(long, default_value_t = 0.1)]
    pub smoothing: f64,
    /// Words rarer than this become `<unk>`.
    #[arg(long, default_value_t = 1)]
    pub min_count: usize,
}

#[derive(Debug, Args)]
pub struct ClassifierArgs {
    /// `nb` (naive Bayes) or `lr` (logistic regression).
    #[arg(long, default_value = "nb")]
    pub model: String,
    /// Naive Bayes add-k constant.
    #[arg(long, default_value_t = 1.0)]
    pub nb_smoothing: f64,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 20)]
    pub epochs: usize,
    #[arg(long, default_value_t = 16)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,
}

#[derive(Debug, Args)]
pub struct TrainClfArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    #[arg(long, env = "SSMBA_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Fraction of tokens to corrupt, in [0, 1].
    #[arg(long, default_value_t = 0.45, value_parser = unit_interval)]
    pub corrupt_pct: f64,
    /// Mask, random and keep fractions of corrupted tokens.
    #[arg(long, default_value = "0.8,0.1,0.1")]
    pub split: String,
    /// Augmented examples per input example.
    #[arg(long, default_value_t = 5)]
    pub num_aug: usize,
    /// `unrestricted` or `topk:K`.
    #[arg(long, default_value = "unrestricted")]
    pub sampling: String,
    /// `preserve`, `hard` or `soft`.
    #[arg(long, default_value = "preserve")]
    pub label: String,
    /// Classifier file for hard/soft labels; without it a naive Bayes
    /// teacher is fitted on the input.
    #[arg(long)]
    pub teacher: Option<PathBuf>,
    /// `builtin:PATH` (count MLM file) or `remote:URL`; required for ssmba.
    #[arg(long)]
    pub backend: Option<String>,
    /// `ssmba`, `dropout[:P]` or `eda[:ALPHA]`.
    #[arg(long, default_value = "ssmba")]
    pub method: String,
    /// Synonym table (`word<TAB>syn1,syn2`) for eda.
    #[arg(long)]
    pub synonyms: Option<PathBuf>,
    /// Drop augmented examples identical to their parent or an earlier sibling.
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true")]
    pub drop_duplicates: bool,
    #[arg(long, env = "SSMBA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Report destination; standard output when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Training JSONL files, one per domain, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub train: Vec<PathBuf>,
    /// Test JSONL files in the same domain order.
    #[arg(long, value_delimiter = ',', required = true)]
    pub test: Vec<PathBuf>,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    /// Seeds, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub seeds: Vec<u64>,
    /// Matrix TSV.
    #[arg(long)]
    pub output: PathBuf,
    /// JSON summary; standard output when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// dataset_size, corruption_pct, sampling_method, num_aug, label_policy or context_order.
    #[arg(long)]
    pub axis: String,
    /// Values, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<String>,
    #[arg(long, default_value_t = 10)]
    pub seeds: usize,
    #[arg(long, default_value_t = 4)]
    pub domains: usize,
    #[arg(long, default_value_t = 2000)]
    pub train_per_domain: usize,
    #[arg(long, default_value_t = 1000)]
    pub test_per_domain: usize,
    #[arg(long, default_value_t = 2)]
    pub classes: usize,
    #[arg(long, env = "SSMBA_SEED", default_value_t = 0)]
    pub data_seed: u64,
    #[arg(long, default_value_t = 1)]
    pub mlm_order: usize,
    #[arg(long, default_value_t = 0.01)]
    pub mlm_smoothing: f64,
    /// `nb` or `lr`.
    #[arg(long, default_value = "nb")]
    pub model: String,
    /// `none`, `ssmba`, `dropout[:P]` or `eda[:ALPHA]`.
    #[arg(long, default_value = "ssmba")]
    pub method: String,
    #[arg(long, default_value_t = 0.45, value_parser = unit_interval)]
    pub corrupt_pct: f64,
    #[arg(long, default_value = "0.8,0.1,0.1")]
    pub split: String,
    #[arg(long, default_value_t = 5)]
    pub num_aug: usize,
    #[arg(long, default_value = "unrestricted")]
    pub sampling: String,
    #[arg(long, default_value = "preserve")]
    pub label: String,
    /// Sweep TSV.
    #[arg(long)]
    pub output: PathBuf,
    /// JSON rows including per-seed OOD accuracies.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Scores of the first system.
    #[arg(long)]
    pub a: PathBuf,
    /// Scores of the second system.
    #[arg(long)]
    pub b: PathBuf,
    /// `wilcoxon` or `bootstrap`.
    #[arg(long, default_value = "wilcoxon")]
    pub test: String,
    #[arg(long, default_value_t = 10_000)]
    pub resamples: usize,
    #[arg(long, env = "SSMBA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Result JSON; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside the allowed range [0, 1]"))
    }
}
