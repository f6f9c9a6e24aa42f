use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde_json::json;
use ssmba_core::augment::{baseline_augment, decode_augmented, ssmba_augment, AugmentConfig, BaselineMethod};
use ssmba_core::corpus::{
    build_vocabulary, generate_synthetic, load_jsonl, load_jsonl_with_classes, write_jsonl, Dataset, Example,
    LabelValue, SyntheticSpec, TextDataset, TokenId, Vocabulary,
};
use ssmba_core::corruption::{load_synonym_table, CorruptionConfig, EdaMix};
use ssmba_core::eval::{
    evaluate_matrix, paired_bootstrap, run_sweep, sweep_to_tsv, wilcoxon_rank_sum, AugmentMethod, BenchmarkConfig,
    BenchmarkData, LabelPolicyKind, SweepSpec,
};
use ssmba_core::labeling::{LabelPolicy, Teacher};
use ssmba_core::models::{
    load_classifier, lr_fit, nb_fit, save_classifier, ClassifierKind, ClassifierModel, LogisticHyperparameters,
};
use ssmba_core::reconstruction::{
    train_count_mlm, CountMlmModel, ReconstructionBackend, RemoteBackend, SamplingStrategy,
};

use crate::args::{
    AugmentArgs, ClassifierArgs, Command, EvalArgs, StatsArgs, SweepArgs, SynthArgs, TrainClfArgs, TrainMlmArgs,
};
use crate::error::CliError;

type CliResult<T = ()> = Result<T, CliError>;

pub fn run(command: Command) -> CliResult {
    match command {
        Command::Synth(a) => synth(a),
        Command::TrainMlm(a) => train_mlm(a),
        Command::TrainClf(a) => train_clf(a),
        Command::Augment(a) => augment(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
        Command::Stats(a) => stats(a),
    }
}

fn usage(flag: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("--{flag}: {message}"))
}

fn parse_flag<T>(flag: &str, value: &str) -> CliResult<T>
where
    T: std::str::FromStr<Err = ssmba_core::Error>,
{
    value.parse().map_err(|e| usage(flag, e))
}

fn write_file(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Writes pretty JSON to `path`, or to standard output.
fn emit_json(path: Option<&Path>, value: &serde_json::Value) -> CliResult {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize") + "\n";
    match path {
        Some(p) => write_file(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn synth(a: SynthArgs) -> CliResult {
    let spec = SyntheticSpec::standard(a.domains, a.per_domain, a.classes);
    let data = generate_synthetic(&spec, a.seed)?;
    fs::create_dir_all(&a.out_dir).map_err(|e| CliError::Data(format!("{}: {e}", a.out_dir.display())))?;
    for domain in &data.domains {
        write_jsonl(&data.filter_domain(domain), a.out_dir.join(format!("{domain}.jsonl")))?;
    }
    Ok(())
}

/// Pools token sequences from several files; labels are irrelevant here.
fn pooled_text(paths: &[impl AsRef<Path>]) -> CliResult<TextDataset> {
    let mut examples = Vec::new();
    let mut domains = Vec::new();
    for path in paths {
        let ds = load_jsonl(path)?;
        for e in ds.examples {
            if !domains.contains(&e.domain) {
                domains.push(e.domain.clone());
            }
            examples.push(Example::original(e.tokens, LabelValue::Hard(0), e.domain));
        }
    }
    domains.sort();
    Ok(TextDataset::new(examples, vec!["unlabeled".into()], domains)?)
}

fn train_mlm(a: TrainMlmArgs) -> CliResult {
    let text = pooled_text(&a.input)?;
    let vocab = build_vocabulary(&[&text], a.min_count)?;
    let model = train_count_mlm(&text.encode(&vocab), &vocab, a.order, a.smoothing)?;
    model.save(&a.output)?;
    Ok(())
}

fn fit_classifier(
    c: &ClassifierArgs,
    ds: &Dataset<TokenId>,
    vocab_size: usize,
    seed: u64,
) -> CliResult<ClassifierModel> {
    let model = match parse_flag::<ClassifierKind>("model", &c.model)? {
        ClassifierKind::NaiveBayes => ClassifierModel::NaiveBayes(nb_fit(ds, vocab_size, c.nb_smoothing)?),
        ClassifierKind::Logistic => {
            let hyper = LogisticHyperparameters {
                learning_rate: c.learning_rate,
                epochs: c.epochs,
                batch_size: c.batch_size,
                l2: c.l2,
                seed,
            };
            ClassifierModel::Logistic(lr_fit(ds, vocab_size, &hyper)?)
        }
    };
    Ok(model)
}

fn train_clf(a: TrainClfArgs) -> CliResult {
    let text = load_jsonl(&a.input)?;
    let vocab = build_vocabulary(&[&text], 1)?;
    let model = fit_classifier(&a.classifier, &text.encode(&vocab), vocab.len(), a.seed)?;
    save_classifier(&model, &vocab, &a.output)?;
    Ok(())
}

fn corruption_config(pct: f64, split: &str) -> CliResult<CorruptionConfig> {
    let parts: Vec<f64> = split
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage("split", format!("{split:?} is not three comma-separated numbers")))?;
    let [mask_frac, random_frac, keep_frac] = parts[..] else {
        return Err(usage("split", format!("{split:?} must have exactly three fractions")));
    };
    let config = CorruptionConfig {
        corrupt_pct: pct,
        mask_frac,
        random_frac,
        keep_frac,
        exclude_reserved: true,
    };
    config.validate().map_err(|e| usage("split", e))?;
    Ok(config)
}

enum Backend {
    Builtin(CountMlmModel),
    Remote(RemoteBackend),
}

fn augment(a: AugmentArgs) -> CliResult {
    let corruption = corruption_config(a.corrupt_pct, &a.split)?;
    let strategy: SamplingStrategy = parse_flag("sampling", &a.sampling)?;
    let method: AugmentMethod = parse_flag("method", &a.method)?;
    let label: LabelPolicyKind = parse_flag("label", &a.label)?;
    if method == AugmentMethod::None {
        return Err(usage("method", "`none` produces no augmentation"));
    }
    if a.num_aug == 0 {
        return Err(usage("num-aug", "must be at least 1"));
    }
    if method == AugmentMethod::Ssmba && a.backend.is_none() {
        return Err(usage("backend", "ssmba needs builtin:PATH or remote:URL"));
    }
    if matches!(method, AugmentMethod::Eda { .. }) && a.synonyms.is_none() {
        return Err(usage("synonyms", "eda needs a synonym table"));
    }

    let text = load_jsonl(&a.input)?;
    let backend = match a.backend.as_deref() {
        None => None,
        Some(spec) => Some(match spec.split_once(':') {
            Some(("builtin", path)) => Backend::Builtin(CountMlmModel::load(path)?),
            Some(("remote", url)) => {
                let top_k = match strategy {
                    SamplingStrategy::TopK(k) => Some(k),
                    SamplingStrategy::Unrestricted => None,
                };
                Backend::Remote(RemoteBackend::new(url, build_vocabulary(&[&text], 1)?).with_top_k(top_k))
            }
            _ => return Err(usage("backend", format!("{spec:?} is not builtin:PATH or remote:URL"))),
        }),
    };
    let vocab = match &backend {
        Some(Backend::Builtin(m)) => m.vocab().clone(),
        Some(Backend::Remote(r)) => r.vocab().clone(),
        None => build_vocabulary(&[&text], 1)?,
    };
    let data = text.encode(&vocab);

    let policy = match label {
        LabelPolicyKind::Preserve => LabelPolicy::Preserve,
        kind => {
            let teacher = match &a.teacher {
                Some(path) => {
                    let (model, teacher_vocab) = load_classifier(path)?;
                    Teacher::with_vocabularies(Arc::new(model), &teacher_vocab, &vocab)
                }
                None => Teacher::new(Arc::new(nb_fit(&data, vocab.len(), 1.0)?)),
            };
            if kind == LabelPolicyKind::Hard {
                LabelPolicy::Hard(teacher)
            } else {
                LabelPolicy::Soft(teacher)
            }
        }
    };
    let config = AugmentConfig {
        corruption,
        strategy,
        policy,
        num_aug: a.num_aug,
        master_seed: a.seed,
        keep_duplicates: !a.drop_duplicates,
    };
    let (out, report) = match (&method, &backend) {
        (AugmentMethod::Ssmba, Some(Backend::Builtin(m))) => ssmba_augment(&data, m, &config)?,
        (AugmentMethod::Ssmba, Some(Backend::Remote(r))) => ssmba_augment(&data, r, &config)?,
        (AugmentMethod::WordDropout { p }, _) => {
            baseline_augment(&data, &vocab, &BaselineMethod::WordDropout { p: *p }, &config)?
        }
        (AugmentMethod::Eda { alpha }, _) => {
            let path = a.synonyms.as_ref().expect("checked above");
            let synonyms = synonym_ids(&load_synonym_table(path)?, &vocab);
            let method = BaselineMethod::Eda {
                alpha: *alpha,
                mix: EdaMix::default(),
                synonyms,
            };
            baseline_augment(&data, &vocab, &method, &config)?
        }
        _ => unreachable!("validated above"),
    };
    write_jsonl(&decode_augmented(&out, &text, &vocab), &a.output)?;
    emit_json(
        a.report.as_deref(),
        &serde_json::to_value(&report).expect("report serializes"),
    )
}

/// Keeps table entries whose words are all in the vocabulary.
fn synonym_ids(table: &HashMap<String, Vec<String>>, vocab: &Vocabulary) -> HashMap<TokenId, Vec<TokenId>> {
    table
        .iter()
        .filter_map(|(word, syns)| {
            let id = vocab.get(word)?;
            let ids: Vec<TokenId> = syns.iter().filter_map(|s| vocab.get(s)).collect();
            (!ids.is_empty()).then_some((id, ids))
        })
        .collect()
}

fn eval(a: EvalArgs) -> CliResult {
    if a.train.len() != a.test.len() {
        return Err(usage(
            "test",
            format!("{} test files for {} training files", a.test.len(), a.train.len()),
        ));
    }
    let first = load_jsonl(&a.train[0])?;
    let classes = first.classes.clone();
    let mut train_text = vec![first];
    for path in &a.train[1..] {
        train_text.push(load_jsonl_with_classes(path, &classes)?);
    }
    let test_text = a
        .test
        .iter()
        .map(|p| load_jsonl_with_classes(p, &classes))
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&TextDataset> = train_text.iter().collect();
    let vocab = build_vocabulary(&refs, 1)?;
    let train: Vec<_> = train_text.iter().map(|d| d.encode(&vocab)).collect();
    let test: Vec<_> = test_text.iter().map(|d| d.encode(&vocab)).collect();
    parse_flag::<ClassifierKind>("model", &a.classifier.model)?;
    let trainer = |ds: &Dataset<TokenId>, _: usize, seed: u64| {
        fit_classifier(&a.classifier, ds, vocab.len(), seed).map_err(|e| ssmba_core::Error::Invalid(e.to_string()))
    };
    let matrix = evaluate_matrix(&train, &test, trainer, &a.seeds)?;
    write_file(&a.output, &matrix.to_tsv())?;
    emit_json(a.summary.as_deref(), &matrix.summary())
}

fn sweep(a: SweepArgs) -> CliResult {
    let spec = SweepSpec {
        axis: parse_flag("axis", &a.axis)?,
        values: a.values.clone(),
        seeds_per_value: a.seeds,
    };
    spec.validate().map_err(|e| usage("values", e))?;
    let base = BenchmarkConfig {
        synthetic: SyntheticSpec::standard(a.domains, a.train_per_domain + a.test_per_domain, a.classes),
        train_per_domain: a.train_per_domain,
        data_seed: a.data_seed,
        mlm_order: a.mlm_order,
        mlm_smoothing: a.mlm_smoothing,
        classifier: parse_flag("model", &a.model)?,
        method: parse_flag("method", &a.method)?,
        corruption: corruption_config(a.corrupt_pct, &a.split)?,
        strategy: parse_flag("sampling", &a.sampling)?,
        label_policy: parse_flag("label", &a.label)?,
        num_aug: a.num_aug,
        train_size: None,
    };
    let data = BenchmarkData::build(&base)?;
    let rows = run_sweep(&spec, &base, &data)?;
    write_file(&a.output, &sweep_to_tsv(spec.axis, &rows))?;
    match &a.summary {
        Some(path) => emit_json(Some(path), &json!({ "axis": spec.axis, "rows": rows })),
        None => Ok(()),
    }
}

fn read_scores(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut scores = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value = line
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| CliError::Data(format!("{}:{}: {line:?} is not a number", path.display(), idx + 1)))?;
        scores.push(value);
    }
    Ok(scores)
}

fn stats(a: StatsArgs) -> CliResult {
    let xs = read_scores(&a.a)?;
    let ys = read_scores(&a.b)?;
    let result = match a.test.as_str() {
        "wilcoxon" => wilcoxon_rank_sum(&xs, &ys)?,
        "bootstrap" => paired_bootstrap(&xs, &ys, a.resamples, a.seed)?,
        other => return Err(usage("test", format!("{other:?} is not wilcoxon or bootstrap"))),
    };
    emit_json(
        a.output.as_deref(),
        &json!({
            "test": a.test,
            "n_a": xs.len(),
            "n_b": ys.len(),
            "statistic": result.statistic,
            "p_value": result.p_value,
            "method": result.method,
        }),
    )
}
