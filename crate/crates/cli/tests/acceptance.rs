//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use ssmba_core::corpus::{Dataset, Example, LabelValue, TokenId, Vocabulary};
use ssmba_core::corruption::{mlm_corrupt, CorruptionAction, CorruptionConfig};
use ssmba_core::eval::{
    paired_bootstrap, run_benchmark, run_sweep, wilcoxon_rank_sum, AugmentMethod, BenchmarkConfig, BenchmarkData,
    DomainMatrix, SweepAxis, SweepSpec,
};
use ssmba_core::models::{LogisticHyperparameters, LogisticModel};
use ssmba_core::reconstruction::{
    gibbs_chain, sample_tokens, top_k_distribution, train_count_mlm, ContextShape, CountMlmModel, GibbsChainConfig,
    SamplingStrategy,
};
use ssmba_core::rng::rng_from_seed;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn regular_vocab(n: usize) -> Vocabulary {
    Vocabulary::from_surfaces((0..n).map(|i| format!("w{i}"))).unwrap()
}

fn corruption_exactness() -> Outcome {
    let vocab = regular_vocab(50);
    let mut rng = rng_from_seed(11);
    for call in 0..1000 {
        let len = rng.gen_range(1..=200usize);
        let p = rng.gen_range(1..=100usize);
        let tokens: Vec<TokenId> = (0..len).map(|_| rng.gen_range(3..vocab.len() as TokenId)).collect();
        let config = CorruptionConfig::with_pct(p as f64 / 100.0);
        let result = mlm_corrupt(&tokens, &config, &vocab, &mut rng).map_err(|e| e.to_string())?;
        let expected = ((p * len + 50) / 100).max(1);
        let mut distinct = result.positions.clone();
        distinct.dedup();
        ensure(result.positions.len() == expected && distinct.len() == expected, || {
            format!(
                "call {call}: len {len} pct {p}%: {} positions, expected {expected}",
                result.positions.len()
            )
        })?;
    }
    Ok("1000/1000 calls exact".into())
}

fn action_mix() -> Outcome {
    let vocab = regular_vocab(50);
    let config = CorruptionConfig::default();
    let mut rng = rng_from_seed(12);
    let mut counts = [0usize; 3];
    while counts.iter().sum::<usize>() < 20_000 {
        let tokens: Vec<TokenId> = (0..40).map(|_| rng.gen_range(3..vocab.len() as TokenId)).collect();
        let result = mlm_corrupt(&tokens, &config, &vocab, &mut rng).map_err(|e| e.to_string())?;
        for (&pos, action) in result.positions.iter().zip(&result.actions) {
            let slot = match action {
                CorruptionAction::Masked => {
                    ensure(result.corrupted_tokens[pos] == vocab.mask_id(), || {
                        "masked position not masked".into()
                    })?;
                    0
                }
                CorruptionAction::Randomized => 1,
                CorruptionAction::Kept => {
                    ensure(result.corrupted_tokens[pos] == tokens[pos], || {
                        "kept position changed".into()
                    })?;
                    2
                }
            };
            counts[slot] += 1;
        }
    }
    let total = counts.iter().sum::<usize>() as f64;
    let fracs: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let target = [0.8, 0.1, 0.1];
    let detail = format!(
        "mask/random/keep = {:.4}/{:.4}/{:.4} over {total} positions",
        fracs[0], fracs[1], fracs[2]
    );
    ensure(fracs.iter().zip(target).all(|(f, t)| (f - t).abs() <= 0.02), || {
        detail.clone()
    })?;
    Ok(detail)
}

fn sampling_oracles() -> Outcome {
    let mut rng = rng_from_seed(13);
    // coarse weights so ties are frequent
    let distributions: Vec<Vec<f64>> = (0..1000)
        .map(|_| {
            let v = rng.gen_range(2..12);
            let w: Vec<f64> = (0..v).map(|_| rng.gen_range(0..5) as f64).collect();
            let w = if w.iter().all(|&x| x == 0.0) { vec![1.0; v] } else { w };
            let s: f64 = w.iter().sum();
            w.iter().map(|x| x / s).collect()
        })
        .collect();
    let mut ties = 0;
    for (i, p) in distributions.iter().enumerate() {
        let max = p.iter().cloned().fold(f64::MIN, f64::max);
        let argmax = p.iter().position(|&x| x == max).unwrap();
        ties += (p.iter().filter(|&&x| x == max).count() > 1) as usize;
        let top1 = top_k_distribution(p, 1).map_err(|e| e.to_string())?;
        let one_hot: Vec<f64> = (0..p.len()).map(|j| if j == argmax { 1.0 } else { 0.0 }).collect();
        ensure(top1 == one_hot, || {
            format!("distribution {i}: top-1 is not the lowest-id argmax")
        })?;
        let drawn =
            sample_tokens(std::slice::from_ref(p), SamplingStrategy::TopK(1), &mut rng).map_err(|e| e.to_string())?;
        ensure(drawn[0] as usize == argmax, || {
            format!("distribution {i}: top-1 draw {} != {argmax}", drawn[0])
        })?;
    }
    for seed in 0..20 {
        for p in &distributions {
            let full = sample_tokens(
                std::slice::from_ref(p),
                SamplingStrategy::Unrestricted,
                &mut rng_from_seed(seed),
            );
            let topv = sample_tokens(
                std::slice::from_ref(p),
                SamplingStrategy::TopK(p.len()),
                &mut rng_from_seed(seed),
            );
            ensure(full.as_ref().ok() == topv.as_ref().ok(), || {
                "top-V draw differs from unrestricted".into()
            })?;
        }
    }
    let hand: [(&[f64], usize, &[f64]); 4] = [
        (&[0.5, 0.3, 0.2], 2, &[0.625, 0.375, 0.0]),
        (&[0.1, 0.2, 0.3, 0.4], 3, &[0.0, 2.0 / 9.0, 3.0 / 9.0, 4.0 / 9.0]),
        (&[0.1, 0.4, 0.4, 0.1], 1, &[0.0, 1.0, 0.0, 0.0]),
        (&[0.25, 0.25, 0.25, 0.25], 2, &[0.5, 0.5, 0.0, 0.0]),
    ];
    for (p, k, expected) in hand {
        let got = top_k_distribution(p, k).map_err(|e| e.to_string())?;
        ensure(got.iter().zip(expected).all(|(g, e)| (g - e).abs() <= 1e-12), || {
            format!("top-{k} of {p:?} gave {got:?}, expected {expected:?}")
        })?;
    }
    Ok(format!(
        "1000 argmax checks ({ties} with ties), 20000 top-V draws, 4 hand cases"
    ))
}

const HAND_CORPUS: [&str; 5] = [
    "the cat sat",
    "the dog sat",
    "a cat ran",
    "the cat ran",
    "a dog sat down",
];

fn hand_corpus() -> (Vocabulary, Dataset<TokenId>, Vec<Vec<TokenId>>) {
    let vocab = Vocabulary::from_surfaces(["the", "cat", "sat", "dog", "a", "ran", "down"]).unwrap();
    let sentences: Vec<Vec<TokenId>> = HAND_CORPUS
        .iter()
        .map(|s| vocab.encode_all(&s.split(' ').collect::<Vec<_>>()))
        .collect();
    let examples = sentences
        .iter()
        .map(|t| Example::original(t.clone(), LabelValue::Hard(0), "d"))
        .collect();
    let ds = Dataset::new(examples, vec!["c".into()], vec!["d".into()]).unwrap();
    (vocab, ds, sentences)
}

type Tally = BTreeMap<(usize, usize, Vec<TokenId>, Vec<TokenId>, TokenId), u64>;

fn naive_tally(sentences: &[Vec<TokenId>], order: usize) -> Tally {
    let mut tally = Tally::new();
    for s in sentences {
        for pos in 0..s.len() {
            for l in 0..=order {
                for r in 0..=order {
                    let left = s[pos.saturating_sub(l)..pos].to_vec();
                    let right = s[pos + 1..(pos + 1 + r).min(s.len())].to_vec();
                    *tally.entry((l, r, left, right, s[pos])).or_default() += 1;
                }
            }
        }
    }
    tally
}

/// Smoothed prediction recomputed from the naive tally.
fn naive_distribution(
    tally: &Tally,
    vocab: &Vocabulary,
    order: usize,
    k: f64,
    tokens: &[TokenId],
    pos: usize,
) -> Vec<f64> {
    let mut shapes: Vec<(usize, usize)> = (0..=order).flat_map(|l| (0..=order).map(move |r| (l, r))).collect();
    shapes.sort_by(|a, b| (b.0 + b.1).cmp(&(a.0 + a.1)).then(b.0.cmp(&a.0)));
    for (l, r) in shapes {
        let left = tokens[pos.saturating_sub(l)..pos].to_vec();
        let right = tokens[pos + 1..(pos + 1 + r).min(tokens.len())].to_vec();
        if left.iter().chain(&right).any(|&t| (t as usize) < 3) {
            continue;
        }
        let counts: Vec<u64> = (0..vocab.len() as TokenId)
            .map(|t| tally.get(&(l, r, left.clone(), right.clone(), t)).copied().unwrap_or(0))
            .collect();
        let total: u64 = counts.iter().sum();
        if total == 0 {
            continue;
        }
        let denom = total as f64 + k * vocab.num_regular() as f64;
        return (0..vocab.len())
            .map(|t| if t < 3 { 0.0 } else { (counts[t] as f64 + k) / denom })
            .collect();
    }
    unreachable!("the unigram context always matches")
}

fn count_mlm_oracle() -> Outcome {
    let (vocab, ds, sentences) = hand_corpus();
    let (order, k) = (2, 0.1);
    let model: CountMlmModel = train_count_mlm(&ds, &vocab, order, k).map_err(|e| e.to_string())?;
    let tally = naive_tally(&sentences, order);
    let stored: Tally = model
        .entries()
        .into_iter()
        .map(|e| ((e.shape.left, e.shape.right, e.left, e.right, e.token), e.count))
        .collect();
    ensure(stored == tally, || {
        format!("{} stored counts vs {} tabulated", stored.len(), tally.len())
    })?;
    ensure(model.shapes() == ContextShape::ladder(order).as_slice(), || {
        "unexpected shape ladder".into()
    })?;

    // the (2,2) context of "cat" in "the cat sat" is "the _ sat": 2 matches, one "cat"
    let probe = vocab.encode_all(&["the", "<mask>", "sat"]);
    let cat = model.distribution_at(&probe, 1)[vocab.encode("cat") as usize];
    ensure((cat - 1.1 / 2.7).abs() <= 1e-12, || {
        format!("P(cat | the _ sat) = {cat}, expected 1.1/2.7")
    })?;
    // all context masked: unigram over 16 tokens
    let all = vec![vocab.mask_id(); 3];
    let the = model.distribution_at(&all, 1)[vocab.encode("the") as usize];
    ensure((the - 3.1 / 16.7).abs() <= 1e-12, || {
        format!("unigram P(the) = {the}, expected 3.1/16.7")
    })?;

    let mut checked = 0;
    for s in &sentences {
        let n = s.len();
        for mask_set in 1u32..(1 << n) {
            let masked: Vec<TokenId> = (0..n)
                .map(|i| if mask_set >> i & 1 == 1 { vocab.mask_id() } else { s[i] })
                .collect();
            for pos in (0..n).filter(|i| mask_set >> i & 1 == 1) {
                let got = model.distribution_at(&masked, pos);
                let want = naive_distribution(&tally, &vocab, order, k, &masked, pos);
                ensure(got.iter().zip(&want).all(|(g, w)| (g - w).abs() <= 1e-12), || {
                    format!("sentence {s:?} masked {mask_set:b} position {pos}: {got:?} vs {want:?}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{} counts, {checked} masked predictions", stored.len()))
}

fn gibbs_fidelity() -> Outcome {
    let start = Instant::now();
    let vocab = Vocabulary::from_surfaces(["a", "b"]).unwrap();
    let rows = ["a a b", "a b b", "b a a", "a b a", "b b b"];
    let examples = rows
        .iter()
        .map(|r| {
            Example::original(
                vocab.encode_all(&r.split(' ').collect::<Vec<_>>()),
                LabelValue::Hard(0),
                "d",
            )
        })
        .collect();
    let ds = Dataset::new(examples, vec!["c".into()], vec!["d".into()]).unwrap();
    let model = train_count_mlm(&ds, &vocab, 1, 0.5).map_err(|e| e.to_string())?;
    let corruption = CorruptionConfig::with_pct(0.5);
    let (len, symbols) = (3usize, [3 as TokenId, 4]);
    let states: Vec<Vec<TokenId>> = (0..8)
        .map(|s| (0..len).map(|i| symbols[s >> i & 1]).collect())
        .collect();
    let index = |t: &[TokenId]| (0..len).map(|i| ((t[i] - 3) as usize) << i).sum::<usize>();

    // exact transition matrix: 2 of 3 positions, each masked, randomized to a
    // uniform regular token, or kept; then each resampled from the model
    let mut transition = vec![vec![0.0; 8]; 8];
    let pairs = [(0, 1), (0, 2), (1, 2)];
    for (from, state) in states.iter().enumerate() {
        for &(i, j) in &pairs {
            let options = |pos: usize| -> Vec<(TokenId, f64)> {
                vec![(vocab.mask_id(), 0.8), (3, 0.05), (4, 0.05), (state[pos], 0.1)]
            };
            for (ti, pi) in options(i) {
                for (tj, pj) in options(j) {
                    let mut corrupted = state.clone();
                    corrupted[i] = ti;
                    corrupted[j] = tj;
                    let di = model.distribution_at(&corrupted, i);
                    let dj = model.distribution_at(&corrupted, j);
                    for &si in &symbols {
                        for &sj in &symbols {
                            let mut next = corrupted.clone();
                            next[i] = si;
                            next[j] = sj;
                            transition[from][index(&next)] +=
                                pi * pj * di[si as usize] * dj[sj as usize] / pairs.len() as f64;
                        }
                    }
                }
            }
        }
    }
    for row in &transition {
        ensure((row.iter().sum::<f64>() - 1.0).abs() < 1e-9, || {
            "transition row does not sum to 1".into()
        })?;
    }
    let mut stationary = vec![1.0 / 8.0; 8];
    for _ in 0..10_000 {
        let mut next = vec![0.0; 8];
        for (from, p) in stationary.iter().enumerate() {
            for (to, t) in transition[from].iter().enumerate() {
                next[to] += p * t;
            }
        }
        stationary = next;
    }

    let (burn_in, samples) = (1_000, 100_000);
    let config = GibbsChainConfig {
        steps: burn_in + samples,
        corruption,
        strategy: SamplingStrategy::Unrestricted,
    };
    let chain = gibbs_chain(&states[0], &config, &model, &mut rng_from_seed(15)).map_err(|e| e.to_string())?;
    let mut empirical = [0.0; 8];
    for state in &chain[burn_in..] {
        ensure(state.iter().all(|t| symbols.contains(t)), || {
            format!("chain left the state space: {state:?}")
        })?;
        empirical[index(state)] += 1.0 / samples as f64;
    }
    let tv = 0.5
        * empirical
            .iter()
            .zip(&stationary)
            .map(|(e, s)| (e - s).abs())
            .sum::<f64>();
    let elapsed = start.elapsed();
    let detail = format!("TV {tv:.4} over {samples} samples in {:.2}s", elapsed.as_secs_f64());
    ensure(tv < 0.1 && elapsed < Duration::from_secs(60), || detail.clone())?;
    Ok(detail)
}

/// Doubled midranks by direct comparison.
fn doubled_ranks(pooled: &[f64]) -> Vec<i64> {
    pooled
        .iter()
        .map(|x| {
            let less = pooled.iter().filter(|y| *y < x).count() as i64;
            let equal = pooled.iter().filter(|y| *y == x).count() as i64;
            2 * less + equal + 1
        })
        .collect()
}

fn brute_force_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = doubled_ranks(&pooled);
    let (n, total) = (a.len(), pooled.len());
    let center = (n * (total + 1)) as i64;
    let observed = (ranks[..n].iter().sum::<i64>() - center).abs();
    let (mut extreme, mut count) = (0u64, 0u64);
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let sum: i64 = (0..total).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        count += 1;
        extreme += ((sum - center).abs() >= observed) as u64;
    }
    extreme as f64 / count as f64
}

fn statistics_oracles() -> Outcome {
    let mut rng = rng_from_seed(16);
    let mut cases = 0;
    for trial in 0..100 {
        let tied = trial % 2 == 0;
        for n in 1..=8 {
            for m in 1..=8 {
                let mut draw = |k: usize| -> Vec<f64> {
                    (0..k)
                        .map(|_| {
                            if tied {
                                rng.gen_range(0..4) as f64
                            } else {
                                rng.gen::<f64>()
                            }
                        })
                        .collect()
                };
                let (a, b) = (draw(n), draw(m));
                let got = wilcoxon_rank_sum(&a, &b).map_err(|e| e.to_string())?;
                let want = brute_force_p(&a, &b);
                ensure((got.p_value - want).abs() <= 1e-12, || {
                    format!("trial {trial} n={n} m={m}: p {} vs brute force {want}", got.p_value)
                })?;
                cases += 1;
            }
        }
    }
    let a: Vec<f64> = (0..30).map(|i| 0.8 + 0.001 * i as f64).collect();
    let b: Vec<f64> = a.iter().map(|x| x - 0.05).collect();
    let dominant = paired_bootstrap(&a, &b, 2000, 3).map_err(|e| e.to_string())?.p_value;
    let tie = paired_bootstrap(&a, &a, 2000, 3).map_err(|e| e.to_string())?.p_value;
    ensure(dominant == 0.0 && tie == 1.0, || {
        format!("bootstrap dominance p {dominant}, tie p {tie}")
    })?;
    Ok(format!("{cases} exact rank-sum cases, bootstrap dominance 0 and tie 1"))
}

fn perturbed(model: &LogisticModel, i: usize, delta: f64) -> LogisticModel {
    let mut out = model.clone();
    let nw = out.weights.len();
    if i < nw {
        out.weights[i] += delta;
    } else {
        out.bias[i - nw] += delta;
    }
    out
}

fn gradient_check() -> Outcome {
    let (vocab_size, num_classes) = (12usize, 3usize);
    let mut rng = rng_from_seed(17);
    let classes: Vec<String> = (0..num_classes).map(|c| format!("c{c}")).collect();
    let examples = (0..12)
        .map(|i| {
            let tokens: Vec<TokenId> = (0..rng.gen_range(1..8))
                .map(|_| rng.gen_range(3..vocab_size as TokenId))
                .collect();
            let label = if i % 3 == 0 {
                LabelValue::Hard(rng.gen_range(0..num_classes))
            } else {
                let w: Vec<f64> = (0..num_classes).map(|_| rng.gen_range(0.05..1.0)).collect();
                let s: f64 = w.iter().sum();
                LabelValue::soft(w.iter().map(|x| x / s).collect()).unwrap()
            };
            Example::original(tokens, label, "d")
        })
        .collect();
    let ds = Dataset::new(examples, classes.clone(), vec!["d".into()]).unwrap();
    let hyper = LogisticHyperparameters {
        l2: 1e-2,
        ..LogisticHyperparameters::default()
    };
    let eps = 1e-5;
    let mut worst: f64 = 0.0;
    for point in 0..20 {
        let mut model = LogisticModel::zeros(classes.clone(), vocab_size, hyper.clone());
        for w in model.weights.iter_mut().chain(model.bias.iter_mut()) {
            *w = rng.gen_range(-1.0..1.0);
        }
        let (gw, gb) = model.gradient(&ds);
        let analytic: Vec<f64> = gw.into_iter().chain(gb).collect();
        let mut numeric = Vec::with_capacity(analytic.len());
        for i in 0..analytic.len() {
            let plus = perturbed(&model, i, eps);
            let minus = perturbed(&model, i, -eps);
            numeric.push((plus.objective(&ds) - minus.objective(&ds)) / (2.0 * eps));
        }
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, n)| a - n).collect();
        let rel = norm(&diff) / norm(&analytic).max(norm(&numeric)).max(1e-300);
        worst = worst.max(rel);
        ensure(rel < 1e-4, || format!("point {point}: relative error {rel:e}"))?;
    }
    Ok(format!("worst relative error {worst:.2e} over 20 points"))
}

struct Benchmark {
    data: BenchmarkData,
    base: BenchmarkConfig,
    seeds: Vec<u64>,
}

impl Benchmark {
    fn run(&self, method: AugmentMethod) -> Result<DomainMatrix, String> {
        let config = BenchmarkConfig {
            method,
            ..self.base.clone()
        };
        run_benchmark(&self.data, &config, &self.seeds).map_err(|e| e.to_string())
    }
}

fn end_to_end(bench: &Benchmark, started: Instant) -> Outcome {
    let none = bench.run(AugmentMethod::None)?;
    let ssmba = bench.run(AugmentMethod::Ssmba)?;
    let drop_low = bench.run(AugmentMethod::WordDropout { p: 0.1 })?;
    let drop_high = bench.run(AugmentMethod::WordDropout { p: 0.45 })?;
    let test = wilcoxon_rank_sum(&ssmba.ood_pair_means(), &none.ood_pair_means()).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let detail = format!(
        "OOD ssmba {:.4} vs none {:.4} (rank-sum p {:.2e}), dropout 0.1 {:.4}, dropout 0.45 {:.4}, {:.1}s",
        ssmba.ood_mean(),
        none.ood_mean(),
        test.p_value,
        drop_low.ood_mean(),
        drop_high.ood_mean(),
        elapsed.as_secs_f64()
    );
    ensure(
        ssmba.ood_mean() >= none.ood_mean() + 0.005
            && test.p_value < 0.05
            && ssmba.ood_mean() >= drop_low.ood_mean()
            && ssmba.ood_mean() >= drop_high.ood_mean()
            && elapsed < Duration::from_secs(300),
        || detail.clone(),
    )?;
    Ok(detail)
}

fn sweep(bench: &Benchmark, axis: SweepAxis, values: [&str; 2]) -> Result<[(f64, f64); 2], String> {
    let spec = SweepSpec {
        axis,
        values: values.iter().map(|v| v.to_string()).collect(),
        seeds_per_value: bench.seeds.len(),
    };
    let rows = run_sweep(&spec, &bench.base, &bench.data).map_err(|e| e.to_string())?;
    Ok([(rows[0].ood_mean, rows[0].ood_std), (rows[1].ood_mean, rows[1].ood_std)])
}

fn sweep_shape(bench: &Benchmark) -> Outcome {
    let [(mid, _), (high, _)] = sweep(bench, SweepAxis::CorruptionPct, ["0.45", "0.95"])?;
    let detail = format!("OOD at 0.45 {mid:.4}, at 0.95 {high:.4}");
    ensure(mid >= high, || detail.clone())?;
    Ok(detail)
}

fn augmentation_variance(bench: &Benchmark) -> Outcome {
    let [(_, one), (_, eight)] = sweep(bench, SweepAxis::NumAug, ["1", "8"])?;
    let detail = format!("OOD std at m=1 {one:.5}, at m=8 {eight:.5}");
    ensure(eight <= one, || detail.clone())?;
    Ok(detail)
}

const PIPELINE: &[&[&str]] = &[
    &[
        "synth",
        "--domains",
        "2",
        "--per-domain",
        "150",
        "--seed",
        "5",
        "--out-dir",
        "data",
    ],
    &[
        "train-mlm",
        "--input",
        "data/d0.jsonl,data/d1.jsonl",
        "--output",
        "mlm.txt",
    ],
    &["train-clf", "--input", "data/d0.jsonl", "--output", "nb.txt"],
    &[
        "train-clf",
        "--input",
        "data/d0.jsonl",
        "--output",
        "lr.txt",
        "--model",
        "lr",
        "--epochs",
        "3",
        "--seed",
        "2",
    ],
    &[
        "augment",
        "--input",
        "data/d0.jsonl",
        "--output",
        "aug.jsonl",
        "--backend",
        "builtin:mlm.txt",
        "--num-aug",
        "3",
        "--seed",
        "9",
        "--report",
        "report.json",
    ],
    &[
        "augment",
        "--input",
        "data/d1.jsonl",
        "--output",
        "aug_soft.jsonl",
        "--backend",
        "builtin:mlm.txt",
        "--label",
        "soft",
        "--teacher",
        "lr.txt",
        "--sampling",
        "topk:5",
        "--drop-duplicates",
        "--seed",
        "4",
    ],
    &[
        "augment",
        "--input",
        "data/d1.jsonl",
        "--output",
        "aug_drop.jsonl",
        "--method",
        "dropout:0.2",
        "--seed",
        "1",
    ],
    &[
        "augment",
        "--input",
        "data/d1.jsonl",
        "--output",
        "aug_eda.jsonl",
        "--method",
        "eda:0.2",
        "--synonyms",
        "synonyms.tsv",
        "--seed",
        "1",
    ],
    &[
        "eval",
        "--train",
        "aug.jsonl,data/d1.jsonl",
        "--test",
        "data/d0.jsonl,data/d1.jsonl",
        "--seeds",
        "0,1",
        "--model",
        "lr",
        "--epochs",
        "2",
        "--output",
        "matrix.tsv",
        "--summary",
        "summary.json",
    ],
    &[
        "sweep",
        "--axis",
        "corruption_pct",
        "--values",
        "0.15,0.45",
        "--seeds",
        "2",
        "--domains",
        "2",
        "--train-per-domain",
        "100",
        "--test-per-domain",
        "50",
        "--output",
        "sweep.tsv",
        "--summary",
        "sweep.json",
    ],
    &["stats", "--a", "scores_a.txt", "--b", "scores_b.txt"],
    &[
        "stats",
        "--a",
        "scores_a.txt",
        "--b",
        "scores_b.txt",
        "--test",
        "bootstrap",
        "--resamples",
        "2000",
        "--output",
        "boot.json",
    ],
];

/// Runs the whole command pipeline in `dir`; returns every file produced and
/// every command's standard output.
fn run_pipeline(dir: &Path, workers: u16) -> Result<BTreeMap<String, Vec<u8>>, String> {
    std::fs::write(dir.join("scores_a.txt"), "0.81\n0.84\n0.79\n0.90\n0.85\n").unwrap();
    std::fs::write(dir.join("scores_b.txt"), "0.78\n0.80\n0.79\n0.83\n0.81\n").unwrap();
    std::fs::write(
        dir.join("synonyms.tsv"),
        "bad0\tbad1,d1bad0\nd1bad1\td1bad2,d1bad3\nd1good4\td1good0\n",
    )
    .unwrap();
    let mut outputs = BTreeMap::new();
    for (i, args) in PIPELINE.iter().enumerate() {
        let out = Command::new(env!("CARGO_BIN_EXE_ssmba"))
            .args(*args)
            .args(["--workers", &workers.to_string()])
            .current_dir(dir)
            .env_remove("SSMBA_SEED")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            format!("`{}` failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr))
        })?;
        outputs.insert(format!("stdout {i:02} {}", args[0]), out.stdout);
    }
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let name = path.strip_prefix(dir).unwrap().display().to_string();
                outputs.insert(name, std::fs::read(&path).map_err(|e| e.to_string())?);
            }
        }
    }
    Ok(outputs)
}

fn cli_determinism() -> Outcome {
    let mut reference: Option<BTreeMap<String, Vec<u8>>> = None;
    for workers in [1u16, 8] {
        for _ in 0..2 {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let outputs = run_pipeline(dir.path(), workers)?;
            match &reference {
                None => reference = Some(outputs),
                Some(r) => {
                    ensure(r.keys().eq(outputs.keys()), || {
                        format!("different file sets at {workers} workers")
                    })?;
                    if let Some(name) = r.keys().find(|k| r[*k] != outputs[*k]) {
                        return Err(format!("{name} differs at {workers} workers"));
                    }
                }
            }
        }
    }
    let r = reference.unwrap();
    Ok(format!(
        "{} commands, {} outputs identical across 4 runs at 1 and 8 workers",
        PIPELINE.len(),
        r.len()
    ))
}

fn main() {
    let mut failed = 0;
    let mut report = |name: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("PASS {name}: {detail}"),
        Err(detail) => {
            failed += 1;
            println!("FAIL {name}: {detail}");
        }
    };
    report("corruption exactness", corruption_exactness());
    report("action mix", action_mix());
    report("sampling oracles", sampling_oracles());
    report("count-mlm oracle", count_mlm_oracle());
    report("gibbs fidelity", gibbs_fidelity());
    report("statistics oracles", statistics_oracles());
    report("soft-label gradient check", gradient_check());

    let started = Instant::now();
    let base = BenchmarkConfig::default();
    match BenchmarkData::build(&base) {
        Ok(data) => {
            let bench = Benchmark {
                data,
                base,
                seeds: (0..10).collect(),
            };
            report("end-to-end directional", end_to_end(&bench, started));
            report("corruption sweep shape", sweep_shape(&bench));
            report("augmentation variance", augmentation_variance(&bench));
        }
        Err(e) => {
            for name in [
                "end-to-end directional",
                "corruption sweep shape",
                "augmentation variance",
            ] {
                report(name, Err(format!("benchmark data: {e}")));
            }
        }
    }
    report("cli determinism", cli_determinism());

    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
