//! One-factor sweeps over the benchmark configuration.

use rayon::prelude::*;
use serde::Serialize;

use super::benchmark::{run_benchmark, BenchmarkConfig, BenchmarkData};
use crate::corruption::CorruptionConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    DatasetSize,
    CorruptionPct,
    SamplingMethod,
    NumAug,
    LabelPolicy,
    ContextOrder,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "dataset_size" => SweepAxis::DatasetSize,
            "corruption_pct" => SweepAxis::CorruptionPct,
            "sampling_method" => SweepAxis::SamplingMethod,
            "num_aug" => SweepAxis::NumAug,
            "label_policy" => SweepAxis::LabelPolicy,
            "context_order" => SweepAxis::ContextOrder,
            _ => return Err(Error::param("axis", format!("unknown sweep axis {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    /// Values in the axis's own syntax, e.g. `0.45`, `topk:10`, `soft`.
    pub values: Vec<String>,
    pub seeds_per_value: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::param("values", "at least one sweep value is required"));
        }
        if self.seeds_per_value == 0 {
            return Err(Error::param("seeds", "at least one seed per value is required"));
        }
        Ok(())
    }

    /// Seeds used for every value: `0..seeds_per_value`.
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.seeds_per_value as u64).collect()
    }

    fn apply(&self, base: &BenchmarkConfig, value: &str) -> Result<BenchmarkConfig> {
        let mut config = base.clone();
        let bad = |name: &'static str| Error::param(name, format!("cannot parse sweep value {value:?}"));
        match self.axis {
            SweepAxis::DatasetSize => config.train_size = Some(value.parse().map_err(|_| bad("dataset_size"))?),
            SweepAxis::CorruptionPct => {
                let pct = value.parse().map_err(|_| bad("corrupt_pct"))?;
                config.corruption = CorruptionConfig {
                    corrupt_pct: pct,
                    ..base.corruption.clone()
                };
                config.corruption.validate()?;
            }
            SweepAxis::SamplingMethod => config.strategy = value.parse()?,
            SweepAxis::NumAug => config.num_aug = value.parse().map_err(|_| bad("num_aug"))?,
            SweepAxis::LabelPolicy => config.label_policy = value.parse()?,
            SweepAxis::ContextOrder => config.mlm_order = value.parse().map_err(|_| bad("context_order"))?,
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: String,
    pub id_mean: f64,
    pub ood_mean: f64,
    pub ood_std: f64,
    pub per_seed_ood: Vec<f64>,
}

/// Runs every value with the spec's seeds; rows follow `spec.values`.
pub fn run_sweep(spec: &SweepSpec, base: &BenchmarkConfig, data: &BenchmarkData) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let configs = spec
        .values
        .iter()
        .map(|v| spec.apply(base, v))
        .collect::<Result<Vec<_>>>()?;
    let seeds = spec.seeds();
    spec.values
        .par_iter()
        .zip(configs.par_iter())
        .map(|(value, config)| {
            let matrix = if config.mlm_order != base.mlm_order {
                run_benchmark(
                    &data.with_mlm_order(config.mlm_order, config.mlm_smoothing)?,
                    config,
                    &seeds,
                )?
            } else {
                run_benchmark(data, config, &seeds)?
            };
            Ok(SweepRow {
                value: value.clone(),
                id_mean: matrix.id_mean(),
                ood_mean: matrix.ood_mean(),
                ood_std: matrix.ood_std(),
                per_seed_ood: matrix.per_seed_ood(),
            })
        })
        .collect()
}

/// Header plus one row per value, 6 decimals.
pub fn sweep_to_tsv(axis: SweepAxis, rows: &[SweepRow]) -> String {
    let axis = serde_json::to_value(axis)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default();
    let mut out = format!("{axis}\tid_mean\tood_mean\tood_std\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{:.6}\t{:.6}\t{:.6}\n",
            r.value, r.id_mean, r.ood_mean, r.ood_std
        ));
    }
    out
}
