//! Seeded ablation runs over synthetic datasets.
//!
//! For every seed a dataset is generated, split, and the predictors trained
//! once per distinct configuration; variants that only differ in β reuse the
//! same checkpoints.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::encoder::PreparedGraph;
use crate::error::Result;
use crate::graph::Dataset;
use crate::inference::{accuracy_at, score, sweep_beta};
use crate::predictors::{train_event_only, train_target, EventOnlyPredictor, ModelConfig, TrainConfig, TrainingSet};
use crate::split::{split, SplitMode, SplitRatios};
use crate::synth::{generate, SynthConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// α as configured, β from the validation sweep.
    Full,
    /// α as configured, β = 0.
    Beta0,
    /// α = 0, β from the validation sweep.
    Alpha0,
    /// α = 0, β = 0: plain cross-entropy GCN.
    Alpha0Beta0,
    /// α = 0, β = 0 on an instance-level (event-mixed) split.
    Mixed,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Full,
        Variant::Beta0,
        Variant::Alpha0,
        Variant::Alpha0Beta0,
        Variant::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Beta0 => "beta0",
            Variant::Alpha0 => "alpha0",
            Variant::Alpha0Beta0 => "alpha0_beta0",
            Variant::Mixed => "event_mixed",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = crate::error::FadeError;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| crate::error::FadeError::Config(format!("unknown variant '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationConfig {
    pub synth: SynthConfig,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub ratios: SplitRatios,
    pub beta_grid: Vec<f64>,
    /// Fixed β for the debiased variants instead of the sweep.
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantResult {
    pub variant: Variant,
    pub accuracy: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub results: Vec<VariantResult>,
}

impl SeedResult {
    pub fn accuracy(&self, v: Variant) -> Option<f64> {
        self.results.iter().find(|r| r.variant == v).map(|r| r.accuracy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub variant: Variant,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub seeds: Vec<SeedResult>,
    pub summary: Vec<VariantSummary>,
}

impl AblationReport {
    pub fn mean(&self, v: Variant) -> Option<f64> {
        self.summary.iter().find(|s| s.variant == v).map(|s| s.mean)
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<14} {:>9} {:>9}", "variant", "acc_mean", "acc_std");
        for v in &self.summary {
            let _ = writeln!(s, "{:<14} {:>9.4} {:>9.4}", v.variant.name(), v.mean, v.std);
        }
        let _ = writeln!(s, "seeds: {}", self.seeds.len());
        s
    }
}

struct Prepared {
    ds: Dataset,
    graphs: Vec<PreparedGraph>,
}

fn prepare(ds: Dataset) -> Prepared {
    let graphs = ds.instances.iter().map(|i| PreparedGraph::new(&i.graph)).collect();
    Prepared { ds, graphs }
}

/// Test accuracy at β = 0 and at the chosen β for one trained target model.
fn debiased_pair(
    cfg: &AblationConfig,
    target: &crate::predictors::TargetPredictor,
    event_only: &EventOnlyPredictor,
    p: &Prepared,
    val: &[usize],
    test: &[usize],
) -> Result<(f64, f64, f64)> {
    let test_scored = score(target, event_only, &p.ds, &p.graphs, test)?;
    let beta = match cfg.beta {
        Some(b) => b,
        None if val.is_empty() => 0.0,
        None => sweep_beta(&score(target, event_only, &p.ds, &p.graphs, val)?, &cfg.beta_grid)?,
    };
    Ok((accuracy_at(&test_scored, 0.0), accuracy_at(&test_scored, beta), beta))
}

pub fn run_seed(cfg: &AblationConfig, variants: &[Variant], seed: u64) -> Result<SeedResult> {
    let synth = SynthConfig { seed, ..cfg.synth.clone() };
    let p = prepare(generate(&synth)?);
    let wants = |v: Variant| variants.contains(&v);
    let mut results = Vec::new();

    let need_sep = variants.iter().any(|v| *v != Variant::Mixed);
    if need_sep {
        let idx = split(&p.ds, SplitMode::Separated, cfg.ratios, seed)?.indices(&p.ds)?;
        let set = TrainingSet {
            dataset: &p.ds,
            graphs: &p.graphs,
            train: &idx.train,
            val: &idx.val,
        };
        let need_debias = wants(Variant::Full) || wants(Variant::Alpha0) || wants(Variant::Beta0);
        let event_only = if wants(Variant::Full) || wants(Variant::Alpha0) {
            Some(train_event_only(set, &cfg.model, &cfg.train, seed)?.model)
        } else {
            None
        };
        let fallback;
        let eo = match &event_only {
            Some(m) => m,
            None => {
                // β = 0 variants never read event-only logits
                fallback = EventOnlyPredictor::init(
                    p.ds.feature_dim,
                    p.ds.num_classes(),
                    &cfg.model,
                    &mut crate::augment::sample_rng(seed, 0, 0),
                );
                &fallback
            }
        };
        if need_debias {
            let target = train_target(set, &cfg.model, &cfg.train, seed)?.model;
            let (acc0, acc_b, beta) = debiased_pair(cfg, &target, eo, &p, &idx.val, &idx.test)?;
            if wants(Variant::Full) {
                results.push(VariantResult { variant: Variant::Full, accuracy: acc_b, beta });
            }
            if wants(Variant::Beta0) {
                results.push(VariantResult { variant: Variant::Beta0, accuracy: acc0, beta: 0.0 });
            }
        }
        if wants(Variant::Alpha0) || wants(Variant::Alpha0Beta0) {
            let plain = TrainConfig { alpha: 0.0, ..cfg.train.clone() };
            let target = train_target(set, &cfg.model, &plain, seed)?.model;
            let (acc0, acc_b, beta) = debiased_pair(cfg, &target, eo, &p, &idx.val, &idx.test)?;
            if wants(Variant::Alpha0) {
                results.push(VariantResult { variant: Variant::Alpha0, accuracy: acc_b, beta });
            }
            if wants(Variant::Alpha0Beta0) {
                results.push(VariantResult { variant: Variant::Alpha0Beta0, accuracy: acc0, beta: 0.0 });
            }
        }
    }

    if wants(Variant::Mixed) {
        let idx = split(&p.ds, SplitMode::Mixed, cfg.ratios, seed)?.indices(&p.ds)?;
        let set = TrainingSet {
            dataset: &p.ds,
            graphs: &p.graphs,
            train: &idx.train,
            val: &idx.val,
        };
        let plain = TrainConfig { alpha: 0.0, ..cfg.train.clone() };
        let target = train_target(set, &cfg.model, &plain, seed)?.model;
        let accuracy = crate::predictors::target_accuracy(&target, &p.ds, &p.graphs, &idx.test)?;
        results.push(VariantResult { variant: Variant::Mixed, accuracy, beta: 0.0 });
    }

    results.sort_by_key(|r| r.variant);
    Ok(SeedResult { seed, results })
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn summarize(seeds: Vec<SeedResult>) -> AblationReport {
    let mut summary = Vec::new();
    for v in Variant::ALL {
        let accs: Vec<f64> = seeds.iter().filter_map(|s| s.accuracy(v)).collect();
        if !accs.is_empty() {
            let (mean, std) = mean_std(&accs);
            summary.push(VariantSummary { variant: v, mean, std });
        }
    }
    AblationReport { seeds, summary }
}

/// Runs `variants` for every seed, in seed order.
pub fn ablate(cfg: &AblationConfig, variants: &[Variant], seeds: &[u64]) -> Result<AblationReport> {
    let results = seeds
        .iter()
        .map(|&s| run_seed(cfg, variants, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(results))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_values() {
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!((m, s), (2.0, 1.0));
        assert_eq!(mean_std(&[]), (0.0, 0.0));
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
    }

    #[test]
    fn tiny_ablation_runs_all_variants() {
        let cfg = AblationConfig {
            synth: SynthConfig::preset("tiny").unwrap(),
            model: ModelConfig {
                hidden_dim: 8,
                layers: 1,
                proj_dim: 4,
                ..ModelConfig::default()
            },
            train: TrainConfig {
                epochs: 2,
                ..TrainConfig::default()
            },
            ratios: SplitRatios::default(),
            beta_grid: crate::inference::default_beta_grid(),
            beta: None,
        };
        let r = ablate(&cfg, &Variant::ALL, &[1]).unwrap();
        assert_eq!(r.summary.len(), 5);
        let seed = &r.seeds[0];
        // β = 0 with the same checkpoint can only differ from the swept β
        assert!(seed.accuracy(Variant::Full).is_some());
        assert!(r.to_table().contains("alpha0_beta0"));
    }
}
