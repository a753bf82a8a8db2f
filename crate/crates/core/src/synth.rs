//! Synthetic propagation-graph datasets with tunable event bias.
//!
//! Every event draws a signature direction. A biased event (probability
//! `bias_strength`) gives all its instances one shared label and a strong
//! signature in every node's features; an unbiased event draws labels
//! independently and carries only a weak signature. Node features are
//! `class prototype + event signature + Gaussian noise`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::augment::{sample_rng, sample_unit_vector};
use crate::error::{FadeError, Result};
use crate::graph::{Dataset, NewsInstance, PropagationGraph};
use crate::tensor::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepthProfile {
    /// Replies attach mostly to the source post.
    Flat,
    /// Replies attach mostly to the latest posts, forming long threads.
    Deep,
    /// Each event picks flat or deep.
    Mixed,
}

impl std::str::FromStr for DepthProfile {
    type Err = FadeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(DepthProfile::Flat),
            "deep" => Ok(DepthProfile::Deep),
            "mixed" => Ok(DepthProfile::Mixed),
            other => Err(FadeError::Config(format!("unknown depth profile '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EventSizes {
    Fixed(usize),
    LogNormal { median: f64, sigma: f64, min: usize, max: usize },
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_events: usize,
    pub sizes: EventSizes,
    pub n_classes: usize,
    pub feature_dim: usize,
    pub bias_strength: f64,
    pub depth_profile: DepthProfile,
    pub noise_sigma: f64,
    /// Norm of each class prototype.
    pub class_signal: f64,
    /// Signature norm in biased events.
    pub strong_signature: f64,
    /// Signature norm in unbiased events.
    pub weak_signature: f64,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub seed: u64,
}

/// Names accepted by [`SynthConfig::preset`].
pub const PRESETS: &[&str] = &["t15-like", "t15-skew", "tiny"];

/// Event sizes of the `t15-skew` preset: 298 events with a long tail.
pub fn skewed_sizes() -> Vec<usize> {
    (1..=298)
        .map(|k| ((48.0 * (k as f64).powf(-0.55)).round() as usize).max(2))
        .collect()
}

impl SynthConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let base = SynthConfig {
            n_events: 60,
            sizes: EventSizes::LogNormal {
                median: 8.0,
                sigma: 0.5,
                min: 3,
                max: 24,
            },
            n_classes: 4,
            feature_dim: 32,
            bias_strength: 0.8,
            depth_profile: DepthProfile::Mixed,
            noise_sigma: 1.0,
            class_signal: 1.5,
            strong_signature: 6.0,
            weak_signature: 0.3,
            min_nodes: 4,
            max_nodes: 12,
            seed: 0,
        };
        match name {
            "t15-like" => Ok(base),
            "t15-skew" => {
                let sizes = skewed_sizes();
                Ok(SynthConfig {
                    n_events: sizes.len(),
                    sizes: EventSizes::Explicit(sizes),
                    min_nodes: 2,
                    max_nodes: 5,
                    ..base
                })
            }
            "tiny" => Ok(SynthConfig {
                n_events: 8,
                sizes: EventSizes::Fixed(4),
                n_classes: 2,
                feature_dim: 8,
                min_nodes: 2,
                max_nodes: 5,
                ..base
            }),
            other => Err(FadeError::Config(format!(
                "unknown preset '{other}' (expected one of {})",
                PRESETS.join(", ")
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(FadeError::Config(m));
        if !(0.0..=1.0).contains(&self.bias_strength) {
            return fail(format!("bias_strength {} outside [0, 1]", self.bias_strength));
        }
        if self.n_events == 0 || self.n_classes == 0 || self.feature_dim == 0 || self.min_nodes == 0 {
            return fail("counts must be ≥ 1".into());
        }
        if self.min_nodes > self.max_nodes {
            return fail("min_nodes > max_nodes".into());
        }
        for v in [self.noise_sigma, self.class_signal, self.strong_signature, self.weak_signature] {
            if !v.is_finite() || v < 0.0 {
                return fail(format!("signal/noise scale {v} must be finite and ≥ 0"));
            }
        }
        match &self.sizes {
            EventSizes::Fixed(0) => fail("event size must be ≥ 1".into()),
            EventSizes::LogNormal { median, sigma, min, max } => {
                if *median <= 0.0 || *sigma < 0.0 || *min == 0 || min > max {
                    fail("invalid log-normal event sizes".into())
                } else {
                    Ok(())
                }
            }
            EventSizes::Explicit(v) if v.len() != self.n_events || v.contains(&0) => {
                fail("explicit sizes must list one positive size per event".into())
            }
            _ => Ok(()),
        }
    }

    fn event_size(&self, e: usize, rng: &mut impl Rng) -> usize {
        match &self.sizes {
            EventSizes::Fixed(n) => *n,
            EventSizes::Explicit(v) => v[e],
            EventSizes::LogNormal { median, sigma, min, max } => {
                let d = LogNormal::new(median.ln(), *sigma).expect("validated parameters");
                (d.sample(rng).round() as usize).clamp(*min, *max)
            }
        }
    }
}

fn gaussian(dim: usize, scale: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..dim).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

fn tree_edges(n: usize, deep: bool, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    (1..n)
        .map(|child| {
            let parent = if deep {
                // continue the most recent thread most of the time
                if rng.random_bool(0.8) {
                    child - 1
                } else {
                    rng.random_range(0..child)
                }
            } else if rng.random_bool(0.85) {
                0
            } else {
                rng.random_range(0..child)
            };
            (parent, child)
        })
        .collect()
}

pub fn generate(cfg: &SynthConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
    let prototypes: Vec<Vec<f64>> = (0..cfg.n_classes)
        .map(|_| {
            sample_unit_vector(cfg.feature_dim, &mut master)
                .into_iter()
                .map(|v| v * cfg.class_signal)
                .collect()
        })
        .collect();

    let mut instances = Vec::new();
    for e in 0..cfg.n_events {
        let mut rng = sample_rng(cfg.seed, e, 0x5eed);
        let biased = rng.random::<f64>() < cfg.bias_strength;
        let strength = if biased { cfg.strong_signature } else { cfg.weak_signature };
        let signature: Vec<f64> = sample_unit_vector(cfg.feature_dim, &mut rng)
            .into_iter()
            .map(|v| v * strength)
            .collect();
        let deep = match cfg.depth_profile {
            DepthProfile::Flat => false,
            DepthProfile::Deep => true,
            DepthProfile::Mixed => rng.random_bool(0.5),
        };
        let shared_label = rng.random_range(0..cfg.n_classes);
        let size = cfg.event_size(e, &mut rng);
        for k in 0..size {
            let label = if biased {
                shared_label
            } else {
                rng.random_range(0..cfg.n_classes)
            };
            let n = rng.random_range(cfg.min_nodes..=cfg.max_nodes);
            let edges = tree_edges(n, deep, &mut rng);
            let mut data = Vec::with_capacity(n * cfg.feature_dim);
            for _ in 0..n {
                let noise = gaussian(cfg.feature_dim, cfg.noise_sigma, &mut rng);
                data.extend(
                    prototypes[label]
                        .iter()
                        .zip(&signature)
                        .zip(noise)
                        .map(|((p, s), z)| p + s + z),
                );
            }
            let features = Matrix::new(n, cfg.feature_dim, data)?;
            instances.push(NewsInstance {
                id: format!("e{e:03}-{k:03}"),
                event: format!("E{e:03}"),
                label,
                graph: PropagationGraph::new(features, edges)?,
            });
        }
    }
    let class_names = default_class_names(cfg.n_classes);
    Dataset::new(class_names, cfg.feature_dim, instances)
}

/// N, F, T, U for four classes, N, F for two, `c{i}` otherwise.
pub fn default_class_names(n: usize) -> Vec<String> {
    match n {
        2 => vec!["N".into(), "F".into()],
        4 => ["N", "F", "T", "U"].iter().map(|s| s.to_string()).collect(),
        _ => (0..n).map(|i| format!("c{i}")).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventStats {
    pub event: String,
    pub size: usize,
    /// Fraction of the event's instances carrying its most common label.
    pub purity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub events: Vec<EventStats>,
    pub mean_purity: f64,
    pub single_label_fraction: f64,
    /// event size → number of events of that size
    pub size_histogram: BTreeMap<usize, usize>,
}

pub fn bias_report(ds: &Dataset) -> BiasReport {
    let mut per_event: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for inst in &ds.instances {
        per_event.entry(inst.event.as_str()).or_default().push(inst.label);
    }
    let mut events = Vec::new();
    let mut size_histogram = BTreeMap::new();
    let mut single = 0usize;
    for (event, labels) in &per_event {
        let mut counts = vec![0usize; ds.num_classes()];
        for &l in labels {
            counts[l] += 1;
        }
        let top = counts.iter().copied().max().unwrap_or(0);
        if top == labels.len() {
            single += labels.len();
        }
        *size_histogram.entry(labels.len()).or_insert(0) += 1;
        events.push(EventStats {
            event: event.to_string(),
            size: labels.len(),
            purity: top as f64 / labels.len() as f64,
        });
    }
    let mean_purity = if events.is_empty() {
        0.0
    } else {
        events.iter().map(|e| e.purity).sum::<f64>() / events.len() as f64
    };
    BiasReport {
        events,
        mean_purity,
        single_label_fraction: if ds.is_empty() { 0.0 } else { single as f64 / ds.len() as f64 },
        size_histogram,
    }
}
