//! Adaptive augmentation in representation space.
//!
//! Each original representation is perturbed along several random unit
//! directions by the training set's mean distance to its centroid. Among the
//! candidates the classifier still assigns to the true label, the one with the
//! smallest margin (closest to the decision boundary) is kept.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::encoder::Linear;
use crate::error::{FadeError, Result};
use crate::tensor::{argmax, l2_norm};

/// Where the augmentation radius is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusScope {
    /// Once per epoch over the whole training set.
    #[default]
    Epoch,
    /// Over each mini-batch.
    Batch,
}

impl std::str::FromStr for RadiusScope {
    type Err = FadeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "epoch" => Ok(RadiusScope::Epoch),
            "batch" => Ok(RadiusScope::Batch),
            other => Err(FadeError::Config(format!("unknown radius scope '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentationContext {
    pub radius: f64,
    pub num_candidates: usize,
}

/// Anything that maps a representation to class logits.
pub trait Scorer {
    fn logits(&self, rep: &[f64]) -> Vec<f64>;
}

impl Scorer for Linear {
    fn logits(&self, rep: &[f64]) -> Vec<f64> {
        self.apply(rep)
    }
}

impl<F: Fn(&[f64]) -> Vec<f64>> Scorer for F {
    fn logits(&self, rep: &[f64]) -> Vec<f64> {
        self(rep)
    }
}

/// Mean Euclidean distance of the representations from their centroid.
pub fn compute_radius<R: AsRef<[f64]>>(reps: &[R]) -> Result<f64> {
    let first = reps.first().ok_or(FadeError::Empty("compute_radius"))?.as_ref();
    let dim = first.len();
    let mut centroid = vec![0.0; dim];
    for r in reps {
        let r = r.as_ref();
        if r.len() != dim {
            return Err(FadeError::dim("compute_radius", (1, dim), (1, r.len())));
        }
        for (c, v) in centroid.iter_mut().zip(r) {
            *c += v;
        }
    }
    let n = reps.len() as f64;
    centroid.iter_mut().for_each(|c| *c /= n);
    let total: f64 = reps
        .iter()
        .map(|r| {
            r.as_ref()
                .iter()
                .zip(&centroid)
                .map(|(a, b)| (b - a).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .sum();
    Ok(total / n)
}

/// Uniformly distributed direction on the unit sphere.
pub fn sample_unit_vector(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    assert!(dim >= 1, "unit vector needs dim ≥ 1");
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = l2_norm(&v);
        if norm > 0.0 && norm.is_finite() {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Distance to the decision boundary: true-class logit minus best other logit.
pub fn margin(logits: &[f64], label: usize) -> f64 {
    let best_other = logits
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != label)
        .map(|(_, &z)| z)
        .fold(f64::NEG_INFINITY, f64::max);
    logits[label] - best_other
}

#[derive(Debug, Clone, PartialEq)]
pub struct Augmented {
    /// `R^A − R^O`; all zeros on fallback.
    pub offset: Vec<f64>,
    /// Index of the chosen candidate, `None` when no candidate kept the label.
    pub chosen: Option<usize>,
    pub margin: Option<f64>,
}

impl Augmented {
    pub fn is_fallback(&self) -> bool {
        self.chosen.is_none()
    }

    pub fn apply(&self, rep: &[f64]) -> Vec<f64> {
        rep.iter().zip(&self.offset).map(|(r, o)| r + o).collect()
    }
}

/// Picks among `rep + radius·direction` the label-preserving candidate with
/// minimal margin. Ties keep the earliest candidate.
pub fn select_candidate(
    rep: &[f64],
    radius: f64,
    directions: &[Vec<f64>],
    scorer: &impl Scorer,
    label: usize,
) -> Augmented {
    let mut best: Option<(usize, f64)> = None;
    for (k, dir) in directions.iter().enumerate() {
        let cand: Vec<f64> = rep.iter().zip(dir).map(|(r, u)| r + radius * u).collect();
        let z = scorer.logits(&cand);
        if argmax(&z) != label {
            continue;
        }
        let m = margin(&z, label);
        if best.is_none_or(|(_, bm)| m < bm) {
            best = Some((k, m));
        }
    }
    match best {
        Some((k, m)) => Augmented {
            offset: directions[k].iter().map(|u| radius * u).collect(),
            chosen: Some(k),
            margin: Some(m),
        },
        None => Augmented {
            offset: vec![0.0; rep.len()],
            chosen: None,
            margin: None,
        },
    }
}

/// Samples `ctx.num_candidates` directions and selects one.
pub fn augment(
    rep: &[f64],
    ctx: &AugmentationContext,
    scorer: &impl Scorer,
    label: usize,
    rng: &mut impl Rng,
) -> Augmented {
    let directions: Vec<Vec<f64>> = (0..ctx.num_candidates.max(1))
        .map(|_| sample_unit_vector(rep.len(), rng))
        .collect();
    select_candidate(rep, ctx.radius, &directions, scorer, label)
}

/// Per-sample random stream derived from (seed, sample index, epoch), so
/// augmentation is reproducible regardless of batch order.
pub fn sample_rng(seed: u64, sample: usize, epoch: usize) -> ChaCha8Rng {
    let mut x = seed ^ 0x9e37_79b9_7f4a_7c15;
    for v in [sample as u64, epoch as u64] {
        x = splitmix(x ^ splitmix(v));
    }
    ChaCha8Rng::seed_from_u64(x)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
