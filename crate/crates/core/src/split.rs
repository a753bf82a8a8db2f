//! Train/validation/test partitioning, by whole events or by instance.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FadeError, Result};
use crate::graph::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    /// Minimum fraction of instances sent to validation.
    pub val_fraction: f64,
    /// Share of the remainder that goes to training (3:1 → 0.75).
    pub train_share: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            val_fraction: 0.1,
            train_share: 0.75,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    #[default]
    Separated,
    Mixed,
}

impl std::str::FromStr for SplitMode {
    type Err = FadeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separated" => Ok(SplitMode::Separated),
            "mixed" => Ok(SplitMode::Mixed),
            other => Err(FadeError::Config(format!("unknown split mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub seed: u64,
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
}

/// Event sets of each part of a manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEvents {
    pub train: BTreeSet<String>,
    pub val: BTreeSet<String>,
    pub test: BTreeSet<String>,
}

impl ManifestEvents {
    pub fn is_event_separated(&self) -> bool {
        self.train.is_disjoint(&self.test) && self.train.is_disjoint(&self.val) && self.val.is_disjoint(&self.test)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| FadeError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n").map_err(|e| FadeError::io(path, e))
    }

    /// Resolves ids to dataset indices, checking coverage and disjointness.
    pub fn indices(&self, ds: &Dataset) -> Result<SplitIndices> {
        let lookup: HashMap<&str, usize> = ds.instances.iter().enumerate().map(|(i, x)| (x.id.as_str(), i)).collect();
        let mut seen = vec![false; ds.len()];
        let mut resolve = |ids: &[String]| -> Result<Vec<usize>> {
            ids.iter()
                .map(|id| {
                    let &i = lookup
                        .get(id.as_str())
                        .ok_or_else(|| FadeError::Split(format!("manifest id '{id}' not in dataset")))?;
                    if std::mem::replace(&mut seen[i], true) {
                        return Err(FadeError::Split(format!("id '{id}' appears twice in manifest")));
                    }
                    Ok(i)
                })
                .collect()
        };
        let out = SplitIndices {
            train: resolve(&self.train)?,
            val: resolve(&self.val)?,
            test: resolve(&self.test)?,
        };
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(FadeError::Split(format!(
                "instance '{}' missing from manifest",
                ds.instances[missing].id
            )));
        }
        Ok(out)
    }

    pub fn events(&self, ds: &Dataset) -> Result<ManifestEvents> {
        let idx = self.indices(ds)?;
        let set = |v: &[usize]| v.iter().map(|&i| ds.instances[i].event.clone()).collect();
        Ok(ManifestEvents {
            train: set(&idx.train),
            val: set(&idx.val),
            test: set(&idx.test),
        })
    }
}

fn check_ratios(r: &SplitRatios) -> Result<()> {
    let ok = |v: f64| v.is_finite() && (0.0..=1.0).contains(&v);
    if !ok(r.val_fraction) || !ok(r.train_share) {
        return Err(FadeError::Split(format!("ratios out of range: {r:?}")));
    }
    Ok(())
}

/// Assigns whole events to validation, then training and testing.
///
/// Event ids are sorted and shuffled by `seed`. Events go to validation until
/// it holds at least `val_fraction` of the instances; each further event goes
/// to whichever of train/test is furthest below its target share.
pub fn event_separated_split(ds: &Dataset, ratios: SplitRatios, seed: u64) -> Result<SplitManifest> {
    check_ratios(&ratios)?;
    let mut members: HashMap<&str, Vec<&str>> = HashMap::new();
    for inst in &ds.instances {
        members.entry(inst.event.as_str()).or_default().push(inst.id.as_str());
    }
    if members.len() < 3 {
        return Err(FadeError::Split(format!("need at least 3 events, found {}", members.len())));
    }
    let mut events: Vec<&str> = members.keys().copied().collect();
    events.sort_unstable();
    events.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let total = ds.len() as f64;
    let mut val_events = Vec::new();
    let mut val_count = 0usize;
    let mut rest = events.into_iter().peekable();
    // keep at least two events for train and test
    while (val_count as f64) < ratios.val_fraction * total && val_events.len() + 2 < members.len() {
        let e = rest.next().expect("events remain");
        val_count += members[e].len();
        val_events.push(e);
    }

    let (mut train_events, mut test_events) = (Vec::new(), Vec::new());
    let (mut train_count, mut test_count) = (0usize, 0usize);
    for e in rest {
        let size = members[e].len();
        let assigned = (train_count + test_count + size) as f64;
        let train_deficit = ratios.train_share * assigned - train_count as f64;
        let test_deficit = (1.0 - ratios.train_share) * assigned - test_count as f64;
        if train_deficit >= test_deficit {
            train_count += size;
            train_events.push(e);
        } else {
            test_count += size;
            test_events.push(e);
        }
    }
    if test_events.is_empty() {
        test_events.push(train_events.pop().expect("at least two events"));
    }
    if train_events.is_empty() {
        train_events.push(test_events.remove(0));
    }

    let ids = |evs: &[&str]| evs.iter().flat_map(|e| members[e].iter().map(|s| s.to_string())).collect();
    Ok(SplitManifest {
        seed,
        train: ids(&train_events),
        val: ids(&val_events),
        test: ids(&test_events),
    })
}

/// Instance-level shuffle that ignores events.
pub fn event_mixed_split(ds: &Dataset, ratios: SplitRatios, seed: u64) -> Result<SplitManifest> {
    check_ratios(&ratios)?;
    if ds.len() < 3 {
        return Err(FadeError::Split(format!("need at least 3 instances, found {}", ds.len())));
    }
    let mut ids: Vec<&str> = ds.instances.iter().map(|i| i.id.as_str()).collect();
    ids.sort_unstable();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n = ids.len();
    let n_val = ((ratios.val_fraction * n as f64).ceil() as usize).clamp(1, n - 2);
    let rest = n - n_val;
    let n_train = ((ratios.train_share * rest as f64).round() as usize).clamp(1, rest - 1);
    let owned = |s: &[&str]| s.iter().map(|x| x.to_string()).collect();
    Ok(SplitManifest {
        seed,
        val: owned(&ids[..n_val]),
        train: owned(&ids[n_val..n_val + n_train]),
        test: owned(&ids[n_val + n_train..]),
    })
}

pub fn split(ds: &Dataset, mode: SplitMode, ratios: SplitRatios, seed: u64) -> Result<SplitManifest> {
    match mode {
        SplitMode::Separated => event_separated_split(ds, ratios, seed),
        SplitMode::Mixed => event_mixed_split(ds, ratios, seed),
    }
}
