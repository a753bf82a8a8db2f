//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments and blank lines are ignored
//! seed = 7
//! train.alpha = 0.3
//! infer.beta = sweep
//! ```

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{FadeError, Result};
use crate::inference::default_beta_grid;
use crate::predictors::{ModelConfig, TrainConfig};
use crate::split::{SplitMode, SplitRatios};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaSetting {
    Fixed(f64),
    /// Chosen on the validation split from `infer.beta_grid`.
    Sweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub beta: BetaSetting,
    pub beta_grid: Vec<f64>,
    pub split_mode: SplitMode,
    pub ratios: SplitRatios,
    /// Number of seeds an ablation averages over.
    pub seeds: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            beta: BetaSetting::Sweep,
            beta_grid: default_beta_grid(),
            split_mode: SplitMode::Separated,
            ratios: SplitRatios::default(),
            seeds: 10,
        }
    }
}

/// Every key [`RunConfig::set`] accepts.
pub const KEYS: &[&str] = &[
    "seed",
    "encoder.hidden_dim",
    "encoder.layers",
    "encoder.pooling",
    "head.proj_dim",
    "train.alpha",
    "train.lr",
    "train.epochs",
    "train.batch_size",
    "aug.num_candidates",
    "aug.radius_scope",
    "infer.beta",
    "infer.beta_grid",
    "split.mode",
    "split.val_fraction",
    "split.train_share",
    "experiment.seeds",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| FadeError::Config(format!("{key}: cannot parse '{value}'")))
}

fn positive(key: &str, value: &str) -> Result<usize> {
    match parse::<usize>(key, value)? {
        0 => Err(FadeError::Config(format!("{key} must be ≥ 1"))),
        n => Ok(n),
    }
}

fn non_negative(key: &str, value: &str) -> Result<f64> {
    let v: f64 = parse(key, value)?;
    if !v.is_finite() || v < 0.0 {
        return Err(FadeError::Config(format!("{key} must be finite and ≥ 0, got {v}")));
    }
    Ok(v)
}

fn fraction(key: &str, value: &str) -> Result<f64> {
    let v = non_negative(key, value)?;
    if v > 1.0 {
        return Err(FadeError::Config(format!("{key} must be in [0, 1], got {v}")));
    }
    Ok(v)
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "seed" => self.seed = parse(key, value)?,
            "encoder.hidden_dim" => self.model.hidden_dim = positive(key, value)?,
            "encoder.layers" => self.model.layers = positive(key, value)?,
            "encoder.pooling" => self.model.pooling = value.parse()?,
            "head.proj_dim" => self.model.proj_dim = positive(key, value)?,
            "train.alpha" => self.train.alpha = non_negative(key, value)?,
            "train.lr" => {
                let lr = non_negative(key, value)?;
                if lr == 0.0 {
                    return Err(FadeError::Config("train.lr must be > 0".into()));
                }
                self.train.lr = lr;
            }
            "train.epochs" => self.train.epochs = positive(key, value)?,
            "train.batch_size" => self.train.batch_size = positive(key, value)?,
            "aug.num_candidates" => self.train.num_candidates = positive(key, value)?,
            "aug.radius_scope" => self.train.radius_scope = value.parse()?,
            "infer.beta" => {
                self.beta = if value == "sweep" {
                    BetaSetting::Sweep
                } else {
                    BetaSetting::Fixed(non_negative(key, value)?)
                }
            }
            "infer.beta_grid" => {
                let grid = value
                    .split(',')
                    .map(|v| non_negative(key, v.trim()))
                    .collect::<Result<Vec<_>>>()?;
                self.beta_grid = grid;
            }
            "split.mode" => self.split_mode = value.parse()?,
            "split.val_fraction" => self.ratios.val_fraction = fraction(key, value)?,
            "split.train_share" => self.ratios.train_share = fraction(key, value)?,
            "experiment.seeds" => self.seeds = positive(key, value)?,
            other => return Err(FadeError::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| FadeError::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v).map_err(|e| match e {
                FadeError::Config(m) => FadeError::Config(format!("line {}: {m}", n + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Defaults, then the file (if any), then `key=value` overrides in order.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p).map_err(|e| FadeError::io(p, e))?;
            cfg.apply_text(&text)?;
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| FadeError::Config(format!("override '{o}' is not key=value")))?;
            cfg.set(k.trim(), v)?;
        }
        if cfg.beta_grid.is_empty() {
            return Err(FadeError::Config("infer.beta_grid is empty".into()));
        }
        Ok(cfg)
    }

    /// Resolved configuration in the same format [`RunConfig::apply_text`] reads.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let grid: Vec<String> = self.beta_grid.iter().map(|b| b.to_string()).collect();
        let beta = match self.beta {
            BetaSetting::Fixed(b) => b.to_string(),
            BetaSetting::Sweep => "sweep".into(),
        };
        let mode = match self.split_mode {
            SplitMode::Separated => "separated",
            SplitMode::Mixed => "mixed",
        };
        let scope = match self.train.radius_scope {
            crate::augment::RadiusScope::Epoch => "epoch",
            crate::augment::RadiusScope::Batch => "batch",
        };
        let pairs: [(&str, String); 17] = [
            ("seed", self.seed.to_string()),
            ("encoder.hidden_dim", self.model.hidden_dim.to_string()),
            ("encoder.layers", self.model.layers.to_string()),
            ("encoder.pooling", self.model.pooling.to_string()),
            ("head.proj_dim", self.model.proj_dim.to_string()),
            ("train.alpha", self.train.alpha.to_string()),
            ("train.lr", self.train.lr.to_string()),
            ("train.epochs", self.train.epochs.to_string()),
            ("train.batch_size", self.train.batch_size.to_string()),
            ("aug.num_candidates", self.train.num_candidates.to_string()),
            ("aug.radius_scope", scope.into()),
            ("infer.beta", beta),
            ("infer.beta_grid", grid.join(",")),
            ("split.mode", mode.into()),
            ("split.val_fraction", self.ratios.val_fraction.to_string()),
            ("split.train_share", self.ratios.train_share.to_string()),
            ("experiment.seeds", self.seeds.to_string()),
        ];
        for (k, v) in pairs {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}
