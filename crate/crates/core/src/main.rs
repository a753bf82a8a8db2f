use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use fade_core::config::{BetaSetting, RunConfig};
use fade_core::encoder::PreparedGraph;
use fade_core::error::{ErrorKind, FadeError, Result};
use fade_core::experiment::{ablate, AblationConfig, Variant};
use fade_core::graph::Dataset;
use fade_core::inference::{evaluate, predict, score, sweep_beta, Prediction};
use fade_core::predictors::{
    train_event_only, train_target, EpochLog, EventOnlyPredictor, TargetPredictor, TrainingSet,
};
use fade_core::split::{split, SplitManifest, SplitMode};
use fade_core::synth::{bias_report, generate, SynthConfig};

#[derive(Parser)]
#[command(name = "fade", version, about = "Event-debiased fake news detection on propagation graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key (repeatable): --set train.alpha=0.1
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(self.config.as_deref(), &self.overrides)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic event-biased dataset.
    GenSynth {
        #[arg(long, default_value = "t15-like")]
        preset: String,
        /// Probability that an event is label-pure with a strong signature.
        #[arg(long)]
        bias: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the bias report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Partition a dataset into train/val/test.
    Split {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        mode: Option<SplitMode>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Train the target and event-only predictors.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        split: PathBuf,
        /// Run directory for checkpoints and the training log.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a trained run on the test split.
    Eval {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        split: PathBuf,
        /// Fixed β; otherwise infer.beta from the config applies.
        #[arg(long)]
        beta: Option<f64>,
        /// Evaluate the target predictor's own argmax.
        #[arg(long, conflicts_with = "beta")]
        target_only: bool,
        /// Report path (default: RUN/report.json).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG bar chart of per-class F1.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Write debiased predictions for the test split (or every instance).
    Predict {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Without a manifest every instance is scored.
        #[arg(long)]
        split: Option<PathBuf>,
        #[arg(long)]
        beta: Option<f64>,
        /// JSON Lines output.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compare ablation variants over seeds on a synthetic preset.
    Ablate {
        #[arg(long, default_value = "t15-like")]
        preset: String,
        #[arg(long)]
        bias: Option<f64>,
        /// Number of seeds (default: experiment.seeds).
        #[arg(long)]
        seeds: Option<usize>,
        /// Comma-separated subset of full,beta0,alpha0,alpha0_beta0,event_mixed.
        #[arg(long, value_delimiter = ',')]
        variants: Vec<Variant>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Serialize, Deserialize)]
struct TrainLog {
    target: Vec<EpochLog>,
    event_only: Vec<EpochLog>,
    target_best_epoch: usize,
    event_only_best_epoch: usize,
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| FadeError::Io {
        path: path.into(),
        source: e,
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    write(path, serde_json::to_string_pretty(value)? + "\n")
}

fn prepared(ds: &Dataset) -> Vec<PreparedGraph> {
    ds.instances.iter().map(|i| PreparedGraph::new(&i.graph)).collect()
}

fn load_run(run: &Path) -> Result<(TargetPredictor, EventOnlyPredictor)> {
    Ok((
        TargetPredictor::load(run.join("target.ckpt"))?,
        EventOnlyPredictor::load(run.join("event_only.ckpt"))?,
    ))
}

fn synth_config(preset: &str, bias: Option<f64>, seed: u64) -> Result<SynthConfig> {
    let mut cfg = SynthConfig::preset(preset)?;
    if let Some(b) = bias {
        cfg.bias_strength = b;
    }
    cfg.seed = seed;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenSynth {
            preset,
            bias,
            seed,
            out,
            report,
        } => {
            let ds = generate(&synth_config(&preset, bias, seed)?)?;
            ds.save(&out)?;
            let r = bias_report(&ds);
            println!(
                "{} instances, {} events, mean purity {:.3}, single-label fraction {:.3}",
                ds.len(),
                r.events.len(),
                r.mean_purity,
                r.single_label_fraction
            );
            if let Some(p) = report {
                write_json(&p, &r)?;
            }
        }
        Command::Split {
            data,
            mode,
            out,
            common,
        } => {
            let cfg = common.load()?;
            let ds = Dataset::load(&data)?;
            let m = split(&ds, mode.unwrap_or(cfg.split_mode), cfg.ratios, cfg.seed)?;
            m.save(&out)?;
            println!("train {} / val {} / test {}", m.train.len(), m.val.len(), m.test.len());
        }
        Command::Train {
            data,
            split,
            out,
            common,
        } => {
            let cfg = common.load()?;
            let ds = Dataset::load(&data)?;
            let idx = SplitManifest::load(&split)?.indices(&ds)?;
            let graphs = prepared(&ds);
            let set = TrainingSet {
                dataset: &ds,
                graphs: &graphs,
                train: &idx.train,
                val: &idx.val,
            };
            fs::create_dir_all(&out).map_err(|e| FadeError::Io {
                path: out.clone(),
                source: e,
            })?;
            let target = train_target(set, &cfg.model, &cfg.train, cfg.seed)?;
            let event_only = train_event_only(set, &cfg.model, &cfg.train, cfg.seed)?;
            target.model.save(out.join("target.ckpt"))?;
            event_only.model.save(out.join("event_only.ckpt"))?;
            write(&out.join("config.txt"), cfg.to_text())?;
            write_json(
                &out.join("log.json"),
                &TrainLog {
                    target: target.log,
                    event_only: event_only.log,
                    target_best_epoch: target.best_epoch,
                    event_only_best_epoch: event_only.best_epoch,
                },
            )?;
            println!(
                "best epochs: target {}, event-only {}",
                target.best_epoch, event_only.best_epoch
            );
        }
        Command::Eval {
            run,
            data,
            split,
            beta,
            target_only,
            out,
            plot,
            common,
        } => {
            let cfg = common.load()?;
            let ds = Dataset::load(&data)?;
            let idx = SplitManifest::load(&split)?.indices(&ds)?;
            let graphs = prepared(&ds);
            let (target, event_only) = load_run(&run)?;
            let scored = score(&target, &event_only, &ds, &graphs, &idx.test)?;
            let (preds, used_beta) = if target_only {
                let preds = scored
                    .iter()
                    .map(|s| Prediction {
                        id: s.id.clone(),
                        event: s.event.clone(),
                        label: s.label,
                        predicted: fade_core::tensor::argmax(&s.target_logits),
                        debiased_logits: s.target_logits.clone(),
                    })
                    .collect();
                (preds, None)
            } else {
                let b = match (beta, cfg.beta) {
                    (Some(b), _) | (None, BetaSetting::Fixed(b)) => b,
                    (None, BetaSetting::Sweep) => {
                        let val = score(&target, &event_only, &ds, &graphs, &idx.val)?;
                        sweep_beta(&val, &cfg.beta_grid)?
                    }
                };
                (predict(&scored, b)?, Some(b))
            };
            let mut report = evaluate(&preds, &ds.class_names)?;
            report.beta = used_beta;
            write_json(&out.unwrap_or_else(|| run.join("report.json")), &report)?;
            if let Some(p) = plot {
                write(&p, report.to_svg())?;
            }
            print!("{}", report.to_table());
        }
        Command::Predict {
            run,
            data,
            split,
            beta,
            out,
            common,
        } => {
            let cfg = common.load()?;
            let ds = Dataset::load(&data)?;
            let indices = match split {
                Some(p) => SplitManifest::load(&p)?.indices(&ds)?.test,
                None => (0..ds.len()).collect(),
            };
            let b = match (beta, cfg.beta) {
                (Some(b), _) | (None, BetaSetting::Fixed(b)) => b,
                (None, BetaSetting::Sweep) => {
                    return Err(FadeError::Config("predict needs --beta or a fixed infer.beta".into()))
                }
            };
            let graphs = prepared(&ds);
            let (target, event_only) = load_run(&run)?;
            let preds = predict(&score(&target, &event_only, &ds, &graphs, &indices)?, b)?;
            let mut text = String::new();
            for p in &preds {
                text.push_str(&serde_json::to_string(p)?);
                text.push('\n');
            }
            write(&out, text)?;
            println!("{} predictions at beta {b}", preds.len());
        }
        Command::Ablate {
            preset,
            bias,
            seeds,
            variants,
            out,
            common,
        } => {
            let cfg = common.load()?;
            let ablation = AblationConfig {
                synth: synth_config(&preset, bias, 0)?,
                model: cfg.model.clone(),
                train: cfg.train.clone(),
                ratios: cfg.ratios,
                beta_grid: cfg.beta_grid.clone(),
                beta: match cfg.beta {
                    BetaSetting::Fixed(b) => Some(b),
                    BetaSetting::Sweep => None,
                },
            };
            let variants = if variants.is_empty() { Variant::ALL.to_vec() } else { variants };
            let seeds: Vec<u64> = (0..seeds.unwrap_or(cfg.seeds) as u64).map(|s| cfg.seed + s).collect();
            let report = ablate(&ablation, &variants, &seeds)?;
            fs::create_dir_all(&out).map_err(|e| FadeError::Io {
                path: out.clone(),
                source: e,
            })?;
            write_json(&out.join("ablation.json"), &report)?;
            write(&out.join("ablation.txt"), report.to_table())?;
            print!("{}", report.to_table());
        }
    }
    Ok(())
}

fn exit_code(e: &FadeError) -> u8 {
    match e.kind() {
        ErrorKind::Config => 2,
        ErrorKind::Data | ErrorKind::Io => 3,
        ErrorKind::Numeric => 4,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
