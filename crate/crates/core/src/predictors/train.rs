use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EventOnlyPredictor, ModelConfig, TargetPredictor, TrainConfig};
use crate::augment::{augment, compute_radius, sample_rng, AugmentationContext, RadiusScope};
use crate::autodiff::Tape;
use crate::encoder::PreparedGraph;
use crate::error::{FadeError, Result};
use crate::graph::Dataset;
use crate::optim::Adam;
use crate::predictors::pool::group_by_event;
use crate::tensor::{argmax, Matrix};

// Stream tags keep initialization, batch order and augmentation independent.
const TARGET_INIT: u64 = 0x7461_7267;
const EVENT_INIT: u64 = 0x6576_656e;
const SHUFFLE: u64 = 0x7368_7566;
const AUGMENT: u64 = 0x6175_676d;

/// Training and validation instances, as indices into `dataset`.
#[derive(Debug, Clone, Copy)]
pub struct TrainingSet<'a> {
    pub dataset: &'a Dataset,
    /// `graphs[i]` is instance i of `dataset`, prepared.
    pub graphs: &'a [PreparedGraph],
    pub train: &'a [usize],
    pub val: &'a [usize],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub loss_ce: f64,
    pub loss_cl: f64,
    pub loss_total: f64,
    pub val_acc: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Trained<M> {
    pub model: M,
    pub log: Vec<EpochLog>,
    /// Epoch whose parameters were kept (highest validation accuracy).
    pub best_epoch: usize,
}

fn stream(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = sample_rng(seed, tag as usize, 0);
    ChaCha8Rng::from_rng(&mut rng)
}

fn check_set(set: &TrainingSet) -> Result<()> {
    if set.train.is_empty() {
        return Err(FadeError::Empty("training split"));
    }
    if set.graphs.len() != set.dataset.len() {
        return Err(FadeError::dim("training set", (set.graphs.len(), 1), (set.dataset.len(), 1)));
    }
    Ok(())
}

/// Accuracy of the target predictor's own argmax over `indices`.
pub fn target_accuracy(model: &TargetPredictor, ds: &Dataset, graphs: &[PreparedGraph], indices: &[usize]) -> Result<f64> {
    if indices.is_empty() {
        return Err(FadeError::Empty("accuracy"));
    }
    let mut correct = 0;
    for &i in indices {
        if argmax(&model.logits(&graphs[i])?) == ds.instances[i].label {
            correct += 1;
        }
    }
    Ok(correct as f64 / indices.len() as f64)
}

/// Accuracy of the event-only predictor with event pooling over `indices`.
pub fn event_only_accuracy(
    model: &EventOnlyPredictor,
    ds: &Dataset,
    graphs: &[PreparedGraph],
    indices: &[usize],
) -> Result<f64> {
    if indices.is_empty() {
        return Err(FadeError::Empty("accuracy"));
    }
    let gs: Vec<&PreparedGraph> = indices.iter().map(|&i| &graphs[i]).collect();
    let events: Vec<&str> = indices.iter().map(|&i| ds.instances[i].event.as_str()).collect();
    let logits = model.event_logits(&gs, &events)?;
    let correct = logits
        .iter()
        .zip(indices)
        .filter(|(z, &i)| argmax(z) == ds.instances[i].label)
        .count();
    Ok(correct as f64 / indices.len() as f64)
}

/// Splits `indices` into batches that keep each event's instances together.
///
/// Events are visited in shuffled order and packed greedily; an event larger
/// than `batch_size` is cut into batch-sized chunks.
pub fn event_batches(ds: &Dataset, indices: &[usize], batch_size: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let batch_size = batch_size.max(1);
    let events: Vec<&str> = indices.iter().map(|&i| ds.instances[i].event.as_str()).collect();
    let mut groups: Vec<Vec<usize>> = group_by_event(&events)
        .into_values()
        .map(|members| members.into_iter().map(|p| indices[p]).collect())
        .collect();
    groups.shuffle(rng);
    let mut batches = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for group in groups {
        for chunk in group.chunks(batch_size) {
            if !current.is_empty() && current.len() + chunk.len() > batch_size {
                batches.push(std::mem::take(&mut current));
            }
            current.extend_from_slice(chunk);
        }
    }
    if !current.is_empty() {
        batches.push(current);
    }
    batches
}

/// Mean over batches, where `sums` holds per-batch values weighted by size.
fn mean_of(sum: f64, count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

pub fn train_target(set: TrainingSet, model_cfg: &ModelConfig, cfg: &TrainConfig, seed: u64) -> Result<Trained<TargetPredictor>> {
    check_set(&set)?;
    let ds = set.dataset;
    let mut model = TargetPredictor::init(ds.feature_dim, ds.num_classes(), model_cfg, &mut stream(seed, TARGET_INIT));
    let mut shuffle = stream(seed, SHUFFLE);
    let aug_seed = seed ^ AUGMENT;
    let mut adam = Adam::new(cfg.lr);
    let mut order = set.train.to_vec();
    let mut log = Vec::with_capacity(cfg.epochs);
    let mut best: Option<(f64, usize, TargetPredictor)> = None;

    for epoch in 0..cfg.epochs {
        let epoch_radius = match cfg.radius_scope {
            RadiusScope::Epoch => {
                let reps = set
                    .train
                    .iter()
                    .map(|&i| model.representation(&set.graphs[i]))
                    .collect::<Result<Vec<_>>>()?;
                Some(compute_radius(&reps)?)
            }
            RadiusScope::Batch => None,
        };

        order.shuffle(&mut shuffle);
        let (mut ce_sum, mut cl_sum, mut total_sum) = (0.0, 0.0, 0.0);
        for (b, batch) in order.chunks(cfg.batch_size.max(1)).enumerate() {
            let mut tape = Tape::new();
            let bound = model.bind(&mut tape);
            let reps = batch
                .iter()
                .map(|&i| bound.encoder.encode(&mut tape, &set.graphs[i]))
                .collect::<Result<Vec<_>>>()?;
            let rep_values: Vec<Vec<f64>> = reps.iter().map(|&r| tape.value(r).data().to_vec()).collect();
            let radius = match epoch_radius {
                Some(d) => d,
                None => compute_radius(&rep_values)?,
            };
            let ctx = AugmentationContext {
                radius,
                num_candidates: cfg.num_candidates,
            };
            // selection uses the classifier as it stands at the start of the step
            let offsets: Vec<Vec<f64>> = batch
                .iter()
                .zip(&rep_values)
                .map(|(&i, rep)| {
                    let mut rng = sample_rng(aug_seed, i, epoch);
                    augment(rep, &ctx, &model.classifier, ds.instances[i].label, &mut rng).offset
                })
                .collect();
            let labels: Vec<usize> = batch.iter().map(|&i| ds.instances[i].label).collect();
            let obj = TargetPredictor::objective_from_reps(&bound, &mut tape, &reps, &labels, &offsets, cfg.alpha)?;

            let total = tape.value(obj.total).data()[0];
            if !total.is_finite() {
                return Err(FadeError::NonFiniteLoss { epoch, batch: b });
            }
            let n = batch.len() as f64;
            ce_sum += tape.value(obj.ce).data()[0] * n;
            cl_sum += tape.value(obj.cl).data()[0] * n;
            total_sum += total * n;

            let mut grads = tape.backward(obj.total)?;
            let g: Vec<Matrix> = bound.vars().into_iter().map(|v| grads.take(v)).collect();
            adam.step(&mut model.params_mut(), &g)?;
        }

        let val_acc = if set.val.is_empty() {
            None
        } else {
            Some(target_accuracy(&model, ds, set.graphs, set.val)?)
        };
        let count = order.len();
        log.push(EpochLog {
            epoch,
            loss_ce: mean_of(ce_sum, count),
            loss_cl: mean_of(cl_sum, count),
            loss_total: mean_of(total_sum, count),
            val_acc,
        });
        keep_best(&mut best, val_acc, epoch, &model);
    }

    Ok(finish(model, log, best))
}

pub fn train_event_only(
    set: TrainingSet,
    model_cfg: &ModelConfig,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<Trained<EventOnlyPredictor>> {
    check_set(&set)?;
    let ds = set.dataset;
    let mut model = EventOnlyPredictor::init(ds.feature_dim, ds.num_classes(), model_cfg, &mut stream(seed, EVENT_INIT));
    let mut shuffle = stream(seed, SHUFFLE ^ EVENT_INIT);
    let mut adam = Adam::new(cfg.lr);
    let mut log = Vec::with_capacity(cfg.epochs);
    let mut best: Option<(f64, usize, EventOnlyPredictor)> = None;

    for epoch in 0..cfg.epochs {
        let batches = event_batches(ds, set.train, cfg.batch_size, &mut shuffle);
        let mut ce_sum = 0.0;
        for (b, batch) in batches.iter().enumerate() {
            let mut tape = Tape::new();
            let bound = model.bind(&mut tape);
            let graphs: Vec<&PreparedGraph> = batch.iter().map(|&i| &set.graphs[i]).collect();
            let labels: Vec<usize> = batch.iter().map(|&i| ds.instances[i].label).collect();
            let events: Vec<&str> = batch.iter().map(|&i| ds.instances[i].event.as_str()).collect();
            let loss = EventOnlyPredictor::objective(&bound, &mut tape, &graphs, &labels, &events)?;
            let value = tape.value(loss).data()[0];
            if !value.is_finite() {
                return Err(FadeError::NonFiniteLoss { epoch, batch: b });
            }
            ce_sum += value * batch.len() as f64;
            let mut grads = tape.backward(loss)?;
            let g: Vec<Matrix> = bound.vars().into_iter().map(|v| grads.take(v)).collect();
            adam.step(&mut model.params_mut(), &g)?;
        }
        let val_acc = if set.val.is_empty() {
            None
        } else {
            Some(event_only_accuracy(&model, ds, set.graphs, set.val)?)
        };
        let ce = mean_of(ce_sum, set.train.len());
        log.push(EpochLog {
            epoch,
            loss_ce: ce,
            loss_cl: 0.0,
            loss_total: ce,
            val_acc,
        });
        keep_best(&mut best, val_acc, epoch, &model);
    }

    Ok(finish(model, log, best))
}

fn keep_best<M: Clone>(best: &mut Option<(f64, usize, M)>, val_acc: Option<f64>, epoch: usize, model: &M) {
    if let Some(acc) = val_acc {
        if best.as_ref().is_none_or(|(b, _, _)| acc > *b) {
            *best = Some((acc, epoch, model.clone()));
        }
    }
}

fn finish<M>(last: M, log: Vec<EpochLog>, best: Option<(f64, usize, M)>) -> Trained<M> {
    match best {
        Some((_, best_epoch, model)) => Trained { model, log, best_epoch },
        None => Trained {
            best_epoch: log.len().saturating_sub(1),
            model: last,
            log,
        },
    }
}
