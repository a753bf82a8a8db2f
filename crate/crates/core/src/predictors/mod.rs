//! The two independently trained predictors.
//!
//! The target predictor (encoder, classifier, projection head) is trained on
//! cross-entropy plus a contrastive term between original and augmented
//! representations. The event-only predictor replaces every representation by
//! its event mean before classification, so it can only learn event-level
//! signal.

pub mod checkpoint;
pub mod loss;
pub mod pool;
mod train;

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::augment::RadiusScope;
use crate::autodiff::{Tape, Var};
use crate::encoder::{BoundEncoder, BoundLinear, GcnEncoder, Linear, Pooling, PreparedGraph};
use crate::error::{FadeError, Result};
use crate::tensor::Matrix;

use checkpoint::{NamedTensors, TensorTable};
pub use loss::{ce_loss, contrastive_loss, cross_entropy, negative_cosine};
pub use pool::{event_mean_pool, group_by_event, pool_by_event};
pub use train::{
    event_batches, event_only_accuracy, target_accuracy, train_event_only, train_target, EpochLog, Trained,
    TrainingSet,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub hidden_dim: usize,
    pub layers: usize,
    pub pooling: Pooling,
    pub proj_dim: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            hidden_dim: 64,
            layers: 2,
            pooling: Pooling::Mean,
            proj_dim: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Weight of the contrastive term.
    pub alpha: f64,
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub num_candidates: usize,
    pub radius_scope: RadiusScope,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            alpha: 0.3,
            lr: 1e-3,
            epochs: 30,
            batch_size: 32,
            num_candidates: 10,
            radius_scope: RadiusScope::Epoch,
        }
    }
}

fn pooling_tensor(p: Pooling) -> Matrix {
    Matrix::scalar(match p {
        Pooling::Mean => 0.0,
        Pooling::Add => 1.0,
    })
}

fn pooling_from_tensor(m: &Matrix) -> Result<Pooling> {
    match m.data() {
        [v] if *v == 0.0 => Ok(Pooling::Mean),
        [v] if *v == 1.0 => Ok(Pooling::Add),
        _ => Err(FadeError::CorruptCheckpoint("bad pooling tag".into())),
    }
}

fn encoder_tensors(enc: &GcnEncoder, out: &mut NamedTensors) {
    out.push(("meta.pooling".into(), pooling_tensor(enc.pooling)));
    for (l, w) in enc.layers.iter().enumerate() {
        out.push((format!("encoder.layer{l}"), w.clone()));
    }
}

fn encoder_from(table: &mut TensorTable) -> Result<GcnEncoder> {
    let pooling = pooling_from_tensor(&table.take("meta.pooling")?)?;
    let mut layers = Vec::new();
    while table.has(&format!("encoder.layer{}", layers.len())) {
        layers.push(table.take(&format!("encoder.layer{}", layers.len()))?);
    }
    GcnEncoder::new(layers, pooling).map_err(|e| FadeError::CorruptCheckpoint(e.to_string()))
}

fn linear_from(table: &mut TensorTable, prefix: &str) -> Result<Linear> {
    let weight = table.take(&format!("{prefix}.weight"))?;
    let bias = table.take(&format!("{prefix}.bias"))?;
    if bias.shape() != (1, weight.cols()) {
        return Err(FadeError::CorruptCheckpoint(format!("{prefix}: bias shape {:?}", bias.shape())));
    }
    Ok(Linear { weight, bias })
}

fn check_chain(prefix: &str, from: usize, to: usize) -> Result<()> {
    if from != to {
        return Err(FadeError::CorruptCheckpoint(format!("{prefix}: expects input {to}, gets {from}")));
    }
    Ok(())
}

/// Two-layer MLP with relu between.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionHead {
    pub hidden: Linear,
    pub output: Linear,
}

#[derive(Debug, Clone, Copy)]
pub struct BoundProjection {
    hidden: BoundLinear,
    output: BoundLinear,
}

impl BoundProjection {
    pub fn forward(&self, tape: &mut Tape, x: Var) -> Result<Var> {
        let h = self.hidden.forward(tape, x)?;
        let h = tape.relu(h);
        self.output.forward(tape, h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetPredictor {
    pub encoder: GcnEncoder,
    pub classifier: Linear,
    pub projection: ProjectionHead,
}

#[derive(Debug, Clone)]
pub struct BoundTarget {
    pub encoder: BoundEncoder,
    pub classifier: BoundLinear,
    pub projection: BoundProjection,
}

impl BoundTarget {
    /// Parameter nodes, in the order of [`TargetPredictor::params_mut`].
    pub fn vars(&self) -> Vec<Var> {
        let mut v = self.encoder.layers.clone();
        let p = &self.projection;
        v.extend([
            self.classifier.weight,
            self.classifier.bias,
            p.hidden.weight,
            p.hidden.bias,
            p.output.weight,
            p.output.bias,
        ]);
        v
    }
}

/// Loss nodes of one target-predictor batch.
#[derive(Debug, Clone, Copy)]
pub struct Objective {
    pub ce: Var,
    pub cl: Var,
    pub total: Var,
}

impl TargetPredictor {
    pub fn init(feature_dim: usize, num_classes: usize, cfg: &ModelConfig, rng: &mut impl Rng) -> Self {
        let encoder = GcnEncoder::init(feature_dim, cfg.hidden_dim, cfg.layers, cfg.pooling, rng);
        let classifier = Linear::init(cfg.hidden_dim, num_classes, rng);
        let projection = ProjectionHead {
            hidden: Linear::init(cfg.hidden_dim, cfg.proj_dim, rng),
            output: Linear::init(cfg.proj_dim, cfg.proj_dim, rng),
        };
        TargetPredictor {
            encoder,
            classifier,
            projection,
        }
    }

    pub fn num_classes(&self) -> usize {
        self.classifier.output_dim()
    }

    pub fn representation(&self, g: &PreparedGraph) -> Result<Vec<f64>> {
        Ok(self.encoder.encode(g)?.into_data())
    }

    /// Pre-softmax class scores.
    pub fn logits(&self, g: &PreparedGraph) -> Result<Vec<f64>> {
        Ok(self.classifier.apply(&self.representation(g)?))
    }

    pub fn params(&self) -> Vec<&Matrix> {
        let mut v: Vec<&Matrix> = self.encoder.layers.iter().collect();
        let p = &self.projection;
        v.extend([
            &self.classifier.weight,
            &self.classifier.bias,
            &p.hidden.weight,
            &p.hidden.bias,
            &p.output.weight,
            &p.output.bias,
        ]);
        v
    }

    pub fn params_mut(&mut self) -> Vec<&mut Matrix> {
        let mut v: Vec<&mut Matrix> = self.encoder.layers.iter_mut().collect();
        let p = &mut self.projection;
        v.extend([
            &mut self.classifier.weight,
            &mut self.classifier.bias,
            &mut p.hidden.weight,
            &mut p.hidden.bias,
            &mut p.output.weight,
            &mut p.output.bias,
        ]);
        v
    }

    pub fn bind(&self, tape: &mut Tape) -> BoundTarget {
        BoundTarget {
            encoder: self.encoder.bind(tape),
            classifier: self.classifier.bind(tape),
            projection: BoundProjection {
                hidden: self.projection.hidden.bind(tape),
                output: self.projection.output.bind(tape),
            },
        }
    }

    /// Builds `CE(F(R^O), y) + α·L_CL(P^O, P^A)` for a batch.
    ///
    /// `offsets[i]` is the augmentation `R^A − R^O` for graph i, recorded as a
    /// constant so gradients reach the parameters only through `R^O`.
    pub fn objective(
        bound: &BoundTarget,
        tape: &mut Tape,
        graphs: &[&PreparedGraph],
        labels: &[usize],
        offsets: &[Vec<f64>],
        alpha: f64,
    ) -> Result<Objective> {
        let reps = graphs
            .iter()
            .map(|g| bound.encoder.encode(tape, g))
            .collect::<Result<Vec<_>>>()?;
        Self::objective_from_reps(bound, tape, &reps, labels, offsets, alpha)
    }

    pub(crate) fn objective_from_reps(
        bound: &BoundTarget,
        tape: &mut Tape,
        reps: &[Var],
        labels: &[usize],
        offsets: &[Vec<f64>],
        alpha: f64,
    ) -> Result<Objective> {
        let original = tape.concat_rows(reps)?;
        let offset = tape.leaf(Matrix::from_rows(offsets)?);
        let augmented = tape.add(original, offset)?;
        let logits = bound.classifier.forward(tape, original)?;
        let ce = ce_loss(tape, logits, labels)?;
        let p_orig = bound.projection.forward(tape, original)?;
        let p_aug = bound.projection.forward(tape, augmented)?;
        let cl = contrastive_loss(tape, p_orig, p_aug)?;
        let weighted = tape.scale(cl, alpha);
        let total = tape.add(ce, weighted)?;
        Ok(Objective { ce, cl, total })
    }

    pub fn to_tensors(&self) -> NamedTensors {
        let mut out = Vec::new();
        encoder_tensors(&self.encoder, &mut out);
        for (prefix, lin) in [
            ("classifier", &self.classifier),
            ("projection.0", &self.projection.hidden),
            ("projection.1", &self.projection.output),
        ] {
            out.push((format!("{prefix}.weight"), lin.weight.clone()));
            out.push((format!("{prefix}.bias"), lin.bias.clone()));
        }
        out
    }

    pub fn from_tensors(tensors: NamedTensors) -> Result<Self> {
        let mut table = TensorTable::new(tensors);
        let encoder = encoder_from(&mut table)?;
        let classifier = linear_from(&mut table, "classifier")?;
        let hidden = linear_from(&mut table, "projection.0")?;
        let output = linear_from(&mut table, "projection.1")?;
        table.finish()?;
        check_chain("classifier", encoder.output_dim(), classifier.input_dim())?;
        check_chain("projection.0", encoder.output_dim(), hidden.input_dim())?;
        check_chain("projection.1", hidden.output_dim(), output.input_dim())?;
        Ok(TargetPredictor {
            encoder,
            classifier,
            projection: ProjectionHead { hidden, output },
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        checkpoint::save(path, &self.to_tensors())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_tensors(checkpoint::load(path)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventOnlyPredictor {
    pub encoder: GcnEncoder,
    pub classifier: Linear,
}

#[derive(Debug, Clone)]
pub struct BoundEventOnly {
    pub encoder: BoundEncoder,
    pub classifier: BoundLinear,
}

impl BoundEventOnly {
    pub fn vars(&self) -> Vec<Var> {
        let mut v = self.encoder.layers.clone();
        v.extend([self.classifier.weight, self.classifier.bias]);
        v
    }
}

impl EventOnlyPredictor {
    pub fn init(feature_dim: usize, num_classes: usize, cfg: &ModelConfig, rng: &mut impl Rng) -> Self {
        EventOnlyPredictor {
            encoder: GcnEncoder::init(feature_dim, cfg.hidden_dim, cfg.layers, cfg.pooling, rng),
            classifier: Linear::init(cfg.hidden_dim, num_classes, rng),
        }
    }

    pub fn num_classes(&self) -> usize {
        self.classifier.output_dim()
    }

    /// Per-instance representation before event pooling.
    pub fn representation(&self, g: &PreparedGraph) -> Result<Vec<f64>> {
        Ok(self.encoder.encode(g)?.into_data())
    }

    /// Logits for an event-mean representation.
    pub fn classify(&self, event_rep: &[f64]) -> Vec<f64> {
        self.classifier.apply(event_rep)
    }

    /// Logits for a collection of instances, pooled within each event.
    pub fn event_logits<S: AsRef<str>>(&self, graphs: &[&PreparedGraph], events: &[S]) -> Result<Vec<Vec<f64>>> {
        let reps = graphs
            .iter()
            .map(|g| self.representation(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(event_mean_pool(&reps, events)
            .iter()
            .map(|r| self.classify(r))
            .collect())
    }

    pub fn params(&self) -> Vec<&Matrix> {
        let mut v: Vec<&Matrix> = self.encoder.layers.iter().collect();
        v.extend([&self.classifier.weight, &self.classifier.bias]);
        v
    }

    pub fn params_mut(&mut self) -> Vec<&mut Matrix> {
        let mut v: Vec<&mut Matrix> = self.encoder.layers.iter_mut().collect();
        v.extend([&mut self.classifier.weight, &mut self.classifier.bias]);
        v
    }

    pub fn bind(&self, tape: &mut Tape) -> BoundEventOnly {
        BoundEventOnly {
            encoder: self.encoder.bind(tape),
            classifier: self.classifier.bind(tape),
        }
    }

    /// Mean cross-entropy of `F′(event mean of R′^O)` over a batch.
    pub fn objective<S: AsRef<str>>(
        bound: &BoundEventOnly,
        tape: &mut Tape,
        graphs: &[&PreparedGraph],
        labels: &[usize],
        events: &[S],
    ) -> Result<Var> {
        let reps = graphs
            .iter()
            .map(|g| bound.encoder.encode(tape, g))
            .collect::<Result<Vec<_>>>()?;
        let pooled = pool_by_event(tape, &reps, events)?;
        let stacked = tape.concat_rows(&pooled)?;
        let logits = bound.classifier.forward(tape, stacked)?;
        ce_loss(tape, logits, labels)
    }

    pub fn to_tensors(&self) -> NamedTensors {
        let mut out = Vec::new();
        encoder_tensors(&self.encoder, &mut out);
        out.push(("classifier.weight".into(), self.classifier.weight.clone()));
        out.push(("classifier.bias".into(), self.classifier.bias.clone()));
        out
    }

    pub fn from_tensors(tensors: NamedTensors) -> Result<Self> {
        let mut table = TensorTable::new(tensors);
        let encoder = encoder_from(&mut table)?;
        let classifier = linear_from(&mut table, "classifier")?;
        table.finish()?;
        check_chain("classifier", encoder.output_dim(), classifier.input_dim())?;
        Ok(EventOnlyPredictor { encoder, classifier })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        checkpoint::save(path, &self.to_tensors())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_tensors(checkpoint::load(path)?)
    }
}
