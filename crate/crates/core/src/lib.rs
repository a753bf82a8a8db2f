//! Event-adaptive fake news detection on propagation graphs.
//!
//! A GCN target predictor is trained with representation-space augmentation
//! and a contrastive term; an event-only predictor learns each event's label
//! prior from pooled event representations. At inference the event-only
//! logits are subtracted from the target logits with weight β.

pub mod augment;
pub mod config;
pub mod autodiff;
pub mod encoder;
pub mod experiment;
pub mod error;
pub mod graph;
pub mod inference;
pub mod optim;
pub mod predictors;
pub mod split;
pub mod synth;
pub mod tensor;

#[cfg(test)]
mod testutil;

pub use error::{FadeError, Result};
