use crate::autodiff::{Tape, Var};
use crate::error::{FadeError, Result};
use crate::tensor::Matrix;

/// Norm offset guarding the cosine against zero projections.
pub const COSINE_EPS: f64 = 1e-12;

/// Mean cross-entropy of softmax(logits) against integer labels, B×L logits.
pub fn ce_loss(tape: &mut Tape, logits: Var, labels: &[usize]) -> Result<Var> {
    let (rows, classes) = tape.shape(logits);
    if rows == 0 {
        return Err(FadeError::Empty("ce_loss"));
    }
    if let Some(&bad) = labels.iter().find(|&&y| y >= classes) {
        return Err(FadeError::Domain {
            op: "ce_loss",
            detail: format!("label {bad} ≥ class count {classes}"),
        });
    }
    let log_probs = tape.log_softmax_rows(logits)?;
    let picked = tape.pick(log_probs, labels)?;
    let mean = tape.mean(picked)?;
    Ok(tape.scale(mean, -1.0))
}

/// Negative cosine similarity between matching rows, averaged over the batch.
pub fn contrastive_loss(tape: &mut Tape, original: Var, augmented: Var) -> Result<Var> {
    if tape.shape(original) != tape.shape(augmented) {
        return Err(FadeError::dim(
            "contrastive_loss",
            tape.shape(original),
            tape.shape(augmented),
        ));
    }
    let prod = tape.hadamard(original, augmented)?;
    let dots = tape.row_sum(prod)?;
    let n_o = tape.row_norm(original)?;
    let n_o = tape.add_scalar(n_o, COSINE_EPS);
    let n_a = tape.row_norm(augmented)?;
    let n_a = tape.add_scalar(n_a, COSINE_EPS);
    let denom = tape.hadamard(n_o, n_a)?;
    let cos = tape.div(dots, denom)?;
    let mean = tape.mean(cos)?;
    Ok(tape.scale(mean, -1.0))
}

/// Convenience wrapper evaluating [`ce_loss`] on plain logits.
pub fn cross_entropy(logits: &Matrix, labels: &[usize]) -> Result<f64> {
    let mut tape = Tape::new();
    let l = tape.leaf(logits.clone());
    let loss = ce_loss(&mut tape, l, labels)?;
    Ok(tape.value(loss).data()[0])
}

/// Convenience wrapper evaluating [`contrastive_loss`] on plain projections.
pub fn negative_cosine(original: &Matrix, augmented: &Matrix) -> Result<f64> {
    let mut tape = Tape::new();
    let o = tape.leaf(original.clone());
    let a = tape.leaf(augmented.clone());
    let loss = contrastive_loss(&mut tape, o, a)?;
    Ok(tape.value(loss).data()[0])
}
