//! Debiased inference and evaluation metrics.
//!
//! Final scores are `O^D = O^T − β·O^E` on raw logits, where `O^E` comes from
//! the event-only predictor applied to the mean representation of all
//! co-evaluated instances sharing the event.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::encoder::PreparedGraph;
use crate::error::{FadeError, Result};
use crate::graph::Dataset;
use crate::predictors::{EventOnlyPredictor, TargetPredictor};
use crate::tensor::argmax;

/// `target − β·event_only`
pub fn debias(target: &[f64], event_only: &[f64], beta: f64) -> Result<Vec<f64>> {
    if target.len() != event_only.len() {
        return Err(FadeError::dim("debias", (1, target.len()), (1, event_only.len())));
    }
    Ok(target.iter().zip(event_only).map(|(t, e)| t - beta * e).collect())
}

/// Both predictors' logits for one instance; debiasing for any β is cheap from here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scored {
    pub id: String,
    pub event: String,
    pub label: usize,
    pub target_logits: Vec<f64>,
    pub event_logits: Vec<f64>,
}

impl Scored {
    pub fn predict(&self, beta: f64) -> usize {
        let d = debias(&self.target_logits, &self.event_logits, beta).expect("matching class counts");
        argmax(&d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub event: String,
    pub label: usize,
    pub predicted: usize,
    pub debiased_logits: Vec<f64>,
}

/// Runs both predictors over `indices` of `ds`, pooling event-only
/// representations over the instances of each event within `indices`.
pub fn score(
    target: &TargetPredictor,
    event_only: &EventOnlyPredictor,
    ds: &Dataset,
    graphs: &[PreparedGraph],
    indices: &[usize],
) -> Result<Vec<Scored>> {
    if target.num_classes() != event_only.num_classes() {
        return Err(FadeError::dim(
            "score",
            (1, target.num_classes()),
            (1, event_only.num_classes()),
        ));
    }
    let gs: Vec<&PreparedGraph> = indices.iter().map(|&i| &graphs[i]).collect();
    let events: Vec<&str> = indices.iter().map(|&i| ds.instances[i].event.as_str()).collect();
    let event_logits = event_only.event_logits(&gs, &events)?;
    indices
        .iter()
        .zip(event_logits)
        .map(|(&i, event_logits)| {
            let inst = &ds.instances[i];
            Ok(Scored {
                id: inst.id.clone(),
                event: inst.event.clone(),
                label: inst.label,
                target_logits: target.logits(&graphs[i])?,
                event_logits,
            })
        })
        .collect()
}

pub fn predict(scored: &[Scored], beta: f64) -> Result<Vec<Prediction>> {
    scored
        .iter()
        .map(|s| {
            let d = debias(&s.target_logits, &s.event_logits, beta)?;
            Ok(Prediction {
                id: s.id.clone(),
                event: s.event.clone(),
                label: s.label,
                predicted: argmax(&d),
                debiased_logits: d,
            })
        })
        .collect()
}

pub fn accuracy_at(scored: &[Scored], beta: f64) -> f64 {
    if scored.is_empty() {
        return 0.0;
    }
    let correct = scored.iter().filter(|s| s.predict(beta) == s.label).count();
    correct as f64 / scored.len() as f64
}

/// β from `grid` with the highest accuracy; ties go to the smallest β.
pub fn sweep_beta(scored: &[Scored], grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(FadeError::Empty("beta grid"));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best = (sorted[0], accuracy_at(scored, sorted[0]));
    for &b in &sorted[1..] {
        let acc = accuracy_at(scored, b);
        if acc > best.1 {
            best = (b, acc);
        }
    }
    Ok(best.0)
}

/// `{0, 0.1, …, 1.0}`
pub fn default_beta_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassF1 {
    pub class: String,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub per_class_f1: Vec<ClassF1>,
    /// `confusion[true][predicted]`
    pub confusion: Vec<Vec<usize>>,
    pub n_test: usize,
    pub n_events: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

pub fn evaluate(predictions: &[Prediction], class_names: &[String]) -> Result<EvalReport> {
    if predictions.is_empty() {
        return Err(FadeError::Empty("evaluate"));
    }
    let l = class_names.len();
    let mut confusion = vec![vec![0usize; l]; l];
    for p in predictions {
        if p.label >= l || p.predicted >= l {
            return Err(FadeError::Domain {
                op: "evaluate",
                detail: format!("class index out of range for instance {}", p.id),
            });
        }
        confusion[p.label][p.predicted] += 1;
    }
    let total = predictions.len();
    let trace: usize = (0..l).map(|c| confusion[c][c]).sum();
    let per_class_f1 = class_names
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let tp = confusion[c][c] as f64;
            let actual: usize = confusion[c].iter().sum();
            let predicted: usize = confusion.iter().map(|r| r[c]).sum();
            let denom = (actual + predicted) as f64;
            ClassF1 {
                class: name.clone(),
                f1: if denom == 0.0 { 0.0 } else { 2.0 * tp / denom },
            }
        })
        .collect();
    let mut events: Vec<&str> = predictions.iter().map(|p| p.event.as_str()).collect();
    events.sort_unstable();
    events.dedup();
    Ok(EvalReport {
        accuracy: trace as f64 / total as f64,
        per_class_f1,
        confusion,
        n_test: total,
        n_events: events.len(),
        beta: None,
    })
}

impl EvalReport {
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<12} {:>8}", "metric", "value");
        let _ = writeln!(s, "{:<12} {:>8.4}", "accuracy", self.accuracy);
        for c in &self.per_class_f1 {
            let _ = writeln!(s, "{:<12} {:>8.4}", format!("F1[{}]", c.class), c.f1);
        }
        let _ = writeln!(s, "{:<12} {:>8}", "n_test", self.n_test);
        let _ = writeln!(s, "{:<12} {:>8}", "n_events", self.n_events);
        if let Some(b) = self.beta {
            let _ = writeln!(s, "{:<12} {:>8.2}", "beta", b);
        }
        s
    }

    /// Bar chart of per-class F1.
    pub fn to_svg(&self) -> String {
        let bar_w = 60.0;
        let gap = 20.0;
        let height = 200.0;
        let width = gap + self.per_class_f1.len() as f64 * (bar_w + gap);
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{}\">\n",
            height + 40.0
        );
        for (i, c) in self.per_class_f1.iter().enumerate() {
            let x = gap + i as f64 * (bar_w + gap);
            let h = c.f1 * height;
            let _ = writeln!(
                s,
                "  <rect x=\"{x}\" y=\"{:.2}\" width=\"{bar_w}\" height=\"{h:.2}\" fill=\"#4a7ab7\"/>",
                height - h
            );
            let _ = writeln!(
                s,
                "  <text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{} ({:.2})</text>",
                x + bar_w / 2.0,
                height + 20.0,
                xml_escape(&c.class),
                c.f1
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
