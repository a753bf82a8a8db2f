//! News cascades as propagation graphs, and the JSON Lines dataset format.
//!
//! Line 1 is a header `{"classes":[...],"feature_dim":D}`; every further line
//! is one instance `{"id","event","label","n","edges","x"}`.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{FadeError, Result};
use crate::tensor::Matrix;

/// One news cascade: node 0 is the source post, edges are parent→child replies.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationGraph {
    features: Matrix,
    edges: Vec<(usize, usize)>,
}

impl PropagationGraph {
    pub fn new(features: Matrix, edges: Vec<(usize, usize)>) -> Result<Self> {
        let g = PropagationGraph { features, edges };
        g.check().map_err(|detail| FadeError::Validation {
            id: "<graph>".into(),
            detail,
        })?;
        Ok(g)
    }

    fn check(&self) -> std::result::Result<(), String> {
        let n = self.features.rows();
        if n == 0 {
            return Err("graph has no nodes".into());
        }
        if !self.features.is_finite() {
            return Err("non-finite node feature".into());
        }
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(p, c) in &self.edges {
            if p >= n || c >= n {
                return Err(format!("edge endpoint out of range: ({p},{c}) with {n} nodes"));
            }
            if p == c {
                return Err(format!("self-loop on node {p}"));
            }
            children[p].push(c);
            children[c].push(p);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &children[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if let Some(lost) = seen.iter().position(|s| !s) {
            return Err(format!("node {lost} not reachable from the source post"));
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.features.rows()
    }

    pub fn feature_dim(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `D̃^(−1/2) Ã D̃^(−1/2)` with `Ã = A + I` and `A` the symmetrized reply adjacency.
    pub fn normalized_adjacency(&self) -> Matrix {
        let n = self.node_count();
        let mut a = Matrix::identity(n);
        for &(p, c) in &self.edges {
            a.set(p, c, 1.0);
            a.set(c, p, 1.0);
        }
        let inv_sqrt_deg: Vec<f64> = a
            .iter_rows()
            .map(|r| 1.0 / r.iter().sum::<f64>().sqrt())
            .collect();
        for i in 0..n {
            for j in 0..n {
                let v = a.get(i, j);
                if v != 0.0 {
                    a.set(i, j, v * inv_sqrt_deg[i] * inv_sqrt_deg[j]);
                }
            }
        }
        a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewsInstance {
    pub id: String,
    pub event: String,
    pub label: usize,
    pub graph: PropagationGraph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub class_names: Vec<String>,
    pub feature_dim: usize,
    pub instances: Vec<NewsInstance>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    classes: Vec<String>,
    feature_dim: usize,
}

#[derive(Serialize, Deserialize)]
struct Record {
    id: String,
    event: String,
    label: usize,
    n: usize,
    edges: Vec<[usize; 2]>,
    x: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(class_names: Vec<String>, feature_dim: usize, instances: Vec<NewsInstance>) -> Result<Self> {
        let ds = Dataset {
            class_names,
            feature_dim,
            instances,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.instances.iter().position(|i| i.id == id)
    }

    /// Distinct event labels in first-appearance order.
    pub fn events(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.instances
            .iter()
            .map(|i| i.event.as_str())
            .filter(|e| seen.insert(*e))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.class_names.is_empty() {
            return Err(FadeError::Validation {
                id: "<header>".into(),
                detail: "no classes declared".into(),
            });
        }
        let mut ids = HashSet::new();
        for inst in &self.instances {
            validate_instance(inst, self.num_classes(), self.feature_dim)?;
            if !ids.insert(inst.id.as_str()) {
                return Err(FadeError::Validation {
                    id: inst.id.clone(),
                    detail: "duplicate id".into(),
                });
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| FadeError::io(path, e))?;
        Self::read(BufReader::new(file)).map_err(|e| match e {
            FadeError::Io { source, .. } => FadeError::io(path, source),
            other => other,
        })
    }

    pub fn read(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let header: Header = loop {
            match lines.next() {
                None => {
                    return Err(FadeError::Parse {
                        line: 1,
                        detail: "missing header".into(),
                    })
                }
                Some((i, line)) => {
                    let line = line.map_err(|e| FadeError::io("<reader>", e))?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    break serde_json::from_str(&line).map_err(|e| FadeError::Parse {
                        line: i + 1,
                        detail: e.to_string(),
                    })?;
                }
            }
        };
        let mut ds = Dataset {
            class_names: header.classes,
            feature_dim: header.feature_dim,
            instances: Vec::new(),
        };
        let mut ids = HashSet::new();
        for (i, line) in lines {
            let line = line.map_err(|e| FadeError::io("<reader>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: Record = serde_json::from_str(&line).map_err(|e| FadeError::Parse {
                line: i + 1,
                detail: e.to_string(),
            })?;
            let inst = record_to_instance(rec, ds.feature_dim)?;
            validate_instance(&inst, ds.class_names.len(), ds.feature_dim)?;
            if !ids.insert(inst.id.clone()) {
                return Err(FadeError::Validation {
                    id: inst.id,
                    detail: "duplicate id".into(),
                });
            }
            ds.instances.push(inst);
        }
        if ds.class_names.is_empty() {
            return Err(FadeError::Validation {
                id: "<header>".into(),
                detail: "no classes declared".into(),
            });
        }
        Ok(ds)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| FadeError::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write(&mut w).map_err(|e| match e {
            FadeError::Io { source, .. } => FadeError::io(path, source),
            other => other,
        })?;
        w.flush().map_err(|e| FadeError::io(path, e))
    }

    pub fn write(&self, w: &mut impl Write) -> Result<()> {
        let io = |e| FadeError::io("<writer>", e);
        let header = Header {
            classes: self.class_names.clone(),
            feature_dim: self.feature_dim,
        };
        serde_json::to_writer(&mut *w, &header)?;
        w.write_all(b"\n").map_err(io)?;
        for inst in &self.instances {
            let rec = Record {
                id: inst.id.clone(),
                event: inst.event.clone(),
                label: inst.label,
                n: inst.graph.node_count(),
                edges: inst.graph.edges.iter().map(|&(p, c)| [p, c]).collect(),
                x: inst.graph.features.iter_rows().map(<[f64]>::to_vec).collect(),
            };
            serde_json::to_writer(&mut *w, &rec)?;
            w.write_all(b"\n").map_err(io)?;
        }
        Ok(())
    }
}

fn record_to_instance(rec: Record, feature_dim: usize) -> Result<NewsInstance> {
    let invalid = |detail: String| FadeError::Validation {
        id: rec.id.clone(),
        detail,
    };
    if rec.x.len() != rec.n {
        return Err(invalid(format!("n = {} but x has {} rows", rec.n, rec.x.len())));
    }
    if let Some(bad) = rec.x.iter().find(|r| r.len() != feature_dim) {
        return Err(invalid(format!(
            "feature row of length {} (feature_dim {feature_dim})",
            bad.len()
        )));
    }
    let features = Matrix::from_rows(&rec.x).map_err(|e| invalid(e.to_string()))?;
    let features = if rec.n == 0 { Matrix::zeros(0, feature_dim) } else { features };
    let edges = rec.edges.iter().map(|e| (e[0], e[1])).collect();
    Ok(NewsInstance {
        graph: PropagationGraph { features, edges },
        id: rec.id,
        event: rec.event,
        label: rec.label,
    })
}

fn validate_instance(inst: &NewsInstance, num_classes: usize, feature_dim: usize) -> Result<()> {
    let invalid = |detail: String| FadeError::Validation {
        id: inst.id.clone(),
        detail,
    };
    if inst.id.is_empty() {
        return Err(invalid("empty id".into()));
    }
    if inst.event.is_empty() {
        return Err(invalid("empty event label".into()));
    }
    if inst.label >= num_classes {
        return Err(invalid(format!("label {} ≥ class count {num_classes}", inst.label)));
    }
    if inst.graph.feature_dim() != feature_dim {
        return Err(invalid(format!(
            "feature_dim {} ≠ dataset feature_dim {feature_dim}",
            inst.graph.feature_dim()
        )));
    }
    inst.graph.check().map_err(invalid)
}
