//! Graph-convolutional encoder: `H⁽ˡ⁺¹⁾ = relu(N H⁽ˡ⁾ W⁽ˡ⁾)` followed by a
//! permutation-invariant pooling over nodes.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Tape, Var};
use crate::error::{FadeError, Result};
use crate::graph::PropagationGraph;
use crate::tensor::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    #[default]
    Mean,
    Add,
}

impl FromStr for Pooling {
    type Err = FadeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Pooling::Mean),
            "add" => Ok(Pooling::Add),
            other => Err(FadeError::Config(format!("unknown pooling '{other}'"))),
        }
    }
}

impl fmt::Display for Pooling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pooling::Mean => "mean",
            Pooling::Add => "add",
        })
    }
}

/// A graph ready for encoding: normalized adjacency plus node features.
#[derive(Debug, Clone)]
pub struct PreparedGraph {
    pub adjacency: Matrix,
    pub features: Matrix,
}

impl PreparedGraph {
    pub fn new(g: &PropagationGraph) -> Self {
        PreparedGraph {
            adjacency: g.normalized_adjacency(),
            features: g.features().clone(),
        }
    }
}

/// Glorot-uniform initialization.
pub fn glorot(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    let data = (0..rows * cols).map(|_| rng.random_range(-limit..limit)).collect();
    Matrix::new(rows, cols, data).expect("shape by construction")
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcnEncoder {
    pub layers: Vec<Matrix>,
    pub pooling: Pooling,
}

impl GcnEncoder {
    pub fn new(layers: Vec<Matrix>, pooling: Pooling) -> Result<Self> {
        if layers.is_empty() {
            return Err(FadeError::Empty("encoder layers"));
        }
        for w in layers.windows(2) {
            if w[0].cols() != w[1].rows() {
                return Err(FadeError::dim("encoder layers", w[0].shape(), w[1].shape()));
            }
        }
        Ok(GcnEncoder { layers, pooling })
    }

    pub fn init(input_dim: usize, hidden_dim: usize, depth: usize, pooling: Pooling, rng: &mut impl Rng) -> Self {
        let layers = (0..depth.max(1))
            .map(|l| glorot(if l == 0 { input_dim } else { hidden_dim }, hidden_dim, rng))
            .collect();
        GcnEncoder { layers, pooling }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].rows()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, Matrix::cols)
    }

    pub fn bind(&self, tape: &mut Tape) -> BoundEncoder {
        BoundEncoder {
            layers: self.layers.iter().map(|w| tape.leaf(w.clone())).collect(),
            pooling: self.pooling,
        }
    }

    /// Graph-level representation (1×hidden) without recording gradients.
    pub fn encode(&self, g: &PreparedGraph) -> Result<Matrix> {
        let mut tape = Tape::new();
        let bound = self.bind(&mut tape);
        let r = bound.encode(&mut tape, g)?;
        Ok(tape.value(r).clone())
    }
}

/// Encoder weights registered on a tape.
#[derive(Debug, Clone)]
pub struct BoundEncoder {
    pub layers: Vec<Var>,
    pub pooling: Pooling,
}

impl BoundEncoder {
    pub fn encode(&self, tape: &mut Tape, g: &PreparedGraph) -> Result<Var> {
        let in_dim = tape.shape(self.layers[0]).0;
        if g.features.cols() != in_dim {
            return Err(FadeError::dim("encode", g.features.shape(), tape.shape(self.layers[0])));
        }
        let adj = tape.leaf(g.adjacency.clone());
        let mut h = tape.leaf(g.features.clone());
        for &w in &self.layers {
            let mixed = tape.matmul(adj, h)?;
            let lin = tape.matmul(mixed, w)?;
            h = tape.relu(lin);
        }
        match self.pooling {
            Pooling::Mean => tape.col_mean(h),
            Pooling::Add => tape.col_sum(h),
        }
    }
}

/// Affine map `x W + b` applied row-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    pub weight: Matrix,
    pub bias: Matrix,
}

impl Linear {
    pub fn init(input: usize, output: usize, rng: &mut impl Rng) -> Self {
        Linear {
            weight: glorot(input, output, rng),
            bias: Matrix::zeros(1, output),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.weight.cols()
    }

    pub fn bind(&self, tape: &mut Tape) -> BoundLinear {
        BoundLinear {
            weight: tape.leaf(self.weight.clone()),
            bias: tape.leaf(self.bias.clone()),
        }
    }

    /// Applies the map to a single row vector.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.bias.data().to_vec();
        for (i, &xi) in x.iter().enumerate() {
            for (o, w) in out.iter_mut().zip(self.weight.row(i)) {
                *o += xi * w;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BoundLinear {
    pub weight: Var,
    pub bias: Var,
}

impl BoundLinear {
    pub fn forward(&self, tape: &mut Tape, x: Var) -> Result<Var> {
        let xw = tape.matmul(x, self.weight)?;
        tape.add_row(xw, self.bias)
    }
}
