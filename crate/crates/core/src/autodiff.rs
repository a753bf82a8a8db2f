//! Reverse-mode automatic differentiation over dense matrices.
//!
//! A [`Tape`] records every operation in creation order. Because a node can
//! only reference nodes created before it, walking the tape backwards from
//! the loss is a valid reverse topological order and visits each node once.

use crate::error::{FadeError, Result};
use crate::tensor::Matrix;

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Hadamard(Var, Var),
    Div(Var, Var),
    Scale(Var, f64),
    AddScalar(Var),
    Relu(Var),
    Tanh(Var),
    Exp(Var),
    Log(Var),
    Sum(Var),
    Mean(Var),
    RowSum(Var),
    ColSum(Var),
    ColMean(Var),
    L2Norm(Var),
    RowNorm(Var),
    AddRow(Var, Var),
    SubCol(Var, Var),
    ConcatRows(Vec<Var>),
    RepeatRow(Var),
    Pick(Var, Vec<usize>),
}

#[derive(Debug)]
struct Node {
    value: Matrix,
    op: Op,
}

#[derive(Debug, Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

/// Gradients of a scalar loss with respect to every node on the tape.
#[derive(Debug, Clone)]
pub struct Gradients {
    grads: Vec<Matrix>,
}

impl Gradients {
    pub fn get(&self, v: Var) -> &Matrix {
        &self.grads[v.0]
    }

    pub fn take(&mut self, v: Var) -> Matrix {
        std::mem::replace(&mut self.grads[v.0], Matrix::zeros(0, 0))
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Matrix, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, v: Var) -> &Matrix {
        &self.nodes[v.0].value
    }

    pub fn shape(&self, v: Var) -> (usize, usize) {
        self.nodes[v.0].value.shape()
    }

    /// Records an input (parameter or constant).
    pub fn leaf(&mut self, value: Matrix) -> Var {
        self.push(value, Op::Leaf)
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.value(a).matmul(self.value(b))?;
        Ok(self.push(value, Op::MatMul(a, b)))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.value(a).zip_map(self.value(b), "add", |x, y| x + y)?;
        Ok(self.push(value, Op::Add(a, b)))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.value(a).zip_map(self.value(b), "sub", |x, y| x - y)?;
        Ok(self.push(value, Op::Sub(a, b)))
    }

    pub fn hadamard(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.value(a).zip_map(self.value(b), "hadamard", |x, y| x * y)?;
        Ok(self.push(value, Op::Hadamard(a, b)))
    }

    /// Elementwise division; a zero divisor is a domain error.
    pub fn div(&mut self, a: Var, b: Var) -> Result<Var> {
        if self.value(b).data().contains(&0.0) {
            return Err(FadeError::Domain {
                op: "div",
                detail: "division by zero".into(),
            });
        }
        let value = self.value(a).zip_map(self.value(b), "div", |x, y| x / y)?;
        Ok(self.push(value, Op::Div(a, b)))
    }

    pub fn scale(&mut self, a: Var, s: f64) -> Var {
        let value = self.value(a).scale(s);
        self.push(value, Op::Scale(a, s))
    }

    pub fn add_scalar(&mut self, a: Var, s: f64) -> Var {
        let value = self.value(a).map(|v| v + s);
        self.push(value, Op::AddScalar(a))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let value = self.value(a).map(|v| v.max(0.0));
        self.push(value, Op::Relu(a))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let value = self.value(a).map(f64::tanh);
        self.push(value, Op::Tanh(a))
    }

    pub fn exp(&mut self, a: Var) -> Var {
        let value = self.value(a).map(f64::exp);
        self.push(value, Op::Exp(a))
    }

    pub fn log(&mut self, a: Var) -> Result<Var> {
        if let Some(&bad) = self.value(a).data().iter().find(|&&v| v <= 0.0 || v.is_nan()) {
            return Err(FadeError::Domain {
                op: "log",
                detail: format!("non-positive entry {bad}"),
            });
        }
        let value = self.value(a).map(f64::ln);
        Ok(self.push(value, Op::Log(a)))
    }

    fn non_empty(&self, a: Var, op: &'static str) -> Result<()> {
        if self.value(a).is_empty() {
            return Err(FadeError::Empty(op));
        }
        Ok(())
    }

    /// Sum of all entries, as a 1×1 node.
    pub fn sum(&mut self, a: Var) -> Result<Var> {
        self.non_empty(a, "sum")?;
        let value = Matrix::scalar(self.value(a).sum());
        Ok(self.push(value, Op::Sum(a)))
    }

    pub fn mean(&mut self, a: Var) -> Result<Var> {
        self.non_empty(a, "mean")?;
        let m = self.value(a);
        let value = Matrix::scalar(m.sum() / m.len() as f64);
        Ok(self.push(value, Op::Mean(a)))
    }

    /// n×m → n×1
    pub fn row_sum(&mut self, a: Var) -> Result<Var> {
        self.non_empty(a, "row_sum")?;
        let m = self.value(a);
        let value = Matrix::new(m.rows(), 1, m.iter_rows().map(|r| r.iter().sum()).collect())?;
        Ok(self.push(value, Op::RowSum(a)))
    }

    /// n×m → 1×m
    pub fn col_sum(&mut self, a: Var) -> Result<Var> {
        self.non_empty(a, "col_sum")?;
        let value = column_sums(self.value(a));
        Ok(self.push(value, Op::ColSum(a)))
    }

    /// n×m → 1×m
    pub fn col_mean(&mut self, a: Var) -> Result<Var> {
        self.non_empty(a, "col_mean")?;
        let m = self.value(a);
        let value = column_sums(m).scale(1.0 / m.rows() as f64);
        Ok(self.push(value, Op::ColMean(a)))
    }

    /// Euclidean norm of a row or column vector, as 1×1.
    pub fn l2_norm(&mut self, a: Var) -> Result<Var> {
        self.non_empty(a, "l2_norm")?;
        let m = self.value(a);
        if !m.is_vector() {
            return Err(FadeError::dim("l2_norm", m.shape(), (1, m.len())));
        }
        let value = Matrix::scalar(crate::tensor::l2_norm(m.data()));
        Ok(self.push(value, Op::L2Norm(a)))
    }

    /// Per-row Euclidean norms, n×m → n×1.
    pub fn row_norm(&mut self, a: Var) -> Result<Var> {
        self.non_empty(a, "row_norm")?;
        let m = self.value(a);
        let value = Matrix::new(m.rows(), 1, m.iter_rows().map(crate::tensor::l2_norm).collect())?;
        Ok(self.push(value, Op::RowNorm(a)))
    }

    /// Adds a 1×m row to every row of an n×m node.
    pub fn add_row(&mut self, a: Var, row: Var) -> Result<Var> {
        let (am, rm) = (self.value(a), self.value(row));
        if rm.rows() != 1 || rm.cols() != am.cols() {
            return Err(FadeError::dim("add_row", am.shape(), rm.shape()));
        }
        let mut value = am.clone();
        for r in 0..value.rows() {
            for (v, b) in value.row_mut(r).iter_mut().zip(rm.data()) {
                *v += b;
            }
        }
        Ok(self.push(value, Op::AddRow(a, row)))
    }

    /// Subtracts an n×1 column from every column of an n×m node.
    pub fn sub_col(&mut self, a: Var, col: Var) -> Result<Var> {
        let (am, cm) = (self.value(a), self.value(col));
        if cm.cols() != 1 || cm.rows() != am.rows() {
            return Err(FadeError::dim("sub_col", am.shape(), cm.shape()));
        }
        let mut value = am.clone();
        for r in 0..value.rows() {
            let c = cm.data()[r];
            value.row_mut(r).iter_mut().for_each(|v| *v -= c);
        }
        Ok(self.push(value, Op::SubCol(a, col)))
    }

    /// Stacks nodes with equal column counts vertically.
    pub fn concat_rows(&mut self, parts: &[Var]) -> Result<Var> {
        let first = *parts.first().ok_or(FadeError::Empty("concat_rows"))?;
        let cols = self.value(first).cols();
        let mut data = Vec::new();
        let mut rows = 0;
        for &p in parts {
            let m = self.value(p);
            if m.cols() != cols {
                return Err(FadeError::dim("concat_rows", (rows, cols), m.shape()));
            }
            rows += m.rows();
            data.extend_from_slice(m.data());
        }
        let value = Matrix::new(rows, cols, data)?;
        Ok(self.push(value, Op::ConcatRows(parts.to_vec())))
    }

    /// Repeats a 1×m row `times` times, giving times×m.
    pub fn repeat_row(&mut self, a: Var, times: usize) -> Result<Var> {
        let m = self.value(a);
        if m.rows() != 1 {
            return Err(FadeError::dim("repeat_row", m.shape(), (1, m.cols())));
        }
        let data = m.data().repeat(times);
        let value = Matrix::new(times, m.cols(), data)?;
        Ok(self.push(value, Op::RepeatRow(a)))
    }

    /// Selects entry `indices[r]` from each row r, giving n×1.
    pub fn pick(&mut self, a: Var, indices: &[usize]) -> Result<Var> {
        let m = self.value(a);
        if indices.len() != m.rows() {
            return Err(FadeError::dim("pick", m.shape(), (indices.len(), 1)));
        }
        let mut data = Vec::with_capacity(indices.len());
        for (r, &c) in indices.iter().enumerate() {
            if c >= m.cols() {
                return Err(FadeError::Domain {
                    op: "pick",
                    detail: format!("column {c} out of range for {} columns", m.cols()),
                });
            }
            data.push(m.get(r, c));
        }
        let value = Matrix::new(indices.len(), 1, data)?;
        Ok(self.push(value, Op::Pick(a, indices.to_vec())))
    }

    /// Row-wise log-softmax, stabilized by subtracting each row's maximum.
    ///
    /// The shift is recorded as a constant; log-softmax is invariant to it so
    /// the gradient is unaffected.
    pub fn log_softmax_rows(&mut self, a: Var) -> Result<Var> {
        let maxes: Vec<f64> = self
            .value(a)
            .iter_rows()
            .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let shift = self.leaf(Matrix::new(maxes.len(), 1, maxes)?);
        let shifted = self.sub_col(a, shift)?;
        let e = self.exp(shifted);
        let z = self.row_sum(e)?;
        let lse = self.log(z)?;
        self.sub_col(shifted, lse)
    }

    /// Row-wise softmax built from `exp` and `row_sum`, with max-subtraction.
    pub fn softmax_rows(&mut self, a: Var) -> Result<Var> {
        let ls = self.log_softmax_rows(a)?;
        Ok(self.exp(ls))
    }

    /// Accumulates gradients of the scalar `loss` into a fresh gradient map.
    pub fn backward(&self, loss: Var) -> Result<Gradients> {
        let shape = self.shape(loss);
        if shape != (1, 1) {
            return Err(FadeError::NonScalarLoss(shape));
        }
        let mut grads: Vec<Matrix> = self
            .nodes
            .iter()
            .map(|n| Matrix::zeros(n.value.rows(), n.value.cols()))
            .collect();
        grads[loss.0] = Matrix::scalar(1.0);

        for idx in (0..=loss.0).rev() {
            let node = &self.nodes[idx];
            if matches!(node.op, Op::Leaf) {
                continue;
            }
            let g = std::mem::replace(&mut grads[idx], Matrix::zeros(0, 0));
            self.backward_node(node, &g, &mut grads)?;
            grads[idx] = g;
        }
        Ok(Gradients { grads })
    }

    fn backward_node(&self, node: &Node, g: &Matrix, grads: &mut [Matrix]) -> Result<()> {
        let val = |v: Var| &self.nodes[v.0].value;
        match &node.op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let ga = g.matmul_t(val(*b))?;
                let gb = val(*a).t_matmul(g)?;
                grads[a.0].add_assign(&ga);
                grads[b.0].add_assign(&gb);
            }
            Op::Add(a, b) => {
                grads[a.0].add_assign(g);
                grads[b.0].add_assign(g);
            }
            Op::Sub(a, b) => {
                grads[a.0].add_assign(g);
                grads[b.0].add_scaled_assign(g, -1.0);
            }
            Op::Hadamard(a, b) => {
                let ga = g.zip_map(val(*b), "hadamard'", |g, y| g * y)?;
                let gb = g.zip_map(val(*a), "hadamard'", |g, x| g * x)?;
                grads[a.0].add_assign(&ga);
                grads[b.0].add_assign(&gb);
            }
            Op::Div(a, b) => {
                let (x, y) = (val(*a), val(*b));
                let ga = g.zip_map(y, "div'", |g, y| g / y)?;
                let mut gb = Matrix::zeros(y.rows(), y.cols());
                for (i, o) in gb.data_mut().iter_mut().enumerate() {
                    let yi = y.data()[i];
                    *o = -g.data()[i] * x.data()[i] / (yi * yi);
                }
                grads[a.0].add_assign(&ga);
                grads[b.0].add_assign(&gb);
            }
            Op::Scale(a, s) => grads[a.0].add_scaled_assign(g, *s),
            Op::AddScalar(a) => grads[a.0].add_assign(g),
            Op::Relu(a) => {
                let ga = g.zip_map(val(*a), "relu'", |g, x| if x > 0.0 { g } else { 0.0 })?;
                grads[a.0].add_assign(&ga);
            }
            Op::Tanh(a) => {
                let ga = g.zip_map(&node.value, "tanh'", |g, t| g * (1.0 - t * t))?;
                grads[a.0].add_assign(&ga);
            }
            Op::Exp(a) => {
                let ga = g.zip_map(&node.value, "exp'", |g, e| g * e)?;
                grads[a.0].add_assign(&ga);
            }
            Op::Log(a) => {
                let ga = g.zip_map(val(*a), "log'", |g, x| g / x)?;
                grads[a.0].add_assign(&ga);
            }
            Op::Sum(a) => {
                let s = g.data()[0];
                grads[a.0].data_mut().iter_mut().for_each(|v| *v += s);
            }
            Op::Mean(a) => {
                let s = g.data()[0] / val(*a).len() as f64;
                grads[a.0].data_mut().iter_mut().for_each(|v| *v += s);
            }
            Op::RowSum(a) => {
                let ga = &mut grads[a.0];
                for r in 0..ga.rows() {
                    let s = g.data()[r];
                    ga.row_mut(r).iter_mut().for_each(|v| *v += s);
                }
            }
            Op::ColSum(a) | Op::ColMean(a) => {
                let ga = &mut grads[a.0];
                let scale = if matches!(node.op, Op::ColMean(_)) {
                    1.0 / ga.rows() as f64
                } else {
                    1.0
                };
                for r in 0..ga.rows() {
                    for (v, gc) in ga.row_mut(r).iter_mut().zip(g.data()) {
                        *v += scale * gc;
                    }
                }
            }
            Op::L2Norm(a) => {
                let norm = node.value.data()[0];
                // the zero vector gets a zero gradient
                if norm > 0.0 {
                    let s = g.data()[0] / norm;
                    grads[a.0].add_scaled_assign(val(*a), s);
                }
            }
            Op::RowNorm(a) => {
                let x = val(*a);
                let ga = &mut grads[a.0];
                for r in 0..x.rows() {
                    let norm = node.value.data()[r];
                    if norm > 0.0 {
                        let s = g.data()[r] / norm;
                        for (v, xv) in ga.row_mut(r).iter_mut().zip(x.row(r)) {
                            *v += s * xv;
                        }
                    }
                }
            }
            Op::AddRow(a, row) => {
                grads[a.0].add_assign(g);
                grads[row.0].add_assign(&column_sums(g));
            }
            Op::SubCol(a, col) => {
                grads[a.0].add_assign(g);
                let gc = &mut grads[col.0];
                for (r, s) in g.iter_rows().enumerate() {
                    gc.data_mut()[r] -= s.iter().sum::<f64>();
                }
            }
            Op::ConcatRows(parts) => {
                let mut offset = 0;
                for p in parts {
                    let rows = val(*p).rows();
                    let cols = g.cols();
                    let slice = &g.data()[offset * cols..(offset + rows) * cols];
                    for (v, s) in grads[p.0].data_mut().iter_mut().zip(slice) {
                        *v += s;
                    }
                    offset += rows;
                }
            }
            Op::RepeatRow(a) => grads[a.0].add_assign(&column_sums(g)),
            Op::Pick(a, indices) => {
                let ga = &mut grads[a.0];
                for (r, &c) in indices.iter().enumerate() {
                    let cur = ga.get(r, c);
                    ga.set(r, c, cur + g.data()[r]);
                }
            }
        }
        Ok(())
    }
}

fn column_sums(m: &Matrix) -> Matrix {
    let mut out = vec![0.0; m.cols()];
    for row in m.iter_rows() {
        for (o, v) in out.iter_mut().zip(row) {
            *o += v;
        }
    }
    Matrix::row_vector(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{central_difference, random_matrix, rel_err};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn row(v: &[f64]) -> Matrix {
        Matrix::row_vector(v.to_vec())
    }

    #[test]
    fn elementwise_values() {
        let mut t = Tape::new();
        let a = t.leaf(row(&[-1.0, 0.0, 2.0]));
        let r = t.relu(a);
        assert_eq!(t.value(r).data(), &[0.0, 0.0, 2.0]);

        let b = t.leaf(row(&[1.0, 2.0]));
        let z = t.scale(b, 0.0);
        assert_eq!(t.value(z).data(), &[0.0, 0.0]);
    }

    #[test]
    fn relu_gradient_at_zero_is_zero() {
        let mut t = Tape::new();
        let a = t.leaf(row(&[-1.0, 0.0, 2.0]));
        let r = t.relu(a);
        let s = t.sum(r).unwrap();
        let g = t.backward(s).unwrap();
        assert_eq!(g.get(a).data(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn reductions() {
        let mut t = Tape::new();
        let a = t.leaf(row(&[2.0, 4.0, 6.0]));
        let m = t.mean(a).unwrap();
        assert_eq!(t.value(m).data(), &[4.0]);

        let b = t.leaf(row(&[3.0, 4.0]));
        let n = t.l2_norm(b).unwrap();
        assert_eq!(t.value(n).data(), &[5.0]);

        let c = t.leaf(Matrix::zeros(2, 3));
        let s = t.sum(c).unwrap();
        let g = t.backward(s).unwrap();
        assert_eq!(g.get(c), &Matrix::filled(2, 3, 1.0));
    }

    #[test]
    fn l2_norm_of_zero_vector_has_zero_gradient() {
        let mut t = Tape::new();
        let a = t.leaf(Matrix::zeros(1, 4));
        let n = t.l2_norm(a).unwrap();
        let g = t.backward(n).unwrap();
        assert_eq!(g.get(a), &Matrix::zeros(1, 4));
    }

    #[test]
    fn reduce_rejects_empty_and_non_vector() {
        let mut t = Tape::new();
        let e = t.leaf(Matrix::zeros(0, 3));
        assert!(matches!(t.sum(e), Err(FadeError::Empty(_))));
        let m = t.leaf(Matrix::zeros(2, 2));
        assert!(t.l2_norm(m).is_err());
    }

    #[test]
    fn binary_shape_mismatch_and_log_domain() {
        let mut t = Tape::new();
        let a = t.leaf(Matrix::zeros(1, 2));
        let b = t.leaf(Matrix::zeros(1, 3));
        assert!(matches!(t.add(a, b), Err(FadeError::Dimension { .. })));
        assert!(matches!(t.matmul(a, a), Err(FadeError::Dimension { .. })));
        let c = t.leaf(row(&[1.0, 0.0]));
        assert!(matches!(t.log(c), Err(FadeError::Domain { .. })));
    }

    #[test]
    fn backward_examples() {
        let mut t = Tape::new();
        let w = t.leaf(Matrix::filled(2, 2, 0.3));
        let s = t.sum(w).unwrap();
        let g = t.backward(s).unwrap();
        assert_eq!(g.get(w), &Matrix::filled(2, 2, 1.0));

        // loss independent of the parameter
        let mut t = Tape::new();
        let w = t.leaf(Matrix::filled(2, 2, 0.3));
        let c = t.leaf(Matrix::scalar(7.0));
        let g = t.backward(c).unwrap();
        assert_eq!(g.get(w), &Matrix::zeros(2, 2));

        let v = t.leaf(Matrix::zeros(2, 1));
        assert!(matches!(t.backward(v), Err(FadeError::NonScalarLoss((2, 1)))));
    }

    #[test]
    fn backward_twice_is_bitwise_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut t = Tape::new();
        let a = t.leaf(random_matrix(3, 4, &mut rng));
        let b = t.leaf(random_matrix(4, 2, &mut rng));
        let p = t.matmul(a, b).unwrap();
        let h = t.tanh(p);
        let l = t.mean(h).unwrap();
        let g1 = t.backward(l).unwrap();
        let g2 = t.backward(l).unwrap();
        assert_eq!(g1.get(a), g2.get(a));
        assert_eq!(g1.get(b), g2.get(b));
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut t = Tape::new();
        let a = t.leaf(random_matrix(6, 4, &mut rng).scale(30.0));
        let s = t.softmax_rows(a).unwrap();
        for r in t.value(s).iter_rows() {
            assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    /// Checks d(sum(f(x)))/dx against central differences for a unary graph builder.
    fn check_unary(build: impl Fn(&mut Tape, Var) -> Var, x: Matrix) {
        let mut t = Tape::new();
        let v = t.leaf(x.clone());
        let out = build(&mut t, v);
        let loss = t.sum(out).unwrap();
        let analytic = t.backward(loss).unwrap().get(v).clone();
        let numeric = central_difference(&x, 1e-5, |m| {
            let mut t = Tape::new();
            let v = t.leaf(m.clone());
            let out = build(&mut t, v);
            t.value(out).sum()
        });
        let err = rel_err(analytic.data(), numeric.data());
        assert!(err < 1e-4, "relative error {err}");
    }

    #[test]
    fn matmul_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = random_matrix(4, 2, &mut rng);
        let a = random_matrix(3, 4, &mut rng);
        let bb = b.clone();
        check_unary(
            move |t, v| {
                let bv = t.leaf(bb.clone());
                t.matmul(v, bv).unwrap()
            },
            a.clone(),
        );
        check_unary(
            move |t, v| {
                let av = t.leaf(a.clone());
                t.matmul(av, v).unwrap()
            },
            b,
        );
    }

    #[test]
    fn unary_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let x = random_matrix(3, 3, &mut rng);
        check_unary(|t, v| t.tanh(v), x.clone());
        check_unary(|t, v| t.exp(v), x.clone());
        check_unary(|t, v| t.relu(v), x.clone());
        check_unary(|t, v| t.scale(v, -2.5), x.clone());
        let positive = x.map(|v| v.abs() + 0.5);
        check_unary(|t, v| t.log(v).unwrap(), positive.clone());
        check_unary(
            |t, v| {
                let w = t.tanh(v);
                t.hadamard(v, w).unwrap()
            },
            x.clone(),
        );
        check_unary(
            |t, v| {
                let w = t.exp(v);
                t.div(v, w).unwrap()
            },
            x.clone(),
        );
        check_unary(
            |t, v| {
                let n = t.row_norm(v).unwrap();
                t.tanh(n)
            },
            x.clone(),
        );
        check_unary(
            |t, v| {
                let m = t.col_mean(v).unwrap();
                let r = t.repeat_row(m, 2).unwrap();
                t.exp(r)
            },
            x.clone(),
        );
        check_unary(
            |t, v| {
                let ls = t.log_softmax_rows(v).unwrap();
                let p = t.pick(ls, &[0, 2, 1]).unwrap();
                t.scale(p, -1.0)
            },
            x.clone(),
        );
        check_unary(
            |t, v| {
                let c = t.concat_rows(&[v, v]).unwrap();
                let s = t.col_sum(c).unwrap();
                t.tanh(s)
            },
            x,
        );
    }
}
