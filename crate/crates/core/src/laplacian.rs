//! Edge-weight vectors, graph Laplacians and the linear map between them.
//!
//! A graph on `m` nodes has `m(m-1)/2` node pairs. Pairs are stored in
//! column-major order over the strictly lower triangle: `(2,1), (3,1), ...,
//! (m,1), (3,2), ...` in 1-based indexing. The map [`expand`] sends an edge
//! weight vector to its Laplacian and [`adjoint`] is its adjoint with respect
//! to the trace inner product, `tr(expand(w) M) = w . adjoint(M)`.

use nalgebra::DMatrix;

use crate::error::{MuglError, Result};

/// Number of node pairs `m(m-1)/2`.
pub fn num_pairs(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// Inverse of [`num_pairs`]; `None` when `len` is not a triangular number.
pub fn nodes_for_pairs(len: usize) -> Option<usize> {
    // m(m-1)/2 = len  =>  m = (1 + sqrt(1 + 8 len)) / 2
    let disc = 1 + 8 * len;
    let root = (disc as f64).sqrt().round() as usize;
    if root * root != disc {
        return None;
    }
    let m = root.div_ceil(2);
    (num_pairs(m) == len).then_some(m.max(1))
}

/// 1-based linear index of the pair `(i, j)` with `j < i`.
pub fn pair_to_linear(i: usize, j: usize, m: usize) -> Result<usize> {
    if j == 0 || j >= i || i > m {
        return Err(MuglError::InvalidIndex { i, j, m });
    }
    Ok(i - j + (j - 1) * (2 * m - j) / 2)
}

/// Inverse of [`pair_to_linear`]: returns the 1-based `(i, j)` of index `k`.
pub fn linear_to_pair(k: usize, m: usize) -> Result<(usize, usize)> {
    if k == 0 || k > num_pairs(m) {
        return Err(MuglError::InvalidIndex { i: k, j: 0, m });
    }
    let mut offset = 0;
    for j in 1..m {
        let len = m - j;
        if k <= offset + len {
            return Ok((j + (k - offset), j));
        }
        offset += len;
    }
    unreachable!("k bounded by num_pairs")
}

/// Zero-based `(i, j)` pairs with `i > j`, in linear-index order.
pub fn pairs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..m).flat_map(move |j| (j + 1..m).map(move |i| (i, j)))
}

/// Edge weights of an undirected graph, one entry per node pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    nodes: usize,
    weights: Vec<f64>,
}

impl WeightVector {
    /// Wraps `weights`, inferring the node count from its length.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let nodes = nodes_for_pairs(weights.len()).ok_or_else(|| {
            MuglError::DimensionMismatch(format!(
                "length {} is not a triangular number",
                weights.len()
            ))
        })?;
        Ok(Self { nodes, weights })
    }

    pub fn with_nodes(nodes: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != num_pairs(nodes) {
            return Err(MuglError::DimensionMismatch(format!(
                "expected {} weights for m={nodes}, got {}",
                num_pairs(nodes),
                weights.len()
            )));
        }
        Ok(Self { nodes, weights })
    }

    pub fn zeros(nodes: usize) -> Self {
        Self {
            nodes,
            weights: vec![0.0; num_pairs(nodes)],
        }
    }

    /// Centroid of the scaled simplex: every pair carries `s / m̄`.
    pub fn centroid(nodes: usize, s: f64) -> Self {
        let len = num_pairs(nodes);
        Self {
            nodes,
            weights: vec![s / len as f64; len],
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.weights
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weighted degree of each node, i.e. the diagonal of `expand(self)`.
    pub fn degrees(&self) -> Vec<f64> {
        degrees(&self.weights, self.nodes)
    }
}

impl AsRef<[f64]> for WeightVector {
    fn as_ref(&self) -> &[f64] {
        &self.weights
    }
}

pub(crate) fn degrees(w: &[f64], m: usize) -> Vec<f64> {
    let mut d = vec![0.0; m];
    for ((i, j), &wk) in pairs(m).zip(w) {
        d[i] += wk;
        d[j] += wk;
    }
    d
}

/// `||expand(w)||_F` without forming the matrix.
pub(crate) fn expand_frobenius_norm(w: &[f64], m: usize) -> f64 {
    let d = degrees(w, m);
    let diag: f64 = d.iter().map(|x| x * x).sum();
    let off: f64 = w.iter().map(|x| x * x).sum();
    (diag + 2.0 * off).sqrt()
}

/// `adjoint(expand(w))` without forming the matrix.
pub(crate) fn adjoint_of_expand(w: &[f64], m: usize) -> Vec<f64> {
    let d = degrees(w, m);
    pairs(m)
        .zip(w)
        .map(|((i, j), &wk)| d[i] + d[j] + 2.0 * wk)
        .collect()
}

/// `adjoint(diag(v))`: entry `k` is `v_i + v_j`.
pub(crate) fn adjoint_of_diagonal(v: &[f64]) -> Vec<f64> {
    pairs(v.len()).map(|(i, j)| v[i] + v[j]).collect()
}

/// A dense combinatorial graph Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphLaplacian {
    matrix: DMatrix<f64>,
}

impl GraphLaplacian {
    /// Validates `matrix` as a Laplacian (symmetric, zero row sums,
    /// non-positive off-diagonals).
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(MuglError::DimensionMismatch(format!(
                "{}x{} matrix is not square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let lap = Self { matrix };
        lap.check()?;
        Ok(lap)
    }

    pub fn from_weights(w: &WeightVector) -> Self {
        expand(w)
    }

    pub fn empty(nodes: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(nodes, nodes),
        }
    }

    pub fn nodes(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Edge weights `-L_ij` in linear-index order.
    pub fn weights(&self) -> WeightVector {
        let m = self.nodes();
        let w = pairs(m).map(|(i, j)| -self.matrix[(i, j)]).collect();
        WeightVector { nodes: m, weights: w }
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn edge_count(&self) -> usize {
        self.weights().as_slice().iter().filter(|&&x| x > 0.0).count()
    }

    /// Multiplies every edge weight by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: &self.matrix * factor,
        }
    }

    /// Checks the Laplacian invariants with a tolerance relative to the
    /// matrix size.
    pub fn check(&self) -> Result<()> {
        let m = self.nodes();
        let scale = 1e-9 * self.matrix.norm().max(1.0);
        for i in 0..m {
            let mut row = 0.0;
            for j in 0..m {
                let v = self.matrix[(i, j)];
                if !v.is_finite() {
                    return Err(MuglError::NonFinite(format!("L[{i},{j}]")));
                }
                if v != self.matrix[(j, i)] {
                    return Err(MuglError::InvalidParameter(format!(
                        "Laplacian is not symmetric at ({i},{j})"
                    )));
                }
                if i != j && v > 0.0 {
                    return Err(MuglError::InvalidParameter(format!(
                        "positive off-diagonal entry at ({i},{j})"
                    )));
                }
                row += v;
            }
            if row.abs() > scale {
                return Err(MuglError::InvalidParameter(format!(
                    "row {i} sums to {row}"
                )));
            }
        }
        Ok(())
    }
}

/// The linear map from edge weights to Laplacians: `L_ij = -w_k` below the
/// diagonal, mirrored above it, and diagonal entries equal to the weighted
/// degrees.
pub fn expand(w: &WeightVector) -> GraphLaplacian {
    let m = w.nodes;
    let mut l = DMatrix::zeros(m, m);
    for ((i, j), &wk) in pairs(m).zip(&w.weights) {
        l[(i, j)] = -wk;
        l[(j, i)] = -wk;
        l[(i, i)] += wk;
        l[(j, j)] += wk;
    }
    GraphLaplacian { matrix: l }
}

/// Adjoint of [`expand`]: entry `k` of the result is
/// `M_ii - M_ij - M_ji + M_jj` for the pair `(i, j)` of index `k`.
///
/// A non-symmetric `M` is treated as its symmetric part `(M + M^T)/2`, which
/// the formula already does implicitly. Use [`symmetry_defect`] to detect it.
pub fn adjoint(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !matrix.is_square() {
        return Err(MuglError::DimensionMismatch(format!(
            "{}x{} matrix is not square",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let m = matrix.nrows();
    Ok(pairs(m)
        .map(|(i, j)| matrix[(i, i)] - matrix[(i, j)] - matrix[(j, i)] + matrix[(j, j)])
        .collect())
}

/// Largest `|M_ij - M_ji|`; zero for symmetric input.
pub fn symmetry_defect(matrix: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..matrix.nrows() {
        for j in 0..i {
            worst = worst.max((matrix[(i, j)] - matrix[(j, i)]).abs());
        }
    }
    worst
}

/// Membership in `{w >= 0, sum(w) = s}` up to `tol` (relative for the sum,
/// absolute for negativity).
pub fn validate_simplex(w: &[f64], s: f64, tol: f64) -> bool {
    let sum: f64 = w.iter().sum();
    let min = w.iter().copied().fold(f64::INFINITY, f64::min);
    (sum - s).abs() <= tol * s && (w.is_empty() || min >= -tol) && sum.is_finite()
}
