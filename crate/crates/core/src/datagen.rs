//! Seeded synthetic graphs and smooth graph signals.
//!
//! Every generator draws from a ChaCha8 stream seeded with the spec's seed.
//! Graph generators read stream [`GRAPH_STREAM`] and the signal generator
//! reads [`SIGNAL_STREAM`], so a graph and its signals can share one seed and
//! still be drawn independently.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{MuglError, Result};
use crate::laplacian::{expand, pairs, GraphLaplacian, WeightVector};
use crate::moments::SignalMatrix;

pub const GRAPH_STREAM: u64 = 0;
pub const SIGNAL_STREAM: u64 = 1;

/// Eigenvalues at or below this fraction of the largest are treated as zero.
pub const RANK_TOL: f64 = 1e-10;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphFamily {
    /// Random geometric graph with RBF weights `exp(-d^2 / (2 sigma^2))`,
    /// keeping edges whose weight is at least `threshold`.
    Gaussian { sigma: f64, threshold: f64 },
    /// Erdős–Rényi with edge probability `p`.
    Er { p: f64 },
    /// Preferential attachment: `theta0` initial nodes on a path, then each
    /// arrival attaches to `theta` distinct existing nodes.
    Pa { theta0: usize, theta: usize },
}

impl GraphFamily {
    pub fn name(&self) -> &'static str {
        match self {
            GraphFamily::Gaussian { .. } => "gaussian",
            GraphFamily::Er { .. } => "er",
            GraphFamily::Pa { .. } => "pa",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub family: GraphFamily,
    pub m: usize,
    pub seed: u64,
}

impl GraphSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(MuglError::InvalidParameter(msg));
        if self.m < 2 {
            return bad(format!("graph needs at least 2 nodes, got {}", self.m));
        }
        match self.family {
            GraphFamily::Gaussian { sigma, threshold } => {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return bad(format!("sigma must be positive, got {sigma}"));
                }
                if !(threshold > 0.0 && threshold <= 1.0) {
                    return bad(format!("threshold must lie in (0, 1], got {threshold}"));
                }
            }
            GraphFamily::Er { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return bad(format!("p must lie in [0, 1], got {p}"));
                }
            }
            GraphFamily::Pa { theta0, theta } => {
                if theta0 < 2 || theta < 1 || theta > theta0 {
                    return bad(format!(
                        "need theta0 >= 2 and 1 <= theta <= theta0, got theta0={theta0}, theta={theta}"
                    ));
                }
                if theta0 > self.m {
                    return bad(format!("theta0={theta0} exceeds m={}", self.m));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    pub n: usize,
    pub epsilon: f64,
    /// Signal mean; zero when absent.
    #[serde(default)]
    pub mu_star: Option<Vec<f64>>,
    pub seed: u64,
}

impl SignalSpec {
    pub fn validate(&self, m: usize) -> Result<()> {
        if self.n < 1 {
            return Err(MuglError::InvalidParameter("n must be at least 1".into()));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(MuglError::InvalidParameter(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        if let Some(mu) = &self.mu_star {
            if mu.len() != m {
                return Err(MuglError::LengthMismatch {
                    left: mu.len(),
                    right: m,
                });
            }
        }
        Ok(())
    }
}

/// A generated graph; `coords` is set for Gaussian graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedGraph {
    pub laplacian: GraphLaplacian,
    pub coords: Option<Vec<[f64; 2]>>,
}

/// Dispatches on the graph family.
pub fn gen_graph(spec: &GraphSpec) -> Result<GeneratedGraph> {
    spec.validate()?;
    match spec.family {
        GraphFamily::Gaussian { .. } => gen_gaussian_graph(spec),
        GraphFamily::Er { .. } => Ok(GeneratedGraph {
            laplacian: gen_er_graph(spec)?,
            coords: None,
        }),
        GraphFamily::Pa { .. } => Ok(GeneratedGraph {
            laplacian: gen_pa_graph(spec)?,
            coords: None,
        }),
    }
}

pub fn gen_gaussian_graph(spec: &GraphSpec) -> Result<GeneratedGraph> {
    spec.validate()?;
    let GraphFamily::Gaussian { sigma, threshold } = spec.family else {
        return Err(MuglError::InvalidParameter("expected a gaussian graph spec".into()));
    };
    let mut rng = stream_rng(spec.seed, GRAPH_STREAM);
    let coords: Vec<[f64; 2]> = (0..spec.m)
        .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
        .collect();
    Ok(GeneratedGraph {
        laplacian: gaussian_laplacian(&coords, sigma, threshold),
        coords: Some(coords),
    })
}

/// RBF-thresholded Laplacian of fixed node positions.
pub fn gaussian_laplacian(coords: &[[f64; 2]], sigma: f64, threshold: f64) -> GraphLaplacian {
    let m = coords.len();
    let w = pairs(m)
        .map(|(i, j)| {
            let dx = coords[i][0] - coords[j][0];
            let dy = coords[i][1] - coords[j][1];
            let weight = (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
            if weight >= threshold {
                weight
            } else {
                0.0
            }
        })
        .collect();
    expand(&WeightVector::with_nodes(m, w).expect("pair count"))
}

pub fn gen_er_graph(spec: &GraphSpec) -> Result<GraphLaplacian> {
    spec.validate()?;
    let GraphFamily::Er { p } = spec.family else {
        return Err(MuglError::InvalidParameter("expected an er graph spec".into()));
    };
    let mut rng = stream_rng(spec.seed, GRAPH_STREAM);
    let w = pairs(spec.m)
        .map(|_| if rng.random::<f64>() < p { 1.0 } else { 0.0 })
        .collect();
    Ok(expand(&WeightVector::with_nodes(spec.m, w)?))
}

pub fn gen_pa_graph(spec: &GraphSpec) -> Result<GraphLaplacian> {
    spec.validate()?;
    let GraphFamily::Pa { theta0, theta } = spec.family else {
        return Err(MuglError::InvalidParameter("expected a pa graph spec".into()));
    };
    let m = spec.m;
    let mut rng = stream_rng(spec.seed, GRAPH_STREAM);
    let mut adjacency = DMatrix::<f64>::zeros(m, m);
    // every edge puts both endpoints in the urn, so a uniform draw from the
    // urn picks a node with probability proportional to its degree
    let mut urn: Vec<usize> = Vec::with_capacity(2 * m * theta);
    for i in 1..theta0 {
        adjacency[(i, i - 1)] = 1.0;
        adjacency[(i - 1, i)] = 1.0;
        urn.extend([i - 1, i]);
    }
    let mut chosen = Vec::with_capacity(theta);
    for node in theta0..m {
        chosen.clear();
        while chosen.len() < theta {
            let target = urn[rng.random_range(0..urn.len())];
            if !chosen.contains(&target) {
                chosen.push(target);
            }
        }
        for &target in &chosen {
            adjacency[(node, target)] = 1.0;
            adjacency[(target, node)] = 1.0;
            urn.extend([target, node]);
        }
    }
    let w = pairs(m).map(|(i, j)| adjacency[(i, j)]).collect();
    Ok(expand(&WeightVector::with_nodes(m, w)?))
}

/// Factor-analysis signals `x = U r + mu* + e` with `L = U diag(lambda) U^T`,
/// `r ~ N(0, diag(lambda)^+)` and `e ~ N(0, epsilon^2 I)`.
pub fn gen_signals(l: &GraphLaplacian, spec: &SignalSpec) -> Result<SignalMatrix> {
    let m = l.nodes();
    spec.validate(m)?;
    let eig = SymmetricEigen::try_new(l.matrix().clone(), f64::EPSILON, 0)
        .ok_or(MuglError::Decomposition)?;
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(MuglError::Decomposition);
    }
    let lambda_max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let scales: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&lam| {
            if lambda_max > 0.0 && lam > RANK_TOL * lambda_max {
                1.0 / lam.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let mu = spec
        .mu_star
        .as_ref()
        .map(|v| DVector::from_column_slice(v))
        .unwrap_or_else(|| DVector::zeros(m));

    let mut rng = stream_rng(spec.seed, SIGNAL_STREAM);
    let mut x = DMatrix::zeros(m, spec.n);
    let mut latent = DVector::zeros(m);
    for mut col in x.column_iter_mut() {
        for (r, &sc) in latent.iter_mut().zip(&scales) {
            let z: f64 = rng.sample(StandardNormal);
            *r = sc * z;
        }
        let smooth = &eig.eigenvectors * &latent;
        for i in 0..m {
            let noise: f64 = rng.sample(StandardNormal);
            col[i] = smooth[i] + mu[i] + spec.epsilon * noise;
        }
    }
    SignalMatrix::new(x)
}

/// Whether the graph is connected (positive-weight edges only).
pub fn is_connected(l: &GraphLaplacian) -> bool {
    let m = l.nodes();
    if m == 0 {
        return true;
    }
    let mut seen = vec![false; m];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for (j, visited) in seen.iter_mut().enumerate() {
            if !*visited && l.matrix()[(i, j)] < 0.0 {
                *visited = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|b| b)
}
