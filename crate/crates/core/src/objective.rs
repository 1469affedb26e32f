//! The moment-robust graph learning objective over edge weights.
//!
//! For weights `w` in the scaled simplex `{w >= 0, sum(w) = s}` and
//! `L = expand(w)` the objective is
//!
//! ```text
//! g(w) = w . F*(S + mu mu^T) + rho2 ||L||_F + sqrt(a . w) + h(L)
//! ```
//!
//! with `S`, `mu` the empirical covariance and mean and
//! `a = 4 rho1^2 F*(mu mu^T)`. Up to the constant `rho1^2` this is the
//! worst-case expected Laplacian risk over all distributions whose mean lies
//! in the `L`-ellipsoid of radius `rho1` around `mu` and whose covariance lies
//! in the Frobenius ball of radius `rho2` around `S`, plus the regularizer.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{MuglError, Result};
use crate::laplacian::{
    adjoint, adjoint_of_diagonal, adjoint_of_expand, degrees, expand, expand_frobenius_norm,
    pairs, validate_simplex, GraphLaplacian, WeightVector,
};
use crate::moments::EmpiricalMoments;

/// Feasibility tolerance used when validating points handed to the objective.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Regularizer `h` applied to the Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Regularizer {
    #[default]
    None,
    /// `-alpha * sum_i ln(L_ii)`.
    LogBarrier { alpha: f64 },
}

/// Everything that determines the objective besides the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub rho1: f64,
    pub rho2: f64,
    pub s: f64,
    pub regularizer: Regularizer,
    /// Coefficient `beta` of `(beta/2) sum_{i != j} L_ij^2`; zero for the
    /// robust models.
    #[serde(default)]
    pub edge_penalty: f64,
    #[serde(default = "default_sqrt_floor")]
    pub sqrt_floor: f64,
}

fn default_sqrt_floor() -> f64 {
    1e-12
}

impl ModelConfig {
    pub fn new(rho1: f64, rho2: f64, s: f64, regularizer: Regularizer) -> Self {
        Self {
            rho1,
            rho2,
            s,
            regularizer,
            edge_penalty: 0.0,
            sqrt_floor: default_sqrt_floor(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64, ok: bool| {
            if ok && v.is_finite() {
                Ok(())
            } else {
                Err(MuglError::InvalidParameter(format!("{name} = {v}")))
            }
        };
        check("rho1", self.rho1, self.rho1 >= 0.0)?;
        check("rho2", self.rho2, self.rho2 >= 0.0)?;
        check("s", self.s, self.s > 0.0)?;
        check("edge_penalty", self.edge_penalty, self.edge_penalty >= 0.0)?;
        check("sqrt_floor", self.sqrt_floor, self.sqrt_floor >= 0.0)?;
        if let Regularizer::LogBarrier { alpha } = self.regularizer {
            check("alpha", alpha, alpha > 0.0)?;
        }
        Ok(())
    }
}

/// Precomputed data for repeated objective and gradient evaluations.
#[derive(Debug, Clone)]
pub struct ObjectiveContext {
    moments: EmpiricalMoments,
    config: ModelConfig,
    quad_coeff: Vec<f64>,
    mean_coeff: Vec<f64>,
    a: Vec<f64>,
    a_max: f64,
}

/// Builds the context: `quad_coeff = F*(S + mu mu^T)` and
/// `a_k = 4 rho1^2 (mu_i - mu_j)^2`.
pub fn build_context(moments: EmpiricalMoments, config: ModelConfig) -> Result<ObjectiveContext> {
    config.validate()?;
    let m = moments.nodes();
    if m < 2 || moments.cov.nrows() != m || moments.cov.ncols() != m {
        return Err(MuglError::DimensionMismatch(format!(
            "mean of length {m} with {}x{} covariance",
            moments.cov.nrows(),
            moments.cov.ncols()
        )));
    }
    let mu = &moments.mean;
    let second = &moments.cov + mu * mu.transpose();
    let quad_coeff = adjoint(&second)?;
    let mean_coeff: Vec<f64> = pairs(m)
        .map(|(i, j)| {
            let d = mu[i] - mu[j];
            d * d
        })
        .collect();
    let scale = 4.0 * config.rho1 * config.rho1;
    let a: Vec<f64> = mean_coeff.iter().map(|c| scale * c).collect();
    let a_max = a.iter().copied().fold(0.0, f64::max);
    Ok(ObjectiveContext {
        moments,
        config,
        quad_coeff,
        mean_coeff,
        a,
        a_max,
    })
}

// `!(x > y)` on purpose below: NaN has to fail the domain checks.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
impl ObjectiveContext {
    pub fn nodes(&self) -> usize {
        self.moments.nodes()
    }

    pub fn dim(&self) -> usize {
        self.quad_coeff.len()
    }

    pub fn scale(&self) -> f64 {
        self.config.s
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn moments(&self) -> &EmpiricalMoments {
        &self.moments
    }

    /// `F*(S + mu mu^T)`.
    pub fn quad_coeff(&self) -> &[f64] {
        &self.quad_coeff
    }

    /// `F*(mu mu^T)`, entrywise `(mu_i - mu_j)^2`.
    pub fn mean_coeff(&self) -> &[f64] {
        &self.mean_coeff
    }

    /// The coefficient vector `a = 4 rho1^2 F*(mu mu^T)`.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    fn check_point(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.dim() {
            return Err(MuglError::LengthMismatch {
                left: w.len(),
                right: self.dim(),
            });
        }
        if !validate_simplex(w, self.config.s, FEASIBILITY_TOL) {
            return Err(MuglError::InfeasiblePoint {
                sum: w.iter().sum(),
                min: w.iter().copied().fold(f64::INFINITY, f64::min),
                s: self.config.s,
            });
        }
        Ok(())
    }

    /// `g(w)`. Returns `+inf` when the log barrier is active and some degree
    /// is non-positive.
    pub fn value(&self, w: &[f64]) -> Result<f64> {
        self.check_point(w)?;
        let m = self.nodes();
        let cfg = &self.config;
        let deg = degrees(w, m);
        let mut g = dot(w, &self.quad_coeff);
        if cfg.rho2 > 0.0 {
            g += cfg.rho2 * frobenius_from_degrees(&deg, w);
        }
        if cfg.rho1 > 0.0 {
            g += dot(&self.a, w).max(0.0).sqrt();
        }
        if cfg.edge_penalty > 0.0 {
            g += cfg.edge_penalty * dot(w, w);
        }
        if let Regularizer::LogBarrier { alpha } = cfg.regularizer {
            if deg.iter().any(|&d| !(d > 0.0)) {
                return Ok(f64::INFINITY);
            }
            g -= alpha * deg.iter().map(|d| d.ln()).sum::<f64>();
        }
        Ok(g)
    }

    /// `g(w)` extended by `+inf` outside the feasible set or regularizer
    /// domain.
    pub fn extended_value(&self, w: &[f64]) -> f64 {
        match self.value(w) {
            Ok(v) if !v.is_nan() => v,
            _ => f64::INFINITY,
        }
    }

    /// `grad g(w)`.
    pub fn gradient(&self, w: &[f64]) -> Result<Vec<f64>> {
        self.check_point(w)?;
        let m = self.nodes();
        let cfg = &self.config;
        let mut grad = self.quad_coeff.clone();
        if cfg.rho1 > 0.0 {
            let aw = dot(&self.a, w);
            let floor = cfg.sqrt_floor * self.a_max * cfg.s;
            if !(aw > floor) {
                return Err(MuglError::NonsmoothPoint { value: aw, floor });
            }
            let root = dot(&self.mean_coeff, w).sqrt();
            for (g, c) in grad.iter_mut().zip(&self.mean_coeff) {
                *g += cfg.rho1 * c / root;
            }
        }
        if cfg.rho2 > 0.0 {
            let norm = expand_frobenius_norm(w, m);
            for (g, c) in grad.iter_mut().zip(adjoint_of_expand(w, m)) {
                *g += cfg.rho2 * c / norm;
            }
        }
        if cfg.edge_penalty > 0.0 {
            for (g, wk) in grad.iter_mut().zip(w) {
                *g += 2.0 * cfg.edge_penalty * wk;
            }
        }
        if let Regularizer::LogBarrier { alpha } = cfg.regularizer {
            let deg = degrees(w, m);
            let min = deg.iter().copied().fold(f64::INFINITY, f64::min);
            if !(min > 0.0) {
                return Err(MuglError::OutsideDomain(min));
            }
            let diag: Vec<f64> = deg.iter().map(|d| -alpha / d).collect();
            for (g, c) in grad.iter_mut().zip(adjoint_of_diagonal(&diag)) {
                *g += c;
            }
        }
        Ok(grad)
    }

    /// The worst-case expected risk plus regularizer in matrix form,
    /// `phi1(L) + phi2(L) + h(L)`. Equals `g(w) + rho1^2`.
    pub fn worst_case_value(&self, w: &[f64]) -> Result<f64> {
        self.check_point(w)?;
        let l = expand(&WeightVector::with_nodes(self.nodes(), w.to_vec())?);
        let cfg = &self.config;
        let mut v = phi1_closed_form(&l, &self.moments.mean, cfg.rho1)
            + phi2_closed_form(&l, &self.moments.cov, cfg.rho2);
        if cfg.edge_penalty > 0.0 {
            let off: f64 = pairs(self.nodes()).map(|(i, j)| l.matrix()[(i, j)].powi(2)).sum();
            v += cfg.edge_penalty * off;
        }
        if let Regularizer::LogBarrier { alpha } = cfg.regularizer {
            let diag = l.matrix().diagonal();
            if diag.iter().any(|&d| !(d > 0.0)) {
                return Ok(f64::INFINITY);
            }
            v -= alpha * diag.iter().map(|d| d.ln()).sum::<f64>();
        }
        Ok(v)
    }
}

/// `g(w)`; see [`ObjectiveContext::value`].
pub fn objective_value(ctx: &ObjectiveContext, w: &WeightVector) -> Result<f64> {
    ctx.value(w.as_slice())
}

/// `grad g(w)`; see [`ObjectiveContext::gradient`].
pub fn gradient(ctx: &ObjectiveContext, w: &WeightVector) -> Result<Vec<f64>> {
    ctx.gradient(w.as_slice())
}

/// Worst case of `mu^T L mu` over the mean ellipsoid:
/// `(sqrt(mean^T L mean) + rho1)^2`.
pub fn phi1_closed_form(l: &GraphLaplacian, mean: &DVector<f64>, rho1: f64) -> f64 {
    let quad = mean.dot(&(l.matrix() * mean)).max(0.0);
    let r = quad.sqrt() + rho1;
    r * r
}

/// Worst case of `tr(Sigma L)` over the covariance ball:
/// `tr(cov L) + rho2 ||L||_F`.
pub fn phi2_closed_form(l: &GraphLaplacian, cov: &DMatrix<f64>, rho2: f64) -> f64 {
    cov.dot(l.matrix()) + rho2 * l.frobenius_norm()
}

/// The covariance attaining [`phi2_closed_form`]: `cov + rho2 L / ||L||_F`.
pub fn worst_case_covariance(l: &GraphLaplacian, cov: &DMatrix<f64>, rho2: f64) -> DMatrix<f64> {
    let norm = l.frobenius_norm();
    if norm == 0.0 {
        return cov.clone();
    }
    cov + l.matrix() * (rho2 / norm)
}

fn frobenius_from_degrees(deg: &[f64], w: &[f64]) -> f64 {
    (dot(deg, deg) + 2.0 * dot(w, w)).sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
