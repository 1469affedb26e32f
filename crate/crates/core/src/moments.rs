//! Empirical moments of graph signals and the confidence radii that size the
//! moment ambiguity set.

use std::f64::consts::E;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{MuglError, Result};
use crate::laplacian::GraphLaplacian;

/// Observed signals, one column per sample (`m` nodes by `n` samples).
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    data: DMatrix<f64>,
}

impl SignalMatrix {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(MuglError::NonFinite(format!(
                "signal entry ({}, {})",
                pos % data.nrows().max(1),
                pos / data.nrows().max(1)
            )));
        }
        Ok(Self { data })
    }

    pub fn nodes(&self) -> usize {
        self.data.nrows()
    }

    pub fn samples(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }
}

/// Sample mean and (biased, `1/n`) sample covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMoments {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    pub samples: usize,
}

impl EmpiricalMoments {
    pub fn nodes(&self) -> usize {
        self.mean.len()
    }
}

/// Mean and `1/n`-normalized covariance of the columns of `x`.
pub fn empirical_moments(x: &SignalMatrix) -> Result<EmpiricalMoments> {
    let n = x.samples();
    if n < 2 {
        return Err(MuglError::TooFewSamples(n));
    }
    let data = x.data();
    let mean = data.column_mean();
    let mut centered = data.clone();
    for mut col in centered.column_iter_mut() {
        col -= &mean;
    }
    let mut cov = &centered * centered.transpose() / n as f64;
    // gemm is symmetric up to rounding; force exact symmetry
    let m = cov.nrows();
    for i in 0..m {
        for j in 0..i {
            let v = 0.5 * (cov[(i, j)] + cov[(j, i)]);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(EmpiricalMoments {
        mean,
        cov,
        samples: n,
    })
}

/// Expected Laplacian quadratic risk `tr(cov L) + mean^T L mean`.
pub fn expected_risk(mean: &DVector<f64>, cov: &DMatrix<f64>, l: &GraphLaplacian) -> Result<f64> {
    let m = l.nodes();
    if mean.len() != m || cov.nrows() != m || cov.ncols() != m {
        return Err(MuglError::DimensionMismatch(format!(
            "moments of dimension {} vs Laplacian of dimension {m}",
            mean.len()
        )));
    }
    let lm = l.matrix();
    Ok(cov.dot(lm) + mean.dot(&(lm * mean)))
}

/// Parameters for the concentration-based confidence radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusParams {
    pub delta: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub sigma_norm: f64,
}

impl RadiusParams {
    pub const DEFAULT_DELTA: f64 = 0.05;
    pub const DEFAULT_C0: f64 = 1.0;
    /// Default covariance constants. The unit constants make the covariance
    /// radius dominate the data term by orders of magnitude at desk scale;
    /// these were set from pilot runs on m=20 Gaussian graphs.
    pub const DEFAULT_C1: f64 = 0.02;
    pub const DEFAULT_C2: f64 = 0.02;

    pub fn new(delta: f64, c0: f64, c1: f64, c2: f64, sigma_norm: f64) -> Result<Self> {
        let p = Self {
            delta,
            c0,
            c1,
            c2,
            sigma_norm,
        };
        p.validate()?;
        Ok(p)
    }

    /// Default constants with `sigma_norm` plugged in from the sample
    /// covariance.
    pub fn plug_in(moments: &EmpiricalMoments) -> Self {
        Self {
            delta: Self::DEFAULT_DELTA,
            c0: Self::DEFAULT_C0,
            c1: Self::DEFAULT_C1,
            c2: Self::DEFAULT_C2,
            sigma_norm: spectral_norm(&moments.cov),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < (-2.0f64).exp()) {
            return Err(MuglError::InvalidDelta(self.delta));
        }
        for (name, v) in [
            ("c0", self.c0),
            ("c1", self.c1),
            ("c2", self.c2),
            ("sigma_norm", self.sigma_norm),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(MuglError::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Radius of the mean ellipsoid: `sqrt(4 c0 e^2 ln^2(1/delta) / n)`.
pub fn rho1_radius(p: &RadiusParams, n: usize) -> Result<f64> {
    p.validate()?;
    if n == 0 {
        return Err(MuglError::InvalidParameter("n must be at least 1".into()));
    }
    let log = (1.0 / p.delta).ln();
    Ok((4.0 * p.c0 * E * E * log * log / n as f64).sqrt())
}

/// Radius of the covariance ball:
/// `4 c1 (2e/3)^{3/2} ln^{3/2}(2 m^{3/2}/delta) ||Sigma|| / sqrt(n) + 4 c2 e^2 ln^2(2/delta) / n`.
pub fn rho2_radius(p: &RadiusParams, m: usize, n: usize) -> Result<f64> {
    p.validate()?;
    if n == 0 || m == 0 {
        return Err(MuglError::InvalidParameter(
            "m and n must be at least 1".into(),
        ));
    }
    let n = n as f64;
    let m = m as f64;
    let log_cov = (2.0 * m.powf(1.5) / p.delta).ln();
    let log_mean = (2.0 / p.delta).ln();
    let first = 4.0 * p.c1 * (2.0 * E / 3.0).powf(1.5) * log_cov.powf(1.5) * p.sigma_norm / n.sqrt();
    let second = 4.0 * p.c2 * E * E * log_mean * log_mean / n;
    Ok(first + second)
}

/// Spectral norm of a symmetric PSD matrix by power iteration (relative
/// tolerance 1e-8).
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    let m = a.nrows();
    if m == 0 {
        return 0.0;
    }
    // fixed, generic start vector so the iteration is deterministic
    let mut v = DVector::from_fn(m, |i, _| 1.0 + ((i * 7919 + 13) % 101) as f64 / 101.0);
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let av = a * &v;
        let norm = av.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = v.dot(&av);
        v = av / norm;
        if (next - lambda).abs() <= 1e-8 * next.abs() {
            return next.abs();
        }
        lambda = next;
    }
    lambda.abs()
}
