//! Independent reference implementations used only by tests.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub mod radii_table;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Pair count from the explicit 1-based index formula.
pub fn linear_index(i: usize, j: usize, m: usize) -> usize {
    i - j + (j - 1) * (2 * m - j) / 2
}

/// Laplacian assembled entry by entry from the index formula.
pub fn expand_oracle(w: &[f64], m: usize) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(m, m);
    for j in 1..=m {
        for i in (j + 1)..=m {
            let x = w[linear_index(i, j, m) - 1];
            l[(i - 1, j - 1)] = -x;
            l[(j - 1, i - 1)] = -x;
        }
    }
    for i in 0..m {
        let off: f64 = (0..m).filter(|&j| j != i).map(|j| l[(i, j)]).sum();
        l[(i, i)] = -off;
    }
    l
}

/// `tr(A B)` by explicit summation.
pub fn trace_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let mut t = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            t += a[(i, j)] * b[(j, i)];
        }
    }
    t
}

/// Random interior point of the scaled simplex, bounded away from the faces.
pub fn interior_point(rng: &mut ChaCha8Rng, len: usize, s: f64) -> Vec<f64> {
    let u: Vec<f64> = (0..len).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = u.iter().sum();
    let mut w: Vec<f64> = u.iter().map(|x| s * (0.5 * x / total + 0.5 / len as f64)).collect();
    let drift = s - w.iter().sum::<f64>();
    w[0] += drift;
    w
}

/// Random PSD matrix `B B^T / m + shift I`.
pub fn random_psd(rng: &mut ChaCha8Rng, m: usize, shift: f64) -> DMatrix<f64> {
    let b = DMatrix::from_fn(m, m, |_, _| normal(rng));
    let mut c = &b * b.transpose() / m as f64;
    for i in 0..m {
        c[(i, i)] += shift;
    }
    (&c + c.transpose()) * 0.5
}

pub fn random_vector(rng: &mut ChaCha8Rng, m: usize) -> DVector<f64> {
    DVector::from_fn(m, |_, _| normal(rng))
}

/// Objective in matrix form:
/// `tr((S + mu mu^T) L) + 2 rho1 sqrt(mu^T L mu) + rho2 |L|_F + (beta/2) sum_{i!=j} L_ij^2 - alpha sum ln L_ii`.
#[allow(clippy::too_many_arguments)]
pub fn objective_oracle(
    w: &[f64],
    m: usize,
    mean: &DVector<f64>,
    cov: &DMatrix<f64>,
    rho1: f64,
    rho2: f64,
    alpha: f64,
    beta: f64,
) -> f64 {
    let l = expand_oracle(w, m);
    let second = cov + mean * mean.transpose();
    let mut g = trace_product(&second, &l);
    let quad = (mean.transpose() * &l * mean)[(0, 0)];
    g += 2.0 * rho1 * quad.max(0.0).sqrt();
    g += rho2 * l.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut off = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                off += l[(i, j)] * l[(i, j)];
            }
        }
    }
    g += 0.5 * beta * off;
    if alpha != 0.0 {
        g -= alpha * (0..m).map(|i| l[(i, i)].ln()).sum::<f64>();
    }
    g
}

/// Central differences of `f` along the simplex-tangent directions
/// `e_k - e_last`, returned next to the analytic directional derivatives.
pub fn tangent_fd(f: impl Fn(&[f64]) -> f64, grad: &[f64], w: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = w.len();
    let mut fd = Vec::new();
    let mut an = Vec::new();
    for k in 0..n - 1 {
        let mut plus = w.to_vec();
        let mut minus = w.to_vec();
        plus[k] += h;
        plus[n - 1] -= h;
        minus[k] -= h;
        minus[n - 1] += h;
        fd.push((f(&plus) - f(&minus)) / (2.0 * h));
        an.push(grad[k] - grad[n - 1]);
    }
    (fd, an)
}

pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let scale: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / scale.max(f64::MIN_POSITIVE)
}

/// Projection onto `{w >= 0, sum w = s}` by enumerating every support set and
/// keeping the closest feasible candidate.
pub fn projection_oracle(v: &[f64], s: f64) -> Vec<f64> {
    let n = v.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|&k| mask & (1 << k) != 0).collect();
        let tau = (support.iter().map(|&k| v[k]).sum::<f64>() - s) / support.len() as f64;
        let mut w = vec![0.0; n];
        let mut feasible = true;
        for &k in &support {
            w[k] = v[k] - tau;
            if w[k] < 0.0 {
                feasible = false;
            }
        }
        if !feasible {
            continue;
        }
        let d: f64 = w.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, w));
        }
    }
    best.expect("some support is always feasible").1
}

/// Symmetric PSD square root by eigendecomposition.
pub fn psd_sqrt(l: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(l.clone());
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| x.max(0.0).sqrt()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

fn project_ball(x: &DVector<f64>, center: &DVector<f64>, r: f64) -> DVector<f64> {
    let d = x - center;
    let n = d.norm();
    if n <= r {
        x.clone()
    } else {
        center + d * (r / n)
    }
}

/// Maximum of `|u|^2` over `|u - L^{1/2} mu| <= rho1`, the mean subproblem in
/// the variable `u = L^{1/2} mu`. Takes the best of the stationary candidates
/// and multi-start projected ascent.
pub fn inner_max_mean_oracle(l: &DMatrix<f64>, mean: &DVector<f64>, rho1: f64, seed: u64) -> f64 {
    let m = l.nrows();
    let c = psd_sqrt(l) * mean;
    let cn = c.norm();
    let mut best = c.norm_squared();
    let mut candidates = Vec::new();
    if cn > 0.0 {
        candidates.push(&c + &c * (rho1 / cn));
        candidates.push(&c - &c * (rho1 / cn));
    } else {
        let mut e = DVector::zeros(m);
        e[0] = rho1;
        candidates.push(e);
    }
    for u in &candidates {
        best = best.max(u.norm_squared());
    }
    let mut rng = rng(seed);
    for _ in 0..20 {
        let dir = random_vector(&mut rng, m);
        let mut u = project_ball(&(&c + dir * rho1), &c, rho1);
        for _ in 0..500 {
            let next = project_ball(&(&u * 3.0), &c, rho1);
            if (&next - &u).norm() <= 1e-15 * (1.0 + u.norm()) {
                break;
            }
            u = next;
        }
        best = best.max(u.norm_squared());
    }
    best
}

/// Random covariance with `|S - cov|_F <= rho2` that is PSD, or `None` when
/// the draw left the cone.
pub fn sample_feasible_covariance(
    rng: &mut ChaCha8Rng,
    cov: &DMatrix<f64>,
    rho2: f64,
) -> Option<DMatrix<f64>> {
    let m = cov.nrows();
    let a = DMatrix::from_fn(m, m, |_, _| normal(rng));
    let d = (&a + a.transpose()) * 0.5;
    let r = rho2 * rng.random::<f64>().powf(1.0 / (m * (m + 1) / 2) as f64);
    let s = cov + d.clone() * (r / d.norm());
    let eig = SymmetricEigen::new(s.clone());
    if eig.eigenvalues.min() < 0.0 {
        None
    } else {
        Some(s)
    }
}

/// Feasible covariance on the ball boundary whose direction is `target`
/// plus a perturbation of relative size `spread`.
pub fn sample_near_direction(
    rng: &mut ChaCha8Rng,
    cov: &DMatrix<f64>,
    target: &DMatrix<f64>,
    rho2: f64,
    spread: f64,
) -> Option<DMatrix<f64>> {
    let m = cov.nrows();
    let a = DMatrix::from_fn(m, m, |_, _| normal(rng));
    let d = (&a + a.transpose()) * 0.5;
    let dir = target / target.norm() + d.clone() * (spread / d.norm());
    let s = cov + dir.clone() * (rho2 / dir.norm());
    let eig = SymmetricEigen::new(s.clone());
    if eig.eigenvalues.min() < 0.0 {
        None
    } else {
        Some(s)
    }
}

/// Sample mean and 1/n covariance by explicit per-entry sums.
pub fn moments_oracle(x: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let (m, n) = x.shape();
    let mut mean = DVector::zeros(m);
    for i in 0..m {
        let mut t = 0.0;
        for s in 0..n {
            t += x[(i, s)];
        }
        mean[i] = t / n as f64;
    }
    let mut cov = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let mut t = 0.0;
            for s in 0..n {
                t += (x[(i, s)] - mean[i]) * (x[(j, s)] - mean[j]);
            }
            cov[(i, j)] = t / n as f64;
        }
    }
    (mean, cov)
}

/// Moore-Penrose pseudo-inverse of a symmetric matrix.
pub fn pinv_symmetric(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(a.clone());
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let inv = eig
        .eigenvalues
        .map(|x| if x > rel_tol * max { 1.0 / x } else { 0.0 });
    &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose()
}
