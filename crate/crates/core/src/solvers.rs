//! Projected gradient solvers over the scaled simplex.

use serde::{Deserialize, Serialize};

use crate::error::{MuglError, Result};
use crate::laplacian::WeightVector;
use crate::objective::ObjectiveContext;

/// Largest number of backtracking halvings before a line search gives up.
pub const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Fixed step for [`pgd_solve`].
    pub step: f64,
    pub eta_min: f64,
    pub eta_max: f64,
    /// Armijo sufficient-decrease parameter.
    pub beta: f64,
    /// Backtracking shrink factor.
    pub gamma: f64,
    pub tol_step: f64,
    pub tol_kkt: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            step: 0.01,
            eta_min: 1e-6,
            eta_max: 1.0,
            beta: 1e-4,
            gamma: 0.5,
            tol_step: 1e-8,
            tol_kkt: 1e-6,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(MuglError::InvalidParameter(what.to_string()));
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("beta must lie in (0, 1)");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if !(self.eta_min > 0.0 && self.eta_min <= self.eta_max && self.eta_max.is_finite()) {
            return bad("need 0 < eta_min <= eta_max < inf");
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad("step must be positive");
        }
        if !(self.tol_step >= 0.0 && self.tol_kkt >= 0.0) {
            return bad("tolerances must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    StepTol,
    KktTol,
    MaxIters,
    NonsmoothAbort,
}

impl Termination {
    /// Whether the run stopped on one of its tolerances.
    pub fn converged(self) -> bool {
        matches!(self, Termination::StepTol | Termination::KktTol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub nodes: usize,
    pub w_final: Vec<f64>,
    /// Objective at the starting point followed by one entry per accepted
    /// iterate.
    pub objective_trace: Vec<f64>,
    pub iters: usize,
    pub kkt_residual: f64,
    pub termination: Termination,
    /// Largest model decrease `grad . v + |v|^2 / (2 eta)` seen by the line
    /// search; only set by [`ls_pgd_solve`].
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_model_decrease: Option<f64>,
}

impl SolveReport {
    pub fn weights(&self) -> WeightVector {
        WeightVector::with_nodes(self.nodes, self.w_final.clone())
            .expect("solver keeps the weight length")
    }

    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().unwrap_or(&f64::NAN)
    }
}

/// Euclidean projection onto `{w >= 0, sum(w) = s}` by the sort-and-threshold
/// method.
pub fn project_simplex(v: &[f64], s: f64) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (idx, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - s) / (idx + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    let mut w: Vec<f64> = v.iter().map(|x| (x - theta).max(0.0)).collect();
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        let fix = s / total;
        w.iter_mut().for_each(|x| *x *= fix);
    }
    w
}

/// `||w - P(w - probe * grad g(w))||_2 / probe`, zero exactly at KKT points.
pub fn stationarity_residual(ctx: &ObjectiveContext, w: &[f64], probe_step: f64) -> Result<f64> {
    let grad = ctx.gradient(w)?;
    Ok(residual_from_gradient(w, &grad, probe_step, ctx.scale()))
}

fn residual_from_gradient(w: &[f64], grad: &[f64], probe: f64, s: f64) -> f64 {
    let shifted: Vec<f64> = w.iter().zip(grad).map(|(x, g)| x - probe * g).collect();
    let p = project_simplex(&shifted, s);
    norm2_diff(w, &p) / probe
}

fn norm2_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn start(ctx: &ObjectiveContext, w0: &[f64]) -> Result<f64> {
    let g0 = ctx.value(w0)?;
    if g0 == f64::INFINITY {
        let min = crate::laplacian::degrees(w0, ctx.nodes())
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        return Err(MuglError::OutsideDomain(min));
    }
    Ok(g0)
}

fn final_residual(ctx: &ObjectiveContext, w: &[f64], probe: f64) -> f64 {
    stationarity_residual(ctx, w, probe).unwrap_or(f64::NAN)
}

/// Fixed-step projected gradient descent, `w <- P(w - step * grad g(w))`.
pub fn pgd_solve(ctx: &ObjectiveContext, w0: &[f64], opts: &SolverOptions) -> Result<SolveReport> {
    opts.validate()?;
    let s = ctx.scale();
    let eta = opts.step;
    let mut w = w0.to_vec();
    let mut trace = vec![start(ctx, &w)?];
    let mut termination = Termination::MaxIters;
    let mut residual = None;
    let mut iters = 0;

    while iters < opts.max_iters {
        let grad = match ctx.gradient(&w) {
            Ok(g) => g,
            Err(MuglError::NonsmoothPoint { .. }) => {
                termination = Termination::NonsmoothAbort;
                break;
            }
            Err(e) => return Err(e),
        };
        let shifted: Vec<f64> = w.iter().zip(&grad).map(|(x, g)| x - eta * g).collect();
        let next = project_simplex(&shifted, s);
        let r = norm2_diff(&w, &next) / eta;
        if r <= opts.tol_kkt {
            termination = Termination::KktTol;
            residual = Some(r);
            break;
        }
        let step = max_abs_diff(&w, &next);
        w = next;
        trace.push(ctx.value(&w)?);
        iters += 1;
        if step <= opts.tol_step {
            termination = Termination::StepTol;
            break;
        }
    }

    let kkt_residual = residual.unwrap_or_else(|| final_residual(ctx, &w, eta));
    Ok(SolveReport {
        nodes: ctx.nodes(),
        w_final: w,
        objective_trace: trace,
        iters,
        kkt_residual,
        termination,
        max_model_decrease: None,
    })
}

/// Projected gradient descent with an Armijo backtracking line search along
/// the projected direction. Steps that leave the regularizer domain evaluate
/// to `+inf` and are rejected by the sufficient-decrease test.
pub fn ls_pgd_solve(
    ctx: &ObjectiveContext,
    w0: &[f64],
    opts: &SolverOptions,
) -> Result<SolveReport> {
    opts.validate()?;
    let s = ctx.scale();
    let eta = opts.eta_max.clamp(opts.eta_min, opts.eta_max);
    let mut w = w0.to_vec();
    let mut current = start(ctx, &w)?;
    let mut trace = vec![current];
    let mut termination = Termination::MaxIters;
    let mut residual = None;
    let mut max_model_decrease = f64::NEG_INFINITY;
    let mut iters = 0;

    'outer: while iters < opts.max_iters {
        let grad = match ctx.gradient(&w) {
            Ok(g) => g,
            Err(MuglError::NonsmoothPoint { .. }) => {
                termination = Termination::NonsmoothAbort;
                break;
            }
            Err(e) => return Err(e),
        };
        let shifted: Vec<f64> = w.iter().zip(&grad).map(|(x, g)| x - eta * g).collect();
        let trial = project_simplex(&shifted, s);
        let v: Vec<f64> = trial.iter().zip(&w).map(|(t, x)| t - x).collect();
        let v_norm_sq: f64 = v.iter().map(|x| x * x).sum();
        let r = v_norm_sq.sqrt() / eta;
        if r <= opts.tol_kkt {
            termination = Termination::KktTol;
            residual = Some(r);
            break;
        }
        let model: f64 =
            grad.iter().zip(&v).map(|(g, d)| g * d).sum::<f64>() + v_norm_sq / (2.0 * eta);
        max_model_decrease = max_model_decrease.max(model);
        let v_inf = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));

        let mut scale = 1.0;
        for _ in 0..=MAX_BACKTRACKS {
            if scale * v_inf <= opts.tol_step {
                // the remaining step is below the step tolerance
                termination = Termination::StepTol;
                break 'outer;
            }
            let candidate: Vec<f64> = w.iter().zip(&v).map(|(x, d)| x + scale * d).collect();
            let value = ctx.extended_value(&candidate);
            if value <= current + opts.beta * scale * model {
                w = candidate;
                current = value;
                trace.push(value);
                iters += 1;
                if scale * v_inf <= opts.tol_step {
                    termination = Termination::StepTol;
                    break 'outer;
                }
                continue 'outer;
            }
            scale *= opts.gamma;
        }
        return Err(MuglError::LineSearchStall(MAX_BACKTRACKS));
    }

    let kkt_residual = residual.unwrap_or_else(|| final_residual(ctx, &w, eta));
    Ok(SolveReport {
        nodes: ctx.nodes(),
        w_final: w,
        objective_trace: trace,
        iters,
        kkt_residual,
        termination,
        max_model_decrease: Some(if max_model_decrease.is_finite() {
            max_model_decrease
        } else {
            0.0
        }),
    })
}
