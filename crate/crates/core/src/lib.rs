//! Graph Laplacian learning under moment uncertainty.
//!
//! The learner minimizes a worst-case Laplacian quadratic risk over a ball of
//! first and second moments around the empirical ones, then reads edges off
//! the learned weights.

pub mod datagen;
pub mod error;
pub mod eval;
pub mod harness;
pub mod io;
pub mod laplacian;
pub mod moments;
pub mod objective;
pub mod solvers;

pub use datagen::{gen_graph, gen_signals, GeneratedGraph, GraphFamily, GraphSpec, SignalSpec};
pub use error::{MuglError, Result};
pub use eval::{score, EdgeMetrics};
pub use harness::{
    learn, run_experiment, Calibration, Experiment, ExperimentSummary, Learned, ModelKind,
    ModelPreset, RadiiSource, SignalSettings,
};
pub use laplacian::{adjoint, expand, linear_to_pair, pair_to_linear, GraphLaplacian, WeightVector};
pub use moments::{empirical_moments, rho1_radius, rho2_radius, EmpiricalMoments, RadiusParams, SignalMatrix};
pub use objective::{build_context, gradient, objective_value, ModelConfig, ObjectiveContext, Regularizer};
pub use solvers::{ls_pgd_solve, pgd_solve, project_simplex, SolveReport, SolverOptions, Termination};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
