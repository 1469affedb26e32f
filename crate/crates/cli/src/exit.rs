//! Process exit codes and the error type that carries them.

use mugl_core::MuglError;

pub const OK: u8 = 0;
pub const CONFIG: u8 = 2;
pub const IO: u8 = 3;
pub const MAX_ITERS: u8 = 4;
pub const SOLVER: u8 = 5;
pub const NODE_MISMATCH: u8 = 6;
pub const ALL_FAILED: u8 = 7;

pub const HELP: &str = "\
Exit codes:
  0  success
  2  invalid configuration or arguments (message names the key or location)
  3  missing or unreadable input file, or write failure
  4  learn stopped at max_iters (outputs are still written)
  5  solver failure: nonsmooth point or line-search stall
  6  eval: truth and prediction have different node counts
  7  bench: every seed failed";

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(CONFIG, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(IO, message)
    }

    /// Maps a library error raised while handling `context`.
    pub fn from_core(context: &str, e: MuglError) -> Self {
        let code = match e {
            MuglError::Io(_) | MuglError::Parse(_) => IO,
            MuglError::NonsmoothPoint { .. }
            | MuglError::OutsideDomain(_)
            | MuglError::LineSearchStall(_)
            | MuglError::Decomposition
            | MuglError::NonFinite(_) => SOLVER,
            MuglError::LengthMismatch { .. } => NODE_MISMATCH,
            _ => CONFIG,
        };
        Self::new(code, format!("{context}: {e}"))
    }
}
