use std::path::Path;
use thiserror::Error;

/// Unified error type for the simulator. Each variant maps to a distinct
/// process exit code so scripted callers can distinguish failure classes.
#[derive(Debug, Error)]
pub enum SimError {
    /// Configuration file could not be read or parsed as TOML.
    #[error("config parse error: {0}")]
    Parse(String),

    /// Configuration parsed but failed semantic validation.
    #[error("config validation error: {0}")]
    Validation(String),

    /// A control law hit a guarded singularity or produced an unusable command.
    #[error("control fault: {0}")]
    ControlFault(String),

    /// Iterative solver failed to converge; carries the last iterate and residual.
    #[error("solver non-convergence after {iterations} iterations: last iterate {last:.6e}, residual {residual:.6e}")]
    Solver {
        iterations: u32,
        last: f64,
        residual: f64,
    },

    /// Filesystem failure while reading config or writing logs.
    #[error("i/o error: {0}")]
    Io(String),

    /// An argument violated a function's documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Simulated state left the valid envelope (non-finite or |theta| >= pi/2).
    #[error("state invalid: {0}")]
    StateInvalid(String),
}

impl SimError {
    pub fn io(context: &str, path: &Path, e: std::io::Error) -> Self {
        SimError::Io(format!("{context} {}: {e}", path.display()))
    }

    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Parse(_) => 2,
            SimError::Validation(_) => 3,
            SimError::ControlFault(_) => 4,
            SimError::StateInvalid(_) => 4,
            SimError::Solver { .. } => 5,
            SimError::Io(_) => 6,
            SimError::Domain(_) => 1,
        }
    }
}
