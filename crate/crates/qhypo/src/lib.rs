//! Fundamental limits on distinguishing candidate dynamics of an open
//! quantum system.
//!
//! Given two hypotheses — candidate Hamiltonians and Lindblad channels for
//! the same system — this crate solves a two-sided master equation for the
//! system–environment overlap and derives from it minimal discrimination
//! error probabilities, asymptotic discrimination rates, and Fisher
//! information for parameter estimation. Independent verifiers (no-jump
//! wavefunction propagation, Helstrom bound on reduced states, Monte Carlo
//! wavefunction sampling, and a closed-form Gaussian probing model) cross
//! check the central solver.
//!
//! Units: hbar = 1 and rates are quoted in units of the reference decay
//! rate kappa, so times are dimensionless multiples of 1/kappa.

pub mod analytic;
pub mod bounds;
pub mod estimation;
pub mod model;
pub mod numerics;
pub mod scenario;
pub mod spectral;
pub mod trajectories;
pub mod twosided;

pub use numerics::{ComplexMatrix, ComplexVector, OdeSettings};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Operands with incompatible dimensions.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// Invalid inputs: malformed scenarios, broken invariants, bad flags.
    #[error("validation error: {0}")]
    Validation(String),
    /// Numerical failure: non-convergence, step limits, NaN propagation.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line interface:
    /// 1 I/O, 2 validation, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            Error::Dimension(_) | Error::Validation(_) => 2,
            Error::Numerical(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
