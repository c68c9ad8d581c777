//! Dense complex linear algebra and ODE primitives shared by every solver.

pub mod eig;
pub mod expm;
pub mod matrix;
pub mod ode;

pub use eig::{eig_general, eig_hermitian, HermitianEigen};
pub use expm::expm;
pub use matrix::{c64, kron, ComplexMatrix, ComplexVector};
pub use ode::{integrate_adaptive, uniform_grid, OdeSettings};
