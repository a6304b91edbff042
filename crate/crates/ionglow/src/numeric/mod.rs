//! Small dense numerical kernels: a matrix type, a symmetric eigensolver,
//! adaptive quadrature, and two derivative-free optimizers.
//!
//! The problem sizes here are tiny (crystals of at most 50 ions, 1-D
//! integrals, a handful of phase parameters), so the kernels favor
//! determinism and robustness over asymptotic speed.

mod golden;
mod jacobi;
mod matrix;
mod nelder_mead;
mod simpson;
mod solve;

pub use golden::golden_section_max;
pub use jacobi::jacobi_eigen;
pub use matrix::Matrix;
pub use nelder_mead::nelder_mead_max;
pub use simpson::adaptive_simpson;
pub use solve::solve_linear;
