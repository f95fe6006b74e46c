//! Joint spectra of matrix tuples and spectral rigidity for the infinitesimal
//! generators of twisted `S_νU(2)` and of `sl(2)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`] and [`eigen`]: dense complex matrices, LU determinants and a
//!   cyclic Jacobi eigensolver for Hermitian (and, through joint
//!   diagonalisation, normal) matrices.
//! * [`polynomial`]: sparse multivariate polynomials with complex coefficients.
//! * [`generators`]: the concrete generator families and the commutation
//!   relation checker.
//! * [`spectrum`] and [`pencil`]: determinantal polynomials of pencils,
//!   hyperplane extraction and spectra comparison.
//! * [`exceptional`]: the finite set of deformation parameters where
//!   `E E*` has a repeated eigenvalue.
//! * [`rigidity`]: hypothesis verification and reconstruction of the diagonal
//!   unitary witness.
//! * [`cli`]: the `specrig` command-line front end.
//!
//! Grid evaluations and batch sweeps run on rayon when the `parallel` feature
//! is enabled (the default); see [`exec`].

pub mod cli;
pub mod eigen;
pub mod error;
pub mod exceptional;
pub mod exec;
pub mod fixtures;
pub mod generators;
pub mod io;
pub mod matrix;
pub mod pencil;
pub mod polynomial;
pub mod rigidity;
pub mod spectrum;

pub use error::{Error, Result};
pub use exec::Exec;
pub use generators::{Family, GeneratorTuple};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
pub use polynomial::{LinearForm, MultiPoly};

/// Tolerance used wherever a caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-9;
