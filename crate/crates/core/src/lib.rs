//! Eigenvalues with positive real part of sparse nonsymmetric pencils `(J, L)`
//! where `L` is diagonal and singular.
//!
//! The pencil is transformed by the Cayley/Möbius extension
//! `C_σ = (J + conj(σ)L)(J − σL)^{-1}`, whose eigenvectors for finite pencil
//! eigenvalues live in `range(L)`. Iterating there keeps the spurious
//! eigenvalue at infinity out of the way. On top of that operator the crate
//! provides preconditioned shift-invert search with shift updates
//! ([`eigensolvers::algorithm_one`]), Möbius deflation of a known eigenvalue
//! ([`eigensolvers::algorithm_two`]) and a shift-invert subspace iteration
//! with Rayleigh-Ritz acceleration as a baseline
//! ([`eigensolvers::subspace_iteration`]).

pub mod cli;
pub mod dense_eig;
pub mod eigensolvers;
pub mod error;
pub mod mobius;
pub mod pencil;
pub mod report;
pub mod sparse;
pub mod synth;

pub use error::{Error, Result};
pub use mobius::{CayleyOperator, Extended, MobiusOperator, MobiusParams};
pub use pencil::Pencil;
pub use sparse::{ShiftedFactorization, SparseMatrix};
pub use eigensolvers::{ConvergenceRecord, IterationConfig, SubspaceConfig, TrajectoryStatus};
pub use report::{Algorithm, SpectrumReport};
pub use synth::{planted_pencil, PlantSpec};
