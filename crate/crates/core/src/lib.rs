//! Finite-truncation model of the oscillator Hilbert C*-module and the
//! Kuiper complex on the flat torus.
//!
//! The fiber is the Fock space truncated to `N` levels. Compact operators
//! become `N×N` complex matrices, the higher oscillator module is
//! `Λ•(ℝ²)* ⊗ H_N`, and the base manifold is a periodic `G×G` lattice
//! discretizing `T²`. Every module exposes plain functions on immutable
//! values so that the verification suites in [`cli`] can run them
//! concurrently.

pub mod cli;
pub mod compacts;
pub mod error;
pub mod fock;
pub mod kuiper;
pub mod metaplectic;
pub mod module_structure;
pub mod sampling;

pub use compacts::CompactOp;
pub use error::{Error, Result};
pub use fock::{FockVector, GradedElement, Side, WedgeIndex};
pub use kuiper::{CochainField, GaugeField, TorusGrid};
pub use metaplectic::SpGenerator;
pub use module_structure::ModuleElement;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;

/// Relative singular-value threshold below which a value counts as zero in
/// every rank decision.
pub const RANK_RTOL: f64 = 1e-8;
