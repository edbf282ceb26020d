//! Numerical toolkit for quantum operations, unitarily reversible
//! measurements, and Bennett-type teleportation schemes.
//!
//! The crate decides whether an ideal quantum operation `E(rho) = A rho A†`
//! can be undone by a unitary on a subspace, constructs the reversing
//! unitary from the polar decomposition of `A P_M`, and applies the same
//! machinery to verify and characterize teleportation schemes (every
//! measurement outcome induces an operation on the target system; the scheme
//! works exactly when each induced operation is unitarily reversible).
//!
//! Modules:
//! - [`qmat`]: dense complex matrices, state vectors, eigendecomposition,
//!   SVD, polar and Schmidt decompositions.
//! - [`channels`]: Kraus-form operations, measurements, POVMs, sampling.
//! - [`reversal`]: the reversibility conditions, reversal construction, and
//!   the information-gain necessary condition.
//! - [`mz`]: the Mabuchi–Zoller two-mode scenario.
//! - [`teleport`]: teleportation schemes, induced operations, verification,
//!   characterization, and scheme builders.
//! - [`json`]: serde wire formats used by the CLI.
//!
//! Everything is generic over the real scalar type through [`scalar::Scalar`]
//! (`f32` or `f64`); the aliases at the crate root fix `f64`, which is what
//! the documented tolerances assume.

pub mod channels;
pub mod error;
pub mod json;
pub mod mz;
pub mod qmat;
pub mod random;
pub mod reversal;
pub mod scalar;
pub mod teleport;
pub mod tol;

pub use error::{Error, Result};

/// Complex double: entry type of all `f64`-instantiated carriers.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix over `f64`.
pub type Matrix64 = qmat::ComplexMatrix<f64>;
/// State vector over `f64`.
pub type StateVector64 = qmat::StateVector<f64>;
/// Density matrix over `f64`.
pub type Density64 = channels::DensityMatrix<f64>;
/// Kraus-form quantum operation over `f64`.
pub type Operation64 = channels::QuantumOperation<f64>;
/// Single-Kraus ideal operation over `f64`.
pub type Ideal64 = channels::IdealOperation<f64>;
/// Generalized measurement over `f64`.
pub type Measurement64 = channels::Measurement<f64>;
/// Subspace over `f64`.
pub type Subspace64 = reversal::Subspace<f64>;
/// Teleportation scheme over `f64`.
pub type Scheme64 = teleport::TeleportationScheme<f64>;
