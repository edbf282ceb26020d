//! Default numeric tolerances, as `f64` constants converted on demand.
//!
//! These defaults assume `f64` arithmetic at desk-scale dimensions (< ~100).
//! Operations that accept a `tol` argument use these only as documented
//! defaults; `f32` users should pass looser values explicitly.

use crate::scalar::Scalar;

/// Entrywise comparison tolerance for operator identities.
pub const ENTRY: f64 = 1e-9;
/// Hermiticity tolerance (max-norm of `m - m†`).
pub const HERMITIAN: f64 = 1e-9;
/// Unit-norm tolerance for state vectors.
pub const STATE_NORM: f64 = 1e-10;
/// Trace-one tolerance for density matrices.
pub const TRACE_ONE: f64 = 1e-10;
/// Eigenvalues in `[PSD_FLOOR, 0)` are clamped to zero; anything lower rejects.
pub const PSD_FLOOR: f64 = -1e-10;
/// Completeness tolerance for measurements and teleportation schemes.
pub const COMPLETENESS: f64 = 1e-8;
/// Default acceptance tolerance for reversibility checks.
pub const ACCEPT: f64 = 1e-8;
/// Probabilities at or below this are treated as zero.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Convert a tolerance constant into the working scalar type, flooring its
/// magnitude at 64 machine epsilons so the defaults stay meaningful in `f32`
/// (where the `f64`-scale constants would sit below roundoff). For `f64` the
/// floor is ~1.4e-14 and never binds.
pub fn t<T: Scalar>(value: f64) -> T {
    let floor = T::epsilon() * T::from_f64_lossy(64.0);
    let v = T::from_f64_lossy(value);
    if v >= T::zero() {
        v.max(floor)
    } else {
        v.min(-floor)
    }
}
