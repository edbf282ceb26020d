//! Unitary reversibility of ideal operations on a subspace.
//!
//! An ideal operation `E(rho) = A rho A†` is unitarily reversible on a
//! subspace `M` exactly when `P_M A†A P_M = mu² P_M` for some constant
//! `mu² ∈ (0, 1]` — equivalently, when the outcome probability is the same
//! for every state in `M`. The reversing unitary comes out of the polar
//! decomposition `A P_M = V sqrt(P_M A†A P_M)` as `U = V†`. For general
//! (non-ideal) operations the flat-spectrum condition on
//! `B = P_M (Σ A_j†A_j) P_M` remains necessary for any deterministic
//! reversal, but is no longer sufficient.

use crate::channels::{fidelity, pure_fidelity, DensityMatrix, IdealOperation, QuantumOperation};
use crate::error::{Error, Result};
use crate::qmat::{eig_hermitian, polar, ComplexMatrix, StateVector};
use crate::random::{random_density_in_subspace, random_state_in_subspace, rng_from_seed};
use crate::scalar::Scalar;
use crate::tol;

/// Subspace `M` of an ambient space, carried as an orthonormal basis.
#[derive(Clone, Debug)]
pub struct Subspace<T: Scalar> {
    ambient_dim: usize,
    basis: Vec<StateVector<T>>,
}

impl<T: Scalar> Subspace<T> {
    /// Wrap an orthonormal basis (pairwise orthonormal within `1e-10`).
    pub fn new(ambient_dim: usize, basis: Vec<StateVector<T>>) -> Result<Self> {
        if basis.is_empty() || basis.len() > ambient_dim {
            return Err(Error::InvalidParameter(format!(
                "subspace dimension {} invalid for ambient dimension {}",
                basis.len(),
                ambient_dim
            )));
        }
        if basis.iter().any(|v| v.dim() != ambient_dim) {
            return Err(Error::Shape("basis vectors must live in the ambient space".into()));
        }
        let tol_on = tol::t::<T>(tol::STATE_NORM);
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let overlap = basis[i].inner(&basis[j]);
                let expect = if i == j { T::one() } else { T::zero() };
                if (overlap.norm() - expect).abs() > tol_on {
                    return Err(Error::InvalidParameter(format!(
                        "basis vectors {i} and {j} are not orthonormal"
                    )));
                }
            }
        }
        Ok(Self { ambient_dim, basis })
    }

    /// The whole space as a subspace.
    pub fn full(dim: usize) -> Self {
        Self {
            ambient_dim: dim,
            basis: (0..dim).map(|k| StateVector::basis(dim, k)).collect(),
        }
    }

    /// Span of the given computational basis indices.
    pub fn span_of_basis_indices(ambient_dim: usize, indices: &[usize]) -> Result<Self> {
        Self::new(
            ambient_dim,
            indices
                .iter()
                .map(|&k| StateVector::basis(ambient_dim, k))
                .collect(),
        )
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Dimension of the subspace.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[StateVector<T>] {
        &self.basis
    }

    /// Projector `P_M = Σ_k |m_k><m_k|`.
    pub fn projector(&self) -> ComplexMatrix<T> {
        let mut p = ComplexMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for v in &self.basis {
            p = &p + &v.projector();
        }
        p
    }

    /// Isometry whose columns are the basis vectors (ambient_dim × dim).
    pub fn isometry(&self) -> ComplexMatrix<T> {
        ComplexMatrix::from_fn(self.ambient_dim, self.basis.len(), |i, j| {
            self.basis[j].amplitudes()[i]
        })
    }

    /// Compress an ambient operator onto the subspace: `Iso† A Iso`.
    pub fn compress(&self, a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        let iso = self.isometry();
        iso.adjoint().matmul(a)?.matmul(&iso)
    }
}

/// Result of the condition-2 test `P_M E P_M = mu² P_M`.
#[derive(Clone, Debug)]
pub struct Condition2Report<T: Scalar> {
    /// Trace-mean estimate `tr(P_M E P_M)/dim(M)`.
    pub mu_squared: T,
    /// Max-norm of `P_M E P_M − mu² P_M`.
    pub residual: T,
    /// True when the residual is within `tol` and `mu²` is positive.
    pub accepted: bool,
}

/// Check whether `A†A` restricted to `M` is a positive multiple of the
/// identity on `M`.
pub fn check_condition2<T: Scalar>(
    op: &IdealOperation<T>,
    m: &Subspace<T>,
    tol_accept: T,
) -> Result<Condition2Report<T>> {
    if op.dim() != m.ambient_dim() {
        return Err(Error::Shape(format!(
            "operation dim {} does not match subspace ambient dim {}",
            op.dim(),
            m.ambient_dim()
        )));
    }
    if tol_accept <= T::zero() {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let e = op.operator().adjoint().matmul(op.operator())?;
    condition2_from_povm(&e, m, tol_accept)
}

fn condition2_from_povm<T: Scalar>(
    e: &ComplexMatrix<T>,
    m: &Subspace<T>,
    tol_accept: T,
) -> Result<Condition2Report<T>> {
    let p = m.projector();
    let pep = p.matmul(e)?.matmul(&p)?;
    let dim_m = T::from_usize(m.dim()).unwrap();
    let mu_squared = pep.trace().re / dim_m;
    let residual = pep.max_abs_diff(&p.scale_re(mu_squared));
    Ok(Condition2Report {
        mu_squared,
        residual,
        accepted: residual <= tol_accept && mu_squared > tol_accept,
    })
}

/// Result of the sampled condition-3 test.
#[derive(Clone, Debug)]
pub struct Condition3Report<T: Scalar> {
    pub accepted: bool,
    /// `max − min` of `<psi|A†A|psi>` over the probe states.
    pub spread: T,
}

/// Probe whether the outcome probability `<psi|A†A|psi>` is constant on `M`,
/// evaluating every basis vector of `M` plus `samples` seeded random
/// superpositions. Equivalent to condition 2; this is the sampling
/// restatement.
pub fn check_condition3<T: Scalar>(
    op: &IdealOperation<T>,
    m: &Subspace<T>,
    samples: usize,
    seed: u64,
    tol_accept: T,
) -> Result<Condition3Report<T>> {
    if op.dim() != m.ambient_dim() {
        return Err(Error::Shape("operation and subspace dimensions differ".into()));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("condition 3 needs at least 2 samples".into()));
    }
    let e = op.operator().adjoint().matmul(op.operator())?;
    let mut rng = rng_from_seed(seed);
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    let mut probe = |psi: &StateVector<T>| -> Result<()> {
        let image = psi.apply(&e)?;
        let val = psi
            .amplitudes()
            .iter()
            .zip(image.iter())
            .map(|(a, b)| (a.conj() * *b).re)
            .fold(T::zero(), |acc, x| acc + x);
        lo = lo.min(val);
        hi = hi.max(val);
        Ok(())
    };
    for v in m.basis() {
        probe(v)?;
    }
    for _ in 0..samples {
        let psi = random_state_in_subspace(m, &mut rng);
        probe(&psi)?;
    }
    let spread = hi - lo;
    Ok(Condition3Report {
        accepted: spread <= tol_accept,
        spread,
    })
}

/// The condition-4 factorization `A = mu·V·P_M + A·P_N`.
#[derive(Clone, Debug)]
pub struct Condition4Decomposition<T: Scalar> {
    pub mu: T,
    /// Unitary acting like `A/mu` on `M` (arbitrary deterministic completion
    /// elsewhere).
    pub v: ComplexMatrix<T>,
}

/// Decompose a condition-2-accepted operation into the form
/// `A = mu·V·P_M + A·P_N` via the polar decomposition of `A·P_M`.
pub fn decompose_condition4<T: Scalar>(
    op: &IdealOperation<T>,
    m: &Subspace<T>,
    tol_accept: T,
) -> Result<Condition4Decomposition<T>> {
    let report = check_condition2(op, m, tol_accept)?;
    if !report.accepted {
        return Err(Error::NotReversible {
            residual: report.residual.to_f64_lossy(),
            mu_squared: report.mu_squared.to_f64_lossy(),
        });
    }
    let ap = op.operator().matmul(&m.projector())?;
    let factors = polar(&ap)?;
    Ok(Condition4Decomposition {
        mu: report.mu_squared.sqrt(),
        v: factors.unitary,
    })
}

/// Certificate that an ideal operation is unitarily reversible on `M`.
#[derive(Clone, Debug)]
pub struct ReversibilityCertificate<T: Scalar> {
    /// The constant outcome probability on `M`.
    pub mu_squared: T,
    /// The unitary `U = V†` restoring every state supported on `M`.
    pub reversing_unitary: ComplexMatrix<T>,
    /// Condition-2 residual observed at construction.
    pub residual: T,
}

/// Construct the reversing unitary `U = V†` for an operation accepted by
/// condition 2. Fails with [`Error::NotReversible`] otherwise.
pub fn construct_reversal<T: Scalar>(
    op: &IdealOperation<T>,
    m: &Subspace<T>,
    tol_accept: T,
) -> Result<ReversibilityCertificate<T>> {
    let report = check_condition2(op, m, tol_accept)?;
    if !report.accepted {
        return Err(Error::NotReversible {
            residual: report.residual.to_f64_lossy(),
            mu_squared: report.mu_squared.to_f64_lossy(),
        });
    }
    let decomposition = decompose_condition4(op, m, tol_accept)?;
    Ok(ReversibilityCertificate {
        mu_squared: report.mu_squared,
        reversing_unitary: decomposition.v.adjoint(),
        residual: report.residual,
    })
}

/// Minimum fidelity of `U E(rho)/tr U†` against `rho` over seeded random
/// states supported on `M`: `samples` pure states plus `samples/5` rank-2
/// mixtures (when `dim(M) >= 2`).
///
/// Accepts any quantum operation, so it also probes candidate reversals of
/// non-ideal operations (where the flat-spectrum condition is necessary but
/// not sufficient). Errors with [`Error::ZeroProbability`] if the operation
/// annihilates a sampled state, and rejects a non-unitary `u`.
pub fn verify_reversal<T: Scalar>(
    op: &QuantumOperation<T>,
    u: &ComplexMatrix<T>,
    m: &Subspace<T>,
    samples: usize,
    seed: u64,
) -> Result<T> {
    if !u.is_unitary(tol::t::<T>(tol::ENTRY)) {
        return Err(Error::InvalidParameter("reversal candidate is not unitary".into()));
    }
    if op.dim() != m.ambient_dim() || u.rows() != op.dim() {
        return Err(Error::Shape("operation, unitary, and subspace dimensions differ".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut min_f = T::infinity();

    for _ in 0..samples {
        let psi = random_state_in_subspace(m, &mut rng);
        let rho = DensityMatrix::from_pure(&psi);
        let post = op.apply_normalized(&rho)?;
        let restored = u
            .matmul(post.matrix())?
            .matmul(&u.adjoint())?;
        let restored = DensityMatrix::from_unit_trace_unchecked(restored);
        min_f = min_f.min(pure_fidelity(&psi, &restored)?);
    }
    if m.dim() >= 2 {
        for _ in 0..samples / 5 {
            let rho = random_density_in_subspace(m, 2, &mut rng);
            let post = op.apply_normalized(&rho)?;
            let restored = u.matmul(post.matrix())?.matmul(&u.adjoint())?;
            let restored = DensityMatrix::from_unit_trace_unchecked(restored);
            min_f = min_f.min(fidelity(&rho, &restored)?);
        }
    }
    Ok(min_f)
}

/// Report of the information-gain necessary condition for general operations.
#[derive(Clone, Debug)]
pub struct InformationGainReport<T: Scalar> {
    /// Mean eigenvalue of `B = P_M (Σ A_j†A_j) P_M` on `M`.
    pub mu_squared: T,
    /// `max − min` eigenvalue of `B` on `M`.
    pub eigenvalue_spread: T,
    pub accepted: bool,
}

/// Necessary condition for *deterministic* reversal of a general operation on
/// `M`: the spectrum of `B = P_M (Σ_j A_j†A_j) P_M`, viewed on `M`, must be a
/// single positive constant `mu²` — i.e. the operation reveals nothing about
/// which state of `M` it acted on.
///
/// This is necessary but **not sufficient**: operations that send all of `M`
/// to one state at constant trace pass this check yet admit no reversal.
pub fn information_gain_check<T: Scalar>(
    op: &QuantumOperation<T>,
    m: &Subspace<T>,
    tol_accept: T,
) -> Result<InformationGainReport<T>> {
    if op.dim() != m.ambient_dim() {
        return Err(Error::Shape("operation and subspace dimensions differ".into()));
    }
    let b_on_m = m.compress(&op.povm_matrix())?;
    let (vals, _) = eig_hermitian(&b_on_m)?;
    let hi = vals[0];
    let lo = vals[vals.len() - 1];
    let dim_m = T::from_usize(m.dim()).unwrap();
    let mu_squared = vals.iter().copied().fold(T::zero(), |a, x| a + x) / dim_m;
    let spread = hi - lo;
    Ok(InformationGainReport {
        mu_squared,
        eigenvalue_spread: spread,
        accepted: spread <= tol_accept && lo > tol_accept,
    })
}
