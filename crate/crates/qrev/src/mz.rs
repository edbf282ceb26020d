//! The Mabuchi–Zoller scenario: a three-outcome ideal measurement on two
//! truncated bosonic modes that is unitarily reversible on the subspace
//! spanned by `|2,0>` and `|0,2>`.
//!
//! Outcome operators on the joint space (with `a`, `b` the per-mode
//! annihilation operators and `N = a†a + b†b`):
//!
//! ```text
//! A1 = sqrt(Δ/2) (a + b)
//! A2 = sqrt(Δ/2) (a − b)
//! A3 = exp(−i h Δ) sqrt(I − Δ N)
//! ```
//!
//! `A3` uses the exact operator square root rather than its first-order
//! expansion, so `Σ A_i†A_i = I` holds to machine precision at finite Δ.

use num_complex::Complex;

use crate::channels::{pure_fidelity, DensityMatrix, Measurement, QuantumOperation};
use crate::error::{Error, Result};
use crate::qmat::{matrix_sqrt_psd, unitary_exp_neg_ih, ComplexMatrix, StateVector};
use crate::reversal::{construct_reversal, Subspace};
use crate::scalar::{Cplx, Scalar};
use crate::tol;

/// Parameters of the scenario: time step Δ, per-mode Fock cutoff, and an
/// optional dimensionless Hamiltonian `h` on the joint space.
#[derive(Clone, Debug)]
pub struct MabuchiZollerParams<T: Scalar> {
    delta: T,
    fock_cutoff: usize,
    hamiltonian: Option<ComplexMatrix<T>>,
}

impl<T: Scalar> MabuchiZollerParams<T> {
    /// Validate `0 < Δ` with `Δ·(2·cutoff) <= 1` (so `I − ΔN` stays PSD on
    /// the truncated space) and, when given, a Hermitian `h` on the joint
    /// `(cutoff+1)²`-dimensional space.
    pub fn new(delta: T, fock_cutoff: usize, hamiltonian: Option<ComplexMatrix<T>>) -> Result<Self> {
        if fock_cutoff == 0 {
            return Err(Error::InvalidParameter("fock cutoff must be at least 1".into()));
        }
        let bound = T::from_usize(2 * fock_cutoff).unwrap();
        if delta <= T::zero() || delta * bound > T::one() {
            return Err(Error::InvalidParameter(format!(
                "delta {} outside (0, 1/(2·cutoff)]",
                delta.to_f64_lossy()
            )));
        }
        let joint = (fock_cutoff + 1) * (fock_cutoff + 1);
        if let Some(h) = &hamiltonian {
            if h.rows() != joint || h.cols() != joint {
                return Err(Error::Shape(format!(
                    "hamiltonian must be {joint}x{joint} on the joint space"
                )));
            }
            let dev = h.hermiticity_deviation();
            if dev > tol::t::<T>(tol::HERMITIAN) {
                return Err(Error::NotHermitian {
                    deviation: dev.to_f64_lossy(),
                });
            }
        }
        Ok(Self {
            delta,
            fock_cutoff,
            hamiltonian,
        })
    }

    /// The paper's working point: Δ = 0.1, cutoff 2, h = 0.
    pub fn default_scenario() -> Self {
        Self::new(T::from_f64_lossy(0.1), 2, None).expect("valid defaults")
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn hamiltonian(&self) -> Option<&ComplexMatrix<T>> {
        self.hamiltonian.as_ref()
    }

    /// Dimension of the joint two-mode space, `(cutoff+1)²`.
    pub fn joint_dim(&self) -> usize {
        (self.fock_cutoff + 1) * (self.fock_cutoff + 1)
    }

    /// Flat index of `|n_a, n_b>` in the row-major joint ordering.
    pub fn joint_index(&self, n_a: usize, n_b: usize) -> usize {
        n_a * (self.fock_cutoff + 1) + n_b
    }
}

/// Truncated annihilation operator: `a|n> = sqrt(n)|n−1>` on dimension
/// `cutoff + 1`.
pub fn annihilation_matrix<T: Scalar>(cutoff: usize) -> ComplexMatrix<T> {
    let dim = cutoff + 1;
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex::new(T::from_usize(j).unwrap().sqrt(), T::zero())
        } else {
            Complex::new(T::zero(), T::zero())
        }
    })
}

/// Build the three-outcome measurement (labels "1", "2", "3") on the joint
/// space.
pub fn build_measurement<T: Scalar>(p: &MabuchiZollerParams<T>) -> Result<Measurement<T>> {
    let dim = p.fock_cutoff + 1;
    let a_single = annihilation_matrix::<T>(p.fock_cutoff);
    let id = ComplexMatrix::identity(dim);
    let a = a_single.tensor(&id);
    let b = id.tensor(&a_single);
    let half = T::from_f64_lossy(0.5);
    let root = (p.delta * half).sqrt();
    let a1 = (&a + &b).scale_re(root);
    let a2 = (&a - &b).scale_re(root);

    let number = &a.adjoint().matmul(&a)? + &b.adjoint().matmul(&b)?;
    let inner = &ComplexMatrix::identity(p.joint_dim()) - &number.scale_re(p.delta);
    let sqrt_part = matrix_sqrt_psd(&inner).map_err(|e| match e {
        Error::NotPsd { min_eigenvalue } => Error::InvalidParameter(format!(
            "I − Δ(a†a + b†b) is not PSD (min eigenvalue {min_eigenvalue:.3e}); reduce delta"
        )),
        other => other,
    })?;
    let a3 = match &p.hamiltonian {
        Some(h) => unitary_exp_neg_ih(h, p.delta)?.matmul(&sqrt_part)?,
        None => sqrt_part,
    };

    Measurement::new(vec![
        ("1".into(), QuantumOperation::new(vec![a1])?),
        ("2".into(), QuantumOperation::new(vec![a2])?),
        ("3".into(), QuantumOperation::new(vec![a3])?),
    ])
}

/// The reversible subspace `M = span{|2,0>, |0,2>}` of the joint space.
pub fn reversible_subspace<T: Scalar>(p: &MabuchiZollerParams<T>) -> Result<Subspace<T>> {
    if p.fock_cutoff < 2 {
        return Err(Error::InvalidParameter(
            "reversible subspace needs fock cutoff >= 2".into(),
        ));
    }
    Subspace::span_of_basis_indices(
        p.joint_dim(),
        &[p.joint_index(2, 0), p.joint_index(0, 2)],
    )
}

/// One measure-and-reverse round on `|psi> = alpha|2,0> + beta|0,2>`.
#[derive(Clone, Debug)]
pub struct ReversalDemo<T: Scalar> {
    /// Label of the sampled outcome.
    pub outcome: String,
    /// Outcome probabilities of the full measurement on `|psi>`.
    pub probabilities: Vec<T>,
    /// Fidelity between `|psi>` and the post-measurement state.
    pub fidelity_before: T,
    /// Fidelity after applying the certified reversing unitary.
    pub fidelity_after: T,
}

/// Sample one outcome on `alpha|2,0> + beta|0,2>`, construct the certified
/// reversing unitary for that outcome, and report pre/post fidelities.
pub fn demo_reverse<T: Scalar>(
    p: &MabuchiZollerParams<T>,
    alpha: Cplx<T>,
    beta: Cplx<T>,
    seed: u64,
) -> Result<ReversalDemo<T>> {
    let norm_sq = alpha.norm_sqr() + beta.norm_sqr();
    if (norm_sq - T::one()).abs() > tol::t::<T>(tol::STATE_NORM) {
        return Err(Error::InvalidParameter(
            "|alpha|² + |beta|² must equal 1".into(),
        ));
    }
    let m = reversible_subspace(p)?;
    let measurement = build_measurement(p)?;

    let mut amps = vec![Complex::new(T::zero(), T::zero()); p.joint_dim()];
    amps[p.joint_index(2, 0)] = alpha;
    amps[p.joint_index(0, 2)] = beta;
    let psi = StateVector::new(amps)?;
    let rho = DensityMatrix::from_pure(&psi);

    let probabilities = measurement.outcome_probabilities(&rho)?;
    let (outcome, posterior) = measurement.sample_outcome(&rho, seed)?;
    let index = measurement
        .outcomes()
        .iter()
        .position(|(label, _)| *label == outcome)
        .expect("sampled label exists");

    let ideal = measurement.ideal_outcome(index)?;
    let certificate = construct_reversal(&ideal, &m, tol::t::<T>(tol::ACCEPT))?;
    let u = &certificate.reversing_unitary;
    let restored = u.matmul(posterior.matrix())?.matmul(&u.adjoint())?;
    let restored = DensityMatrix::from_unit_trace_unchecked(restored);

    Ok(ReversalDemo {
        outcome,
        probabilities,
        fidelity_before: pure_fidelity(&psi, &posterior)?,
        fidelity_after: pure_fidelity(&psi, &restored)?,
    })
}
