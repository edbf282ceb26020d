//! Teleportation as reversal of induced quantum operations.
//!
//! A scheme consists of a pure resource state on systems 2⊗3 and a weighted
//! family of measurement vectors on systems 1⊗2 satisfying
//! `Σ_i γ_i |P_i><P_i| = I`. Each outcome induces an operation on system 3
//! alone; the scheme teleports exactly when every induced operation is
//! unitarily reversible on the full target space, which happens exactly when
//! every outcome probability is independent of the input state. Valid
//! schemes are characterized by maximal entanglement: all Schmidt
//! coefficients of the resource and of every measurement vector equal
//! `1/sqrt(d)`, and `p_i = γ_i/d²`.
//!
//! Index conventions (identity correspondence between systems 1 and 3):
//! vectors on 1⊗2 and on 2⊗3 are indexed `first·d + second`; the global
//! space 1⊗2⊗3 is indexed `i1·d² + i2·d + i3`.

use std::f64::consts::PI;

use num_complex::Complex;

use crate::channels::{DensityMatrix, IdealOperation, QuantumOperation};
use crate::error::{Error, Result};
use crate::qmat::{eig_hermitian, schmidt, ComplexMatrix, StateVector};
use crate::random::{random_unitary, rng_from_seed};
use crate::reversal::{check_condition2, construct_reversal, Subspace};
use crate::scalar::{czero, Scalar};
use crate::tol;

/// The swap unitary on 1⊗2⊗3: `U13 |a>|b>|c> = |c>|b>|a>`. Self-inverse.
pub fn swap_operator<T: Scalar>(d: usize) -> ComplexMatrix<T> {
    let dim = d * d * d;
    let mut u = ComplexMatrix::zeros(dim, dim);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let from = a * d * d + b * d + c;
                let to = c * d * d + b * d + a;
                u[(to, from)] = Complex::new(T::one(), T::zero());
            }
        }
    }
    u
}

/// One weighted measurement vector `(γ_i, |P_i^{12}>)`.
#[derive(Clone, Debug)]
pub struct WeightedVector<T: Scalar> {
    pub gamma: T,
    pub vector: StateVector<T>,
}

/// A Bennett-type teleportation scheme.
#[derive(Clone, Debug)]
pub struct TeleportationScheme<T: Scalar> {
    d: usize,
    resource: StateVector<T>,
    measurement: Vec<WeightedVector<T>>,
}

impl<T: Scalar> TeleportationScheme<T> {
    /// Validate dimensions, weights `γ_i ∈ (0, 1]`, and the completeness
    /// relation `Σ_i γ_i |P_i><P_i| = I` within `1e-8`.
    pub fn new(
        d: usize,
        resource: StateVector<T>,
        measurement: Vec<WeightedVector<T>>,
    ) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter("local dimension must be at least 2".into()));
        }
        if resource.dim() != d * d {
            return Err(Error::Shape(format!(
                "resource state must have dimension {} for d = {}",
                d * d,
                d
            )));
        }
        if measurement.is_empty() {
            return Err(Error::InvalidParameter("scheme needs at least one measurement vector".into()));
        }
        for (i, wv) in measurement.iter().enumerate() {
            if wv.vector.dim() != d * d {
                return Err(Error::Shape(format!("measurement vector {i} has wrong dimension")));
            }
            if wv.gamma <= T::zero() || wv.gamma > T::one() + tol::t::<T>(tol::ENTRY) {
                return Err(Error::InvalidParameter(format!(
                    "gamma_{i} = {} outside (0, 1]",
                    wv.gamma.to_f64_lossy()
                )));
            }
        }
        let mut sum = ComplexMatrix::zeros(d * d, d * d);
        for wv in &measurement {
            sum = &sum + &wv.vector.projector().scale_re(wv.gamma);
        }
        let residual = sum.max_abs_diff(&ComplexMatrix::identity(d * d));
        if residual > tol::t::<T>(tol::COMPLETENESS) {
            return Err(Error::InvalidParameter(format!(
                "measurement vectors violate completeness (residual {})",
                residual.to_f64_lossy()
            )));
        }
        Ok(Self {
            d,
            resource,
            measurement,
        })
    }

    /// The original four-outcome Bell scheme: resource `(|01> + |10>)/√2`,
    /// measurement vectors `ψ±`, `φ±` with `γ_i = 1`.
    pub fn bell() -> Self {
        let amp = T::from_f64_lossy(0.5f64.sqrt());
        let bell_vec = |i: usize, j: usize, sign: T| {
            let mut amps = vec![czero::<T>(); 4];
            amps[i] = Complex::new(amp, T::zero());
            amps[j] = Complex::new(sign * amp, T::zero());
            StateVector::from_normalized_unchecked(amps)
        };
        let resource = bell_vec(1, 2, T::one()); // (|01> + |10>)/√2
        let measurement = vec![
            WeightedVector { gamma: T::one(), vector: bell_vec(1, 2, T::one()) }, // ψ+
            WeightedVector { gamma: T::one(), vector: bell_vec(1, 2, -T::one()) }, // ψ−
            WeightedVector { gamma: T::one(), vector: bell_vec(0, 3, T::one()) }, // φ+
            WeightedVector { gamma: T::one(), vector: bell_vec(0, 3, -T::one()) }, // φ−
        ];
        Self::new(2, resource, measurement).expect("Bell scheme is complete")
    }

    /// Generalized scheme in dimension `d`: resource `(1/√d) Σ_j |j>|j>` and
    /// the d² shift-and-phase (generalized Bell) measurement vectors
    /// `(1/√d) Σ_j ω^{aj} |j⊕b>|j>`, ordered lexicographically in `(a, b)`.
    pub fn generalized(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter("local dimension must be at least 2".into()));
        }
        let inv_root = T::one() / T::from_usize(d).unwrap().sqrt();
        let mut amps = vec![czero::<T>(); d * d];
        for j in 0..d {
            amps[j * d + j] = Complex::new(inv_root, T::zero());
        }
        let resource = StateVector::from_normalized_unchecked(amps);

        let mut measurement = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                measurement.push(WeightedVector {
                    gamma: T::one(),
                    vector: generalized_bell_vector(d, a, b),
                });
            }
        }
        Self::new(d, resource, measurement)
    }

    /// Overcomplete scheme: `n/d²` generalized Bell bases, each rotated on
    /// system 1 by an independent Haar-random unitary drawn from `seed`, with
    /// equal weights `γ_i = d²/n`. Completeness holds exactly by
    /// construction. `n` must be a proper multiple of `d²`.
    pub fn overcomplete(d: usize, n: usize, seed: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter("local dimension must be at least 2".into()));
        }
        if n <= d * d {
            return Err(Error::InvalidParameter(format!(
                "overcomplete scheme needs n > d² = {}",
                d * d
            )));
        }
        if !n.is_multiple_of(d * d) {
            return Err(Error::Infeasible(format!(
                "cannot mix whole rotated bases into n = {n} vectors; n must be a multiple of d² = {}",
                d * d
            )));
        }
        let copies = n / (d * d);
        let weight = T::one() / T::from_usize(copies).unwrap();
        let mut rng = rng_from_seed(seed);

        let inv_root = T::one() / T::from_usize(d).unwrap().sqrt();
        let mut amps = vec![czero::<T>(); d * d];
        for j in 0..d {
            amps[j * d + j] = Complex::new(inv_root, T::zero());
        }
        let resource = StateVector::from_normalized_unchecked(amps);

        let mut measurement = Vec::with_capacity(n);
        for _ in 0..copies {
            let rot: ComplexMatrix<T> = random_unitary(d, &mut rng);
            for a in 0..d {
                for b in 0..d {
                    let base = generalized_bell_vector::<T>(d, a, b);
                    // Apply rot ⊗ I on the 1⊗2 indexing.
                    let mut out = vec![czero::<T>(); d * d];
                    for i1 in 0..d {
                        for i2 in 0..d {
                            let mut acc = czero::<T>();
                            for k in 0..d {
                                acc += rot[(i1, k)] * base.amplitudes()[k * d + i2];
                            }
                            out[i1 * d + i2] = acc;
                        }
                    }
                    measurement.push(WeightedVector {
                        gamma: weight,
                        vector: StateVector::from_normalized_unchecked(out),
                    });
                }
            }
        }
        Self::new(d, resource, measurement)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn resource(&self) -> &StateVector<T> {
        &self.resource
    }

    pub fn measurement(&self) -> &[WeightedVector<T>] {
        &self.measurement
    }

    pub fn outcome_count(&self) -> usize {
        self.measurement.len()
    }

    /// The operation induced on system 3 by outcome `i`:
    /// `A_i = √γ_i <P_i^{12}| U13 |s̃^{12}>`, computed by direct contraction.
    ///
    /// With the identity correspondence this reduces to
    /// `(A_i)_{c,a} = √γ_i Σ_v conj(P_i[a·d+v]) s[v·d+c]`.
    pub fn induced_operation(&self, i: usize) -> Result<IdealOperation<T>> {
        let wv = self.measurement.get(i).ok_or(Error::OutcomeIndex {
            index: i,
            len: self.measurement.len(),
        })?;
        let d = self.d;
        let root_gamma = Complex::new(wv.gamma.sqrt(), T::zero());
        let s = self.resource.amplitudes();
        let p = wv.vector.amplitudes();
        let a = ComplexMatrix::from_fn(d, d, |c, col| {
            let mut acc = czero::<T>();
            for v in 0..d {
                acc += p[col * d + v].conj() * s[v * d + c];
            }
            acc * root_gamma
        });
        IdealOperation::new(a)
    }

    /// Global three-system route for outcome `i` on input `rho1`:
    /// prepare `rho1 ⊗ |s><s|`, project with `γ_i Π_i ⊗ I`, trace out 1,2.
    /// Returns the unnormalized target state and its trace (the outcome
    /// probability).
    pub fn simulate_outcome(
        &self,
        i: usize,
        rho1: &DensityMatrix<T>,
    ) -> Result<(ComplexMatrix<T>, T)> {
        let wv = self.measurement.get(i).ok_or(Error::OutcomeIndex {
            index: i,
            len: self.measurement.len(),
        })?;
        let d = self.d;
        if rho1.dim() != d {
            return Err(Error::Shape(format!("input state must have dimension {d}")));
        }
        let global = rho1.matrix().tensor(&self.resource.projector());
        let proj = wv.vector.projector().tensor(&ComplexMatrix::identity(d));
        let projected = proj.matmul(&global)?.matmul(&proj)?.scale_re(wv.gamma);
        let reduced = projected.partial_trace(&[d, d, d], &[2])?;
        let prob = reduced.trace().re;
        Ok((reduced, prob))
    }

    /// Decide whether the scheme teleports, by running the reversibility
    /// check on every induced operation over the full target space.
    ///
    /// Probabilities are the trace-mean estimates `tr(A_i†A_i)/d` for every
    /// outcome (equal to `p_i` when the scheme is valid); corrections are
    /// present only for valid schemes and are phase-normalized so their
    /// first significant column entry is positive real.
    pub fn verify(&self, tol_accept: T) -> Result<SchemeVerdict<T>> {
        let full = Subspace::full(self.d);
        let mut probabilities = Vec::with_capacity(self.measurement.len());
        let mut violations = Vec::new();
        let mut corrections = Vec::with_capacity(self.measurement.len());
        let mut valid = true;
        for i in 0..self.measurement.len() {
            let op = self.induced_operation(i)?;
            let report = check_condition2(&op, &full, tol_accept)?;
            probabilities.push(report.mu_squared);
            if report.accepted {
                if valid {
                    let cert = construct_reversal(&op, &full, tol_accept)?;
                    corrections.push(normalize_phase(cert.reversing_unitary));
                }
            } else {
                valid = false;
                violations.push(Violation {
                    outcome: Some(i),
                    kind: ViolationKind::ProbabilityDependsOnInput,
                    magnitude: report.residual,
                });
            }
        }
        Ok(SchemeVerdict {
            valid,
            probabilities,
            corrections: if valid { Some(corrections) } else { None },
            violations,
        })
    }

    /// Schmidt-based characterization: resource and measurement-vector
    /// Schmidt spectra (all must equal `1/√d`), the probability law
    /// `p_i = γ_i/d²`, and the shared-system-2-basis canonical form checked
    /// through the coefficient-matrix relation `B_i A² B_i† = (p_i/γ_i) I`.
    pub fn characterize(&self, tol_accept: T) -> Result<SchemeCharacterization<T>> {
        let d = self.d;
        let inv_root = T::one() / T::from_usize(d).unwrap().sqrt();
        let mut violations = Vec::new();

        let resource_schmidt = schmidt(&self.resource, d, d)?;
        let resource_coeffs = resource_schmidt.coefficients.clone();
        let resource_dev = resource_coeffs
            .iter()
            .map(|&a| (a - inv_root).abs())
            .fold(T::zero(), T::max);
        if resource_dev > tol_accept {
            violations.push(Violation {
                outcome: None,
                kind: ViolationKind::ResourceNotMaximallyEntangled,
                magnitude: resource_dev,
            });
        }

        let mut measurement_schmidt = Vec::with_capacity(self.measurement.len());
        for (i, wv) in self.measurement.iter().enumerate() {
            let sd = schmidt(&wv.vector, d, d)?;
            let dev = sd
                .coefficients
                .iter()
                .map(|&a| (a - inv_root).abs())
                .fold(T::zero(), T::max);
            if dev > tol_accept {
                violations.push(Violation {
                    outcome: Some(i),
                    kind: ViolationKind::MeasurementVectorNotMaximallyEntangled,
                    magnitude: dev,
                });
            }
            measurement_schmidt.push(sd.coefficients);
        }

        // Probability law p_i = γ_i/d², with p_i estimated as tr(A_i†A_i)/d.
        let d_sq = T::from_usize(d * d).unwrap();
        let mut probabilities = Vec::with_capacity(self.measurement.len());
        for i in 0..self.measurement.len() {
            let op = self.induced_operation(i)?;
            let gram = op.operator().adjoint().matmul(op.operator())?;
            let p_i = gram.trace().re / T::from_usize(d).unwrap();
            probabilities.push(p_i);
            let dev = (p_i - self.measurement[i].gamma / d_sq).abs();
            if dev > tol_accept {
                violations.push(Violation {
                    outcome: Some(i),
                    kind: ViolationKind::ProbabilityLawViolated,
                    magnitude: dev,
                });
            }
        }

        // Canonical form: expand each measurement vector over the
        // computational basis of 1 and the resource Schmidt basis of 2,
        // then test B_i A² B_i† = (p_i/γ_i) I.
        let alpha_sq = ComplexMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex::new(resource_coeffs[i] * resource_coeffs[i], T::zero())
            } else {
                czero()
            }
        });
        let mut canonical_residuals = Vec::with_capacity(self.measurement.len());
        for (i, wv) in self.measurement.iter().enumerate() {
            let b_i = ComplexMatrix::from_fn(d, d, |l, m| {
                let basis_2m = &resource_schmidt.left_basis[m];
                let mut acc = czero::<T>();
                for y in 0..d {
                    acc += basis_2m.amplitudes()[y].conj() * wv.vector.amplitudes()[l * d + y];
                }
                acc
            });
            let bab = b_i.matmul(&alpha_sq)?.matmul(&b_i.adjoint())?;
            let target = ComplexMatrix::identity(d).scale_re(probabilities[i] / wv.gamma);
            let residual = bab.max_abs_diff(&target);
            if residual > tol_accept {
                violations.push(Violation {
                    outcome: Some(i),
                    kind: ViolationKind::CanonicalFormViolated,
                    magnitude: residual,
                });
            }
            canonical_residuals.push(residual);
        }

        let k = probabilities
            .iter()
            .zip(self.measurement.iter())
            .map(|(&p, wv)| p / wv.gamma)
            .fold(T::zero(), |a, x| a + x)
            / T::from_usize(self.measurement.len()).unwrap();

        Ok(SchemeCharacterization {
            valid: violations.is_empty(),
            resource_schmidt: resource_coeffs,
            measurement_schmidt,
            probabilities,
            k,
            canonical_residuals,
            violations,
        })
    }
}

/// `(1/√d) Σ_j ω^{aj} |(j+b) mod d> ⊗ |j>` with `ω = e^{2πi/d}`.
fn generalized_bell_vector<T: Scalar>(d: usize, a: usize, b: usize) -> StateVector<T> {
    let inv_root = 1.0 / (d as f64).sqrt();
    let mut amps = vec![czero::<T>(); d * d];
    for j in 0..d {
        let angle = 2.0 * PI * (a * j) as f64 / d as f64;
        let idx = ((j + b) % d) * d + j;
        amps[idx] = Complex::from_polar(T::from_f64_lossy(inv_root), T::from_f64_lossy(angle));
    }
    StateVector::from_normalized_unchecked(amps)
}

/// Multiply by a global phase so the first significant entry (scanning
/// column-major) is positive real.
fn normalize_phase<T: Scalar>(u: ComplexMatrix<T>) -> ComplexMatrix<T> {
    let cutoff = T::from_f64_lossy(1e-9);
    for j in 0..u.cols() {
        for i in 0..u.rows() {
            let z = u[(i, j)];
            if z.norm() > cutoff {
                let phase = z.conj() / Complex::new(z.norm(), T::zero());
                return u.scale(phase);
            }
        }
    }
    u
}

/// Verdict of [`TeleportationScheme::verify`].
#[derive(Clone, Debug)]
pub struct SchemeVerdict<T: Scalar> {
    pub valid: bool,
    /// Per-outcome probability estimates `tr(A_i†A_i)/d`.
    pub probabilities: Vec<T>,
    /// Bob's correction unitaries, present exactly when the scheme is valid.
    pub corrections: Option<Vec<ComplexMatrix<T>>>,
    pub violations: Vec<Violation<T>>,
}

/// Report of [`TeleportationScheme::characterize`].
#[derive(Clone, Debug)]
pub struct SchemeCharacterization<T: Scalar> {
    pub valid: bool,
    /// Schmidt coefficients of the resource state (descending).
    pub resource_schmidt: Vec<T>,
    /// Schmidt coefficients of each measurement vector.
    pub measurement_schmidt: Vec<Vec<T>>,
    /// Per-outcome probability estimates.
    pub probabilities: Vec<T>,
    /// Mean of `p_i/γ_i`; equals `1/d²` for valid schemes.
    pub k: T,
    /// Max-norm residual of `B_i A² B_i† − (p_i/γ_i) I` per outcome.
    pub canonical_residuals: Vec<T>,
    pub violations: Vec<Violation<T>>,
}

/// One structured finding of a verdict or characterization.
#[derive(Clone, Debug)]
pub struct Violation<T: Scalar> {
    /// Outcome index, when the finding is outcome-specific.
    pub outcome: Option<usize>,
    pub kind: ViolationKind,
    pub magnitude: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// Condition 2/3 failed: `Pr(i)` varies over input states.
    ProbabilityDependsOnInput,
    ResourceNotMaximallyEntangled,
    MeasurementVectorNotMaximallyEntangled,
    /// `p_i` deviates from `γ_i/d²`.
    ProbabilityLawViolated,
    /// `B_i A² B_i†` is not `(p_i/γ_i) I`.
    CanonicalFormViolated,
}

impl ViolationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ProbabilityDependsOnInput => "probability-depends-on-input",
            Self::ResourceNotMaximallyEntangled => "resource-not-maximally-entangled",
            Self::MeasurementVectorNotMaximallyEntangled => {
                "measurement-vector-not-maximally-entangled"
            }
            Self::ProbabilityLawViolated => "probability-law-violated",
            Self::CanonicalFormViolated => "canonical-form-violated",
        }
    }
}

/// Induced operation on system 3 for a general (possibly mixed) resource on
/// 2⊗3 and a general measurement outcome on 1⊗2.
///
/// Builds the raw Kraus family
/// `B_{jkl} = √p_k <P_l^{12}| (A_j^{12} ⊗ I³) U13 |s̃_k^{12}>` over the
/// eigen-decomposition `σ̃^{12} = Σ_k p_k |s̃_k><s̃_k|` and the computational
/// basis `{|P_l>}`, then reduces it to the canonical minimal Kraus set via
/// the eigenvectors of its Choi matrix (the channel action is unchanged).
pub fn induced_general_operation<T: Scalar>(
    resource: &DensityMatrix<T>,
    outcome: &QuantumOperation<T>,
) -> Result<QuantumOperation<T>> {
    let d_sq = resource.dim();
    let d = (d_sq as f64).sqrt().round() as usize;
    if d * d != d_sq || outcome.dim() != d_sq {
        return Err(Error::Shape(
            "resource and outcome must share a d² dimension for integer d".into(),
        ));
    }

    // Counterpart σ̃^{12} of σ^{23} under the identity correspondence:
    // σ̃[(c,b),(c',b')] = σ[(b,c),(b',c')].
    let sigma = resource.matrix();
    let sigma_tilde = ComplexMatrix::from_fn(d_sq, d_sq, |row, col| {
        let (c1, b1) = (row / d, row % d);
        let (c2, b2) = (col / d, col % d);
        sigma[(b1 * d + c1, b2 * d + c2)]
    });
    let (p_vals, p_vecs) = eig_hermitian(&sigma_tilde)?;

    let floor = tol::t::<T>(tol::ZERO_PROBABILITY);
    let mut raw: Vec<ComplexMatrix<T>> = Vec::new();
    for (k, &p_k) in p_vals.iter().enumerate() {
        if p_k <= floor {
            continue;
        }
        let root_p = Complex::new(p_k.sqrt(), T::zero());
        let s_k = p_vecs.column(k);
        for a_j in outcome.kraus() {
            for l in 0..d_sq {
                let b = ComplexMatrix::from_fn(d, d, |c, col| {
                    let mut acc = czero::<T>();
                    for v in 0..d {
                        acc += a_j[(l, col * d + v)] * s_k[c * d + v];
                    }
                    acc * root_p
                });
                raw.push(b);
            }
        }
    }

    // Canonical reduction through the Choi matrix of the Kraus family.
    let mut choi = ComplexMatrix::zeros(d_sq, d_sq);
    for b in &raw {
        for r1 in 0..d_sq {
            for r2 in 0..d_sq {
                let x = b[(r1 / d, r1 % d)];
                let y = b[(r2 / d, r2 % d)];
                choi[(r1, r2)] += x * y.conj();
            }
        }
    }
    let (vals, vecs) = eig_hermitian(&choi)?;
    let cutoff = vals
        .first()
        .copied()
        .unwrap_or(T::zero())
        .max(T::one())
        * tol::t::<T>(1e-12);
    let mut kraus = Vec::new();
    for (idx, &lam) in vals.iter().enumerate() {
        if lam <= cutoff {
            continue;
        }
        let col = vecs.column(idx);
        let root = Complex::new(lam.sqrt(), T::zero());
        kraus.push(ComplexMatrix::from_fn(d, d, |i, j| col[i * d + j] * root));
    }
    if kraus.is_empty() {
        return Err(Error::ZeroProbability);
    }
    QuantumOperation::new(kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::pure_fidelity;
    use crate::random::{random_density, random_state_vector, random_onb_containing};
    use crate::scalar::c;

    type M = ComplexMatrix<f64>;

    const TOL: f64 = 1e-8;

    #[test]
    fn swap_permutes_product_basis() {
        let u: M = swap_operator(2);
        // |0>|1>|1> (index 0*4+1*2+1 = 3) -> |1>|1>|0> (index 1*4+1*2+0 = 6).
        assert!((u[(6, 3)].re - 1.0).abs() < 1e-15);
        assert!((u[(3, 6)].re - 1.0).abs() < 1e-15);
        // Self-inverse and Hermitian.
        let sq = u.matmul(&u).unwrap();
        assert!(sq.max_abs_diff(&M::identity(8)) < 1e-12);
        assert!(u.adjoint().max_abs_diff(&u) < 1e-15);
    }

    // Permutation-of-indices oracle for U13 (ρ̃¹ ⊗ σ²³) U13† = σ̃¹² ⊗ ρ³.
    #[test]
    fn swap_converts_resource_factorization() {
        let d = 2usize;
        let mut rng = rng_from_seed(60);
        let rho = random_density::<f64, _>(d, 2, &mut rng);
        let sigma = random_density::<f64, _>(d * d, 2, &mut rng);
        let u: M = swap_operator(d);

        let global = rho.matrix().tensor(sigma.matrix());
        let swapped = u.matmul(&global).unwrap().matmul(&u.adjoint()).unwrap();

        // Oracle: permute indices directly. Index (i1,i2,i3) of the swapped
        // operator equals global index (i3,i2,i1).
        let dim = d * d * d;
        let perm = |idx: usize| -> usize {
            let (i1, rest) = (idx / (d * d), idx % (d * d));
            let (i2, i3) = (rest / d, rest % d);
            i3 * d * d + i2 * d + i1
        };
        let oracle = M::from_fn(dim, dim, |r, c| global[(perm(r), perm(c))]);
        assert!(swapped.max_abs_diff(&oracle) < 1e-12);

        // And the right-hand side is σ̃¹² ⊗ ρ³ with σ̃ the reshuffled σ.
        let sigma_tilde = M::from_fn(d * d, d * d, |row, col| {
            let (c1, b1) = (row / d, row % d);
            let (c2, b2) = (col / d, col % d);
            sigma.matrix()[(b1 * d + c1, b2 * d + c2)]
        });
        let rhs = sigma_tilde.tensor(rho.matrix());
        assert!(swapped.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn bell_scheme_outcomes_induce_scaled_paulis() {
        let scheme = TeleportationScheme::<f64>::bell();
        // Outcome ψ+ (the resource itself) induces I/2.
        let a0 = scheme.induced_operation(0).unwrap();
        assert!(a0.operator().max_abs_diff(&M::identity(2).scale_re(0.5)) < 1e-12);
        // ψ− induces Z/2, φ+ induces X/2, φ− induces (|1><0| − |0><1|)/2.
        let z = M::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let x = M::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let xz = x.matmul(&z).unwrap();
        assert!(scheme
            .induced_operation(1)
            .unwrap()
            .operator()
            .max_abs_diff(&z.scale_re(0.5))
            < 1e-12);
        assert!(scheme
            .induced_operation(2)
            .unwrap()
            .operator()
            .max_abs_diff(&x.scale_re(0.5))
            < 1e-12);
        assert!(scheme
            .induced_operation(3)
            .unwrap()
            .operator()
            .phase_aligned_distance(&xz.scale_re(0.5))
            < 1e-12);
        // Norm: ||A|| = 1/2 for every outcome.
        for i in 0..4 {
            let op = scheme.induced_operation(i).unwrap();
            let gram = op.operator().adjoint().matmul(op.operator()).unwrap();
            assert!(gram.max_abs_diff(&M::identity(2).scale_re(0.25)) < 1e-12);
        }
    }

    #[test]
    fn bell_scheme_verifies_with_quarter_probabilities() {
        let scheme = TeleportationScheme::<f64>::bell();
        let verdict = scheme.verify(TOL).unwrap();
        assert!(verdict.valid);
        for &p in &verdict.probabilities {
            assert!((p - 0.25).abs() < 1e-12);
        }
        let corrections = verdict.corrections.unwrap();
        let z = M::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let x = M::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let xz = x.matmul(&z).unwrap();
        let expects = [M::identity(2), z, x, xz];
        for (u, e) in corrections.iter().zip(expects.iter()) {
            assert!(u.phase_aligned_distance(e) < 1e-9);
        }
    }

    // Explicit index-contraction oracle for the induced operation, plus the
    // global-simulation cross-check on random schemes.
    #[test]
    fn induced_operation_matches_global_simulation() {
        let mut rng = rng_from_seed(61);
        for trial in 0..10u64 {
            let d = 2 + (trial as usize) % 2;
            let scheme = random_valid_scheme(d, 62 + trial);
            let rho = random_density::<f64, _>(d, d.min(2), &mut rng);
            for i in 0..scheme.outcome_count().min(3) {
                let op = scheme.induced_operation(i).unwrap();
                let (direct, w) = op.as_operation().apply(&rho).unwrap();
                let (global, prob) = scheme.simulate_outcome(i, &rho).unwrap();
                assert!(direct.max_abs_diff(&global) < 1e-9, "d={d} outcome {i}");
                assert!((w - prob).abs() < 1e-10);
            }
        }
    }

    // Independent route for A_i: build |s̃^{12}> from the correspondence,
    // apply the full d³ swap matrix, and contract <P_i ⊗ c| · |s̃ ⊗ a>
    // entry by entry.
    fn induced_via_swap_matrices(scheme: &TeleportationScheme<f64>, i: usize) -> M {
        let d = scheme.d();
        let s = scheme.resource().amplitudes();
        let wv = &scheme.measurement()[i];
        let p = wv.vector.amplitudes();
        let u: M = swap_operator(d);
        // s̃[u*d + v] = s[v*d + u] under the identity correspondence.
        let mut out = M::zeros(d, d);
        for c_idx in 0..d {
            for a_idx in 0..d {
                let mut acc = c(0.0, 0.0);
                for x in 0..d {
                    for y in 0..d {
                        for uu in 0..d {
                            for vv in 0..d {
                                let bra = x * d * d + y * d + c_idx;
                                let ket = uu * d * d + vv * d + a_idx;
                                acc += p[x * d + y].conj()
                                    * u[(bra, ket)]
                                    * s[vv * d + uu];
                            }
                        }
                    }
                }
                out[(c_idx, a_idx)] = acc * c(wv.gamma.sqrt(), 0.0);
            }
        }
        out
    }

    #[test]
    fn induced_operation_matches_explicit_swap_contraction() {
        let bell = TeleportationScheme::<f64>::bell();
        for i in 0..4 {
            let fast = bell.induced_operation(i).unwrap();
            let oracle = induced_via_swap_matrices(&bell, i);
            assert!(fast.operator().max_abs_diff(&oracle) < 1e-12, "outcome {i}");
        }

        // Product resource |00> with a completed projective basis: the
        // induced operator is rank 1, not proportional to a unitary.
        let scheme = product_resource_scheme();
        let op = scheme.induced_operation(2).unwrap();
        let oracle = induced_via_swap_matrices(&scheme, 2);
        assert!(op.operator().max_abs_diff(&oracle) < 1e-12);
        let (_, s, _) = crate::qmat::svd(op.operator());
        assert!(s[0] > 1e-6, "nonzero operator");
        assert!(s[1] < 1e-12, "rank 1");
    }

    fn random_valid_scheme(d: usize, seed: u64) -> TeleportationScheme<f64> {
        // Rotate the generalized scheme by local unitaries on systems 1 and 2
        // (measurement) and 2 and 3 (resource), keeping validity.
        let base = TeleportationScheme::<f64>::generalized(d).unwrap();
        let mut rng = rng_from_seed(seed);
        let u2: M = random_unitary(d, &mut rng);
        let u3: M = random_unitary(d, &mut rng);
        let rot23 = u2.tensor(&u3);
        let resource = StateVector::new(base.resource().apply(&rot23).unwrap()).unwrap();
        let u1: M = random_unitary(d, &mut rng);
        let rot12 = u1.tensor(&u2.conjugate());
        let measurement = base
            .measurement()
            .iter()
            .map(|wv| WeightedVector {
                gamma: wv.gamma,
                vector: StateVector::new(wv.vector.apply(&rot12).unwrap()).unwrap(),
            })
            .collect();
        TeleportationScheme::new(d, resource, measurement).unwrap()
    }

    #[test]
    fn random_rotated_schemes_stay_valid() {
        for d in 2..=3usize {
            let scheme = random_valid_scheme(d, 70 + d as u64);
            let verdict = scheme.verify(TOL).unwrap();
            assert!(verdict.valid, "rotated scheme d={d}");
            let expect = 1.0 / (d * d) as f64;
            for &p in &verdict.probabilities {
                assert!((p - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn product_resource_scheme_is_invalid_everywhere() {
        let scheme = product_resource_scheme();
        let verdict = scheme.verify(TOL).unwrap();
        assert!(!verdict.valid);
        assert!(verdict.corrections.is_none());
        // Every outcome must be flagged with a Pr-spread violation.
        assert_eq!(verdict.violations.len(), 4);
        for v in &verdict.violations {
            assert_eq!(v.kind, ViolationKind::ProbabilityDependsOnInput);
            assert!(v.magnitude > TOL);
        }

        let report = scheme.characterize(TOL).unwrap();
        assert!(!report.valid);
        assert!((report.resource_schmidt[0] - 1.0).abs() < 1e-12);
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::ResourceNotMaximallyEntangled));
    }

    fn product_resource_scheme() -> TeleportationScheme<f64> {
        // Bell measurement, but the resource is the product state |00>.
        let bell = TeleportationScheme::<f64>::bell();
        TeleportationScheme::new(
            2,
            StateVector::basis(4, 0),
            bell.measurement().to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn generalized_scheme_block() {
        for d in 2..=4usize {
            let scheme = TeleportationScheme::<f64>::generalized(d).unwrap();
            assert_eq!(scheme.outcome_count(), d * d);
            let verdict = scheme.verify(TOL).unwrap();
            assert!(verdict.valid, "generalized d={d}");
            let expect = 1.0 / (d * d) as f64;
            for &p in &verdict.probabilities {
                assert!((p - expect).abs() < 1e-10);
            }
            let report = scheme.characterize(TOL).unwrap();
            assert!(report.valid);
            let inv_root = 1.0 / (d as f64).sqrt();
            for &a in &report.resource_schmidt {
                assert!((a - inv_root).abs() < 1e-10);
            }
            for coeffs in &report.measurement_schmidt {
                for &a in coeffs {
                    assert!((a - inv_root).abs() < 1e-10);
                }
            }
            assert!((report.k - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn generalized_d3_gram_matrix_is_identity() {
        let scheme = TeleportationScheme::<f64>::generalized(3).unwrap();
        let vs = scheme.measurement();
        assert_eq!(vs.len(), 9);
        for i in 0..9 {
            for j in 0..9 {
                let overlap = vs[i].vector.inner(&vs[j].vector).norm();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((overlap - expect).abs() < 1e-12, "({i},{j})");
            }
        }
        let mut sum = M::zeros(9, 9);
        for wv in vs {
            sum = &sum + &wv.vector.projector().scale_re(wv.gamma);
        }
        assert!(sum.max_abs_diff(&M::identity(9)) < 1e-10, "completeness");
    }

    #[test]
    fn generalized_d3_teleports_end_to_end() {
        let scheme = TeleportationScheme::<f64>::generalized(3).unwrap();
        let verdict = scheme.verify(TOL).unwrap();
        let corrections = verdict.corrections.as_ref().unwrap();
        let mut rng = rng_from_seed(68);
        for _ in 0..10 {
            let psi = random_state_vector::<f64, _>(3, &mut rng);
            let rho = DensityMatrix::from_pure(&psi);
            for (i, u) in corrections.iter().enumerate() {
                let (reduced, prob) = scheme.simulate_outcome(i, &rho).unwrap();
                assert!((prob - 1.0 / 9.0).abs() < 1e-10);
                let back = u
                    .matmul(&reduced.scale_re(1.0 / prob))
                    .unwrap()
                    .matmul(&u.adjoint())
                    .unwrap();
                let f = psi
                    .apply(&back)
                    .unwrap()
                    .iter()
                    .zip(psi.amplitudes())
                    .map(|(b, a)| (a.conj() * b).re)
                    .sum::<f64>();
                assert!(f >= 1.0 - 1e-9, "outcome {i} fidelity {f}");
            }
        }
    }

    // A complete measurement made of product vectors: completeness holds,
    // but no vector is entangled, so characterize flags every outcome and
    // verify rejects.
    #[test]
    fn product_measurement_vectors_are_flagged() {
        let resource = TeleportationScheme::<f64>::generalized(2)
            .unwrap()
            .resource()
            .clone();
        let measurement: Vec<WeightedVector<f64>> = (0..4)
            .map(|k| WeightedVector {
                gamma: 1.0,
                vector: StateVector::basis(4, k),
            })
            .collect();
        let scheme = TeleportationScheme::new(2, resource, measurement).unwrap();
        let verdict = scheme.verify(TOL).unwrap();
        assert!(!verdict.valid);
        let report = scheme.characterize(TOL).unwrap();
        assert!(!report.valid);
        let flagged: Vec<usize> = report
            .violations
            .iter()
            .filter(|v| v.kind == ViolationKind::MeasurementVectorNotMaximallyEntangled)
            .filter_map(|v| v.outcome)
            .collect();
        assert_eq!(flagged, vec![0, 1, 2, 3]);
    }

    #[test]
    fn generalized_d2_matches_bell_up_to_phases() {
        let gen = TeleportationScheme::<f64>::generalized(2).unwrap();
        let bell = TeleportationScheme::<f64>::bell();
        // Every generalized vector matches some Bell vector up to phase.
        for gv in gen.measurement() {
            let gm = gv.vector.as_column();
            let matched = bell.measurement().iter().any(|bv| {
                gm.phase_aligned_distance(&bv.vector.as_column()) < 1e-12
            });
            assert!(matched);
        }
    }

    #[test]
    fn bell_scheme_end_to_end_teleports() {
        let scheme = TeleportationScheme::<f64>::bell();
        let verdict = scheme.verify(TOL).unwrap();
        let corrections = verdict.corrections.as_ref().unwrap();
        let mut rng = rng_from_seed(63);
        for _ in 0..20 {
            let psi = random_state_vector::<f64, _>(2, &mut rng);
            let rho = DensityMatrix::from_pure(&psi);
            for (i, u) in corrections.iter().enumerate() {
                let (reduced, prob) = scheme.simulate_outcome(i, &rho).unwrap();
                assert!((prob - 0.25).abs() < 1e-10);
                let normalized = reduced.scale_re(1.0 / prob);
                let restored = u.matmul(&normalized).unwrap().matmul(&u.adjoint()).unwrap();
                let f = pure_fidelity(&psi, &DensityMatrix::from_unit_trace_unchecked(restored))
                    .unwrap();
                assert!(f >= 1.0 - 1e-9, "outcome {i} fidelity {f}");
            }
        }
    }

    #[test]
    fn overcomplete_scheme_two_bases() {
        let scheme = TeleportationScheme::<f64>::overcomplete(2, 8, 7).unwrap();
        assert_eq!(scheme.outcome_count(), 8);
        for wv in scheme.measurement() {
            assert!((wv.gamma - 0.5).abs() < 1e-15);
        }
        let gamma_sum: f64 = scheme.measurement().iter().map(|wv| wv.gamma).sum();
        assert!((gamma_sum - 4.0).abs() < 1e-12, "trace identity Σγ = d²");
        let verdict = scheme.verify(TOL).unwrap();
        assert!(verdict.valid);
        for (p, wv) in verdict.probabilities.iter().zip(scheme.measurement()) {
            assert!((p - wv.gamma / 4.0).abs() < 1e-10);
        }
        let total: f64 = verdict.probabilities.iter().sum();
        assert!((total - 1.0).abs() < 1e-10);

        assert!(matches!(
            TeleportationScheme::<f64>::overcomplete(2, 5, 0),
            Err(Error::Infeasible(_))
        ));
        assert!(TeleportationScheme::<f64>::overcomplete(2, 4, 0).is_err());
    }

    // Hand-built 5-vector overcomplete scheme with unequal weights: identity
    // with γ = 1 plus the four tetrahedral π-rotations with γ = 3/4; the
    // weighted directions satisfy Σ q_i n_i n_iᵀ = I/4, which makes the
    // vectorized set complete.
    #[test]
    fn unequal_weight_overcomplete_scheme_verifies() {
        let d = 2usize;
        let tetra = [
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ];
        let x = M::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let y = M::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(0.0, -1.0),
            (1, 0) => c(0.0, 1.0),
            _ => c(0.0, 0.0),
        });
        let z = M::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let mut unitaries = vec![(1.0f64, M::identity(2))];
        for n in tetra {
            let norm = 3.0f64.sqrt();
            // π rotation about n̂: i(n̂·σ) is unitary.
            let ns = &(&x.scale_re(n[0] / norm) + &y.scale_re(n[1] / norm))
                + &z.scale_re(n[2] / norm);
            unitaries.push((0.75, ns.scale(c(0.0, 1.0))));
        }
        let inv_root = 0.5f64.sqrt();
        let measurement: Vec<WeightedVector<f64>> = unitaries
            .iter()
            .map(|(gamma, w)| {
                // |P> = (W ⊗ I)(1/√d)Σ|j>|j> has amplitudes W[i1,i2]/√d.
                let mut amps = vec![c(0.0, 0.0); 4];
                for i1 in 0..d {
                    for i2 in 0..d {
                        amps[i1 * d + i2] = w[(i1, i2)] * c(inv_root, 0.0);
                    }
                }
                WeightedVector {
                    gamma: *gamma,
                    vector: StateVector::new(amps).unwrap(),
                }
            })
            .collect();
        let resource = TeleportationScheme::<f64>::generalized(2).unwrap().resource().clone();
        let scheme = TeleportationScheme::new(2, resource, measurement).unwrap();
        let verdict = scheme.verify(TOL).unwrap();
        assert!(verdict.valid);
        for (p, wv) in verdict.probabilities.iter().zip(scheme.measurement()) {
            assert!((p - wv.gamma / 4.0).abs() < 1e-10, "p_i = γ_i/4");
        }
    }

    #[test]
    fn induced_general_reduces_to_ideal_for_pure_resource() {
        let mut rng = rng_from_seed(64);
        for trial in 0..10u64 {
            let d = 2usize;
            // Random pure resource (not necessarily entangled) and a random
            // rank-1 projector outcome completed into an orthonormal basis.
            let resource_vec = random_state_vector::<f64, _>(d * d, &mut rng);
            let v = random_state_vector::<f64, _>(d * d, &mut rng);
            let basis = random_onb_containing(&v, &mut rng);
            let gamma = 1.0f64;
            let measurement: Vec<WeightedVector<f64>> = basis
                .iter()
                .map(|b| WeightedVector {
                    gamma,
                    vector: b.clone(),
                })
                .collect();
            let scheme =
                TeleportationScheme::new(d, resource_vec.clone(), measurement).unwrap();
            let ideal = scheme.induced_operation(0).unwrap();

            let resource_dm = DensityMatrix::from_pure(&resource_vec);
            let outcome_op = QuantumOperation::new(vec![v.projector()]).unwrap();
            let general = induced_general_operation(&resource_dm, &outcome_op).unwrap();
            assert_eq!(general.kraus().len(), 1, "trial {trial}: canonical Kraus");
            assert!(
                general.kraus()[0].phase_aligned_distance(ideal.operator()) < 1e-9,
                "trial {trial}"
            );
        }
    }

    #[test]
    fn induced_general_with_maximally_mixed_resource_depolarizes() {
        let d = 2usize;
        let resource = DensityMatrix::maximally_mixed(d * d);
        let bell_proj = TeleportationScheme::<f64>::bell().measurement()[0]
            .vector
            .projector();
        let outcome = QuantumOperation::new(vec![bell_proj]).unwrap();
        let op = induced_general_operation(&resource, &outcome).unwrap();
        // Output is I/(2·4) · tr(ρ) no matter the input.
        let mut rng = rng_from_seed(65);
        for _ in 0..5 {
            let rho = random_density::<f64, _>(d, 2, &mut rng);
            let (out, w) = op.apply(&rho).unwrap();
            assert!(out.max_abs_diff(&M::identity(2).scale_re(w / 2.0)) < 1e-10);
        }
    }

    #[test]
    fn induced_general_matches_global_oracle_for_mixed_resources() {
        let mut rng = rng_from_seed(66);
        let d = 2usize;
        for _ in 0..5 {
            let resource = random_density::<f64, _>(d * d, 3, &mut rng);
            // Random sub-unitary outcome on 1⊗2 (one Kraus, contraction).
            let a = random_unitary::<f64, _>(d * d, &mut rng).scale_re(0.8);
            let outcome = QuantumOperation::new(vec![a.clone()]).unwrap();
            let induced = induced_general_operation(&resource, &outcome).unwrap();

            let rho = random_density::<f64, _>(d, 2, &mut rng);
            let (direct, w) = induced.apply(&rho).unwrap();

            // Global oracle: apply A on systems 1,2 of ρ̃¹ ⊗ σ²³, trace out 1,2.
            let global_in = rho.matrix().tensor(resource.matrix());
            let big_a = a.tensor(&M::identity(d));
            let projected = big_a
                .matmul(&global_in)
                .unwrap()
                .matmul(&big_a.adjoint())
                .unwrap();
            let oracle = projected.partial_trace(&[d, d, d], &[2]).unwrap();
            assert!(direct.max_abs_diff(&oracle) < 1e-9);
            assert!((w - oracle.trace().re).abs() < 1e-10);
        }
    }

    #[test]
    fn correspondence_relabeling_preserves_verdict_and_probabilities() {
        let d = 2usize;
        let scheme = TeleportationScheme::<f64>::bell();
        let mut rng = rng_from_seed(67);
        let w: M = random_unitary(d, &mut rng);
        // Relabeling the 1<->3 correspondence by W is equivalent to replacing
        // every measurement vector by (W† ⊗ I)|P_i>.
        let rot = w.adjoint().tensor(&M::identity(d));
        let measurement: Vec<WeightedVector<f64>> = scheme
            .measurement()
            .iter()
            .map(|wv| WeightedVector {
                gamma: wv.gamma,
                vector: StateVector::new(wv.vector.apply(&rot).unwrap()).unwrap(),
            })
            .collect();
        let relabeled =
            TeleportationScheme::new(d, scheme.resource().clone(), measurement).unwrap();
        let v1 = scheme.verify(TOL).unwrap();
        let v2 = relabeled.verify(TOL).unwrap();
        assert_eq!(v1.valid, v2.valid);
        for (a, b) in v1.probabilities.iter().zip(v2.probabilities.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
        // Corrections compose with the relabeling: U'_i = W†·U_i up to phase.
        let c1 = v1.corrections.unwrap();
        let c2 = v2.corrections.unwrap();
        for (u1, u2) in c1.iter().zip(c2.iter()) {
            let composed = w.adjoint().matmul(u1).unwrap();
            assert!(u2.phase_aligned_distance(&composed) < 1e-9);
        }
    }

    #[test]
    fn scheme_validation_rejects_incomplete_sets() {
        let bell = TeleportationScheme::<f64>::bell();
        let mut partial = bell.measurement().to_vec();
        partial.pop();
        assert!(TeleportationScheme::new(2, bell.resource().clone(), partial).is_err());
    }
}
