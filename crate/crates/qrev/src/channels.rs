//! Quantum operations in Kraus form, generalized measurements, and POVMs.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qmat::{eig_hermitian, matrix_sqrt_psd, ComplexMatrix, StateVector};
use crate::random::rng_from_seed;
use crate::scalar::Scalar;
use crate::tol;

/// Positive, unit-trace operator: the state of a (possibly mixed) system.
#[derive(Clone, Debug)]
pub struct DensityMatrix<T: Scalar> {
    matrix: ComplexMatrix<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Validate Hermiticity (1e-9), positivity (eigenvalues >= -1e-10), and
    /// unit trace (1e-10).
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape("density matrix must be square".into()));
        }
        let dev = matrix.hermiticity_deviation();
        if dev > tol::t::<T>(tol::HERMITIAN) {
            return Err(Error::NotHermitian {
                deviation: dev.to_f64_lossy(),
            });
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > tol::t::<T>(tol::TRACE_ONE)
            || tr.im.abs() > tol::t::<T>(tol::TRACE_ONE)
        {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {} is not 1",
                tr.re.to_f64_lossy()
            )));
        }
        let (vals, _) = eig_hermitian(&matrix)?;
        if let Some(&min) = vals.last() {
            if min < tol::t::<T>(tol::PSD_FLOOR) {
                return Err(Error::NotPsd {
                    min_eigenvalue: min.to_f64_lossy(),
                });
            }
        }
        Ok(Self { matrix })
    }

    /// Pure state `|psi><psi|`.
    pub fn from_pure(psi: &StateVector<T>) -> Self {
        Self {
            matrix: psi.projector(),
        }
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_re(T::one() / T::from_usize(dim).unwrap()),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub(crate) fn from_unit_trace_unchecked(matrix: ComplexMatrix<T>) -> Self {
        Self { matrix }
    }
}

/// Pure-state overlap `<psi| rho |psi>`.
pub fn pure_fidelity<T: Scalar>(psi: &StateVector<T>, rho: &DensityMatrix<T>) -> Result<T> {
    let image = psi.apply(rho.matrix())?;
    let overlap = psi
        .amplitudes()
        .iter()
        .zip(image.iter())
        .map(|(a, b)| a.conj() * *b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z);
    Ok(overlap.re)
}

/// Uhlmann fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
///
/// Coincides with `pure_fidelity` when either argument is pure, and equals 1
/// exactly when the states coincide.
pub fn fidelity<T: Scalar>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Shape("fidelity of states with different dimensions".into()));
    }
    let root = matrix_sqrt_psd(rho.matrix())?;
    let inner = root.matmul(sigma.matrix())?.matmul(&root)?;
    // inner is PSD up to roundoff; sum the square roots of its spectrum,
    // flooring eigenvalues at the noise scale so sqrt does not amplify
    // roundoff on the null space.
    let (vals, _) = eig_hermitian(&inner)?;
    let floor = vals[0].max(T::zero()) * T::epsilon() * T::from_usize(vals.len()).unwrap();
    let total: T = vals
        .iter()
        .map(|&l| if l > floor { l.sqrt() } else { T::zero() })
        .fold(T::zero(), |a, x| a + x);
    Ok(total * total)
}

/// General quantum operation `E(rho) = Σ_j A_j rho A_j†` given by its Kraus
/// operators, constrained by `Σ_j A_j† A_j <= I`.
#[derive(Clone, Debug)]
pub struct QuantumOperation<T: Scalar> {
    kraus: Vec<ComplexMatrix<T>>,
}

impl<T: Scalar> QuantumOperation<T> {
    pub fn new(kraus: Vec<ComplexMatrix<T>>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidParameter("operation needs at least one Kraus operator".into()));
        }
        let dim = kraus[0].rows();
        if kraus.iter().any(|k| !k.is_square() || k.rows() != dim) {
            return Err(Error::Shape("Kraus operators must share one square dimension".into()));
        }
        let op = Self { kraus };
        let e = op.povm_matrix();
        let (vals, _) = eig_hermitian(&e)?;
        if vals[0] > T::one() + tol::t::<T>(tol::ENTRY) {
            return Err(Error::InvalidParameter(format!(
                "Kraus operators violate Σ A†A <= I (max eigenvalue {})",
                vals[0].to_f64_lossy()
            )));
        }
        Ok(op)
    }

    pub fn kraus(&self) -> &[ComplexMatrix<T>] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].rows()
    }

    /// The POVM matrix `Σ_j A_j† A_j` without wrapping.
    pub fn povm_matrix(&self) -> ComplexMatrix<T> {
        let dim = self.dim();
        let mut e = ComplexMatrix::zeros(dim, dim);
        for k in &self.kraus {
            e = &e + &k.adjoint().matmul(k).expect("square");
        }
        e
    }

    /// POVM element of this operation, `E = Σ_j A_j† A_j`.
    pub fn povm_element(&self) -> PovmElement<T> {
        PovmElement {
            e: self.povm_matrix(),
        }
    }

    /// Apply to a state: returns the unnormalized output `Σ A_j rho A_j†`
    /// and its trace (the probability weight).
    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<(ComplexMatrix<T>, T)> {
        if rho.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "operation dim {} does not match state dim {}",
                self.dim(),
                rho.dim()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for k in &self.kraus {
            let term = k.matmul(rho.matrix())?.matmul(&k.adjoint())?;
            out = &out + &term;
        }
        let weight = out.trace().re;
        Ok((out, weight))
    }

    /// Apply and renormalize: `E(rho)/tr(E(rho))`. Errors with
    /// [`Error::ZeroProbability`] when the trace vanishes, signalling that
    /// the outcome never occurs on this state.
    pub fn apply_normalized(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        let (out, weight) = self.apply(rho)?;
        if weight <= tol::t::<T>(tol::ZERO_PROBABILITY) {
            return Err(Error::ZeroProbability);
        }
        Ok(DensityMatrix::from_unit_trace_unchecked(
            out.scale_re(T::one() / weight),
        ))
    }

    /// True when the operation is deterministic (trace preserving):
    /// `Σ_j A_j† A_j = I` within `1e-8`.
    pub fn is_deterministic(&self) -> bool {
        let e = self.povm_matrix();
        e.max_abs_diff(&ComplexMatrix::identity(self.dim())) <= tol::t::<T>(tol::COMPLETENESS)
    }

    /// Choi matrix `Σ_kl |k><l| ⊗ E(|k><l|)`.
    pub fn choi_matrix(&self) -> ComplexMatrix<T> {
        let d = self.dim();
        let mut choi = ComplexMatrix::zeros(d * d, d * d);
        for kraus in &self.kraus {
            // E(|k><l|) = A |k><l| A†, so the Choi matrix is the Gram of the
            // columns of A stacked blockwise: block (k,l) += A e_k (A e_l)†.
            for k in 0..d {
                for l in 0..d {
                    for i in 0..d {
                        for j in 0..d {
                            let val = kraus[(i, k)] * kraus[(j, l)].conj();
                            choi[(k * d + i, l * d + j)] += val;
                        }
                    }
                }
            }
        }
        choi
    }

    /// Complete positivity of this operation (always true in explicit Kraus
    /// form; present to validate the construction and round-trips).
    pub fn is_completely_positive(&self) -> bool {
        choi_is_completely_positive(&self.choi_matrix())
    }
}

/// Check an externally supplied Choi matrix for complete positivity:
/// PSD within `1e-8`.
pub fn choi_is_completely_positive<T: Scalar>(choi: &ComplexMatrix<T>) -> bool {
    match eig_hermitian(choi) {
        Ok((vals, _)) => vals
            .last()
            .is_none_or(|&min| min >= -tol::t::<T>(tol::COMPLETENESS)),
        Err(_) => false,
    }
}

/// Ideal operation: a single Kraus operator, `E(rho) = A rho A†`.
#[derive(Clone, Debug)]
pub struct IdealOperation<T: Scalar> {
    a: ComplexMatrix<T>,
}

impl<T: Scalar> IdealOperation<T> {
    pub fn new(a: ComplexMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Shape("ideal operation matrix must be square".into()));
        }
        let gram = a.adjoint().matmul(&a)?;
        let (vals, _) = eig_hermitian(&gram)?;
        if vals[0] > T::one() + tol::t::<T>(tol::ENTRY) {
            return Err(Error::InvalidParameter(format!(
                "operator violates A†A <= I (max eigenvalue {})",
                vals[0].to_f64_lossy()
            )));
        }
        Ok(Self { a })
    }

    pub fn operator(&self) -> &ComplexMatrix<T> {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// View as a general quantum operation with one Kraus operator.
    pub fn as_operation(&self) -> QuantumOperation<T> {
        QuantumOperation {
            kraus: vec![self.a.clone()],
        }
    }
}

/// Positive operator `E <= I` determining an outcome probability.
#[derive(Clone, Debug)]
pub struct PovmElement<T: Scalar> {
    e: ComplexMatrix<T>,
}

impl<T: Scalar> PovmElement<T> {
    pub fn new(e: ComplexMatrix<T>) -> Result<Self> {
        let dev = e.hermiticity_deviation();
        if !e.is_square() || dev > tol::t::<T>(tol::HERMITIAN) {
            return Err(Error::NotHermitian {
                deviation: dev.to_f64_lossy(),
            });
        }
        let (vals, _) = eig_hermitian(&e)?;
        if vals[vals.len() - 1] < tol::t::<T>(tol::PSD_FLOOR) {
            return Err(Error::NotPsd {
                min_eigenvalue: vals[vals.len() - 1].to_f64_lossy(),
            });
        }
        if vals[0] > T::one() + tol::t::<T>(tol::ENTRY) {
            return Err(Error::InvalidParameter("POVM element exceeds the identity".into()));
        }
        Ok(Self { e })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.e
    }

    /// Outcome probability `tr(rho E)`.
    pub fn probability(&self, rho: &DensityMatrix<T>) -> Result<T> {
        if rho.dim() != self.e.rows() {
            return Err(Error::Shape("POVM element and state dimensions differ".into()));
        }
        Ok(rho.matrix().matmul(&self.e)?.trace().re)
    }
}

/// Generalized measurement: labeled outcomes, each a quantum operation, with
/// the completeness relation `Σ_ij A_ij† A_ij = I`.
#[derive(Clone, Debug)]
pub struct Measurement<T: Scalar> {
    outcomes: Vec<(String, QuantumOperation<T>)>,
}

impl<T: Scalar> Measurement<T> {
    pub fn new(outcomes: Vec<(String, QuantumOperation<T>)>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidParameter("measurement needs at least one outcome".into()));
        }
        let dim = outcomes[0].1.dim();
        if outcomes.iter().any(|(_, op)| op.dim() != dim) {
            return Err(Error::Shape("measurement outcomes must share one dimension".into()));
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (_, op) in &outcomes {
            sum = &sum + &op.povm_matrix();
        }
        let residual = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if residual > tol::t::<T>(tol::COMPLETENESS) {
            return Err(Error::InvalidParameter(format!(
                "measurement violates completeness (residual {})",
                residual.to_f64_lossy()
            )));
        }
        Ok(Self { outcomes })
    }

    pub fn outcomes(&self) -> &[(String, QuantumOperation<T>)] {
        &self.outcomes
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].1.dim()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// The outcome's single Kraus operator, when the outcome is ideal.
    pub fn ideal_outcome(&self, index: usize) -> Result<IdealOperation<T>> {
        let (_, op) = self
            .outcomes
            .get(index)
            .ok_or(Error::OutcomeIndex {
                index,
                len: self.outcomes.len(),
            })?;
        if op.kraus().len() != 1 {
            return Err(Error::InvalidParameter(format!(
                "outcome {} is not ideal ({} Kraus operators)",
                index,
                op.kraus().len()
            )));
        }
        Ok(IdealOperation {
            a: op.kraus()[0].clone(),
        })
    }

    /// Probability of each outcome on `rho`: `Pr(i) = tr(rho E_i)`.
    pub fn outcome_probabilities(&self, rho: &DensityMatrix<T>) -> Result<Vec<T>> {
        if rho.dim() != self.dim() {
            return Err(Error::Shape("measurement and state dimensions differ".into()));
        }
        self.outcomes
            .iter()
            .map(|(_, op)| Ok(rho.matrix().matmul(&op.povm_matrix())?.trace().re))
            .collect()
    }

    /// Draw one outcome with a seeded generator and return its label together
    /// with the normalized posterior state. Outcomes with probability below
    /// `1e-12` are never selected; if all are, the measurement is degenerate
    /// on this state.
    pub fn sample_outcome(
        &self,
        rho: &DensityMatrix<T>,
        seed: u64,
    ) -> Result<(String, DensityMatrix<T>)> {
        let probs = self.outcome_probabilities(rho)?;
        let floor = tol::t::<T>(tol::ZERO_PROBABILITY);
        let total: T = probs
            .iter()
            .map(|&p| if p > floor { p } else { T::zero() })
            .fold(T::zero(), |a, x| a + x);
        if total <= floor {
            return Err(Error::DegenerateMeasurement);
        }
        let mut rng = rng_from_seed(seed);
        let draw = T::from_f64_lossy(rng.gen_range(0.0..1.0)) * total;
        let mut acc = T::zero();
        let mut selected = None;
        for (i, &p) in probs.iter().enumerate() {
            if p <= floor {
                continue;
            }
            acc += p;
            if draw < acc {
                selected = Some(i);
                break;
            }
        }
        // Guard against roundoff at the top of the cumulative walk.
        let index = selected.unwrap_or_else(|| {
            probs
                .iter()
                .rposition(|&p| p > floor)
                .expect("total above floor implies a selectable outcome")
        });
        let (label, op) = &self.outcomes[index];
        Ok((label.clone(), op.apply_normalized(rho)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_state_vector, random_unitary, rng_from_seed};
    use crate::scalar::c;

    type M = ComplexMatrix<f64>;

    fn proj(dim: usize, k: usize) -> M {
        let mut p = M::zeros(dim, dim);
        p[(k, k)] = c(1.0, 0.0);
        p
    }

    fn diag_state(p0: f64, p1: f64) -> DensityMatrix<f64> {
        DensityMatrix::new(M::from_real_rows(&[&[p0, 0.0], &[0.0, p1]])).unwrap()
    }

    #[test]
    fn unitary_channel_conjugates_and_has_weight_one() {
        let mut rng = rng_from_seed(20);
        let u: M = random_unitary(3, &mut rng);
        let rho = random_density::<f64, _>(3, 2, &mut rng);
        let op = QuantumOperation::new(vec![u.clone()]).unwrap();
        let (out, weight) = op.apply(&rho).unwrap();
        let expect = u.matmul(rho.matrix()).unwrap().matmul(&u.adjoint()).unwrap();
        assert!(out.max_abs_diff(&expect) < 1e-12);
        assert!((weight - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_overlap_weight_vanishes() {
        let op = QuantumOperation::new(vec![proj(2, 0)]).unwrap();
        let rho = diag_state(0.0, 1.0);
        let (_, weight) = op.apply(&rho).unwrap();
        assert!(weight.abs() < 1e-15);
        assert!(matches!(
            op.apply_normalized(&rho),
            Err(Error::ZeroProbability)
        ));
    }

    // Direct summation oracle for a 3-Kraus depolarizing-style set.
    #[test]
    fn multi_kraus_apply_matches_summation_oracle() {
        let p = 0.3f64;
        let k0 = M::identity(2).scale_re((1.0 - p).sqrt());
        let x = M::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).scale_re((p / 2.0).sqrt());
        let z = M::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).scale_re((p / 2.0).sqrt());
        let op = QuantumOperation::new(vec![k0.clone(), x.clone(), z.clone()]).unwrap();
        let mut rng = rng_from_seed(21);
        let rho = random_density::<f64, _>(2, 2, &mut rng);
        let (out, weight) = op.apply(&rho).unwrap();
        let mut oracle = M::zeros(2, 2);
        for k in [&k0, &x, &z] {
            oracle = &oracle + &k.matmul(rho.matrix()).unwrap().matmul(&k.adjoint()).unwrap();
        }
        assert!(out.max_abs_diff(&oracle) < 1e-13);
        assert!((weight - 1.0).abs() < 1e-12, "deterministic set has weight 1");
    }

    #[test]
    fn apply_is_linear_in_the_state() {
        let mut rng = rng_from_seed(22);
        let op = QuantumOperation::new(vec![
            random_unitary::<f64, _>(3, &mut rng).scale_re(0.6),
            random_unitary::<f64, _>(3, &mut rng).scale_re(0.5),
        ])
        .unwrap();
        let r1 = random_density::<f64, _>(3, 1, &mut rng);
        let r2 = random_density::<f64, _>(3, 3, &mut rng);
        let lam = 0.35f64;
        let mix = DensityMatrix::new(
            &r1.matrix().scale_re(lam) + &r2.matrix().scale_re(1.0 - lam),
        )
        .unwrap();
        let (out_mix, _) = op.apply(&mix).unwrap();
        let (o1, _) = op.apply(&r1).unwrap();
        let (o2, _) = op.apply(&r2).unwrap();
        let combined = &o1.scale_re(lam) + &o2.scale_re(1.0 - lam);
        assert!(out_mix.max_abs_diff(&combined) < 1e-9);
    }

    #[test]
    fn projector_on_mixed_state_collapses() {
        let op = QuantumOperation::new(vec![proj(2, 0)]).unwrap();
        let rho = diag_state(0.3, 0.7);
        let post = op.apply_normalized(&rho).unwrap();
        assert!(post.matrix().max_abs_diff(&proj(2, 0)) < 1e-12);
    }

    #[test]
    fn determinism_check() {
        let mut rng = rng_from_seed(23);
        let u: M = random_unitary(2, &mut rng);
        assert!(QuantumOperation::new(vec![u]).unwrap().is_deterministic());
        let lone = QuantumOperation::new(vec![proj(2, 0)]).unwrap();
        assert!(!lone.is_deterministic());
        let complete = QuantumOperation::new(vec![proj(2, 0), proj(2, 1)]).unwrap();
        assert!(complete.is_deterministic());
        assert!(complete
            .povm_element()
            .matrix()
            .max_abs_diff(&M::identity(2))
            < 1e-12);
    }

    #[test]
    fn kraus_form_is_completely_positive() {
        let mut rng = rng_from_seed(24);
        let op = QuantumOperation::new(vec![
            random_unitary::<f64, _>(2, &mut rng).scale_re(0.7),
            random_unitary::<f64, _>(2, &mut rng).scale_re(0.7),
        ])
        .unwrap();
        assert!(op.is_completely_positive());
        let id = QuantumOperation::new(vec![M::identity(3)]).unwrap();
        assert!(id.is_completely_positive());
    }

    // The transpose map is the textbook non-CP example; its Choi matrix is
    // the swap operator, whose spectrum contains -1.
    #[test]
    fn transpose_choi_matrix_is_not_cp() {
        let d = 2usize;
        let mut choi = M::zeros(4, 4);
        for k in 0..d {
            for l in 0..d {
                // T(|k><l|) = |l><k|, block (k,l) gets |l><k|.
                choi[(k * d + l, l * d + k)] = c(1.0, 0.0);
            }
        }
        assert!(!choi_is_completely_positive(&choi));
        let (vals, _) = eig_hermitian(&choi).unwrap();
        assert!((vals[vals.len() - 1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn povm_element_of_ideal_is_gram() {
        let mut rng = rng_from_seed(25);
        let a: M = random_unitary::<f64, _>(3, &mut rng).scale_re(0.5);
        let op = QuantumOperation::new(vec![a.clone()]).unwrap();
        let e = op.povm_element();
        let expect = a.adjoint().matmul(&a).unwrap();
        assert!(e.matrix().max_abs_diff(&expect) < 1e-13);
    }

    #[test]
    fn projective_probabilities_read_the_diagonal() {
        let m = Measurement::new(vec![
            ("0".into(), QuantumOperation::new(vec![proj(2, 0)]).unwrap()),
            ("1".into(), QuantumOperation::new(vec![proj(2, 1)]).unwrap()),
        ])
        .unwrap();
        let rho = diag_state(0.3, 0.7);
        let probs = m.outcome_probabilities(&rho).unwrap();
        assert!((probs[0] - 0.3).abs() < 1e-14);
        assert!((probs[1] - 0.7).abs() < 1e-14);
    }

    // Per-Kraus summation oracle for a random multi-outcome measurement.
    #[test]
    fn probabilities_match_per_kraus_oracle() {
        let mut rng = rng_from_seed(26);
        let dim = 3usize;
        // Random deterministic 3-outcome measurement from a random isometry
        // split: take a random unitary on 9 = 3*3 and slice 3x3 blocks of its
        // first 3 columns; Σ blocks†·blocks = I.
        let big: M = random_unitary(9, &mut rng);
        let blocks: Vec<M> = (0..3)
            .map(|b| M::from_fn(dim, dim, |i, j| big[(b * dim + i, j)]))
            .collect();
        let m = Measurement::new(
            blocks
                .iter()
                .enumerate()
                .map(|(i, k)| {
                    (
                        format!("k{i}"),
                        QuantumOperation::new(vec![k.clone()]).unwrap(),
                    )
                })
                .collect(),
        )
        .unwrap();
        let rho = random_density::<f64, _>(dim, 2, &mut rng);
        let probs = m.outcome_probabilities(&rho).unwrap();
        let sum: f64 = probs.iter().sum();
        assert!((sum - 1.0).abs() < 1e-10);
        for (p, k) in probs.iter().zip(blocks.iter()) {
            let (_, w) = QuantumOperation::new(vec![k.clone()])
                .unwrap()
                .apply(&rho)
                .unwrap();
            assert!((p - w).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_identity_is_trivial() {
        let m = Measurement::new(vec![(
            "only".into(),
            QuantumOperation::new(vec![M::identity(2)]).unwrap(),
        )])
        .unwrap();
        let mut rng = rng_from_seed(27);
        let rho = random_density::<f64, _>(2, 2, &mut rng);
        let (label, post) = m.sample_outcome(&rho, 5).unwrap();
        assert_eq!(label, "only");
        assert!(post.matrix().max_abs_diff(rho.matrix()) < 1e-12);

        let proj_m = Measurement::new(vec![
            ("0".into(), QuantumOperation::new(vec![proj(2, 0)]).unwrap()),
            ("1".into(), QuantumOperation::new(vec![proj(2, 1)]).unwrap()),
        ])
        .unwrap();
        for seed in 0..20u64 {
            let (a, _) = proj_m.sample_outcome(&rho, seed).unwrap();
            let (b, _) = proj_m.sample_outcome(&rho, seed).unwrap();
            assert_eq!(a, b, "same seed must reproduce the outcome");
        }
    }

    #[test]
    fn sampling_frequencies_match_binomial_bounds() {
        let m = Measurement::new(vec![
            ("0".into(), QuantumOperation::new(vec![proj(2, 0)]).unwrap()),
            ("1".into(), QuantumOperation::new(vec![proj(2, 1)]).unwrap()),
        ])
        .unwrap();
        let rho = diag_state(0.3, 0.7);
        let n = 100_000usize;
        let mut count0 = 0usize;
        for seed in 0..n as u64 {
            let (label, _) = m.sample_outcome(&rho, seed).unwrap();
            if label == "0" {
                count0 += 1;
            }
        }
        let p = 0.3f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        let freq = count0 as f64 / n as f64;
        assert!(
            (freq - p).abs() < 3.0 * sigma,
            "frequency {freq} outside 3 sigma of {p}"
        );
    }

    #[test]
    fn sampling_never_selects_zero_probability_outcomes() {
        let m = Measurement::new(vec![
            ("dead".into(), QuantumOperation::new(vec![proj(2, 0)]).unwrap()),
            ("live".into(), QuantumOperation::new(vec![proj(2, 1)]).unwrap()),
        ])
        .unwrap();
        let rho = diag_state(0.0, 1.0);
        for seed in 0..50u64 {
            let (label, _) = m.sample_outcome(&rho, seed).unwrap();
            assert_eq!(label, "live");
        }
    }

    #[test]
    fn degenerate_measurement_errors() {
        // One outcome with a zero-ish operator plus its completion; restrict
        // the state so only the zero outcome could fire.
        let a = proj(2, 0);
        let b = proj(2, 1);
        let m = Measurement::new(vec![
            ("a".into(), QuantumOperation::new(vec![a]).unwrap()),
            ("b".into(), QuantumOperation::new(vec![b]).unwrap()),
        ])
        .unwrap();
        // A valid measurement always has total probability 1, so force the
        // degenerate branch through a sub-normalized single outcome instead.
        let tiny = QuantumOperation::new(vec![proj(2, 0).scale_re(1e-9)]).unwrap();
        let rho = diag_state(0.0, 1.0);
        let lone = Measurement {
            outcomes: vec![("tiny".into(), tiny)],
        };
        assert!(matches!(
            lone.sample_outcome(&rho, 0),
            Err(Error::DegenerateMeasurement)
        ));
        drop(m);
    }

    #[test]
    fn ideal_on_pure_state_yields_rank_one_output() {
        let mut rng = rng_from_seed(28);
        let a: M = random_unitary::<f64, _>(4, &mut rng).scale_re(0.8);
        let op = QuantumOperation::new(vec![a]).unwrap();
        let psi = random_state_vector::<f64, _>(4, &mut rng);
        let (out, _) = op.apply(&DensityMatrix::from_pure(&psi)).unwrap();
        let (vals, _) = eig_hermitian(&out).unwrap();
        assert!(vals[1].abs() < 1e-8, "second eigenvalue {}", vals[1]);
    }

    #[test]
    fn measurement_completeness_is_enforced() {
        let only = QuantumOperation::new(vec![proj(2, 0)]).unwrap();
        assert!(Measurement::new(vec![("0".into(), only)]).is_err());
    }

    #[test]
    fn uhlmann_fidelity_matches_pure_overlap() {
        let mut rng = rng_from_seed(29);
        let psi = random_state_vector::<f64, _>(3, &mut rng);
        let rho = random_density::<f64, _>(3, 2, &mut rng);
        let f1 = pure_fidelity(&psi, &rho).unwrap();
        let f2 = fidelity(&DensityMatrix::from_pure(&psi), &rho).unwrap();
        assert!((f1 - f2).abs() < 1e-8, "pure {f1} vs uhlmann {f2}");
        let self_f = fidelity(&rho, &rho).unwrap();
        assert!((self_f - 1.0).abs() < 1e-9);
    }
}
