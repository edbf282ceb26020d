//! Seeded randomness helpers.
//!
//! All stochastic operations in this crate draw from a `ChaCha8Rng` seeded
//! with an explicit `u64`, so identical `(seed, call sequence)` pairs yield
//! identical results on every platform. Complex Gaussians are built from two
//! `f64` standard-normal draws (real part first) and then converted to the
//! working scalar type, keeping streams independent of `T`.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::DensityMatrix;
use crate::qmat::{polar, ComplexMatrix, StateVector};
use crate::reversal::Subspace;
use crate::scalar::{czero, Cplx, Scalar};

/// The crate's deterministic generator.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian (independent N(0,1) real and imaginary parts).
pub fn complex_normal<T: Scalar, R: Rng>(rng: &mut R) -> Cplx<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::from_f64_lossy(re), T::from_f64_lossy(im))
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_matrix<T: Scalar, R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// Haar-distributed random state vector.
pub fn random_state_vector<T: Scalar, R: Rng>(dim: usize, rng: &mut R) -> StateVector<T> {
    loop {
        let amps: Vec<Cplx<T>> = (0..dim).map(|_| complex_normal(rng)).collect();
        if let Ok(v) = StateVector::normalized(amps) {
            return v;
        }
    }
}

/// Haar-distributed random unitary (polar factor of a Ginibre matrix).
pub fn random_unitary<T: Scalar, R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = random_matrix(dim, dim, rng);
    polar(&g).expect("square input").unitary
}

/// Random density matrix of the given rank: a random mixture of `rank`
/// Haar-random pure states.
pub fn random_density<T: Scalar, R: Rng>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix<T> {
    let rank = rank.clamp(1, dim);
    let mut weights: Vec<T> = (0..rank)
        .map(|_| T::from_f64_lossy(rng.gen_range(0.05..1.0)))
        .collect();
    let total: T = weights.iter().copied().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for &w in &weights {
        let psi = random_state_vector::<T, _>(dim, rng);
        let proj = psi.projector();
        m = &m + &proj.scale_re(w);
    }
    DensityMatrix::new(m).expect("convex mixture of pure states")
}

/// Haar-random unit vector inside a subspace.
pub fn random_state_in_subspace<T: Scalar, R: Rng>(m: &Subspace<T>, rng: &mut R) -> StateVector<T> {
    let k = m.dim();
    loop {
        let coeffs: Vec<Cplx<T>> = (0..k).map(|_| complex_normal(rng)).collect();
        let mut amps = vec![czero(); m.ambient_dim()];
        for (basis_vec, &coeff) in m.basis().iter().zip(coeffs.iter()) {
            for (a, b) in amps.iter_mut().zip(basis_vec.amplitudes()) {
                *a += coeff * *b;
            }
        }
        if let Ok(v) = StateVector::normalized(amps) {
            return v;
        }
    }
}

/// Random rank-`rank` density matrix supported on a subspace.
pub fn random_density_in_subspace<T: Scalar, R: Rng>(
    m: &Subspace<T>,
    rank: usize,
    rng: &mut R,
) -> DensityMatrix<T> {
    let rank = rank.clamp(1, m.dim());
    let mut weights: Vec<T> = (0..rank)
        .map(|_| T::from_f64_lossy(rng.gen_range(0.05..1.0)))
        .collect();
    let total: T = weights.iter().copied().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut out = ComplexMatrix::zeros(m.ambient_dim(), m.ambient_dim());
    for &w in &weights {
        let psi = random_state_in_subspace(m, rng);
        out = &out + &psi.projector().scale_re(w);
    }
    DensityMatrix::new(out).expect("convex mixture of pure states")
}

/// Deterministic orthonormal basis of the full space whose first vector is `v`:
/// Gram–Schmidt over `v` followed by Haar-random fill.
pub fn random_onb_containing<T: Scalar, R: Rng>(
    v: &StateVector<T>,
    rng: &mut R,
) -> Vec<StateVector<T>> {
    let dim = v.dim();
    let mut basis: Vec<Vec<Cplx<T>>> = vec![v.amplitudes().to_vec()];
    while basis.len() < dim {
        let cand = random_state_vector::<T, _>(dim, rng);
        let mut cand = cand.amplitudes().to_vec();
        for existing in &basis {
            let overlap = existing
                .iter()
                .zip(cand.iter())
                .map(|(e, c)| e.conj() * *c)
                .fold(czero::<T>(), |a, z| a + z);
            for (c, e) in cand.iter_mut().zip(existing.iter()) {
                *c -= overlap * *e;
            }
        }
        let norm = cand
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, x| a + x)
            .sqrt();
        if norm > T::from_f64_lossy(1e-6) {
            let inv = Complex::new(T::one() / norm, T::zero());
            basis.push(cand.into_iter().map(|z| z * inv).collect());
        }
    }
    basis
        .into_iter()
        .map(StateVector::from_normalized_unchecked)
        .collect()
}
