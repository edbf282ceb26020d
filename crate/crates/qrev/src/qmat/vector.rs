//! Normalized state vectors.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qmat::ComplexMatrix;
use crate::scalar::{czero, Cplx, Scalar};
use crate::tol;

/// Pure quantum state: a unit vector of complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Scalar> {
    amplitudes: Vec<Cplx<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// Wrap amplitudes, requiring unit norm within `1e-10`.
    pub fn new(amplitudes: Vec<Cplx<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Shape("state vector must have positive dimension".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("state amplitudes must be finite".into()));
        }
        let norm = amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, x| a + x)
            .sqrt();
        if (norm - T::one()).abs() > tol::t::<T>(tol::STATE_NORM) {
            return Err(Error::InvalidParameter(format!(
                "state vector norm {} is not 1",
                norm.to_f64_lossy()
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalize arbitrary amplitudes into a state vector; errors on the zero vector.
    pub fn normalized(amplitudes: Vec<Cplx<T>>) -> Result<Self> {
        let norm = amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, x| a + x)
            .sqrt();
        if norm <= tol::t::<T>(tol::ZERO_PROBABILITY) {
            return Err(Error::ZeroProbability);
        }
        let inv = Complex::new(T::one() / norm, T::zero());
        Self::new(amplitudes.into_iter().map(|z| z * inv).collect())
    }

    /// Computational basis state `|index>` in the given dimension.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![czero(); dim];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Cplx<T>] {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, x| a + x)
            .sqrt()
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &Self) -> Cplx<T> {
        debug_assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * *b)
            .fold(czero(), |acc, z| acc + z)
    }

    /// Outer product `|self><other|`.
    pub fn outer(&self, other: &Self) -> ComplexMatrix<T> {
        ComplexMatrix::from_fn(self.dim(), other.dim(), |i, j| {
            self.amplitudes[i] * other.amplitudes[j].conj()
        })
    }

    /// Rank-1 projector `|self><self|`.
    pub fn projector(&self) -> ComplexMatrix<T> {
        self.outer(self)
    }

    /// Tensor product `|self> ⊗ |other>`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(*a * *b);
            }
        }
        Self { amplitudes }
    }

    /// Apply a matrix, returning the raw (unnormalized) image vector.
    pub fn apply(&self, m: &ComplexMatrix<T>) -> Result<Vec<Cplx<T>>> {
        if m.cols() != self.dim() {
            return Err(Error::Shape(format!(
                "cannot apply {}x{} matrix to dim-{} state",
                m.rows(),
                m.cols(),
                self.dim()
            )));
        }
        let mut out = vec![czero(); m.rows()];
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out[i] += m[(i, j)] * self.amplitudes[j];
            }
        }
        Ok(out)
    }

    /// Apply a matrix and renormalize; errors if the image vanishes.
    pub fn apply_normalized(&self, m: &ComplexMatrix<T>) -> Result<Self> {
        Self::normalized(self.apply(m)?)
    }

    /// View as a column matrix.
    pub fn as_column(&self) -> ComplexMatrix<T> {
        ComplexMatrix::from_fn(self.dim(), 1, |i, _| self.amplitudes[i])
    }

    /// Unchecked construction for internal callers that guarantee unit norm.
    pub(crate) fn from_normalized_unchecked(amplitudes: Vec<Cplx<T>>) -> Self {
        Self { amplitudes }
    }
}
