//! Dense complex matrices, row-major storage.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{czero, Cplx, Scalar};

/// Dense complex matrix with row-major entries.
///
/// The universal carrier for operators, unitaries, projectors, and density
/// matrices before semantic wrapping.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T: Scalar> {
    rows: usize,
    cols: usize,
    entries: Vec<Cplx<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    /// Matrix from a row-major entry vector. Fails if the length is not
    /// `rows * cols`, either dimension is zero, or any entry is non-finite.
    pub fn new(rows: usize, cols: usize, entries: Vec<Cplx<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, entries })
    }

    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![czero(); rows * cols],
        }
    }

    /// Identity matrix of dimension `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Matrix built entry by entry from a closure over `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cplx<T>) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Square matrix from real `f64` rows (convenience for fixtures and tests).
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        Self::from_fn(r, c, |i, j| Complex::new(T::from_f64_lossy(rows[i][j]), T::zero()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Cplx<T>] {
        &self.entries
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Transpose without conjugation.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise complex conjugate.
    pub fn conjugate(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    /// Kronecker product; block `(i, j)` of the result is `self[(i, j)] * rhs`.
    pub fn tensor(&self, rhs: &Self) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        Self::from_fn(rows, cols, |i, j| {
            let (ia, ib) = (i / rhs.rows, i % rhs.rows);
            let (ja, jb) = (j / rhs.cols, j % rhs.cols);
            self[(ia, ja)] * rhs[(ib, jb)]
        })
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> Cplx<T> {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).fold(czero(), |acc, z| acc + z)
    }

    /// Partial trace over the subsystems *not* listed in `keep`.
    ///
    /// `dims` are the subsystem dimensions in tensor order (their product must
    /// equal the matrix dimension); `keep` lists the subsystem indices to
    /// retain, and the result orders them as in `dims`. The trace is
    /// preserved: `tr(result) == tr(self)`.
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("partial trace requires a square matrix".into()));
        }
        let total: usize = dims.iter().product();
        if total != self.rows || dims.contains(&0) {
            return Err(Error::Shape(format!(
                "subsystem dims {:?} do not factor dimension {}",
                dims, self.rows
            )));
        }
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.iter().any(|&k| k >= dims.len()) {
            return Err(Error::Shape(format!(
                "kept subsystem index out of range for {} subsystems",
                dims.len()
            )));
        }
        let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
        let kept_dim: usize = keep.iter().map(|&k| dims[k]).product();
        let kept_dim = kept_dim.max(1);

        // Strides of each subsystem index in the flat row-major index.
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let kept_sizes: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
        let traced_sizes: Vec<usize> = traced.iter().map(|&t| dims[t]).collect();
        let traced_total: usize = traced_sizes.iter().product::<usize>().max(1);

        let decode = |mut flat: usize, sizes: &[usize]| -> Vec<usize> {
            let mut digits = vec![0usize; sizes.len()];
            for i in (0..sizes.len()).rev() {
                digits[i] = flat % sizes[i];
                flat /= sizes[i];
            }
            digits
        };

        let mut out = Self::zeros(kept_dim, kept_dim);
        for r in 0..kept_dim {
            let rd = decode(r, &kept_sizes);
            for c in 0..kept_dim {
                let cd = decode(c, &kept_sizes);
                let mut acc = czero();
                for t in 0..traced_total {
                    let td = decode(t, &traced_sizes);
                    let mut row = 0usize;
                    let mut col = 0usize;
                    for (pos, &k) in keep.iter().enumerate() {
                        row += rd[pos] * strides[k];
                        col += cd[pos] * strides[k];
                    }
                    for (pos, &tr_idx) in traced.iter().enumerate() {
                        row += td[pos] * strides[tr_idx];
                        col += td[pos] * strides[tr_idx];
                    }
                    acc += self[(row, col)];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(out)
    }

    /// Scale by a complex factor.
    pub fn scale(&self, factor: Cplx<T>) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * factor)
    }

    /// Scale by a real factor.
    pub fn scale_re(&self, factor: T) -> Self {
        self.scale(Complex::new(factor, T::zero()))
    }

    /// Largest entrywise absolute deviation from `rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        debug_assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.entries
            .iter()
            .zip(rhs.entries.iter())
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.entries.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |acc, x| acc + x)
            .sqrt()
    }

    /// Max-norm deviation from Hermitian symmetry.
    pub fn hermiticity_deviation(&self) -> T {
        debug_assert!(self.is_square());
        let mut dev = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// True when `self† self = I` within `tol` (max-norm).
    pub fn is_unitary(&self, tol: T) -> bool {
        if !self.is_square() {
            return false;
        }
        let gram = self.adjoint().matmul(self).expect("square product");
        gram.max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    /// True when Hermitian within `tol`.
    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square() && self.hermiticity_deviation() <= tol
    }

    /// Column `j` as an entry vector.
    pub fn column(&self, j: usize) -> Vec<Cplx<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, columns: &[Vec<Cplx<T>>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != dim) {
            return Err(Error::Shape("column length mismatch".into()));
        }
        Ok(Self::from_fn(dim, columns.len(), |i, j| columns[j][i]))
    }

    /// Frobenius inner product `tr(self† rhs)`.
    pub fn frobenius_inner(&self, rhs: &Self) -> Cplx<T> {
        debug_assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.entries
            .iter()
            .zip(rhs.entries.iter())
            .map(|(a, b)| a.conj() * *b)
            .fold(czero(), |acc, z| acc + z)
    }

    /// Minimum over a global phase of the max-norm distance to `rhs`:
    /// `min_θ max_ij |self_ij − e^{iθ} rhs_ij|`.
    ///
    /// The optimal phase aligns `rhs` with `self` through their Frobenius
    /// inner product; this is the comparison to use wherever equality is
    /// only meaningful up to a physically irrelevant phase.
    pub fn phase_aligned_distance(&self, rhs: &Self) -> T {
        let overlap = rhs.frobenius_inner(self);
        let phase = if overlap.norm() > T::epsilon() {
            overlap / Complex::new(overlap.norm(), T::zero())
        } else {
            Complex::new(T::one(), T::zero())
        };
        self.max_abs_diff(&rhs.scale(phase))
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Cplx<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Self::Output {
        &self.entries[i * self.cols + j]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Self::Output {
        &mut self.entries[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs).expect("matrix dimension mismatch")
    }
}

impl<T: Scalar> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix dimension mismatch");
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }
}

impl<T: Scalar> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix dimension mismatch");
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

impl<T: Scalar> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn neg(self) -> ComplexMatrix<T> {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| -self[(i, j)])
    }
}

impl<T: Scalar> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re.to_f64_lossy(), z.im.to_f64_lossy())?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
