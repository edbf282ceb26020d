//! Matrix decompositions: Hermitian eigendecomposition, SVD, polar form,
//! Schmidt decomposition, and the PSD square root.
//!
//! Everything here is built on complex Jacobi rotations, which are simple,
//! backward-stable, and at desk-scale dimensions (< ~100) more than accurate
//! enough for the 1e-9 contracts the rest of the crate relies on.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qmat::{ComplexMatrix, StateVector};
use crate::scalar::{czero, Cplx, Scalar};
use crate::tol;

const MAX_SWEEPS: usize = 100;

/// Unitary/positive factorization `m = unitary · positive`.
#[derive(Clone, Debug)]
pub struct PolarDecomposition<T: Scalar> {
    /// Unitary factor; on null directions of `m` it is completed
    /// deterministically from the SVD factors.
    pub unitary: ComplexMatrix<T>,
    /// Positive semidefinite factor `sqrt(m† m)`.
    pub positive: ComplexMatrix<T>,
}

/// Schmidt form of a bipartite pure state: `v = Σ_j α_j |l_j> ⊗ |r_j>`.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition<T: Scalar> {
    /// Nonnegative coefficients in descending order; their squares sum to 1.
    pub coefficients: Vec<T>,
    /// Orthonormal vectors on the left factor, one per coefficient.
    pub left_basis: Vec<StateVector<T>>,
    /// Orthonormal vectors on the right factor, one per coefficient.
    pub right_basis: Vec<StateVector<T>>,
    pub dim_left: usize,
    pub dim_right: usize,
}

impl<T: Scalar> SchmidtDecomposition<T> {
    /// Number of coefficients above `threshold`.
    pub fn rank(&self, threshold: T) -> usize {
        self.coefficients.iter().filter(|&&a| a > threshold).count()
    }
}

/// The 2x2 complex Jacobi rotation that diagonalizes the Hermitian block
/// [[a, z], [z*, b]] (a, b real). Returns (c, s, phase) describing
/// J = [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]] with J† G J diagonal.
fn jacobi_rotation<T: Scalar>(a: T, b: T, z: Cplx<T>) -> (T, T, Cplx<T>) {
    let r = z.norm();
    let phase = z / Complex::new(r, T::zero());
    let tau = (b - a) / (r + r);
    let t = if tau.is_finite() {
        let sign = if tau >= T::zero() { T::one() } else { -T::one() };
        sign / (tau.abs() + (T::one() + tau * tau).sqrt())
    } else {
        T::zero()
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    (c, s, phase)
}

/// Eigendecomposition of a Hermitian matrix via cyclic complex Jacobi.
///
/// Returns eigenvalues in descending order and the matching orthonormal
/// eigenvector columns. Each eigenvector is phase-normalized so its first
/// significant component is positive real; exact eigenvalue ties are broken
/// by lexicographic order of the normalized eigenvector entries.
///
/// Errors if `m` deviates from Hermitian symmetry by more than `1e-9`.
pub fn eig_hermitian<T: Scalar>(m: &ComplexMatrix<T>) -> Result<(Vec<T>, ComplexMatrix<T>)> {
    if !m.is_square() {
        return Err(Error::Shape("eigendecomposition requires a square matrix".into()));
    }
    let dev = m.hermiticity_deviation();
    if dev > tol::t::<T>(tol::HERMITIAN) {
        return Err(Error::NotHermitian {
            deviation: dev.to_f64_lossy(),
        });
    }
    let n = m.rows();
    // Work on the exactly Hermitian part to keep the diagonal real.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| {
        (m[(i, j)] + m[(j, i)].conj()).scale(T::from_f64_lossy(0.5))
    });
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm().max(T::min_positive_value());
    let conv = T::epsilon() * scale;

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= conv {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() <= conv * T::from_f64_lossy(1e-3) {
                    continue;
                }
                let (c, s, phase) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                let cr = Complex::new(c, T::zero());
                let sr = Complex::new(s, T::zero());
                let ephase = phase.conj();
                // Column update A <- A J.
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * cr - aiq * ephase * sr;
                    a[(i, q)] = aip * sr + aiq * ephase * cr;
                }
                // Row update A <- J† A.
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * cr - aqj * phase * sr;
                    a[(q, j)] = apj * sr + aqj * phase * cr;
                }
                // Kill roundoff drift on the zeroed pair and the diagonal.
                a[(p, q)] = czero();
                a[(q, p)] = czero();
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
                // Accumulate V <- V J.
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * cr - viq * ephase * sr;
                    v[(i, q)] = vip * sr + viq * ephase * cr;
                }
            }
        }
    }

    let eigenvalues: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut columns: Vec<Vec<Cplx<T>>> = (0..n).map(|j| v.column(j)).collect();
    for col in &mut columns {
        phase_normalize(col);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eigenvalues[j]
            .partial_cmp(&eigenvalues[i])
            .unwrap()
            .then_with(|| lex_cmp(&columns[i], &columns[j]))
    });
    let sorted_vals: Vec<T> = order.iter().map(|&i| eigenvalues[i]).collect();
    let sorted_cols: Vec<Vec<Cplx<T>>> = order.iter().map(|&i| columns[i].clone()).collect();
    let vectors = ComplexMatrix::from_columns(n, &sorted_cols)?;
    Ok((sorted_vals, vectors))
}

/// Multiply a column by a phase so its first significant entry is positive real.
fn phase_normalize<T: Scalar>(col: &mut [Cplx<T>]) {
    let cutoff = T::from_f64_lossy(1e-8);
    if let Some(lead) = col.iter().find(|z| z.norm() > cutoff) {
        let phase = lead.conj() / Complex::new(lead.norm(), T::zero());
        for z in col.iter_mut() {
            *z *= phase;
        }
    }
}

fn lex_cmp<T: Scalar>(a: &[Cplx<T>], b: &[Cplx<T>]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.re.partial_cmp(&y.re).unwrap() {
            std::cmp::Ordering::Equal => {}
            ord => return ord,
        }
        match x.im.partial_cmp(&y.im).unwrap() {
            std::cmp::Ordering::Equal => {}
            ord => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

/// Singular value decomposition `m = U · diag(s) · V†` via one-sided Jacobi.
///
/// `U` is `rows × k` and `V†` is `k × cols` with `k = min(rows, cols)`; both
/// have orthonormal columns (rows for `V†`), singular values are nonnegative
/// and descending. Null directions of rank-deficient input are completed
/// deterministically by Gram–Schmidt against the canonical basis, so `U` is
/// always a full isometry (a unitary when `m` is square).
pub fn svd<T: Scalar>(
    m: &ComplexMatrix<T>,
) -> (ComplexMatrix<T>, Vec<T>, ComplexMatrix<T>) {
    if m.rows() < m.cols() {
        let (u, s, vdag) = svd(&m.adjoint());
        return (vdag.adjoint(), s, u.adjoint());
    }
    let rows = m.rows();
    let cols = m.cols();
    let mut w = m.clone();
    let mut v = ComplexMatrix::identity(cols);
    let eps = T::epsilon() * T::from_f64_lossy(4.0);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let mut app = T::zero();
                let mut aqq = T::zero();
                let mut apq = czero();
                for i in 0..rows {
                    let wip = w[(i, p)];
                    let wiq = w[(i, q)];
                    app += wip.norm_sqr();
                    aqq += wiq.norm_sqr();
                    apq += wip.conj() * wiq;
                }
                let threshold = eps * (app * aqq).sqrt();
                if apq.norm() <= threshold || threshold == T::zero() {
                    continue;
                }
                rotated = true;
                let (c, s, phase) = jacobi_rotation(app, aqq, apq);
                let cr = Complex::new(c, T::zero());
                let sr = Complex::new(s, T::zero());
                let ephase = phase.conj();
                for i in 0..rows {
                    let wip = w[(i, p)];
                    let wiq = w[(i, q)];
                    w[(i, p)] = wip * cr - wiq * ephase * sr;
                    w[(i, q)] = wip * sr + wiq * ephase * cr;
                }
                for i in 0..cols {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * cr - viq * ephase * sr;
                    v[(i, q)] = vip * sr + viq * ephase * cr;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut norms: Vec<T> = (0..cols)
        .map(|j| {
            (0..rows)
                .map(|i| w[(i, j)].norm_sqr())
                .fold(T::zero(), |a, x| a + x)
                .sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap().then(i.cmp(&j)));
    norms = order.iter().map(|&i| norms[i]).collect();

    let sigma_max = norms.first().copied().unwrap_or(T::zero());
    let rank_tol = sigma_max * T::epsilon() * T::from_usize(rows.max(cols)).unwrap();

    let mut u_cols: Vec<Vec<Cplx<T>>> = Vec::with_capacity(cols);
    let mut deficient: Vec<usize> = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        if norms[slot] > rank_tol && norms[slot] > T::zero() {
            let inv = Complex::new(T::one() / norms[slot], T::zero());
            u_cols.push((0..rows).map(|i| w[(i, j)] * inv).collect());
        } else {
            u_cols.push(vec![czero(); rows]);
            deficient.push(slot);
        }
    }
    for slot in deficient {
        u_cols[slot] = complete_column(rows, &u_cols);
    }

    let v_cols: Vec<Vec<Cplx<T>>> = order.iter().map(|&j| v.column(j)).collect();
    let u = ComplexMatrix::from_columns(rows, &u_cols).expect("consistent columns");
    let vmat = ComplexMatrix::from_columns(cols, &v_cols).expect("consistent columns");
    (u, norms, vmat.adjoint())
}

/// Deterministic completion: the canonical basis vector with the largest
/// residual after projecting out the existing columns, normalized.
fn complete_column<T: Scalar>(dim: usize, existing: &[Vec<Cplx<T>>]) -> Vec<Cplx<T>> {
    let mut best: Option<(T, Vec<Cplx<T>>)> = None;
    for k in 0..dim {
        let mut cand = vec![czero(); dim];
        cand[k] = Complex::new(T::one(), T::zero());
        for col in existing {
            let overlap = col
                .iter()
                .zip(cand.iter())
                .map(|(c, x)| c.conj() * *x)
                .fold(czero::<T>(), |a, z| a + z);
            if overlap.norm() > T::zero() {
                for (c, x) in col.iter().zip(cand.iter_mut()) {
                    *x -= overlap * *c;
                }
            }
        }
        let norm = cand
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, x| a + x)
            .sqrt();
        if best.as_ref().is_none_or(|(b, _)| norm > *b) {
            best = Some((norm, cand));
        }
    }
    let (norm, mut col) = best.expect("dim > 0");
    let inv = Complex::new(T::one() / norm, T::zero());
    for z in col.iter_mut() {
        *z *= inv;
    }
    col
}

/// Polar decomposition `m = unitary · positive` of a square matrix.
///
/// `positive = sqrt(m† m)`; for singular `m` the unitary is the SVD
/// completion `U·V†`, which extends the partial isometry deterministically
/// over the null directions.
pub fn polar<T: Scalar>(m: &ComplexMatrix<T>) -> Result<PolarDecomposition<T>> {
    if !m.is_square() {
        return Err(Error::Shape("polar decomposition requires a square matrix".into()));
    }
    let (u, s, vdag) = svd(m);
    let unitary = u.matmul(&vdag)?;
    let vmat = vdag.adjoint();
    let n = m.rows();
    let mut scaled = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let sj = Complex::new(s[j], T::zero());
        for i in 0..n {
            scaled[(i, j)] = vmat[(i, j)] * sj;
        }
    }
    let positive = scaled.matmul(&vdag)?;
    // Symmetrize away the last bits of roundoff.
    let positive = ComplexMatrix::from_fn(n, n, |i, j| {
        (positive[(i, j)] + positive[(j, i)].conj()).scale(T::from_f64_lossy(0.5))
    });
    Ok(PolarDecomposition { unitary, positive })
}

/// Schmidt decomposition of a bipartite pure state with factor dimensions
/// `dim_left × dim_right`.
pub fn schmidt<T: Scalar>(
    v: &StateVector<T>,
    dim_left: usize,
    dim_right: usize,
) -> Result<SchmidtDecomposition<T>> {
    if dim_left * dim_right != v.dim() || dim_left == 0 || dim_right == 0 {
        return Err(Error::Shape(format!(
            "cannot split dim-{} state into {}x{}",
            v.dim(),
            dim_left,
            dim_right
        )));
    }
    let amp = ComplexMatrix::from_fn(dim_left, dim_right, |i, j| {
        v.amplitudes()[i * dim_right + j]
    });
    let (u, s, vdag) = svd(&amp);
    let k = s.len();
    let left_basis = (0..k)
        .map(|j| StateVector::from_normalized_unchecked(u.column(j)))
        .collect();
    let right_basis = (0..k)
        .map(|i| {
            StateVector::from_normalized_unchecked(
                (0..dim_right).map(|j| vdag[(i, j)]).collect(),
            )
        })
        .collect();
    Ok(SchmidtDecomposition {
        coefficients: s,
        left_basis,
        right_basis,
        dim_left,
        dim_right,
    })
}

/// Hermitian PSD square root via eigendecomposition.
///
/// Eigenvalues in `[-1e-10, 0)` are clamped to zero; anything more negative
/// rejects the input as not PSD.
pub fn matrix_sqrt_psd<T: Scalar>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let (vals, vecs) = eig_hermitian(m)?;
    let floor = tol::t::<T>(tol::PSD_FLOOR);
    if let Some(bad) = vals.iter().find(|&&l| l < floor) {
        return Err(Error::NotPsd {
            min_eigenvalue: bad.to_f64_lossy(),
        });
    }
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        let root = lam.max(T::zero()).sqrt();
        if root == T::zero() {
            continue;
        }
        let col = vecs.column(k);
        let root = Complex::new(root, T::zero());
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += col[i] * col[j].conj() * root;
            }
        }
    }
    Ok(out)
}

/// Unitary `exp(-i·h·dt)` of a Hermitian generator, via eigendecomposition.
pub fn unitary_exp_neg_ih<T: Scalar>(h: &ComplexMatrix<T>, dt: T) -> Result<ComplexMatrix<T>> {
    let (vals, vecs) = eig_hermitian(h)?;
    let n = h.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        let phase = Complex::from_polar(T::one(), -lam * dt);
        let col = vecs.column(k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += col[i] * col[j].conj() * phase;
            }
        }
    }
    Ok(out)
}
