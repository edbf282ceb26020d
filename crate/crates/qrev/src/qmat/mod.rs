//! Dense complex linear algebra: matrices, state vectors, and the
//! decompositions the rest of the crate is built on.

mod decomp;
mod matrix;
mod vector;

pub use decomp::{
    eig_hermitian, matrix_sqrt_psd, polar, schmidt, svd, unitary_exp_neg_ih, PolarDecomposition,
    SchmidtDecomposition,
};
pub use matrix::ComplexMatrix;
pub use vector::StateVector;
