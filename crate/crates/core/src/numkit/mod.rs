//! Dense complex linear algebra and optimization for matrices of dimension
//! at most 16.

mod decomp;
mod eigen;
mod expm;
mod matrix;
mod richardson;
mod simplex;

pub use decomp::{
    cholesky_lower, cholesky_lower_with, inverse, pseudoinverse, pseudoinverse_with, singular_values, solve,
    svd, Svd,
};
pub use eigen::{eig_general, eig_hermitian, EigResult, GeneralEig};
pub use expm::{matrix_exp, matrix_exp_with, matrix_log_principal, matrix_log_principal_with};
pub use matrix::{c, cr, CMatrix};
pub use richardson::richardson_derivative;
pub use simplex::{nelder_mead, SimplexOptions, SimplexResult};

/// Pauli matrices.
pub fn sigma_x() -> CMatrix {
    CMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_rows(&[[cr(0.0), c(0.0, -1.0)], [c(0.0, 1.0), cr(0.0)]])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_real_diag(&[1.0, -1.0])
}

pub fn paulis() -> [CMatrix; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// Matrix unit |i><j| of dimension n.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = cr(1.0);
    m
}

/// Square root of a positive semidefinite Hermitian matrix (negative
/// eigenvalues from round-off are clamped).
pub fn psd_sqrt(m: &CMatrix) -> crate::Result<CMatrix> {
    Ok(eig_hermitian(m)?.reconstruct_with(|x| x.max(0.0).sqrt()))
}
