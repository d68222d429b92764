//! Dense complex linear algebra used throughout the crate: the matrix type,
//! tensor products, the Hermitian propagator and the general eigensolver.

mod eig;
mod hermitian;
mod matrix;

pub use eig::{dominant_eigenspace, eig_general, SpectralReport, MAX_EIG_DIM, RESIDUAL_TOL};
pub use hermitian::{exp_hermitian, joint_null_space, HermitianEigen, HERMITIAN_TOL};
pub use matrix::{basis_vector, c64, inner, kron_vec, norm, normalized, solve, ComplexMatrix, C64};

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = b.dims();
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Left-to-right Kronecker product of a non-empty sequence.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> Option<ComplexMatrix> {
    factors.into_iter().fold(None, |acc, f| match acc {
        None => Some(f.clone()),
        Some(a) => Some(kron(&a, f)),
    })
}
