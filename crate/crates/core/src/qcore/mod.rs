//! Quaternion scalars, vectors and matrices, generalized absolute values,
//! L_{s,p} norms, real structure-preserving representations and
//! Gram–Schmidt orthonormalization.

mod matrix;
mod norm;
mod ortho;
mod quaternion;
mod repr;
mod vector;

pub use matrix::{conj_transpose, qfrobenius, qmatmul, qmatvec, qmatvec_adjoint, QMatrix};
pub use norm::NormOrder;
pub use ortho::{orthonormalize, orthonormalize_against, RANK_TOLERANCE};
pub use quaternion::{qmul, Quaternion};
pub use repr::{real_rep_matrix, real_rep_vector, RealMatRep, RealVecRep};
pub use vector::{coeffwise_mul, lsp_norm, vec_abs, vec_sign, QVector};

/// Generalized s-absolute value of a quaternion.
pub fn s_abs(a: Quaternion, s: f64) -> crate::Result<f64> {
    a.s_abs(s)
}

/// Quaternion sign, zero at zero.
pub fn qsign(a: Quaternion) -> Quaternion {
    a.sign()
}
