use crate::error::{Error, Result};

use super::matrix::QMatrix;
use super::vector::QVector;

/// Residual 2-norm below which a column counts as dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Orthonormalizes `v` against the orthonormal columns of `basis` using
/// modified Gram–Schmidt followed by one reorthogonalization sweep.
///
/// Projections use the quaternion inner product with the coefficient on the
/// right, `v ← v − u (u* v)`, so the result is orthogonal in the right
/// quaternion span.
pub fn orthonormalize_against(basis: &QMatrix, v: &QVector) -> Result<QVector> {
    if basis.rows() != v.len() {
        return Err(Error::shape(format!(
            "basis has {} rows, vector has {} entries",
            basis.rows(),
            v.len()
        )));
    }
    let columns: Vec<QVector> = (0..basis.cols()).map(|j| basis.column(j)).collect();
    let mut x = v.clone();
    for _pass in 0..2 {
        for u in &columns {
            let c = u.dot(&x)?;
            x.sub_mul_right(u, c);
        }
    }
    let norm = x.norm2();
    if !(norm >= RANK_TOLERANCE) {
        return Err(Error::RankDeficient {
            column: basis.cols(),
            residual: norm,
        });
    }
    Ok(x.scale(1.0 / norm))
}

/// Replaces column `t` (0-based) of `w` by its orthonormalization against
/// columns `0..t`, which must already be orthonormal.
pub fn orthonormalize(w: &QMatrix, t: usize) -> Result<QMatrix> {
    if t >= w.cols() {
        return Err(Error::shape(format!(
            "column index {t} out of range for {} columns",
            w.cols()
        )));
    }
    let previous = w.leading_columns(t)?;
    let col = orthonormalize_against(&previous, &w.column(t)).map_err(|e| match e {
        Error::RankDeficient { residual, .. } => Error::RankDeficient { column: t, residual },
        other => other,
    })?;
    let mut out = w.clone();
    out.set_column(t, &col)?;
    Ok(out)
}
