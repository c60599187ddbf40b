//! Real structure-preserving representations.
//!
//! A quaternion matrix `A = A0 + A1 i + A2 j + A3 k` (m×n) maps to the
//! 4m×4n real block matrix
//!
//! ```text
//! [ A0 -A1 -A2 -A3 ]
//! [ A1  A0 -A3  A2 ]
//! [ A2  A3  A0 -A1 ]
//! [ A3 -A2  A1  A0 ]
//! ```
//!
//! and a quaternion vector to the stacked column `[w0; w1; w2; w3]`, so that
//! `(AB)^χ = A^χ B^χ` and `(Aw)^γ = A^χ w^γ`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::matrix::QMatrix;
use super::norm::{pnorm_of_magnitudes, NormOrder};
use super::vector::QVector;

/// `(plane, sign)` held by block `(row, col)` of the 4×4 block pattern.
const BLOCK_PATTERN: [[(usize, f64); 4]; 4] = [
    [(0, 1.0), (1, -1.0), (2, -1.0), (3, -1.0)],
    [(1, 1.0), (0, 1.0), (3, -1.0), (2, 1.0)],
    [(2, 1.0), (3, 1.0), (0, 1.0), (1, -1.0)],
    [(3, 1.0), (2, -1.0), (1, 1.0), (0, 1.0)],
];

#[derive(Debug, Clone, PartialEq)]
pub struct RealMatRep(pub DMatrix<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct RealVecRep(pub DVector<f64>);

pub fn real_rep_matrix(a: &QMatrix) -> RealMatRep {
    let (m, n) = a.dims();
    let mut out = DMatrix::zeros(4 * m, 4 * n);
    for (br, row) in BLOCK_PATTERN.iter().enumerate() {
        for (bc, &(plane, sign)) in row.iter().enumerate() {
            let src = a.plane(plane);
            for i in 0..m {
                for j in 0..n {
                    out[(br * m + i, bc * n + j)] = sign * src[i * n + j];
                }
            }
        }
    }
    RealMatRep(out)
}

pub fn real_rep_vector(w: &QVector) -> RealVecRep {
    let n = w.len();
    let mut out = DVector::zeros(4 * n);
    for c in 0..4 {
        out.rows_mut(c * n, n).copy_from_slice(w.plane(c));
    }
    RealVecRep(out)
}

impl RealMatRep {
    /// Inverse of [`real_rep_matrix`]. The block pattern must hold exactly.
    pub fn to_qmatrix(&self) -> Result<QMatrix> {
        let (rr, cc) = self.0.shape();
        if rr % 4 != 0 || cc % 4 != 0 {
            return Err(Error::MalformedRepresentation(format!(
                "{rr}x{cc} is not a multiple of 4 in both dimensions"
            )));
        }
        let (m, n) = (rr / 4, cc / 4);
        let planes: [Vec<f64>; 4] = std::array::from_fn(|c| {
            let mut p = vec![0.0; m * n];
            for i in 0..m {
                for j in 0..n {
                    p[i * n + j] = self.0[(c * m + i, j)];
                }
            }
            p
        });
        for (br, row) in BLOCK_PATTERN.iter().enumerate() {
            for (bc, &(plane, sign)) in row.iter().enumerate() {
                for i in 0..m {
                    for j in 0..n {
                        let expected = sign * planes[plane][i * n + j];
                        let found = self.0[(br * m + i, bc * n + j)];
                        if found != expected {
                            return Err(Error::MalformedRepresentation(format!(
                                "block ({br},{bc}) entry ({i},{j}) is {found}, the pattern requires {expected}"
                            )));
                        }
                    }
                }
            }
        }
        QMatrix::from_planes(m, n, planes)
    }
}

impl RealVecRep {
    pub fn to_qvector(&self) -> Result<QVector> {
        let len = self.0.len();
        if !len.is_multiple_of(4) {
            return Err(Error::MalformedRepresentation(format!(
                "stacked vector length {len} is not a multiple of 4"
            )));
        }
        let n = len / 4;
        let planes = std::array::from_fn(|c| self.0.rows(c * n, n).iter().copied().collect());
        QVector::from_planes(planes)
    }

    fn quaternion_count(&self) -> usize {
        self.0.len() / 4
    }

    /// Modulus of quaternion entry `i`, read off the four stacked groups.
    fn group_modulus(&self, i: usize) -> f64 {
        let n = self.quaternion_count();
        (0..4)
            .map(|c| self.0[c * n + i] * self.0[c * n + i])
            .sum::<f64>()
            .sqrt()
    }

    /// `‖w^γ‖_{2,p}`: the L_p norm of the per-entry group moduli.
    pub fn group_norm(&self, p: NormOrder) -> f64 {
        pnorm_of_magnitudes((0..self.quaternion_count()).map(|i| self.group_modulus(i)), p)
    }

    /// `absQ(w^γ)`: each entry modulus replicated into all four groups.
    pub fn abs_q(&self) -> RealVecRep {
        let n = self.quaternion_count();
        let mut out = DVector::zeros(4 * n);
        for i in 0..n {
            let m = self.group_modulus(i);
            for c in 0..4 {
                out[c * n + i] = m;
            }
        }
        RealVecRep(out)
    }

    /// `signQ(w^γ)`: the stacked representation of the entry-wise sign.
    pub fn sign_q(&self) -> RealVecRep {
        let n = self.quaternion_count();
        let mut out = DVector::zeros(4 * n);
        for i in 0..n {
            let m = self.group_modulus(i);
            if m != 0.0 {
                for c in 0..4 {
                    out[c * n + i] = self.0[c * n + i] / m;
                }
            }
        }
        RealVecRep(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Quaternion as Q;

    #[test]
    fn imaginary_unit_layout() {
        let a = QMatrix::from_fn(1, 1, |_, _| Q::I);
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, -1.0, 0.0, 0.0, //
                1.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, -1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        );
        assert_eq!(real_rep_matrix(&a).0, expected);
    }

    #[test]
    fn one_is_identity() {
        let a = QMatrix::identity(1);
        assert_eq!(real_rep_matrix(&a).0, DMatrix::identity(4, 4));
    }

    #[test]
    fn vector_stack_order() {
        let w = QVector::from_quaternions(&[Q::new(1.0, 2.0, 3.0, 4.0), Q::new(5.0, 6.0, 7.0, 8.0)]);
        let g = real_rep_vector(&w);
        assert_eq!(g.0.as_slice(), &[1.0, 5.0, 2.0, 6.0, 3.0, 7.0, 4.0, 8.0]);
        assert_eq!(g.to_qvector().unwrap(), w);
    }

    #[test]
    fn inverse_round_trip_and_malformed() {
        let a = QMatrix::from_fn(2, 3, |i, j| Q::new(i as f64, j as f64 - 1.0, 0.5, (i + j) as f64));
        let rep = real_rep_matrix(&a);
        assert_eq!(rep.to_qmatrix().unwrap(), a);

        let mut bad = rep.clone();
        bad.0[(0, 4)] += 1.0;
        assert!(matches!(bad.to_qmatrix(), Err(Error::MalformedRepresentation(_))));

        let odd = RealMatRep(DMatrix::zeros(6, 4));
        assert!(matches!(odd.to_qmatrix(), Err(Error::MalformedRepresentation(_))));
        let odd = RealVecRep(DVector::zeros(7));
        assert!(odd.to_qvector().is_err());
    }

    #[test]
    fn abs_q_and_sign_q() {
        let w = QVector::from_quaternions(&[Q::pure(3.0, 4.0, 0.0), Q::ZERO]);
        let g = real_rep_vector(&w);
        assert_eq!(g.abs_q().0.as_slice(), &[5.0, 0.0, 5.0, 0.0, 5.0, 0.0, 5.0, 0.0]);
        assert_eq!(g.sign_q().to_qvector().unwrap(), w.sign());
    }
}
