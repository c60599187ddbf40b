use crate::error::{Error, Result};

use super::quaternion::Quaternion;
use super::vector::QVector;

/// Plane-level Hamilton product table: for each output plane, the
/// `(left plane, right plane, sign)` triples that contribute to it.
const PRODUCT_TABLE: [[(usize, usize, f64); 4]; 4] = [
    [(0, 0, 1.0), (1, 1, -1.0), (2, 2, -1.0), (3, 3, -1.0)],
    [(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, -1.0)],
    [(0, 2, 1.0), (1, 3, -1.0), (2, 0, 1.0), (3, 1, 1.0)],
    [(0, 3, 1.0), (1, 2, 1.0), (2, 1, -1.0), (3, 0, 1.0)],
];

/// Dense quaternion matrix stored as four row-major real planes.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    planes: [Vec<f64>; 4],
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            planes: std::array::from_fn(|_| vec![0.0; rows * cols]),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.planes[0][i * n + i] = 1.0;
        }
        m
    }

    pub fn from_planes(rows: usize, cols: usize, planes: [Vec<f64>; 4]) -> Result<Self> {
        if planes.iter().any(|p| p.len() != rows * cols) {
            return Err(Error::shape(format!(
                "every plane of a {rows}x{cols} quaternion matrix needs {} values",
                rows * cols
            )));
        }
        Ok(QMatrix { rows, cols, planes })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut m = QMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Real matrix in the real plane, given row-major.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        let mut planes: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; rows * cols]);
        planes[0] = values.to_vec();
        QMatrix::from_planes(rows, cols, planes)
    }

    pub fn from_columns(rows: usize, columns: &[QVector]) -> Result<Self> {
        let mut m = QMatrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            m.set_column(j, col)?;
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        &self.planes[c]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.planes[c]
    }

    pub fn planes(&self) -> &[Vec<f64>; 4] {
        &self.planes
    }

    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        let k = i * self.cols + j;
        Quaternion::new(
            self.planes[0][k],
            self.planes[1][k],
            self.planes[2][k],
            self.planes[3][k],
        )
    }

    pub fn set(&mut self, i: usize, j: usize, q: Quaternion) {
        let k = i * self.cols + j;
        self.planes[0][k] = q.w0;
        self.planes[1][k] = q.w1;
        self.planes[2][k] = q.w2;
        self.planes[3][k] = q.w3;
    }

    pub fn column(&self, j: usize) -> QVector {
        let mut v = QVector::zeros(self.rows);
        for i in 0..self.rows {
            v.set(i, self.get(i, j));
        }
        v
    }

    pub fn set_column(&mut self, j: usize, v: &QVector) -> Result<()> {
        if v.len() != self.rows || j >= self.cols {
            return Err(Error::shape(format!(
                "cannot place a length-{} column at index {j} of a {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        for i in 0..self.rows {
            self.set(i, j, v.get(i));
        }
        Ok(())
    }

    /// The first `r` columns.
    pub fn leading_columns(&self, r: usize) -> Result<QMatrix> {
        if r > self.cols {
            return Err(Error::shape(format!(
                "asked for {r} leading columns of a matrix with {}",
                self.cols
            )));
        }
        let mut out = QMatrix::zeros(self.rows, r);
        for i in 0..self.rows {
            for j in 0..r {
                out.set(i, j, self.get(i, j));
            }
        }
        Ok(out)
    }

    /// Appends one column on the right.
    pub fn push_column(&self, v: &QVector) -> Result<QMatrix> {
        if v.len() != self.rows {
            return Err(Error::shape(format!(
                "column of length {} for a matrix with {} rows",
                v.len(),
                self.rows
            )));
        }
        let mut out = QMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            out.set(i, self.cols, v.get(i));
        }
        Ok(out)
    }

    pub fn is_pure(&self) -> bool {
        self.planes[0].iter().all(|&x| x == 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.planes.iter().all(|p| p.iter().all(|&x| x == 0.0))
    }

    pub fn conj_transpose(&self) -> QMatrix {
        let mut out = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn add(&self, other: &QMatrix) -> Result<QMatrix> {
        self.zip_planes(other, "addition", |a, b| a + b)
    }

    pub fn sub(&self, other: &QMatrix) -> Result<QMatrix> {
        self.zip_planes(other, "subtraction", |a, b| a - b)
    }

    pub fn scale(&self, k: f64) -> QMatrix {
        let mut out = self.clone();
        out.planes
            .iter_mut()
            .for_each(|p| p.iter_mut().for_each(|x| *x *= k));
        out
    }

    /// Scales column `j` by the real factor `factors[j]`.
    pub fn scale_columns(&self, factors: &[f64]) -> Result<QMatrix> {
        if factors.len() != self.cols {
            return Err(Error::shape(format!(
                "{} column factors for {} columns",
                factors.len(),
                self.cols
            )));
        }
        let mut out = self.clone();
        for plane in out.planes.iter_mut() {
            for row in plane.chunks_mut(self.cols.max(1)) {
                for (x, f) in row.iter_mut().zip(factors) {
                    *x *= f;
                }
            }
        }
        Ok(out)
    }

    /// Sum of squares of all `4mn` real coefficients.
    pub fn frobenius_sqr(&self) -> f64 {
        self.planes
            .iter()
            .map(|p| p.iter().map(|x| x * x).sum::<f64>())
            .sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.frobenius_sqr().sqrt()
    }

    fn zip_planes(&self, other: &QMatrix, what: &str, f: impl Fn(f64, f64) -> f64) -> Result<QMatrix> {
        if self.dims() != other.dims() {
            return Err(Error::shape(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let planes = std::array::from_fn(|c| {
            self.planes[c]
                .iter()
                .zip(&other.planes[c])
                .map(|(&a, &b)| f(a, b))
                .collect()
        });
        Ok(QMatrix {
            rows: self.rows,
            cols: self.cols,
            planes,
        })
    }
}

/// `acc += sign * a * b` for row-major real matrices `a: m×k`, `b: k×n`.
fn real_gemm_acc(acc: &mut [f64], a: &[f64], b: &[f64], m: usize, k: usize, n: usize, sign: f64) {
    for i in 0..m {
        let arow = &a[i * k..(i + 1) * k];
        let crow = &mut acc[i * n..(i + 1) * n];
        for (l, &ail) in arow.iter().enumerate() {
            if ail == 0.0 {
                continue;
            }
            let s = sign * ail;
            let brow = &b[l * n..(l + 1) * n];
            for (c, &blj) in crow.iter_mut().zip(brow) {
                *c += s * blj;
            }
        }
    }
}

/// Quaternion matrix product.
pub fn qmatmul(a: &QMatrix, b: &QMatrix) -> Result<QMatrix> {
    if a.cols != b.rows {
        return Err(Error::shape(format!(
            "matrix product of {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let (m, k, n) = (a.rows, a.cols, b.cols);
    let mut out = QMatrix::zeros(m, n);
    for (c, terms) in PRODUCT_TABLE.iter().enumerate() {
        for &(pa, pb, sign) in terms {
            real_gemm_acc(&mut out.planes[c], &a.planes[pa], &b.planes[pb], m, k, n, sign);
        }
    }
    Ok(out)
}

/// Quaternion matrix-vector product `A w`.
pub fn qmatvec(a: &QMatrix, w: &QVector) -> Result<QVector> {
    if a.cols != w.len() {
        return Err(Error::shape(format!(
            "matrix-vector product of {}x{} and length {}",
            a.rows,
            a.cols,
            w.len()
        )));
    }
    let (m, k) = (a.rows, a.cols);
    let mut out = QVector::zeros(m);
    for (c, terms) in PRODUCT_TABLE.iter().enumerate() {
        let mut acc = vec![0.0; m];
        for &(pa, pb, sign) in terms {
            real_gemm_acc(&mut acc, &a.planes[pa], w.plane(pb), m, k, 1, sign);
        }
        out.plane_mut(c).copy_from_slice(&acc);
    }
    Ok(out)
}

/// `A* z` without materializing the conjugate transpose.
pub fn qmatvec_adjoint(a: &QMatrix, z: &QVector) -> Result<QVector> {
    if a.rows != z.len() {
        return Err(Error::shape(format!(
            "adjoint product of {}x{} and length {}",
            a.rows,
            a.cols,
            z.len()
        )));
    }
    let mut out = vec![Quaternion::ZERO; a.cols];
    for r in 0..a.rows {
        let zr = z.get(r);
        if zr.is_zero() {
            continue;
        }
        for (j, acc) in out.iter_mut().enumerate() {
            *acc += a.get(r, j).conj() * zr;
        }
    }
    Ok(QVector::from_quaternions(&out))
}

pub fn conj_transpose(a: &QMatrix) -> QMatrix {
    a.conj_transpose()
}

/// `‖A‖_F = sqrt(trace(A* A))`.
pub fn qfrobenius(a: &QMatrix) -> f64 {
    a.frobenius()
}
