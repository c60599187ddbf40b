use crate::error::{Error, Result};

use super::norm::{pnorm_of_magnitudes, NormOrder};
use super::quaternion::Quaternion;

/// Quaternion column vector stored as four real coefficient planes.
#[derive(Debug, Clone, PartialEq)]
pub struct QVector {
    planes: [Vec<f64>; 4],
}

impl QVector {
    pub fn zeros(n: usize) -> Self {
        QVector {
            planes: std::array::from_fn(|_| vec![0.0; n]),
        }
    }

    pub fn from_planes(planes: [Vec<f64>; 4]) -> Result<Self> {
        let n = planes[0].len();
        if planes.iter().any(|p| p.len() != n) {
            return Err(Error::shape("quaternion vector planes differ in length"));
        }
        Ok(QVector { planes })
    }

    pub fn from_quaternions(entries: &[Quaternion]) -> Self {
        let mut v = QVector::zeros(entries.len());
        for (i, q) in entries.iter().enumerate() {
            v.set(i, *q);
        }
        v
    }

    /// Real vector embedded in the real plane.
    pub fn from_real(values: &[f64]) -> Self {
        let n = values.len();
        QVector {
            planes: [values.to_vec(), vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }

    pub fn len(&self) -> usize {
        self.planes[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
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

    pub fn into_planes(self) -> [Vec<f64>; 4] {
        self.planes
    }

    pub fn get(&self, i: usize) -> Quaternion {
        Quaternion::new(
            self.planes[0][i],
            self.planes[1][i],
            self.planes[2][i],
            self.planes[3][i],
        )
    }

    pub fn set(&mut self, i: usize, q: Quaternion) {
        self.planes[0][i] = q.w0;
        self.planes[1][i] = q.w1;
        self.planes[2][i] = q.w2;
        self.planes[3][i] = q.w3;
    }

    pub fn iter(&self) -> impl Iterator<Item = Quaternion> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn to_quaternions(&self) -> Vec<Quaternion> {
        self.iter().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.planes.iter().all(|p| p.iter().all(|&x| x == 0.0))
    }

    /// Entry moduli `|w_i|`.
    pub fn abs(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let s = self.planes[0][i] * self.planes[0][i]
                    + self.planes[1][i] * self.planes[1][i]
                    + self.planes[2][i] * self.planes[2][i]
                    + self.planes[3][i] * self.planes[3][i];
                s.sqrt()
            })
            .collect()
    }

    /// Entry-wise `w_i / |w_i|`, zero entries stay zero.
    pub fn sign(&self) -> QVector {
        let mags = self.abs();
        let mut out = QVector::zeros(self.len());
        for c in 0..4 {
            for (i, &m) in mags.iter().enumerate() {
                if m != 0.0 {
                    out.planes[c][i] = self.planes[c][i] / m;
                }
            }
        }
        out
    }

    /// Multiplies entry `i` (all four planes) by the real factor `factors[i]`.
    pub fn scale_entries(&self, factors: &[f64]) -> Result<QVector> {
        if factors.len() != self.len() {
            return Err(Error::shape(format!(
                "entry scaling: vector has {} entries, {} factors given",
                self.len(),
                factors.len()
            )));
        }
        let mut out = self.clone();
        for plane in out.planes.iter_mut() {
            for (x, f) in plane.iter_mut().zip(factors) {
                *x *= f;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: f64) -> QVector {
        let mut out = self.clone();
        out.planes
            .iter_mut()
            .for_each(|p| p.iter_mut().for_each(|x| *x *= k));
        out
    }

    /// Right multiplication by a quaternion scalar, `w q`.
    pub fn mul_right(&self, q: Quaternion) -> QVector {
        let mut out = QVector::zeros(self.len());
        for i in 0..self.len() {
            out.set(i, self.get(i) * q);
        }
        out
    }

    /// Quaternion inner product `self* other = Σ conj(self_i) other_i`.
    pub fn dot(&self, other: &QVector) -> Result<Quaternion> {
        self.check_len(other, "inner product")?;
        Ok((0..self.len()).fold(Quaternion::ZERO, |acc, i| {
            acc + self.get(i).conj() * other.get(i)
        }))
    }

    /// `Real(self* other)`, which equals the dot product of the real stacks.
    pub fn real_dot(&self, other: &QVector) -> Result<f64> {
        self.check_len(other, "real inner product")?;
        Ok((0..4)
            .map(|c| {
                self.planes[c]
                    .iter()
                    .zip(&other.planes[c])
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
            })
            .sum())
    }

    pub fn norm2(&self) -> f64 {
        self.abs().iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// L_p norm with the 2-absolute value inside.
    pub fn lp_norm(&self, p: NormOrder) -> f64 {
        pnorm_of_magnitudes(self.abs().into_iter(), p)
    }

    pub fn sub(&self, other: &QVector) -> Result<QVector> {
        self.check_len(other, "subtraction")?;
        let mut out = self.clone();
        for c in 0..4 {
            for (x, y) in out.planes[c].iter_mut().zip(&other.planes[c]) {
                *x -= y;
            }
        }
        Ok(out)
    }

    /// `self -= u q`, with `q` applied on the right.
    pub(crate) fn sub_mul_right(&mut self, u: &QVector, q: Quaternion) {
        for i in 0..self.len() {
            let v = self.get(i) - u.get(i) * q;
            self.set(i, v);
        }
    }

    fn check_len(&self, other: &QVector, what: &str) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::shape(format!(
                "{what}: lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }
}

/// Element-wise moduli of a quaternion vector.
pub fn vec_abs(w: &QVector) -> Vec<f64> {
    w.abs()
}

/// Element-wise quaternion sign of a vector.
pub fn vec_sign(w: &QVector) -> QVector {
    w.sign()
}

/// The coefficient-wise product: each of the four real planes multiplied
/// element by element, independently of the others.
pub fn coeffwise_mul(a: &QVector, b: &QVector) -> Result<QVector> {
    a.check_len(b, "coefficient-wise product")?;
    let planes = std::array::from_fn(|c| {
        a.planes[c]
            .iter()
            .zip(&b.planes[c])
            .map(|(x, y)| x * y)
            .collect()
    });
    Ok(QVector { planes })
}

/// `(Σ |w_i|_s^p)^(1/p)`; `p = ∞` gives `max_i |w_i|_s`.
pub fn lsp_norm(w: &QVector, s: f64, p: NormOrder) -> Result<f64> {
    p.validate()?;
    let mags = w
        .iter()
        .map(|q| q.s_abs(s))
        .collect::<Result<Vec<f64>>>()?;
    Ok(pnorm_of_magnitudes(mags.into_iter(), p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Quaternion as Q;

    #[test]
    fn abs_and_sign() {
        let w = QVector::from_quaternions(&[Q::pure(3.0, 4.0, 0.0), Q::ZERO]);
        assert_eq!(vec_abs(&w), vec![5.0, 0.0]);

        let w = QVector::from_quaternions(&[Q::ZERO, -Q::K]);
        assert_eq!(vec_sign(&w).to_quaternions(), vec![Q::ZERO, -Q::K]);

        let w = QVector::from_quaternions(&[Q::real(2.0), Q::I.scale(2.0)]);
        assert_eq!(vec_sign(&w).to_quaternions(), vec![Q::ONE, Q::I]);
    }

    #[test]
    fn lsp_examples() {
        let w = QVector::from_quaternions(&[Q::ONE, Q::I]);
        let v = lsp_norm(&w, 2.0, NormOrder::Finite(2.0)).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-15);

        let w = QVector::from_quaternions(&[Q::pure(3.0, 4.0, 0.0), Q::ZERO]);
        assert_eq!(lsp_norm(&w, 2.0, NormOrder::Finite(1.0)).unwrap(), 5.0);
        assert_eq!(lsp_norm(&w, 2.0, NormOrder::Infinity).unwrap(), 5.0);
        assert_eq!(lsp_norm(&w, 1.0, NormOrder::Infinity).unwrap(), 7.0);
    }

    #[test]
    fn lsp_rejects_bad_parameters() {
        let w = QVector::from_quaternions(&[Q::ONE]);
        assert!(lsp_norm(&w, 0.0, NormOrder::Finite(2.0)).is_err());
        assert!(lsp_norm(&w, 2.0, NormOrder::Finite(0.0)).is_err());
        assert!(lsp_norm(&w, 2.0, NormOrder::Finite(-1.0)).is_err());
    }

    #[test]
    fn coeffwise_examples() {
        let a = QVector::from_quaternions(&[Q::new(1.0, 1.0, 0.0, 0.0)]);
        let b = QVector::from_quaternions(&[Q::new(2.0, 3.0, 0.0, 0.0)]);
        assert_eq!(coeffwise_mul(&a, &b).unwrap().get(0), Q::new(2.0, 3.0, 0.0, 0.0));

        let w = QVector::from_quaternions(&[Q::new(0.5, -2.0, 3.0, 7.0), Q::pure(1.0, 2.0, 3.0)]);
        let ones = QVector::from_quaternions(&[Q::new(1.0, 1.0, 1.0, 1.0); 2]);
        assert_eq!(coeffwise_mul(&w, &ones).unwrap(), w);

        let a = QVector::from_quaternions(&[Q::I]);
        let b = QVector::from_quaternions(&[Q::J]);
        assert!(coeffwise_mul(&a, &b).unwrap().is_zero());

        let c = QVector::zeros(3);
        assert!(matches!(coeffwise_mul(&a, &c), Err(Error::Shape(_))));
    }

    #[test]
    fn real_dot_matches_quaternion_dot() {
        let a = QVector::from_quaternions(&[Q::new(1.0, -2.0, 0.5, 3.0), Q::new(0.2, 0.1, -0.4, 1.0)]);
        let b = QVector::from_quaternions(&[Q::new(-1.0, 0.3, 2.0, 0.0), Q::new(1.5, -0.1, 0.4, 2.0)]);
        let d = a.dot(&b).unwrap();
        assert!((d.w0 - a.real_dot(&b).unwrap()).abs() < 1e-14);
    }
}
