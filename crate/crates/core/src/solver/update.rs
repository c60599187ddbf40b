//! One minorization–maximization step: the objective, the linearization
//! vector `v` and the closed-form maximizer for every `p` regime.

use crate::error::{Error, Result};
use crate::qcore::{qmatvec, qmatvec_adjoint, NormOrder, QMatrix, QVector};

fn check_samples(samples: &[QMatrix], w: &QVector) -> Result<()> {
    if let Some(bad) = samples.iter().find(|f| f.cols() != w.len()) {
        return Err(Error::shape(format!(
            "sample has {} columns, projection vector has {} entries",
            bad.cols(),
            w.len()
        )));
    }
    Ok(())
}

/// `Σ_i ‖F_i w‖_s^s`, with the 2-absolute value on each entry.
pub fn objective(samples: &[QMatrix], w: &QVector, s: f64) -> Result<f64> {
    check_samples(samples, w)?;
    let mut total = 0.0;
    for f in samples {
        let y = qmatvec(f, w)?;
        total += if s == 2.0 {
            (0..4).map(|c| y.plane(c).iter().map(|x| x * x).sum::<f64>()).sum::<f64>()
        } else {
            y.abs().iter().map(|a| a.powf(s)).sum::<f64>()
        };
    }
    Ok(total)
}

/// `Σ_i F_i* (|F_i w|^{s-1} ⊛ sign(F_i w))`, the gradient direction of the
/// objective at `w` (up to the factor `s`).
pub fn compute_v(samples: &[QMatrix], w: &QVector, s: f64) -> Result<QVector> {
    check_samples(samples, w)?;
    let mut v = QVector::zeros(w.len());
    for f in samples {
        let y = qmatvec(f, w)?;
        let z = if s == 2.0 {
            y
        } else {
            // |y_r|^{s-1} sign(y_r) = y_r |y_r|^{s-2}, and 0 where y_r = 0
            let factors: Vec<f64> = y
                .abs()
                .into_iter()
                .map(|a| if a == 0.0 { 0.0 } else { a.powf(s - 2.0) })
                .collect();
            y.scale_entries(&factors)?
        };
        let contribution = qmatvec_adjoint(f, &z)?;
        for c in 0..4 {
            for (acc, x) in v.plane_mut(c).iter_mut().zip(contribution.plane(c)) {
                *acc += x;
            }
        }
    }
    Ok(v)
}

fn normalize_lp(u: QVector, p: NormOrder) -> Result<QVector> {
    let norm = u.lp_norm(p);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::DegenerateDirection(format!(
            "update has L_p norm {norm}, cannot normalize"
        )));
    }
    Ok(u.scale(1.0 / norm))
}

/// Closed-form update of the projection vector.
///
/// * `0 < p < 1`: `u = |w_round_init| ⊛ |w_prev|^{1-p} ⊛ v`, then `u / ‖u‖_p`.
///   The magnitudes act as real per-entry factors on all four planes.
/// * `p = 1`: one-hot at the first entry of maximal modulus, holding `sign(v_j)`.
/// * `1 < p < ∞`: `u = |v|^{q-1} ⊛ sign(v)` with `q = p/(p-1)`, then `u / ‖u‖_p`.
/// * `p = ∞`: `sign(v)`.
pub fn update_w(v: &QVector, w_prev: &QVector, w_round_init: &QVector, p: NormOrder) -> Result<QVector> {
    p.validate()?;
    if v.is_zero() {
        return Err(Error::DegenerateDirection(
            "linearization vector is identically zero".into(),
        ));
    }
    match p {
        NormOrder::Infinity => Ok(v.sign()),
        NormOrder::Finite(1.0) => {
            let mags = v.abs();
            let mut best = 0;
            for (i, &m) in mags.iter().enumerate() {
                if m > mags[best] {
                    best = i;
                }
            }
            let mut w = QVector::zeros(v.len());
            w.set(best, v.get(best).sign());
            Ok(w)
        }
        NormOrder::Finite(p) if p > 1.0 => {
            let q = p / (p - 1.0);
            let factors: Vec<f64> = v.abs().into_iter().map(|a| a.powf(q - 1.0)).collect();
            normalize_lp(v.sign().scale_entries(&factors)?, NormOrder::Finite(p))
        }
        NormOrder::Finite(p) => {
            if w_prev.len() != v.len() || w_round_init.len() != v.len() {
                return Err(Error::shape(format!(
                    "update vectors have lengths {}, {}, {}",
                    v.len(),
                    w_prev.len(),
                    w_round_init.len()
                )));
            }
            let factors: Vec<f64> = w_round_init
                .abs()
                .into_iter()
                .zip(w_prev.abs())
                .map(|(a0, ak)| a0 * ak.powf(1.0 - p))
                .collect();
            normalize_lp(v.scale_entries(&factors)?, NormOrder::Finite(p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Quaternion as Q;

    fn diag12() -> Vec<QMatrix> {
        vec![QMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]).unwrap()]
    }

    #[test]
    fn objective_examples() {
        let eye = vec![QMatrix::identity(2)];
        let e1 = QVector::from_real(&[1.0, 0.0]);
        assert_eq!(objective(&eye, &e1, 2.0).unwrap(), 1.0);

        let e2 = QVector::from_real(&[0.0, 1.0]);
        assert_eq!(objective(&diag12(), &e2, 2.0).unwrap(), 4.0);

        let h = 1.0 / 2f64.sqrt();
        let w = QVector::from_real(&[h, h]);
        let f = objective(&diag12(), &w, 1.0).unwrap();
        assert!((f - 3.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!((f - 2.1213).abs() < 1e-4);
    }

    #[test]
    fn compute_v_examples() {
        let eye = vec![QMatrix::identity(2)];
        let e1 = QVector::from_real(&[1.0, 0.0]);
        assert_eq!(compute_v(&eye, &e1, 2.0).unwrap(), e1);

        let row = vec![QMatrix::from_real(1, 2, &[0.0, 2.0]).unwrap()];
        let e2 = QVector::from_real(&[0.0, 1.0]);
        assert_eq!(compute_v(&row, &e2, 2.0).unwrap(), QVector::from_real(&[0.0, 4.0]));

        let w = QVector::from_quaternions(&[Q::I.scale(2.0), Q::ZERO]);
        let v = compute_v(&eye, &w, 1.0).unwrap();
        assert_eq!(v.to_quaternions(), vec![Q::I, Q::ZERO]);
    }

    #[test]
    fn shape_mismatch() {
        let w = QVector::zeros(3);
        assert!(matches!(objective(&diag12(), &w, 2.0), Err(Error::Shape(_))));
        assert!(matches!(compute_v(&diag12(), &w, 2.0), Err(Error::Shape(_))));
    }

    #[test]
    fn update_examples() {
        let none = QVector::zeros(2);
        let v = QVector::from_real(&[0.0, 4.0]);
        let w = update_w(&v, &none, &none, NormOrder::Finite(2.0)).unwrap();
        assert_eq!(w, QVector::from_real(&[0.0, 1.0]));

        let v = QVector::from_quaternions(&[Q::I.scale(3.0), Q::J.scale(4.0)]);
        let w = update_w(&v, &none, &none, NormOrder::Finite(1.0)).unwrap();
        assert_eq!(w.to_quaternions(), vec![Q::ZERO, Q::J]);

        let w = update_w(&v, &none, &none, NormOrder::Infinity).unwrap();
        assert_eq!(w.to_quaternions(), vec![Q::I, Q::J]);
    }

    #[test]
    fn p_one_ties_pick_lowest_index() {
        let none = QVector::zeros(3);
        let v = QVector::from_quaternions(&[Q::ONE, Q::J.scale(-2.0), Q::K.scale(2.0)]);
        let w = update_w(&v, &none, &none, NormOrder::Finite(1.0)).unwrap();
        assert_eq!(w.to_quaternions(), vec![Q::ZERO, -Q::J, Q::ZERO]);
    }

    #[test]
    fn zero_v_is_degenerate() {
        let z = QVector::zeros(2);
        for p in [0.5, 1.0, 2.0] {
            let e = update_w(&z, &z, &z, NormOrder::Finite(p)).unwrap_err();
            assert!(matches!(e, Error::DegenerateDirection(_)));
        }
        assert!(update_w(&z, &z, &z, NormOrder::Infinity).is_err());
    }

    #[test]
    fn finite_p_updates_are_normalized() {
        let v = QVector::from_quaternions(&[
            Q::new(0.3, -1.0, 2.0, 0.5),
            Q::new(-0.7, 0.2, 0.1, 1.1),
            Q::new(1.5, 0.0, -0.4, 0.3),
        ]);
        let w0 = QVector::from_quaternions(&[Q::new(0.2, 0.1, -0.3, 0.4); 3]);
        let wk = QVector::from_quaternions(&[
            Q::new(0.5, 0.1, 0.0, 0.0),
            Q::new(0.0, -0.2, 0.3, 0.0),
            Q::new(0.1, 0.1, 0.1, 0.1),
        ]);
        for p in [0.3, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0] {
            let order = NormOrder::Finite(p);
            let w = update_w(&v, &wk, &w0, order).unwrap();
            assert!((w.lp_norm(order) - 1.0).abs() < 1e-12, "p = {p}");
        }
        let w = update_w(&v, &wk, &w0, NormOrder::Infinity).unwrap();
        assert!((w.lp_norm(NormOrder::Infinity) - 1.0).abs() < 1e-15);
    }
}
