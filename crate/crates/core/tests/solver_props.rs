mod common;

use common::*;
use g2dqpca::qcore::{qmatmul, qmatvec};
use g2dqpca::solver::{compute_v, deflate, objective, random_unit_vector, solve, solve_single, update_w, SolverConfig};
use g2dqpca::{Error, NormOrder, QMatrix, QVector, Quaternion as Q};
use proptest::prelude::*;

fn orders() -> [NormOrder; 6] {
    [0.5, 1.0, 1.5, 2.0, 3.0, f64::INFINITY].map(|p| NormOrder::new(p).unwrap())
}

fn diag12() -> Vec<QMatrix> {
    vec![QMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]).unwrap()]
}

fn config(s: f64, p: NormOrder, r: usize, seed: u64) -> SolverConfig {
    SolverConfig {
        seed,
        tol: 1e-12,
        max_iter: 500,
        ..SolverConfig::new(s, p, r)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn updates_are_feasible(seed in any::<u64>(), pi in 0usize..6, n in 1usize..6) {
        let mut rng = rng(seed);
        let p = orders()[pi];
        let v = rand_vector(&mut rng, n);
        let w0 = random_unit_vector(n, p, &mut rng);
        let wk = random_unit_vector(n, p, &mut rng);
        let w = update_w(&v, &wk, &w0, p).unwrap();
        match p {
            NormOrder::Infinity => {
                prop_assert!((lp_oracle(&w, f64::INFINITY) - 1.0).abs() < 1e-12);
            }
            NormOrder::Finite(p) => prop_assert!((lp_oracle(&w, p) - 1.0).abs() < 1e-12),
        }
    }

    #[test]
    fn ascent_and_phase_invariance(seed in any::<u64>(), si in 0usize..4, pi in 0usize..6) {
        let mut rng = rng(seed);
        let s = [1.0, 1.5, 2.0, 3.0][si];
        let samples: Vec<QMatrix> = (0..4).map(|_| rand_matrix(&mut rng, 5, 3)).collect();
        let cfg = SolverConfig { max_iter: 60, ..config(s, orders()[pi], 1, seed) };
        let w0 = random_unit_vector(3, cfg.p, &mut rng);
        let res = solve_single(&samples, &cfg, &w0).unwrap();
        for pair in res.history.windows(2) {
            prop_assert!(pair[1] >= pair[0] - 1e-10 * pair[0].abs(), "{:?}", res.history);
        }
        let q = rand_q(&mut rng);
        let unit = q.scale(1.0 / q.abs());
        let f = objective(&samples, &res.w, s).unwrap();
        let g = objective(&samples, &res.w.mul_right(unit), s).unwrap();
        prop_assert!(rel_err(f, g) < 1e-12);
    }

    #[test]
    fn objective_and_v_match_oracles(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let samples: Vec<QMatrix> = (0..3).map(|_| rand_matrix(&mut rng, 4, 3)).collect();
        let w = rand_vector(&mut rng, 3);
        prop_assert!(rel_err(objective(&samples, &w, 2.0).unwrap(), objective_oracle(&samples, &w)) < 1e-12);
        let v = compute_v(&samples, &w, 2.0).unwrap();
        let mut expect = nalgebra::DVector::zeros(12);
        for f in &samples {
            let x = chi(f);
            expect += x.transpose() * (&x * gamma(&w));
        }
        prop_assert!((gamma(&v) - &expect).norm() < 1e-12 * expect.norm());
    }

    #[test]
    fn full_rank_basis_is_unitary(seed in any::<u64>(), pi in 0usize..6) {
        let mut rng = rng(seed);
        let samples: Vec<QMatrix> = (0..3).map(|_| rand_matrix(&mut rng, 5, 3)).collect();
        let res = solve(&samples, &SolverConfig { max_iter: 50, ..config(2.0, orders()[pi], 3, seed) }).unwrap();
        prop_assert_eq!(res.rank(), 3);
        let gram = qmatmul(&res.basis.conj_transpose(), &res.basis).unwrap();
        prop_assert!(gram.sub(&QMatrix::identity(3)).unwrap().frobenius() < 1e-10);
        for f in deflate(&samples, &res.basis).unwrap() {
            prop_assert!(f.frobenius() < 1e-8);
        }
    }
}

#[test]
fn diag_example_dominant_direction() {
    let f = diag12();
    let w0 = QVector::from_real(&[0.6, 0.8]);
    let res = solve_single(&f, &config(2.0, NormOrder::Finite(2.0), 1, 0), &w0).unwrap();
    assert!((res.history.last().unwrap() - 4.0).abs() < 1e-9);
    assert!(res.w.get(0).abs() < 1e-5 && (res.w.get(1).abs() - 1.0).abs() < 1e-9);

    let res = solve_single(&f, &config(2.0, NormOrder::Finite(1.0), 1, 0), &w0).unwrap();
    assert_eq!(*res.history.last().unwrap(), 4.0);
    assert_eq!(res.w.get(0), Q::ZERO);
}

#[test]
fn isotropic_objective_constant() {
    let f = vec![QMatrix::identity(2)];
    let mut rng = rng(3);
    let w0 = random_unit_vector(2, NormOrder::Finite(2.0), &mut rng);
    let res = solve_single(&f, &config(2.0, NormOrder::Finite(2.0), 1, 0), &w0).unwrap();
    assert!(res.history.iter().all(|&h| (h - 1.0).abs() < 1e-12));
}

#[test]
fn diag_example_two_directions() {
    let res = solve(&diag12(), &config(2.0, NormOrder::Finite(2.0), 2, 9)).unwrap();
    assert!((res.weights[0] - 4.0).abs() < 1e-9 && (res.weights[1] - 1.0).abs() < 1e-9);
    assert!((res.basis.get(1, 0).abs() - 1.0).abs() < 1e-6);
    assert!((res.basis.get(0, 1).abs() - 1.0).abs() < 1e-6);
}

#[test]
fn full_rank_trace_identity() {
    let mut rng = rng(21);
    let samples: Vec<QMatrix> = (0..4).map(|_| rand_matrix(&mut rng, 6, 4)).collect();
    let res = solve(&samples, &config(2.0, NormOrder::Finite(2.0), 4, 1)).unwrap();
    let total: f64 = samples.iter().map(|f| f.frobenius().powi(2)).sum();
    assert!(rel_err(res.weights.iter().sum(), total) < 1e-9);
}

#[test]
fn rank_one_sample_second_direction_empty() {
    let mut rng = rng(4);
    let a = rand_vector(&mut rng, 3);
    let b = rand_vector(&mut rng, 2);
    let f = QMatrix::from_fn(3, 2, |i, j| a.get(i) * b.get(j).conj());
    let res = solve(&[f], &config(2.0, NormOrder::Finite(2.0), 2, 0)).unwrap();
    assert!(res.truncated || res.weights[1] < 1e-10, "{:?}", res.weights);
}

#[test]
fn deflation_examples() {
    let f = diag12();
    assert_eq!(deflate(&f, &QMatrix::zeros(2, 0)).unwrap(), f);
    let d = deflate(&f, &QMatrix::from_real(2, 1, &[0.0, 1.0]).unwrap()).unwrap();
    assert_eq!(d[0], QMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap());
}

#[test]
fn projections_vanish_after_deflation() {
    let mut rng = rng(8);
    let samples: Vec<QMatrix> = (0..5).map(|_| rand_matrix(&mut rng, 6, 5)).collect();
    for p in orders() {
        let res = solve(&samples, &SolverConfig { max_iter: 100, ..config(2.0, p, 3, 2) }).unwrap();
        let defl = deflate(&samples, &res.basis).unwrap();
        for (f, d) in samples.iter().zip(&defl) {
            for j in 0..res.rank() {
                assert!(qmatvec(d, &res.basis.column(j)).unwrap().norm2() <= 1e-8 * f.frobenius());
            }
        }
    }
}

#[test]
fn update_examples() {
    let v = QVector::from_real(&[0.0, 4.0]);
    let w = update_w(&v, &v, &v, NormOrder::Finite(2.0)).unwrap();
    assert_eq!(w, QVector::from_real(&[0.0, 1.0]));
    let v = QVector::from_quaternions(&[Q::I.scale(3.0), Q::J.scale(4.0)]);
    let w1 = update_w(&v, &v, &v, NormOrder::Finite(1.0)).unwrap();
    assert_eq!(w1.to_quaternions(), vec![Q::ZERO, Q::J]);
    let winf = update_w(&v, &v, &v, NormOrder::Infinity).unwrap();
    assert_eq!(winf.to_quaternions(), vec![Q::I, Q::J]);
    let zero = QVector::zeros(2);
    assert!(matches!(update_w(&zero, &v, &v, NormOrder::Finite(2.0)), Err(Error::DegenerateDirection(_))));
}

#[test]
fn deterministic_results() {
    let mut rng = rng(13);
    let samples: Vec<QMatrix> = (0..5).map(|_| rand_matrix(&mut rng, 4, 4)).collect();
    for p in orders() {
        let cfg = config(1.5, p, 3, 77);
        assert_eq!(solve(&samples, &cfg).unwrap(), solve(&samples, &cfg).unwrap());
    }
}

#[test]
fn r_above_n_rejected() {
    let samples = diag12();
    assert!(matches!(solve(&samples, &config(2.0, NormOrder::Finite(2.0), 3, 0)), Err(Error::InvalidParameter(_))));
    assert!(solve(&[], &config(2.0, NormOrder::Finite(2.0), 1, 0)).is_err());
}
