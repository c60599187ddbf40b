//! Test-side oracles built without the library's own product or layout code.
#![allow(dead_code)]

use g2dqpca::{QMatrix, QVector, Quaternion};
use nalgebra::{Complex, DMatrix, DVector, Matrix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_q(rng: &mut impl Rng) -> Quaternion {
    Quaternion::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    )
}

pub fn rand_matrix(rng: &mut impl Rng, m: usize, n: usize) -> QMatrix {
    QMatrix::from_fn(m, n, |_, _| rand_q(rng))
}

pub fn rand_vector(rng: &mut impl Rng, n: usize) -> QVector {
    QVector::from_quaternions(&(0..n).map(|_| rand_q(rng)).collect::<Vec<_>>())
}

/// Random pure quaternion image with channels in [0, 255].
pub fn rand_image(rng: &mut impl Rng, m: usize, n: usize) -> QMatrix {
    QMatrix::from_fn(m, n, |_, _| {
        Quaternion::pure(
            rng.random_range(0.0..255.0),
            rng.random_range(0.0..255.0),
            rng.random_range(0.0..255.0),
        )
    })
}

/// `a0 + a1 i + a2 j + a3 k = z + w j` with `z = a0 + a1 i`, `w = a2 + a3 i`,
/// embedded as `[[z, w], [−w̄, z̄]]`.
pub fn to_complex(a: Quaternion) -> Matrix2<Complex<f64>> {
    let z = Complex::new(a.w0, a.w1);
    let w = Complex::new(a.w2, a.w3);
    Matrix2::new(z, w, -w.conj(), z.conj())
}

pub fn from_complex(m: &Matrix2<Complex<f64>>) -> Quaternion {
    Quaternion::new(m[(0, 0)].re, m[(0, 0)].im, m[(0, 1)].re, m[(0, 1)].im)
}

/// Hamilton product through the complex 2×2 embedding.
pub fn qmul_oracle(a: Quaternion, b: Quaternion) -> Quaternion {
    from_complex(&(to_complex(a) * to_complex(b)))
}

/// 4m×4n block matrix with block rows
/// `[A0 −A1 −A2 −A3; A1 A0 −A3 A2; A2 A3 A0 −A1; A3 −A2 A1 A0]`.
pub fn chi(a: &QMatrix) -> DMatrix<f64> {
    let (m, n) = a.dims();
    let pattern: [[(usize, f64); 4]; 4] = [
        [(0, 1.0), (1, -1.0), (2, -1.0), (3, -1.0)],
        [(1, 1.0), (0, 1.0), (3, -1.0), (2, 1.0)],
        [(2, 1.0), (3, 1.0), (0, 1.0), (1, -1.0)],
        [(3, 1.0), (2, -1.0), (1, 1.0), (0, 1.0)],
    ];
    DMatrix::from_fn(4 * m, 4 * n, |r, c| {
        let (bi, i, bj, j) = (r / m, r % m, c / n, c % n);
        let (plane, sign) = pattern[bi][bj];
        let q = a.get(i, j).as_array();
        sign * q[plane]
    })
}

/// `[w0; w1; w2; w3]`.
pub fn gamma(w: &QVector) -> DVector<f64> {
    let n = w.len();
    DVector::from_fn(4 * n, |r, _| w.get(r % n).as_array()[r / n])
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// `‖A − B‖_F / max(‖A‖_F, ‖B‖_F)`.
pub fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

/// `(Σ_i |w_i|^p)^(1/p)` from the four coefficients of each entry.
pub fn lp_oracle(w: &QVector, p: f64) -> f64 {
    let mods = (0..w.len()).map(|i| {
        let c = w.get(i).as_array();
        (c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3]).sqrt()
    });
    if p.is_infinite() {
        mods.fold(0.0, f64::max)
    } else {
        mods.map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `Real(v* w)` as the Euclidean inner product of the stacked coefficients.
pub fn real_inner(v: &QVector, w: &QVector) -> f64 {
    gamma(v).dot(&gamma(w))
}

/// `Σ_i ‖F_i w‖_2^2` through the real representations.
pub fn objective_oracle(samples: &[QMatrix], w: &QVector) -> f64 {
    let g = gamma(w);
    samples.iter().map(|f| (chi(f) * &g).norm_squared()).sum()
}

/// Eigenpairs of the symmetric matrix `Σ_i χ(F_i)ᵀ χ(F_i)`, eigenvalues descending.
pub fn scatter_eigen(samples: &[QMatrix]) -> (Vec<f64>, DMatrix<f64>) {
    let n4 = 4 * samples[0].cols();
    let mut c = DMatrix::<f64>::zeros(n4, n4);
    for f in samples {
        let x = chi(f);
        c += x.transpose() * &x;
    }
    let c = (&c + c.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n4).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(n4, n4, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Sine of the largest principal angle between the column spans of `q`
/// (orthonormal columns) and of `e` (orthonormal columns).
pub fn max_principal_sine(q: &DMatrix<f64>, e: &DMatrix<f64>) -> f64 {
    let resid = q - e * (e.transpose() * q);
    resid.singular_values().max()
}
