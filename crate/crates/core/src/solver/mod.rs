//! Projection-basis extraction by minorization–maximization with deflation.
//!
//! Each direction maximizes `Σ_i ‖F_i w‖_s^s` subject to `‖w‖_p = 1` by
//! iterating [`compute_v`] and [`update_w`] until the relative objective
//! change drops below the tolerance. The converged vector is then
//! Gram–Schmidt orthonormalized against the directions already found, its
//! weight is re-evaluated on the current deflated samples, and the samples
//! are re-deflated from the originals before the next direction starts.

mod update;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qcore::{orthonormalize_against, qmatmul, NormOrder, QMatrix, QVector, Quaternion};

pub use update::{compute_v, objective, update_w};

/// Attempts with a fresh random start after a degenerate or dependent direction.
pub const MAX_RESTARTS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub s: f64,
    pub p: NormOrder,
    /// Number of projection directions.
    pub r: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Magnitude of the random nudge applied to zero entries before a `p < 1` update.
    pub eps_perturb: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            s: 2.0,
            p: NormOrder::Finite(2.0),
            r: 1,
            tol: 1e-4,
            max_iter: 200,
            seed: 0,
            eps_perturb: 1e-8,
        }
    }
}

impl SolverConfig {
    pub fn new(s: f64, p: NormOrder, r: usize) -> Self {
        SolverConfig {
            s,
            p,
            r,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s >= 1.0) || !self.s.is_finite() {
            return Err(Error::param(format!("s must satisfy s >= 1, got {}", self.s)));
        }
        self.p.validate()?;
        if self.r == 0 {
            return Err(Error::param("r must be a positive integer"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::param(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter must be a positive integer"));
        }
        if !(self.eps_perturb >= 0.0) || !self.eps_perturb.is_finite() {
            return Err(Error::param(format!(
                "eps_perturb must be a nonnegative finite number, got {}",
                self.eps_perturb
            )));
        }
        Ok(())
    }
}

/// Outcome of one MM run for a single direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleSolve {
    pub w: QVector,
    /// Objective value at the start and after every update.
    pub history: Vec<f64>,
    pub converged: bool,
}

impl SingleSolve {
    pub fn iterations(&self) -> usize {
        self.history.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    /// n×r, orthonormal columns.
    pub basis: QMatrix,
    /// Raw objective value of each direction after orthonormalization.
    pub weights: Vec<f64>,
    pub histories: Vec<Vec<f64>>,
    pub iterations: Vec<usize>,
    pub converged: Vec<bool>,
    /// Random restarts spent per direction.
    pub restarts: Vec<usize>,
    /// Set when a direction stayed degenerate after all restarts and the
    /// basis was cut short.
    pub truncated: bool,
}

impl ProjectionResult {
    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

/// Uniform(−1, 1) coefficients in all four planes, L_p-normalized.
pub fn random_unit_vector(n: usize, p: NormOrder, rng: &mut impl Rng) -> QVector {
    loop {
        let planes: [Vec<f64>; 4] =
            std::array::from_fn(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
        let v = QVector::from_planes(planes).expect("planes share a length");
        let norm = v.lp_norm(p);
        if norm > 0.0 {
            return v.scale(1.0 / norm);
        }
    }
}

/// Adds a small random quaternion to every exactly-zero entry.
fn perturb_zero_entries(w: &QVector, eps: f64, rng: &mut impl Rng) -> QVector {
    let mut out = w.clone();
    for i in 0..w.len() {
        if w.get(i).is_zero() {
            let q = Quaternion::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            out.set(i, q.scale(eps));
        }
    }
    out
}

fn is_sub_unit(p: NormOrder) -> bool {
    matches!(p, NormOrder::Finite(p) if p < 1.0)
}

fn solve_single_with(
    samples: &[QMatrix],
    config: &SolverConfig,
    w_init: &QVector,
    rng: &mut impl Rng,
) -> Result<SingleSolve> {
    if samples.is_empty() {
        return Err(Error::EmptyDataset("no samples to solve on".into()));
    }
    let mut w = w_init.clone();
    let mut f = objective(samples, &w, config.s)?;
    let mut history = vec![f];
    let mut converged = false;

    for _ in 0..config.max_iter {
        let v = compute_v(samples, &w, config.s)?;
        let prev = if is_sub_unit(config.p) {
            perturb_zero_entries(&w, config.eps_perturb, rng)
        } else {
            w.clone()
        };
        let next = update_w(&v, &prev, w_init, config.p)?;
        let f_next = objective(samples, &next, config.s)?;
        history.push(f_next);
        let delta = if f == 0.0 {
            0.0
        } else {
            (f_next - f).abs() / f.abs()
        };
        w = next;
        f = f_next;
        if delta <= config.tol {
            converged = true;
            break;
        }
    }

    Ok(SingleSolve {
        w,
        history,
        converged,
    })
}

/// Runs the MM iteration for one direction from `w_init` (which should have
/// unit L_p norm). Zero-entry nudges for `p < 1` draw from a generator
/// seeded with `config.seed`.
pub fn solve_single(samples: &[QMatrix], config: &SolverConfig, w_init: &QVector) -> Result<SingleSolve> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    solve_single_with(samples, config, w_init, &mut rng)
}

/// `F_i (I − W W*)` for every sample.
pub fn deflate(samples: &[QMatrix], basis: &QMatrix) -> Result<Vec<QMatrix>> {
    if basis.cols() == 0 {
        return Ok(samples.to_vec());
    }
    let n = basis.rows();
    let projector = QMatrix::identity(n).sub(&qmatmul(basis, &basis.conj_transpose())?)?;
    samples.iter().map(|f| qmatmul(f, &projector)).collect()
}

/// Extracts up to `config.r` orthonormal projection directions.
pub fn solve(samples: &[QMatrix], config: &SolverConfig) -> Result<ProjectionResult> {
    config.validate()?;
    let first = samples
        .first()
        .ok_or_else(|| Error::EmptyDataset("no samples to solve on".into()))?;
    let (m, n) = first.dims();
    if let Some(bad) = samples.iter().find(|f| f.dims() != (m, n)) {
        return Err(Error::shape(format!(
            "samples must share dimensions: {m}x{n} vs {}x{}",
            bad.rows(),
            bad.cols()
        )));
    }
    if config.r > n {
        return Err(Error::param(format!(
            "r = {} exceeds the sample column count {n}",
            config.r
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut result = ProjectionResult {
        basis: QMatrix::zeros(n, 0),
        weights: Vec::with_capacity(config.r),
        histories: Vec::with_capacity(config.r),
        iterations: Vec::with_capacity(config.r),
        converged: Vec::with_capacity(config.r),
        restarts: Vec::with_capacity(config.r),
        truncated: false,
    };
    let mut current = samples.to_vec();

    for _t in 0..config.r {
        let mut found = None;
        for attempt in 0..=MAX_RESTARTS {
            let w0 = random_unit_vector(n, config.p, &mut rng);
            let single = match solve_single_with(&current, config, &w0, &mut rng) {
                Ok(single) => single,
                Err(Error::DegenerateDirection(_)) => continue,
                Err(e) => return Err(e),
            };
            match orthonormalize_against(&result.basis, &single.w) {
                Ok(w) => {
                    found = Some((w, single, attempt));
                    break;
                }
                Err(Error::RankDeficient { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        let Some((w, single, restarts)) = found else {
            result.truncated = true;
            break;
        };
        let weight = objective(&current, &w, config.s)?;
        result.basis = result.basis.push_column(&w)?;
        result.weights.push(weight);
        result.iterations.push(single.iterations());
        result.converged.push(single.converged);
        result.histories.push(single.history);
        result.restarts.push(restarts);
        current = deflate(samples, &result.basis)?;
    }

    Ok(result)
}
