//! Python bindings. Quaternion matrices cross the boundary as four nested
//! `rows × cols` lists, one per coefficient plane.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use g2dqpca::dataio;
use g2dqpca::pipeline::{self, Gallery, Model};
use g2dqpca::qcore::{self, NormOrder, QMatrix, QVector, Quaternion};
use g2dqpca::solver::{self, SolverConfig};
use g2dqpca::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. }
        | Error::Image { .. }
        | Error::Manifest { .. }
        | Error::Format(_)
        | Error::Version { .. }
        | Error::Checksum { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

type Planes = [Vec<Vec<f64>>; 4];
type Quat = (f64, f64, f64, f64);

#[pyclass(name = "QMatrix", module = "g2dqpca_py")]
struct PyQMatrix {
    inner: QMatrix,
}

fn wrap(inner: QMatrix) -> PyQMatrix {
    PyQMatrix { inner }
}

#[pymethods]
impl PyQMatrix {
    #[new]
    fn new(planes: Planes) -> PyResult<Self> {
        let rows = planes[0].len();
        let cols = planes[0].first().map_or(0, Vec::len);
        let mut flat: [Vec<f64>; 4] = Default::default();
        for (c, plane) in planes.iter().enumerate() {
            if plane.len() != rows || plane.iter().any(|row| row.len() != cols) {
                return Err(PyValueError::new_err("all planes must be rectangular with equal shape"));
            }
            flat[c] = plane.concat();
        }
        QMatrix::from_planes(rows, cols, flat).map(wrap).map_err(to_py)
    }

    #[staticmethod]
    fn zeros(rows: usize, cols: usize) -> Self {
        wrap(QMatrix::zeros(rows, cols))
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        wrap(QMatrix::identity(n))
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        self.inner.dims()
    }

    fn planes(&self) -> Planes {
        let cols = self.inner.cols().max(1);
        std::array::from_fn(|c| self.inner.plane(c).chunks(cols).map(<[f64]>::to_vec).collect())
    }

    fn get(&self, i: usize, j: usize) -> PyResult<Quat> {
        let (m, n) = self.inner.dims();
        if i >= m || j >= n {
            return Err(PyValueError::new_err(format!("index ({i}, {j}) out of bounds for {m}x{n}")));
        }
        let q = self.inner.get(i, j);
        Ok((q.w0, q.w1, q.w2, q.w3))
    }

    fn conj_transpose(&self) -> Self {
        wrap(self.inner.conj_transpose())
    }

    fn frobenius(&self) -> f64 {
        self.inner.frobenius()
    }

    fn __matmul__(&self, other: PyRef<'_, PyQMatrix>) -> PyResult<Self> {
        qcore::qmatmul(&self.inner, &other.inner).map(wrap).map_err(to_py)
    }

    fn __sub__(&self, other: PyRef<'_, PyQMatrix>) -> PyResult<Self> {
        self.inner.sub(&other.inner).map(wrap).map_err(to_py)
    }

    fn __add__(&self, other: PyRef<'_, PyQMatrix>) -> PyResult<Self> {
        self.inner.add(&other.inner).map(wrap).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        let (m, n) = self.inner.dims();
        format!("QMatrix({m}x{n})")
    }
}

fn norm_order(p: f64) -> PyResult<NormOrder> {
    NormOrder::new(p).map_err(to_py)
}

#[pyclass(name = "SolverConfig", module = "g2dqpca_py")]
struct PySolverConfig {
    inner: SolverConfig,
}

#[pymethods]
impl PySolverConfig {
    #[new]
    #[pyo3(signature = (s=2.0, p=2.0, r=1, tol=1e-4, max_iter=200, seed=0, eps_perturb=1e-8))]
    fn new(s: f64, p: f64, r: usize, tol: f64, max_iter: usize, seed: u64, eps_perturb: f64) -> PyResult<Self> {
        let inner = SolverConfig {
            s,
            p: norm_order(p)?,
            r,
            tol,
            max_iter,
            seed,
            eps_perturb,
        };
        inner.validate().map_err(to_py)?;
        Ok(PySolverConfig { inner })
    }

    #[getter]
    fn s(&self) -> f64 {
        self.inner.s
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.p.as_f64()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r
    }

    #[getter]
    fn tol(&self) -> f64 {
        self.inner.tol
    }

    #[getter]
    fn max_iter(&self) -> usize {
        self.inner.max_iter
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "SolverConfig(s={}, p={}, r={}, tol={}, max_iter={}, seed={})",
            c.s, c.p, c.r, c.tol, c.max_iter, c.seed
        )
    }
}

#[pyclass(name = "ProjectionResult", module = "g2dqpca_py", get_all)]
struct PyProjectionResult {
    basis: Py<PyQMatrix>,
    weights: Vec<f64>,
    histories: Vec<Vec<f64>>,
    iterations: Vec<usize>,
    converged: Vec<bool>,
    truncated: bool,
}

fn matrices(samples: &[PyRef<'_, PyQMatrix>]) -> Vec<QMatrix> {
    samples.iter().map(|s| s.inner.clone()).collect()
}

/// Extracts `config.r` projection directions from (already centered) samples.
#[pyfunction]
fn solve(py: Python<'_>, samples: Vec<PyRef<'_, PyQMatrix>>, config: PyRef<'_, PySolverConfig>) -> PyResult<PyProjectionResult> {
    let res = solver::solve(&matrices(&samples), &config.inner).map_err(to_py)?;
    Ok(PyProjectionResult {
        basis: Py::new(py, wrap(res.basis))?,
        weights: res.weights,
        histories: res.histories,
        iterations: res.iterations,
        converged: res.converged,
        truncated: res.truncated,
    })
}

#[pyclass(name = "Model", module = "g2dqpca_py")]
struct PyModel {
    inner: Model,
}

#[pymethods]
impl PyModel {
    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn psi(&self) -> PyQMatrix {
        wrap(self.inner.psi.clone())
    }

    #[getter]
    fn basis(&self) -> PyQMatrix {
        wrap(self.inner.basis.clone())
    }

    #[getter]
    fn weights_raw(&self) -> Vec<f64> {
        self.inner.weights_raw.clone()
    }

    #[getter]
    fn weights_norm(&self) -> Vec<f64> {
        self.inner.weights_norm.clone()
    }

    #[getter]
    fn label_space(&self) -> Vec<String> {
        self.inner.label_space.clone()
    }

    fn save(&self, path: &str) -> PyResult<()> {
        dataio::save_model(&self.inner, path).map_err(to_py)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        dataio::load_model(path).map(|inner| PyModel { inner }).map_err(to_py)
    }

    fn truncated(&self, r: usize) -> PyResult<Self> {
        self.inner.truncated(r).map(|inner| PyModel { inner }).map_err(to_py)
    }

    #[pyo3(signature = (image, weighted=true))]
    fn features(&self, image: PyRef<'_, PyQMatrix>, weighted: bool) -> PyResult<PyQMatrix> {
        pipeline::features(&self.inner, &image.inner, weighted)
            .map(|f| wrap(f.p))
            .map_err(to_py)
    }

    /// Nearest gallery image as `(label, index, distance)`.
    #[pyo3(signature = (gallery_images, gallery_labels, image, weighted=true))]
    fn classify(
        &self,
        gallery_images: Vec<PyRef<'_, PyQMatrix>>,
        gallery_labels: Vec<String>,
        image: PyRef<'_, PyQMatrix>,
        weighted: bool,
    ) -> PyResult<(String, usize, f64)> {
        if gallery_images.len() != gallery_labels.len() {
            return Err(PyValueError::new_err("gallery images and labels differ in length"));
        }
        let gallery = Gallery::from_images(
            &self.inner,
            gallery_labels.iter().map(String::as_str).zip(gallery_images.iter().map(|g| &g.inner)),
            weighted,
        )
        .map_err(to_py)?;
        let p = pipeline::classify(&self.inner, &gallery, &image.inner).map_err(to_py)?;
        Ok((p.label, p.index, p.distance))
    }

    fn reconstruct(&self, image: PyRef<'_, PyQMatrix>, r_used: usize) -> PyResult<PyQMatrix> {
        pipeline::reconstruct(&self.inner, &image.inner, r_used)
            .map(wrap)
            .map_err(to_py)
    }

    fn reconstruction_error(&self, clean: Vec<PyRef<'_, PyQMatrix>>, r_used: usize) -> PyResult<f64> {
        pipeline::reconstruction_error(&self.inner, &matrices(&clean), r_used).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        let (m, n) = self.inner.dims();
        format!("Model({m}x{n}, rank={})", self.inner.rank())
    }
}

/// Centers the images on their mean and fits the projection basis.
#[pyfunction]
#[pyo3(signature = (images, config, labels=Vec::new()))]
fn train(images: Vec<PyRef<'_, PyQMatrix>>, config: PyRef<'_, PySolverConfig>, labels: Vec<String>) -> PyResult<PyModel> {
    let mut classes: Vec<String> = Vec::new();
    for l in labels {
        if !classes.contains(&l) {
            classes.push(l);
        }
    }
    pipeline::fit(&matrices(&images), classes, &config.inner)
        .map(|inner| PyModel { inner })
        .map_err(to_py)
}

#[pyfunction]
fn load_image(path: &str) -> PyResult<PyQMatrix> {
    dataio::load_image(path).map(wrap).map_err(to_py)
}

#[pyfunction]
fn save_image(path: &str, image: PyRef<'_, PyQMatrix>) -> PyResult<()> {
    dataio::save_image(path, &image.inner).map_err(to_py)
}

/// `[(label, image), ...]` from a manifest file or class-directory root.
#[pyfunction]
fn load_dataset(path: &str) -> PyResult<Vec<(String, PyQMatrix)>> {
    let data = dataio::load_dataset(path).map_err(to_py)?;
    Ok(data
        .into_samples()
        .into_iter()
        .map(|s| (s.label, wrap(s.image)))
        .collect())
}

/// `(Σ_i |w_i|_s^p)^(1/p)` for a vector of `(w0, w1, w2, w3)` entries.
#[pyfunction]
fn lsp_norm(entries: Vec<Quat>, s: f64, p: f64) -> PyResult<f64> {
    let qs: Vec<Quaternion> = entries.into_iter().map(|(a, b, c, d)| Quaternion::new(a, b, c, d)).collect();
    qcore::lsp_norm(&QVector::from_quaternions(&qs), s, norm_order(p)?).map_err(to_py)
}

#[pyfunction]
fn s_abs(q: Quat, s: f64) -> PyResult<f64> {
    qcore::s_abs(Quaternion::new(q.0, q.1, q.2, q.3), s).map_err(to_py)
}

#[pymodule]
fn g2dqpca_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyQMatrix>()?;
    m.add_class::<PySolverConfig>()?;
    m.add_class::<PyProjectionResult>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(load_image, m)?)?;
    m.add_function(wrap_pyfunction!(save_image, m)?)?;
    m.add_function(wrap_pyfunction!(load_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(lsp_norm, m)?)?;
    m.add_function(wrap_pyfunction!(s_abs, m)?)?;
    Ok(())
}
