//! Training, weighted-projection nearest-neighbour classification and
//! reconstruction on top of the solver.

use rayon::prelude::*;

use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::qcore::{qmatmul, QMatrix};
use crate::solver::{self, ProjectionResult, SolverConfig};

/// Per-direction solver diagnostics kept alongside a model.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainReport {
    pub iterations: Vec<usize>,
    pub converged: Vec<bool>,
    pub restarts: Vec<usize>,
    /// Fewer than `config.r` directions were found.
    pub truncated: bool,
}

impl From<&ProjectionResult> for TrainReport {
    fn from(res: &ProjectionResult) -> Self {
        TrainReport {
            iterations: res.iterations.clone(),
            converged: res.converged.clone(),
            restarts: res.restarts.clone(),
            truncated: res.truncated,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    /// Training mean, m×n.
    pub psi: QMatrix,
    /// n×rank with orthonormal columns.
    pub basis: QMatrix,
    pub weights_raw: Vec<f64>,
    pub weights_norm: Vec<f64>,
    pub config: SolverConfig,
    pub label_space: Vec<String>,
    pub report: TrainReport,
}

/// `f / Σf`, or uniform `1/r` when `Σf = 0`.
pub fn normalize_weights(f: &[f64]) -> Vec<f64> {
    let total: f64 = f.iter().sum();
    if total > 0.0 {
        f.iter().map(|x| x / total).collect()
    } else {
        vec![1.0 / f.len() as f64; f.len()]
    }
}

impl Model {
    pub fn from_parts(
        psi: QMatrix,
        basis: QMatrix,
        weights_raw: Vec<f64>,
        config: SolverConfig,
        label_space: Vec<String>,
        report: TrainReport,
    ) -> Result<Self> {
        if basis.rows() != psi.cols() {
            return Err(Error::shape(format!(
                "basis has {} rows but images have {} columns",
                basis.rows(),
                psi.cols()
            )));
        }
        if weights_raw.len() != basis.cols() {
            return Err(Error::shape(format!(
                "{} weights for {} basis columns",
                weights_raw.len(),
                basis.cols()
            )));
        }
        Ok(Model {
            weights_norm: normalize_weights(&weights_raw),
            psi,
            basis,
            weights_raw,
            config,
            label_space,
            report,
        })
    }

    /// Number of basis directions actually stored.
    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    /// Image dimensions `(m, n)`.
    pub fn dims(&self) -> (usize, usize) {
        self.psi.dims()
    }

    /// The model restricted to its first `r` directions, weights renormalized.
    /// Asking for more directions than stored keeps all of them.
    pub fn truncated(&self, requested: usize) -> Result<Model> {
        let r = requested.min(self.rank());
        let cut = |v: &[usize]| v[..r.min(v.len())].to_vec();
        let report = TrainReport {
            iterations: cut(&self.report.iterations),
            converged: self.report.converged[..r.min(self.report.converged.len())].to_vec(),
            restarts: cut(&self.report.restarts),
            truncated: self.report.truncated && requested > self.rank(),
        };
        Model::from_parts(
            self.psi.clone(),
            self.basis.leading_columns(r)?,
            self.weights_raw[..r].to_vec(),
            SolverConfig { r: requested.max(1), ..self.config.clone() },
            self.label_space.clone(),
            report,
        )
    }

    fn check_image(&self, f: &QMatrix) -> Result<()> {
        if f.dims() != self.dims() {
            return Err(Error::shape(format!(
                "image is {}x{}, model expects {}x{}",
                f.rows(),
                f.cols(),
                self.psi.rows(),
                self.psi.cols()
            )));
        }
        Ok(())
    }
}

/// Entry-wise mean of equally sized matrices.
pub fn mean_image(images: &[QMatrix]) -> Result<QMatrix> {
    let first = images
        .first()
        .ok_or_else(|| Error::EmptyDataset("no training images".into()))?;
    let mut acc = QMatrix::zeros(first.rows(), first.cols());
    for img in images {
        acc = acc.add(img)?;
    }
    Ok(acc.scale(1.0 / images.len() as f64))
}

/// Centers `images` on their mean and extracts the projection basis.
pub fn fit(images: &[QMatrix], label_space: Vec<String>, config: &SolverConfig) -> Result<Model> {
    config.validate()?;
    let psi = mean_image(images)?;
    let centered = images.iter().map(|f| f.sub(&psi)).collect::<Result<Vec<_>>>()?;
    let res = solver::solve(&centered, config)?;
    Model::from_parts(
        psi,
        res.basis.clone(),
        res.weights.clone(),
        config.clone(),
        label_space,
        TrainReport::from(&res),
    )
}

pub fn train(trainset: &Dataset, config: &SolverConfig) -> Result<Model> {
    if trainset.is_empty() {
        return Err(Error::EmptyDataset("training set is empty".into()));
    }
    fit(&trainset.images(), trainset.classes().to_vec(), config)
}

/// Coordinates `(F − Ψ)W` of one image, optionally column-weighted.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub p: QMatrix,
    pub label: Option<String>,
}

pub fn features(model: &Model, f: &QMatrix, weighted: bool) -> Result<FeatureMatrix> {
    model.check_image(f)?;
    let p = qmatmul(&f.sub(&model.psi)?, &model.basis)?;
    let p = if weighted {
        p.scale_columns(&model.weights_norm)?
    } else {
        p
    };
    Ok(FeatureMatrix { p, label: None })
}

/// Precomputed labelled feature matrices of the training images.
#[derive(Debug, Clone, PartialEq)]
pub struct Gallery {
    pub weighted: bool,
    pub entries: Vec<FeatureMatrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: String,
    /// Gallery position of the nearest entry.
    pub index: usize,
    pub distance: f64,
}

impl Gallery {
    pub fn from_images<'a>(
        model: &Model,
        labelled: impl IntoIterator<Item = (&'a str, &'a QMatrix)>,
        weighted: bool,
    ) -> Result<Self> {
        let entries = labelled
            .into_iter()
            .map(|(label, img)| {
                features(model, img, weighted).map(|mut fm| {
                    fm.label = Some(label.to_string());
                    fm
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Gallery { weighted, entries })
    }

    pub fn build(model: &Model, dataset: &Dataset, weighted: bool) -> Result<Self> {
        Self::from_images(
            model,
            dataset.samples().iter().map(|s| (s.label.as_str(), &s.image)),
            weighted,
        )
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn sq_distance(a: &QMatrix, b: &QMatrix) -> f64 {
    (0..4)
        .map(|c| {
            a.plane(c)
                .iter()
                .zip(b.plane(c))
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
        })
        .sum()
}

/// Nearest gallery entry in quaternion Frobenius distance; ties go to the
/// lowest gallery index. The query is projected with the gallery's weighting.
pub fn classify(model: &Model, gallery: &Gallery, f: &QMatrix) -> Result<Prediction> {
    if gallery.is_empty() {
        return Err(Error::EmptyDataset("gallery is empty".into()));
    }
    let q = features(model, f, gallery.weighted)?;
    let mut best = (0, f64::INFINITY);
    for (k, entry) in gallery.entries.iter().enumerate() {
        if entry.p.dims() != q.p.dims() {
            return Err(Error::shape("gallery features do not match the model rank"));
        }
        let d = sq_distance(&entry.p, &q.p);
        if d < best.1 {
            best = (k, d);
        }
    }
    Ok(Prediction {
        label: gallery.entries[best.0].label.clone().unwrap_or_default(),
        index: best.0,
        distance: best.1.sqrt(),
    })
}

/// `(F − Ψ) W_r W_r* + Ψ` with the first `r_used` unweighted directions.
pub fn reconstruct(model: &Model, f: &QMatrix, r_used: usize) -> Result<QMatrix> {
    model.check_image(f)?;
    let w = leading(model, r_used)?;
    let p = qmatmul(&f.sub(&model.psi)?, &w)?;
    qmatmul(&p, &w.conj_transpose())?.add(&model.psi)
}

fn leading(model: &Model, r_used: usize) -> Result<QMatrix> {
    if r_used > model.rank() {
        return Err(Error::param(format!(
            "r_used = {r_used} exceeds the model rank {}",
            model.rank()
        )));
    }
    model.basis.leading_columns(r_used)
}

/// `(1/ℓ) Σ ‖F_i (I − W_r W_r*)‖_F` over uncentered clean samples.
pub fn reconstruction_error(model: &Model, clean: &[QMatrix], r_used: usize) -> Result<f64> {
    if clean.is_empty() {
        return Err(Error::EmptyDataset("no clean samples".into()));
    }
    let w = leading(model, r_used)?;
    let wh = w.conj_transpose();
    let mut total = 0.0;
    for f in clean {
        model.check_image(f)?;
        let proj = qmatmul(&qmatmul(f, &w)?, &wh)?;
        total += f.sub(&proj)?.frobenius();
    }
    Ok(total / clean.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub predictions: Vec<Prediction>,
    pub accuracy: f64,
}

/// Classifies every probe against `gallery`, in parallel.
pub fn evaluate(model: &Model, gallery: &Gallery, probes: &Dataset) -> Result<Evaluation> {
    if probes.is_empty() {
        return Err(Error::EmptyDataset("no probes".into()));
    }
    let predictions = probes
        .samples()
        .par_iter()
        .map(|s| classify(model, gallery, &s.image))
        .collect::<Result<Vec<_>>>()?;
    let hits = predictions
        .iter()
        .zip(probes.samples())
        .filter(|(p, s)| p.label == s.label)
        .count();
    Ok(Evaluation {
        accuracy: hits as f64 / probes.len() as f64,
        predictions,
    })
}

pub fn evaluate_accuracy(model: &Model, gallery: &Dataset, probes: &Dataset, weighted: bool) -> Result<f64> {
    let g = Gallery::build(model, gallery, weighted)?;
    evaluate(model, &g, probes).map(|e| e.accuracy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Quaternion;

    #[test]
    fn weight_normalization() {
        assert_eq!(normalize_weights(&[1.0, 3.0]), vec![0.25, 0.75]);
        assert_eq!(normalize_weights(&[0.0, 0.0]), vec![0.5, 0.5]);
        assert!(normalize_weights(&[]).is_empty());
    }

    #[test]
    fn single_sample_mean() {
        let f = QMatrix::from_fn(3, 2, |i, j| Quaternion::pure(i as f64, j as f64, 1.0));
        let model = fit(std::slice::from_ref(&f), vec!["a".into()], &SolverConfig::default()).unwrap();
        assert_eq!(model.psi, f);
        assert_eq!(model.rank(), 0);
        assert_eq!(reconstruct(&model, &f, 0).unwrap(), f);
    }

    #[test]
    fn identical_samples_degenerate() {
        let f = QMatrix::from_fn(3, 3, |i, j| Quaternion::pure((i + j) as f64, 2.0, 0.0));
        let model = fit(&[f.clone(), f.clone()], vec!["a".into()], &SolverConfig::new(2.0, crate::NormOrder::Finite(2.0), 2)).unwrap();
        assert!(model.report.truncated);
        assert_eq!(model.rank(), 0);
        assert_eq!(features(&model, &f, true).unwrap().p.dims(), (3, 0));
        assert!(reconstruct(&model, &f, 1).is_err());
    }

    #[test]
    fn gallery_needs_entries() {
        let f = QMatrix::zeros(2, 2);
        let model = fit(std::slice::from_ref(&f), vec![], &SolverConfig::default()).unwrap();
        let g = Gallery { weighted: false, entries: vec![] };
        assert!(matches!(classify(&model, &g, &f), Err(Error::EmptyDataset(_))));
        assert!(features(&model, &QMatrix::zeros(2, 3), false).is_err());
    }

    #[test]
    fn empty_training_set() {
        assert!(fit(&[], vec![], &SolverConfig::default()).is_err());
    }
}
