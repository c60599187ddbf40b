use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::image::load_image;
use crate::error::{Error, Result};
use crate::qcore::QMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub label: String,
    /// Pure quaternion image, channels on the 0..255 scale.
    pub image: QMatrix,
    pub source_path: String,
    pub noisy: bool,
}

impl Sample {
    pub fn new(label: impl Into<String>, image: QMatrix, source_path: impl Into<String>) -> Self {
        Sample {
            label: label.into(),
            image,
            source_path: source_path.into(),
            noisy: false,
        }
    }
}

/// Ordered samples of equal dimensions; `classes` lists labels by first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    dims: (usize, usize),
    classes: Vec<String>,
}

impl Dataset {
    /// Fails on mixed image dimensions. An empty list gives an empty dataset
    /// with dims `(0, 0)`.
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let dims = samples.first().map_or((0, 0), |s| s.image.dims());
        Self::with_dims(samples, dims)
    }

    fn with_dims(samples: Vec<Sample>, dims: (usize, usize)) -> Result<Self> {
        if let Some(bad) = samples.iter().find(|s| s.image.dims() != dims) {
            return Err(Error::shape(format!(
                "{} is {}x{}, expected {}x{}",
                bad.source_path,
                bad.image.rows(),
                bad.image.cols(),
                dims.0,
                dims.1
            )));
        }
        let mut seen = HashSet::new();
        let classes = samples
            .iter()
            .filter(|s| seen.insert(s.label.as_str()))
            .map(|s| s.label.clone())
            .collect();
        Ok(Dataset {
            samples,
            dims,
            classes,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Sample> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == label)
    }

    pub fn images(&self) -> Vec<QMatrix> {
        self.samples.iter().map(|s| s.image.clone()).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.samples.iter().map(|s| s.label.as_str()).collect()
    }

    /// Samples at `indices`, in the given order; keeps the parent dims.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let samples = indices.iter().map(|&i| self.samples[i].clone()).collect();
        Self::with_dims(samples, self.dims).expect("subset of a consistent dataset")
    }
}

/// Loads a dataset from a manifest file (`label<TAB>path` per line, `#`
/// comments, paths relative to the manifest) or from a directory whose
/// immediate subdirectories name the classes.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let entries = if path.is_dir() {
        scan_directory(path)?
    } else {
        read_manifest(path)?
    };
    if entries.is_empty() {
        return Err(Error::EmptyDataset(format!(
            "{} lists no images",
            path.display()
        )));
    }
    let samples = entries
        .par_iter()
        .map(|(label, file)| {
            Ok(Sample::new(
                label.clone(),
                load_image(file)?,
                file.display().to_string(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(samples)
}

/// Parses a manifest into `(label, resolved path)` records.
pub fn read_manifest(path: &Path) -> Result<Vec<(String, PathBuf)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: &str| Error::Manifest {
            path: path.to_path_buf(),
            line: k + 1,
            message: message.to_string(),
        };
        let (label, rel) = line
            .split_once('\t')
            .ok_or_else(|| bad("expected <label>\\t<path>"))?;
        if label.is_empty() || rel.is_empty() {
            return Err(bad("empty label or path"));
        }
        out.push((label.to_string(), base.join(rel)));
    }
    Ok(out)
}

fn is_image_file(p: &Path) -> bool {
    p.is_file()
        && p.extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| ["png", "ppm"].contains(&e.to_ascii_lowercase().as_str()))
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|e| Error::io(dir, e)))
        .collect::<Result<Vec<_>>>()?;
    paths.sort();
    Ok(paths)
}

fn scan_directory(root: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for class_dir in sorted_entries(root)?.into_iter().filter(|p| p.is_dir()) {
        let label = class_dir
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| Error::param(format!("non UTF-8 class directory {}", class_dir.display())))?
            .to_string();
        let files: Vec<_> = sorted_entries(&class_dir)?
            .into_iter()
            .filter(|p| is_image_file(p))
            .collect();
        if files.is_empty() {
            return Err(Error::EmptyDataset(format!(
                "class directory {} holds no PNG or PPM images",
                class_dir.display()
            )));
        }
        out.extend(files.into_iter().map(|f| (label.clone(), f)));
    }
    Ok(out)
}

/// Writes `label<TAB>path` records; paths are written as given.
pub fn write_manifest<'a>(
    path: &Path,
    records: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<()> {
    let mut buf = Vec::new();
    for (label, file) in records {
        writeln!(buf, "{label}\t{file}").expect("write to Vec");
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Train/test partition. `warning` is set when class coverage overrode the
/// requested fraction or the test side came out empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub warning: Option<String>,
}

/// Seeded split with at least one training sample per class.
///
/// The training side gets `round(train_fraction · ℓ)` samples, raised to the
/// class count if needed. Both sides keep dataset order.
pub fn split(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<Split> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset("cannot split an empty dataset".into()));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::param(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let l = dataset.len();
    let mut order: Vec<usize> = (0..l).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let target = (train_fraction * l as f64).round() as usize;
    let mut in_train = vec![false; l];
    let mut covered = HashSet::new();
    let mut n_train = 0;
    for &i in &order {
        if covered.insert(dataset.samples[i].label.as_str()) {
            in_train[i] = true;
            n_train += 1;
        }
    }
    let forced = n_train > target;
    for &i in &order {
        if n_train >= target {
            break;
        }
        if !in_train[i] {
            in_train[i] = true;
            n_train += 1;
        }
    }
    let (train_indices, test_indices): (Vec<usize>, Vec<usize>) = (0..l).partition(|&i| in_train[i]);
    let warning = if test_indices.is_empty() {
        Some(format!("test split is empty ({l} samples, {} classes)", dataset.classes.len()))
    } else if forced {
        Some(format!(
            "class coverage put {n_train} samples in train, above the requested {target}"
        ))
    } else {
        None
    };
    Ok(Split {
        train: dataset.subset(&train_indices),
        test: dataset.subset(&test_indices),
        train_indices,
        test_indices,
        warning,
    })
}
