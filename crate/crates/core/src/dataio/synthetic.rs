//! Seeded template-plus-noise color image classes for desk-scale benchmarks.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::dataset::{write_manifest, Dataset, Sample};
use super::image::save_image;
use crate::error::{Error, Result};
use crate::qcore::{QMatrix, Quaternion};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub classes: usize,
    pub per_class: usize,
    pub height: usize,
    pub width: usize,
    /// Standard deviation of the per-channel Gaussian noise, in gray levels.
    pub sigma: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            classes: 5,
            per_class: 10,
            height: 16,
            width: 12,
            sigma: 10.0,
            seed: 0,
        }
    }
}

fn color(rng: &mut ChaCha8Rng) -> [f64; 3] {
    std::array::from_fn(|_| rng.random_range(30.0..225.0))
}

/// A background, one colored rectangle and a linear shading ramp.
fn template(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> QMatrix {
    let (m, n) = (spec.height, spec.width);
    let bg = color(rng);
    let fg = color(rng);
    let (r0, c0) = (rng.random_range(0..m.div_ceil(2)), rng.random_range(0..n.div_ceil(2)));
    let (r1, c1) = (rng.random_range(r0 + 1..=m), rng.random_range(c0 + 1..=n));
    let ramp: [f64; 2] = [rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0)];
    QMatrix::from_fn(m, n, |i, j| {
        let base = if (r0..r1).contains(&i) && (c0..c1).contains(&j) { fg } else { bg };
        let shade = ramp[0] * i as f64 / m as f64 + ramp[1] * j as f64 / n as f64;
        let ch = |k: usize| (base[k] + shade).clamp(0.0, 255.0);
        Quaternion::pure(ch(0), ch(1), ch(2))
    })
}

pub fn class_label(c: usize) -> String {
    format!("class{c}")
}

/// Class-major samples: `per_class` noisy copies of each template, rounded
/// and clamped to integer gray levels.
pub fn generate(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.classes == 0 || spec.per_class == 0 || spec.height == 0 || spec.width == 0 {
        return Err(Error::param("synthetic spec needs positive counts and dimensions"));
    }
    let noise = Normal::new(0.0, spec.sigma)
        .map_err(|_| Error::param(format!("invalid sigma {}", spec.sigma)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let templates: Vec<QMatrix> = (0..spec.classes).map(|_| template(spec, &mut rng)).collect();
    let mut samples = Vec::with_capacity(spec.classes * spec.per_class);
    for (c, t) in templates.iter().enumerate() {
        for k in 0..spec.per_class {
            let mut img = t.clone();
            for ch in 1..4 {
                for x in img.plane_mut(ch) {
                    *x = (*x + noise.sample(&mut rng)).round().clamp(0.0, 255.0);
                }
            }
            let path = format!("{}/{k:03}.ppm", class_label(c));
            samples.push(Sample::new(class_label(c), img, path));
        }
    }
    Dataset::new(samples)
}

/// Writes every sample as PPM under `dir` plus `dir/manifest.tsv`; returns
/// the manifest path.
pub fn write_dataset(dataset: &Dataset, dir: &Path) -> Result<PathBuf> {
    for s in dataset.samples() {
        let path = dir.join(&s.source_path);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        save_image(&path, &s.image)?;
    }
    let manifest = dir.join("manifest.tsv");
    write_manifest(
        &manifest,
        dataset.samples().iter().map(|s| (s.label.as_str(), s.source_path.as_str())),
    )?;
    Ok(manifest)
}
