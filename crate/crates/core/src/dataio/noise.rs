use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::qcore::QMatrix;

/// Axis-aligned occluded rectangle (rows `top..top+height`, cols `left..left+width`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRegion {
    pub top: usize,
    pub left: usize,
    pub height: usize,
    pub width: usize,
}

impl BlockRegion {
    pub fn contains(&self, i: usize, j: usize) -> bool {
        (self.top..self.top + self.height).contains(&i) && (self.left..self.left + self.width).contains(&j)
    }
}

fn set_pixel(img: &mut QMatrix, k: usize, white: bool) {
    let v = if white { 255.0 } else { 0.0 };
    for c in 1..4 {
        img.plane_mut(c)[k] = v;
    }
}

/// Overwrites one random block with independent black/white pixels and
/// reports where the block landed.
pub fn add_block_noise_region(image: &QMatrix, seed: u64, min_block: usize) -> Result<(QMatrix, BlockRegion)> {
    let (m, n) = image.dims();
    if min_block == 0 {
        return Err(Error::param("min_block must be positive"));
    }
    if m < min_block || n < min_block {
        return Err(Error::param(format!(
            "image is {m}x{n}, smaller than the {min_block}x{min_block} minimum block"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let height = rng.random_range(min_block..=m.min(2 * min_block));
    let width = rng.random_range(min_block..=n.min(2 * min_block));
    let top = rng.random_range(0..=m - height);
    let left = rng.random_range(0..=n - width);
    let mut out = image.clone();
    for i in top..top + height {
        for j in left..left + width {
            set_pixel(&mut out, i * n + j, rng.random_bool(0.5));
        }
    }
    Ok((
        out,
        BlockRegion {
            top,
            left,
            height,
            width,
        },
    ))
}

pub fn add_block_noise(image: &QMatrix, seed: u64, min_block: usize) -> Result<QMatrix> {
    add_block_noise_region(image, seed, min_block).map(|(img, _)| img)
}

/// Each pixel independently turns black or white (all channels) with
/// probability `density`.
pub fn add_salt_pepper(image: &QMatrix, density: f64, seed: u64) -> Result<QMatrix> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::param(format!("density must lie in [0, 1], got {density}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = image.clone();
    for k in 0..image.rows() * image.cols() {
        if rng.random_bool(density) {
            set_pixel(&mut out, k, rng.random_bool(0.5));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    Block { min_block: usize },
    SaltPepper { density: f64 },
}

impl NoiseKind {
    pub fn apply(&self, image: &QMatrix, seed: u64) -> Result<QMatrix> {
        match *self {
            NoiseKind::Block { min_block } => add_block_noise(image, seed, min_block),
            NoiseKind::SaltPepper { density } => add_salt_pepper(image, density, seed),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::Block { .. } => "block",
            NoiseKind::SaltPepper { .. } => "saltpepper",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseKind::Block { min_block } => write!(f, "block(min_block={min_block})"),
            NoiseKind::SaltPepper { density } => write!(f, "saltpepper(density={density})"),
        }
    }
}

/// Kind names only; parameters take their defaults (block 10, density 0.02).
impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "block" => Ok(NoiseKind::Block { min_block: 10 }),
            "saltpepper" | "sp" => Ok(NoiseKind::SaltPepper { density: 0.02 }),
            _ => Err(Error::param(format!(
                "unknown noise kind {s:?} (expected block or saltpepper)"
            ))),
        }
    }
}

/// `⌈fraction · ℓ⌉`, ignoring the rounding residue of the product.
pub fn polluted_count(fraction: f64, len: usize) -> usize {
    let x = fraction * len as f64;
    let c = (x - 1e-9 * x.max(1.0)).ceil().max(0.0) as usize;
    c.min(len)
}

/// Applies `kind` to a seeded uniform choice of `⌈fraction · ℓ⌉` samples and
/// flags them noisy. Returns the polluted dataset and the chosen indices in
/// increasing order.
pub fn pollute_fraction_indices(
    dataset: &Dataset,
    fraction: f64,
    kind: NoiseKind,
    seed: u64,
) -> Result<(Dataset, Vec<usize>)> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::param(format!("fraction must lie in [0, 1], got {fraction}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = polluted_count(fraction, dataset.len());
    let mut chosen = rand::seq::index::sample(&mut rng, dataset.len(), count).into_vec();
    chosen.sort_unstable();
    let mut samples = dataset.samples().to_vec();
    for &i in &chosen {
        let s = &mut samples[i];
        s.image = kind.apply(&s.image, rng.next_u64())?;
        s.noisy = true;
    }
    Ok((Dataset::new(samples)?, chosen))
}

pub fn pollute_fraction(dataset: &Dataset, fraction: f64, kind: NoiseKind, seed: u64) -> Result<Dataset> {
    pollute_fraction_indices(dataset, fraction, kind, seed).map(|(d, _)| d)
}
