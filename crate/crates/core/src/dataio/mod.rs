//! Image, dataset and model-file I/O, train/test splitting and the two
//! image noise models.

mod dataset;
mod image;
mod model_io;
mod noise;
pub mod synthetic;

pub use dataset::{load_dataset, read_manifest, split, write_manifest, Dataset, Sample, Split};
pub use image::{decode_ppm, encode_ppm, load_image, read_rgb, save_image, write_rgb, RgbImage};
pub use model_io::{decode_model, encode_model, load_model, save_model, FORMAT_VERSION, MAGIC};
pub use noise::{
    add_block_noise, add_block_noise_region, add_salt_pepper, pollute_fraction, pollute_fraction_indices,
    polluted_count, BlockRegion, NoiseKind,
};
