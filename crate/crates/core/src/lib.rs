//! Generalized two-dimensional quaternion PCA for color images.
//!
//! Color images are encoded as pure quaternion matrices (`r i + g j + b k`
//! per pixel). [`solver`] extracts orthonormal projection directions that
//! maximize `Σ_i ‖F_i w‖_s^s` under an L_p constraint on `w`, using
//! minorization–maximization updates with deflation. [`pipeline`] turns the
//! basis into a weighted-projection nearest-neighbour classifier and a
//! low-rank reconstructor; [`dataio`] loads images and datasets, injects the
//! benchmark noise models and persists models; [`cli`] drives experiments.

pub mod cli;
pub mod dataio;
mod error;
pub mod pipeline;
pub mod qcore;
pub mod solver;

pub use error::{Error, Result};
pub use qcore::{NormOrder, QMatrix, QVector, Quaternion};
