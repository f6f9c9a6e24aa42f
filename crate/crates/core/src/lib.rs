//! Self-supervised manifold-based data augmentation: corrupt a sentence with
//! masked-language-model noise, reconstruct it with a denoising model and
//! keep the result as a new training example.

pub mod augment;
pub mod corpus;
pub mod corruption;
mod error;
pub mod eval;
pub mod labeling;
pub mod models;
pub mod reconstruction;
pub mod rng;

pub use error::{Error, Result};
