//! Single-cough COVID-19 / non-COVID-19 classification experiments.
//!
//! The crate covers the whole pipeline: WAV ingestion and a synthetic
//! corpus ([`corpus`]), MFCC feature extraction ([`mfcc`]), seven classical
//! classifiers trained from scratch ([`classifiers`]), leave-one-out
//! evaluation with confusion-matrix metrics ([`eval`]), and the
//! hyperparameter sweeps and forward feature selection that tie them
//! together ([`search`]).
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`, which is what the command-line
//! tool and the reference tolerances use.

pub mod classifiers;
pub mod corpus;
pub mod error;
pub mod eval;
mod label;
pub mod linalg;
pub mod mfcc;
mod scalar;
pub mod search;

pub use error::{Error, Result};
pub use label::Label;
pub use scalar::Scalar;

pub type AudioClipF64 = corpus::AudioClip<f64>;
pub type AudioClipF32 = corpus::AudioClip<f32>;
pub type ClipSetF64 = corpus::ClipSet<f64>;
pub type MfccMatrixF64 = mfcc::MfccMatrix<f64>;
pub type MfccMatrixF32 = mfcc::MfccMatrix<f32>;
pub type FeatureVectorF64 = mfcc::FeatureVector<f64>;
pub type FeatureSetF64 = mfcc::FeatureSet<f64>;
pub type FeatureSetF32 = mfcc::FeatureSet<f32>;
pub type TrainedModelF64 = classifiers::TrainedModel<f64>;
pub type TrainedModelF32 = classifiers::TrainedModel<f32>;
