//! One-dimensional hyperparameter sweeps, sequential forward selection and
//! the staged study driver that chains them.

mod axis;
mod bundle;
mod sfs;
mod store;
mod study;
mod sweep;

pub use axis::SweepAxis;
pub use bundle::{render_tables, write_bundle, BundleManifest, BUNDLE_FORMAT_VERSION};
pub use sfs::{sfs, subset_accuracy, SfsResult};
pub use store::{corpus_fingerprint, FeatureStore};
pub use study::{reproduce_study, StageWinners, StudyBundle, StudyOptions};
pub use sweep::{feasible_grid, sweep, sweep_features, BestPoint, SweepPoint, SweepResult};

use crate::classifiers::{ClassifierSpec, Family};

/// Caps count hyperparameters at what a leave-one-out fold over `n` rows of
/// `dim` features can support: k at the training size and PLS components at
/// both the feature count and the training size minus one.
pub fn fit_spec_to_data(spec: &ClassifierSpec, n: usize, dim: usize) -> ClassifierSpec {
    let train = n.saturating_sub(1).max(1);
    let cap = match spec.family {
        Family::KnnEuclidean | Family::KnnChebyshev => train,
        Family::Plsr => dim.min(train.saturating_sub(1)).max(1),
        _ => return *spec,
    };
    if spec.hyperparameter > cap as f64 {
        ClassifierSpec { hyperparameter: cap as f64, ..*spec }
    } else {
        *spec
    }
}
