//! The seven classifier families: polynomial and RBF SVMs, linear and
//! quadratic regularized discriminant analysis, Euclidean and Chebyshev k-NN,
//! and PLS regression. Every family emits a decision score whose sign
//! follows the COVID-positive convention, so ranking metrics treat them
//! uniformly.

mod discriminant;
mod kernel;
mod knn;
mod pls;
mod svm;

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Label, Result, Scalar};

pub use discriminant::{shrink_to_diagonal, ClassGaussian, DiscriminantModel, COVARIANCE_JITTER};
pub use kernel::Kernel;
pub use knn::{KnnModel, Metric};
pub use pls::{pls1_nipals, Pls1Fit, PlsModel};
pub use svm::{dual_objective, SvmModel, SMO_MAX_ITERATIONS, SMO_TOLERANCE};

/// Version tag written into serialized models.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    PolySvm,
    RbfSvm,
    LinearLda,
    QuadraticLda,
    KnnEuclidean,
    KnnChebyshev,
    Plsr,
}

impl Family {
    /// Reporting order of the results table.
    pub const ALL: [Family; 7] = [
        Family::PolySvm,
        Family::RbfSvm,
        Family::LinearLda,
        Family::QuadraticLda,
        Family::KnnEuclidean,
        Family::KnnChebyshev,
        Family::Plsr,
    ];

    /// Column order of the frame-length table.
    pub const FRAME_TABLE_ORDER: [Family; 7] = [
        Family::PolySvm,
        Family::RbfSvm,
        Family::LinearLda,
        Family::QuadraticLda,
        Family::KnnChebyshev,
        Family::KnnEuclidean,
        Family::Plsr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::PolySvm => "poly-svm",
            Family::RbfSvm => "rbf-svm",
            Family::LinearLda => "linear-lda",
            Family::QuadraticLda => "quadratic-lda",
            Family::KnnEuclidean => "knn-euclidean",
            Family::KnnChebyshev => "knn-chebyshev",
            Family::Plsr => "plsr",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Family::PolySvm => "Polynomial-SVM",
            Family::RbfSvm => "RBF-SVM",
            Family::LinearLda => "Linear-LDA",
            Family::QuadraticLda => "Quadratic-LDA",
            Family::KnnEuclidean => "Euclidean-kNN",
            Family::KnnChebyshev => "Chebyshev-kNN",
            Family::Plsr => "PLSR",
        }
    }

    pub fn hyperparameter_name(self) -> &'static str {
        match self {
            Family::PolySvm => "order",
            Family::RbfSvm => "sigma",
            Family::LinearLda | Family::QuadraticLda => "gamma",
            Family::KnnEuclidean | Family::KnnChebyshev => "k",
            Family::Plsr => "components",
        }
    }

    pub fn is_svm(self) -> bool {
        matches!(self, Family::PolySvm | Family::RbfSvm)
    }

    /// Hyperparameters the final results table was produced with.
    pub fn tuned_hyperparameter(self) -> f64 {
        match self {
            Family::PolySvm => 3.0,
            Family::RbfSvm => 1.3,
            Family::LinearLda => 0.6,
            Family::QuadraticLda => 0.0,
            Family::KnnEuclidean | Family::KnnChebyshev => 1.0,
            Family::Plsr => 4.0,
        }
    }

    /// Hyperparameters held fixed while the MFCC settings are swept.
    pub fn feature_stage_hyperparameter(self) -> f64 {
        match self {
            Family::PolySvm => 2.0,
            Family::RbfSvm => 1.0,
            Family::LinearLda | Family::QuadraticLda => 0.0,
            Family::KnnEuclidean | Family::KnnChebyshev => 1.0,
            Family::Plsr => 13.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
                Error::Config(format!("unknown classifier {s:?}; valid names: {}", names.join(", ")))
            })
    }
}

/// A classifier family with its single tuned hyperparameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub family: Family,
    /// Order, sigma, gamma, k or component count depending on the family.
    pub hyperparameter: f64,
    pub svm_cost: f64,
    pub standardize: bool,
}

impl ClassifierSpec {
    pub fn new(family: Family, hyperparameter: f64) -> Result<Self> {
        let spec = Self {
            family,
            hyperparameter,
            svm_cost: 1.0,
            standardize: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn tuned(family: Family) -> Self {
        Self::new(family, family.tuned_hyperparameter()).expect("tuned values are valid")
    }

    pub fn with_hyperparameter(self, value: f64) -> Result<Self> {
        let spec = Self {
            hyperparameter: value,
            ..self
        };
        spec.validate()?;
        Ok(spec)
    }

    fn integer_hyperparameter(&self) -> Option<usize> {
        let h = self.hyperparameter;
        (h.fract() == 0.0 && h >= 1.0 && h.is_finite()).then_some(h as usize)
    }

    pub fn validate(&self) -> Result<()> {
        let h = self.hyperparameter;
        let bad = |what: &str| Err(Error::Config(format!("{}: {what}, got {h}", self.family)));
        match self.family {
            Family::PolySvm if !matches!(self.integer_hyperparameter(), Some(1..=4)) => bad("order must be 1, 2, 3 or 4"),
            Family::RbfSvm if !(h > 0.0 && h.is_finite()) => bad("sigma must be positive"),
            Family::LinearLda | Family::QuadraticLda if !(0.0..=1.0).contains(&h) => bad("gamma must lie in [0, 1]"),
            Family::KnnEuclidean | Family::KnnChebyshev | Family::Plsr if self.integer_hyperparameter().is_none() => {
                bad("must be a positive integer")
            }
            _ if self.family.is_svm() && !(self.svm_cost > 0.0 && self.svm_cost.is_finite()) => {
                Err(Error::Config(format!("SVM cost must be positive, got {}", self.svm_cost)))
            }
            _ => Ok(()),
        }
    }

    /// Integer hyperparameter (k, order or component count).
    pub fn count(&self) -> usize {
        self.integer_hyperparameter().unwrap_or(0)
    }

    pub fn kernel(&self) -> Option<Kernel> {
        match self.family {
            Family::PolySvm => Some(Kernel::Polynomial { order: self.count() as u32 }),
            Family::RbfSvm => Some(Kernel::Rbf { sigma: self.hyperparameter }),
            _ => None,
        }
    }

    /// Hyperparameter as it appears in result tables, e.g. `sigma=1.3`.
    pub fn describe(&self) -> String {
        format!("{}={}", self.family.hyperparameter_name(), self.hyperparameter)
    }
}

impl fmt::Display for ClassifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.family, self.describe())
    }
}

/// Per-feature z-scoring statistics of a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Standardization<T> {
    pub mean: Vec<T>,
    pub sd: Vec<T>,
}

impl<T: Scalar> Standardization<T> {
    /// Sample standard deviation; a constant feature gets unit scale.
    pub fn fit(x: &[Vec<T>]) -> Self {
        let n = x.len();
        let dim = x[0].len();
        let nt = T::from_usize(n).unwrap();
        let mean: Vec<T> = (0..dim).map(|j| x.iter().map(|r| r[j]).sum::<T>() / nt).collect();
        let denom = T::from_usize(n.saturating_sub(1).max(1)).unwrap();
        let sd = (0..dim)
            .map(|j| {
                let var = x.iter().map(|r| (r[j] - mean[j]) * (r[j] - mean[j])).sum::<T>() / denom;
                let s = var.sqrt();
                if s > T::zero() { s } else { T::one() }
            })
            .collect();
        Self { mean, sd }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .zip(self.mean.iter().zip(&self.sd))
            .map(|(&v, (&m, &s))| (v - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", tag = "kind", rename_all = "snake_case")]
pub enum FittedState<T> {
    Svm(SvmModel<T>),
    Discriminant(DiscriminantModel<T>),
    Knn(KnnModel<T>),
    Pls(PlsModel<T>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction<T> {
    pub label: Label,
    /// Positive favours COVID.
    pub score: T,
}

/// A fitted classifier. Immutable once trained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TrainedModel<T> {
    pub spec: ClassifierSpec,
    pub dim: usize,
    pub standardization: Option<Standardization<T>>,
    pub state: FittedState<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct ModelDocument<T> {
    format_version: u32,
    model: TrainedModel<T>,
}

fn check_training_data<T: Scalar>(x: &[Vec<T>], y: &[Label]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::Validation(format!("{} feature rows but {} labels", x.len(), y.len())));
    }
    let dim = x.first().map_or(0, Vec::len);
    if x.is_empty() || dim == 0 {
        return Err(Error::EmptyInput("no training data".into()));
    }
    for (i, row) in x.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::Validation(format!("row {i} has {} features, expected {dim}", row.len())));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("row {i} has a non-finite feature")));
        }
    }
    Ok(dim)
}

fn both_classes(y: &[Label]) -> bool {
    y.contains(&Label::Covid) && y.contains(&Label::NonCovid)
}

/// Trains any family. Inputs are z-scored first when `spec.standardize` is set.
pub fn train<T: Scalar>(spec: &ClassifierSpec, x: &[Vec<T>], y: &[Label]) -> Result<TrainedModel<T>> {
    spec.validate()?;
    let dim = check_training_data(x, y)?;
    let standardization = spec.standardize.then(|| Standardization::fit(x));
    let scaled: Vec<Vec<T>>;
    let x = match &standardization {
        Some(s) => {
            scaled = x.iter().map(|r| s.apply(r)).collect();
            &scaled
        }
        None => x,
    };
    let state = match spec.family {
        Family::PolySvm | Family::RbfSvm => {
            FittedState::Svm(svm::fit(spec.kernel().unwrap(), spec.svm_cost, x, y)?)
        }
        Family::LinearLda | Family::QuadraticLda => FittedState::Discriminant(discriminant::fit(
            spec.family == Family::QuadraticLda,
            spec.hyperparameter,
            x,
            y,
        )?),
        Family::KnnEuclidean | Family::KnnChebyshev => {
            let metric = if spec.family == Family::KnnEuclidean { Metric::Euclidean } else { Metric::Chebyshev };
            FittedState::Knn(KnnModel::new(metric, spec.count(), x.to_vec(), y.to_vec())?)
        }
        Family::Plsr => {
            if !both_classes(y) {
                return Err(Error::Training("PLS regression needs both classes".into()));
            }
            FittedState::Pls(pls::fit(spec.count(), x, y)?)
        }
    };
    Ok(TrainedModel {
        spec: *spec,
        dim,
        standardization,
        state,
    })
}

/// Trains an SVM family model.
pub fn train_svm<T: Scalar>(spec: &ClassifierSpec, x: &[Vec<T>], y: &[Label]) -> Result<TrainedModel<T>> {
    if !spec.family.is_svm() {
        return Err(Error::Config(format!("{} is not an SVM family", spec.family)));
    }
    train(spec, x, y)
}

/// Trains a linear or quadratic discriminant model.
pub fn train_lda<T: Scalar>(spec: &ClassifierSpec, x: &[Vec<T>], y: &[Label]) -> Result<TrainedModel<T>> {
    if !matches!(spec.family, Family::LinearLda | Family::QuadraticLda) {
        return Err(Error::Config(format!("{} is not a discriminant family", spec.family)));
    }
    train(spec, x, y)
}

pub fn train_plsr<T: Scalar>(spec: &ClassifierSpec, x: &[Vec<T>], y: &[Label]) -> Result<TrainedModel<T>> {
    if spec.family != Family::Plsr {
        return Err(Error::Config(format!("{} is not PLSR", spec.family)));
    }
    train(spec, x, y)
}

/// One-shot k-NN prediction without keeping a model around.
pub fn knn_predict<T: Scalar>(spec: &ClassifierSpec, x_train: &[Vec<T>], y_train: &[Label], x: &[T]) -> Result<(Label, T)> {
    if !matches!(spec.family, Family::KnnEuclidean | Family::KnnChebyshev) {
        return Err(Error::Config(format!("{} is not a k-NN family", spec.family)));
    }
    let model = train(spec, x_train, y_train)?;
    let p = model.predict(x)?;
    Ok((p.label, p.score))
}

/// Kernel value for an SVM family at the given hyperparameter.
pub fn kernel_eval<T: Scalar>(family: Family, hyperparameter: f64, x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::Validation("kernel arguments differ in length".into()));
    }
    let kernel = ClassifierSpec {
        family,
        hyperparameter,
        svm_cost: 1.0,
        standardize: false,
    };
    kernel.validate()?;
    let k = kernel
        .kernel()
        .ok_or_else(|| Error::Config(format!("{family} has no kernel")))?;
    Ok(k.eval(x, y))
}

impl<T: Scalar> TrainedModel<T> {
    pub fn predict(&self, x: &[T]) -> Result<Prediction<T>> {
        if x.len() != self.dim {
            return Err(Error::Validation(format!("expected {} features, got {}", self.dim, x.len())));
        }
        let scaled;
        let x = match &self.standardization {
            Some(s) => {
                scaled = s.apply(x);
                &scaled[..]
            }
            None => x,
        };
        Ok(match &self.state {
            FittedState::Svm(m) => {
                let score = m.decision(x);
                Prediction { label: Label::from_score(score.as_f64()), score }
            }
            FittedState::Discriminant(m) => {
                let score = m.decision(x);
                Prediction { label: Label::from_score(score.as_f64()), score }
            }
            FittedState::Knn(m) => {
                let (label, score) = m.predict(x);
                Prediction { label, score }
            }
            FittedState::Pls(m) => {
                let score = m.regress(x) - T::of(0.5);
                let label = if score >= T::zero() { Label::Covid } else { Label::NonCovid };
                Prediction { label, score }
            }
        })
    }

    pub fn save_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(
            w,
            &ModelDocument {
                format_version: MODEL_FORMAT_VERSION,
                model: self.clone(),
            },
        )?;
        Ok(())
    }

    pub fn load_json<R: Read>(r: R) -> Result<Self> {
        let doc: ModelDocument<T> = serde_json::from_reader(r)?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Validation(format!(
                "model format version {} is not supported (expected {MODEL_FORMAT_VERSION})",
                doc.format_version
            )));
        }
        doc.model.spec.validate()?;
        Ok(doc.model)
    }
}
