//! Leave-one-out cross-validation and the evaluation metrics reported for
//! every classifier.

mod metrics;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{train, ClassifierSpec};
use crate::mfcc::{FeatureSet, MfccConfig};
use crate::{Error, Label, Result, Scalar};

pub use metrics::{confusion, metrics, roc_auc, ConfusionMatrix, Metrics};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePrediction {
    pub source_id: String,
    pub truth: Label,
    pub predicted: Label,
    pub score: f64,
    /// The fold's model could not be trained and the majority training label was used.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub spec: ClassifierSpec,
    pub mfcc_config: Option<MfccConfig>,
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub sensitivity_non_covid: f64,
    pub sensitivity_covid: f64,
    pub f_measure: f64,
    pub paper_auc: f64,
    pub roc_auc: f64,
    pub predictions: Vec<SamplePrediction>,
    pub warnings: Vec<String>,
}

/// Column header of the one-row results CSV.
pub const TABLE3_HEADER: [&str; 8] = [
    "classifier",
    "hyperparameter",
    "acc",
    "sen_non_covid",
    "sen_covid",
    "f_measure",
    "auc",
    "roc_auc",
];

impl EvalReport {
    pub fn metrics(&self) -> Metrics {
        Metrics {
            accuracy: self.accuracy,
            sensitivity_non_covid: self.sensitivity_non_covid,
            sensitivity_covid: self.sensitivity_covid,
            f_measure: self.f_measure,
            paper_auc: self.paper_auc,
        }
    }

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.spec.family.display_name().to_string(),
            self.spec.describe(),
            format!("{:?}", self.accuracy),
            format!("{:?}", self.sensitivity_non_covid),
            format!("{:?}", self.sensitivity_covid),
            format!("{:?}", self.f_measure),
            format!("{:?}", self.paper_auc),
            format!("{:?}", self.roc_auc),
        ]
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }
}

/// Writes reports as CSV rows in the given order, full precision.
pub fn write_table3_csv<W: Write>(w: W, reports: &[EvalReport]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(TABLE3_HEADER)?;
    for r in reports {
        wtr.write_record(r.csv_record())?;
    }
    wtr.flush().map_err(|e| Error::io("<table3 csv>", e))?;
    Ok(())
}

fn majority(labels: &[Label]) -> Label {
    let covid = labels.iter().filter(|&&l| l == Label::Covid).count();
    if 2 * covid > labels.len() { Label::Covid } else { Label::NonCovid }
}

struct FoldOutcome {
    prediction: SamplePrediction,
    warnings: Vec<String>,
}

/// Leave-one-out cross-validation: `n` folds, each training on every row but
/// one and predicting the held-out row. Folds run in parallel; results are
/// assembled in dataset order.
pub fn loocv<T: Scalar>(dataset: &FeatureSet<T>, spec: &ClassifierSpec) -> Result<EvalReport> {
    spec.validate()?;
    let n = dataset.len();
    if n < 2 {
        return Err(Error::Validation(format!("leave-one-out needs at least 2 rows, got {n}")));
    }
    if dataset.count(Label::Covid) == 0 || dataset.count(Label::NonCovid) == 0 {
        return Err(Error::Validation("leave-one-out needs both classes in the dataset".into()));
    }
    let x = dataset.matrix();
    let y = dataset.labels();

    let outcomes: Vec<Result<FoldOutcome>> = (0..n)
        .into_par_iter()
        .map(|held| {
            let train_x: Vec<Vec<T>> = x.iter().enumerate().filter(|(i, _)| *i != held).map(|(_, r)| r.clone()).collect();
            let train_y: Vec<Label> = y.iter().enumerate().filter(|(i, _)| *i != held).map(|(_, &l)| l).collect();
            let source_id = dataset.rows()[held].source_id.clone();
            let mut warnings = Vec::new();
            if !(train_y.contains(&Label::Covid) && train_y.contains(&Label::NonCovid)) {
                warnings.push(format!("fold {held} ({source_id}): training set has a single class"));
            }
            let (predicted, score, fallback) = match train(spec, &train_x, &train_y) {
                Ok(model) => {
                    let p = model.predict(&x[held])?;
                    (p.label, p.score.as_f64(), false)
                }
                Err(e @ (Error::Training(_) | Error::Numerical(_))) => {
                    warnings.push(format!("fold {held} ({source_id}): {e}; predicting the majority training label"));
                    (majority(&train_y), 0.0, true)
                }
                Err(e) => return Err(e),
            };
            Ok(FoldOutcome {
                prediction: SamplePrediction {
                    source_id,
                    truth: y[held],
                    predicted,
                    score,
                    fallback,
                },
                warnings,
            })
        })
        .collect();

    let mut predictions = Vec::with_capacity(n);
    let mut warnings = Vec::new();
    for o in outcomes {
        let o = o?;
        predictions.push(o.prediction);
        warnings.extend(o.warnings);
    }
    for w in &warnings {
        log::warn!("{spec}: {w}");
    }

    let truths: Vec<Label> = predictions.iter().map(|p| p.truth).collect();
    let predicted: Vec<Label> = predictions.iter().map(|p| p.predicted).collect();
    let scores: Vec<f64> = predictions.iter().map(|p| p.score).collect();
    let cm = confusion(&truths, &predicted)?;
    let m = metrics(&cm)?;
    Ok(EvalReport {
        spec: *spec,
        mfcc_config: dataset.config().copied(),
        confusion: cm,
        accuracy: m.accuracy,
        sensitivity_non_covid: m.sensitivity_non_covid,
        sensitivity_covid: m.sensitivity_covid,
        f_measure: m.f_measure,
        paper_auc: m.paper_auc,
        roc_auc: roc_auc(&scores, &truths)?,
        predictions,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::Family;

    #[test]
    fn two_sample_pathology() {
        let ds = FeatureSet::from_matrix(&[vec![0.0f64], vec![1.0]], &[Label::Covid, Label::NonCovid]).unwrap();
        let r = loocv(&ds, &ClassifierSpec::tuned(Family::KnnEuclidean)).unwrap();
        assert_eq!(r.accuracy, 0.0);
        assert_eq!(r.predictions.len(), 2);
        assert_eq!(r.warnings.len(), 2);
    }

    #[test]
    fn failed_folds_fall_back_to_majority() {
        let ds = FeatureSet::from_matrix(
            &[vec![0.0f64], vec![0.1], vec![0.2], vec![5.0]],
            &[Label::NonCovid, Label::NonCovid, Label::NonCovid, Label::Covid],
        )
        .unwrap();
        let r = loocv(&ds, &ClassifierSpec::tuned(Family::RbfSvm)).unwrap();
        let last = &r.predictions[3];
        assert!(last.fallback);
        assert_eq!(last.predicted, Label::NonCovid);
        assert!(!r.predictions[0].fallback);
    }

    #[test]
    fn preconditions() {
        let one_class = FeatureSet::from_matrix(&[vec![0.0f64], vec![1.0]], &[Label::Covid, Label::Covid]).unwrap();
        assert!(loocv(&one_class, &ClassifierSpec::tuned(Family::KnnEuclidean)).is_err());
        let single = FeatureSet::from_matrix(&[vec![0.0f64]], &[Label::Covid]).unwrap();
        assert!(loocv(&single, &ClassifierSpec::tuned(Family::KnnEuclidean)).is_err());
    }
}
