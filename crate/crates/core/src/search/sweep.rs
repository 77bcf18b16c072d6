use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit_spec_to_data, FeatureStore, SweepAxis};
use crate::classifiers::{ClassifierSpec, Family};
use crate::eval::loocv;
use crate::mfcc::{FeatureSet, MfccConfig, Segments};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    /// Accuracy per classifier, aligned with `SweepResult::classifiers`.
    pub accuracies: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestPoint {
    pub family: Family,
    pub value: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub base_mfcc: MfccConfig,
    pub classifiers: Vec<ClassifierSpec>,
    pub points: Vec<SweepPoint>,
    /// Per-classifier argmax; ties go to the smaller value.
    pub best: Vec<BestPoint>,
}

impl SweepResult {
    /// Best (value, classifier) over the whole table: highest accuracy, then
    /// smaller value, then earlier classifier column.
    pub fn overall_best(&self) -> BestPoint {
        let mut best: Option<BestPoint> = None;
        for p in &self.points {
            for (spec, &acc) in self.classifiers.iter().zip(&p.accuracies) {
                if best.is_none_or(|b| acc > b.accuracy) {
                    best = Some(BestPoint { family: spec.family, value: p.value, accuracy: acc });
                }
            }
        }
        best.expect("sweep has at least one point")
    }

    pub fn best_for(&self, family: Family) -> Option<BestPoint> {
        self.best.iter().copied().find(|b| b.family == family)
    }

    /// CSV with the axis value in the first column and one accuracy column per classifier.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec![self.axis.name().to_string()];
        header.extend(self.classifiers.iter().map(|s| s.family.name().to_string()));
        wtr.write_record(&header)?;
        for p in &self.points {
            let mut rec = vec![self.axis.format_value(p.value)];
            rec.extend(p.accuracies.iter().map(|a| format!("{a:?}")));
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|e| Error::io("<sweep csv>", e))?;
        Ok(())
    }
}

fn mfcc_at(axis: SweepAxis, base: &MfccConfig, value: f64) -> MfccConfig {
    let v = value as usize;
    match axis {
        SweepAxis::FrameLength => MfccConfig { frame_length: v, ..*base },
        SweepAxis::NMfcc => MfccConfig { n_mfcc: v, ..*base },
        SweepAxis::NSegments => MfccConfig { n_segments: Segments::Count(v), ..*base },
        _ => *base,
    }
}

/// Grid points that are well defined for a dataset of `n` rows and `dim`
/// features: k is capped by the LOO training size and PLS components by
/// both the feature count and the training size.
pub fn feasible_grid(axis: SweepAxis, n: usize, dim: usize) -> Vec<f64> {
    let grid = axis.grid();
    match axis {
        SweepAxis::K => grid.into_iter().filter(|&k| (k as usize) < n).collect(),
        SweepAxis::Components => grid
            .into_iter()
            .filter(|&c| (c as usize) <= dim && (c as usize) + 2 <= n)
            .collect(),
        _ => grid,
    }
}

fn check_axis(axis: SweepAxis, specs: &[ClassifierSpec]) -> Result<()> {
    if specs.is_empty() {
        return Err(Error::Config("sweep needs at least one classifier".into()));
    }
    if !axis.is_feature_axis() {
        if let Some(s) = specs.iter().find(|s| !axis.families().contains(&s.family)) {
            return Err(Error::Config(format!(
                "axis {axis} does not apply to classifier {}",
                s.family
            )));
        }
    }
    Ok(())
}

fn tabulate<T: Scalar>(
    axis: SweepAxis,
    base_mfcc: MfccConfig,
    specs: &[ClassifierSpec],
    values: Vec<f64>,
    features: Vec<std::sync::Arc<FeatureSet<T>>>,
) -> Result<SweepResult> {
    let jobs: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|p| (0..specs.len()).map(move |c| (p, c)))
        .collect();
    let accs: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(p, c)| {
            let data = &features[p];
            let spec = if axis.is_feature_axis() {
                specs[c]
            } else {
                specs[c].with_hyperparameter(values[p])?
            };
            let spec = fit_spec_to_data(&spec, data.len(), data.dim());
            loocv(data.as_ref(), &spec).map(|r| r.accuracy)
        })
        .collect();
    let mut points: Vec<SweepPoint> = values
        .iter()
        .map(|&value| SweepPoint { value, accuracies: Vec::with_capacity(specs.len()) })
        .collect();
    for (&(p, _), acc) in jobs.iter().zip(accs) {
        points[p].accuracies.push(acc?);
    }
    let best = specs
        .iter()
        .enumerate()
        .map(|(c, spec)| {
            let mut b = BestPoint { family: spec.family, value: points[0].value, accuracy: points[0].accuracies[c] };
            for p in &points[1..] {
                if p.accuracies[c] > b.accuracy {
                    b = BestPoint { family: spec.family, value: p.value, accuracy: p.accuracies[c] };
                }
            }
            b
        })
        .collect();
    Ok(SweepResult {
        axis,
        base_mfcc,
        classifiers: specs.to_vec(),
        points,
        best,
    })
}

/// Runs leave-one-out at every grid point of `axis`, holding everything else
/// at `base_mfcc` and the given classifier specs. MFCC axes re-extract
/// features per point; classifier axes reuse the base features.
pub fn sweep<T: Scalar>(
    axis: SweepAxis,
    store: &FeatureStore<T>,
    base_mfcc: &MfccConfig,
    specs: &[ClassifierSpec],
) -> Result<SweepResult> {
    check_axis(axis, specs)?;
    if axis.is_feature_axis() {
        if !store.has_audio() {
            return Err(Error::Config(format!("sweeping {axis} needs the audio corpus, not a feature file")));
        }
        let values = axis.grid();
        let features = values
            .iter()
            .map(|&v| store.features(&mfcc_at(axis, base_mfcc, v)))
            .collect::<Result<Vec<_>>>()?;
        tabulate(axis, *base_mfcc, specs, values, features)
    } else {
        let data = store.features(base_mfcc)?;
        let values = feasible_grid(axis, data.len(), data.dim());
        if values.is_empty() {
            return Err(Error::Config(format!("no feasible {axis} values for this dataset")));
        }
        let features = vec![data; values.len()];
        tabulate(axis, *base_mfcc, specs, values, features)
    }
}

/// Classifier-axis sweep on a fixed feature set.
pub fn sweep_features<T: Scalar>(axis: SweepAxis, features: &FeatureSet<T>, specs: &[ClassifierSpec]) -> Result<SweepResult> {
    if axis.is_feature_axis() {
        return Err(Error::Config(format!("sweeping {axis} needs the audio corpus")));
    }
    check_axis(axis, specs)?;
    let values = feasible_grid(axis, features.len(), features.dim());
    if values.is_empty() {
        return Err(Error::Config(format!("no feasible {axis} values for this dataset")));
    }
    let data = std::sync::Arc::new(features.clone());
    let base = features.config().copied().unwrap_or_default();
    tabulate(axis, base, specs, values.clone(), vec![data; values.len()])
}
