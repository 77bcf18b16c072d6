use log::info;
use serde::{Deserialize, Serialize};

use super::{fit_spec_to_data, sfs, sweep, FeatureStore, SfsResult, SweepAxis, SweepResult};
use crate::classifiers::{ClassifierSpec, Family};
use crate::eval::{loocv, EvalReport};
use crate::mfcc::{MfccConfig, Segments};
use crate::{Result, Scalar};

/// Settings held fixed across the whole study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyOptions {
    /// Filter count, c0 flag and log floor come from here; frame length,
    /// coefficient count and segments are chosen by the study.
    pub mfcc: MfccConfig,
    pub svm_cost: f64,
    pub standardize: bool,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self { mfcc: MfccConfig::default(), svm_cost: 1.0, standardize: false }
    }
}

impl StudyOptions {
    fn spec(&self, family: Family, value: f64) -> Result<ClassifierSpec> {
        let spec = ClassifierSpec { svm_cost: self.svm_cost, standardize: self.standardize, ..ClassifierSpec::new(family, value)? };
        spec.validate()?;
        Ok(spec)
    }

    /// Specs used while the feature extraction settings are being chosen.
    pub fn feature_stage_specs(&self) -> Result<Vec<ClassifierSpec>> {
        Family::FRAME_TABLE_ORDER
            .iter()
            .map(|&f| self.spec(f, f.feature_stage_hyperparameter()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageWinners {
    pub frame_length: usize,
    pub n_mfcc: usize,
    pub n_segments: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyBundle {
    pub options: StudyOptions,
    pub corpus_hash: String,
    pub frame_length: SweepResult,
    pub n_mfcc: SweepResult,
    pub n_segments: SweepResult,
    pub winners: StageWinners,
    /// Extraction settings after the three feature stages.
    pub mfcc: MfccConfig,
    pub classifier_sweeps: Vec<SweepResult>,
    /// One spec per family in results-table order.
    pub tuned: Vec<ClassifierSpec>,
    pub reports: Vec<EvalReport>,
    pub sfs: Vec<SfsResult>,
}

impl StudyBundle {
    pub fn sweeps(&self) -> impl Iterator<Item = &SweepResult> {
        [&self.frame_length, &self.n_mfcc, &self.n_segments].into_iter().chain(&self.classifier_sweeps)
    }
}

/// Runs the staged study: frame length (13 coefficients, all segments), then
/// coefficient count (all segments), then segment count, each fixing the
/// best value over every classifier before the next; then one sweep per
/// classifier hyperparameter, a tuned report per family and forward
/// selection per family.
pub fn reproduce_study<T: Scalar>(store: &FeatureStore<T>, options: &StudyOptions) -> Result<StudyBundle> {
    options.mfcc.validate()?;
    let stage_specs = options.feature_stage_specs()?;

    let base = MfccConfig { n_mfcc: 13, n_segments: Segments::All, ..options.mfcc };
    info!("stage 1/5: frame length");
    let frame_length = sweep(SweepAxis::FrameLength, store, &base, &stage_specs)?;
    let frame = frame_length.overall_best().value as usize;

    info!("stage 2/5: number of coefficients (frame {frame})");
    let base = MfccConfig { frame_length: frame, ..base };
    let n_mfcc = sweep(SweepAxis::NMfcc, store, &base, &stage_specs)?;
    let coeffs = n_mfcc.overall_best().value as usize;

    info!("stage 3/5: number of segments ({coeffs} coefficients)");
    let base = MfccConfig { n_mfcc: coeffs, ..base };
    let n_segments = sweep(SweepAxis::NSegments, store, &base, &stage_specs)?;
    let segments = n_segments.overall_best().value as usize;
    let mfcc = MfccConfig { n_segments: Segments::Count(segments), ..base };

    info!("stage 4/5: classifier hyperparameters");
    let data = store.features(&mfcc)?;
    let mut tuned_values = std::collections::BTreeMap::new();
    let mut classifier_sweeps = Vec::with_capacity(SweepAxis::CLASSIFIER_AXES.len());
    for axis in SweepAxis::CLASSIFIER_AXES {
        let specs = axis
            .families()
            .iter()
            .map(|&f| stage_spec(options, f))
            .collect::<Result<Vec<_>>>()?;
        let result = sweep(axis, store, &mfcc, &specs)?;
        for b in &result.best {
            tuned_values.insert(b.family, b.value);
        }
        classifier_sweeps.push(result);
    }
    let tuned = Family::ALL
        .iter()
        .map(|&f| options.spec(f, tuned_values[&f]).map(|s| fit_spec_to_data(&s, data.len(), data.dim())))
        .collect::<Result<Vec<_>>>()?;
    let reports = tuned.iter().map(|s| loocv(data.as_ref(), s)).collect::<Result<Vec<_>>>()?;

    info!("stage 5/5: forward selection");
    let sfs = tuned
        .iter()
        .map(|s| {
            info!("  {}", s.family);
            sfs(data.as_ref(), s)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(StudyBundle {
        options: *options,
        corpus_hash: store.corpus_hash().to_string(),
        frame_length,
        n_mfcc,
        n_segments,
        winners: StageWinners { frame_length: frame, n_mfcc: coeffs, n_segments: segments },
        mfcc,
        classifier_sweeps,
        tuned,
        reports,
        sfs,
    })
}

fn stage_spec(options: &StudyOptions, family: Family) -> Result<ClassifierSpec> {
    options.spec(family, family.feature_stage_hyperparameter())
}
