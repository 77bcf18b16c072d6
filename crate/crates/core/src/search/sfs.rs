use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit_spec_to_data;
use crate::classifiers::ClassifierSpec;
use crate::eval::loocv;
use crate::mfcc::FeatureSet;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfsResult {
    pub classifier: ClassifierSpec,
    /// Feature indices in the order they were added.
    pub selection_order: Vec<usize>,
    /// LOO accuracy after each addition.
    pub accuracy_path: Vec<f64>,
    /// Smallest prefix reaching the best accuracy on the path.
    pub chosen_prefix_size: usize,
    pub final_accuracy: f64,
    /// Accuracy with every feature (the last step of the path).
    pub full_set_accuracy: f64,
}

impl SfsResult {
    pub fn chosen_features(&self) -> &[usize] {
        &self.selection_order[..self.chosen_prefix_size]
    }
}

/// LOO accuracy of `spec` restricted to `columns` (evaluated in ascending column order).
pub fn subset_accuracy<T: Scalar>(dataset: &FeatureSet<T>, spec: &ClassifierSpec, columns: &[usize]) -> Result<f64> {
    let mut cols = columns.to_vec();
    cols.sort_unstable();
    let sub = dataset.select(&cols)?;
    let spec = fit_spec_to_data(spec, sub.len(), sub.dim());
    loocv(&sub, &spec).map(|r| r.accuracy)
}

/// Sequential forward selection over the full path: at each step add the
/// feature whose inclusion gives the highest LOO accuracy (smallest index on
/// ties) until every feature is ranked.
pub fn sfs<T: Scalar>(dataset: &FeatureSet<T>, spec: &ClassifierSpec) -> Result<SfsResult> {
    let dim = dataset.dim();
    if dim < 2 {
        return Err(Error::Validation(format!("forward selection needs at least 2 features, got {dim}")));
    }
    let mut selected: Vec<usize> = Vec::with_capacity(dim);
    let mut path = Vec::with_capacity(dim);
    while selected.len() < dim {
        let candidates: Vec<usize> = (0..dim).filter(|c| !selected.contains(c)).collect();
        let scores: Vec<Result<f64>> = candidates
            .par_iter()
            .map(|&c| {
                let mut cols = selected.clone();
                cols.push(c);
                subset_accuracy(dataset, spec, &cols)
            })
            .collect();
        let mut best: Option<(usize, f64)> = None;
        for (&c, s) in candidates.iter().zip(scores) {
            let s = s?;
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((c, s));
            }
        }
        let (c, s) = best.expect("at least one candidate");
        selected.push(c);
        path.push(s);
    }
    let (arg, &final_accuracy) = path
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |acc, (i, a)| if *a > *acc.1 { (i, a) } else { acc });
    Ok(SfsResult {
        classifier: *spec,
        full_set_accuracy: path[dim - 1],
        selection_order: selected,
        accuracy_path: path,
        chosen_prefix_size: arg + 1,
        final_accuracy,
    })
}
