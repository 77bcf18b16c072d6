use serde::{Deserialize, Serialize};

use crate::{Error, Label, Result};

/// Two-class confusion counts, named from each class's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// Non-COVID predicted non-COVID.
    pub tp_nc: usize,
    /// Non-COVID predicted COVID.
    pub fn_nc: usize,
    /// COVID predicted COVID.
    pub tp_c: usize,
    /// COVID predicted non-COVID.
    pub fn_c: usize,
}

impl ConfusionMatrix {
    pub fn new(tp_nc: usize, fn_nc: usize, tp_c: usize, fn_c: usize) -> Self {
        Self { tp_nc, fn_nc, tp_c, fn_c }
    }

    pub fn total(&self) -> usize {
        self.tp_nc + self.fn_nc + self.tp_c + self.fn_c
    }

    pub fn non_covid_total(&self) -> usize {
        self.tp_nc + self.fn_nc
    }

    pub fn covid_total(&self) -> usize {
        self.tp_c + self.fn_c
    }

    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::NonCovid, Label::NonCovid) => self.tp_nc += 1,
            (Label::NonCovid, Label::Covid) => self.fn_nc += 1,
            (Label::Covid, Label::Covid) => self.tp_c += 1,
            (Label::Covid, Label::NonCovid) => self.fn_c += 1,
        }
    }
}

pub fn confusion(truths: &[Label], predictions: &[Label]) -> Result<ConfusionMatrix> {
    if truths.len() != predictions.len() {
        return Err(Error::Validation(format!(
            "{} truths but {} predictions",
            truths.len(),
            predictions.len()
        )));
    }
    if truths.is_empty() {
        return Err(Error::EmptyInput("no predictions to tabulate".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in truths.iter().zip(predictions) {
        cm.record(t, p);
    }
    Ok(cm)
}

/// Accuracy, per-class sensitivities, the non-COVID F1 and the balanced
/// accuracy reported in the results table's AUC column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub sensitivity_non_covid: f64,
    pub sensitivity_covid: f64,
    pub f_measure: f64,
    pub paper_auc: f64,
}

pub fn metrics(cm: &ConfusionMatrix) -> Result<Metrics> {
    if cm.non_covid_total() == 0 || cm.covid_total() == 0 {
        return Err(Error::Validation("metrics need at least one sample of each class".into()));
    }
    let accuracy = (cm.tp_nc + cm.tp_c) as f64 / cm.total() as f64;
    let sensitivity_non_covid = cm.tp_nc as f64 / cm.non_covid_total() as f64;
    let sensitivity_covid = cm.tp_c as f64 / cm.covid_total() as f64;
    let predicted_nc = cm.tp_nc + cm.fn_c;
    let f_measure = if predicted_nc == 0 || cm.tp_nc == 0 {
        if predicted_nc == 0 {
            log::warn!("no sample was predicted non-COVID; F-measure reported as 0");
        }
        0.0
    } else {
        let precision = cm.tp_nc as f64 / predicted_nc as f64;
        2.0 * precision * sensitivity_non_covid / (precision + sensitivity_non_covid)
    };
    Ok(Metrics {
        accuracy,
        sensitivity_non_covid,
        sensitivity_covid,
        f_measure,
        paper_auc: (sensitivity_covid + sensitivity_non_covid) / 2.0,
    })
}

/// Area under the ROC curve: the probability that a random COVID score
/// exceeds a random non-COVID score, ties counting one half. Computed from
/// mid-ranks (Mann-Whitney U).
pub fn roc_auc(scores: &[f64], truths: &[Label]) -> Result<f64> {
    if scores.len() != truths.len() {
        return Err(Error::Validation("scores and labels differ in length".into()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Validation("NaN decision score".into()));
    }
    let n_pos = truths.iter().filter(|&&l| l == Label::Covid).count();
    let n_neg = truths.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Validation("ROC AUC needs both classes".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1..=j+1 share their mean.
        let mid_rank = (i + j + 2) as f64 / 2.0;
        rank_sum_pos += mid_rank * order[i..=j].iter().filter(|&&k| truths[k] == Label::Covid).count() as f64;
        i = j + 1;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos * n_neg) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 5e-5
    }

    #[test]
    fn euclidean_knn_row() {
        let m = metrics(&ConfusionMatrix::new(73, 0, 104, 3)).unwrap();
        assert!(close(m.accuracy, 0.9833));
        assert!(close(m.sensitivity_non_covid, 1.0));
        assert!(close(m.sensitivity_covid, 0.9720));
        assert!(close(m.f_measure, 0.9799));
        assert!(close(m.paper_auc, 0.9860));
    }

    #[test]
    fn quadratic_lda_row() {
        let m = metrics(&ConfusionMatrix::new(59, 14, 104, 3)).unwrap();
        assert!(close(m.accuracy, 0.9056));
        assert!(close(m.sensitivity_non_covid, 0.8082));
        assert!(close(m.sensitivity_covid, 0.9720));
        assert!(close(m.f_measure, 0.8741));
        assert!(close(m.paper_auc, 0.8901));
    }

    #[test]
    fn perfect_and_degenerate() {
        let m = metrics(&ConfusionMatrix::new(5, 0, 7, 0)).unwrap();
        assert_eq!((m.accuracy, m.sensitivity_non_covid, m.sensitivity_covid, m.f_measure, m.paper_auc), (1.0, 1.0, 1.0, 1.0, 1.0));
        let m = metrics(&ConfusionMatrix::new(0, 5, 7, 0)).unwrap();
        assert_eq!(m.f_measure, 0.0);
        assert!(metrics(&ConfusionMatrix::new(0, 0, 7, 0)).is_err());
    }

    #[test]
    fn confusion_cells() {
        let mut truths = vec![Label::NonCovid; 73];
        truths.extend(vec![Label::Covid; 107]);
        let mut preds = truths.clone();
        for p in preds.iter_mut().skip(73).take(3) {
            *p = Label::NonCovid;
        }
        assert_eq!(confusion(&truths, &preds).unwrap(), ConfusionMatrix::new(73, 0, 104, 3));
        assert_eq!(confusion(&truths, &truths).unwrap().fn_c, 0);
        assert!(confusion(&[], &[]).is_err());
        assert!(confusion(&truths, &preds[1..]).is_err());
    }

    #[test]
    fn auc_edge_cases() {
        let y = [Label::Covid, Label::Covid, Label::NonCovid, Label::NonCovid];
        assert_eq!(roc_auc(&[3.0, 2.0, 1.0, 0.0], &y).unwrap(), 1.0);
        assert_eq!(roc_auc(&[1.0; 4], &y).unwrap(), 0.5);
        assert!(roc_auc(&[1.0, 2.0], &[Label::Covid, Label::Covid]).is_err());
    }

    proptest! {
        #[test]
        fn accuracy_identity(a in 1usize..50, b in 0usize..50, c in 1usize..50, d in 0usize..50) {
            let cm = ConfusionMatrix::new(a, b, c, d);
            let m = metrics(&cm).unwrap();
            prop_assert!((m.accuracy - (1.0 - (b + d) as f64 / cm.total() as f64)).abs() < 1e-12);
            prop_assert_eq!(m.paper_auc, (m.sensitivity_covid + m.sensitivity_non_covid) / 2.0);
        }
    }
}
