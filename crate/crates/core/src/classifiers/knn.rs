use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::{Error, Label, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    Chebyshev,
}

impl Metric {
    pub fn distance<T: Scalar>(&self, a: &[T], b: &[T]) -> T {
        match self {
            Metric::Euclidean => a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>().sqrt(),
            Metric::Chebyshev => a
                .iter()
                .zip(b)
                .fold(T::zero(), |m, (&x, &y)| m.max(num_traits::Float::abs(x - y))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct KnnModel<T> {
    pub metric: Metric,
    pub k: usize,
    pub x: Vec<Vec<T>>,
    pub y: Vec<Label>,
}

impl<T: Scalar> KnnModel<T> {
    pub fn new(metric: Metric, k: usize, x: Vec<Vec<T>>, y: Vec<Label>) -> Result<Self> {
        if k == 0 || k > x.len() {
            return Err(Error::Config(format!("k = {k} must lie in 1..={}", x.len())));
        }
        Ok(Self { metric, k, x, y })
    }

    /// Majority vote among the `k` nearest training points. Equal distances go
    /// to the smaller training index; a split vote goes to the nearest
    /// neighbour's label. The score is `(covid votes - non-covid votes) / k`.
    pub fn predict(&self, query: &[T]) -> (Label, T) {
        let mut order: Vec<(T, usize)> = self
            .x
            .iter()
            .enumerate()
            .map(|(i, row)| (self.metric.distance(row, query), i))
            .collect();
        order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
        let covid = order[..self.k].iter().filter(|(_, i)| self.y[*i] == Label::Covid).count();
        let non_covid = self.k - covid;
        let label = match covid.cmp(&non_covid) {
            Ordering::Greater => Label::Covid,
            Ordering::Less => Label::NonCovid,
            Ordering::Equal => self.y[order[0].1],
        };
        let score = T::of((covid as f64 - non_covid as f64) / self.k as f64);
        (label, score)
    }
}
