//! Gaussian discriminant analysis with covariance shrinkage toward the diagonal.
//! The linear variant shares one pooled covariance; the quadratic variant fits
//! one covariance per class.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::linalg::{cholesky, cholesky_log_det, solve_lower};
use crate::{Error, Label, Result, Scalar};

/// Relative size of the one-off diagonal jitter added when Cholesky fails.
pub const COVARIANCE_JITTER: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ClassGaussian<T> {
    pub label: Label,
    pub mean: Vec<T>,
    /// Lower Cholesky factor of the regularized covariance.
    pub factor: Vec<Vec<T>>,
    pub log_det: T,
    pub log_prior: T,
}

impl<T: Scalar> ClassGaussian<T> {
    /// Gaussian log-density plus log prior.
    pub fn discriminant(&self, x: &[T]) -> T {
        let centered: Vec<T> = x.iter().zip(&self.mean).map(|(&a, &m)| a - m).collect();
        let z = solve_lower(&self.factor, &centered);
        let mahalanobis: T = z.iter().map(|&v| v * v).sum();
        let half = T::of(0.5);
        let dim = T::from_usize(x.len()).unwrap();
        -half * dim * T::of((2.0 * PI).ln()) - half * self.log_det - half * mahalanobis + self.log_prior
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DiscriminantModel<T> {
    pub quadratic: bool,
    pub gamma: f64,
    /// COVID first, then non-COVID.
    pub classes: [ClassGaussian<T>; 2],
}

impl<T: Scalar> DiscriminantModel<T> {
    /// `[COVID, non-COVID]` discriminant values.
    pub fn discriminants(&self, x: &[T]) -> [T; 2] {
        [self.classes[0].discriminant(x), self.classes[1].discriminant(x)]
    }

    /// COVID minus non-COVID discriminant.
    pub fn decision(&self, x: &[T]) -> T {
        let [c, n] = self.discriminants(x);
        c - n
    }
}

fn mean_of<T: Scalar>(rows: &[&Vec<T>]) -> Vec<T> {
    let dim = rows[0].len();
    let n = T::from_usize(rows.len()).unwrap();
    (0..dim).map(|j| rows.iter().map(|r| r[j]).sum::<T>() / n).collect()
}

/// Sum of centered outer products.
fn scatter<T: Scalar>(rows: &[&Vec<T>], mean: &[T]) -> Vec<Vec<T>> {
    let dim = mean.len();
    let mut s = vec![vec![T::zero(); dim]; dim];
    for r in rows {
        let c: Vec<T> = r.iter().zip(mean).map(|(&a, &m)| a - m).collect();
        for i in 0..dim {
            for j in 0..dim {
                s[i][j] = s[i][j] + c[i] * c[j];
            }
        }
    }
    s
}

/// `(1 - gamma) S + gamma diag(S)`.
pub fn shrink_to_diagonal<T: Scalar>(cov: &[Vec<T>], gamma: f64) -> Vec<Vec<T>> {
    let keep = T::of(1.0 - gamma);
    let g = T::of(gamma);
    cov.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| if i == j { keep * v + g * v } else { keep * v })
                .collect()
        })
        .collect()
}

fn factorize<T: Scalar>(cov: Vec<Vec<T>>) -> Result<Vec<Vec<T>>> {
    match cholesky(&cov) {
        Ok(l) => Ok(l),
        Err(_) => {
            let dim = cov.len();
            let trace: T = (0..dim).map(|i| cov[i][i]).sum();
            let jitter = T::of(COVARIANCE_JITTER) * trace / T::from_usize(dim).unwrap();
            let mut cov = cov;
            for (i, row) in cov.iter_mut().enumerate() {
                row[i] = row[i] + jitter;
            }
            cholesky(&cov).map_err(|_| {
                Error::Numerical("regularized covariance is not positive definite even after jitter".into())
            })
        }
    }
}

pub(crate) fn fit<T: Scalar>(quadratic: bool, gamma: f64, x: &[Vec<T>], y: &[Label]) -> Result<DiscriminantModel<T>> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Config(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    let n = x.len();
    let groups: Vec<Vec<&Vec<T>>> = Label::ALL
        .iter()
        .map(|&c| x.iter().zip(y).filter(|(_, &l)| l == c).map(|(r, _)| r).collect())
        .collect();
    if groups.iter().any(|g| g.len() < 2) {
        return Err(Error::Training("discriminant analysis needs at least two samples per class".into()));
    }
    let means: Vec<Vec<T>> = groups.iter().map(|g| mean_of(g)).collect();
    let scatters: Vec<Vec<Vec<T>>> = groups.iter().zip(&means).map(|(g, m)| scatter(g, m)).collect();

    let covariances: Vec<Vec<Vec<T>>> = if quadratic {
        groups
            .iter()
            .zip(&scatters)
            .map(|(g, s)| {
                let d = T::from_usize(g.len() - 1).unwrap();
                s.iter().map(|r| r.iter().map(|&v| v / d).collect()).collect()
            })
            .collect()
    } else {
        let d = T::from_usize(n - 2).unwrap();
        let pooled: Vec<Vec<T>> = scatters[0]
            .iter()
            .zip(&scatters[1])
            .map(|(a, b)| a.iter().zip(b).map(|(&u, &v)| (u + v) / d).collect())
            .collect();
        vec![pooled.clone(), pooled]
    };

    let mut classes = Vec::with_capacity(2);
    for (idx, label) in Label::ALL.into_iter().enumerate() {
        let factor = factorize(shrink_to_diagonal(&covariances[idx], gamma))?;
        classes.push(ClassGaussian {
            label,
            mean: means[idx].clone(),
            log_det: cholesky_log_det(&factor),
            factor,
            log_prior: T::of((groups[idx].len() as f64 / n as f64).ln()),
        });
    }
    let [covid, non_covid]: [ClassGaussian<T>; 2] = classes.try_into().expect("two classes");
    Ok(DiscriminantModel {
        quadratic,
        gamma,
        classes: [covid, non_covid],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_of_symmetric_classes_scores_zero() {
        let x = vec![
            vec![1.0f64, 1.2], vec![1.4, 0.8], vec![0.6, 1.0], vec![1.0, 1.0],
            vec![-1.0, -1.2], vec![-1.4, -0.8], vec![-0.6, -1.0], vec![-1.0, -1.0],
        ];
        let y = [[Label::Covid; 4], [Label::NonCovid; 4]].concat();
        let m = fit(false, 0.0, &x, &y).unwrap();
        assert!(m.decision(&[0.0, 0.0]).abs() < 1e-9);
        assert!(m.decision(&[1.0, 1.0]) > 0.0);
    }

    #[test]
    fn needs_two_per_class() {
        let x = vec![vec![0.0f64], vec![1.0], vec![2.0]];
        let y = [Label::Covid, Label::NonCovid, Label::NonCovid];
        assert!(matches!(fit(false, 0.0, &x, &y), Err(Error::Training(_))));
        assert!(matches!(fit(false, 1.5, &x, &y), Err(Error::Config(_))));
    }

    #[test]
    fn singular_covariance_is_jittered() {
        // Second feature is constant inside each class.
        let x = vec![vec![0.0f64, 1.0], vec![1.0, 1.0], vec![2.0, 1.0], vec![5.0, 0.0], vec![6.0, 0.0], vec![7.0, 0.0]];
        let y = [[Label::Covid; 3], [Label::NonCovid; 3]].concat();
        assert!(fit(true, 0.0, &x, &y).is_ok());
        // Identical points leave a zero covariance, which jitter scaled by the trace cannot fix.
        let x = vec![vec![1.0f64, 1.0], vec![1.0, 1.0], vec![2.0, 0.0], vec![3.0, 1.0]];
        let y = [Label::Covid, Label::Covid, Label::NonCovid, Label::NonCovid];
        assert!(matches!(fit(true, 0.0, &x, &y), Err(Error::Numerical(_))));
    }
}
