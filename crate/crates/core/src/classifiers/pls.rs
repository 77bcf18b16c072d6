//! PLS1 regression by NIPALS on mean-centred data, used as a classifier by
//! thresholding the regression output at 0.5 (labels coded COVID = 1).

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::linalg::{dot, solve};
use crate::{Error, Label, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PlsModel<T> {
    pub components: usize,
    pub x_mean: Vec<T>,
    pub y_mean: T,
    /// Regression coefficients on centred inputs.
    pub coefficients: Vec<T>,
}

impl<T: Scalar> PlsModel<T> {
    pub fn regress(&self, x: &[T]) -> T {
        self.y_mean
            + x.iter()
                .zip(&self.x_mean)
                .zip(&self.coefficients)
                .map(|((&v, &m), &b)| (v - m) * b)
                .sum::<T>()
    }
}

/// Full NIPALS output, including the training scores.
#[derive(Debug, Clone, PartialEq)]
pub struct Pls1Fit<T> {
    pub x_mean: Vec<T>,
    pub y_mean: T,
    /// One weight vector per extracted component.
    pub weights: Vec<Vec<T>>,
    pub x_loadings: Vec<Vec<T>>,
    pub y_loadings: Vec<T>,
    /// Score vector `t_a` (length n) for each component.
    pub scores: Vec<Vec<T>>,
    pub coefficients: Vec<T>,
}

/// Extracts up to `components` PLS1 components. Extraction stops early once
/// the deflated cross-covariance vanishes (y is already fitted exactly).
pub fn pls1_nipals<T: Scalar>(x: &[Vec<T>], y: &[T], components: usize) -> Result<Pls1Fit<T>> {
    let n = x.len();
    let dim = x.first().map_or(0, Vec::len);
    if components == 0 || components > dim || components > n.saturating_sub(1) {
        return Err(Error::Config(format!(
            "{components} PLS components requested; must lie in 1..={} for {n} samples of {dim} features",
            dim.min(n.saturating_sub(1))
        )));
    }
    let nt = T::from_usize(n).unwrap();
    let x_mean: Vec<T> = (0..dim).map(|j| x.iter().map(|r| r[j]).sum::<T>() / nt).collect();
    let y_mean = y.iter().copied().sum::<T>() / nt;
    let mut e: Vec<Vec<T>> = x
        .iter()
        .map(|r| r.iter().zip(&x_mean).map(|(&v, &m)| v - m).collect())
        .collect();
    let mut f: Vec<T> = y.iter().map(|&v| v - y_mean).collect();
    if f.iter().all(|&v| v == T::zero()) {
        return Err(Error::Training("PLS response has zero variance".into()));
    }

    let scale: T = e
        .iter()
        .flatten()
        .fold(T::zero(), |m, &v| m.max(Float::abs(v)))
        * f.iter().fold(T::zero(), |m, &v| m.max(Float::abs(v)));
    let negligible = scale * nt * T::epsilon() * T::of(16.0);

    let (mut weights, mut x_loadings, mut y_loadings, mut scores) = (vec![], vec![], vec![], vec![]);
    for _ in 0..components {
        let mut w: Vec<T> = (0..dim).map(|j| (0..n).map(|i| e[i][j] * f[i]).sum()).collect();
        let norm = dot(&w, &w).sqrt();
        if norm.is_nan() || norm <= negligible {
            break;
        }
        for v in w.iter_mut() {
            *v = *v / norm;
        }
        let t: Vec<T> = e.iter().map(|r| dot(r, &w)).collect();
        let tt = dot(&t, &t);
        let p: Vec<T> = (0..dim).map(|j| (0..n).map(|i| e[i][j] * t[i]).sum::<T>() / tt).collect();
        let q = dot(&f, &t) / tt;
        for i in 0..n {
            for j in 0..dim {
                e[i][j] = e[i][j] - t[i] * p[j];
            }
            f[i] = f[i] - q * t[i];
        }
        weights.push(w);
        x_loadings.push(p);
        y_loadings.push(q);
        scores.push(t);
    }

    // B = W (P'W)^-1 q
    let a = weights.len();
    let ptw: Vec<Vec<T>> = (0..a)
        .map(|r| (0..a).map(|c| dot(&x_loadings[r], &weights[c])).collect())
        .collect();
    let z = solve(&ptw, &y_loadings)?;
    let coefficients = (0..dim)
        .map(|j| (0..a).map(|c| weights[c][j] * z[c]).sum())
        .collect();

    Ok(Pls1Fit {
        x_mean,
        y_mean,
        weights,
        x_loadings,
        y_loadings,
        scores,
        coefficients,
    })
}

pub(crate) fn fit<T: Scalar>(components: usize, x: &[Vec<T>], labels: &[Label]) -> Result<PlsModel<T>> {
    let y: Vec<T> = labels
        .iter()
        .map(|&l| if l == Label::Covid { T::one() } else { T::zero() })
        .collect();
    let fit = pls1_nipals(x, &y, components)?;
    Ok(PlsModel {
        components,
        x_mean: fit.x_mean,
        y_mean: fit.y_mean,
        coefficients: fit.coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_rank_one_fit() {
        let y = [0.0f64, 1.0, 1.0, 0.0, 1.0];
        let x: Vec<Vec<f64>> = y.iter().map(|&v| vec![v]).collect();
        let fit = pls1_nipals(&x, &y, 1).unwrap();
        for (xi, &yi) in x.iter().zip(&y) {
            let pred = fit.y_mean + (xi[0] - fit.x_mean[0]) * fit.coefficients[0];
            assert!((pred - yi).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_constant_response_and_bad_component_count() {
        let x = vec![vec![1.0f64, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        assert!(matches!(pls1_nipals(&x, &[1.0, 1.0, 1.0], 1), Err(Error::Training(_))));
        assert!(matches!(pls1_nipals(&x, &[1.0, 0.0, 1.0], 3), Err(Error::Config(_))));
        assert!(matches!(pls1_nipals(&x, &[1.0, 0.0, 1.0], 0), Err(Error::Config(_))));
    }

    #[test]
    fn univariate_matches_simple_regression() {
        let x: Vec<Vec<f64>> = [0.3, 1.7, 2.2, 3.9, 5.1, 6.0].iter().map(|&v| vec![v]).collect();
        let y = [0.1, 0.9, 1.4, 2.0, 3.3, 3.1];
        let fit = pls1_nipals(&x, &y, 1).unwrap();
        let mx = x.iter().map(|r| r[0]).sum::<f64>() / 6.0;
        let my = y.iter().sum::<f64>() / 6.0;
        let sxy: f64 = x.iter().zip(&y).map(|(r, &v)| (r[0] - mx) * (v - my)).sum();
        let sxx: f64 = x.iter().map(|r| (r[0] - mx).powi(2)).sum();
        assert!((fit.coefficients[0] - sxy / sxx).abs() < 1e-9);
    }
}
