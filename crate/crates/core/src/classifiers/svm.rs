//! Soft-margin kernel SVM trained by sequential minimal optimization with
//! second-order working-set selection.

use serde::{Deserialize, Serialize};

use super::kernel::Kernel;
use crate::{Error, Label, Result, Scalar};

/// Stopping tolerance on the maximal KKT violation.
pub const SMO_TOLERANCE: f64 = 1e-3;
pub const SMO_MAX_ITERATIONS: usize = 1_000_000;
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SvmModel<T> {
    pub kernel: Kernel,
    pub cost: f64,
    /// Dual variable of every training point, in training order.
    pub alphas: Vec<T>,
    pub support_vectors: Vec<Vec<T>>,
    /// `alpha_i * y_i` for each support vector.
    pub support_coefficients: Vec<T>,
    pub bias: T,
    pub iterations: usize,
}

impl<T: Scalar> SvmModel<T> {
    /// `sum_i alpha_i y_i K(x_i, x) + b`.
    pub fn decision(&self, x: &[T]) -> T {
        self.support_vectors
            .iter()
            .zip(&self.support_coefficients)
            .map(|(sv, &c)| c * self.kernel.eval(sv, x))
            .sum::<T>()
            + self.bias
    }
}

/// Dual objective `sum alpha - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij` (to be maximised).
pub fn dual_objective<T: Scalar>(kernel: &Kernel, x: &[Vec<T>], y: &[Label], alphas: &[T]) -> f64 {
    let n = x.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alphas[i].as_f64()
                * alphas[j].as_f64()
                * y[i].sign()
                * y[j].sign()
                * kernel.eval(&x[i], &x[j]).as_f64();
        }
    }
    alphas.iter().map(|a| a.as_f64()).sum::<f64>() - 0.5 * quad
}

pub(crate) fn fit<T: Scalar>(kernel: Kernel, cost: f64, x: &[Vec<T>], labels: &[Label]) -> Result<SvmModel<T>> {
    kernel.validate()?;
    if !(cost > 0.0 && cost.is_finite()) {
        return Err(Error::Config(format!("SVM cost must be positive, got {cost}")));
    }
    let n = x.len();
    if n < 2 || !labels.contains(&Label::Covid) || !labels.contains(&Label::NonCovid) {
        return Err(Error::Training("SVM needs at least one sample of each class".into()));
    }

    let y: Vec<T> = labels.iter().map(|l| T::of(l.sign())).collect();
    let k: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| kernel.eval(&x[i], &x[j])).collect())
        .collect();
    let c = T::of(cost);
    let eps = T::of(SMO_TOLERANCE);
    let tau = T::of(TAU);
    let zero = T::zero();

    let mut alpha = vec![zero; n];
    // Gradient of the minimisation form 1/2 a'Qa - e'a.
    let mut grad = vec![-T::one(); n];

    let in_up = |a: T, yt: T| (yt > zero && a < c) || (yt < zero && a > zero);
    let in_low = |a: T, yt: T| (yt > zero && a > zero) || (yt < zero && a < c);

    let mut iterations = 0;
    loop {
        let mut g_max = T::neg_infinity();
        let mut i_sel = None;
        for t in 0..n {
            if in_up(alpha[t], y[t]) {
                let v = -y[t] * grad[t];
                if v > g_max {
                    g_max = v;
                    i_sel = Some(t);
                }
            }
        }
        let mut g_min = T::infinity();
        let mut j_sel = None;
        let mut best = T::infinity();
        if let Some(i) = i_sel {
            for t in 0..n {
                if !in_low(alpha[t], y[t]) {
                    continue;
                }
                let v = -y[t] * grad[t];
                if v < g_min {
                    g_min = v;
                }
                let b = g_max - v;
                if b > zero {
                    let mut a = k[i][i] + k[t][t] - T::of(2.0) * k[i][t];
                    if a <= zero {
                        a = tau;
                    }
                    let obj = -(b * b) / a;
                    if obj < best {
                        best = obj;
                        j_sel = Some(t);
                    }
                }
            }
        }
        let (i, j) = match (i_sel, j_sel) {
            (Some(i), Some(j)) if g_max - g_min >= eps => (i, j),
            _ => break,
        };
        if iterations >= SMO_MAX_ITERATIONS {
            log::warn!("SMO reached {SMO_MAX_ITERATIONS} iterations without meeting tolerance");
            break;
        }
        iterations += 1;

        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        let mut quad = k[i][i] + k[j][j] - T::of(2.0) * k[i][j];
        if quad <= zero {
            quad = tau;
        }
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] = alpha[i] + delta;
            alpha[j] = alpha[j] + delta;
            if diff > zero {
                if alpha[j] < zero {
                    alpha[j] = zero;
                    alpha[i] = diff;
                }
            } else if alpha[i] < zero {
                alpha[i] = zero;
                alpha[j] = -diff;
            }
            if diff > zero {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] = alpha[i] - delta;
            alpha[j] = alpha[j] + delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < zero {
                alpha[j] = zero;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < zero {
                alpha[i] = zero;
                alpha[j] = sum;
            }
        }

        let (dai, daj) = (alpha[i] - old_ai, alpha[j] - old_aj);
        for t in 0..n {
            grad[t] = grad[t] + y[t] * (y[i] * k[t][i] * dai + y[j] * k[t][j] * daj);
        }
    }

    // Offset: average over free vectors, otherwise the midpoint of the feasible interval.
    let (mut ub, mut lb) = (T::infinity(), T::neg_infinity());
    let (mut free_sum, mut free_count) = (zero, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < zero { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else if alpha[t] <= zero {
            if y[t] > zero { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else {
            free_sum = free_sum + yg;
            free_count += 1;
        }
    }
    let rho = if free_count > 0 {
        free_sum / T::from_usize(free_count).unwrap()
    } else {
        (ub + lb) / T::of(2.0)
    };

    let mut support_vectors = Vec::new();
    let mut support_coefficients = Vec::new();
    for t in 0..n {
        if alpha[t] > zero {
            support_vectors.push(x[t].clone());
            support_coefficients.push(alpha[t] * y[t]);
        }
    }
    Ok(SvmModel {
        kernel,
        cost,
        alphas: alpha,
        support_vectors,
        support_coefficients,
        bias: -rho,
        iterations,
    })
}
