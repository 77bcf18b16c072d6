use std::f64::consts::PI;

use crate::Scalar;

/// Orthonormal DCT-II basis, `n_out x n_in`, row `k` holding
/// `s_k cos(pi k (2i + 1) / (2 n_in))` with `s_0 = sqrt(1/n)`, `s_k = sqrt(2/n)`.
#[derive(Debug, Clone)]
pub struct Dct<T> {
    basis: Vec<Vec<T>>,
    n_in: usize,
}

impl<T: Scalar> Dct<T> {
    pub fn new(n_in: usize, n_out: usize) -> Self {
        assert!(n_in > 0 && n_out <= n_in);
        let n = n_in as f64;
        let basis = (0..n_out)
            .map(|k| {
                let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
                (0..n_in)
                    .map(|i| T::of(scale * (PI * k as f64 * (2 * i + 1) as f64 / (2.0 * n)).cos()))
                    .collect()
            })
            .collect();
        Self { basis, n_in }
    }

    pub fn forward(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n_in);
        self.basis
            .iter()
            .map(|row| row.iter().zip(x).map(|(&b, &v)| b * v).sum())
            .collect()
    }

    /// Transpose product; the exact inverse when all `n_in` coefficients are kept.
    pub fn inverse(&self, coeffs: &[T]) -> Vec<T> {
        assert_eq!(coeffs.len(), self.basis.len());
        (0..self.n_in)
            .map(|i| self.basis.iter().zip(coeffs).map(|(row, &c)| row[i] * c).sum())
            .collect()
    }
}

/// Full orthonormal DCT-II of `x`.
pub fn dct_ii<T: Scalar>(x: &[T]) -> Vec<T> {
    Dct::new(x.len(), x.len()).forward(x)
}
