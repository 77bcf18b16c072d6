//! Small dense kernels for the discriminant and PLS models: Cholesky,
//! triangular solves and a pivoted general solve. Matrices are `Vec<Vec<T>>`
//! in row-major order; sizes here are at most a few dozen.

use num_traits::Float;

use crate::{Error, Result, Scalar};

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Lower-triangular `L` with `L L^T = a`. Fails if `a` is not positive definite.
pub fn cholesky<T: Scalar>(a: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let n = a.len();
    let mut l = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s = a[i][j] - dot(&l[i][..j], &l[j][..j]);
            if i == j {
                if s <= T::zero() || !s.is_finite() {
                    return Err(Error::Numerical(format!("matrix not positive definite at pivot {i}")));
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn solve_lower<T: Scalar>(l: &[Vec<T>], b: &[T]) -> Vec<T> {
    let n = l.len();
    let mut x = vec![T::zero(); n];
    for i in 0..n {
        x[i] = (b[i] - dot(&l[i][..i], &x[..i])) / l[i][i];
    }
    x
}

/// `log det(L L^T)` from a Cholesky factor.
pub fn cholesky_log_det<T: Scalar>(l: &[Vec<T>]) -> T {
    let two = T::of(2.0);
    (0..l.len()).map(|i| two * l[i][i].ln()).sum()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Result<Vec<T>> {
    let n = a.len();
    let mut m: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| Float::abs(m[i][col]).partial_cmp(&Float::abs(m[j][col])).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap();
        let p = Float::abs(m[pivot][col]);
        if p == T::zero() || p.is_nan() {
            return Err(Error::Numerical(format!("singular system at column {col}")));
        }
        m.swap(col, pivot);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != T::zero() {
                let (top, bottom) = m.split_at_mut(r);
                for (dst, &src) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *dst = *dst - f * src;
                }
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s = (i + 1..n).map(|j| m[i][j] * x[j]).sum::<T>();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_reconstructs() {
        let a = vec![vec![4.0, 2.0, 0.6], vec![2.0, 5.0, 1.0], vec![0.6, 1.0, 3.0]];
        let l = cholesky(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| l[i][k] * l[j][k]).sum();
                assert!((v - a[i][j]).abs() < 1e-12);
            }
        }
        let det = 4.0 * (5.0 * 3.0 - 1.0) - 2.0 * (2.0 * 3.0 - 0.6) + 0.6 * (2.0 - 5.0 * 0.6);
        assert!((cholesky_log_det(&l) - f64::ln(det)).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        assert!(cholesky(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
    }

    #[test]
    fn pivoted_solve() {
        let a = vec![vec![0.0, 1.0], vec![2.0, 1.0]];
        let x = solve(&a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 3.0).abs() < 1e-12);
        assert!(solve(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[1.0, 2.0]).is_err());
    }
}
