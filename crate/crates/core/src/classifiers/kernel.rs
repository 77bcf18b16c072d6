use serde::{Deserialize, Serialize};

use crate::linalg::dot;
use crate::{Error, Result, Scalar};

/// SVM kernel. `Polynomial` is the inhomogeneous `(1 + x.y)^order`;
/// `Rbf` is `exp(-|x - y|^2 / (2 sigma^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Polynomial { order: u32 },
    Rbf { sigma: f64 },
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Polynomial { order: 0 } => Err(Error::Config("polynomial order must be >= 1".into())),
            Kernel::Rbf { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                Err(Error::Config(format!("RBF sigma must be positive, got {sigma}")))
            }
            _ => Ok(()),
        }
    }

    pub fn eval<T: Scalar>(&self, x: &[T], y: &[T]) -> T {
        match *self {
            Kernel::Polynomial { order } => (T::one() + dot(x, y)).powi(order as i32),
            Kernel::Rbf { sigma } => {
                let d2: T = x.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum();
                (-d2 / T::of(2.0 * sigma * sigma)).exp()
            }
        }
    }
}
