use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifiers::Family;
use crate::{Error, Result};

/// A one-dimensional hyperparameter search direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    FrameLength,
    NMfcc,
    NSegments,
    Sigma,
    Order,
    LdaGamma,
    QdaGamma,
    K,
    Components,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 9] = [
        SweepAxis::FrameLength,
        SweepAxis::NMfcc,
        SweepAxis::NSegments,
        SweepAxis::Sigma,
        SweepAxis::Order,
        SweepAxis::LdaGamma,
        SweepAxis::QdaGamma,
        SweepAxis::K,
        SweepAxis::Components,
    ];

    /// Axes that tune one classifier family, in the order they are run.
    pub const CLASSIFIER_AXES: [SweepAxis; 6] = [
        SweepAxis::Sigma,
        SweepAxis::Order,
        SweepAxis::LdaGamma,
        SweepAxis::QdaGamma,
        SweepAxis::K,
        SweepAxis::Components,
    ];

    /// File-name form, e.g. `frame_length`.
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::FrameLength => "frame_length",
            SweepAxis::NMfcc => "n_mfcc",
            SweepAxis::NSegments => "n_segments",
            SweepAxis::Sigma => "sigma",
            SweepAxis::Order => "order",
            SweepAxis::LdaGamma => "lda_gamma",
            SweepAxis::QdaGamma => "qda_gamma",
            SweepAxis::K => "k",
            SweepAxis::Components => "components",
        }
    }

    pub fn is_feature_axis(self) -> bool {
        matches!(self, SweepAxis::FrameLength | SweepAxis::NMfcc | SweepAxis::NSegments)
    }

    pub fn is_integer(self) -> bool {
        !matches!(self, SweepAxis::Sigma | SweepAxis::LdaGamma | SweepAxis::QdaGamma)
    }

    /// Families a classifier axis applies to; empty for feature axes.
    pub fn families(self) -> &'static [Family] {
        match self {
            SweepAxis::Sigma => &[Family::RbfSvm],
            SweepAxis::Order => &[Family::PolySvm],
            SweepAxis::LdaGamma => &[Family::LinearLda],
            SweepAxis::QdaGamma => &[Family::QuadraticLda],
            SweepAxis::K => &[Family::KnnEuclidean, Family::KnnChebyshev],
            SweepAxis::Components => &[Family::Plsr],
            _ => &[],
        }
    }

    /// The full search grid.
    pub fn grid(self) -> Vec<f64> {
        let ints = |r: std::ops::RangeInclusive<u32>| r.map(f64::from).collect();
        match self {
            SweepAxis::FrameLength => vec![512.0, 1024.0, 2048.0, 4096.0],
            SweepAxis::NMfcc => ints(2..=39),
            SweepAxis::NSegments => ints(1..=50),
            SweepAxis::Sigma => (1..=30).map(|i| f64::from(i) / 10.0).collect(),
            SweepAxis::Order => ints(1..=4),
            SweepAxis::LdaGamma => (0..=10).map(|i| f64::from(i) / 10.0).collect(),
            SweepAxis::QdaGamma => vec![0.0, 1.0],
            SweepAxis::K => ints(1..=25),
            SweepAxis::Components => ints(2..=19),
        }
    }

    pub fn format_value(self, v: f64) -> String {
        if self.is_integer() {
            format!("{}", v as i64)
        } else {
            format!("{v:?}")
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    /// Accepts `frame_length` or `frame-length`.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().replace('-', "_");
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name() == norm)
            .ok_or_else(|| {
                let names: Vec<_> = SweepAxis::ALL.iter().map(|a| a.name().replace('_', "-")).collect();
                Error::Config(format!("unknown sweep axis {s:?}; valid axes: {}", names.join(", ")))
            })
    }
}
