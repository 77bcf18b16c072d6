use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Binary class of a cough recording.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Covid,
    NonCovid,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Covid, Label::NonCovid];

    /// +1 for COVID, -1 for non-COVID. Decision scores share this sign convention.
    pub fn sign(self) -> f64 {
        match self {
            Label::Covid => 1.0,
            Label::NonCovid => -1.0,
        }
    }

    /// Label for a decision score; an exact zero resolves to non-COVID.
    pub fn from_score(score: f64) -> Label {
        if score > 0.0 {
            Label::Covid
        } else {
            Label::NonCovid
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Covid => "covid",
            Label::NonCovid => "non_covid",
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::Covid => Label::NonCovid,
            Label::NonCovid => Label::Covid,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "covid" => Ok(Label::Covid),
            "non_covid" => Ok(Label::NonCovid),
            other => Err(Error::Validation(format!("unknown label token {other:?}"))),
        }
    }
}
