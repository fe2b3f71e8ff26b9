//! Report building blocks shared by the statistics and pipeline modules.
//!
//! Rationals serialize as `{"num": "...", "den": "...", "approx": f}` with
//! exact decimal strings; the float is rendering-only.

use num::rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::rat;

/// JSON form of an exact rational.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
    pub approx: f64,
}

impl From<&BigRational> for RationalRepr {
    fn from(r: &BigRational) -> Self {
        RationalRepr {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            approx: rat::to_f64(r),
        }
    }
}

impl TryFrom<&RationalRepr> for BigRational {
    type Error = crate::error::Error;
    fn try_from(repr: &RationalRepr) -> crate::error::Result<BigRational> {
        let r = rat::parse_rational(&format!("{}/{}", repr.num, repr.den))?;
        Ok(r)
    }
}

pub fn rational_json(r: &BigRational) -> Value {
    json!(RationalRepr::from(r))
}

/// serde adapter for `BigRational` fields.
pub mod rat_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        RationalRepr::from(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let repr = RationalRepr::deserialize(d)?;
        BigRational::try_from(&repr).map_err(serde::de::Error::custom)
    }
}

/// serde adapter for `Option<BigRational>` fields.
pub mod rat_serde_opt {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        r.as_ref().map(RationalRepr::from).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        let repr = Option::<RationalRepr>::deserialize(d)?;
        repr.map(|r| BigRational::try_from(&r).map_err(serde::de::Error::custom)).transpose()
    }
}

/// Outcome of a single verification check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    /// The asserted inequality or identity holds.
    Pass,
    /// The asserted inequality or identity is violated.
    Fail,
    /// A conditional bound whose hypothesis did not hold on this instance;
    /// the values are reported but nothing is asserted.
    NotAsserted,
    /// A counterexample to a statement the toolkit treats as a first-class
    /// finding rather than a failure (see the containment checks).
    Flagged,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub status: CheckStatus,
    pub details: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckResult {
    pub fn new(id: &str, status: CheckStatus, details: Value) -> Self {
        CheckResult { id: id.to_string(), status, details, notes: Vec::new() }
    }

    pub fn from_bool(id: &str, passed: bool, details: Value) -> Self {
        Self::new(id, if passed { CheckStatus::Pass } else { CheckStatus::Fail }, details)
    }

    pub fn note(mut self, msg: impl Into<String>) -> Self {
        self.notes.push(msg.into());
        self
    }

    pub fn passed(&self) -> bool {
        !matches!(self.status, CheckStatus::Fail)
    }

    pub fn is_flagged(&self) -> bool {
        matches!(self.status, CheckStatus::Flagged)
    }
}
