//! Scalar fields used throughout the crate.
//!
//! Two modes are supported: exact rationals (`Rational`, arbitrary precision)
//! and `f64`. Every structure is generic over [`Scalar`], so the mode travels
//! with the type of the algebra it was built from.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Absolute tolerance used by float-mode validity checks.
pub const FLOAT_TOL: f64 = 1e-9;

/// Which scalar field a structure lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Rational,
    Float,
}

impl std::fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarMode::Rational => f.write_str("rational"),
            ScalarMode::Float => f.write_str("float"),
        }
    }
}

impl FromStr for ScalarMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(ScalarMode::Rational),
            "float" => Ok(ScalarMode::Float),
            other => Err(Error::Parse {
                field: "mode".into(),
                message: format!("unknown scalar mode `{other}`"),
            }),
        }
    }
}

pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    const MODE: ScalarMode;

    fn from_rational(r: &Rational) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact zero test for rationals, `|x| <= tol` for floats.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Canonical text form used by the structure-file format.
    fn to_text(&self) -> String;

    fn parse_text(text: &str) -> Result<Self>;

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer fits every scalar mode")
    }

    fn ratio(p: i64, q: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(p), BigInt::from(q)))
    }
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Float;

    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn to_text(&self) -> String {
        format!("{self:?}")
    }

    fn parse_text(text: &str) -> Result<Self> {
        if let Ok(v) = text.trim().parse::<f64>() {
            return Ok(v);
        }
        // rational literals are accepted in float mode as well
        parse_rational(text).map(|r| f64::from_rational(&r))
    }
}

impl Scalar for Rational {
    const MODE: ScalarMode = ScalarMode::Rational;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn to_text(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn parse_text(text: &str) -> Result<Self> {
        parse_rational(text)
    }
}

fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse {
        field: "scalar".into(),
        message: format!("`{text}` is not a rational literal"),
    };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Convert between scalar modes (rational values go through `f64` when the
/// target is float; float values are converted exactly to rationals).
pub fn convert<A: Scalar, B: Scalar>(a: &A) -> B {
    match (A::MODE, B::MODE) {
        (ScalarMode::Rational, ScalarMode::Rational) | (ScalarMode::Float, ScalarMode::Float) => {
            B::parse_text(&a.to_text()).expect("same-mode round trip")
        }
        (ScalarMode::Rational, ScalarMode::Float) => B::from_f64(a.to_f64_lossy()).expect("finite float"),
        (ScalarMode::Float, ScalarMode::Rational) => {
            B::from_rational(&Rational::from_float(a.to_f64_lossy()).unwrap_or_else(Rational::zero))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        let r = Rational::ratio(-3, 6);
        assert_eq!(r.to_text(), "-1/2");
        assert_eq!(Rational::parse_text("-1/2").unwrap(), r);
        assert_eq!(Rational::parse_text(" 4 ").unwrap(), Rational::from_int(4));
        assert!(Rational::parse_text("1/0").is_err());
        assert!(Rational::parse_text("0.5").is_err());
    }

    #[test]
    fn float_accepts_rational_literals() {
        assert_eq!(f64::parse_text("3/4").unwrap(), 0.75);
        assert_eq!(f64::parse_text("0.25").unwrap(), 0.25);
        assert_eq!(f64::parse_text(&0.1f64.to_text()).unwrap(), 0.1);
    }

    #[test]
    fn mode_conversion() {
        let r = Rational::ratio(1, 3);
        let f: f64 = convert(&r);
        assert!((f - 1.0 / 3.0).abs() < 1e-16);
        let back: Rational = convert(&0.5f64);
        assert_eq!(back, Rational::ratio(1, 2));
    }
}
