//! Classical dwell-time model: a particle that spends `τ` at the detector,
//! observed at a uniformly random instant of a window of length `T` that
//! contains the whole dwell period, is found there with probability `τ/T`.
//!
//! Arithmetic is exact: durations are arbitrary-precision rationals.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};

/// A duration in seconds, held as an exact rational.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Seconds(pub BigRational);

impl Seconds {
    pub fn from_integer(s: i64) -> Self {
        Seconds(BigRational::from_integer(s.into()))
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        Seconds(BigRational::new(numer.into(), denom.into()))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Seconds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parses decimal literals such as `30`, `0.25`, `1e6` or `2.5E-3` exactly.
impl FromStr for Seconds {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid("duration", format!("not a decimal number: `{s}`"));
        let t = s.trim();
        let (mantissa, exponent) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (t, 0),
        };
        let (negative, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let all: String = format!("{int_part}{frac_part}");
        let numer: num_bigint::BigInt = all.parse().map_err(|_| bad())?;
        let scale = exponent - frac_part.len() as i32;
        let ten = num_bigint::BigInt::from(10);
        let mut value = BigRational::from_integer(numer);
        if scale >= 0 {
            value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
        } else {
            value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
        }
        if negative {
            value = -value;
        }
        Ok(Seconds(value))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalScenario {
    dwell: Seconds,
    duration: Seconds,
    contains_dwell: bool,
}

impl ClassicalScenario {
    pub fn new(dwell: Seconds, duration: Seconds, contains_dwell: bool) -> Result<Self> {
        if !dwell.0.is_positive() {
            return Err(Error::invalid("tau", format!("dwell must be positive, got {dwell}")));
        }
        if !duration.0.is_positive() {
            return Err(Error::invalid("duration", format!("must be positive, got {duration}")));
        }
        Ok(Self {
            dwell,
            duration,
            contains_dwell,
        })
    }

    /// Window that covers the whole dwell period.
    pub fn covering(dwell: Seconds, duration: Seconds) -> Result<Self> {
        Self::new(dwell, duration, true)
    }

    pub fn dwell(&self) -> &Seconds {
        &self.dwell
    }

    pub fn duration(&self) -> &Seconds {
        &self.duration
    }

    pub fn contains_dwell(&self) -> bool {
        self.contains_dwell
    }
}

/// `min(τ/T, 1)`.
pub fn classical_found_probability(s: &ClassicalScenario) -> Result<BigRational> {
    if !s.contains_dwell {
        return Err(Error::UnsupportedScenario(
            "observation window does not contain the dwell period".into(),
        ));
    }
    let ratio = &s.dwell.0 / &s.duration.0;
    Ok(if ratio > BigRational::one() { BigRational::one() } else { ratio })
}

/// `1 − min(τ/T, 1)`.
pub fn classical_not_found_probability(s: &ClassicalScenario) -> Result<BigRational> {
    let found = classical_found_probability(s)?;
    Ok(BigRational::one() - found)
}
