//! Exact rational numbers and circle points.
//!
//! Angles and arc endpoints are stored as fractions of a full turn, so the
//! circle point `θ = 2π·q` is represented by the rational `q`.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational with 128-bit numerator and denominator.
pub type Rational = Ratio<i128>;

/// Largest denominator accepted when recovering a rational from an `f64`.
const MAX_RECOVERED_DENOM: i128 = 1 << 24;

pub fn rat(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

pub fn int(n: i128) -> Rational {
    Rational::from_integer(n)
}

pub fn to_f64(q: &Rational) -> f64 {
    // Split off the integer part so large numerators keep their precision.
    let whole = q.floor();
    let frac = q - whole;
    whole.numer().to_f64().unwrap_or(f64::NAN)
        + frac.numer().to_f64().unwrap_or(f64::NAN) / frac.denom().to_f64().unwrap_or(f64::NAN)
}

/// Fractional part in `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

/// Largest rational `g` such that every input is an integer multiple of `g`.
/// Zero inputs are ignored; returns `None` when all inputs are zero.
pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<Rational> {
    let mut acc: Option<Rational> = None;
    for v in values {
        if v.is_zero() {
            continue;
        }
        let v = v.abs();
        acc = Some(match acc {
            None => v,
            Some(g) => {
                let num = (g.numer() * v.denom()).gcd(&(v.numer() * g.denom()));
                Rational::new(num, g.denom() * v.denom())
            }
        });
    }
    acc
}

/// Recover a small-denominator rational from a float that is meant to
/// represent one (e.g. a grid spacing read from a file).
///
/// Fails when no rational with denominator at most 2^24 lies within a few
/// ulps of `x`; such values cannot anchor an exact grid.
pub fn from_f64_exactish(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::Input(format!("non-finite value {x}")));
    }
    // Continued fraction convergents.
    let tol = 8.0 * f64::EPSILON * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e18 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > MAX_RECOVERED_DENOM {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64) / (k1 as f64) - x).abs() <= tol {
            return Ok(Rational::new(h1, k1));
        }
        let rem = r - a;
        if rem == 0.0 {
            break;
        }
        r = 1.0 / rem;
    }
    Err(Error::Structural(format!(
        "{x} is not representable as a rational grid coordinate"
    )))
}

/// Parse `"a/b"` or `"a"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let parse = |s: &str| {
        s.trim()
            .parse::<i128>()
            .map_err(|_| Error::Input(format!("bad rational '{text}'")))
    };
    match text.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d == 0 {
                return Err(Error::Input(format!("zero denominator in '{text}'")));
            }
            Ok(Rational::new(parse(n)?, d))
        }
        None => Ok(Rational::from_integer(parse(text)?)),
    }
}

/// A point of the unit circle, `θ = 2π·num/den`, reduced with `num ∈ [0, den)`.
///
/// The associated circle element is `z = e^{-iθ}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(i64, i64)", into = "(i64, i64)")]
pub struct RationalAngle {
    num: i64,
    den: i64,
}

impl RationalAngle {
    pub const ZERO: RationalAngle = RationalAngle { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Input("angle with zero denominator".into()));
        }
        Self::from_fraction(&Rational::new(num as i128, den as i128))
    }

    /// Reduce an arbitrary rational modulo 1.
    pub fn from_fraction(q: &Rational) -> Result<Self> {
        let f = frac(q);
        let (num, den) = (f.numer(), f.denom());
        match (i64::try_from(*num), i64::try_from(*den)) {
            (Ok(num), Ok(den)) => Ok(RationalAngle { num, den }),
            _ => Err(Error::Capacity(format!(
                "angle {q} exceeds 64-bit fractions"
            ))),
        }
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> i64 {
        self.den
    }

    /// Fraction of a full turn in `[0, 1)`.
    pub fn fraction(&self) -> Rational {
        Rational::new(self.num as i128, self.den as i128)
    }

    pub fn radians(&self) -> f64 {
        TAU * self.num as f64 / self.den as f64
    }

    /// `e^{-iθ}`.
    pub fn point(&self) -> num_complex::Complex64 {
        num_complex::Complex64::from_polar(1.0, -self.radians())
    }

    /// The image under `z ↦ z^n`, i.e. `nθ mod 2π`.
    pub fn times(&self, n: i64) -> Self {
        let num = ((self.num as i128 * n as i128).rem_euclid(self.den as i128)) as i64;
        RationalAngle { num, den: self.den }.reduced()
    }

    pub fn add(&self, other: &RationalAngle) -> Self {
        // Denominators stay small (cycle points), so the unchecked path is fine.
        Self::from_fraction(&(self.fraction() + other.fraction())).expect("angle sum overflow")
    }

    pub fn neg(&self) -> Self {
        Self::from_fraction(&(-self.fraction())).expect("negated angle fits")
    }

    /// Representative in `[-1/2, 1/2)` (the window `[-π, π)`).
    pub fn signed_fraction(&self) -> Rational {
        let f = self.fraction();
        if f >= rat(1, 2) {
            f - Rational::one()
        } else {
            f
        }
    }

    fn reduced(self) -> Self {
        let g = self.num.gcd(&self.den);
        if g <= 1 {
            self
        } else {
            RationalAngle {
                num: self.num / g,
                den: self.den / g,
            }
        }
    }
}

impl Ord for RationalAngle {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl PartialOrd for RationalAngle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}·2π", self.num, self.den)
    }
}

impl FromStr for RationalAngle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_fraction(&parse_rational(s)?)
    }
}

impl TryFrom<(i64, i64)> for RationalAngle {
    type Error = Error;

    fn try_from((num, den): (i64, i64)) -> Result<Self> {
        RationalAngle::new(num, den)
    }
}

impl From<RationalAngle> for (i64, i64) {
    fn from(a: RationalAngle) -> Self {
        (a.num, a.den)
    }
}

/// `base^exp` without overflow, or a capacity error.
pub fn checked_pow(base: i128, exp: u32) -> Result<i128> {
    base.checked_pow(exp)
        .ok_or_else(|| Error::Capacity(format!("{base}^{exp} overflows 128-bit integers")))
}
