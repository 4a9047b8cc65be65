//! Exact rationals.
//!
//! Every real-valued parameter (`m`, `p`, `q`, `r`, `ε`, `D`) is carried as a
//! [`Rat`], so interval classifications and the covering inequalities are
//! decided exactly. Floats only appear when a value is rendered for humans.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A rational number in lowest terms with a positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rat(Ratio<i128>);

impl Rat {
    pub const ZERO: Rat = Rat(Ratio::new_raw(0, 1));
    pub const ONE: Rat = Rat(Ratio::new_raw(1, 1));

    /// Builds a constant from a fraction already in lowest terms with a
    /// positive denominator.
    pub const fn from_parts(num: i128, den: i128) -> Rat {
        Rat(Ratio::new_raw(num, den))
    }

    pub fn new(num: i128, den: i128) -> Result<Rat> {
        if den == 0 {
            return Err(Error::InvalidRational(format!("{num}/0")));
        }
        Ok(Rat(Ratio::new(num, den)))
    }

    /// Panics if `den` is zero. Meant for literals.
    pub fn frac(num: i128, den: i128) -> Rat {
        Rat::new(num, den).expect("nonzero denominator")
    }

    pub fn int(n: i128) -> Rat {
        Rat(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Result<Rat> {
        if self.is_zero() {
            return Err(Error::InvalidRational("1/0".into()));
        }
        Ok(Rat(self.0.recip()))
    }

    pub fn floor(&self) -> i128 {
        Integer::div_floor(&self.numer(), &self.denom())
    }

    pub fn ceil(&self) -> i128 {
        Integer::div_ceil(&self.numer(), &self.denom())
    }

    /// `⌊self · n⌋` computed without building an intermediate rational.
    pub fn floor_mul(&self, n: u64) -> Result<i128> {
        let prod = self
            .numer()
            .checked_mul(n as i128)
            .ok_or(Error::Overflow("rational times natural"))?;
        Ok(Integer::div_floor(&prod, &self.denom()))
    }

    pub fn checked_add(&self, other: &Rat) -> Result<Rat> {
        self.0
            .checked_add(&other.0)
            .map(Rat)
            .ok_or(Error::Overflow("rational addition"))
    }

    pub fn checked_sub(&self, other: &Rat) -> Result<Rat> {
        self.0
            .checked_sub(&other.0)
            .map(Rat)
            .ok_or(Error::Overflow("rational subtraction"))
    }

    pub fn checked_mul(&self, other: &Rat) -> Result<Rat> {
        self.0
            .checked_mul(&other.0)
            .map(Rat)
            .ok_or(Error::Overflow("rational multiplication"))
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// The value rounded to 12 significant digits.
    pub fn decimal12(&self) -> f64 {
        let v = self.to_f64();
        if v == 0.0 || !v.is_finite() {
            return v;
        }
        format!("{v:.11e}").parse().unwrap_or(v)
    }

    /// Always `num/den`, even for integers.
    pub fn fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    /// Compares `self` against the integer `n` by cross-multiplication.
    pub fn cmp_int(&self, n: i128) -> Ordering {
        match n.checked_mul(self.denom()) {
            Some(scaled) => self.numer().cmp(&scaled),
            None => {
                if n > 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    /// Range check used for user-facing parameters.
    pub fn require(
        self,
        name: &'static str,
        ok: bool,
        expected: &'static str,
    ) -> Result<Rat> {
        if ok {
            Ok(self)
        } else {
            Err(Error::OutOfRange {
                name,
                value: self.to_string(),
                expected,
            })
        }
    }

    pub fn require_gt_one(self, name: &'static str) -> Result<Rat> {
        self.require(name, self > Rat::ONE, "must exceed 1")
    }

    pub fn require_unit_open(self, name: &'static str) -> Result<Rat> {
        self.require(
            name,
            self > Rat::ZERO && self < Rat::ONE,
            "must lie strictly between 0 and 1",
        )
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl From<u64> for Rat {
    fn from(n: u64) -> Rat {
        Rat::int(n as i128)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::int(n as i128)
    }
}

/// Accepts `"7"`, `"3/2"`, `"-1/4"` and plain decimals such as `"0.49"`.
impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rat> {
        let bad = || Error::InvalidRational(s.to_string());
        let t = s.trim();
        if t.is_empty() {
            return Err(bad());
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            return Rat::new(n, d).map_err(|_| bad());
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
        if whole.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 30 {
            return Err(bad());
        }
        let digits = format!("{whole}{frac}");
        let num: i128 = if digits.is_empty() {
            0
        } else {
            digits.parse().map_err(|_| bad())?
        };
        let den = 10i128.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        Rat::new(if neg { -num } else { num }, den)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.fraction_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        struct RatVisitor;

        impl Visitor<'_> for RatVisitor {
            type Value = Rat;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational as \"num/den\", a decimal string, or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rat, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rat, E> {
                Ok(Rat::from(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rat, E> {
                Ok(Rat::from(v))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Rat, E> {
                // Decimal literals in JSON round-trip through their shortest
                // representation, which is what the user typed.
                format!("{v}").parse().map_err(E::custom)
            }
        }

        d.deserialize_any(RatVisitor)
    }
}
