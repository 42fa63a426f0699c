//! Exact-or-float scalars and the small vector helpers built on them.
//!
//! Two exact values combine exactly; anything touching a float is a float.
//! Exact values are kept in lowest terms with a positive denominator, which
//! `BigRational` already guarantees.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

/// A point of R^m.
pub type Point = Vec<Scalar>;

/// Largest exponent taken in exact arithmetic by `pow_upper`.
pub const EXACT_POW_MAX: u64 = 4096;

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn int(v: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    /// `num/den` in lowest terms. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn float(v: f64) -> Self {
        Scalar::Float(v)
    }

    /// `1 / 2^e`, exact.
    pub fn pow2_inv(e: u32) -> Self {
        Scalar::Exact(BigRational::new(BigInt::one(), BigInt::one() << e))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(f) => *f == 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Exact(_) => true,
            Scalar::Float(f) => f.is_finite(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Float(f) => *f,
        }
    }

    /// Converts to float, dropping exactness.
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(f) => Scalar::Float(f.abs()),
        }
    }

    pub fn signum(&self) -> i8 {
        match self.num_cmp(&Scalar::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    /// Integer power; exact stays exact.
    pub fn powi(&self, e: i32) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(num_traits::pow::Pow::pow(r, e)),
            Scalar::Float(f) => Scalar::Float(f.powi(e)),
        }
    }

    /// Upper bound on `|self|^e`: exact up to `EXACT_POW_MAX`, an
    /// outward-rounded float beyond that.
    pub fn pow_upper(&self, e: u64) -> Scalar {
        if self.is_exact() && e <= EXACT_POW_MAX {
            return self.abs().powi(e as i32);
        }
        let b = self.to_f64().abs() * (1.0 + f64::EPSILON);
        let p = b.powf(e as f64) * (1.0 + 1e-12);
        Scalar::Float(if b > 0.0 { p.max(f64::MIN_POSITIVE) } else { 0.0 })
    }

    /// Numeric comparison. Mixed comparisons go through `f64`; NaN sorts
    /// as equal to everything, which callers never rely on.
    pub fn num_cmp(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }

    pub fn lt(&self, other: &Scalar) -> bool {
        self.num_cmp(other) == Ordering::Less
    }

    pub fn le(&self, other: &Scalar) -> bool {
        self.num_cmp(other) != Ordering::Greater
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if self.num_cmp(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if self.num_cmp(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }
}

/// Correctly scaled rational to float conversion that survives huge
/// numerators and denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift >= 0 {
        r.numer() / (r.denom() << (shift as usize))
    } else {
        (r.numer() << ((-shift) as usize)) / r.denom()
    };
    scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
}

pub fn f64_to_rational(v: f64) -> Option<BigRational> {
    BigRational::from_float(v)
}

impl PartialEq for Scalar {
    /// Structural equality: an exact value never equals a float.
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a.to_bits() == b.to_bits() || a == b,
            _ => false,
        }
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::int(v)
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Float(v)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (a, b) => Scalar::Float(a.to_f64() $op b.to_f64()),
                }
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Exact division by an exact zero panics, like `BigRational`.
    fn div(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => Scalar::Float(self.to_f64() / rhs.to_f64()),
        }
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(f) => Scalar::Float(-f),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

impl fmt::Display for Scalar {
    /// Exact values print as `p` or `p/q`; floats use the shortest
    /// round-trip form and always carry a `.`, an exponent or a non-finite
    /// name, so the two never collide when parsed back.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float(v) => {
                if v.is_nan() {
                    write!(f, "NaN")
                } else if v.is_infinite() {
                    write!(f, "{}", if *v > 0.0 { "inf" } else { "-inf" })
                } else {
                    write!(f, "{:?}", v)
                }
            }
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        let bad = || Error::Parse(format!("not a scalar: {s:?}"));
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Scalar::Exact(BigRational::new(p, q)));
        }
        if !t.is_empty() && t.trim_start_matches(['-', '+']).chars().all(|c| c.is_ascii_digit()) {
            let p: BigInt = t.parse().map_err(|_| bad())?;
            return Ok(Scalar::Exact(BigRational::from_integer(p)));
        }
        match t {
            "inf" | "+inf" => return Ok(Scalar::Float(f64::INFINITY)),
            "-inf" => return Ok(Scalar::Float(f64::NEG_INFINITY)),
            "NaN" => return Ok(Scalar::Float(f64::NAN)),
            _ => {}
        }
        t.parse::<f64>().map(Scalar::Float).map_err(|_| bad())
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i64),
            Num(f64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(i) => Ok(Scalar::int(i)),
            Repr::Num(f) => Ok(Scalar::Float(f)),
        }
    }
}

pub fn zero_point(m: usize) -> Point {
    vec![Scalar::zero(); m]
}

pub fn add_assign(acc: &mut [Scalar], v: &[Scalar]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a = &*a + b;
    }
}

pub fn sub_points(a: &[Scalar], b: &[Scalar]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_point(v: &[Scalar], s: &Scalar) -> Point {
    v.iter().map(|x| x * s).collect()
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).fold(Scalar::zero(), |acc, (x, y)| acc + x * y)
}

pub fn to_f64s(v: &[Scalar]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

/// Sup-norm of `a - b`, as a float.
pub fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Lexicographic numeric comparison of two points.
pub fn point_cmp(a: &[Scalar], b: &[Scalar]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let c = x.num_cmp(y);
        if c != Ordering::Equal {
            return c;
        }
    }
    a.len().cmp(&b.len())
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_stays_exact_and_reduces() {
        let a = Scalar::ratio(2, 4);
        let b = Scalar::ratio(1, 3);
        let s = &a + &b;
        assert_eq!(s, Scalar::ratio(5, 6));
        assert_eq!(s.to_string(), "5/6");
        assert_eq!(Scalar::ratio(3, -6).to_string(), "-1/2");
    }

    #[test]
    fn float_contaminates() {
        let s = Scalar::ratio(1, 2) + Scalar::float(0.25);
        assert!(!s.is_exact());
        assert_eq!(s.to_f64(), 0.75);
    }

    #[test]
    fn text_forms_do_not_collide() {
        assert_eq!("1".parse::<Scalar>().unwrap(), Scalar::one());
        assert_eq!(Scalar::float(1.0).to_string(), "1.0");
        assert!(!"1.0".parse::<Scalar>().unwrap().is_exact());
        assert_eq!("-7/21".parse::<Scalar>().unwrap(), Scalar::ratio(-1, 3));
        assert!("1/0".parse::<Scalar>().is_err());
        assert_eq!(
            "-inf".parse::<Scalar>().unwrap().to_f64(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn huge_rational_to_float() {
        let r = BigRational::new(BigInt::one(), BigInt::one() << 3000usize);
        let big = BigRational::new(BigInt::from(3) << 2000usize, BigInt::from(7) << 2000usize);
        assert_eq!(rational_to_f64(&r), 0.0);
        assert!((rational_to_f64(&big) - 3.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut c = CompensatedSum::default();
        c.add(1.0);
        for _ in 0..10 {
            c.add(1e-16);
        }
        assert!((c.value() - (1.0 + 1e-15)).abs() < 1e-17);
    }
}
