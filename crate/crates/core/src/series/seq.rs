//! One-dimensional term sequences with closed-form tails.
//!
//! Indices are 1-based. `*_sub(j0, step)` methods describe the arithmetic
//! subsequence `s_{j0}, s_{j0+step}, ...`; `step == 0` repeats `s_{j0}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Seq {
    Zero,
    Constant { value: Scalar },
    /// `coef * ratio^j`
    Geometric { coef: Scalar, ratio: Scalar },
    /// `coef * (-1)^(j+1) / j`
    AltHarmonic { coef: Scalar },
    /// `coef / j`
    Harmonic { coef: Scalar },
    /// `values[j-1]`, zero afterwards
    Finite { values: Vec<Scalar> },
}

/// Coarse magnitude/sign shape of a sequence, enough to decide the
/// convergence class of periodic subseries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Profile {
    /// Absolutely summable.
    Summable,
    /// Magnitudes comparable to `c/j` with `c > 0`; the sign of term `j` is
    /// `signs[(j-1) % signs.len()]` (0 marks a summable position).
    HarmonicLike { signs: Vec<i8> },
    /// Terms do not tend to zero.
    NonNull,
    Unknown,
}

/// Which signs can occur in a tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailSign {
    NonNegative,
    NonPositive,
    Both,
}

impl TailSign {
    pub fn from_flags(nonneg: bool, nonpos: bool) -> Self {
        match (nonneg, nonpos) {
            (true, _) => TailSign::NonNegative,
            (false, true) => TailSign::NonPositive,
            _ => TailSign::Both,
        }
    }

    pub fn flags(self) -> (bool, bool) {
        match self {
            TailSign::NonNegative => (true, false),
            TailSign::NonPositive => (false, true),
            TailSign::Both => (false, false),
        }
    }

    /// Sign class of a sum of two tails.
    pub fn join(self, other: TailSign) -> TailSign {
        let (a, b) = self.flags();
        let (c, d) = other.flags();
        TailSign::from_flags(a && c, b && d)
    }
}

fn big_ratio(n: i64, d: u64) -> Scalar {
    Scalar::Exact(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn pow_u64(x: &Scalar, e: u64) -> Scalar {
    match x {
        Scalar::Exact(r) => {
            let e = u32::try_from(e).expect("exponent too large for exact power");
            Scalar::Exact(num_traits::pow::Pow::pow(r, e))
        }
        Scalar::Float(f) => Scalar::Float(pow_f64(*f, e)),
    }
}

fn pow_f64(x: f64, e: u64) -> f64 {
    match i32::try_from(e) {
        Ok(e) => x.powi(e),
        Err(_) => x.powf(e as f64),
    }
}

impl Seq {
    pub fn geometric(coef: Scalar, ratio: Scalar) -> Self {
        Seq::Geometric { coef, ratio }
    }

    pub fn alt_harmonic() -> Self {
        Seq::AltHarmonic { coef: Scalar::one() }
    }

    /// `-s`
    pub fn negated(&self) -> Self {
        match self {
            Seq::Zero => Seq::Zero,
            Seq::Constant { value } => Seq::Constant { value: -value },
            Seq::Geometric { coef, ratio } => Seq::Geometric {
                coef: -coef,
                ratio: ratio.clone(),
            },
            Seq::AltHarmonic { coef } => Seq::AltHarmonic { coef: -coef },
            Seq::Harmonic { coef } => Seq::Harmonic { coef: -coef },
            Seq::Finite { values } => Seq::Finite {
                values: values.iter().map(|v| -v).collect(),
            },
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            Seq::Zero => true,
            Seq::Constant { value } => value.is_exact(),
            Seq::Geometric { coef, ratio } => coef.is_exact() && ratio.is_exact(),
            Seq::AltHarmonic { coef } | Seq::Harmonic { coef } => coef.is_exact(),
            Seq::Finite { values } => values.iter().all(Scalar::is_exact),
        }
    }

    pub fn at(&self, j: u64) -> Scalar {
        debug_assert!(j >= 1);
        match self {
            Seq::Zero => Scalar::zero(),
            Seq::Constant { value } => value.clone(),
            Seq::Geometric { coef, ratio } => coef * &pow_u64(ratio, j),
            Seq::AltHarmonic { coef } => {
                let s = if j % 2 == 1 { 1 } else { -1 };
                coef * &big_ratio(s, j)
            }
            Seq::Harmonic { coef } => coef * &big_ratio(1, j),
            Seq::Finite { values } => values
                .get((j - 1) as usize)
                .cloned()
                .unwrap_or_else(Scalar::zero),
        }
    }

    pub fn at_f64(&self, j: u64) -> f64 {
        match self {
            Seq::Zero => 0.0,
            Seq::Constant { value } => value.to_f64(),
            Seq::Geometric { coef, ratio } => coef.to_f64() * pow_f64(ratio.to_f64(), j),
            Seq::AltHarmonic { coef } => {
                let s = if j % 2 == 1 { 1.0 } else { -1.0 };
                s * coef.to_f64() / j as f64
            }
            Seq::Harmonic { coef } => coef.to_f64() / j as f64,
            Seq::Finite { values } => values
                .get((j - 1) as usize)
                .map(Scalar::to_f64)
                .unwrap_or(0.0),
        }
    }

    /// Coefficients converted once, for repeated float evaluation.
    pub fn float_form(&self) -> SeqF {
        match self {
            Seq::Zero => SeqF::Zero,
            Seq::Constant { value } => SeqF::Constant(value.to_f64()),
            Seq::Geometric { coef, ratio } => SeqF::Geometric(coef.to_f64(), ratio.to_f64()),
            Seq::AltHarmonic { coef } => SeqF::AltHarmonic(coef.to_f64()),
            Seq::Harmonic { coef } => SeqF::Harmonic(coef.to_f64()),
            Seq::Finite { values } => SeqF::Finite(values.iter().map(Scalar::to_f64).collect()),
        }
    }

    fn finite_sub<F: Fn(&Scalar) -> Scalar>(values: &[Scalar], j0: u64, step: u64, f: F) -> Scalar {
        let mut acc = Scalar::zero();
        let mut j = j0;
        while j >= 1 && (j as usize) <= values.len() {
            acc = acc + f(&values[(j - 1) as usize]);
            if step == 0 {
                // a repeated nonzero value has no finite tail; callers
                // filter that case before getting here
                break;
            }
            j += step;
        }
        acc
    }

    /// `sum_{t>=0} |s_{j0 + t*step}|`, or `None` when infinite.
    pub fn abs_tail_sub(&self, j0: u64, step: u64) -> Option<Scalar> {
        if step == 0 {
            return if self.at(j0.max(1)).is_zero() {
                Some(Scalar::zero())
            } else {
                None
            };
        }
        match self {
            Seq::Zero => Some(Scalar::zero()),
            Seq::Constant { value } => value.is_zero().then(Scalar::zero),
            Seq::Geometric { coef, ratio } => {
                if coef.is_zero() || ratio.is_zero() {
                    return Some(Scalar::zero());
                }
                let r = ratio.abs();
                if !r.lt(&Scalar::one()) {
                    return None;
                }
                let head = coef.abs() * r.pow_upper(j0);
                Some(head / (Scalar::one() - pow_u64(&r, step)))
            }
            Seq::AltHarmonic { coef } | Seq::Harmonic { coef } => coef.is_zero().then(Scalar::zero),
            Seq::Finite { values } => Some(Self::finite_sub(values, j0, step, Scalar::abs)),
        }
    }

    /// Signed `sum_{t>=0} s_{j0 + t*step}` when a closed form exists.
    pub fn tail_sub(&self, j0: u64, step: u64) -> Option<Scalar> {
        if step == 0 {
            return self.abs_tail_sub(j0, 0);
        }
        match self {
            Seq::Zero => Some(Scalar::zero()),
            Seq::Constant { value } => value.is_zero().then(Scalar::zero),
            Seq::Geometric { coef, ratio } => {
                if coef.is_zero() || ratio.is_zero() {
                    return Some(Scalar::zero());
                }
                if !ratio.abs().lt(&Scalar::one()) {
                    return None;
                }
                let head = coef * &pow_u64(ratio, j0);
                Some(head / (Scalar::one() - pow_u64(ratio, step)))
            }
            Seq::AltHarmonic { coef } | Seq::Harmonic { coef } => coef.is_zero().then(Scalar::zero),
            Seq::Finite { values } => Some(Self::finite_sub(values, j0, step, Clone::clone)),
        }
    }

    /// Sign class of the subsequence.
    pub fn sign_sub(&self, j0: u64, step: u64) -> TailSign {
        let sgn = |s: &Scalar| s.signum();
        match self {
            Seq::Zero => TailSign::NonNegative,
            Seq::Constant { value } => {
                TailSign::from_flags(sgn(value) >= 0, sgn(value) <= 0)
            }
            Seq::Geometric { coef, ratio } => {
                let c = sgn(coef);
                let r = sgn(ratio);
                if c == 0 || r >= 0 {
                    return TailSign::from_flags(c >= 0, c <= 0);
                }
                // alternating ratio: the sign is fixed only along even steps
                if step.is_multiple_of(2) {
                    let s = c * if j0.is_multiple_of(2) { 1 } else { -1 };
                    TailSign::from_flags(s >= 0, s <= 0)
                } else {
                    TailSign::Both
                }
            }
            Seq::AltHarmonic { coef } => {
                let c = sgn(coef);
                if c == 0 {
                    TailSign::NonNegative
                } else if step.is_multiple_of(2) {
                    let s = c * if j0 % 2 == 1 { 1 } else { -1 };
                    TailSign::from_flags(s >= 0, s <= 0)
                } else {
                    TailSign::Both
                }
            }
            Seq::Harmonic { coef } => TailSign::from_flags(sgn(coef) >= 0, sgn(coef) <= 0),
            Seq::Finite { values } => {
                let (mut nonneg, mut nonpos) = (true, true);
                let mut j = j0;
                while j >= 1 && (j as usize) <= values.len() {
                    let s = sgn(&values[(j - 1) as usize]);
                    nonneg &= s >= 0;
                    nonpos &= s <= 0;
                    if step == 0 {
                        break;
                    }
                    j += step;
                }
                TailSign::from_flags(nonneg, nonpos)
            }
        }
    }

    pub fn profile(&self) -> Profile {
        let sgn = |s: &Scalar| s.signum();
        match self {
            Seq::Zero | Seq::Finite { .. } => Profile::Summable,
            Seq::Constant { value } => {
                if value.is_zero() {
                    Profile::Summable
                } else {
                    Profile::NonNull
                }
            }
            Seq::Geometric { coef, ratio } => {
                if coef.is_zero() || ratio.abs().lt(&Scalar::one()) {
                    Profile::Summable
                } else {
                    Profile::NonNull
                }
            }
            Seq::AltHarmonic { coef } => match sgn(coef) {
                0 => Profile::Summable,
                c => Profile::HarmonicLike { signs: vec![c, -c] },
            },
            Seq::Harmonic { coef } => match sgn(coef) {
                0 => Profile::Summable,
                c => Profile::HarmonicLike { signs: vec![c] },
            },
        }
    }

    /// Number of nonzero terms when finite.
    pub fn nonzero_count(&self) -> Option<u64> {
        match self {
            Seq::Zero => Some(0),
            Seq::Finite { values } => Some(values.iter().filter(|v| !v.is_zero()).count() as u64),
            Seq::Constant { value } if value.is_zero() => Some(0),
            Seq::Geometric { coef, ratio } if coef.is_zero() || ratio.is_zero() => Some(0),
            Seq::AltHarmonic { coef } | Seq::Harmonic { coef } if coef.is_zero() => Some(0),
            _ => None,
        }
    }
}

/// `|x|` of an exact rational as `f64`, for diagnostics.
pub fn approx(r: &BigRational) -> f64 {
    r.abs().to_f64().unwrap_or(f64::NAN)
}

/// Exact `1/2^e`.
pub fn dyadic(e: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << (e as usize))
}

/// True when the value is exactly representable as an integer ratio with a
/// denominator that is a power of two.
pub fn is_dyadic(r: &BigRational) -> bool {
    let d = r.denom();
    !d.is_zero() && (d & (d - BigInt::one())).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Seq {
        Seq::geometric(Scalar::one(), Scalar::ratio(1, 2))
    }

    #[test]
    fn geometric_tails_match_summation() {
        let s = Seq::geometric(Scalar::int(2), Scalar::ratio(1, 3));
        // sum_{k>3} 2/3^k = 3^-3, checked against a long exact partial sum
        let t = s.abs_tail_sub(4, 1).unwrap();
        assert_eq!(t, Scalar::ratio(1, 27));
        let mut acc = Scalar::zero();
        for j in 4..60 {
            acc = acc + s.at(j);
        }
        assert!((t.to_f64() - acc.to_f64()).abs() < 1e-25);
        assert_eq!(s.sign_sub(4, 1), TailSign::NonNegative);
    }

    #[test]
    fn subsequence_tail() {
        // 1/4 + 1/16 + ... over even indices of 1/2^j
        assert_eq!(half().abs_tail_sub(2, 2).unwrap(), Scalar::ratio(1, 3));
    }

    #[test]
    fn alternating_geometric_sign() {
        let s = Seq::geometric(Scalar::one(), Scalar::ratio(-1, 2));
        assert_eq!(s.sign_sub(1, 1), TailSign::Both);
        assert_eq!(s.sign_sub(1, 2), TailSign::NonPositive);
        assert_eq!(s.tail_sub(1, 1).unwrap(), Scalar::ratio(-1, 3));
    }

    #[test]
    fn harmonic_has_no_tail() {
        assert!(Seq::alt_harmonic().abs_tail_sub(1, 1).is_none());
        assert_eq!(
            Seq::alt_harmonic().profile(),
            Profile::HarmonicLike { signs: vec![1, -1] }
        );
        assert_eq!(Seq::alt_harmonic().at(4), Scalar::ratio(-1, 4));
    }

    #[test]
    fn finite_sequence() {
        let s = Seq::Finite {
            values: vec![Scalar::int(1), Scalar::int(-2), Scalar::int(3)],
        };
        assert_eq!(s.abs_tail_sub(1, 1).unwrap(), Scalar::int(6));
        assert_eq!(s.tail_sub(2, 1).unwrap(), Scalar::int(1));
        assert_eq!(s.at(9), Scalar::zero());
        assert_eq!(s.nonzero_count(), Some(3));
    }

    #[test]
    fn dyadic_detection() {
        assert!(is_dyadic(&dyadic(7)));
        assert!(!is_dyadic(&BigRational::new(1.into(), 3.into())));
    }
}

/// Float mirror of [`Seq`]; `at` agrees with [`Seq::at_f64`].
#[derive(Clone, Debug)]
pub enum SeqF {
    Zero,
    Constant(f64),
    Geometric(f64, f64),
    AltHarmonic(f64),
    Harmonic(f64),
    Finite(Vec<f64>),
}

impl SeqF {
    pub fn at(&self, j: u64) -> f64 {
        match self {
            SeqF::Zero => 0.0,
            SeqF::Constant(v) => *v,
            SeqF::Geometric(c, r) => c * pow_f64(*r, j),
            SeqF::AltHarmonic(c) => {
                let s = if j % 2 == 1 { 1.0 } else { -1.0 };
                s * c / j as f64
            }
            SeqF::Harmonic(c) => c / j as f64,
            SeqF::Finite(v) => v.get((j - 1) as usize).copied().unwrap_or(0.0),
        }
    }
}
