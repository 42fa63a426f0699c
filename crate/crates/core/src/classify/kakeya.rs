//! Kakeya's dichotomy for one-dimensional absolutely convergent series.
//!
//! "Almost all n" is decided from an eventual-regime index `E` and a
//! geometric period: when `x_{n+P} = ρ x_n` for all `n`, both `|x_n|` and its
//! tail scale by `|ρ|`, so the comparisons for `n >= E` repeat those for
//! `E <= n < E + P`, which are checked exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{NonzeroCount, SeriesSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KakeyaLabel {
    Finite,
    CantorLike,
    FiniteUnionOfIntervals,
    #[serde(rename = "Mixed/Unknown")]
    MixedUnknown,
}

/// `|x_n|` against `Σ_{k>n} |x_k|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub n: u64,
    pub term: Scalar,
    pub tail: Scalar,
    /// `|x_n| > tail`
    pub dominates: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KakeyaClass {
    pub label: KakeyaLabel,
    pub witness: Vec<Comparison>,
    /// Comparisons from this index on repeat with period `period`.
    pub eventual_regime: Option<u64>,
    pub period: Option<u64>,
}

pub fn kakeya_classify(spec: &SeriesSpec) -> Result<KakeyaClass> {
    if spec.dimension != 1 {
        return Err(Error::NotOneDimensional(spec.dimension));
    }
    if let Some(NonzeroCount::Finite(_)) = spec.nonzero_count {
        return Ok(KakeyaClass {
            label: KakeyaLabel::Finite,
            witness: Vec::new(),
            eventual_regime: None,
            period: None,
        });
    }
    let e = spec
        .eventual_regime
        .ok_or_else(|| Error::UndecidableComparison("no eventual-regime index declared".into()))?
        .max(1);
    let (p, rho) = spec.rule.geometric_period(0).ok_or_else(|| {
        Error::UndecidableComparison("no closed form for comparisons beyond the eventual regime".into())
    })?;
    if !rho.is_exact() || rho.is_zero() || !rho.abs().lt(&Scalar::one()) {
        return Err(Error::UndecidableComparison(format!("period ratio {rho} is not an exact contraction")));
    }
    let ev = spec.evaluator()?;
    let mut witness = Vec::new();
    for n in 1..e + p {
        let term = ev.term(n)[0].abs();
        let tail = spec
            .rule
            .abs_tail(0, n)
            .filter(Scalar::is_exact)
            .ok_or_else(|| Error::UndecidableComparison(format!("no exact tail after {n}")))?;
        if !term.is_exact() {
            return Err(Error::UndecidableComparison(format!("term {n} is not exact")));
        }
        let dominates = tail.lt(&term);
        witness.push(Comparison {
            n,
            term,
            tail,
            dominates,
        });
    }
    let eventual = &witness[(e - 1) as usize..];
    let label = if eventual.iter().all(|c| c.dominates) {
        KakeyaLabel::CantorLike
    } else if eventual.iter().all(|c| !c.dominates) && spec.monotone_nonincreasing_abs {
        KakeyaLabel::FiniteUnionOfIntervals
    } else {
        KakeyaLabel::MixedUnknown
    };
    Ok(KakeyaClass {
        label,
        witness,
        eventual_regime: Some(e),
        period: Some(p),
    })
}
