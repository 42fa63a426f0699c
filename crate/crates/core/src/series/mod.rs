//! Series in R^m: term rules, declared analytic metadata, selections,
//! partial sums and the catalog of named series.

pub mod catalog;
pub mod rule;
pub mod selection;
pub mod seq;
pub mod sum;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Point, Scalar};
pub use rule::{Component, Evaluator, Rule};
pub use selection::{Selection, TailPattern};
pub use seq::{Profile, Seq, SeqF, TailSign};

/// Declared bound on a tail sum as a function of the cut-off `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailBound {
    /// Derived from the rule's closed-form coordinate tails.
    FromRule,
    /// `coef * ratio^N`
    Geometric { coef: Scalar, ratio: Scalar },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TagKind {
    AbsolutelyConvergent,
    ConditionallyConvergent,
    PotentiallyConditionallyDivergent,
}

/// Convergence behaviour of `sum f(x_n)` for one functional `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionTag {
    pub functional: Vec<Scalar>,
    pub kind: TagKind,
    /// Bound on `sum_{n>N} |f(x_n)|` for absolutely convergent tags.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailBound>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonzeroCount {
    Finite(u64),
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub dimension: usize,
    pub rule: Rule,
    /// Present iff the series is declared absolutely convergent.
    #[serde(default)]
    pub tail_norm_bound: Option<TailBound>,
    /// Declared for unconditionally convergent series.
    #[serde(default)]
    pub selection_tail_bound: Option<TailBound>,
    #[serde(default)]
    pub direction_tags: Vec<DirectionTag>,
    #[serde(default)]
    pub monotone_nonincreasing_abs: bool,
    pub nonzero_count: Option<NonzeroCount>,
    #[serde(default)]
    pub inf_nonzero_norm: Option<Scalar>,
    #[serde(default)]
    pub has_null_subsequence_of_nonzero_terms: bool,
    /// Index from which the rule's closed form decides tail comparisons.
    #[serde(default)]
    pub eventual_regime: Option<u64>,
}

impl SeriesSpec {
    /// A spec with only the rule filled in; metadata left undeclared.
    pub fn bare(rule: Rule) -> Self {
        SeriesSpec {
            dimension: rule.dimension(),
            rule,
            tail_norm_bound: None,
            selection_tail_bound: None,
            direction_tags: Vec::new(),
            monotone_nonincreasing_abs: false,
            nonzero_count: None,
            inf_nonzero_norm: None,
            has_null_subsequence_of_nonzero_terms: false,
            eventual_regime: None,
        }
    }

    pub fn evaluator(&self) -> Result<Evaluator<'_>> {
        self.rule.evaluator()
    }

    /// Term `n` (1-based).
    pub fn term(&self, n: u64) -> Point {
        self.rule
            .evaluator()
            .expect("spec was validated")
            .term(n)
    }

    pub fn is_absolutely_convergent(&self) -> bool {
        self.tail_norm_bound.is_some()
    }

    pub fn is_exact(&self) -> bool {
        self.rule.is_exact()
    }

    fn eval_bound(&self, b: &TailBound, n: u64) -> Option<Scalar> {
        match b {
            TailBound::FromRule => (0..self.dimension)
                .map(|i| self.rule.abs_tail(i, n))
                .try_fold(Scalar::zero(), |acc, t| Some(acc + t?)),
            TailBound::Geometric { coef, ratio } => {
                Some(coef * &ratio.pow_upper(n))
            }
        }
    }

    /// Declared bound on `sum_{k>N} ||x_k||_inf`.
    pub fn tail_norm_bound(&self, n: u64) -> Option<Scalar> {
        self.eval_bound(self.tail_norm_bound.as_ref()?, n)
    }

    /// Declared bound on `||sum_{k in A, k>N} x_k||_inf` over all `A`;
    /// falls back on the norm bound, which implies it.
    pub fn selection_tail_bound(&self, n: u64) -> Option<Scalar> {
        match &self.selection_tail_bound {
            Some(b) => self.eval_bound(b, n),
            None => self.tail_norm_bound(n),
        }
    }

    /// Bound on `sum_{k>N} |f(x_k)|` for a declared tag.
    pub fn tag_tail(&self, tag: &DirectionTag, n: u64) -> Option<Scalar> {
        match tag.tail.as_ref()? {
            TailBound::FromRule => {
                let mut acc = Scalar::zero();
                for (i, a) in tag.functional.iter().enumerate() {
                    if !a.is_zero() {
                        acc = acc + a.abs() * self.rule.abs_tail(i, n)?;
                    }
                }
                Some(acc)
            }
            b => self.eval_bound(b, n),
        }
    }

    /// Structural checks plus the numeric spot checks listed for specs:
    /// term dimension, tag independence and the declared tail bound.
    pub fn validate(&self) -> Result<()> {
        self.rule.validate()?;
        if self.dimension == 0 || self.rule.dimension() != self.dimension {
            return Err(Error::InvalidSpec(format!(
                "dimension {} does not match the rule ({})",
                self.dimension,
                self.rule.dimension()
            )));
        }
        for t in &self.direction_tags {
            if t.functional.len() != self.dimension {
                return Err(Error::InvalidSpec("tag functional has wrong length".into()));
            }
        }
        let rows: Vec<Vec<Scalar>> = self
            .direction_tags
            .iter()
            .map(|t| t.functional.clone())
            .collect();
        if crate::classify::gamma::rank(&rows) != rows.len() {
            return Err(Error::InvalidSpec("direction tags are linearly dependent".into()));
        }
        if self.monotone_nonincreasing_abs && self.dimension != 1 {
            return Err(Error::InvalidSpec(
                "monotone_nonincreasing_abs applies to one-dimensional series".into(),
            ));
        }
        if self.tail_norm_bound.is_some() {
            self.spot_check_tail_bound()?;
        }
        Ok(())
    }

    fn spot_check_tail_bound(&self) -> Result<()> {
        let ev = self.evaluator()?;
        for &n in &[0u64, 1, 3, 10] {
            let b = self
                .tail_norm_bound(n)
                .ok_or_else(|| Error::InvalidSpec("tail_norm_bound is not finite".into()))?;
            let mut acc = 0.0;
            for k in n + 1..=n + 200 {
                acc += ev.term_f64(k).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            }
            if acc > b.to_f64() * (1.0 + 1e-12) + 1e-300 {
                return Err(Error::InvalidSpec(format!(
                    "tail_norm_bound({n}) = {b} is exceeded by the terms ({acc})"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: SeriesSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }
}
