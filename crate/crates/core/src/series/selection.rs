//! 0/1 choice patterns over indices: a finite support plus arithmetic tail
//! patterns.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every `n >= start` with `n % modulus == residue`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TailPattern {
    pub start: u64,
    pub modulus: u64,
    pub residue: u64,
}

impl TailPattern {
    pub fn contains(&self, n: u64) -> bool {
        n >= self.start && n % self.modulus == self.residue
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMode {
    Finite,
    EventuallyPatterned,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "SelectionRepr", into = "SelectionRepr")]
pub struct Selection {
    finite_support: BTreeSet<u64>,
    tail_patterns: Vec<TailPattern>,
}

#[derive(Serialize, Deserialize)]
struct SelectionRepr {
    finite_support: Vec<u64>,
    #[serde(default)]
    tail_patterns: Vec<TailPattern>,
    #[serde(default)]
    mode: Option<SelectionMode>,
}

impl TryFrom<SelectionRepr> for Selection {
    type Error = Error;
    fn try_from(r: SelectionRepr) -> Result<Self> {
        let s = Selection::new(r.finite_support, r.tail_patterns)?;
        if let Some(m) = r.mode {
            if m != s.mode() {
                return Err(Error::InvalidSelection("mode does not match the patterns".into()));
            }
        }
        Ok(s)
    }
}

impl From<Selection> for SelectionRepr {
    fn from(s: Selection) -> Self {
        SelectionRepr {
            mode: Some(s.mode()),
            finite_support: s.finite_support.into_iter().collect(),
            tail_patterns: s.tail_patterns,
        }
    }
}

/// Largest period the counting routines will tabulate.
const MAX_PERIOD: u64 = 1 << 22;

impl Selection {
    pub fn new(finite: impl IntoIterator<Item = u64>, patterns: Vec<TailPattern>) -> Result<Self> {
        let finite_support: BTreeSet<u64> = finite.into_iter().collect();
        if finite_support.contains(&0) {
            return Err(Error::InvalidSelection("indices are 1-based".into()));
        }
        for p in &patterns {
            if p.modulus == 0 || p.residue >= p.modulus || p.start == 0 {
                return Err(Error::InvalidSelection(format!("bad pattern {p:?}")));
            }
        }
        if let Some(n) = finite_support
            .iter()
            .find(|&&n| patterns.iter().any(|p| p.contains(n)))
        {
            return Err(Error::InvalidSelection(format!(
                "index {n} is both in the finite support and covered by a pattern"
            )));
        }
        Ok(Selection {
            finite_support,
            tail_patterns: patterns,
        })
    }

    pub fn empty() -> Self {
        Selection::default()
    }

    pub fn finite(indices: impl IntoIterator<Item = u64>) -> Self {
        Selection::new(indices, Vec::new()).expect("positive indices")
    }

    /// Every index from 1 on.
    pub fn all() -> Self {
        Selection::new(
            [],
            vec![TailPattern {
                start: 1,
                modulus: 1,
                residue: 0,
            }],
        )
        .expect("valid pattern")
    }

    /// `1..=n`
    pub fn prefix(n: u64) -> Self {
        Selection::finite(1..=n)
    }

    pub fn mode(&self) -> SelectionMode {
        if self.tail_patterns.is_empty() {
            SelectionMode::Finite
        } else {
            SelectionMode::EventuallyPatterned
        }
    }

    pub fn finite_support(&self) -> &BTreeSet<u64> {
        &self.finite_support
    }

    pub fn tail_patterns(&self) -> &[TailPattern] {
        &self.tail_patterns
    }

    pub fn is_finite(&self) -> bool {
        self.tail_patterns.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.finite_support.contains(&n) || self.tail_patterns.iter().any(|p| p.contains(n))
    }

    /// Largest selected index of a finite selection.
    pub fn max_index(&self) -> Option<u64> {
        if self.is_finite() {
            self.finite_support.iter().next_back().copied()
        } else {
            None
        }
    }

    /// Selected indices `<= bound`, ascending.
    pub fn indices_upto(&self, bound: u64) -> Vec<u64> {
        if self.is_finite() {
            return self.finite_support.range(..=bound).copied().collect();
        }
        (1..=bound).filter(|&n| self.contains(n)).collect()
    }

    /// Restriction to indices `<= bound`, as a finite selection.
    pub fn truncate(&self, bound: u64) -> Selection {
        Selection::finite(self.indices_upto(bound))
    }

    /// Period of the pattern part together with an extra modulus.
    fn period_with(&self, extra: u64) -> Result<u64> {
        let mut l = extra.max(1);
        for p in &self.tail_patterns {
            l = l.lcm(&p.modulus);
            if l > MAX_PERIOD {
                return Err(Error::UnsupportedPattern(format!("period above {MAX_PERIOD}")));
            }
        }
        Ok(l)
    }

    /// Number of selected `n` in `(lo, hi]` with `n % modulus == residue`.
    /// Works over huge ranges by exploiting periodicity.
    pub fn count_in(&self, lo: u128, hi: u128, modulus: u64, residue: u64) -> Result<u128> {
        if hi <= lo {
            return Ok(0);
        }
        let keep = |n: u128| n % modulus as u128 == residue as u128;
        let mut total: u128 = self
            .finite_support
            .iter()
            .filter(|&&n| (n as u128) > lo && (n as u128) <= hi && keep(n as u128))
            .count() as u128;
        if self.tail_patterns.is_empty() {
            return Ok(total);
        }
        let pattern_hit = |n: u128| {
            self.tail_patterns
                .iter()
                .any(|p| n >= p.start as u128 && n % p.modulus as u128 == p.residue as u128)
        };
        let start = self.tail_patterns.iter().map(|p| p.start).max().unwrap_or(1) as u128;
        // head: lo < n < start, scanned directly
        let head_end = hi.min(start.saturating_sub(1));
        if head_end > lo {
            if head_end - lo > MAX_PERIOD as u128 {
                return Err(Error::UnsupportedPattern("pattern head too long to scan".into()));
            }
            for n in lo + 1..=head_end {
                if keep(n) && pattern_hit(n) {
                    total += 1;
                }
            }
        }
        // body: every pattern is active, membership is periodic
        let from = lo.max(start - 1);
        if hi > from {
            let l = self.period_with(modulus)? as u128;
            let per_period = (0..l).filter(|&r| keep(r) && pattern_hit(r + start * l)).count() as u128;
            let span = hi - from;
            let full = span / l;
            total += full * per_period;
            let rest_from = from + full * l;
            for n in rest_from + 1..=hi {
                if keep(n) && pattern_hit(n) {
                    total += 1;
                }
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_overlap() {
        let p = TailPattern {
            start: 5,
            modulus: 2,
            residue: 1,
        };
        assert!(Selection::new([7], vec![p]).is_err());
        assert!(Selection::new([6], vec![p]).is_ok());
    }

    #[test]
    fn membership_and_listing() {
        let s = Selection::new(
            [2],
            vec![TailPattern {
                start: 5,
                modulus: 3,
                residue: 0,
            }],
        )
        .unwrap();
        assert!(s.contains(2) && s.contains(6) && !s.contains(3) && !s.contains(5));
        assert_eq!(s.indices_upto(13), vec![2, 6, 9, 12]);
        assert_eq!(s.mode(), SelectionMode::EventuallyPatterned);
    }

    #[test]
    fn counting_matches_scan() {
        let s = Selection::new(
            [1, 4],
            vec![
                TailPattern {
                    start: 7,
                    modulus: 4,
                    residue: 1,
                },
                TailPattern {
                    start: 3,
                    modulus: 6,
                    residue: 2,
                },
            ],
        )
        .unwrap();
        for (lo, hi) in [(0u128, 100u128), (5, 57), (30, 31), (0, 6)] {
            for r in 0..2 {
                let want = (lo as u64 + 1..=hi as u64)
                    .filter(|&n| n % 2 == r && s.contains(n))
                    .count() as u128;
                assert_eq!(s.count_in(lo, hi, 2, r).unwrap(), want, "({lo}, {hi}] r={r}");
            }
        }
        let all = Selection::all();
        assert_eq!(all.count_in(0, 1 << 70, 2, 0).unwrap(), 1 << 69);
    }

    #[test]
    fn json_round_trip() {
        let s = Selection::new(
            [3, 9],
            vec![TailPattern {
                start: 10,
                modulus: 2,
                residue: 0,
            }],
        )
        .unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains("eventually-patterned"));
        let back: Selection = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }
}
