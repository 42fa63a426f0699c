//! Dyadic approximation certificates for subsums of the Liouville-type
//! family: block `k` has `2^(g(k)+1)` terms `((-1)^i / 2^g(k), (-1)^i / 2^k)`.
//!
//! For a selection whose y-sums over blocks `m >= k0` stay within 1:
//! - the count of selected even indices minus odd ones in block `m` is at
//!   most `2^m` in absolute value, so the x-sum of the block is at most
//!   `2^(m - g(m))`;
//! - when `g(m+1) >= g(m) + 2` these bounds at least halve from block to
//!   block, and everything after block `k-1` sums to at most
//!   `2^(1 + k - g(k))`;
//! - the part up to block `k-1` is `p0 / 2^g(k-1)`, so once
//!   `1 + k - g(k) <= -g(k-1) r` the subsum is within `1/q0^r` of `p0/q0`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap::GapFn;
use crate::scalar::Scalar;
use crate::series::catalog::liouville;
use crate::series::rule::LiouvilleTable;
use crate::series::{Selection, SeriesSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleFamily {
    pub gap: GapFn,
    /// `n_1, n_2, ...` while they fit in 64 bits (one more, saturated).
    pub block_bounds: Vec<u128>,
    pub spec: SeriesSpec,
}

impl LiouvilleFamily {
    pub fn new(gap: GapFn) -> Result<Self> {
        let spec = liouville(&gap)?;
        let table = LiouvilleTable::new(&gap)?;
        Ok(LiouvilleFamily {
            gap,
            block_bounds: table.ends,
            spec,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockCheck {
    pub block: u64,
    /// Selected even indices minus selected odd ones.
    pub excess: String,
    pub y_sum: Scalar,
    pub x_sum: Scalar,
    /// `2^(m - g(m))`
    pub x_bound: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleReport {
    pub gap: GapFn,
    pub k0: u64,
    pub r: u32,
    /// Chosen block: `q0 = 2^g(k-1)`.
    pub k: u64,
    pub q0_log2: u64,
    pub p0: String,
    /// `p0 / q0`, the subsum through block `k-1`.
    pub x_partial: Scalar,
    /// Subsum over all exactly counted blocks.
    pub x_checked: Scalar,
    /// Blocks `1..=checked_blocks` were counted exactly; later blocks
    /// contribute nothing by periodicity of the selection.
    pub checked_blocks: u64,
    pub blocks: Vec<BlockCheck>,
    /// `g(m+1) - g(m)` for the blocks where the halving was checked.
    pub gap_increments: Vec<(u64, String)>,
    /// `2^(1 + k - g(k))`
    pub tail_bound: Scalar,
    /// `1 / q0^r`
    pub liouville_bound: Scalar,
}

fn pow2(e: i128) -> Result<Scalar> {
    let two = BigRational::from_integer(BigInt::from(2));
    let mag = u32::try_from(e.unsigned_abs())
        .map_err(|_| Error::Unsupported(format!("exponent {e} too large")))?;
    let p = num_traits::pow::Pow::pow(&two, mag);
    Ok(Scalar::Exact(if e >= 0 { p } else { p.recip() }))
}

fn big(v: u128) -> BigInt {
    BigInt::from(v)
}

/// Blocks after the exactly counted ones carry no excess. True for finite
/// selections (indices fit in 64 bits) and for patterns whose period `Q`
/// is a power of two dividing `n_M` with zero excess per period.
fn quiet_after(sel: &Selection, n_m: u128) -> Result<()> {
    let pats = sel.tail_patterns();
    if pats.is_empty() {
        return Ok(());
    }
    let mut q: u64 = 2;
    for p in pats {
        q = q.lcm(&p.modulus);
        if q > 1 << 22 {
            return Err(Error::UnsupportedPattern("pattern period too large".into()));
        }
    }
    let start = pats.iter().map(|p| p.start).max().unwrap_or(1) as u128;
    if !q.is_power_of_two() || !n_m.is_multiple_of(q as u128) || start > n_m {
        return Err(Error::UnsupportedPattern(
            "blocks past 2^64 are only handled for power-of-two periods starting earlier".into(),
        ));
    }
    let even = sel.count_in(n_m, n_m + q as u128, 2, 0)?;
    let odd = sel.count_in(n_m, n_m + q as u128, 2, 1)?;
    if even != odd {
        return Err(Error::HypothesisViolated {
            block: u64::MAX,
            excess: "nonzero excess per period grows without bound".into(),
        });
    }
    Ok(())
}

pub fn liouville_bound_check(family: &LiouvilleFamily, sel: &Selection, k0: u64, r: u32) -> Result<LiouvilleReport> {
    if k0 == 0 || r == 0 {
        return Err(Error::Parse("k0 and r must be positive".into()));
    }
    let table = LiouvilleTable::new(&family.gap)?;
    // blocks whose end is exact
    let checked = table.ends.iter().take_while(|&&e| e != u128::MAX).count() as u64;
    if checked == 0 {
        return Err(Error::Unsupported("first block is too long to count".into()));
    }
    let n_m = table.end(checked);
    if sel.max_index().is_some_and(|i| i as u128 > n_m) {
        return Err(Error::Unsupported("selection reaches past the counted blocks".into()));
    }
    quiet_after(sel, n_m)?;

    let mut blocks = Vec::new();
    for m in 1..=checked {
        let (lo, hi) = (table.end(m - 1), table.end(m));
        let even = sel.count_in(lo, hi, 2, 0)?;
        let odd = sel.count_in(lo, hi, 2, 1)?;
        let excess = big(even) - big(odd);
        let e = Scalar::Exact(BigRational::from_integer(excess.clone()));
        let y_sum = &e * &pow2(-(m as i128))?;
        if m >= k0 && Scalar::one().lt(&y_sum.abs()) {
            return Err(Error::HypothesisViolated {
                block: m,
                excess: excess.to_string(),
            });
        }
        let g = table.g(m);
        let x_sum = &e * &pow2(-g)?;
        let x_bound = pow2(m as i128 - g)?;
        if m >= k0 && x_bound.lt(&x_sum.abs()) {
            // cannot happen once the y-sum is bounded; kept as a check
            return Err(Error::HypothesisViolated {
                block: m,
                excess: excess.to_string(),
            });
        }
        blocks.push(BlockCheck {
            block: m,
            excess: excess.to_string(),
            y_sum,
            x_sum,
            x_bound,
        });
    }

    // smallest admissible k with block k-1 counted
    let k = (k0..=checked + 1)
        .find(|&k| {
            let lhs = 1 + k as i128 - table.g(k.min(table.gaps.len() as u64 - 1));
            k < table.gaps.len() as u64 && lhs <= -table.g(k - 1) * r as i128
        })
        .ok_or_else(|| Error::GapTooSmall {
            block: checked,
            detail: format!("no block k >= {k0} has 1 + k - g(k) <= -g(k-1) * {r}"),
        })?;

    // halving of the per-block bounds from k on, as far as g evaluates
    let mut gap_increments = Vec::new();
    let mut m = k;
    while let (Some(a), Some(b)) = (family.gap.eval(m), family.gap.eval(m + 1)) {
        if b < a + 2 {
            return Err(Error::GapTooSmall {
                block: m,
                detail: format!("g({}) - g({m}) = {} < 2", m + 1, b - a),
            });
        }
        gap_increments.push((m, (b - a).to_string()));
        m += 1;
        if m > k + 64 {
            break;
        }
    }

    let q0_log2 = table.g(k - 1);
    let x_partial = blocks[..(k - 1) as usize]
        .iter()
        .fold(Scalar::zero(), |a, b| a + b.x_sum.clone());
    let x_checked = blocks.iter().fold(Scalar::zero(), |a, b| a + b.x_sum.clone());
    let p0_q = (&x_partial * &pow2(q0_log2)?)
        .as_exact()
        .cloned()
        .expect("exact");
    if !p0_q.is_integer() {
        return Err(Error::InvalidSpec("partial subsum is not dyadic with denominator q0".into()));
    }
    let p0 = p0_q.to_integer();
    let tail_bound = pow2(1 + k as i128 - table.g(k))?;
    let liouville_bound = pow2(-q0_log2 * r as i128)?;
    if liouville_bound.lt(&tail_bound) {
        return Err(Error::GapTooSmall {
            block: k,
            detail: "tail bound exceeds 1/q0^r".into(),
        });
    }
    let rest = &x_checked - &x_partial;
    if tail_bound.lt(&rest.abs()) {
        return Err(Error::HypothesisViolated {
            block: k,
            excess: format!("tail {rest} exceeds {tail_bound}"),
        });
    }
    Ok(LiouvilleReport {
        gap: family.gap.clone(),
        k0,
        r,
        k,
        q0_log2: q0_log2 as u64,
        p0: p0.to_string(),
        x_partial,
        x_checked,
        checked_blocks: checked,
        blocks,
        gap_increments,
        tail_bound,
        liouville_bound,
    })
}

impl LiouvilleReport {
    /// Recomputes every inequality from the stored block data.
    pub fn reverify(&self) -> bool {
        let Ok(q0) = pow2(self.q0_log2 as i128) else {
            return false;
        };
        let p0: BigInt = match self.p0.parse() {
            Ok(p) => p,
            Err(_) => return false,
        };
        let dyadic = &Scalar::Exact(BigRational::from_integer(p0)) / &q0;
        let blocks_ok = self.blocks.iter().all(|b| {
            b.block < self.k0 || (b.y_sum.abs().le(&Scalar::one()) && b.x_sum.abs().le(&b.x_bound))
        });
        let tail: Scalar = self.blocks[(self.k - 1) as usize..]
            .iter()
            .fold(Scalar::zero(), |a, b| a + b.x_bound.clone());
        let halving = self.gap_increments.iter().all(|(_, d)| d.parse::<i128>().is_ok_and(|d| d >= 2));
        blocks_ok
            && halving
            && dyadic == self.x_partial
            && tail.le(&self.tail_bound)
            && self.tail_bound.le(&self.liouville_bound)
            && (&self.x_checked - &dyadic).abs().le(&self.tail_bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TailPattern;

    fn family(g: &str) -> LiouvilleFamily {
        LiouvilleFamily::new(g.parse().unwrap()).unwrap()
    }

    #[test]
    fn fast_gap_certifies_all_ones() {
        let f = family("5*k+3");
        let rep = liouville_bound_check(&f, &Selection::all(), 1, 1).unwrap();
        assert_eq!(rep.k, 1);
        assert_eq!(rep.q0_log2, 3);
        assert_eq!(rep.p0, "0");
        assert_eq!(rep.tail_bound, Scalar::ratio(1, 64));
        assert!(rep.reverify());
    }

    #[test]
    fn unbalanced_finite_selection() {
        let f = family("5*k+3");
        // three odd indices in block 1 (length 2^9), two in block 2
        let sel = Selection::finite([1, 3, 5, 513, 515]);
        // block 1 has y-sum -3/2, so the oscillation bound starts at block 2
        assert!(matches!(
            liouville_bound_check(&f, &sel, 1, 1),
            Err(Error::HypothesisViolated { block: 1, .. })
        ));
        let rep = liouville_bound_check(&f, &sel, 2, 1).unwrap();
        assert_eq!(rep.blocks[0].x_sum, Scalar::ratio(-3, 256));
        assert_eq!(rep.blocks[1].x_sum, Scalar::ratio(-2, 1 << 13));
        assert_eq!((rep.k, rep.p0.as_str()), (2, "-3"));
        assert!(rep.reverify());
    }

    #[test]
    fn slow_gap_fails_the_halving() {
        let f = family("k+3");
        assert!(matches!(
            liouville_bound_check(&f, &Selection::all(), 1, 1),
            Err(Error::GapTooSmall { .. })
        ));
        assert!(matches!(
            liouville_bound_check(&f, &Selection::empty(), 1, 1),
            Err(Error::GapTooSmall { .. })
        ));
    }

    #[test]
    fn huge_gap_first_block() {
        let f = family("10^(k^2)");
        let rep = liouville_bound_check(&f, &Selection::all(), 1, 1).unwrap();
        assert_eq!(rep.checked_blocks, 1);
        assert_eq!(rep.blocks[0].x_bound, pow2(1 - 10).unwrap());
        assert!(rep.reverify());
    }

    #[test]
    fn oscillation_violation() {
        let f = family("5*k+3");
        let odd = Selection::new([], vec![TailPattern { start: 1, modulus: 2, residue: 1 }]).unwrap();
        assert!(matches!(
            liouville_bound_check(&f, &odd, 1, 1),
            Err(Error::HypothesisViolated { .. })
        ));
    }
}
