//! Alternating blocks `F_1 < H_1 < F_2 < H_2 < ...` of a conditionally
//! convergent host, steering the running sum near `0` after each `F_n` and
//! near `2^-v(n)` after each `H_n`, both within `2^-n`.
//!
//! Each block takes, in index order, the next terms of its sign that keep
//! the sum on the near side of the far window edge, and stops once the sum
//! is inside the window. An `H_n` block also stops only above `-2^-(n+1)`,
//! where `F_{n+1}` can still reach its window. Sums are carried as outward-rounded intervals so
//! the window conditions are certified.

use serde::{Deserialize, Serialize};

use crate::classify::convergence::selection_convergence_class;
use crate::enclosure::Interval;
use crate::error::{Error, Result};
use crate::series::{Selection, SeriesSpec};

/// Relative error allowed for a computed term.
const TERM_REL: f64 = 1e-15;
pub const DEFAULT_PI03_INDEX: u64 = 1 << 31;

/// `start, start + step, ..., end`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    pub start: u64,
    pub end: u64,
    pub step: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    F,
    H,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    /// 1-based position in the prefix.
    pub n: usize,
    pub runs: Vec<Run>,
    pub len: u64,
    /// Enclosure of the cumulative sum through this block.
    pub sum_lo: f64,
    pub sum_hi: f64,
}

impl Block {
    fn new(kind: BlockKind, n: usize) -> Self {
        Block {
            kind,
            n,
            runs: Vec::new(),
            len: 0,
            sum_lo: 0.0,
            sum_hi: 0.0,
        }
    }

    fn push(&mut self, i: u64) {
        self.len += 1;
        if let Some(r) = self.runs.last_mut() {
            if r.start == r.end {
                r.step = i - r.start;
                r.end = i;
                return;
            }
            if i == r.end + r.step {
                r.end = i;
                return;
            }
        }
        self.runs.push(Run { start: i, end: i, step: 1 });
    }

    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.runs
            .iter()
            .flat_map(|r| (r.start..=r.end).step_by(r.step as usize))
    }

    pub fn first(&self) -> Option<u64> {
        self.runs.first().map(|r| r.start)
    }

    pub fn last(&self) -> Option<u64> {
        self.runs.last().map(|r| r.end)
    }

    pub fn sum(&self) -> Interval {
        Interval {
            lo: self.sum_lo,
            hi: self.sum_hi,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pi03Blocks {
    pub v_prefix: Vec<u32>,
    /// `F_1, H_1, F_2, H_2, ...`
    pub blocks: Vec<Block>,
    pub host: SeriesSpec,
}

impl Pi03Blocks {
    pub fn f(&self, n: usize) -> &Block {
        &self.blocks[2 * (n - 1)]
    }

    pub fn h(&self, n: usize) -> &Block {
        &self.blocks[2 * n - 1]
    }
}

pub fn pi03_blocks(host: &SeriesSpec, v_prefix: &[u32], max_index: u64) -> Result<Pi03Blocks> {
    if host.dimension != 1 {
        return Err(Error::NotOneDimensional(host.dimension));
    }
    if v_prefix.is_empty() {
        return Err(Error::Parse("v prefix must be nonempty".into()));
    }
    if v_prefix.iter().any(|&v| v > 1000) {
        return Err(Error::Parse("v values above 1000 are not supported".into()));
    }
    if !selection_convergence_class(host, &Selection::all())?.is_potentially_conditional() {
        return Err(Error::InvalidSpec("host must be potentially conditionally convergent".into()));
    }
    let ev = host.evaluator()?;
    let mut buf = [0.0];
    let mut next = 1u64;
    let mut sum = Interval::ZERO;
    let mut blocks = Vec::with_capacity(2 * v_prefix.len());
    for (i, &v) in v_prefix.iter().enumerate() {
        let n = i + 1;
        let w = (-(n as f64)).exp2();
        let c = (-(v as f64)).exp2();
        for kind in [BlockKind::F, BlockKind::H] {
            let mut b = Block::new(kind, n);
            loop {
                let done = match kind {
                    BlockKind::F => sum.abs_lt(w),
                    // F_{n+1} only moves down, so leave it room above -w/2
                    BlockKind::H => sum.dist_lt(c, w) && sum.lo > -w / 2.0,
                };
                if b.len > 0 && done {
                    break;
                }
                if next > max_index {
                    return Err(Error::budget(format!("block {kind:?}_{n} not closed below index {max_index}")));
                }
                let idx = next;
                next += 1;
                ev.term_f64_into(idx, &mut buf);
                let t = Interval::around(buf[0], TERM_REL);
                let s = sum + t;
                let admissible = match kind {
                    BlockKind::F => t.hi < 0.0 && s.lo > -w,
                    BlockKind::H => t.lo > 0.0 && s.hi < c + w,
                };
                if admissible {
                    b.push(idx);
                    sum = s;
                }
            }
            b.sum_lo = sum.lo;
            b.sum_hi = sum.hi;
            blocks.push(b);
        }
    }
    Ok(Pi03Blocks {
        v_prefix: v_prefix.to_vec(),
        blocks,
        host: host.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::catalog::catalog_get;

    fn host() -> SeriesSpec {
        catalog_get("alternating-harmonic").unwrap().spec
    }

    #[test]
    fn oscillates_between_zero_and_a_quarter() {
        let p = pi03_blocks(&host(), &[2, 2, 2, 2], DEFAULT_PI03_INDEX).unwrap();
        for n in 1..=4 {
            let w = (-(n as f64)).exp2();
            assert!(p.f(n).sum().abs_lt(w));
            assert!(p.h(n).sum().dist_lt(0.25, w));
            assert!(p.f(n).last() < p.h(n).first());
        }
        // odd indices are positive for the alternating harmonic host
        assert!(p.blocks.iter().all(|b| b.indices().all(|i| (i % 2 == 1) == (b.kind == BlockKind::H))));
    }

    #[test]
    fn small_targets_keep_the_sum_reachable() {
        let p = pi03_blocks(&host(), &[5; 8], DEFAULT_PI03_INDEX).unwrap();
        for n in 1..=8 {
            let w = (-(n as f64)).exp2();
            assert!(p.f(n).sum().abs_lt(w));
            assert!(p.h(n).sum().dist_lt(1.0 / 32.0, w));
        }
    }

    #[test]
    fn runs_compress_steps() {
        let mut b = Block::new(BlockKind::F, 1);
        for i in [4, 6, 8, 9, 10, 20] {
            b.push(i);
        }
        assert_eq!(b.indices().collect::<Vec<_>>(), vec![4, 6, 8, 9, 10, 20]);
        assert_eq!(b.runs.len(), 3);
    }

    #[test]
    fn prefixes_agree() {
        let a = pi03_blocks(&host(), &[3, 3], DEFAULT_PI03_INDEX).unwrap();
        let b = pi03_blocks(&host(), &[3, 3, 5], DEFAULT_PI03_INDEX).unwrap();
        assert_eq!(a.blocks[..], b.blocks[..4]);
    }

    #[test]
    fn absolutely_convergent_host_rejected() {
        let h = catalog_get("geometric-half").unwrap().spec;
        assert!(matches!(pi03_blocks(&h, &[1], 1000), Err(Error::InvalidSpec(_))));
    }
}
