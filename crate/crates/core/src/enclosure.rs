//! Outward-rounded `f64` intervals.
//!
//! Every operation widens its result by one ulp on each side, so the true
//! real-number result of the same operations on any members of the inputs
//! always lies inside.

use std::ops::{Add, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    /// Encloses `num / den` for exact integers (both below 2^53).
    pub fn ratio(num: f64, den: f64) -> Self {
        let q = num / den;
        Interval {
            lo: q.next_down(),
            hi: q.next_up(),
        }
    }

    /// `v` widened by `rel * |v|` on each side, for values computed with a
    /// small relative error.
    pub fn around(v: f64, rel: f64) -> Self {
        let r = (v.abs() * rel).next_up();
        Interval {
            lo: (v - r).next_down(),
            hi: (v + r).next_up(),
        }
    }

    pub fn mid(&self) -> f64 {
        self.lo / 2.0 + self.hi / 2.0
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Certified `|x| < b` for every x in the interval.
    pub fn abs_lt(&self, b: f64) -> bool {
        self.hi < b && self.lo > -b
    }

    /// Certified `|x - c| < b`.
    pub fn dist_lt(&self, c: f64, b: f64) -> bool {
        (*self - Interval::point(c)).abs_lt(b)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval {
            lo: (self.lo + o.lo).next_down(),
            hi: (self.hi + o.hi).next_up(),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        self + (-o)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encloses_tenths() {
        let mut s = Interval::ZERO;
        for _ in 0..10 {
            s = s + Interval::ratio(1.0, 10.0);
        }
        assert!(s.lo <= 1.0 && 1.0 <= s.hi);
        assert!(s.width() < 1e-14);
    }

    #[test]
    fn certified_comparisons() {
        let i = Interval { lo: -0.1, hi: 0.2 };
        assert!(i.abs_lt(0.25));
        assert!(!i.abs_lt(0.2));
        assert!(i.dist_lt(0.05, 0.16));
    }
}
