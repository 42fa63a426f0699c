//! Partial sums of selected terms and tail boxes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{add_assign, zero_point, CompensatedSum, Point, Scalar};
use crate::series::{Selection, SeriesSpec, TailSign};

/// `sum_{n<=upto, n in sel} x_n`, exact when the terms are exact.
pub fn partial_sum(spec: &SeriesSpec, sel: &Selection, upto: u64) -> Point {
    let ev = spec.evaluator().expect("spec was validated");
    let mut acc = zero_point(spec.dimension);
    for n in sel.indices_upto(upto) {
        add_assign(&mut acc, &ev.term(n));
    }
    acc
}

/// Float companion of [`partial_sum`] with compensated accumulation.
pub fn partial_sum_f64(spec: &SeriesSpec, sel: &Selection, upto: u64) -> Vec<f64> {
    let ev = spec.evaluator().expect("spec was validated");
    let m = spec.dimension;
    let mut acc = vec![CompensatedSum::default(); m];
    let mut t = vec![0.0; m];
    let mut add = |n: u64| {
        ev.term_f64_into(n, &mut t);
        for (a, v) in acc.iter_mut().zip(&t) {
            a.add(*v);
        }
    };
    if sel.is_finite() {
        sel.finite_support().range(..=upto).for_each(|&n| add(n));
    } else {
        (1..=upto).filter(|&n| sel.contains(n)).for_each(add);
    }
    acc.iter().map(CompensatedSum::value).collect()
}

/// Float sum over an explicit index list, in the given order.
pub fn sum_indices_f64(spec: &SeriesSpec, indices: &[u64]) -> Vec<f64> {
    let ev = spec.evaluator().expect("spec was validated");
    let m = spec.dimension;
    let mut acc = vec![CompensatedSum::default(); m];
    let mut t = vec![0.0; m];
    for &n in indices {
        ev.term_f64_into(n, &mut t);
        for (a, v) in acc.iter_mut().zip(&t) {
            a.add(*v);
        }
    }
    acc.iter().map(CompensatedSum::value).collect()
}

/// Running sum of the selected terms with index below `next_index`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialSumState {
    pub next_index: u64,
    pub sum: Point,
    pub terms_used: u64,
}

impl PartialSumState {
    pub fn new(m: usize) -> Self {
        PartialSumState {
            next_index: 1,
            sum: zero_point(m),
            terms_used: 0,
        }
    }

    /// Consumes indices up to and including `upto`.
    pub fn advance(&mut self, spec: &SeriesSpec, sel: &Selection, upto: u64) {
        let ev = spec.evaluator().expect("spec was validated");
        while self.next_index <= upto {
            if sel.contains(self.next_index) {
                add_assign(&mut self.sum, &ev.term(self.next_index));
                self.terms_used += 1;
            }
            self.next_index += 1;
        }
    }
}

/// Box containing every tail subsum over indices `> N`.
///
/// `halfwidth[i]` is `None` on coordinates without a usable bound. The box
/// itself is symmetric; `sign[i]` records when all tail terms of a
/// coordinate share a sign, which allows the one-sided `[0, B]` or `[-B, 0]`
/// refinement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBox {
    pub after: u64,
    pub halfwidth: Vec<Option<Scalar>>,
    pub sign: Vec<TailSign>,
}

impl TailBox {
    /// `[lo, hi]` of coordinate `i` with the one-sided refinement applied.
    pub fn refined(&self, i: usize) -> Option<(Scalar, Scalar)> {
        let b = self.halfwidth[i].clone()?;
        Some(match self.sign[i] {
            TailSign::NonNegative => (Scalar::zero(), b),
            TailSign::NonPositive => (-b, Scalar::zero()),
            TailSign::Both => (-b.clone(), b),
        })
    }

    pub fn is_bounded(&self, i: usize) -> bool {
        self.halfwidth[i].is_some()
    }
}

/// Tail box at `N` from the rule's per-coordinate tails, falling back on
/// the declared selection bound.
pub fn tail_box(spec: &SeriesSpec, n: u64) -> Result<TailBox> {
    let declared = spec.selection_tail_bound(n);
    let mut halfwidth = Vec::with_capacity(spec.dimension);
    let mut sign = Vec::with_capacity(spec.dimension);
    for i in 0..spec.dimension {
        let b = spec.rule.abs_tail(i, n).or_else(|| declared.clone());
        sign.push(if b.is_some() {
            spec.rule.tail_sign(i, n)
        } else {
            TailSign::Both
        });
        halfwidth.push(b);
    }
    if halfwidth.iter().all(Option::is_none) {
        return Err(Error::MissingBound);
    }
    Ok(TailBox {
        after: n,
        halfwidth,
        sign,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::catalog::catalog_get;

    #[test]
    fn geometric_prefix() {
        let spec = catalog_get("geometric-half").unwrap().spec;
        assert_eq!(partial_sum(&spec, &Selection::all(), 3), vec![Scalar::ratio(7, 8)]);
        assert_eq!(partial_sum(&spec, &Selection::empty(), 100), vec![Scalar::zero()]);
    }

    #[test]
    fn state_matches_partial_sum() {
        let spec = catalog_get("example-3.1").unwrap().spec;
        let sel = Selection::finite([1, 4, 5, 9]);
        let mut st = PartialSumState::new(2);
        st.advance(&spec, &sel, 6);
        st.advance(&spec, &sel, 12);
        assert_eq!(st.sum, partial_sum(&spec, &sel, 12));
        assert_eq!(st.terms_used, 4);
        assert_eq!(st.next_index, 13);
    }

    #[test]
    fn tail_boxes() {
        let g = catalog_get("geometric-half").unwrap().spec;
        let b = tail_box(&g, 4).unwrap();
        assert_eq!(b.halfwidth[0], Some(Scalar::ratio(1, 16)));
        assert_eq!(b.refined(0), Some((Scalar::zero(), Scalar::ratio(1, 16))));

        let e = catalog_get("example-3.1").unwrap().spec;
        let b = tail_box(&e, 10).unwrap();
        assert!(!b.is_bounded(0));
        assert_eq!(b.halfwidth[1], Some(Scalar::pow2_inv(10)));

        let c = catalog_get("example-3.4").unwrap().spec;
        let b = tail_box(&c, 3).unwrap();
        assert_eq!(b.refined(0), Some((Scalar::zero(), Scalar::ratio(1, 27))));

        let a = catalog_get("alternating-harmonic").unwrap().spec;
        assert!(matches!(tail_box(&a, 3), Err(Error::MissingBound)));
    }

    #[test]
    fn float_sum_of_instructive_series() {
        let spec = catalog_get("example-3.1").unwrap().spec;
        let s = partial_sum_f64(&spec, &Selection::all(), 1_000_000);
        assert!((s[0] - std::f64::consts::LN_2).abs() < 1e-5);
        assert!((s[1] - 1.0).abs() < 1e-12);
    }
}
