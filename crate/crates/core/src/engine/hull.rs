use std::cmp::Ordering;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::enumerate::first_terms;
use crate::engine::keys::{Key, KeyTerms, Scaled};
use crate::engine::Limits;
use crate::error::{Error, Result};
use crate::scalar::Point;
use crate::series::{Selection, SeriesSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremePointReport {
    pub point: Point,
    /// Every selection of `{1..N}` summing to `point`.
    pub representations: Vec<Selection>,
    pub is_hull_vertex: bool,
}

/// Sums of all `2^N` masks, in mask order.
fn mask_sums<K: Key>(terms: &[K], zero: K) -> Vec<K> {
    let mut sums = Vec::with_capacity(1 << terms.len());
    sums.push(zero);
    for t in terms {
        let shifted: Vec<K> = sums.par_iter().map(|s| s.add(t)).collect();
        sums.extend(shifted);
    }
    sums
}

fn selection_of(mask: u64) -> Selection {
    Selection::finite((0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1))
}

fn cross(o: &[i128], a: &[i128], b: &[i128]) -> Ordering {
    let l = (BigInt::from(a[0]) - o[0]) * (BigInt::from(b[1]) - o[1]);
    let r = (BigInt::from(a[1]) - o[1]) * (BigInt::from(b[0]) - o[0]);
    l.cmp(&r)
}

fn cross_big(o: &[BigInt], a: &[BigInt], b: &[BigInt]) -> Ordering {
    ((&a[0] - &o[0]) * (&b[1] - &o[1])).cmp(&((&a[1] - &o[1]) * (&b[0] - &o[0])))
}

/// Strict hull vertices of sorted distinct points (monotone chain). Returns
/// positions into `pts`.
fn hull_vertices<K>(pts: &[K], turn: impl Fn(&K, &K, &K) -> Ordering) -> Vec<usize> {
    if pts.len() <= 2 {
        return (0..pts.len()).collect();
    }
    let chain = |iter: &mut dyn Iterator<Item = usize>| {
        let mut h: Vec<usize> = Vec::new();
        for i in iter {
            while h.len() >= 2
                && turn(&pts[h[h.len() - 2]], &pts[h[h.len() - 1]], &pts[i]) != Ordering::Greater
            {
                h.pop();
            }
            h.push(i);
        }
        h
    };
    let lower = chain(&mut (0..pts.len()));
    let upper = chain(&mut (0..pts.len()).rev());
    let mut v: Vec<usize> = lower.into_iter().chain(upper).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn reports<K: Key>(
    terms: &[K],
    zero: K,
    m: usize,
    to_point: impl Fn(&K) -> Point,
    turn: impl Fn(&K, &K, &K) -> Ordering,
) -> Vec<ExtremePointReport> {
    let sums = mask_sums(terms, zero);
    let mut order: Vec<(K, u64)> = sums.into_iter().enumerate().map(|(i, k)| (k, i as u64)).collect();
    order.par_sort_unstable();
    let mut groups: Vec<(K, Vec<u64>)> = Vec::new();
    for (k, mask) in order {
        match groups.last_mut() {
            Some((lk, masks)) if *lk == k => masks.push(mask),
            _ => groups.push((k, vec![mask])),
        }
    }
    let keys: Vec<K> = groups.iter().map(|(k, _)| k.clone()).collect();
    let vertices = if m == 1 {
        let mut v = vec![0, keys.len() - 1];
        v.dedup();
        v
    } else {
        hull_vertices(&keys, turn)
    };
    groups
        .into_iter()
        .enumerate()
        .map(|(i, (k, masks))| ExtremePointReport {
            point: to_point(&k),
            representations: masks.into_iter().map(selection_of).collect(),
            is_hull_vertex: vertices.binary_search(&i).is_ok(),
        })
        .collect()
}

/// All distinct depth-`N` subsums with every representing selection, and
/// which of them are vertices of the convex hull.
pub fn extreme_points(spec: &SeriesSpec, n: u64, limits: &Limits) -> Result<Vec<ExtremePointReport>> {
    let m = spec.dimension;
    if m > 2 {
        return Err(Error::Unsupported(format!("hulls are computed in dimension 1 or 2, not {m}")));
    }
    if !spec.is_absolutely_convergent() {
        return Err(Error::InvalidSpec("extreme points need an absolutely convergent series".into()));
    }
    limits.check(n)?;
    let terms = first_terms(spec, n)?;
    extreme_points_of_terms(&terms, m, limits)
}

pub(crate) fn extreme_points_of_terms(
    terms: &[Point],
    m: usize,
    limits: &Limits,
) -> Result<Vec<ExtremePointReport>> {
    if let Some(k) = terms.iter().position(|t| t.iter().all(|v| v.is_zero())) {
        return Err(Error::ZeroTermPresent(k as u64 + 1));
    }
    let keys = KeyTerms::new(terms, m, limits.dedup_bits)?;
    Ok(match &keys.scaled {
        Scaled::Small(t) => reports(t, vec![0i128; m], m, |k| keys.point_small(k), |o, a, b| {
            cross(o, a, b)
        }),
        Scaled::Big(t) => reports(t, vec![Default::default(); m], m, |k| keys.point_big(k), |o, a, b| {
            cross_big(o, a, b)
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use crate::series::catalog::catalog_get;

    fn vertices(r: &[ExtremePointReport]) -> Vec<&ExtremePointReport> {
        r.iter().filter(|p| p.is_hull_vertex).collect()
    }

    #[test]
    fn dyadic_extremes() {
        let spec = catalog_get("geometric-half").unwrap().spec;
        let r = extreme_points(&spec, 5, &Limits::default()).unwrap();
        let v = vertices(&r);
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].point, vec![Scalar::zero()]);
        assert_eq!(v[1].point, vec![Scalar::ratio(31, 32)]);
        assert!(v.iter().all(|p| p.representations.len() == 1));
    }

    #[test]
    fn repeated_terms() {
        let terms = vec![
            vec![Scalar::ratio(1, 2)],
            vec![Scalar::ratio(1, 4)],
            vec![Scalar::ratio(1, 4)],
        ];
        let r = extreme_points_of_terms(&terms, 1, &Limits::default()).unwrap();
        let half = r.iter().find(|p| p.point == vec![Scalar::ratio(1, 2)]).unwrap();
        assert_eq!(half.representations.len(), 2);
        assert!(!half.is_hull_vertex);
        let v = vertices(&r);
        assert_eq!(v.len(), 2);
        assert_eq!(v[1].point, vec![Scalar::one()]);
        assert!(v.iter().all(|p| p.representations.len() == 1));
    }

    #[test]
    fn square_hull_skips_collinear_points() {
        let terms = vec![
            vec![Scalar::one(), Scalar::zero()],
            vec![Scalar::zero(), Scalar::one()],
            vec![Scalar::ratio(1, 2), Scalar::zero()],
        ];
        let r = extreme_points_of_terms(&terms, 2, &Limits::default()).unwrap();
        let v: Vec<Point> = vertices(&r).iter().map(|p| p.point.clone()).collect();
        assert_eq!(v.len(), 4);
        assert!(!v.contains(&vec![Scalar::one(), Scalar::zero()]));
    }

    #[test]
    fn zero_terms_rejected() {
        let spec = catalog_get("finite-123").unwrap().spec;
        assert!(matches!(
            extreme_points(&spec, 5, &Limits::default()),
            Err(Error::ZeroTermPresent(4))
        ));
    }
}
