//! Integer keys for exact grouping of subsums.
//!
//! Exact terms are scaled by the per-coordinate lcm of their denominators;
//! float terms are snapped to a dyadic grid. Either way sums become integer
//! vectors whose lexicographic order matches the numeric one, so grouping is
//! exact and independent of summation order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{Point, Scalar};

pub(crate) trait Key: Clone + Ord + Send + Sync {
    fn add(&self, other: &Self) -> Self;
}

impl Key for Vec<i128> {
    fn add(&self, other: &Self) -> Self {
        self.iter().zip(other).map(|(a, b)| a + b).collect()
    }
}

impl Key for Vec<BigInt> {
    fn add(&self, other: &Self) -> Self {
        self.iter().zip(other).map(|(a, b)| a + b).collect()
    }
}

pub(crate) enum Scaled {
    Small(Vec<Vec<i128>>),
    Big(Vec<Vec<BigInt>>),
}

pub(crate) struct KeyTerms {
    pub scaled: Scaled,
    dens: Vec<BigInt>,
    float_bits: Option<u32>,
}

impl KeyTerms {
    pub fn new(terms: &[Point], m: usize, dedup_bits: u32) -> Result<Self> {
        let exact = terms.iter().flatten().all(Scalar::is_exact);
        if !exact {
            let scale = (dedup_bits as f64).exp2();
            let mut out = Vec::with_capacity(terms.len());
            for t in terms {
                let mut row = Vec::with_capacity(m);
                for v in t {
                    let s = (v.to_f64() * scale).round();
                    if !s.is_finite() || s.abs() > 2f64.powi(100) {
                        return Err(Error::Unsupported(format!("term value {v} is out of range")));
                    }
                    row.push(s as i128);
                }
                out.push(row);
            }
            return Ok(KeyTerms {
                scaled: Scaled::Small(out),
                dens: vec![BigInt::one() << dedup_bits as usize; m],
                float_bits: Some(dedup_bits),
            });
        }
        let mut dens = vec![BigInt::one(); m];
        for t in terms {
            for (d, v) in dens.iter_mut().zip(t) {
                *d = d.lcm(v.as_exact().expect("exact").denom());
            }
        }
        let big: Vec<Vec<BigInt>> = terms
            .iter()
            .map(|t| {
                t.iter()
                    .zip(&dens)
                    .map(|(v, d)| {
                        let r = v.as_exact().expect("exact");
                        r.numer() * (d / r.denom())
                    })
                    .collect()
            })
            .collect();
        let limit = BigInt::one() << 125usize;
        let fits = (0..m).all(|i| {
            big.iter()
                .fold(BigInt::zero(), |a, t| a + t[i].abs())
                < limit
        });
        let scaled = if fits {
            Scaled::Small(
                big.iter()
                    .map(|t| t.iter().map(|v| v.to_i128().expect("fits")).collect())
                    .collect(),
            )
        } else {
            Scaled::Big(big)
        };
        Ok(KeyTerms {
            scaled,
            dens,
            float_bits: None,
        })
    }

    pub fn point_small(&self, key: &[i128]) -> Point {
        match self.float_bits {
            Some(bits) => key
                .iter()
                .map(|&k| Scalar::float(k as f64 * (-(bits as f64)).exp2()))
                .collect(),
            None => key
                .iter()
                .zip(&self.dens)
                .map(|(&k, d)| Scalar::Exact(BigRational::new(BigInt::from(k), d.clone())))
                .collect(),
        }
    }

    pub fn point_big(&self, key: &[BigInt]) -> Point {
        key.iter()
            .zip(&self.dens)
            .map(|(k, d)| Scalar::Exact(BigRational::new(k.clone(), d.clone())))
            .collect()
    }
}

/// Merges two sorted, grouped lists, adding multiplicities of equal keys.
pub(crate) fn merge_grouped<K: Ord>(a: Vec<(K, u64)>, b: Vec<(K, u64)>) -> Vec<(K, u64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut a = a.into_iter().peekable();
    let mut b = b.into_iter().peekable();
    loop {
        let take_a = match (a.peek(), b.peek()) {
            (None, None) => break,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some((x, _)), Some((y, _))) => match x.cmp(y) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => {
                    let (k, c) = a.next().expect("peeked");
                    let (_, d) = b.next().expect("peeked");
                    out.push((k, c + d));
                    continue;
                }
            },
        };
        out.push(if take_a { a.next() } else { b.next() }.expect("peeked"));
    }
    out
}

/// All subsums of `terms`, sorted and grouped with multiplicities.
pub(crate) fn grouped_subsums<K: Key>(terms: &[K], zero: K) -> Vec<(K, u64)> {
    let mut list = vec![(zero, 1u64)];
    for t in terms {
        let shifted: Vec<(K, u64)> = list.iter().map(|(k, c)| (k.add(t), *c)).collect();
        list = merge_grouped(list, shifted);
    }
    list
}

/// Same as [`grouped_subsums`], with the first `prefix` terms split across
/// threads. The result is canonical, so thread count never shows.
pub(crate) fn grouped_subsums_par<K: Key>(terms: &[K], zero: K, prefix: usize) -> Vec<(K, u64)> {
    let p = prefix.min(terms.len());
    let heads = grouped_subsums(&terms[..p], zero.clone());
    let tails = grouped_subsums(&terms[p..], zero);
    let mut all: Vec<(K, u64)> = heads
        .par_iter()
        .flat_map_iter(|(hk, hc)| tails.iter().map(move |(tk, tc)| (hk.add(tk), hc * tc)))
        .collect();
    all.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(K, u64)> = Vec::with_capacity(all.len());
    for (k, c) in all {
        match out.last_mut() {
            Some((lk, lc)) if *lk == k => *lc += c,
            _ => out.push((k, c)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping_counts_multiplicities() {
        let terms: Vec<Vec<i128>> = vec![vec![1], vec![2], vec![3], vec![0]];
        let g = grouped_subsums(&terms, vec![0]);
        let counts: Vec<(i128, u64)> = g.iter().map(|(k, c)| (k[0], *c)).collect();
        assert_eq!(
            counts,
            vec![(0, 2), (1, 2), (2, 2), (3, 4), (4, 2), (5, 2), (6, 2)]
        );
        assert_eq!(grouped_subsums_par(&terms, vec![0], 2), g);
    }

    #[test]
    fn exact_scaling() {
        let terms = vec![
            vec![Scalar::ratio(1, 2), Scalar::ratio(1, 3)],
            vec![Scalar::ratio(1, 4), Scalar::ratio(1, 9)],
        ];
        let k = KeyTerms::new(&terms, 2, 40).unwrap();
        match &k.scaled {
            Scaled::Small(t) => {
                assert_eq!(t, &vec![vec![2, 3], vec![1, 1]]);
                assert_eq!(k.point_small(&t[0]), terms[0]);
            }
            Scaled::Big(_) => panic!("small values"),
        }
    }
}
