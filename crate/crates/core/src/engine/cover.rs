use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::enumerate::first_terms;
use crate::engine::keys::{merge_grouped, Key, KeyTerms, Scaled};
use crate::engine::Limits;
use crate::error::{Error, Result};
use crate::scalar::{Point, Scalar};
use crate::series::sum::{tail_box, TailBox};
use crate::series::SeriesSpec;

/// Axis-aligned region `[lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Window {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| !(a <= b)) {
            return Err(Error::Parse("window bounds must satisfy lo <= hi".into()));
        }
        Ok(Window { lo, hi })
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    /// True when `[lo, hi]` meets the window, with a little slack for the
    /// float conversion of exact bounds.
    pub fn meets(&self, lo: &[f64], hi: &[f64]) -> bool {
        let slack = |v: f64| 1e-9 * (1.0 + v.abs());
        (0..self.lo.len()).all(|i| {
            hi[i] + slack(hi[i]) >= self.lo[i] && lo[i] - slack(lo[i]) <= self.hi[i]
        })
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.meets(p, p)
    }
}

impl FromStr for Window {
    type Err = Error;

    /// `lo:hi` per coordinate, comma separated, e.g. `-2:2,0:1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for part in s.split(',') {
            let (a, b) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("window part {part:?} is not lo:hi")))?;
            let p = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad window bound {t:?}")))
            };
            lo.push(p(a)?);
            hi.push(p(b)?);
        }
        Window::new(lo, hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverBox {
    pub center: Point,
    /// Infinite on coordinates without a tail bound.
    pub halfwidth: Point,
}

impl CoverBox {
    pub fn lo(&self, i: usize) -> Scalar {
        &self.center[i] - &self.halfwidth[i]
    }

    pub fn hi(&self, i: usize) -> Scalar {
        &self.center[i] + &self.halfwidth[i]
    }

    pub fn lo_f64(&self) -> Vec<f64> {
        (0..self.center.len()).map(|i| self.lo(i).to_f64()).collect()
    }

    pub fn hi_f64(&self) -> Vec<f64> {
        (0..self.center.len()).map(|i| self.hi(i).to_f64()).collect()
    }

    pub fn contains(&self, p: &[Scalar]) -> bool {
        p.iter()
            .enumerate()
            .all(|(i, v)| (v - &self.center[i]).abs().le(&self.halfwidth[i]))
    }

    pub fn contains_f64(&self, p: &[f64]) -> bool {
        let (lo, hi) = (self.lo_f64(), self.hi_f64());
        p.iter().enumerate().all(|(i, v)| lo[i] <= *v && *v <= hi[i])
    }

    /// `other ⊆ self`, exactly.
    pub fn contains_box(&self, other: &CoverBox) -> bool {
        (0..self.center.len()).all(|i| self.lo(i).le(&other.lo(i)) && other.hi(i).le(&self.hi(i)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxCover {
    pub depth: u64,
    pub boxes: Vec<CoverBox>,
    pub source: SeriesSpec,
}

impl BoxCover {
    pub fn contains(&self, p: &[Scalar]) -> bool {
        self.boxes.iter().any(|b| b.contains(p))
    }

    pub fn contains_f64(&self, p: &[f64]) -> bool {
        self.boxes.iter().any(|b| b.contains_f64(p))
    }

    /// Every box lies in some box of `coarser`.
    pub fn nests_into(&self, coarser: &BoxCover) -> bool {
        self.boxes
            .iter()
            .all(|b| coarser.boxes.iter().any(|c| c.contains_box(b)))
    }
}

/// `[lo, hi]` offsets of the tail box on coordinate `i`.
fn offsets(tb: &TailBox, i: usize) -> (Scalar, Scalar) {
    tb.refined(i).unwrap_or_else(|| {
        (
            Scalar::float(f64::NEG_INFINITY),
            Scalar::float(f64::INFINITY),
        )
    })
}

fn reachable(s: &[Scalar], tb: &TailBox) -> (Vec<f64>, Vec<f64>) {
    let mut lo = Vec::with_capacity(s.len());
    let mut hi = Vec::with_capacity(s.len());
    for (i, v) in s.iter().enumerate() {
        let (a, b) = offsets(tb, i);
        lo.push((v + &a).to_f64());
        hi.push((v + &b).to_f64());
    }
    (lo, hi)
}

fn make_box(s: &[Scalar], tb: &TailBox) -> CoverBox {
    let two = Scalar::int(2);
    let mut center = Vec::with_capacity(s.len());
    let mut halfwidth = Vec::with_capacity(s.len());
    for (i, v) in s.iter().enumerate() {
        match tb.refined(i) {
            Some((a, b)) => {
                center.push(v + &(&(&a + &b) / &two));
                halfwidth.push(&(&b - &a) / &two);
            }
            None => {
                center.push(v.clone());
                halfwidth.push(Scalar::float(f64::INFINITY));
            }
        }
    }
    CoverBox { center, halfwidth }
}

/// Distinct prefix sums level by level, dropping branches whose reachable
/// box misses the window.
fn prefix_levels<K: Key>(
    terms: &[K],
    zero: K,
    to_point: impl Fn(&K) -> Point,
    tails: &[TailBox],
    window: Option<&Window>,
) -> Vec<Point> {
    let keep = |k: &K, tb: &TailBox| match window {
        None => true,
        Some(w) => {
            let (lo, hi) = reachable(&to_point(k), tb);
            w.meets(&lo, &hi)
        }
    };
    let mut list: Vec<(K, u64)> = vec![(zero, 1)];
    list.retain(|(k, _)| keep(k, &tails[0]));
    for (j, t) in terms.iter().enumerate() {
        let shifted: Vec<(K, u64)> = list.iter().map(|(k, _)| (k.add(t), 1)).collect();
        list = merge_grouped(list, shifted);
        list.retain(|(k, _)| keep(k, &tails[j + 1]));
    }
    list.iter().map(|(k, _)| to_point(k)).collect()
}

/// Cover of the achievement set by `prefix sum + tail box` at depth `N`.
///
/// Coordinates whose tail has a fixed sign use the one-sided box
/// `[s, s + B]` (or `[s - B, s]`); this keeps covers of Cantor-type sets
/// inside the standard construction intervals and makes depth-`N+1` boxes
/// nest exactly in depth-`N` boxes.
pub fn box_cover(
    spec: &SeriesSpec,
    n: u64,
    window: Option<&Window>,
    limits: &Limits,
) -> Result<BoxCover> {
    limits.check(n)?;
    let m = spec.dimension;
    if let Some(w) = window {
        if w.dimension() != m {
            return Err(Error::Parse(format!(
                "window has dimension {}, series has {m}",
                w.dimension()
            )));
        }
    }
    let tails: Vec<TailBox> = (0..=n).map(|j| tail_box(spec, j)).collect::<Result<_>>()?;
    let terms = first_terms(spec, n)?;
    let keys = KeyTerms::new(&terms, m, limits.dedup_bits)?;
    let prefixes = match &keys.scaled {
        Scaled::Small(t) => prefix_levels(t, vec![0i128; m], |k| keys.point_small(k), &tails, window),
        Scaled::Big(t) => prefix_levels(
            t,
            vec![Default::default(); m],
            |k| keys.point_big(k),
            &tails,
            window,
        ),
    };
    let last = &tails[n as usize];
    Ok(BoxCover {
        depth: n,
        boxes: prefixes.iter().map(|s| make_box(s, last)).collect(),
        source: spec.clone(),
    })
}
