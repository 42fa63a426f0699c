use serde::{Deserialize, Serialize};

use crate::engine::keys::{grouped_subsums_par, KeyTerms, Scaled};
use crate::engine::Limits;
use crate::error::Result;
use crate::scalar::Point;
use crate::series::SeriesSpec;

/// One distinct depth-`N` subsum and the number of selections reaching it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsumValue {
    pub value: Point,
    pub multiplicity: u64,
}

/// Terms `1..=n` of the series.
pub(crate) fn first_terms(spec: &SeriesSpec, n: u64) -> Result<Vec<Point>> {
    let ev = spec.evaluator()?;
    Ok((1..=n).map(|k| ev.term(k)).collect())
}

/// Every subsum over `A ⊆ {1..N}`, grouped by value, in ascending
/// lexicographic order.
pub fn enumerate_exact(spec: &SeriesSpec, n: u64, limits: &Limits) -> Result<Vec<SubsumValue>> {
    limits.check(n)?;
    let terms = first_terms(spec, n)?;
    enumerate_terms(&terms, spec.dimension, limits)
}

pub(crate) fn enumerate_terms(terms: &[Point], m: usize, limits: &Limits) -> Result<Vec<SubsumValue>> {
    let keys = KeyTerms::new(terms, m, limits.dedup_bits)?;
    let prefix = limits.prefix_depth as usize;
    Ok(match &keys.scaled {
        Scaled::Small(t) => grouped_subsums_par(t, vec![0i128; m], prefix)
            .into_iter()
            .map(|(k, c)| SubsumValue {
                value: keys.point_small(&k),
                multiplicity: c,
            })
            .collect(),
        Scaled::Big(t) => grouped_subsums_par(t, vec![Default::default(); m], prefix)
            .into_iter()
            .map(|(k, c)| SubsumValue {
                value: keys.point_big(&k),
                multiplicity: c,
            })
            .collect(),
    })
}
