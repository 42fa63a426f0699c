//! Subsums over finite selections, all of which converge absolutely.

use serde::{Deserialize, Serialize};

use crate::engine::enumerate::enumerate_exact;
use crate::engine::Limits;
use crate::error::Result;
use crate::scalar::Point;
use crate::series::SeriesSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AAbsPoints {
    pub depth: u64,
    /// Distinct subsums of the first `depth` terms, sorted.
    pub points: Vec<Point>,
    /// Always set: absolutely convergent selections with infinite support
    /// are not enumerated.
    pub under_approximation: bool,
}

pub fn a_abs_enumerate(spec: &SeriesSpec, n: u64, limits: &Limits) -> Result<AAbsPoints> {
    let values = enumerate_exact(spec, n, limits)?;
    Ok(AAbsPoints {
        depth: n,
        points: values.into_iter().map(|v| v.value).collect(),
        under_approximation: true,
    })
}
