//! Riemann's greedy rearrangement of a one-dimensional series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{Evaluator, SeriesSpec};

/// A finite rearrangement prefix and its running sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RearrangementPlan {
    pub order: Vec<u64>,
    pub partial_sums: Vec<Vec<f64>>,
    /// `||last partial sum - target||_inf`
    pub final_error: Scalar,
    pub target: Vec<f64>,
}

impl RearrangementPlan {
    fn new(target: f64) -> Self {
        RearrangementPlan {
            order: Vec::new(),
            partial_sums: Vec::new(),
            final_error: Scalar::float(target.abs()),
            target: vec![target],
        }
    }

    fn push(&mut self, n: u64, sum: f64) {
        self.order.push(n);
        self.partial_sums.push(vec![sum]);
        self.final_error = Scalar::float((sum - self.target[0]).abs());
    }

    pub fn last_sum(&self) -> f64 {
        self.partial_sums.last().map_or(0.0, |s| s[0])
    }
}

/// Cursor over the indices carrying terms of one sign, in natural order.
pub(crate) struct SignCursor {
    next: u64,
    positive: bool,
}

impl SignCursor {
    pub fn new(positive: bool, from: u64) -> Self {
        SignCursor { next: from, positive }
    }

    /// Next matching index, scanning at most up to `limit` and counting
    /// every scanned index in `steps`.
    pub fn advance(
        &mut self,
        ev: &Evaluator<'_>,
        coord: usize,
        limit: u64,
        steps: &mut u64,
        skip: impl Fn(u64) -> bool,
    ) -> Option<(u64, f64)> {
        let mut buf = vec![0.0; ev.dim()];
        while self.next <= limit {
            let n = self.next;
            self.next += 1;
            *steps += 1;
            if skip(n) {
                continue;
            }
            ev.term_f64_into(n, &mut buf);
            let v = buf[coord];
            if (self.positive && v > 0.0) || (!self.positive && v < 0.0) {
                return Some((n, v));
            }
        }
        None
    }
}

/// Greedy rearrangement toward `target`: the next unused positive term
/// while the sum is at most the target, else the next unused negative
/// term. Stops once the sum is within `tol` and the last term is smaller
/// than `tol`.
pub fn riemann_rearrange(
    spec: &SeriesSpec,
    target: f64,
    tol: f64,
    max_steps: u64,
) -> Result<RearrangementPlan> {
    if spec.dimension != 1 {
        return Err(Error::NotOneDimensional(spec.dimension));
    }
    if !(tol > 0.0) || !target.is_finite() {
        return Err(Error::Parse("tol must be positive and the target finite".into()));
    }
    let ev = spec.evaluator()?;
    let mut plan = RearrangementPlan::new(target);
    let mut pos = SignCursor::new(true, 1);
    let mut neg = SignCursor::new(false, 1);
    let mut sum = 0.0;
    let mut steps = 0u64;
    let limit = max_steps;
    loop {
        let cursor = if sum <= target { &mut pos } else { &mut neg };
        let Some((n, v)) = cursor.advance(&ev, 0, limit, &mut steps, |_| false) else {
            break;
        };
        sum += v;
        plan.push(n, sum);
        if (sum - target).abs() < tol && v.abs() < tol {
            return Ok(plan);
        }
        if steps >= max_steps {
            break;
        }
    }
    Err(Error::BudgetExhausted {
        what: format!("no rearrangement within {tol} of {target} in {max_steps} steps"),
        best: Some(Box::new(plan)),
    })
}
