//! Search for finite selections whose subsum lands near a target.
//!
//! Coordinates with a tail bound are matched first by branch and bound over
//! the indices `1..=K`, where the tail after `K` is below `eps/2`. The
//! remaining coordinates are then steered with indices beyond `K`, which
//! move the bounded ones by less than `eps/2`. A failed search proves
//! nothing about membership.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::sup_dist;
use crate::series::rule::ParallelRun;
use crate::series::sum::{partial_sum_f64, tail_box};
use crate::series::{Evaluator, Selection, SeriesSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchBudget {
    /// Cap on branch-and-bound nodes plus steering steps.
    pub max_steps: u64,
    /// Largest index scanned term by term. Steering along parallel runs
    /// jumps ahead and is limited by `max_steps` instead.
    pub max_index: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_steps: 1 << 20,
            max_index: 1 << 22,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SearchOutcome {
    Found {
        selection: Selection,
        sum: Vec<f64>,
        error: f64,
    },
    /// Inconclusive.
    NotFound { reason: String },
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found { .. })
    }

    pub fn selection(&self) -> Option<&Selection> {
        match self {
            SearchOutcome::Found { selection, .. } => Some(selection),
            SearchOutcome::NotFound { .. } => None,
        }
    }
}

/// Deepest branch-and-bound prefix.
const MAX_BNB_DEPTH: u64 = 64;
/// Longest natural-order continuation tried before steering.
const MAX_CONTINUATION: u64 = 1 << 16;

struct Search<'a> {
    spec: &'a SeriesSpec,
    ev: Evaluator<'a>,
    target: &'a [f64],
    eps: f64,
    bounded: Vec<usize>,
    unbounded: Vec<usize>,
    k: u64,
    tol_a: f64,
    terms: Vec<Vec<f64>>,
    pos_suffix: Vec<Vec<f64>>,
    neg_suffix: Vec<Vec<f64>>,
    runs: Option<Vec<ParallelRun>>,
    budget: SearchBudget,
    steps: u64,
}

pub fn membership_search(
    spec: &SeriesSpec,
    target: &[f64],
    eps: f64,
    budget: &SearchBudget,
) -> Result<SearchOutcome> {
    let m = spec.dimension;
    if target.len() != m {
        return Err(Error::Parse(format!("target has dimension {}, series has {m}", target.len())));
    }
    if !(eps > 0.0) || target.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parse("eps must be positive and the target finite".into()));
    }
    let (bounded, unbounded): (Vec<usize>, Vec<usize>) = match tail_box(spec, 0) {
        Ok(tb) => (0..m).partition(|&i| tb.is_bounded(i)),
        Err(Error::MissingBound) => (Vec::new(), (0..m).collect()),
        Err(e) => return Err(e),
    };
    let tail_max = |n: u64| -> Result<f64> {
        let tb = tail_box(spec, n)?;
        Ok(bounded
            .iter()
            .map(|&i| tb.halfwidth[i].as_ref().map_or(f64::INFINITY, |h| h.to_f64()))
            .fold(0.0, f64::max))
    };
    let cap = budget.max_index.min(MAX_BNB_DEPTH);
    let (k, tol_a) = if bounded.is_empty() {
        (0, eps)
    } else {
        let mut found = None;
        for n in 0..=cap {
            if tail_max(n)? < eps / 2.0 {
                found = Some(n);
                break;
            }
        }
        match found {
            Some(n) => (n, eps / 2.0),
            // no room for a tail: exhaustive over the allowed indices
            None => (cap, eps),
        }
    };
    let ev = spec.evaluator()?;
    let terms: Vec<Vec<f64>> = (1..=k).map(|n| ev.term_f64(n)).collect();
    let mut pos_suffix = vec![vec![0.0; m]; k as usize + 1];
    let mut neg_suffix = vec![vec![0.0; m]; k as usize + 1];
    for j in (0..k as usize).rev() {
        for i in 0..m {
            let v = terms[j][i];
            pos_suffix[j][i] = pos_suffix[j + 1][i] + v.max(0.0);
            neg_suffix[j][i] = neg_suffix[j + 1][i] + v.min(0.0);
        }
    }
    let runs = if m == 2 && unbounded.len() == 2 {
        spec.rule.parallel_runs(64)
    } else {
        None
    };
    let mut s = Search {
        spec,
        ev,
        target,
        eps,
        bounded,
        unbounded,
        k,
        tol_a,
        terms,
        pos_suffix,
        neg_suffix,
        runs,
        budget: *budget,
        steps: 0,
    };
    let mut chosen = Vec::new();
    let mut partial = vec![0.0; m];
    match s.branch(0, &mut chosen, &mut partial) {
        Some(sel) => Ok(s.verify(sel).expect("verified in branch")),
        None => Ok(SearchOutcome::NotFound {
            reason: if s.steps >= s.budget.max_steps {
                "step budget exhausted".into()
            } else {
                format!("no selection within {} found using indices up to {}", eps, s.budget.max_index)
            },
        }),
    }
}

impl Search<'_> {
    fn verify(&self, indices: Vec<u64>) -> Option<SearchOutcome> {
        let selection = Selection::finite(indices);
        let upto = selection.max_index().unwrap_or(0);
        let sum = partial_sum_f64(self.spec, &selection, upto);
        let error = sup_dist(&sum, self.target);
        (error < self.eps).then_some(SearchOutcome::Found {
            selection,
            sum,
            error,
        })
    }

    fn bounded_close(&self, partial: &[f64]) -> bool {
        self.bounded
            .iter()
            .all(|&i| (partial[i] - self.target[i]).abs() < self.tol_a)
    }

    fn reachable(&self, j: usize, partial: &[f64]) -> bool {
        self.bounded.iter().all(|&i| {
            let t = self.target[i];
            partial[i] + self.neg_suffix[j][i] - self.tol_a < t
                && t < partial[i] + self.pos_suffix[j][i] + self.tol_a
        })
    }

    /// Depth-first over indices `j+1..=K`, include before exclude.
    fn branch(&mut self, j: usize, chosen: &mut Vec<u64>, partial: &mut [f64]) -> Option<Vec<u64>> {
        self.steps += 1;
        if self.steps > self.budget.max_steps {
            return None;
        }
        if self.bounded_close(partial) {
            if let Some(sel) = self.complete(chosen, partial, j) {
                return Some(sel);
            }
        }
        if j as u64 >= self.k || !self.reachable(j, partial) {
            return None;
        }
        let n = j as u64 + 1;
        chosen.push(n);
        for (p, v) in partial.iter_mut().zip(&self.terms[j]) {
            *p += v;
        }
        let r = self.branch(j + 1, chosen, partial);
        chosen.pop();
        for (p, v) in partial.iter_mut().zip(&self.terms[j]) {
            *p -= v;
        }
        if r.is_some() {
            return r;
        }
        self.branch(j + 1, chosen, partial)
    }

    /// Extends a bounded-coordinate match with indices beyond `K`.
    fn complete(&mut self, chosen: &[u64], partial: &[f64], depth: usize) -> Option<Vec<u64>> {
        if self.unbounded.is_empty() || sup_dist(partial, self.target) < 0.5 * self.eps {
            if self.verify(chosen.to_vec()).is_some() {
                return Some(chosen.to_vec());
            }
            if self.unbounded.is_empty() {
                return None;
            }
        }
        let is_prefix = chosen.len() == depth && chosen.last().is_none_or(|&l| l == depth as u64);
        if is_prefix && depth as u64 == self.k {
            if let Some(sel) = self.continue_natural(partial) {
                return Some(sel);
            }
        }
        let extra = if self.runs.is_some() {
            self.steer_runs(partial)?
        } else {
            self.steer_greedy(partial)?
        };
        let mut all = chosen.to_vec();
        all.extend(extra);
        self.verify(all.clone()).map(|_| all)
    }

    /// All of `1..=L` for the first `L > K` that hits the target.
    fn continue_natural(&mut self, partial: &[f64]) -> Option<Vec<u64>> {
        let mut sum = partial.to_vec();
        let last = self.budget.max_index.min(self.k + MAX_CONTINUATION);
        let mut t = vec![0.0; sum.len()];
        for n in self.k + 1..=last {
            self.ev.term_f64_into(n, &mut t);
            for (s, v) in sum.iter_mut().zip(&t) {
                *s += v;
            }
            if sup_dist(&sum, self.target) < 0.5 * self.eps {
                let all: Vec<u64> = (1..=n).collect();
                if self.verify(all.clone()).is_some() {
                    return Some(all);
                }
            }
        }
        None
    }

    fn unbounded_residual(&self, r: &[f64]) -> f64 {
        self.unbounded.iter().map(|&i| r[i].abs()).fold(0.0, f64::max)
    }

    /// Includes `n > K` exactly when it shrinks the Euclidean residual on the
    /// unbounded coordinates.
    fn steer_greedy(&mut self, partial: &[f64]) -> Option<Vec<u64>> {
        let mut r: Vec<f64> = self.target.iter().zip(partial).map(|(t, p)| t - p).collect();
        let mut out = Vec::new();
        let mut t = vec![0.0; r.len()];
        let mut n = self.k;
        while self.unbounded_residual(&r) >= 0.5 * self.eps {
            n += 1;
            self.steps += 1;
            if n > self.budget.max_index || self.steps > self.budget.max_steps {
                return None;
            }
            self.ev.term_f64_into(n, &mut t);
            let gain: f64 = self
                .unbounded
                .iter()
                .map(|&i| 2.0 * r[i] * t[i] - t[i] * t[i])
                .sum();
            if gain > 0.0 {
                for (a, b) in r.iter_mut().zip(&t) {
                    *a -= b;
                }
                out.push(n);
            }
        }
        Some(out)
    }

    /// Runs of parallel alternating terms: first fix coordinate 0 block by
    /// block, then fix coordinate 1 with one late block whose drift on
    /// coordinate 0 is negligible.
    fn steer_runs(&mut self, partial: &[f64]) -> Option<Vec<u64>> {
        let runs = self.runs.clone()?;
        let mut r: Vec<f64> = self.target.iter().zip(partial).map(|(t, p)| t - p).collect();
        let q = self.eps / 4.0;
        let mut picks: Vec<(usize, i128)> = Vec::new();
        let mut next = 0;
        let mut used: u128 = 0;
        let limit = self.budget.max_steps as u128;
        for (idx, run) in runs.iter().enumerate() {
            next = idx + 1;
            if (run.start as u128) <= self.k as u128 {
                continue;
            }
            if r[0].abs() < q {
                next = idx;
                break;
            }
            let cap = (run.len / 2) as f64;
            let j = (r[0] / run.dir[0]).round().clamp(-cap, cap);
            if j != 0.0 {
                used += j.abs() as u128;
                if used > limit {
                    return None;
                }
                r[0] -= j * run.dir[0];
                r[1] -= j * run.dir[1];
                picks.push((idx, j as i128));
            }
        }
        if r[0].abs() >= q {
            return None;
        }
        let mut fixed = false;
        for (idx, run) in runs.iter().enumerate().skip(next) {
            if (run.start as u128) <= self.k as u128 || run.dir[1] / 2.0 >= q {
                continue;
            }
            let j = (r[1] / run.dir[1]).round();
            if j.abs() > (run.len / 2) as f64
                || (j * run.dir[0]).abs() >= q
                || used + j.abs() as u128 > limit
            {
                continue;
            }
            if j != 0.0 {
                r[0] -= j * run.dir[0];
                r[1] -= j * run.dir[1];
                picks.push((idx, j as i128));
            }
            fixed = true;
            break;
        }
        if !fixed {
            return None;
        }
        let mut out = Vec::new();
        for (idx, j) in picks {
            let run = &runs[idx];
            // run starts at an odd index carrying a negative term
            let first = if j > 0 { run.start + 1 } else { run.start };
            out.extend((0..j.unsigned_abs() as u64).map(|t| first + 2 * t));
        }
        out.sort_unstable();
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::catalog::catalog_get;

    #[test]
    fn dyadic_third() {
        let spec = catalog_get("geometric-half").unwrap().spec;
        let out = membership_search(&spec, &[1.0 / 3.0], 2f64.powi(-10), &SearchBudget::default()).unwrap();
        let sel = out.selection().unwrap();
        assert_eq!(sel.indices_upto(100), vec![2, 4, 6, 8, 10]);
    }

    #[test]
    fn zero_target_is_empty() {
        for name in ["geometric-half", "example-3.1", "example-3.8"] {
            let spec = catalog_get(name).unwrap().spec;
            let zero = vec![0.0; spec.dimension];
            let out = membership_search(&spec, &zero, 1e-3, &SearchBudget::default()).unwrap();
            assert_eq!(out.selection(), Some(&Selection::empty()), "{name}");
        }
    }

    #[test]
    fn natural_sum_is_a_prefix() {
        let spec = catalog_get("example-3.1").unwrap().spec;
        let out = membership_search(&spec, &[std::f64::consts::LN_2, 1.0], 1e-3, &SearchBudget::default())
            .unwrap();
        let sel = out.selection().unwrap();
        let top = sel.max_index().unwrap();
        assert_eq!(sel.finite_support().len() as u64, top);
    }

    #[test]
    fn parallel_runs_reach_plane_points() {
        let spec = catalog_get("example-3.8").unwrap().spec;
        let out = membership_search(&spec, &[0.3, -0.7], 1e-2, &SearchBudget::default()).unwrap();
        assert!(out.is_found());
    }
}
