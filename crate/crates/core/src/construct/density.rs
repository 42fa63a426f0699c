//! Points of `R^k × A(y)` approximated by subsums: the absolutely
//! convergent coordinates are matched by a finite selection below `k_ε`,
//! then the conditional coordinates are driven to the target by a greedy
//! choice among later indices.

use crate::classify::steinitz::steinitz_decompose;
use crate::construct::Witness;
use crate::engine::membership::{membership_search, SearchBudget, SearchOutcome};
use crate::error::{Error, Result};
use crate::scalar::sup_dist;
use crate::series::{Selection, SeriesSpec};

const PREFIX_SCAN: u64 = 1 << 16;

fn mat_vec(t: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    t.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Finite selection whose subsum is within `eps` (sup norm) of `target`.
///
/// Needs a conditional part whose coordinates (after the basis change) are
/// carried by disjoint sets of terms.
pub fn density_witness(spec: &SeriesSpec, target: &[f64], eps: f64, max_steps: u64) -> Result<Witness> {
    let m = spec.dimension;
    if target.len() != m || !(eps > 0.0) || target.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parse("target must match the dimension and eps be positive".into()));
    }
    let ev = spec.evaluator()?;
    let mut buf = vec![0.0; m];

    // the natural order may already be close enough
    let mut s = vec![0.0; m];
    for n in 1..=PREFIX_SCAN {
        ev.term_f64_into(n, &mut buf);
        s.iter_mut().zip(&buf).for_each(|(a, b)| *a += b);
        if sup_dist(&s, target) < eps / 2.0 {
            let w = Witness::finite(spec, Selection::prefix(n), target);
            if w.error < eps {
                return Ok(w);
            }
        }
    }

    let d = steinitz_decompose(spec)?;
    let k = d.k;
    let t: Vec<Vec<f64>> = d
        .basis_change
        .iter()
        .map(|r| r.iter().map(|v| v.to_f64()).collect())
        .collect();
    let identity = d
        .basis_change
        .iter()
        .all(|r| r.iter().filter(|v| !v.is_zero()).count() == 1 && r.iter().all(|v| v.is_exact()));
    // sup-norm error in the original coordinates is at most sqrt(m) times
    // the error in the rotated ones
    let delta = if identity { eps / 2.0 } else { eps / (2.0 * (m as f64).sqrt()) };
    let tt = mat_vec(&t, target);

    let mut chosen: Vec<u64> = Vec::new();
    let mut k_eps = 0u64;
    if let Some(abs) = &d.absolute_part {
        let budget = SearchBudget::default();
        match membership_search(abs, &tt[k..], delta / 2.0, &budget)? {
            SearchOutcome::Found { selection, .. } => {
                chosen.extend(selection.finite_support().iter().copied());
            }
            SearchOutcome::NotFound { reason } => return Err(Error::YNotApproximable(reason)),
        }
        k_eps = chosen.last().copied().unwrap_or(0);
        while abs
            .tail_norm_bound(k_eps)
            .ok_or(Error::MissingBound)?
            .to_f64()
            >= delta / 2.0
        {
            k_eps += 1;
            if k_eps > max_steps {
                return Err(Error::budget("absolute tail never drops below eps"));
            }
        }
    }

    let mut cond = vec![0.0; k];
    for &n in &chosen {
        ev.term_f64_into(n, &mut buf);
        let c = mat_vec(&t[..k], &buf);
        cond.iter_mut().zip(&c).for_each(|(a, b)| *a += b);
    }
    let goal = &tt[..k];
    let mut n = k_eps;
    let mut steps = 0u64;
    while sup_dist(&cond, goal) >= delta {
        n += 1;
        steps += 1;
        if steps > max_steps {
            return Err(Error::budget(format!("conditional part not within {delta} after {max_steps} terms")));
        }
        ev.term_f64_into(n, &mut buf);
        let c = mat_vec(&t[..k], &buf);
        let scale = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if scale == 0.0 {
            continue;
        }
        let live: Vec<usize> = (0..k).filter(|&j| c[j].abs() > 1e-12 * scale).collect();
        if live.len() > 1 {
            return Err(Error::Unsupported(format!(
                "term {n} moves {} conditional coordinates at once",
                live.len()
            )));
        }
        let j = live[0];
        if (cond[j] < goal[j] && c[j] > 0.0) || (cond[j] > goal[j] && c[j] < 0.0) {
            chosen.push(n);
            cond.iter_mut().zip(&c).for_each(|(a, b)| *a += b);
        }
    }

    let w = Witness::finite(spec, Selection::finite(chosen), target);
    if w.error >= eps {
        return Err(Error::budget(format!("construction reached error {} >= {eps}", w.error)));
    }
    Ok(w)
}
