//! Points `(a, y)` reached after a finite rearrangement: `y` comes from a
//! selection whose `x` subseries converges conditionally, and the selected
//! `x` terms are reordered so they sum to `a`.
//!
//! The rearranged series is `z_k = (x, y)_{τ(k)}` with `τ` the identity past
//! the returned prefix. The returned selection is on positions of `z`.

use serde::{Deserialize, Serialize};

use crate::classify::convergence::{selection_convergence_class, SelectionConvergence};
use crate::classify::steinitz::steinitz_decompose;
use crate::engine::membership::{membership_search, SearchBudget, SearchOutcome};
use crate::error::{Error, Result};
use crate::scalar::{sup_dist, Scalar};
use crate::series::sum::{partial_sum, partial_sum_f64};
use crate::series::{Rule, Selection, SeriesSpec, TailPattern};

/// Terms summed past the last explicit index when checking a patterned tail.
const TAIL_CHECK: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionWitness {
    /// `τ(1), ..., τ(L)`; empty for the identity.
    pub permutation: Vec<u64>,
    pub selection: Selection,
    pub target: Vec<f64>,
    pub achieved: Vec<f64>,
    pub error: f64,
}

struct Parts {
    x: SeriesSpec,
    y: SeriesSpec,
}

fn split(spec: &SeriesSpec) -> Result<Parts> {
    if spec.dimension != 2 {
        return Err(Error::InvalidSpec("needs a planar series".into()));
    }
    let d = steinitz_decompose(spec)?;
    let e1 = vec![Scalar::one(), Scalar::zero()];
    if d.k != 1 || d.basis_change[0] != e1 {
        return Err(Error::InvalidSpec(
            "needs a conditionally convergent x coordinate and an absolutely convergent y coordinate".into(),
        ));
    }
    Ok(Parts {
        x: d.conditional_part.expect("k = 1"),
        y: d.absolute_part.expect("k < m"),
    })
}

fn abs_tail(y: &SeriesSpec, n: u64) -> Result<f64> {
    Ok(y.tail_norm_bound(n).ok_or(Error::MissingBound)?.to_f64())
}

/// Searches a selection for `y_target`, extends it by a tail pattern on
/// which `x` converges conditionally, then rearranges.
pub fn section_witness(spec: &SeriesSpec, target: [f64; 2], eps: f64, max_steps: u64) -> Result<SectionWitness> {
    check_args(target, eps)?;
    let p = split(spec)?;
    let found = match membership_search(&p.y, &target[1..], eps / 4.0, &SearchBudget::default())? {
        SearchOutcome::Found { selection, .. } => selection,
        SearchOutcome::NotFound { reason } => return Err(Error::YNotApproximable(reason)),
    };
    let fin: Vec<u64> = found.finite_support().iter().copied().collect();
    let mut k = fin.last().copied().unwrap_or(0);
    while abs_tail(&p.y, k)? >= eps / 8.0 {
        k += 1;
        if k > max_steps {
            return Err(Error::budget("y tail never drops below eps"));
        }
    }
    for (modulus, residue) in [(2, 1), (2, 0), (1, 0)] {
        let pat = TailPattern {
            start: k + 1,
            modulus,
            residue,
        };
        let sel = Selection::new(fin.iter().copied(), vec![pat])?;
        if selection_convergence_class(&p.x, &sel)? == SelectionConvergence::Conditional {
            return section_witness_for(spec, &sel, target, eps, max_steps);
        }
    }
    Err(Error::SelectionNotPotentiallyConditional)
}

fn check_args(target: [f64; 2], eps: f64) -> Result<()> {
    if !(eps > 0.0) || target.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parse("target must be finite and eps positive".into()));
    }
    Ok(())
}

/// Same, for a given selection. Its `y` sum must already be within
/// `eps / 2` of `target[1]`.
pub fn section_witness_for(
    spec: &SeriesSpec,
    sel: &Selection,
    target: [f64; 2],
    eps: f64,
    max_steps: u64,
) -> Result<SectionWitness> {
    check_args(target, eps)?;
    let p = split(spec)?;
    let explicit = sel
        .max_index()
        .unwrap_or(0)
        .max(sel.tail_patterns().iter().map(|t| t.start).max().unwrap_or(0));
    let far = explicit + TAIL_CHECK;
    let y_sel = partial_sum_f64(&p.y, sel, far)[0];
    if (y_sel - target[1]).abs() + abs_tail(&p.y, far)? >= eps / 2.0 {
        return Err(Error::YNotApproximable(format!("selection sums to y = {y_sel}")));
    }

    if sel.is_finite() {
        let x = partial_sum(&p.x, sel, explicit)[0].to_f64();
        if (x - target[0]).abs() >= eps / 2.0 {
            return Err(Error::SelectionNotPotentiallyConditional);
        }
        return finish(spec, Vec::new(), sel.clone(), target, eps, explicit);
    }
    match selection_convergence_class(&p.x, sel)? {
        SelectionConvergence::Conditional => {}
        SelectionConvergence::PotentiallyConditional => {
            return Err(Error::UnsupportedPattern(
                "the selected x terms must converge in their natural order".into(),
            ))
        }
        _ => return Err(Error::SelectionNotPotentiallyConditional),
    }

    let natural = partial_sum_f64(&p.x, sel, far)[0];
    if (natural - target[0]).abs() < eps / 4.0 {
        if let Ok(w) = finish(spec, Vec::new(), sel.clone(), target, eps, explicit) {
            return Ok(w);
        }
    }

    // fixed part: natural order up to k, where dropping later y terms is harmless
    let mut k = explicit;
    while abs_tail(&p.y, k)? >= eps / 4.0 {
        k += 1;
        if k > explicit + max_steps {
            return Err(Error::budget("y tail never drops below eps"));
        }
    }
    let ev = p.x.evaluator()?;
    let mut buf = [0.0];
    let mut x_of = |n: u64| {
        ev.term_f64_into(n, &mut buf);
        buf[0]
    };
    let mut s: f64 = (1..=k).filter(|&n| sel.contains(n)).map(&mut x_of).sum();

    // greedy over selected indices past k, one cursor per sign
    let mut cursor = [k, k];
    let mut order = Vec::new();
    let mut last = f64::INFINITY;
    let mut steps = 0u64;
    while (s - target[0]).abs() >= eps / 4.0 || last.abs() >= eps / 4.0 {
        let side = usize::from(s > target[0]);
        let v = loop {
            cursor[side] += 1;
            steps += 1;
            if steps > max_steps {
                return Err(Error::budget(format!("x not within {} after {max_steps} steps", eps / 4.0)));
            }
            let n = cursor[side];
            if !sel.contains(n) {
                continue;
            }
            let v = x_of(n);
            if (side == 0 && v > 0.0) || (side == 1 && v < 0.0) {
                break v;
            }
        };
        order.push(cursor[side]);
        s += v;
        last = v;
    }

    let l = cursor[0].max(cursor[1]);
    let mut used = vec![false; (l - k) as usize];
    for &n in &order {
        used[(n - k - 1) as usize] = true;
    }
    let g = order.len() as u64;
    let mut perm: Vec<u64> = (1..=k).collect();
    perm.extend(&order);
    perm.extend((k + 1..=l).filter(|&n| !used[(n - k - 1) as usize]));

    let patterns = sel
        .tail_patterns()
        .iter()
        .map(|t| TailPattern { start: l + 1, ..*t })
        .collect();
    let positions = (1..=k).filter(|&n| sel.contains(n)).chain(k + 1..=k + g);
    let rearranged_sel = Selection::new(positions, patterns)?;
    finish(spec, perm, rearranged_sel, target, eps, l)
}

/// Recomputes the sum on the rearranged series and checks it.
fn finish(
    spec: &SeriesSpec,
    perm: Vec<u64>,
    sel: Selection,
    target: [f64; 2],
    eps: f64,
    explicit: u64,
) -> Result<SectionWitness> {
    let upto = if sel.is_finite() { explicit } else { explicit + TAIL_CHECK };
    let achieved = if perm.is_empty() {
        partial_sum_f64(spec, &sel, upto)
    } else {
        let mut z = SeriesSpec::bare(Rule::Permuted {
            base: Box::new(spec.rule.clone()),
            perm: perm.clone(),
        });
        z.dimension = spec.dimension;
        partial_sum_f64(&z, &sel, upto)
    };
    let error = sup_dist(&achieved, &target);
    if error >= eps {
        return Err(Error::budget(format!("rearrangement reached error {error} >= {eps}")));
    }
    Ok(SectionWitness {
        permutation: perm,
        selection: sel,
        target: target.to_vec(),
        achieved,
        error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::DEFAULT_WITNESS_STEPS;
    use crate::series::catalog::catalog_get;

    fn doubled() -> SeriesSpec {
        catalog_get("theorem-5.1-doubled").unwrap().spec
    }

    fn odd() -> Selection {
        Selection::new([], vec![TailPattern { start: 1, modulus: 2, residue: 1 }]).unwrap()
    }

    #[test]
    fn x_seven_on_the_odd_selection() {
        let w = section_witness_for(&doubled(), &odd(), [7.0, 0.75], 1e-2, DEFAULT_WITNESS_STEPS).unwrap();
        assert!(w.error < 1e-2);
        let mut sorted = w.permutation.clone();
        sorted.sort_unstable();
        assert!(sorted.iter().copied().eq(1..=w.permutation.len() as u64));
    }

    #[test]
    fn natural_sum_needs_no_rearrangement() {
        let w = section_witness_for(&doubled(), &odd(), [std::f64::consts::LN_2, 0.75], 1e-3, DEFAULT_WITNESS_STEPS)
            .unwrap();
        assert!(w.permutation.is_empty());
        assert_eq!(w.selection, odd());
    }

    #[test]
    fn finite_selections_are_rigid() {
        // x_1 + x_2 = 2, y_1 + y_2 = 2/3 + 2/9
        let sel = Selection::finite([1, 2]);
        let y = 8.0 / 9.0;
        assert!(section_witness_for(&doubled(), &sel, [2.0, y], 1e-3, 1000).is_ok());
        assert!(matches!(
            section_witness_for(&doubled(), &sel, [1.0, y], 1e-3, 1000),
            Err(Error::SelectionNotPotentiallyConditional)
        ));
    }

    #[test]
    fn searched_selection() {
        let w = section_witness(&doubled(), [-2.0, 0.75], 1e-2, DEFAULT_WITNESS_STEPS).unwrap();
        assert!(w.error < 1e-2);
        assert!(matches!(
            section_witness(&doubled(), [0.0, 5.0], 1e-2, DEFAULT_WITNESS_STEPS),
            Err(Error::YNotApproximable(_))
        ));
    }
}
