//! Splitting a series along `Γ⊥ ⊕ Γ` and the sum range `Σx_n + Γ⊥`.

use serde::{Deserialize, Serialize};

use crate::classify::gamma::{gamma_declared, ConvergenceFunctionals, GammaMode};
use crate::classify::linalg::solve;
use crate::error::{Error, Result};
use crate::scalar::{dot, CompensatedSum, Scalar};
use crate::series::{Rule, SeriesSpec, TagKind, TailBound};

/// Marks the degenerate splits where one part is `R^0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrivialSplit {
    /// `k = 0`: the series converges absolutely.
    AllAbsolute,
    /// `k = m`: no nonzero convergence functional.
    AllConditional,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinitzDecomposition {
    /// Dimension of `Γ⊥`.
    pub k: usize,
    /// Rows: an orthonormal basis of `Γ⊥`, then one of `Γ`.
    pub basis_change: Vec<Vec<Scalar>>,
    pub conditional_part: Option<SeriesSpec>,
    pub absolute_part: Option<SeriesSpec>,
    pub trivial: Option<TrivialSplit>,
}

impl SteinitzDecomposition {
    /// `T x`
    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.basis_change.iter().map(|row| dot(row, x)).collect()
    }
}

fn is_unit_row(row: &[Scalar]) -> Option<usize> {
    let nz: Vec<usize> = (0..row.len()).filter(|&j| !row[j].is_zero()).collect();
    (nz.len() == 1 && row[nz[0]].is_exact() && row[nz[0]] == Scalar::one()).then(|| nz[0])
}

/// `rows * base`, picking coordinates directly when every row is a unit
/// vector over a coordinate rule.
fn project(base: &Rule, rows: &[Vec<Scalar>]) -> Rule {
    if let Rule::Coords { coords } = base {
        let picks: Option<Vec<usize>> = rows.iter().map(|r| is_unit_row(r)).collect();
        if let Some(picks) = picks {
            return Rule::Coords {
                coords: picks.into_iter().map(|j| coords[j].clone()).collect(),
            };
        }
    }
    Rule::Linear {
        base: Box::new(base.clone()),
        matrix: rows.to_vec(),
    }
}

/// Tail bound for `rows * x` where every row lies in the span of the
/// absolutely convergent tags.
fn inherited_tail(spec: &SeriesSpec, part: &Rule, rows: &[Vec<Scalar>]) -> Result<TailBound> {
    if (0..rows.len()).all(|i| part.abs_tail(i, 0).is_some()) {
        return Ok(TailBound::FromRule);
    }
    let tags: Vec<_> = spec
        .direction_tags
        .iter()
        .filter(|t| t.kind == TagKind::AbsolutelyConvergent)
        .collect();
    let gram: Vec<Vec<Scalar>> = tags
        .iter()
        .map(|a| tags.iter().map(|b| dot(&a.functional, &b.functional)).collect())
        .collect();
    let mut weights = vec![Scalar::zero(); tags.len()];
    for row in rows {
        let rhs: Vec<Scalar> = tags.iter().map(|t| dot(&t.functional, row)).collect();
        let alpha = solve(&gram, &rhs).ok_or(Error::InsufficientMetadata("absolute tags are dependent"))?;
        for (w, a) in weights.iter_mut().zip(alpha) {
            *w = &*w + &a.abs();
        }
    }
    // sum_j w_j coef_j ratio_j^N <= (sum_j w_j coef_j) (max ratio)^N
    let mut coef = Scalar::zero();
    let mut ratio = Scalar::zero();
    for (w, t) in weights.iter().zip(&tags) {
        if w.is_zero() {
            continue;
        }
        match &t.tail {
            Some(TailBound::Geometric { coef: c, ratio: r }) => {
                coef = coef + w * c;
                ratio = ratio.max(r.clone());
            }
            _ => {
                return Err(Error::InsufficientMetadata(
                    "absolute part needs closed-form tails or geometric tag bounds",
                ))
            }
        }
    }
    Ok(TailBound::Geometric { coef, ratio })
}

/// Decomposition from declared tags.
pub fn steinitz_decompose(spec: &SeriesSpec) -> Result<SteinitzDecomposition> {
    steinitz_from(spec, &gamma_declared(spec)?)
}

pub fn steinitz_from(spec: &SeriesSpec, g: &ConvergenceFunctionals) -> Result<SteinitzDecomposition> {
    if g.mode == GammaMode::Heuristic {
        return Err(Error::HeuristicGammaRejected);
    }
    let m = spec.dimension;
    let k = g.gamma_perp_basis.len();
    let basis_change: Vec<Vec<Scalar>> = g
        .gamma_perp_basis
        .iter()
        .chain(&g.gamma_basis)
        .cloned()
        .collect();
    let conditional_part = (k > 0).then(|| SeriesSpec::bare(project(&spec.rule, &g.gamma_perp_basis)));
    let absolute_part = if k < m {
        let rule = project(&spec.rule, &g.gamma_basis);
        let tail = inherited_tail(spec, &rule, &g.gamma_basis)?;
        let mut part = SeriesSpec::bare(rule);
        part.tail_norm_bound = Some(tail);
        part.nonzero_count = spec.nonzero_count;
        Some(part)
    } else {
        None
    };
    let trivial = match k {
        0 => Some(TrivialSplit::AllAbsolute),
        k if k == m => Some(TrivialSplit::AllConditional),
        _ => None,
    };
    Ok(SteinitzDecomposition {
        k,
        basis_change,
        conditional_part,
        absolute_part,
        trivial,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumRange {
    /// Sum of the series in natural order.
    #[serde(rename = "base")]
    pub base_point: Vec<Scalar>,
    pub directions: Vec<Vec<Scalar>>,
    /// Per coordinate: zero when the base is exact, the tail bound when it
    /// was summed numerically from an absolutely convergent coordinate,
    /// `None` when uncertified.
    pub base_error: Vec<Option<Scalar>>,
    pub depth: u64,
}

impl SumRange {
    pub fn is_singleton(&self) -> bool {
        self.directions.is_empty()
    }
}

pub const DEFAULT_SUM_DEPTH: u64 = 1_000_000;

/// `Σx_n + Γ⊥`. Coordinates without a closed-form sum are approximated by
/// the mean of the partial sums at `depth` and `depth + 1`.
pub fn sum_range(spec: &SeriesSpec, depth: u64) -> Result<SumRange> {
    let g = gamma_declared(spec)?;
    let m = spec.dimension;
    let mut base: Vec<Option<Scalar>> = (0..m).map(|i| spec.rule.signed_tail(i, 0)).collect();
    let mut base_error: Vec<Option<Scalar>> = base.iter().map(|b| b.as_ref().map(|_| Scalar::zero())).collect();
    if base.iter().any(Option::is_none) {
        let ev = spec.evaluator()?;
        let mut acc = vec![CompensatedSum::default(); m];
        let mut buf = vec![0.0; m];
        for n in 1..=depth {
            ev.term_f64_into(n, &mut buf);
            for (a, v) in acc.iter_mut().zip(&buf) {
                a.add(*v);
            }
        }
        ev.term_f64_into(depth + 1, &mut buf);
        for i in 0..m {
            if base[i].is_some() {
                continue;
            }
            let s = acc[i].value();
            base[i] = Some(Scalar::float(s + buf[i] / 2.0));
            base_error[i] = spec.rule.abs_tail(i, depth).map(|t| t.to_float());
        }
    }
    Ok(SumRange {
        base_point: base.into_iter().map(|b| b.expect("filled")).collect(),
        directions: g.gamma_perp_basis,
        base_error,
        depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::catalog::{catalog_get, rotation_45};
    use crate::series::Seq;

    #[test]
    fn instructive_split() {
        let spec = catalog_get("example-3.1").unwrap().spec;
        let d = steinitz_decompose(&spec).unwrap();
        assert_eq!(d.k, 1);
        assert_eq!(
            d.basis_change,
            vec![vec![Scalar::one(), Scalar::zero()], vec![Scalar::zero(), Scalar::one()]]
        );
        let cond = d.conditional_part.clone().unwrap();
        assert_eq!(cond.rule, Rule::Coords { coords: vec![Seq::alt_harmonic()] });
        let abs = d.absolute_part.clone().unwrap();
        assert_eq!(abs.tail_norm_bound, Some(TailBound::FromRule));
        abs.validate().unwrap();
        for n in 1..=1000 {
            let t = d.apply(&spec.term(n));
            assert_eq!(t, vec![cond.term(n)[0].clone(), abs.term(n)[0].clone()]);
        }
    }

    #[test]
    fn rotation_is_undone() {
        let spec = catalog_get("example-3.1-rotated").unwrap().spec;
        let d = steinitz_decompose(&spec).unwrap();
        assert_eq!(d.k, 1);
        let r = rotation_45();
        for i in 0..2 {
            for j in 0..2 {
                let v: f64 = (0..2).map(|l| d.basis_change[i][l].to_f64() * r[l][j].to_f64()).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        let abs = d.absolute_part.unwrap();
        assert!(matches!(abs.tail_norm_bound, Some(TailBound::Geometric { .. })));
        abs.validate().unwrap();
    }

    #[test]
    fn trivial_markers() {
        let d = steinitz_decompose(&catalog_get("geometric-2d").unwrap().spec).unwrap();
        assert_eq!((d.k, d.trivial), (0, Some(TrivialSplit::AllAbsolute)));
        assert!(d.conditional_part.is_none());
        let d = steinitz_decompose(&catalog_get("example-3.8").unwrap().spec).unwrap();
        assert_eq!((d.k, d.trivial), (2, Some(TrivialSplit::AllConditional)));
        assert!(d.absolute_part.is_none());
    }

    #[test]
    fn heuristic_input_rejected() {
        let spec = catalog_get("example-3.1").unwrap().spec;
        let mut g = gamma_declared(&spec).unwrap();
        g.mode = GammaMode::Heuristic;
        assert!(matches!(steinitz_from(&spec, &g), Err(Error::HeuristicGammaRejected)));
    }

    #[test]
    fn ranges() {
        let sr = sum_range(&catalog_get("example-3.1").unwrap().spec, 100_000).unwrap();
        assert!((sr.base_point[0].to_f64() - std::f64::consts::LN_2).abs() < 1e-9);
        assert_eq!(sr.base_point[1], Scalar::one());
        assert_eq!(sr.directions, vec![vec![Scalar::one(), Scalar::zero()]]);
        assert_eq!(sr.base_error[1], Some(Scalar::zero()));

        let sr = sum_range(&catalog_get("example-3.8").unwrap().spec, 10).unwrap();
        assert_eq!(sr.directions.len(), 2);
        assert_eq!(sr.base_point, vec![Scalar::zero(), Scalar::zero()]);

        let sr = sum_range(&catalog_get("geometric-2d").unwrap().spec, 10).unwrap();
        assert!(sr.is_singleton());
        assert_eq!(sr.base_point, vec![Scalar::one(), Scalar::ratio(1, 2)]);
    }
}
