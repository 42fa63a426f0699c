//! Open achievement sets from an interval-filling `v` and a conditionally
//! convergent alternating `w`.
//!
//! Layouts, with `k >= 1`:
//! - doubled: `(v_k, w_k)` at `2k-1` and `(v_k, 0)` at `2k`;
//! - signed: `(v_k, w_{2k-1})`, `(v_k, 0)`, `(-v_k, w_{2k})`, `(-v_k, 0)` at
//!   `4k-3 .. 4k`.

use serde::{Deserialize, Serialize};

use crate::construct::Witness;
use crate::error::{Error, Result};
use crate::scalar::{sup_dist, CompensatedSum, Scalar};
use crate::series::rule::Component;
use crate::series::sum::partial_sum_f64;
use crate::series::{DirectionTag, NonzeroCount, Rule, Selection, Seq, SeriesSpec, TagKind, TailBound};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpenSetVariant {
    /// A = (0, 2X) x R together with (0, 0) and (2X, Y).
    #[serde(rename = "theorem-4.1")]
    Doubled,
    /// A = (-2X, 2X) x R.
    #[serde(rename = "theorem-4.2")]
    Signed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpenSetFamily {
    pub v_spec: SeriesSpec,
    pub w_spec: SeriesSpec,
    pub variant: OpenSetVariant,
    pub assembled: SeriesSpec,
}

fn single_seq(spec: &SeriesSpec, what: &str) -> Result<Seq> {
    match &spec.rule {
        Rule::Coords { coords } if coords.len() == 1 => Ok(coords[0].clone()),
        _ => Err(Error::InvalidSpec(format!("{what} must be a one-dimensional coordinate rule"))),
    }
}

/// Closed-form `|v_k| <= sum_{j>k} |v_j|` on the first 64 terms plus the
/// declared monotonicity.
fn check_interval_filling(v: &SeriesSpec) -> Result<()> {
    if !v.monotone_nonincreasing_abs {
        return Err(Error::InvalidSpec("v must be declared nonincreasing".into()));
    }
    let ev = v.evaluator()?;
    for k in 1..=64 {
        let x = ev.term(k)[0].clone();
        if x.signum() <= 0 {
            return Err(Error::InvalidSpec(format!("v_{k} is not positive")));
        }
        let tail = v
            .rule
            .abs_tail(0, k)
            .ok_or_else(|| Error::InvalidSpec("v needs a closed-form tail".into()))?;
        if tail.lt(&x) {
            return Err(Error::InvalidSpec(format!("v is not interval-filling at {k}")));
        }
    }
    Ok(())
}

impl OpenSetFamily {
    pub fn new(v_spec: SeriesSpec, w_spec: SeriesSpec, variant: OpenSetVariant) -> Result<Self> {
        let v = single_seq(&v_spec, "v")?;
        let w = single_seq(&w_spec, "w")?;
        check_interval_filling(&v_spec)?;
        if !matches!(w.profile(), crate::series::Profile::HarmonicLike { .. }) {
            return Err(Error::InvalidSpec("w must be conditionally convergent and alternating".into()));
        }
        let rule = match variant {
            OpenSetVariant::Doubled => Rule::Periodic {
                period: 2,
                phases: vec![
                    vec![Component::block(v.clone()), Component::block(w)],
                    vec![Component::block(v), Component::zero()],
                ],
            },
            OpenSetVariant::Signed => {
                let wc = |off| Component { seq: w.clone(), mul: 2, off };
                Rule::Periodic {
                    period: 4,
                    phases: vec![
                        vec![Component::block(v.clone()), wc(-1)],
                        vec![Component::block(v.clone()), Component::zero()],
                        vec![Component::block(v.negated()), wc(0)],
                        vec![Component::block(v.negated()), Component::zero()],
                    ],
                }
            }
        };
        let mut assembled = SeriesSpec::bare(rule);
        assembled.direction_tags = vec![
            DirectionTag {
                functional: vec![Scalar::one(), Scalar::zero()],
                kind: TagKind::AbsolutelyConvergent,
                tail: Some(TailBound::FromRule),
            },
            DirectionTag {
                functional: vec![Scalar::zero(), Scalar::one()],
                kind: TagKind::ConditionallyConvergent,
                tail: None,
            },
        ];
        assembled.nonzero_count = Some(NonzeroCount::Infinite);
        assembled.has_null_subsequence_of_nonzero_terms = true;
        assembled.validate()?;
        Ok(OpenSetFamily {
            v_spec,
            w_spec,
            variant,
            assembled,
        })
    }

    fn parts() -> (SeriesSpec, SeriesSpec) {
        let mut v = SeriesSpec::bare(Rule::Coords {
            coords: vec![Seq::geometric(Scalar::one(), Scalar::ratio(1, 2))],
        });
        v.tail_norm_bound = Some(TailBound::FromRule);
        v.monotone_nonincreasing_abs = true;
        let mut w = SeriesSpec::bare(Rule::Coords {
            coords: vec![Seq::alt_harmonic()],
        });
        w.monotone_nonincreasing_abs = true;
        (v, w)
    }

    /// `v_k = 1/2^k` with the alternating harmonic `w`, doubled layout.
    pub fn example_43() -> Self {
        let (v, w) = Self::parts();
        Self::new(v, w, OpenSetVariant::Doubled).expect("valid family")
    }

    /// Same parts in the signed layout.
    pub fn example_44() -> Self {
        let (v, w) = Self::parts();
        Self::new(v, w, OpenSetVariant::Signed).expect("valid family")
    }

    /// `X = sum v`
    pub fn x_total(&self) -> f64 {
        self.v_spec
            .rule
            .signed_tail(0, 0)
            .expect("interval-filling v has a closed-form sum")
            .to_f64()
    }

    /// `Y = sum w`, numerically when no closed form exists.
    pub fn y_total(&self) -> f64 {
        if let Some(y) = self.w_spec.rule.signed_tail(0, 0) {
            return y.to_f64();
        }
        let ev = self.w_spec.evaluator().expect("validated");
        let n = 1u64 << 20;
        let mut acc = CompensatedSum::default();
        for k in 1..=n {
            acc.add(ev.term_f64(k)[0]);
        }
        acc.value() + ev.term_f64(n + 1)[0] / 2.0
    }
}

struct Parts {
    v: Vec<f64>,
    tail: Vec<f64>,
}

impl Parts {
    /// `v_1..v_len` and `tail[k] = sum_{j>k} v_j`.
    fn new(family: &OpenSetFamily, len: u64) -> Result<Self> {
        let ev = family.v_spec.evaluator()?;
        let v = (1..=len).map(|k| ev.term_f64(k)[0]).collect();
        let tail = (0..=len)
            .map(|k| family.v_spec.rule.abs_tail(0, k).map(|t| t.to_f64()))
            .collect::<Option<Vec<f64>>>()
            .ok_or(Error::MissingBound)?;
        Ok(Parts { v, tail })
    }

    /// Smallest `K` with `tail(K) < bound`.
    fn cut(&self, bound: f64) -> Result<u64> {
        (0..self.tail.len())
            .find(|&k| self.tail[k] < bound)
            .map(|k| k as u64)
            .ok_or_else(|| Error::budget(format!("v tail never drops below {bound}")))
    }

    /// Greedy representation of `target` by `v_1..v_K`.
    fn greedy(&self, target: f64, k_max: u64) -> (Vec<u64>, f64) {
        let mut acc = 0.0;
        let mut out = Vec::new();
        for k in 1..=k_max {
            let v = self.v[(k - 1) as usize];
            if acc + v <= target {
                acc += v;
                out.push(k);
            }
        }
        (out, acc)
    }
}

const V_TERMS: u64 = 1000;

/// Selection of the assembled series landing within `eps` of `(a, b)`.
pub fn open_set_witness(family: &OpenSetFamily, target: [f64; 2], eps: f64, max_steps: u64) -> Result<Witness> {
    let [a, b] = target;
    if !(eps > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Parse("eps must be positive and the target finite".into()));
    }
    let x = family.x_total();
    let parts = Parts::new(family, V_TERMS)?;
    let spec = &family.assembled;
    let wv = family.w_spec.evaluator()?;
    let w = |j: u64| wv.term_f64(j)[0];
    match family.variant {
        OpenSetVariant::Doubled => {
            if a == 0.0 && b == 0.0 {
                return Ok(Witness::finite(spec, Selection::empty(), &target));
            }
            if a == 2.0 * x {
                let y = family.y_total();
                if (b - y).abs() < eps {
                    let achieved = partial_sum_f64(spec, &Selection::all(), 1 << 22);
                    return Ok(Witness {
                        selection: Selection::all(),
                        target: target.to_vec(),
                        error: sup_dist(&achieved, &target),
                        achieved,
                    });
                }
            }
            let mu = x / 1024.0;
            let lo = (a - x).max(0.0) + mu;
            let hi = a.min(x) - mu;
            if !(a > 0.0 && a < 2.0 * x) || lo > hi {
                return Err(Error::TargetOnBoundary(format!("a = {a} is not inside (0, {}) by {mu}", 2.0 * x)));
            }
            let t = (lo + hi) / 2.0;
            let k = parts.cut(mu.min(eps / 4.0))?;
            let (p1, mut t_acc) = parts.greedy(t, k);
            let mut y: f64 = p1.iter().map(|&j| w(j)).sum();
            let mut odd = p1;
            let mut j = k;
            while (y - b).abs() >= eps / 2.0 {
                j += 1;
                if j - k > max_steps {
                    return Err(Error::budget(format!("y not within {} of {b}", eps / 2.0)));
                }
                let wj = w(j);
                if (y < b && wj > 0.0) || (y > b && wj < 0.0) {
                    y += wj;
                    odd.push(j);
                    if j <= V_TERMS {
                        t_acc += parts.v[(j - 1) as usize];
                    }
                }
            }
            let k2 = parts.cut(eps / 4.0)?;
            let (even, _) = parts.greedy(a - t_acc, k2);
            let sel = odd.iter().map(|&j| 2 * j - 1).chain(even.iter().map(|&j| 2 * j));
            finish(spec, Selection::finite(sel), &target, eps)
        }
        OpenSetVariant::Signed => {
            if a.abs() >= 2.0 * x {
                return Err(Error::TargetOnBoundary(format!("|a| = {} is not below {}", a.abs(), 2.0 * x)));
            }
            let mut chosen: Vec<u64> = Vec::new();
            let mut y = 0.0;
            // blocks whose {4j-3, 4j} or {4j-2, 4j-1} pair is taken
            let (mut up_used, mut down_used) = (Vec::new(), Vec::new());
            if a != 0.0 {
                let half = a.abs() / 2.0;
                let k = parts.cut((eps / 2.0).min(x - half))?;
                let (p1, acc) = parts.greedy(half, k);
                let (p2, _) = parts.greedy(a.abs() - acc, k);
                // positive a: phases 0 and 1; negative a: phases 2 and 3
                let (first, second, w_index): (u64, u64, fn(u64) -> u64) = if a > 0.0 {
                    (3, 2, |j| 2 * j - 1)
                } else {
                    (1, 0, |j| 2 * j)
                };
                for &j in &p1 {
                    chosen.push(4 * j - first);
                    y += w(w_index(j));
                }
                chosen.extend(p2.iter().map(|&j| 4 * j - second));
                // 4j-3 and 4j sit in the up pair, 4j-2 and 4j-1 in the down pair
                let (pu, pd) = if a > 0.0 { (&p1, &p2) } else { (&p2, &p1) };
                up_used = pu.clone();
                down_used = pd.clone();
            }
            // pairs with exactly cancelling x parts
            let mut j = 0;
            while (y - b).abs() >= eps / 2.0 {
                j += 1;
                if j > max_steps {
                    return Err(Error::budget(format!("y not within {} of {b}", eps / 2.0)));
                }
                if y < b {
                    if up_used.binary_search(&j).is_err() {
                        y += w(2 * j - 1);
                        chosen.extend([4 * j - 3, 4 * j]);
                    }
                } else if down_used.binary_search(&j).is_err() {
                    y += w(2 * j);
                    chosen.extend([4 * j - 2, 4 * j - 1]);
                }
            }
            finish(spec, Selection::finite(chosen), &target, eps)
        }
    }
}

fn finish(spec: &SeriesSpec, sel: Selection, target: &[f64], eps: f64) -> Result<Witness> {
    let w = Witness::finite(spec, sel, target);
    if w.error >= eps {
        return Err(Error::budget(format!("construction reached error {} >= {eps}", w.error)));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::DEFAULT_WITNESS_STEPS;
    use crate::series::catalog::catalog_get;

    #[test]
    fn families_match_the_catalog() {
        assert_eq!(OpenSetFamily::example_43().assembled.rule, catalog_get("example-4.3").unwrap().spec.rule);
        assert_eq!(OpenSetFamily::example_44().assembled.rule, catalog_get("example-4.4").unwrap().spec.rule);
    }

    #[test]
    fn doubled_targets() {
        let f = OpenSetFamily::example_43();
        let w = open_set_witness(&f, [1.0, 5.0], 1e-3, DEFAULT_WITNESS_STEPS).unwrap();
        assert!(w.error < 1e-3);
        let w = open_set_witness(&f, [0.0, 0.0], 1e-3, DEFAULT_WITNESS_STEPS).unwrap();
        assert_eq!(w.selection, Selection::empty());
        let w = open_set_witness(&f, [2.0, std::f64::consts::LN_2], 1e-3, DEFAULT_WITNESS_STEPS).unwrap();
        assert_eq!(w.selection, Selection::all());
        assert!(matches!(
            open_set_witness(&f, [2.0, 0.0], 1e-3, DEFAULT_WITNESS_STEPS),
            Err(Error::TargetOnBoundary(_))
        ));
    }

    #[test]
    fn signed_targets() {
        let f = OpenSetFamily::example_44();
        let w = open_set_witness(&f, [0.0, -3.0], 1e-3, DEFAULT_WITNESS_STEPS).unwrap();
        assert_eq!(w.achieved[0], 0.0);
        assert!(w.error < 1e-3);
        for a in [-1.9, -0.3, 1.2, 1.9] {
            let w = open_set_witness(&f, [a, 4.0], 1e-3, DEFAULT_WITNESS_STEPS).unwrap();
            assert!(w.error < 1e-3, "{a}");
        }
    }

    #[test]
    fn rejects_non_filling_v() {
        let (_, w) = OpenSetFamily::parts();
        let mut v = SeriesSpec::bare(Rule::Coords {
            coords: vec![Seq::geometric(Scalar::int(2), Scalar::ratio(1, 3))],
        });
        v.monotone_nonincreasing_abs = true;
        assert!(matches!(
            OpenSetFamily::new(v, w, OpenSetVariant::Doubled),
            Err(Error::InvalidSpec(_))
        ));
    }
}
