//! Named series with their declared metadata.
//!
//! Names are stable. Two are parameterized: `liouville(EXPR)` takes a gap
//! function in `k`, `example-3.3(D)` the number of retained c0 blocks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap::GapFn;
use crate::scalar::Scalar;
use crate::series::{
    Component, DirectionTag, NonzeroCount, Rule, Seq, SeriesSpec, TagKind, TailBound,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub spec: SeriesSpec,
    pub documented_facts: Vec<(String, String)>,
}

/// Fixed catalog names, in listing order.
pub const NAMES: &[&str] = &[
    "geometric-half",
    "geometric-two-thirds",
    "alternating-geometric",
    "guthrie-nymann",
    "geometric-2d",
    "finite-123",
    "constant-one",
    "alternating-harmonic",
    "example-3.1",
    "example-3.1-rotated",
    "example-3.3",
    "example-3.4",
    "example-4.3",
    "example-4.4",
    "example-3.8",
    "theorem-5.1-doubled",
    "interleaved-harmonic",
];

/// Parameterized name forms, for listings.
pub const PARAMETERIZED: &[&str] = &["liouville(EXPR)", "example-3.3(D)"];

/// Gap function of the `example-3.8` analog.
pub const EXAMPLE_38_GAP: &str = "5*k+3";

fn geo(coef: i64, num: i64, den: i64) -> Seq {
    Seq::geometric(Scalar::int(coef), Scalar::ratio(num, den))
}

fn half() -> Seq {
    geo(1, 1, 2)
}

fn unit(m: usize, i: usize) -> Vec<Scalar> {
    (0..m)
        .map(|j| if i == j { Scalar::one() } else { Scalar::zero() })
        .collect()
}

fn abs_tag(functional: Vec<Scalar>) -> DirectionTag {
    DirectionTag {
        functional,
        kind: TagKind::AbsolutelyConvergent,
        tail: Some(TailBound::FromRule),
    }
}

fn cond_tag(functional: Vec<Scalar>) -> DirectionTag {
    DirectionTag {
        functional,
        kind: TagKind::ConditionallyConvergent,
        tail: None,
    }
}

/// Absolutely convergent spec with all coordinates tagged.
fn absolute(rule: Rule, monotone: bool, nonzero: NonzeroCount) -> SeriesSpec {
    let m = rule.dimension();
    let mut s = SeriesSpec::bare(rule);
    s.tail_norm_bound = Some(TailBound::FromRule);
    s.direction_tags = (0..m).map(|i| abs_tag(unit(m, i))).collect();
    s.monotone_nonincreasing_abs = monotone;
    s.nonzero_count = Some(nonzero);
    s.has_null_subsequence_of_nonzero_terms = nonzero == NonzeroCount::Infinite;
    s.eventual_regime = Some(1);
    s
}

/// Spec with coordinate tags given per coordinate (`true` = absolutely
/// convergent).
fn mixed(rule: Rule, absolute_coords: &[bool]) -> SeriesSpec {
    let m = rule.dimension();
    let mut s = SeriesSpec::bare(rule);
    s.direction_tags = absolute_coords
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            if a {
                abs_tag(unit(m, i))
            } else {
                cond_tag(unit(m, i))
            }
        })
        .collect();
    s.nonzero_count = Some(NonzeroCount::Infinite);
    s.has_null_subsequence_of_nonzero_terms = true;
    s
}

fn fact(a: &str, b: &str) -> (String, String) {
    (a.to_string(), b.to_string())
}

fn example_31_rule() -> Rule {
    Rule::Coords {
        coords: vec![Seq::alt_harmonic(), half()],
    }
}

/// 45 degree rotation used by the rotated instructive series.
pub fn rotation_45() -> Vec<Vec<Scalar>> {
    let c = Scalar::float(std::f64::consts::FRAC_1_SQRT_2);
    vec![vec![c.clone(), -c.clone()], vec![c.clone(), c]]
}

pub fn c0_truncated(d: usize) -> Result<SeriesSpec> {
    if d == 0 || d > 64 {
        return Err(Error::InvalidSpec("c0 truncation needs 1..=64 blocks".into()));
    }
    let rule = Rule::C0 { dims: d };
    Ok(absolute(rule, false, NonzeroCount::Finite((d * (d + 1)) as u64)))
}

/// The parameterized Liouville-type family. When `g(k) - k` is constant
/// (checked on `k <= 8`) the functional `(2^c, -1)` vanishes on every term
/// and is tagged absolutely convergent.
pub fn liouville(gap: &GapFn) -> Result<SeriesSpec> {
    let rule = Rule::Liouville { gap: gap.clone() };
    rule.validate()?;
    let diffs: Vec<Option<i128>> = (0..=8).map(|k| gap.eval(k).map(|g| g - k as i128)).collect();
    let constant = diffs[0].filter(|c| diffs.iter().all(|d| *d == Some(*c)) && (0..=62).contains(c));
    let mut s = mixed(rule, &[false, false]);
    if let Some(c) = constant {
        s.direction_tags = vec![
            DirectionTag {
                functional: vec![Scalar::int(1i64 << c), Scalar::int(-1)],
                kind: TagKind::AbsolutelyConvergent,
                tail: Some(TailBound::Geometric {
                    coef: Scalar::zero(),
                    ratio: Scalar::one(),
                }),
            },
            cond_tag(vec![Scalar::zero(), Scalar::one()]),
        ];
    }
    s.inf_nonzero_norm = None;
    Ok(s)
}

fn build(name: &str) -> Result<(SeriesSpec, Vec<(String, String)>)> {
    let inf = NonzeroCount::Infinite;
    Ok(match name {
        "geometric-half" => (
            absolute(Rule::Coords { coords: vec![half()] }, true, inf),
            vec![fact("A = [0, 1]", "terms equal their tails")],
        ),
        "geometric-two-thirds" => (
            absolute(Rule::Coords { coords: vec![geo(2, 1, 3)] }, true, inf),
            vec![fact("A is the ternary Cantor set", "2/3^n exceeds its tail 1/3^n")],
        ),
        "alternating-geometric" => (
            absolute(Rule::Coords { coords: vec![geo(-1, -1, 2)] }, true, inf),
            vec![fact("A = [-1/3, 2/3]", "terms (-1)^(n+1)/2^n")],
        ),
        "guthrie-nymann" => (
            absolute(
                Rule::Periodic {
                    period: 2,
                    phases: vec![
                        vec![Component::block(geo(3, 1, 4))],
                        vec![Component::block(geo(2, 1, 4))],
                    ],
                },
                true,
                inf,
            ),
            vec![fact("A is a Cantorval", "3/4^k and 2/4^k interleaved")],
        ),
        "geometric-2d" => (
            absolute(
                Rule::Coords {
                    coords: vec![half(), geo(1, 1, 3)],
                },
                false,
                inf,
            ),
            vec![fact("hull vertices have unique representations", "all terms nonzero")],
        ),
        "finite-123" => {
            let mut s = absolute(
                Rule::Coords {
                    coords: vec![Seq::Finite {
                        values: vec![Scalar::int(1), Scalar::int(2), Scalar::int(3)],
                    }],
                },
                false,
                NonzeroCount::Finite(3),
            );
            s.inf_nonzero_norm = Some(Scalar::one());
            (s, vec![fact("A = {0, 1, ..., 6}", "subset sums of {1, 2, 3}")])
        }
        "constant-one" => {
            let mut s = SeriesSpec::bare(Rule::Coords {
                coords: vec![Seq::Constant { value: Scalar::one() }],
            });
            s.direction_tags = vec![DirectionTag {
                functional: vec![Scalar::one()],
                kind: TagKind::PotentiallyConditionallyDivergent,
                tail: None,
            }];
            s.monotone_nonincreasing_abs = true;
            s.nonzero_count = Some(inf);
            s.inf_nonzero_norm = Some(Scalar::one());
            (s, vec![fact("A is the set of naturals", "only finite subsums converge")])
        }
        "alternating-harmonic" => {
            let mut s = mixed(
                Rule::Coords {
                    coords: vec![Seq::alt_harmonic()],
                },
                &[false],
            );
            s.monotone_nonincreasing_abs = true;
            (s, vec![fact("A = R", "Riemann rearrangement")])
        }
        "example-3.1" => (
            mixed(example_31_rule(), &[false, true]),
            vec![
                fact("sum = (log 2, 1)", "natural order"),
                fact("SR = R x {1}", "Steinitz"),
                fact("closure of A = R x [0, 1]", "dyadic density"),
                fact("A meets y = 1 only at (log 2, 1)", "unique representation of 1"),
            ],
        ),
        "example-3.1-rotated" => {
            let rot = rotation_45();
            let rule = Rule::Linear {
                base: Box::new(example_31_rule()),
                matrix: rot.clone(),
            };
            let mut s = SeriesSpec::bare(rule);
            // f(R x) = x_2 and g(R x) = x_1 for the rotation R
            s.direction_tags = vec![
                DirectionTag {
                    functional: vec![rot[0][1].clone(), rot[1][1].clone()],
                    kind: TagKind::AbsolutelyConvergent,
                    tail: Some(TailBound::Geometric {
                        coef: Scalar::one(),
                        ratio: Scalar::ratio(1, 2),
                    }),
                },
                cond_tag(vec![rot[0][0].clone(), rot[1][0].clone()]),
            ];
            s.nonzero_count = Some(inf);
            s.has_null_subsequence_of_nonzero_terms = true;
            (s, vec![fact("SR is a line", "rotated copy of R x {1}")])
        }
        "example-3.3" => (
            c0_truncated(3)?,
            vec![fact("A is a product of grids k/n", "truncated to 3 blocks")],
        ),
        "example-3.4" => (
            mixed(
                Rule::Coords {
                    coords: vec![geo(2, 1, 3), Seq::alt_harmonic()],
                },
                &[true, false],
            ),
            vec![fact("x-projection lies in the ternary Cantor set", "injective x subsums")],
        ),
        "example-4.3" => (
            mixed(
                Rule::Periodic {
                    period: 2,
                    phases: vec![
                        vec![Component::block(half()), Component::block(Seq::alt_harmonic())],
                        vec![Component::block(half()), Component::zero()],
                    ],
                },
                &[true, false],
            ),
            vec![fact("A = (0,2) x R with (0,0) and (2, log 2)", "doubled interval-filling x")],
        ),
        "example-4.4" => {
            let w = |off| Component {
                seq: Seq::alt_harmonic(),
                mul: 2,
                off,
            };
            (
                mixed(
                    Rule::Periodic {
                        period: 4,
                        phases: vec![
                            vec![Component::block(half()), w(-1)],
                            vec![Component::block(half()), Component::zero()],
                            vec![Component::block(geo(-1, 1, 2)), w(0)],
                            vec![Component::block(geo(-1, 1, 2)), Component::zero()],
                        ],
                    },
                    &[true, false],
                ),
                vec![fact("A = (-2, 2) x R", "open achievement set")],
            )
        }
        "example-3.8" => (
            liouville(&EXAMPLE_38_GAP.parse()?)?,
            vec![fact("SR = R^2", "no nontrivial convergence functional")],
        ),
        "theorem-5.1-doubled" => {
            let y = |off| Component {
                seq: geo(2, 1, 3),
                mul: 2,
                off,
            };
            (
                mixed(
                    Rule::Periodic {
                        period: 2,
                        phases: vec![
                            vec![Component::block(Seq::alt_harmonic()), y(-1)],
                            vec![Component::block(Seq::alt_harmonic()), y(0)],
                        ],
                    },
                    &[false, true],
                ),
                vec![fact(
                    "the all-odd selection gives y = 3/4 with alternating harmonic x",
                    "each x term appears twice",
                )],
            )
        }
        "interleaved-harmonic" => (
            mixed(
                Rule::Periodic {
                    period: 2,
                    phases: vec![
                        vec![Component::block(Seq::alt_harmonic()), Component::zero()],
                        vec![Component::zero(), Component::block(Seq::alt_harmonic())],
                    ],
                },
                &[false, false],
            ),
            vec![fact("A = SR = R^2", "independent coordinates")],
        ),
        _ => return Err(Error::UnknownEntry(name.to_string())),
    })
}

/// Looks up a catalog entry by name.
pub fn catalog_get(name: &str) -> Result<CatalogEntry> {
    let name = name.trim();
    let (spec, documented_facts) = if let Some(expr) = name
        .strip_prefix("liouville(")
        .and_then(|r| r.strip_suffix(')'))
    {
        let gap: GapFn = expr.parse()?;
        (
            liouville(&gap)?,
            vec![fact("block lengths 2^(g(k)+1)", "parameterized gap")],
        )
    } else if let Some(d) = name
        .strip_prefix("example-3.3(")
        .and_then(|r| r.strip_suffix(')'))
    {
        let d: usize = d
            .parse()
            .map_err(|_| Error::UnknownEntry(name.to_string()))?;
        (c0_truncated(d)?, vec![fact("truncated c0 series", "d blocks")])
    } else {
        build(name)?
    };
    spec.validate()?;
    Ok(CatalogEntry {
        name: name.to_string(),
        spec,
        documented_facts,
    })
}

/// Every fixed entry.
pub fn all_entries() -> Vec<CatalogEntry> {
    NAMES
        .iter()
        .map(|n| catalog_get(n).expect("catalog entries are valid"))
        .collect()
}
