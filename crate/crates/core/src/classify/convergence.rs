//! Behaviour of a selected subseries of a one-dimensional series.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Profile, Selection, SeriesSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionConvergence {
    Absolute,
    /// Converges in natural order but not absolutely. Such a subseries is
    /// also potentially conditionally convergent.
    Conditional,
    /// Some rearrangement converges conditionally; the natural order does not.
    PotentiallyConditional,
    NotPotentiallyConditional,
}

impl SelectionConvergence {
    pub fn is_potentially_conditional(self) -> bool {
        matches!(self, Self::Conditional | Self::PotentiallyConditional)
    }
}

const MAX_PERIOD: u64 = 1 << 22;
/// Harmonic-like magnitudes are compared this far out.
const FAR: u64 = 1 << 20;

/// For harmonic-like terms `x_n ~ c_n / n` with `c_n` periodic, the
/// selected subseries diverges on each side carrying a nonzero `c_n` and
/// converges in natural order iff the selected `c_n` sum to zero over a
/// period.
pub fn selection_convergence_class(spec: &SeriesSpec, sel: &Selection) -> Result<SelectionConvergence> {
    if spec.dimension != 1 {
        return Err(Error::NotOneDimensional(spec.dimension));
    }
    if sel.is_finite() {
        return Ok(SelectionConvergence::Absolute);
    }
    let signs = match spec.rule.profile(0) {
        Profile::Summable => return Ok(SelectionConvergence::Absolute),
        Profile::NonNull => return Ok(SelectionConvergence::NotPotentiallyConditional),
        Profile::Unknown => {
            return Err(Error::UnsupportedPattern(
                "no closed form for the term signs and magnitudes".into(),
            ))
        }
        Profile::HarmonicLike { signs } => signs,
    };
    let mut q = signs.len() as u64;
    for p in sel.tail_patterns() {
        q = q.lcm(&p.modulus);
        if q > MAX_PERIOD {
            return Err(Error::UnsupportedPattern(format!("period above {MAX_PERIOD}")));
        }
    }
    let start = sel.tail_patterns().iter().map(|p| p.start).max().unwrap_or(1);
    let from = start.max(FAR).div_ceil(q) * q + 1;
    let ev = spec.evaluator()?;
    let (mut pos, mut neg) = (false, false);
    let (mut net, mut mass) = (0.0f64, 0.0f64);
    for n in from..from + q {
        if !sel.contains(n) {
            continue;
        }
        match signs[((n - 1) % signs.len() as u64) as usize] {
            1 => pos = true,
            -1 => neg = true,
            _ => continue,
        }
        let c = ev.term_f64(n)[0] * n as f64;
        net += c;
        mass += c.abs();
    }
    Ok(match (pos, neg) {
        (false, false) => SelectionConvergence::Absolute,
        (true, true) if net.abs() <= 1e-6 * mass => SelectionConvergence::Conditional,
        (true, true) => SelectionConvergence::PotentiallyConditional,
        _ => SelectionConvergence::NotPotentiallyConditional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::catalog::catalog_get;
    use crate::series::TailPattern;

    fn pattern(start: u64, modulus: u64, residue: u64) -> Selection {
        Selection::new([], vec![TailPattern { start, modulus, residue }]).unwrap()
    }

    fn class(name: &str, sel: &Selection) -> SelectionConvergence {
        selection_convergence_class(&catalog_get(name).unwrap().spec, sel).unwrap()
    }

    #[test]
    fn alternating_harmonic() {
        let c = class("alternating-harmonic", &Selection::all());
        assert_eq!(c, SelectionConvergence::Conditional);
        assert!(c.is_potentially_conditional());
        assert_eq!(
            class("alternating-harmonic", &pattern(1, 2, 1)),
            SelectionConvergence::NotPotentiallyConditional
        );
        assert_eq!(
            class("alternating-harmonic", &Selection::finite([1, 3, 5])),
            SelectionConvergence::Absolute
        );
    }

    #[test]
    fn unbalanced_pattern() {
        // odd indices plus every fourth: 1 - 1/4 + 1/5 + 1/9 - 1/8 ...
        let sel = Selection::new(
            [],
            vec![
                TailPattern { start: 1, modulus: 2, residue: 1 },
                TailPattern { start: 1, modulus: 4, residue: 0 },
            ],
        )
        .unwrap();
        assert_eq!(class("alternating-harmonic", &sel), SelectionConvergence::PotentiallyConditional);
    }

    #[test]
    fn other_profiles() {
        assert_eq!(class("geometric-half", &Selection::all()), SelectionConvergence::Absolute);
        assert_eq!(
            class("constant-one", &pattern(3, 2, 0)),
            SelectionConvergence::NotPotentiallyConditional
        );
        let e = selection_convergence_class(&catalog_get("example-3.1").unwrap().spec, &Selection::all());
        assert!(matches!(e, Err(Error::NotOneDimensional(2))));
    }
}
