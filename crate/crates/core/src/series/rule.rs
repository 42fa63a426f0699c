//! Term generators for series in R^m.
//!
//! A `Rule` is plain data (it round-trips through JSON); `Evaluator` is the
//! compiled form used in hot loops, holding lookup tables such as the block
//! boundaries of the Liouville family.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap::GapFn;
use crate::scalar::{Point, Scalar};
use crate::series::seq::{Profile, Seq, SeqF, TailSign};

/// A sequence read at index `mul*k + off`, where `k` is the block index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub seq: Seq,
    pub mul: u64,
    pub off: i64,
}

impl Component {
    pub fn block(seq: Seq) -> Self {
        Component { seq, mul: 1, off: 0 }
    }

    pub fn zero() -> Self {
        Component::block(Seq::Zero)
    }

    fn index(&self, k: u64) -> u64 {
        (self.mul as i128 * k as i128 + self.off as i128) as u64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Rule {
    /// Coordinate `i` of term `n` is `coords[i](n)`.
    Coords { coords: Vec<Seq> },
    /// Term `n` lies in phase `(n-1) % period` of block `k = (n-1)/period + 1`.
    Periodic {
        period: u64,
        phases: Vec<Vec<Component>>,
    },
    /// `e_1, -e_1, e_2/2, -e_2/2, e_2/2, -e_2/2, ...` truncated after `dims`
    /// blocks; block `j` holds `2j` terms.
    C0 { dims: usize },
    /// On block `k` (length `2^(g(k)+1)`): `((-1)^i / 2^g(k), (-1)^i / 2^k)`.
    Liouville { gap: GapFn },
    /// `matrix * base(n)`.
    Linear {
        base: Box<Rule>,
        matrix: Vec<Vec<Scalar>>,
    },
    /// `base(perm[n-1])` for `n <= perm.len()`, `base(n)` afterwards.
    Permuted { base: Box<Rule>, perm: Vec<u64> },
}

/// A run of consecutive terms `(-1)^n * dir`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParallelRun {
    pub start: u64,
    pub len: u128,
    pub dir: Vec<f64>,
}

/// Cap on reachable gap values; beyond this the exact terms are too large
/// to materialize.
const MAX_GAP: i128 = 1 << 20;

#[derive(Clone, Debug)]
pub struct LiouvilleTable {
    /// `g(0), g(1), ...`
    pub gaps: Vec<i128>,
    /// `ends[k-1] = n_k`, saturating at `u128::MAX`.
    pub ends: Vec<u128>,
}

impl LiouvilleTable {
    pub fn new(gap: &GapFn) -> Result<Self> {
        let mut gaps = Vec::new();
        let mut ends: Vec<u128> = Vec::new();
        let g0 = gap
            .eval(0)
            .ok_or_else(|| Error::InvalidSpec("g(0) overflows".into()))?;
        if g0 < 0 {
            return Err(Error::InvalidSpec("gap function must be non-negative".into()));
        }
        gaps.push(g0);
        let mut end: u128 = 0;
        let mut k = 1u64;
        while end <= u64::MAX as u128 {
            let g = gap.eval(k).ok_or_else(|| {
                Error::InvalidSpec(format!("g({k}) overflows while reachable"))
            })?;
            if g <= gaps[gaps.len() - 1] {
                return Err(Error::InvalidSpec(format!(
                    "gap function must be strictly increasing (g({k}) = {g})"
                )));
            }
            if g > MAX_GAP {
                return Err(Error::InvalidSpec(format!("g({k}) = {g} is too large")));
            }
            gaps.push(g);
            let len = if g + 1 >= 127 {
                u128::MAX
            } else {
                1u128 << (g + 1)
            };
            end = end.saturating_add(len);
            ends.push(end);
            k += 1;
        }
        Ok(LiouvilleTable { gaps, ends })
    }

    pub fn g(&self, k: u64) -> i128 {
        self.gaps[k as usize]
    }

    /// Block `k >= 1` containing index `n`.
    pub fn block_of(&self, n: u64) -> u64 {
        let n = n as u128;
        self.ends.partition_point(|&e| e < n) as u64 + 1
    }

    /// `n_k`; `n_0 = 0`.
    pub fn end(&self, k: u64) -> u128 {
        if k == 0 {
            0
        } else {
            self.ends[(k - 1) as usize]
        }
    }

    pub fn blocks(&self) -> u64 {
        self.ends.len() as u64
    }
}

pub enum Evaluator<'a> {
    Coords {
        seqs: &'a [Seq],
        fast: Vec<SeqF>,
    },
    Periodic {
        period: u64,
        phases: &'a [Vec<Component>],
        fast: Vec<Vec<SeqF>>,
    },
    C0(usize),
    Liouville(LiouvilleTable),
    Linear {
        base: Box<Evaluator<'a>>,
        matrix: &'a [Vec<Scalar>],
        matrix_f: Vec<Vec<f64>>,
        base_dim: usize,
    },
    Permuted {
        base: Box<Evaluator<'a>>,
        perm: &'a [u64],
    },
}

fn c0_locate(n: u64, dims: usize) -> Option<(usize, i64, u64)> {
    // block j occupies (j(j-1), j(j+1)]
    let mut j = (((n as f64).sqrt()) as u64).max(1);
    while j > 1 && j * (j - 1) >= n {
        j -= 1;
    }
    while j * (j + 1) < n {
        j += 1;
    }
    if j as usize > dims {
        return None;
    }
    let p = n - j * (j - 1);
    let sign = if p % 2 == 1 { 1 } else { -1 };
    Some(((j - 1) as usize, sign, j))
}

impl Evaluator<'_> {
    pub fn dim(&self) -> usize {
        match self {
            Evaluator::Coords { seqs, .. } => seqs.len(),
            Evaluator::Periodic { phases, .. } => phases[0].len(),
            Evaluator::C0(d) => *d,
            Evaluator::Liouville(_) => 2,
            Evaluator::Linear { matrix, .. } => matrix.len(),
            Evaluator::Permuted { base, .. } => base.dim(),
        }
    }

    pub fn term(&self, n: u64) -> Point {
        match self {
            Evaluator::Coords { seqs, .. } => seqs.iter().map(|s| s.at(n)).collect(),
            Evaluator::Periodic { period, phases, .. } => {
                let p = ((n - 1) % period) as usize;
                let k = (n - 1) / period + 1;
                phases[p].iter().map(|c| c.seq.at(c.index(k))).collect()
            }
            Evaluator::C0(d) => {
                let mut v = vec![Scalar::zero(); *d];
                if let Some((i, s, j)) = c0_locate(n, *d) {
                    v[i] = Scalar::ratio(s, j as i64);
                }
                v
            }
            Evaluator::Liouville(t) => {
                let k = t.block_of(n);
                let s: i64 = if n.is_multiple_of(2) { 1 } else { -1 };
                let x = BigRational::new(BigInt::from(s), BigInt::one() << (t.g(k) as usize));
                let y = BigRational::new(BigInt::from(s), BigInt::one() << (k as usize));
                vec![Scalar::Exact(x), Scalar::Exact(y)]
            }
            Evaluator::Linear { base, matrix, .. } => {
                let b = base.term(n);
                matrix
                    .iter()
                    .map(|row| crate::scalar::dot(row, &b))
                    .collect()
            }
            Evaluator::Permuted { base, perm } => {
                let m = perm.get((n - 1) as usize).copied().unwrap_or(n);
                base.term(m)
            }
        }
    }

    pub fn term_f64_into(&self, n: u64, out: &mut [f64]) {
        match self {
            Evaluator::Coords { fast, .. } => {
                for (o, s) in out.iter_mut().zip(fast) {
                    *o = s.at(n);
                }
            }
            Evaluator::Periodic { period, phases, fast } => {
                let p = ((n - 1) % period) as usize;
                let k = (n - 1) / period + 1;
                for ((o, c), f) in out.iter_mut().zip(&phases[p]).zip(&fast[p]) {
                    *o = f.at(c.index(k));
                }
            }
            Evaluator::C0(d) => {
                out.iter_mut().for_each(|o| *o = 0.0);
                if let Some((i, s, j)) = c0_locate(n, *d) {
                    out[i] = s as f64 / j as f64;
                }
            }
            Evaluator::Liouville(t) => {
                let k = t.block_of(n);
                let s = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
                out[0] = s * (-(t.g(k) as f64)).exp2();
                out[1] = s * (-(k as f64)).exp2();
            }
            Evaluator::Linear {
                base,
                matrix_f,
                base_dim,
                ..
            } => {
                let mut b = vec![0.0; *base_dim];
                base.term_f64_into(n, &mut b);
                for (o, row) in out.iter_mut().zip(matrix_f.iter()) {
                    *o = row.iter().zip(&b).map(|(a, x)| a * x).sum();
                }
            }
            Evaluator::Permuted { base, perm } => {
                let m = perm.get((n - 1) as usize).copied().unwrap_or(n);
                base.term_f64_into(m, out)
            }
        }
    }

    pub fn term_f64(&self, n: u64) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        self.term_f64_into(n, &mut v);
        v
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

impl Rule {
    pub fn dimension(&self) -> usize {
        match self {
            Rule::Coords { coords } => coords.len(),
            Rule::Periodic { phases, .. } => phases.first().map_or(0, Vec::len),
            Rule::C0 { dims } => *dims,
            Rule::Liouville { .. } => 2,
            Rule::Linear { matrix, .. } => matrix.len(),
            Rule::Permuted { base, .. } => base.dimension(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        match self {
            Rule::Coords { coords } => {
                if coords.is_empty() {
                    return bad("no coordinates".into());
                }
            }
            Rule::Periodic { period, phases } => {
                if *period == 0 || phases.len() as u64 != *period {
                    return bad("period must equal the number of phases".into());
                }
                let m = phases[0].len();
                if m == 0 || phases.iter().any(|p| p.len() != m) {
                    return bad("phases must share one nonzero dimension".into());
                }
                for c in phases.iter().flatten() {
                    if (c.mul as i128) + (c.off as i128) < 1 {
                        return bad("component index must start at 1 or above".into());
                    }
                }
            }
            Rule::C0 { dims } => {
                if *dims == 0 {
                    return bad("c0 truncation needs at least one block".into());
                }
            }
            Rule::Liouville { gap } => {
                LiouvilleTable::new(gap)?;
            }
            Rule::Linear { base, matrix } => {
                base.validate()?;
                let d = base.dimension();
                if matrix.is_empty() || matrix.iter().any(|r| r.len() != d) {
                    return bad("matrix shape does not match the base dimension".into());
                }
            }
            Rule::Permuted { base, perm } => {
                base.validate()?;
                let mut seen = vec![false; perm.len()];
                for &p in perm {
                    if p == 0 || p as usize > perm.len() || seen[(p - 1) as usize] {
                        return bad("perm must be a permutation of 1..=len".into());
                    }
                    seen[(p - 1) as usize] = true;
                }
            }
        }
        Ok(())
    }

    /// Compiles the rule. Fails only for rules that also fail `validate`.
    pub fn evaluator(&self) -> Result<Evaluator<'_>> {
        Ok(match self {
            Rule::Coords { coords } => Evaluator::Coords {
                seqs: coords,
                fast: coords.iter().map(Seq::float_form).collect(),
            },
            Rule::Periodic { period, phases } => Evaluator::Periodic {
                period: *period,
                phases,
                fast: phases
                    .iter()
                    .map(|ph| ph.iter().map(|c| c.seq.float_form()).collect())
                    .collect(),
            },
            Rule::C0 { dims } => Evaluator::C0(*dims),
            Rule::Liouville { gap } => Evaluator::Liouville(LiouvilleTable::new(gap)?),
            Rule::Linear { base, matrix } => Evaluator::Linear {
                base_dim: base.dimension(),
                base: Box::new(base.evaluator()?),
                matrix,
                matrix_f: matrix
                    .iter()
                    .map(|r| r.iter().map(Scalar::to_f64).collect())
                    .collect(),
            },
            Rule::Permuted { base, perm } => Evaluator::Permuted {
                base: Box::new(base.evaluator()?),
                perm,
            },
        })
    }

    pub fn is_exact(&self) -> bool {
        match self {
            Rule::Coords { coords } => coords.iter().all(Seq::is_exact),
            Rule::Periodic { phases, .. } => phases.iter().flatten().all(|c| c.seq.is_exact()),
            Rule::C0 { .. } | Rule::Liouville { .. } => true,
            Rule::Linear { base, matrix } => {
                base.is_exact() && matrix.iter().flatten().all(Scalar::is_exact)
            }
            Rule::Permuted { base, .. } => base.is_exact(),
        }
    }

    /// First block index `k` whose phase-`p` term lies beyond `n`.
    fn first_block_after(period: u64, p: u64, n: u64) -> u64 {
        if n < p + 1 {
            1
        } else {
            (n - p - 1) / period + 2
        }
    }

    fn c0_terms(dims: usize) -> u64 {
        (dims * (dims + 1)) as u64
    }

    /// Finite list of coordinate-`i` values for `n > after` when the rule
    /// has finitely many nonzero terms; used by C0 and permutation heads.
    fn explicit_range(&self, i: usize, from: u64, to: u64) -> Vec<Scalar> {
        let ev = self.evaluator().expect("validated rule");
        (from..=to).map(|n| ev.term(n)[i].clone()).collect()
    }

    /// `sum_{n>after} |x_n^(i)|`, exact, or `None` when not absolutely summable
    /// (or no closed form is known).
    pub fn abs_tail(&self, i: usize, after: u64) -> Option<Scalar> {
        match self {
            Rule::Coords { coords } => coords[i].abs_tail_sub(after + 1, 1),
            Rule::Periodic { period, phases } => {
                let mut acc = Scalar::zero();
                for (p, phase) in phases.iter().enumerate() {
                    let c = &phase[i];
                    let k = Self::first_block_after(*period, p as u64, after);
                    acc = acc + c.seq.abs_tail_sub(c.index(k), c.mul)?;
                }
                Some(acc)
            }
            Rule::C0 { dims } => {
                let end = Self::c0_terms(*dims);
                if after >= end {
                    return Some(Scalar::zero());
                }
                Some(
                    self.explicit_range(i, after + 1, end)
                        .iter()
                        .fold(Scalar::zero(), |a, v| a + v.abs()),
                )
            }
            Rule::Liouville { .. } => None,
            Rule::Linear { base, matrix } => {
                let mut acc = Scalar::zero();
                for (j, a) in matrix[i].iter().enumerate() {
                    if !a.is_zero() {
                        acc = acc + a.abs() * base.abs_tail(j, after)?;
                    }
                }
                Some(acc)
            }
            Rule::Permuted { base, perm } => {
                let len = perm.len() as u64;
                if after >= len {
                    return base.abs_tail(i, after);
                }
                let head = self
                    .explicit_range(i, after + 1, len)
                    .iter()
                    .fold(Scalar::zero(), |a, v| a + v.abs());
                Some(head + base.abs_tail(i, len)?)
            }
        }
    }

    /// Signed `sum_{n>after} x_n^(i)` when a closed form exists.
    pub fn signed_tail(&self, i: usize, after: u64) -> Option<Scalar> {
        match self {
            Rule::Coords { coords } => coords[i].tail_sub(after + 1, 1),
            Rule::Periodic { period, phases } => {
                let mut acc = Scalar::zero();
                for (p, phase) in phases.iter().enumerate() {
                    let c = &phase[i];
                    let k = Self::first_block_after(*period, p as u64, after);
                    acc = acc + c.seq.tail_sub(c.index(k), c.mul)?;
                }
                Some(acc)
            }
            Rule::C0 { dims } => {
                let end = Self::c0_terms(*dims);
                if after >= end {
                    return Some(Scalar::zero());
                }
                Some(
                    self.explicit_range(i, after + 1, end)
                        .into_iter()
                        .fold(Scalar::zero(), |a, v| a + v),
                )
            }
            Rule::Liouville { .. } => {
                // (-,+) pairs cancel; after an odd index only the partner
                // of the last term is left
                if after.is_multiple_of(2) {
                    Some(Scalar::zero())
                } else {
                    let ev = self.evaluator().ok()?;
                    Some(ev.term(after + 1)[i].clone())
                }
            }
            Rule::Linear { base, matrix } => {
                let mut acc = Scalar::zero();
                for (j, a) in matrix[i].iter().enumerate() {
                    if !a.is_zero() {
                        acc = acc + a * &base.signed_tail(j, after)?;
                    }
                }
                Some(acc)
            }
            Rule::Permuted { base, perm } => {
                let len = perm.len() as u64;
                if after >= len {
                    return base.signed_tail(i, after);
                }
                let head = self
                    .explicit_range(i, after + 1, len)
                    .into_iter()
                    .fold(Scalar::zero(), |a, v| a + v);
                Some(head + base.signed_tail(i, len)?)
            }
        }
    }

    /// Which signs occur among `x_n^(i)`, `n > after`.
    pub fn tail_sign(&self, i: usize, after: u64) -> TailSign {
        match self {
            Rule::Coords { coords } => coords[i].sign_sub(after + 1, 1),
            Rule::Periodic { period, phases } => {
                let mut s = TailSign::NonNegative;
                let mut first = true;
                for (p, phase) in phases.iter().enumerate() {
                    let c = &phase[i];
                    let k = Self::first_block_after(*period, p as u64, after);
                    let cs = c.seq.sign_sub(c.index(k), c.mul);
                    if matches!(c.seq, Seq::Zero) {
                        continue;
                    }
                    s = if first { cs } else { s.join(cs) };
                    first = false;
                }
                s
            }
            Rule::C0 { dims } => {
                if after >= Self::c0_terms(*dims) {
                    TailSign::NonNegative
                } else {
                    TailSign::Both
                }
            }
            Rule::Liouville { .. } => TailSign::Both,
            Rule::Linear { base, matrix } => {
                let (mut nonneg, mut nonpos) = (true, true);
                for (j, a) in matrix[i].iter().enumerate() {
                    let sa = a.signum();
                    if sa == 0 {
                        continue;
                    }
                    let (bn, bp) = base.tail_sign(j, after).flags();
                    let (tn, tp) = if sa > 0 { (bn, bp) } else { (bp, bn) };
                    nonneg &= tn;
                    nonpos &= tp;
                }
                TailSign::from_flags(nonneg, nonpos)
            }
            Rule::Permuted { base, perm } => {
                let len = perm.len() as u64;
                if after >= len {
                    return base.tail_sign(i, after);
                }
                let (mut nonneg, mut nonpos) = base.tail_sign(i, len).flags();
                for v in self.explicit_range(i, after + 1, len) {
                    nonneg &= v.signum() >= 0;
                    nonpos &= v.signum() <= 0;
                }
                TailSign::from_flags(nonneg, nonpos)
            }
        }
    }

    /// Shape of coordinate `i`.
    pub fn profile(&self, i: usize) -> Profile {
        match self {
            Rule::Coords { coords } => coords[i].profile(),
            Rule::Periodic { period, phases } => {
                let mut harmonic = false;
                let mut len = 1u64;
                for phase in phases {
                    let c = &phase[i];
                    match c.seq.profile() {
                        Profile::Summable => {}
                        Profile::NonNull => return Profile::NonNull,
                        Profile::Unknown => return Profile::Unknown,
                        Profile::HarmonicLike { signs } => {
                            if c.mul == 0 {
                                return Profile::NonNull;
                            }
                            harmonic = true;
                            len = lcm(len, signs.len() as u64);
                        }
                    }
                }
                if !harmonic {
                    return Profile::Summable;
                }
                let total = period * len;
                let signs = (1..=total)
                    .map(|n| {
                        let p = ((n - 1) % period) as usize;
                        let k = (n - 1) / period + 1;
                        let c = &phases[p][i];
                        match c.seq.profile() {
                            Profile::HarmonicLike { signs } => {
                                let j = c.index(k);
                                signs[((j - 1) % signs.len() as u64) as usize]
                            }
                            _ => 0,
                        }
                    })
                    .collect();
                Profile::HarmonicLike { signs }
            }
            Rule::C0 { .. } => Profile::Summable,
            Rule::Liouville { .. } => Profile::Unknown,
            Rule::Linear { base, matrix } => {
                let used: Vec<(usize, &Scalar)> = matrix[i]
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| !a.is_zero())
                    .collect();
                let profiles: Vec<Profile> = used.iter().map(|(j, _)| base.profile(*j)).collect();
                if profiles.iter().all(|p| *p == Profile::Summable) {
                    return Profile::Summable;
                }
                if used.len() == 1 {
                    if let Profile::HarmonicLike { signs } = &profiles[0] {
                        let s = used[0].1.signum();
                        return Profile::HarmonicLike {
                            signs: signs.iter().map(|v| v * s).collect(),
                        };
                    }
                    return profiles[0].clone();
                }
                Profile::Unknown
            }
            Rule::Permuted { base, .. } => base.profile(i),
        }
    }

    /// `(P, rho)` with `x_{n+P} = rho * x_n` for every `n >= 1`, when the
    /// rule is built from geometric pieces sharing one ratio per period.
    pub fn geometric_period(&self, i: usize) -> Option<(u64, Scalar)> {
        match self {
            Rule::Coords { coords } => match &coords[i] {
                Seq::Geometric { ratio, .. } => Some((1, ratio.clone())),
                _ => None,
            },
            Rule::Periodic { period, phases } => {
                let mut rho: Option<Scalar> = None;
                for phase in phases {
                    let c = &phase[i];
                    match &c.seq {
                        Seq::Zero => {}
                        Seq::Geometric { coef, ratio } if !coef.is_zero() => {
                            let r = ratio.powi(c.mul as i32);
                            match &rho {
                                None => rho = Some(r),
                                Some(prev) if *prev == r => {}
                                _ => return None,
                            }
                        }
                        _ => return None,
                    }
                }
                rho.map(|r| (*period, r))
            }
            _ => None,
        }
    }

    /// Runs of parallel alternating terms, when the rule is made of them.
    pub fn parallel_runs(&self, max_runs: usize) -> Option<Vec<ParallelRun>> {
        match self {
            Rule::Liouville { gap } => {
                let t = LiouvilleTable::new(gap).ok()?;
                let mut out = Vec::new();
                for k in 1..=t.blocks().min(max_runs as u64) {
                    let start = t.end(k - 1) + 1;
                    if start > u64::MAX as u128 {
                        break;
                    }
                    let len = (t.end(k) - t.end(k - 1)).min(u64::MAX as u128 - start + 1);
                    out.push(ParallelRun {
                        start: start as u64,
                        len,
                        dir: vec![(-(t.g(k) as f64)).exp2(), (-(k as f64)).exp2()],
                    });
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Number of nonzero terms, when provably finite.
    pub fn nonzero_count(&self) -> Option<u64> {
        match self {
            Rule::Coords { coords } => {
                let counts: Option<Vec<u64>> = coords
                    .iter()
                    .map(|s| match s {
                        Seq::Finite { values } => Some(values.len() as u64),
                        other => other.nonzero_count(),
                    })
                    .collect();
                let last = counts?.into_iter().max().unwrap_or(0);
                let ev = self.evaluator().ok()?;
                Some((1..=last).filter(|&n| ev.term(n).iter().any(|v| !v.is_zero())).count() as u64)
            }
            Rule::C0 { dims } => Some(Self::c0_terms(*dims)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geo(c: i64, num: i64, den: i64) -> Seq {
        Seq::geometric(Scalar::int(c), Scalar::ratio(num, den))
    }

    #[test]
    fn periodic_indexing() {
        // (v_k, w_k), (v_k, 0)
        let r = Rule::Periodic {
            period: 2,
            phases: vec![
                vec![Component::block(geo(1, 1, 2)), Component::block(Seq::alt_harmonic())],
                vec![Component::block(geo(1, 1, 2)), Component::zero()],
            ],
        };
        r.validate().unwrap();
        let ev = r.evaluator().unwrap();
        assert_eq!(ev.term(3), vec![Scalar::ratio(1, 4), Scalar::ratio(-1, 2)]);
        assert_eq!(ev.term(4), vec![Scalar::ratio(1, 4), Scalar::zero()]);
        // x tail after 2: 2 * (1/4 + 1/8 + ...) = 1
        assert_eq!(r.abs_tail(0, 2).unwrap(), Scalar::one());
        assert_eq!(r.abs_tail(0, 3).unwrap(), Scalar::ratio(3, 4));
        assert!(r.abs_tail(1, 3).is_none());
        assert_eq!(
            r.profile(1),
            Profile::HarmonicLike { signs: vec![1, 0, -1, 0] }
        );
    }

    #[test]
    fn c0_layout() {
        let r = Rule::C0 { dims: 3 };
        let ev = r.evaluator().unwrap();
        let want = [
            (1, 0, 1, 1),
            (2, 0, -1, 1),
            (3, 1, 1, 2),
            (6, 1, -1, 2),
            (7, 2, 1, 3),
            (12, 2, -1, 3),
        ];
        for (n, i, s, d) in want {
            let t = ev.term(n);
            assert_eq!(t[i], Scalar::ratio(s, d), "n = {n}");
        }
        assert!(ev.term(13).iter().all(Scalar::is_zero));
        assert_eq!(r.abs_tail(1, 2).unwrap(), Scalar::int(2));
        assert_eq!(r.signed_tail(1, 3).unwrap(), Scalar::ratio(-1, 2));
        assert_eq!(r.nonzero_count(), Some(12));
    }

    #[test]
    fn liouville_blocks() {
        let r = Rule::Liouville {
            gap: "k+3".parse().unwrap(),
        };
        let t = LiouvilleTable::new(&"k+3".parse().unwrap()).unwrap();
        assert_eq!(t.end(1), 32);
        assert_eq!(t.end(2), 32 + 64);
        assert_eq!(t.block_of(32), 1);
        assert_eq!(t.block_of(33), 2);
        let ev = r.evaluator().unwrap();
        assert_eq!(ev.term(1), vec![Scalar::ratio(-1, 16), Scalar::ratio(-1, 2)]);
        assert_eq!(ev.term(34), vec![Scalar::ratio(1, 32), Scalar::ratio(1, 4)]);
        assert_eq!(ev.term_f64(34), vec![1.0 / 32.0, 0.25]);
        assert_eq!(r.signed_tail(1, 40), Some(Scalar::zero()));
        assert_eq!(r.signed_tail(1, 41), Some(Scalar::ratio(1, 4)));
    }

    #[test]
    fn liouville_rejects_flat_gap() {
        let r = Rule::Liouville {
            gap: "3".parse().unwrap(),
        };
        assert!(r.validate().is_err());
    }

    #[test]
    fn linear_and_permuted() {
        let base = Rule::Coords {
            coords: vec![geo(1, 1, 2), geo(1, 1, 3)],
        };
        let lin = Rule::Linear {
            base: Box::new(base.clone()),
            matrix: vec![vec![Scalar::one(), Scalar::one()], vec![Scalar::zero(), Scalar::int(-1)]],
        };
        let ev = lin.evaluator().unwrap();
        assert_eq!(ev.term(1), vec![Scalar::ratio(5, 6), Scalar::ratio(-1, 3)]);
        assert_eq!(lin.abs_tail(0, 0).unwrap(), Scalar::ratio(3, 2));
        assert_eq!(lin.tail_sign(1, 0), TailSign::NonPositive);

        let per = Rule::Permuted {
            base: Box::new(base),
            perm: vec![3, 1, 2],
        };
        per.validate().unwrap();
        let ev = per.evaluator().unwrap();
        assert_eq!(ev.term(1)[0], Scalar::ratio(1, 8));
        assert_eq!(ev.term(4)[0], Scalar::ratio(1, 16));
        assert_eq!(per.abs_tail(0, 1).unwrap(), Scalar::ratio(7, 8));
    }

    #[test]
    fn geometric_period_of_interleave() {
        let r = Rule::Periodic {
            period: 2,
            phases: vec![vec![Component::block(geo(3, 1, 4))], vec![Component::block(geo(2, 1, 4))]],
        };
        assert_eq!(r.geometric_period(0), Some((2, Scalar::ratio(1, 4))));
    }
}
