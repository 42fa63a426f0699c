//! Small dense linear algebra over `Scalar`: exact when every entry is
//! exact, float with a `1e-12` tolerance otherwise.

use num_rational::BigRational;
use num_traits::Signed;

use crate::scalar::{dot, Scalar};

pub const FLOAT_TOL: f64 = 1e-12;

fn negligible(v: &Scalar, scale: f64) -> bool {
    match v {
        Scalar::Exact(r) => r.numer().sign() == num_bigint::Sign::NoSign,
        Scalar::Float(f) => f.abs() <= FLOAT_TOL * scale.max(1.0),
    }
}

/// Rank of the matrix whose rows are `rows`.
pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    let mut a: Vec<Vec<Scalar>> = rows.to_vec();
    let Some(cols) = a.first().map(Vec::len) else {
        return 0;
    };
    let scale = a.iter().flatten().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let mut r = 0;
    for c in 0..cols {
        // largest pivot keeps the float path stable
        let pivot = (r..a.len())
            .filter(|&i| !negligible(&a[i][c], scale))
            .max_by(|&i, &j| a[i][c].abs().num_cmp(&a[j][c].abs()).then(j.cmp(&i)));
        let Some(p) = pivot else { continue };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[r][c];
            for k in c..cols {
                let d = &f * &a[r][k];
                a[i][k] = &a[i][k] - &d;
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

/// `v` minus its projections on the mutually orthogonal `basis`.
pub fn residual(v: &[Scalar], basis: &[Vec<Scalar>]) -> Vec<Scalar> {
    let mut out = v.to_vec();
    for b in basis {
        let bb = dot(b, b);
        if bb.is_zero() {
            continue;
        }
        let c = &dot(&out, b) / &bb;
        for (o, x) in out.iter_mut().zip(b) {
            *o = &*o - &(&c * x);
        }
    }
    out
}

fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

/// Unit vector along `v`; exact when the norm is rational.
pub fn normalize(v: &[Scalar]) -> Vec<Scalar> {
    let nn = dot(v, v);
    if let Some(r) = nn.as_exact() {
        if v.iter().all(Scalar::is_exact) {
            if let Some(s) = exact_sqrt(r) {
                let s = Scalar::Exact(s);
                return v.iter().map(|x| x / &s).collect();
            }
        }
    }
    let n = nn.to_f64().sqrt();
    v.iter().map(|x| Scalar::float(x.to_f64() / n)).collect()
}

/// Orthogonal basis of `span(rows)` by Gram–Schmidt, taking at each step
/// the row with the largest remaining norm (lowest index on ties).
pub fn orthogonal_basis(rows: &[Vec<Scalar>], against: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let scale = rows
        .iter()
        .flatten()
        .map(|v| v.to_f64().abs())
        .fold(1.0, f64::max);
    let mut basis: Vec<Vec<Scalar>> = against.to_vec();
    let mut out = Vec::new();
    let mut used = vec![false; rows.len()];
    loop {
        let mut best: Option<(usize, Vec<Scalar>, Scalar)> = None;
        for (i, r) in rows.iter().enumerate() {
            if used[i] {
                continue;
            }
            let res = residual(r, &basis);
            let nn = dot(&res, &res);
            if negligible(&nn, scale * scale) {
                used[i] = true;
                continue;
            }
            if best.as_ref().is_none_or(|(_, _, b)| b.lt(&nn)) {
                best = Some((i, res, nn));
            }
        }
        let Some((i, res, _)) = best else { break };
        used[i] = true;
        basis.push(res.clone());
        out.push(res);
    }
    out
}

/// Orthogonal complement of `span(rows)` in `R^m`, built from the standard
/// basis with the same pivoting rule.
pub fn complement(rows: &[Vec<Scalar>], m: usize) -> Vec<Vec<Scalar>> {
    let own = orthogonal_basis(rows, &[]);
    let std: Vec<Vec<Scalar>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { Scalar::one() } else { Scalar::zero() })
                .collect()
        })
        .collect();
    let float = rows.iter().flatten().any(|v| !v.is_exact());
    let std = if float {
        std.into_iter()
            .map(|r| r.iter().map(Scalar::to_float).collect())
            .collect()
    } else {
        std
    };
    orthogonal_basis(&std, &own)
}

/// Solution of the square system `a x = b` by elimination, or `None` when
/// `a` is singular.
pub fn solve(a: &[Vec<Scalar>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = b.len();
    let mut m: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .map(|(row, v)| row.iter().cloned().chain([v.clone()]).collect())
        .collect();
    let scale = a.iter().flatten().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    for c in 0..n {
        let p = (c..n)
            .filter(|&i| !negligible(&m[i][c], scale))
            .max_by(|&i, &j| m[i][c].abs().num_cmp(&m[j][c].abs()).then(j.cmp(&i)))?;
        m.swap(c, p);
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[c][c];
            for k in c..=n {
                let d = &f * &m[c][k];
                m[i][k] = &m[i][k] - &d;
            }
        }
    }
    Some((0..n).map(|i| &m[i][n] / &m[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_rank() {
        let rows = vec![
            vec![Scalar::int(1), Scalar::int(2)],
            vec![Scalar::int(2), Scalar::int(4)],
        ];
        assert_eq!(rank(&rows), 1);
        assert_eq!(rank(&[vec![Scalar::int(1), Scalar::zero()], vec![Scalar::zero(), Scalar::int(3)]]), 2);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn complement_of_axis() {
        let c = complement(&[vec![Scalar::zero(), Scalar::one()]], 2);
        assert_eq!(c, vec![vec![Scalar::one(), Scalar::zero()]]);
        let c = complement(&[vec![Scalar::int(8), Scalar::int(-1)]], 2);
        assert_eq!(c.len(), 1);
        assert!(dot(&c[0], &[Scalar::int(8), Scalar::int(-1)]).is_zero());
        assert_eq!(complement(&[], 2).len(), 2);
    }

    #[test]
    fn solves_exactly() {
        let a = vec![
            vec![Scalar::int(2), Scalar::int(1)],
            vec![Scalar::int(1), Scalar::int(3)],
        ];
        let x = solve(&a, &[Scalar::int(3), Scalar::int(5)]).unwrap();
        assert_eq!(x, vec![Scalar::ratio(4, 5), Scalar::ratio(7, 5)]);
        assert!(solve(&[vec![Scalar::int(1), Scalar::int(2)], vec![Scalar::int(2), Scalar::int(4)]], &[Scalar::one(), Scalar::one()]).is_none());
    }

    #[test]
    fn normalization() {
        assert_eq!(
            normalize(&[Scalar::int(3), Scalar::int(4)]),
            vec![Scalar::ratio(3, 5), Scalar::ratio(4, 5)]
        );
        let n = normalize(&[Scalar::int(1), Scalar::int(1)]);
        assert!((n[0].to_f64() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }
}
