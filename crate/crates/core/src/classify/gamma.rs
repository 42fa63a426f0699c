//! Convergence functionals `Γ = {f : Σ|f(x_n)| < ∞}` and their orthogonal
//! complement.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::linalg::{complement, normalize, orthogonal_basis};
pub use crate::classify::linalg::rank;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{SeriesSpec, TagKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaMode {
    Declared,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceFunctionals {
    pub gamma_basis: Vec<Vec<Scalar>>,
    pub gamma_perp_basis: Vec<Vec<Scalar>>,
    pub mode: GammaMode,
}

impl ConvergenceFunctionals {
    pub fn dim_gamma(&self) -> usize {
        self.gamma_basis.len()
    }
}

/// Parameters of the numeric scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeuristicParams {
    /// Number of directions on the half circle when `m = 2`.
    pub directions: usize,
    pub n_min: u64,
    pub n_max: u64,
    pub samples: usize,
    pub slope_threshold: f64,
    pub corr_threshold: f64,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        HeuristicParams {
            directions: 720,
            n_min: 1_000,
            n_max: 10_000,
            samples: 12,
            slope_threshold: 0.1,
            corr_threshold: 0.99,
        }
    }
}

fn unit_basis(vs: Vec<Vec<Scalar>>) -> Vec<Vec<Scalar>> {
    vs.iter().map(|v| normalize(v)).collect()
}

/// Γ from the declared tags: the span of the absolutely convergent ones.
pub fn gamma_declared(spec: &SeriesSpec) -> Result<ConvergenceFunctionals> {
    let m = spec.dimension;
    if spec.direction_tags.is_empty() {
        return Err(Error::NoDeclaredTags);
    }
    let all: Vec<Vec<Scalar>> = spec.direction_tags.iter().map(|t| t.functional.clone()).collect();
    if rank(&all) < m {
        return Err(Error::InsufficientMetadata("direction tags must span the space"));
    }
    let abs: Vec<Vec<Scalar>> = spec
        .direction_tags
        .iter()
        .filter(|t| t.kind == TagKind::AbsolutelyConvergent)
        .map(|t| t.functional.clone())
        .collect();
    Ok(ConvergenceFunctionals {
        gamma_basis: unit_basis(orthogonal_basis(&abs, &[])),
        gamma_perp_basis: unit_basis(complement(&abs, m)),
        mode: GammaMode::Declared,
    })
}

fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

fn scan_directions(m: usize, count: usize) -> Vec<Vec<f64>> {
    match m {
        1 => vec![vec![1.0]],
        2 => (0..count)
            .map(|j| {
                let t = std::f64::consts::PI * j as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let mut out = Vec::new();
            let total = 3usize.pow(m as u32);
            for code in 1..total {
                let mut c = code;
                let v: Vec<f64> = (0..m)
                    .map(|_| {
                        let d = (c % 3) as f64 - 1.0;
                        c /= 3;
                        d
                    })
                    .collect();
                // one representative per ± pair
                if v.iter().find(|x| **x != 0.0).copied() == Some(1.0) {
                    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    out.push(v.iter().map(|x| x / n).collect());
                }
            }
            out
        }
    }
}

/// Growth of `Σ_{n<=N} |f(x_n)|` per direction: `(slope vs ln N, divergent)`.
fn growth(terms: &[Vec<f64>], f: &[f64], ns: &[u64], p: &HeuristicParams) -> (f64, bool) {
    let mut acc = 0.0;
    let mut s = Vec::with_capacity(ns.len());
    let mut next = 0;
    for (i, t) in terms.iter().enumerate() {
        acc += t.iter().zip(f).map(|(a, b)| a * b).sum::<f64>().abs();
        while next < ns.len() && ns[next] == i as u64 + 1 {
            s.push(acc);
            next += 1;
        }
    }
    let logs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let lin: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let slope = (s[s.len() - 1] - s[0]) / (logs[logs.len() - 1] - logs[0]);
    let fits = correlation(&logs, &s) >= p.corr_threshold || correlation(&lin, &s) >= p.corr_threshold;
    (slope, slope > p.slope_threshold && fits)
}

/// Γ estimated from partial sums of `|f(x_n)|` over a grid of directions.
/// Never used to certify anything.
pub fn gamma_heuristic(spec: &SeriesSpec, p: &HeuristicParams) -> Result<ConvergenceFunctionals> {
    let m = spec.dimension;
    if p.n_max < 10_000 || p.n_min < 2 || p.n_min >= p.n_max || p.samples < 3 {
        return Err(Error::InsufficientTerms(format!(
            "need a sampling range reaching at least 10^4 terms, got {}..{}",
            p.n_min, p.n_max
        )));
    }
    let ev = spec.evaluator()?;
    let terms: Vec<Vec<f64>> = (1..=p.n_max).map(|n| ev.term_f64(n)).collect();
    if terms.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InsufficientTerms("terms are not finite".into()));
    }
    let ratio = (p.n_max as f64 / p.n_min as f64).powf(1.0 / (p.samples - 1) as f64);
    let mut ns: Vec<u64> = (0..p.samples)
        .map(|i| ((p.n_min as f64) * ratio.powi(i as i32)).round() as u64)
        .map(|n| n.clamp(p.n_min, p.n_max))
        .collect();
    ns.dedup();
    let dirs = scan_directions(m, p.directions.max(1));
    let fits: Vec<(f64, bool)> = dirs.par_iter().map(|f| growth(&terms, f, &ns, p)).collect();
    let bounded: Vec<Vec<Scalar>> = dirs
        .iter()
        .zip(&fits)
        .filter(|(_, (_, div))| !div)
        .map(|(f, _)| f.iter().map(|v| Scalar::float(*v)).collect())
        .collect();
    let gamma: Vec<Vec<Scalar>> = if bounded.is_empty() {
        Vec::new()
    } else if bounded.len() == dirs.len() {
        (0..m)
            .map(|i| (0..m).map(|j| Scalar::float(if i == j { 1.0 } else { 0.0 })).collect())
            .collect()
    } else if m == 2 {
        let (best, _) = fits
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.0.cmp(&b.0)))
            .expect("nonempty");
        vec![dirs[best].iter().map(|v| Scalar::float(*v)).collect()]
    } else {
        orthogonal_basis(&bounded, &[])
    };
    Ok(ConvergenceFunctionals {
        gamma_basis: unit_basis(gamma.clone()),
        gamma_perp_basis: unit_basis(complement(&gamma, m)),
        mode: GammaMode::Heuristic,
    })
}

pub fn gamma_compute(spec: &SeriesSpec, mode: GammaMode) -> Result<ConvergenceFunctionals> {
    match mode {
        GammaMode::Declared => gamma_declared(spec),
        GammaMode::Heuristic => gamma_heuristic(spec, &HeuristicParams::default()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::dot;
    use crate::series::catalog::catalog_get;

    #[test]
    fn declared_examples() {
        let g = gamma_compute(&catalog_get("example-3.1").unwrap().spec, GammaMode::Declared).unwrap();
        assert_eq!(g.gamma_basis, vec![vec![Scalar::zero(), Scalar::one()]]);
        assert_eq!(g.gamma_perp_basis, vec![vec![Scalar::one(), Scalar::zero()]]);

        let g = gamma_compute(&catalog_get("example-3.8").unwrap().spec, GammaMode::Declared).unwrap();
        assert!(g.gamma_basis.is_empty());
        assert_eq!(g.gamma_perp_basis.len(), 2);

        let g = gamma_compute(&catalog_get("geometric-2d").unwrap().spec, GammaMode::Declared).unwrap();
        assert_eq!(g.dim_gamma(), 2);
        assert!(g.gamma_perp_basis.is_empty());
    }

    #[test]
    fn bases_are_orthogonal() {
        let g = gamma_compute(&catalog_get("liouville(k+3)").unwrap().spec, GammaMode::Declared).unwrap();
        assert_eq!(g.dim_gamma(), 1);
        assert!(dot(&g.gamma_basis[0], &g.gamma_perp_basis[0]).to_f64().abs() < 1e-12);
    }

    #[test]
    fn missing_tags() {
        let mut spec = catalog_get("example-3.1").unwrap().spec;
        spec.direction_tags.clear();
        assert!(matches!(gamma_compute(&spec, GammaMode::Declared), Err(Error::NoDeclaredTags)));
    }

    #[test]
    fn heuristic_finds_the_absolute_direction() {
        let spec = catalog_get("example-3.1").unwrap().spec;
        let g = gamma_compute(&spec, GammaMode::Heuristic).unwrap();
        assert_eq!(g.mode, GammaMode::Heuristic);
        assert_eq!(g.dim_gamma(), 1);
        assert!(g.gamma_basis[0][0].to_f64().abs() < 1e-9);
    }
}
