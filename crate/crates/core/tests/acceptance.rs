//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are always printed.
//! Criterion 6 is ignored by default (see its comment); pass `--ignored`
//! or `--include-ignored` to run it.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subsums::classify::{kakeya_classify, sum_range, KakeyaLabel};
use subsums::construct::{
    a_abs_enumerate, density_witness, liouville_bound_check, open_set_witness, pi03::DEFAULT_PI03_INDEX, pi03_blocks,
    LiouvilleFamily, OpenSetFamily, Witness, DEFAULT_WITNESS_STEPS,
};
use subsums::engine::{box_cover, enumerate_exact, extreme_points, membership_search, BoxCover, Limits, SearchBudget};
use subsums::scalar::sup_dist;
use subsums::series::sum::{partial_sum, partial_sum_f64};
use subsums::series::{catalog::NAMES, Rule, TailPattern};
use subsums::{catalog_get, Scalar, Selection, SeriesSpec};

fn spec(name: &str) -> SeriesSpec {
    catalog_get(name).unwrap().spec
}

fn within(start: Instant, limit: Duration, what: &str) {
    let t = start.elapsed();
    assert!(t < limit, "{what} took {t:?}, limit {limit:?}");
}

fn criterion_1() {
    let t0 = Instant::now();
    assert_eq!(kakeya_classify(&spec("geometric-two-thirds")).unwrap().label, KakeyaLabel::CantorLike);
    assert_eq!(kakeya_classify(&spec("geometric-half")).unwrap().label, KakeyaLabel::FiniteUnionOfIntervals);

    let vals = enumerate_exact(&spec("geometric-two-thirds"), 12, &Limits::default()).unwrap();
    assert_eq!(vals.len(), 4096);
    assert!(vals.iter().all(|v| v.multiplicity == 1 && v.value[0].is_exact()));
    let mut xs: Vec<Scalar> = vals.into_iter().map(|v| v.value[0].clone()).collect();
    xs.sort_by(|a, b| a.num_cmp(b));
    let gap = Scalar::ratio(1, 3i64.pow(12));
    assert!(xs.windows(2).all(|w| gap.le(&(&w[1] - &w[0]))));
    within(t0, Duration::from_secs(1), "criterion 1");
}

fn criterion_2() {
    let t0 = Instant::now();
    let s = spec("example-3.1");
    let sr = sum_range(&s, 1_000_000).unwrap();
    assert!((sr.base_point[0].to_f64() - std::f64::consts::LN_2).abs() < 1e-6);
    assert_eq!(sr.base_point[1], Scalar::one());
    assert_eq!(sr.directions, vec![vec![Scalar::one(), Scalar::zero()]]);

    for i in 0..10 {
        for j in 0..10 {
            let target = [-2.0 + 4.0 * i as f64 / 9.0, j as f64 / 9.0];
            let w = density_witness(&s, &target, 1e-2, DEFAULT_WITNESS_STEPS)
                .unwrap_or_else(|e| panic!("density at {target:?}: {e}"));
            assert!(w.error < 1e-2);
        }
    }

    // selections inside {1..N}: y >= 1 - 2^-N forces all of them
    let n = 20u64;
    let shallow = SearchBudget { max_steps: 1 << 20, max_index: n };
    let y_edge = 1.0 - (-(n as f64)).exp2();
    for x in [-2.0, -0.5, 0.4, 1.0, 3.0] {
        for y in [y_edge, 1.0] {
            let out = membership_search(&s, &[x, y], 1e-2, &shallow).unwrap();
            assert!(!out.is_found(), "({x}, {y}) found within depth {n}");
        }
    }
    let out = membership_search(&s, &[std::f64::consts::LN_2, 1.0], 1e-2, &SearchBudget::default()).unwrap();
    assert!(out.is_found());
    within(t0, Duration::from_secs(30), "criterion 2");
}

fn criterion_3() {
    let t0 = Instant::now();
    for name in ["geometric-half", "geometric-2d"] {
        let reports = extreme_points(&spec(name), 12, &Limits::default()).unwrap();
        let vertices: Vec<_> = reports.iter().filter(|r| r.is_hull_vertex).collect();
        assert!(!vertices.is_empty());
        for v in vertices {
            assert_eq!(v.representations.len(), 1, "{name}: vertex {:?}", v.point);
        }
    }
    within(t0, Duration::from_secs(10), "criterion 3");
}

/// Subsum of the witness selection, recomputed by scanning every index up
/// to the last one (the construction sums only the chosen indices).
fn recompute(spec: &SeriesSpec, w: &Witness) -> Vec<f64> {
    let sel = &w.selection;
    let mut upto = sel.max_index().unwrap_or(0);
    if !sel.is_finite() {
        upto += 1 << 22;
    }
    partial_sum_f64(spec, sel, upto)
}

fn check_open_set(family: &OpenSetFamily, targets: &[[f64; 2]], eps: f64) {
    for &t in targets {
        let w = open_set_witness(family, t, eps, DEFAULT_WITNESS_STEPS)
            .unwrap_or_else(|e| panic!("open-set witness at {t:?}: {e}"));
        let got = recompute(&family.assembled, &w);
        assert!(sup_dist(&got, &t) < eps, "{t:?}: recomputed {got:?}");
    }
}

fn grid(x0: f64, x1: f64, y0: f64, y1: f64, n: usize) -> Vec<[f64; 2]> {
    let at = |a: f64, b: f64, i: usize| a + (b - a) * i as f64 / (n - 1) as f64;
    (0..n)
        .flat_map(|i| (0..n).map(move |j| [at(x0, x1, i), at(y0, y1, j)]))
        .collect()
}

fn criterion_4() {
    let t0 = Instant::now();
    let eps = 1e-3;
    let f43 = OpenSetFamily::example_43();
    let mut t = grid(0.1, 1.9, -5.0, 5.0, 20);
    t.extend([[0.0, 0.0], [2.0, std::f64::consts::LN_2]]);
    check_open_set(&f43, &t, eps);

    let f44 = OpenSetFamily::example_44();
    let mut t = grid(-1.9, 1.9, -5.0, 5.0, 20);
    t.extend((0..21).map(|j| [0.0, -5.0 + j as f64 / 2.0]));
    check_open_set(&f44, &t, eps);
    within(t0, Duration::from_secs(60), "criterion 4");
}

fn check_blocks(v: &[u32]) -> subsums::construct::Pi03Blocks {
    let p = pi03_blocks(&spec("alternating-harmonic"), v, DEFAULT_PI03_INDEX).unwrap();
    let mut prev_last = 0;
    for n in 1..=v.len() {
        let w = (-(n as f64)).exp2();
        let c = (-(v[n - 1] as f64)).exp2();
        let (f, h) = (p.f(n), p.h(n));
        // F_n < H_n < F_{n+1}
        assert!(prev_last < f.first().unwrap() && f.last() < h.first());
        prev_last = h.last().unwrap();
        assert!(f.sum().abs_lt(w), "after F_{n}");
        assert!(h.sum().dist_lt(c, w), "after H_{n}");
    }
    p
}

fn criterion_5() {
    let t0 = Instant::now();
    for m in 1..=5 {
        check_blocks(&[m; 8]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let a: Vec<u32> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(1..=6)).collect();
        let mut b = a.clone();
        b.extend((0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=6)));
        let pa = check_blocks(&a);
        let pb = check_blocks(&b);
        assert_eq!(pa.blocks[..], pb.blocks[..pa.blocks.len()]);
    }
    within(t0, Duration::from_secs(5), "criterion 5");
}

// With g(k) = k + 3 every block of the chain is bounded by 2^m / 2^(m+3),
// a constant 1/8, so the tail bound never falls below 1/q0^r and no block k
// meets the approximation condition. The check is run as stated and is
// expected to fail.
fn criterion_6() {
    let t0 = Instant::now();
    let family = LiouvilleFamily::new("k+3".parse().unwrap()).unwrap();
    let mut sels = vec![Selection::all()];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let start = rng.gen_range(8..=64u64);
        let fin: Vec<u64> = (1..start).filter(|_| rng.gen_bool(0.5)).collect();
        let tail = TailPattern { start, modulus: 1, residue: 0 };
        sels.push(Selection::new(fin, vec![tail]).unwrap());
    }
    for sel in &sels {
        let rep = liouville_bound_check(&family, sel, 1, 1).unwrap_or_else(|e| panic!("{e}"));
        assert!(rep.reverify());
        let p0 = Scalar::from(BigRational::from_integer(rep.p0.parse::<BigInt>().unwrap()));
        let dyadic = &p0 * &Scalar::pow2_inv(rep.q0_log2 as u32);
        assert!((&rep.x_checked - &dyadic).abs().le(&rep.tail_bound));
    }
    within(t0, Duration::from_secs(10), "criterion 6");
}

fn random_point(rng: &mut ChaCha8Rng, base: &[Scalar], dirs: &[Vec<Scalar>], half: f64) -> Vec<f64> {
    let mut p: Vec<f64> = base.iter().map(Scalar::to_f64).collect();
    for d in dirs {
        let t = rng.gen_range(-half..=half);
        p.iter_mut().zip(d).for_each(|(a, b)| *a += t * b.to_f64());
    }
    p
}

fn criterion_7() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in ["example-3.1", "example-3.8"] {
        let s = spec(name);
        let sr = sum_range(&s, 100_000).unwrap();
        for _ in 0..50 {
            let p = random_point(&mut rng, &sr.base_point, &sr.directions, 2.0);
            let out = membership_search(&s, &p, 1e-2, &SearchBudget::default()).unwrap();
            assert!(out.is_found(), "{name}: {p:?} not reached");
        }
    }
}

fn criterion_8() {
    let s = spec("theorem-5.1-doubled");
    let limits = Limits::default();
    let pts = a_abs_enumerate(&s, 10, &limits).unwrap();
    assert!(pts.under_approximation);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let mut perm: Vec<u64> = (1..=16).collect();
        perm.shuffle(&mut rng);
        let mut z = SeriesSpec::bare(Rule::Permuted {
            base: Box::new(s.rule.clone()),
            perm,
        });
        z.tail_norm_bound = s.tail_norm_bound.clone();
        let re = enumerate_exact(&z, 16, &limits).unwrap();
        let mut found: Vec<_> = re.into_iter().map(|v| v.value).collect();
        found.sort_by(|a, b| subsums::scalar::point_cmp(a, b));
        for p in &pts.points {
            assert!(found.binary_search_by(|q| subsums::scalar::point_cmp(q, p)).is_ok(), "lost {p:?}");
        }
    }
}

/// Widens every box by the drop in the tail bound between `n` and `n + 1`
/// (zero for series with nonnegative terms).
fn inflate(c: &BoxCover, s: &SeriesSpec, n: u64) -> BoxCover {
    let signed = (1..=64).any(|k| s.term(k).iter().any(|v| v.signum() < 0));
    let d = if signed {
        s.tail_norm_bound(n).unwrap() - s.tail_norm_bound(n + 1).unwrap()
    } else {
        Scalar::zero()
    };
    let mut c = c.clone();
    for b in &mut c.boxes {
        for h in &mut b.halfwidth {
            *h = &*h + &d;
        }
    }
    c
}

fn criterion_9() {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    for name in NAMES {
        let s = spec(name);
        if !s.is_absolutely_convergent() {
            continue;
        }
        checked += 1;
        let c10 = box_cover(&s, 10, None, &limits).unwrap();
        for _ in 0..500 {
            let sel = Selection::finite((1..=40).filter(|_| rng.gen_bool(0.5)));
            let p = partial_sum(&s, &sel, 40);
            assert!(c10.contains(&p), "{name}: {p:?}");
        }
        let c11 = box_cover(&s, 11, None, &limits).unwrap();
        assert!(c11.nests_into(&inflate(&c10, &s, 10)), "{name}: depth 11 does not nest");
    }
    assert!(checked >= 5);
}

type Criterion = (u32, &'static str, fn(), bool);

const CRITERIA: &[Criterion] = &[
    (1, "Kakeya labels and exact depth-12 Cantor gaps", criterion_1, false),
    (2, "instructive series: sum range, density grid, membership", criterion_2, false),
    (3, "hull vertices have a single representation", criterion_3, false),
    (4, "open-set witnesses on both families", criterion_4, false),
    (5, "alternating blocks and prefix uniformity", criterion_5, false),
    (6, "Liouville chain for g(k) = k + 3", criterion_6, true),
    (7, "sum range points are approximable", criterion_7, false),
    (8, "absolute subsums survive finite permutations", criterion_8, false),
    (9, "cover soundness and nesting", criterion_9, false),
];

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let include_ignored = args.iter().any(|a| a == "--ignored" || a == "--include-ignored");
    let only_ignored = args.iter().any(|a| a == "--ignored");
    let quiet_panics = std::panic::take_hook();
    std::panic::set_hook(Box::new(move |info| {
        if std::env::var_os("ACCEPTANCE_VERBOSE").is_some() {
            quiet_panics(info);
        }
    }));
    let mut failed = 0;
    for &(n, what, f, ignored) in CRITERIA {
        if (ignored && !include_ignored) || (only_ignored && !ignored) {
            println!("criterion {n}: IGNORED - {what} (unattainable as stated)");
            continue;
        }
        let t0 = Instant::now();
        match catch_unwind(AssertUnwindSafe(f)) {
            Ok(()) => println!("criterion {n}: PASS - {what} ({:.2?})", t0.elapsed()),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {n}: FAIL - {what}: {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
