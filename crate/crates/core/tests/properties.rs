use proptest::prelude::*;

use subsums::classify::{kakeya_classify, KakeyaLabel};
use subsums::construct::riemann_rearrange;
use subsums::engine::{box_cover, enumerate_exact, Limits};
use subsums::series::sum::partial_sum;
use subsums::series::{NonzeroCount, Rule, Seq};
use subsums::{catalog_get, Scalar, Selection, SeriesSpec};

fn geometric(num: i64, den: i64) -> SeriesSpec {
    let mut s = catalog_get("geometric-half").unwrap().spec;
    s.rule = Rule::Coords {
        coords: vec![Seq::geometric(Scalar::one(), Scalar::ratio(num, den))],
    };
    s
}

fn finite(values: &[i64]) -> SeriesSpec {
    let mut s = catalog_get("finite-123").unwrap().spec;
    s.rule = Rule::Coords {
        coords: vec![Seq::Finite {
            values: values.iter().map(|&v| Scalar::int(v)).collect(),
        }],
    };
    s.nonzero_count = Some(NonzeroCount::Finite(values.iter().filter(|&&v| v != 0).count() as u64));
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Terms r^n dominate their tails exactly when r < 1/2.
    #[test]
    fn kakeya_label_of_geometric(num in 1i64..50, extra in 1i64..50) {
        let den = num + extra;
        let label = kakeya_classify(&geometric(num, den)).unwrap().label;
        let want = if 2 * num < den { KakeyaLabel::CantorLike } else { KakeyaLabel::FiniteUnionOfIntervals };
        prop_assert_eq!(label, want);
    }

    /// Distinct sums and multiplicities agree with a brute-force count.
    #[test]
    fn enumeration_matches_brute_force(values in prop::collection::vec(-6i64..=6, 1..=10)) {
        let n = values.len();
        let mut counts = std::collections::BTreeMap::new();
        for mask in 0u32..(1 << n) {
            let s: i64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| values[i]).sum();
            *counts.entry(s).or_insert(0u64) += 1;
        }
        let got = enumerate_exact(&finite(&values), n as u64, &Limits::default()).unwrap();
        let got: Vec<(Scalar, u64)> = got.into_iter().map(|v| (v.value[0].clone(), v.multiplicity)).collect();
        let want: Vec<(Scalar, u64)> = counts.into_iter().map(|(s, c)| (Scalar::int(s), c)).collect();
        prop_assert_eq!(got, want);
    }

    /// Any finite selection, however deep, lands in a shallow cover.
    #[test]
    fn covers_contain_deep_subsums(
        num in 1i64..20,
        extra in 1i64..20,
        depth in 0u64..8,
        mask in any::<u64>(),
    ) {
        let spec = geometric(num, num + extra);
        let cover = box_cover(&spec, depth, None, &Limits::default()).unwrap();
        let sel = Selection::finite((1..=40).filter(|i| mask >> (i - 1) & 1 == 1));
        let p = partial_sum(&spec, &sel, 40);
        prop_assert!(cover.contains(&p));
    }

    /// Rearrangements land within tolerance of any target.
    #[test]
    fn rearrangement_reaches_target(target in -3.0f64..3.0) {
        let spec = catalog_get("alternating-harmonic").unwrap().spec;
        let plan = riemann_rearrange(&spec, target, 1e-3, 1 << 24).unwrap();
        let last = plan.partial_sums.last().unwrap()[0];
        prop_assert!((last - target).abs() < 1e-3);
        let mut seen = plan.order.clone();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), plan.order.len());
    }

    /// Exact scalars survive a JSON round trip.
    #[test]
    fn scalar_json_round_trip(num in any::<i64>(), den in 1i64..i64::MAX, f in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        for s in [Scalar::ratio(num, den), Scalar::float(f)] {
            let text = serde_json::to_string(&s).unwrap();
            let back: Scalar = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
