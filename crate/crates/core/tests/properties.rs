mod common;

use proptest::prelude::*;

use svmap::corpus::{random_minimal_usco, RandomMapParams};
use svmap::{
    classify, distance, phi, BreakFiber, CompactSet, Expr, MapMetric, PiecewiseMap, SelectionPolicy,
};

fn arb_set() -> impl Strategy<Value = CompactSet> {
    prop::collection::vec((-10.0..10.0f64, 0.0..3.0f64, any::<bool>()), 1..5).prop_map(|parts| {
        CompactSet::new(
            parts
                .into_iter()
                .map(|(lo, w, point)| (lo, if point { lo } else { lo + w }))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    })
}

/// A set and a subset of it, built by shrinking some of its parts.
fn arb_nested() -> impl Strategy<Value = (CompactSet, CompactSet)> {
    arb_set().prop_flat_map(|b| {
        let n = b.parts().len();
        (Just(b), prop::collection::vec((any::<bool>(), 0.0..1.0f64, 0.0..1.0f64), n)).prop_map(|(b, picks)| {
            let mut parts: Vec<(f64, f64)> = b
                .parts()
                .iter()
                .zip(&picks)
                .filter(|(_, (keep, _, _))| *keep)
                .map(|(p, (_, s, t))| {
                    let (s, t) = if s <= t { (*s, *t) } else { (*t, *s) };
                    (p.lo + s * p.width(), p.lo + t * p.width())
                })
                .collect();
            if parts.is_empty() {
                parts.push((b.min(), b.min()));
            }
            (CompactSet::new(parts).unwrap(), b)
        })
    })
}

/// Inclusion checked part by part, without any distance computation.
fn contained(a: &CompactSet, b: &CompactSet) -> bool {
    a.parts()
        .iter()
        .all(|p| b.parts().iter().any(|q| q.lo <= p.lo && p.hi <= q.hi))
}

fn arb_poly() -> impl Strategy<Value = Expr> {
    prop::collection::vec(-3.0..3.0f64, 1..5).prop_map(|c| Expr::poly(c).unwrap())
}

fn arb_sinrecip() -> impl Strategy<Value = Expr> {
    (-2.0..2.0f64, prop_oneof![0.1..3.0f64, -3.0..-0.1f64], -1.0..1.0f64, -1.0..1.0f64)
        .prop_map(|(a, k, c, b)| Expr::sin_recip(a, k, c, b).unwrap())
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    prop_oneof![arb_poly(), arb_sinrecip()]
}

fn mu(seed: u64) -> PiecewiseMap {
    random_minimal_usco(seed, RandomMapParams::default()).unwrap()
}

/// Random maps with arbitrary fibers: the cluster set, its hull, the cluster
/// set plus a stray value, or one cluster value.
fn arbitrary_map(seed: u64, choices: &[u8]) -> PiecewiseMap {
    let base = mu(seed);
    let fibers = (0..base.breakpoints().len())
        .map(|i| {
            let lr = base.cluster_union(i);
            let fiber = match choices[i % choices.len()] % 4 {
                0 => lr,
                1 => lr.hull(),
                2 => lr.union(&CompactSet::point(lr.max() + 1.0)),
                _ => CompactSet::point(lr.min()),
            };
            BreakFiber::Declared(fiber)
        })
        .collect();
    PiecewiseMap::new(base.breakpoints().to_vec(), base.pieces().to_vec(), fibers).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hausdorff_is_a_metric(a in arb_set(), b in arb_set(), c in arb_set()) {
        prop_assert_eq!(a.hausdorff(&a), 0.0);
        prop_assert_eq!(a.hausdorff(&b), b.hausdorff(&a));
        prop_assert!(a.hausdorff(&c) <= a.hausdorff(&b) + b.hausdorff(&c) + 1e-12);
    }

    #[test]
    fn hull_contracts_hausdorff(a in arb_set(), b in arb_set()) {
        prop_assert!(a.hull().hausdorff(&b.hull()) <= a.hausdorff(&b) + 1e-12);
    }

    #[test]
    fn excess_vanishes_exactly_on_subsets((a, b) in arb_nested(), c in arb_set()) {
        prop_assert!(contained(&a, &b));
        prop_assert_eq!(a.excess(&b), 0.0);
        prop_assert_eq!(c.excess(&b) == 0.0, contained(&c, &b));
        prop_assert_eq!(b.excess(&c) == 0.0, contained(&b, &c));
    }

    #[test]
    fn hull_is_idempotent_and_monotone((a, b) in arb_nested()) {
        prop_assert_eq!(a.hull().hull(), a.hull());
        prop_assert!(contained(&a.hull(), &b.hull()));
    }

    #[test]
    fn enlargement_characterizes_hausdorff(a in arb_set(), b in arb_set(), delta in 1e-9..1.0f64) {
        let eps = a.hausdorff(&b);
        prop_assert!(b.enlarge(eps + delta).unwrap().covers(&a));
        prop_assert!(a.enlarge(eps + delta).unwrap().covers(&b));
        if eps > 0.0 {
            let short = eps * (1.0 - 1e-6);
            let both = b.enlarge(short).unwrap().covers(&a) && a.enlarge(short).unwrap().covers(&b);
            prop_assert!(!both);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn hausdorff_matches_grid_oracle(a in arb_set(), b in arb_set()) {
        let h = 1e-3;
        prop_assert!((a.hausdorff(&b) - common::grid_hausdorff(&a, &b, h)).abs() <= 2.0 * h);
    }

    #[test]
    fn cluster_on_a_continuous_side_is_the_limit(e in arb_expr(), x0 in -2.0..2.0f64) {
        prop_assume!(!e.oscillates_at(x0));
        let h = 1e-11;
        // slope bound on [x0 - h, x0 + h] worked out by hand, so the sample
        // at distance h pins the limit down to slope * h
        let slope = match &e {
            Expr::Poly(c) => c.iter().enumerate().skip(1).map(|(i, ci)| i as f64 * ci.abs() * 2.1f64.powi(i as i32 - 1)).sum(),
            Expr::SinRecip { amp, k, center, .. } => {
                let d = (x0 - center).abs();
                prop_assume!(d > 1e-3);
                (amp * k).abs() / (d - h).powi(2)
            }
        };
        for (side, s) in [(-1.0, svmap::Side::Left), (1.0, svmap::Side::Right)] {
            let c = e.cluster(x0, s);
            prop_assert!(c.is_singleton());
            let sample = e.eval(x0 + side * h).unwrap();
            prop_assert!((c.min() - sample).abs() <= slope * h + 1e-12, "{} vs {}", c.min(), sample);
        }
    }

    #[test]
    fn derivative_bound_is_a_lipschitz_constant(
        e in arb_expr(), u in -2.0..2.0f64, w in 1e-6..1.0f64, s in 0.0..1.0f64, t in 0.0..1.0f64
    ) {
        let v = u + w;
        if let Some(l) = e.deriv_bound(u, v) {
            let (x, y) = (u + s * w, u + t * w);
            let lhs = (e.eval(x).unwrap() - e.eval(y).unwrap()).abs();
            prop_assert!(lhs <= l * (x - y).abs() * (1.0 + 1e-9) + 1e-12, "{} > {}", lhs, l * (x - y).abs());
        }
    }

    #[test]
    fn printing_then_parsing_is_the_identity(e in arb_expr()) {
        prop_assert_eq!(Expr::parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn set_literals_round_trip(a in arb_set()) {
        prop_assert_eq!(CompactSet::parse(&a.to_string()).unwrap(), a);
    }
}

/// The closure of the values on `(c, c + delta)` is the whole band for every
/// `delta`, so the exact distances are all zero. Samples form a subset of
/// that closure inside the band, so their distance to the band bounds the
/// exact one from above.
#[test]
fn oscillation_samples_fill_the_band() {
    let e = Expr::sin_recip(1.5, 2.0, 0.25, -0.5).unwrap();
    let band = CompactSet::interval(-2.0, 1.0).unwrap();
    for delta in [1e-2, 1e-4, 1e-6] {
        // geometric sampling so every scale of (c, c + delta) is visited
        let n = 200_000;
        let values: Vec<f64> = (1..=n)
            .map(|i| 0.25 + delta * (1e-9f64).powf(i as f64 / n as f64))
            .map(|x| e.eval(x).unwrap())
            .collect();
        let samples = CompactSet::points(values).unwrap();
        assert!(samples.excess(&band) <= 1e-12);
        let d = samples.hausdorff(&band);
        assert!(d <= 1e-3, "delta={delta}: {d}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn classification_lattice(seed in 0u64..1_000_000, choices in prop::collection::vec(any::<u8>(), 1..8)) {
        let f = arbitrary_map(seed, &choices);
        let r = classify(&f);
        prop_assert!(!r.is_minimal_usco || r.is_usco);
        prop_assert!(!r.is_minimal_cusco || r.is_cusco);
        let fibers: Vec<CompactSet> = (0..f.breakpoints().len()).filter_map(|i| f.breakpoint_fiber(i)).collect();
        let convex = fibers.iter().all(CompactSet::is_convex);
        prop_assert!(!r.is_cusco || convex);
        prop_assert_eq!(r.is_minimal_usco && r.is_minimal_cusco, r.is_minimal_usco && convex);
    }

    #[test]
    fn closure_is_idempotent(seed in 0u64..1_000_000, choices in prop::collection::vec(any::<u8>(), 1..8)) {
        let f = arbitrary_map(seed, &choices);
        let once = f.graph_closure();
        prop_assert!(once.map_equal(&once.graph_closure(), 0.0).unwrap());
        prop_assert!(classify(&once).is_usco);
    }

    #[test]
    fn phi_of_a_minimal_usco_is_a_minimal_cusco(seed in 0u64..1_000_000) {
        let g = phi(&mu(seed)).unwrap();
        prop_assert!(classify(&g).is_minimal_cusco);
    }

    #[test]
    fn phi_fixes_minimal_uscos_with_convex_fibers(seed in 0u64..1_000_000) {
        let f = mu(seed);
        let convex = (0..f.breakpoints().len()).filter_map(|i| f.breakpoint_fiber(i)).all(|s| s.is_convex());
        if convex {
            prop_assert!(phi(&f).unwrap().map_equal(&f, 0.0).unwrap());
        }
        let g = phi(&f).unwrap();
        prop_assert!(g.selection(SelectionPolicy::Mid).is_single_valued());
    }

    #[test]
    fn minimal_uscos_are_single_valued_off_breakpoints(seed in 0u64..1_000_000, x in -1.0..1.0f64) {
        let f = mu(seed);
        prop_assume!(!f.breakpoints().contains(&x));
        prop_assert!(f.fiber(x).unwrap().is_singleton());
    }

    #[test]
    fn metric_monotonicity(
        seed in 0u64..1_000_000, u in -1.0..1.0f64, w in 0.0..1.0f64, s in prop::collection::vec(0.0..1.0f64, 1..5)
    ) {
        let (f, g) = (mu(2 * seed), mu(2 * seed + 1));
        let v = (u + w).min(1.0);
        let xs: Vec<f64> = s.iter().map(|t| u + t * (v - u)).collect();
        let tol = 1e-6;
        let p = distance(&f, &g, &MapMetric::Pointwise(xs), tol).unwrap();
        let k = distance(&f, &g, &MapMetric::UniformOnCompact(u, v), tol).unwrap();
        let all = distance(&f, &g, &MapMetric::Uniform, tol).unwrap();
        prop_assert_eq!(p.lo, p.hi);
        prop_assert!(p.hi <= k.hi, "{} > {}", p, k);
        prop_assert!(k.lo <= all.hi, "{} > {}", k, all);
        prop_assert!(k.width() <= tol * (1.0 + 1e-9) && all.width() <= tol * (1.0 + 1e-9));
    }

    #[test]
    fn uniform_distance_is_a_metric(seed in 0u64..1_000_000) {
        let (f, g, h) = (mu(3 * seed), mu(3 * seed + 1), mu(3 * seed + 2));
        let tol = 1e-6;
        let d = |a: &PiecewiseMap, b: &PiecewiseMap| distance(a, b, &MapMetric::Uniform, tol).unwrap();
        prop_assert_eq!(d(&f, &f).lo, 0.0);
        let (fg, gf) = (d(&f, &g), d(&g, &f));
        prop_assert!(fg.lo <= gf.hi && gf.lo <= fg.hi);
        prop_assert!(d(&f, &h).lo <= fg.hi + d(&g, &h).hi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn graph_distance_is_symmetric_and_vanishes_on_equal_maps(seed in 0u64..1_000_000) {
        let (f, g) = (mu(2 * seed), mu(2 * seed + 1));
        let tol = 1e-2;
        let same = distance(&f, &f, &MapMetric::GraphHausdorff, tol).unwrap();
        prop_assert!(same.lo == 0.0 && same.hi <= tol);
        let (fg, gf) = (
            distance(&f, &g, &MapMetric::GraphHausdorff, tol).unwrap(),
            distance(&g, &f, &MapMetric::GraphHausdorff, tol).unwrap(),
        );
        prop_assert!((fg.lo - gf.lo).abs() <= tol, "{} vs {}", fg, gf);
    }
}

#[test]
fn five_hundred_random_minimal_uscos_recover_from_selections() {
    for seed in 0..500 {
        let f = mu(100_000 + seed);
        assert!(classify(&f).is_minimal_usco, "seed {seed}");
        for p in SelectionPolicy::ALL {
            assert!(f.selection(p).graph_closure().map_equal(&f, 1e-12).unwrap(), "seed {seed}, {p:?}");
        }
    }
}

#[test]
fn generators_are_deterministic() {
    let p = RandomMapParams::default();
    for seed in [0, 1, 77, u64::MAX] {
        assert_eq!(random_minimal_usco(seed, p).unwrap(), random_minimal_usco(seed, p).unwrap());
        assert_eq!(
            svmap::corpus::random_compact_set(seed, 4).unwrap(),
            svmap::corpus::random_compact_set(seed, 4).unwrap()
        );
    }
}
