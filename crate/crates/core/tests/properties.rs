use boxdim_core::chains::{quotient_distance, CosetSpace, Lattice, SubgroupChain, DEFAULT_INDEX_CAP};
use boxdim_core::dynamics::{
    build_odometer, build_towers, folner_set, interval_growth_certificate, marker_search, odometer_lattice,
    symmetric_difference, verify_towers, FiniteAction,
};
use boxdim_core::group::{word_distance, Element, GroupSpec};
use boxdim_core::json::Frac;
use boxdim_core::scalar::ratio;
use boxdim_core::{Rational, Towers};
use proptest::prelude::*;

fn u3() -> GroupSpec {
    GroupSpec::preset("u3").unwrap()
}

fn small(dim: usize, r: i64) -> impl Strategy<Value = Element> {
    proptest::collection::vec(-r..=r, dim).prop_map(|v| Element::from_i64s(&v))
}

fn cyclic(n: i64) -> FiniteAction {
    let z = GroupSpec::free_abelian(1).unwrap();
    odometer_lattice(&z, &Lattice::from_i64s(&z, &[n]).unwrap(), DEFAULT_INDEX_CAP).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heisenberg_group_laws(a in small(3, 50), b in small(3, 50), c in small(3, 50)) {
        let g = u3();
        prop_assert_eq!(g.multiply(&g.multiply(&a, &b), &c), g.multiply(&a, &g.multiply(&b, &c)));
        prop_assert!(g.multiply(&a, &g.invert(&a)).is_identity());
        prop_assert!(g.multiply(&g.invert(&a), &a).is_identity());
        prop_assert_eq!(g.invert(&g.multiply(&a, &b)), g.multiply(&g.invert(&b), &g.invert(&a)));
    }

    #[test]
    fn metric_is_right_invariant(a in small(3, 2), b in small(3, 2), x in small(3, 2)) {
        let g = u3();
        let d = word_distance(&g, &a, &b, 1 << 20).unwrap();
        let dx = word_distance(&g, &g.multiply(&a, &x), &g.multiply(&b, &x), 1 << 20).unwrap();
        prop_assert_eq!(d, dx);
        prop_assert_eq!(d, word_distance(&g, &b, &a, 1 << 20).unwrap());
    }

    #[test]
    fn quotient_distance_is_dominated(d1 in 1i64..9, d2 in 1i64..9, x in small(2, 12), y in small(2, 12)) {
        let g = GroupSpec::free_abelian(2).unwrap();
        let cs = CosetSpace::new(&g, &Lattice::from_i64s(&g, &[d1, d2]).unwrap(), DEFAULT_INDEX_CAP).unwrap();
        let q = quotient_distance(&cs, &x, &y).unwrap();
        prop_assert!(q <= word_distance(&g, &x, &y, 1 << 20).unwrap());
        prop_assert_eq!(q, quotient_distance(&cs, &y, &x).unwrap());
        // oracle for ℤ²: sum of the circular distances
        let circ = |a: i64, b: i64, d: i64| { let t = (a - b).rem_euclid(d); t.min(d - t) };
        let (xs, ys) = (x.0.iter().map(|v| i64::try_from(v).unwrap()).collect::<Vec<_>>(),
                        y.0.iter().map(|v| i64::try_from(v).unwrap()).collect::<Vec<_>>());
        prop_assert_eq!(q as i64, circ(xs[0], ys[0], d1) + circ(xs[1], ys[1], d2));
    }

    #[test]
    fn canonical_representatives(x in small(3, 40), stage in 1usize..4) {
        let chain = SubgroupChain::preset("u3", "congruence", 1, 3).unwrap();
        let g = chain.group().clone();
        let h = chain.stage(stage).unwrap();
        let c = h.canonical(&g, &x);
        prop_assert!(h.contains(&g.multiply(&g.invert(&x), &c)));
        prop_assert_eq!(h.canonical(&g, &c), c);
    }

    #[test]
    fn odometer_is_an_action(a in small(3, 6), b in small(3, 6), seed in 0usize..64) {
        let chain = SubgroupChain::preset("u3", "congruence", 1, 2).unwrap();
        let act = build_odometer(&chain, 2, DEFAULT_INDEX_CAP).unwrap();
        let g = &act.group;
        let x = seed % act.size();
        let lhs = act.act(&a, act.act(&b, x).unwrap()).unwrap();
        prop_assert_eq!(lhs, act.act(&g.multiply(&a, &b), x).unwrap());
    }

    #[test]
    fn greedy_markers_cover_free_cycles(n in 1i64..80, k in 1i64..20, seed in 0u64..1000) {
        prop_assume!(k <= n);
        let f: Vec<Element> = (0..k).map(|i| Element::from_i64s(&[i])).collect();
        let m = marker_search(&cyclic(n), &f, &[], seed).unwrap();
        prop_assert!(m.pass(), "{:?}", m.checks);
    }

    #[test]
    fn interval_certificates_hold(w in 1i64..40) {
        let z = GroupSpec::free_abelian(1).unwrap();
        let c = interval_growth_certificate(&z, w).unwrap();
        prop_assert!(c.check.pass);
        prop_assert!(c.translators.len() <= 3);
    }

    #[test]
    fn folner_boxes_are_minimal(num in 1i64..8, den in 1i64..8, m in 1usize..3) {
        let g = GroupSpec::free_abelian(m).unwrap();
        let eps: Rational = ratio(num, den);
        let j = folner_set(&g, g.generators(), &eps, 1 << 20).unwrap();
        prop_assert!(j.ratio() <= eps);
        if j.size_param > 1 {
            // the box one smaller is not good enough: |∂| = 2n^{m-1}, |J| = n^m
            let n = i64::from(j.size_param) - 1;
            prop_assert!(ratio::<Rational>(2, n) > eps);
        }
        let any = &g.generators()[0];
        prop_assert_eq!(symmetric_difference(&g, &j.elements, any), j.boundary[0]);
    }

    #[test]
    fn tower_defects_survive_relabelling(n in 2i64..30, seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let chain = SubgroupChain::custom(
            GroupSpec::free_abelian(1).unwrap(),
            vec![vec![1.into()], vec![n.into()], vec![(2 * n).into()]],
        ).unwrap();
        let a = build_odometer(&chain, 2, DEFAULT_INDEX_CAP).unwrap();
        let ts: Towers = build_towers(&a, 1).unwrap();
        let mut sigma: Vec<usize> = (0..a.size()).collect();
        sigma.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let before = verify_towers(&ts, &[], a.group.generators()).unwrap();
        let moved = ts.relabel(&sigma).unwrap();
        let after = verify_towers(&moved, &[], moved.action.group.generators()).unwrap();
        prop_assert!(before.pass() && after.pass());
        prop_assert_eq!(before.eps, after.eps);
    }

    #[test]
    fn tower_perturbation_is_bounded(num in 0i64..=16, x in 0usize..12) {
        let chain = SubgroupChain::preset("z", "factorial", 1, 3).unwrap();
        let a = build_odometer(&chain, 3, DEFAULT_INDEX_CAP).unwrap();
        let ts: Towers = build_towers(&a, 2).unwrap();
        let delta: Rational = ratio(num, 16);
        let old = ts.functions[0][0][x % a.size()].clone();
        let p = ts.perturbed(0, 0, x % a.size(), old.clone() + delta.clone());
        let rep = verify_towers(&p, &[], a.group.generators()).unwrap();
        for c in &rep.checks {
            let v: Frac = serde_json::from_value(c.measured_value.clone().unwrap()).unwrap();
            prop_assert!(v.to_rational().unwrap() <= delta, "{}", c.name);
        }
    }
}
