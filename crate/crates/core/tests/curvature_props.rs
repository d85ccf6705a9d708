use nlrigid::curvature::{nondegeneracy_infimum, rasterization_floor, MassEvaluator, NondegOptions};
use nlrigid::{IndicatorGrid, RadialKernel};
use proptest::prelude::*;

const H: f64 = 1.0 / 16.0;

fn step() -> RadialKernel {
    RadialKernel::step(&[3.0, 2.0, 1.0], &[1.0, 2.0, 3.0], 2).unwrap()
}

fn kernel() -> impl Strategy<Value = RadialKernel> {
    prop_oneof![
        Just(step()),
        (0.2f64..1.5).prop_map(|r| RadialKernel::indicator(r, 2).unwrap()),
        (0.1f64..1.5).prop_map(|a| RadialKernel::power(a, 2).unwrap()),
    ]
}

/// A union of disks on a 48² lattice.
fn blob() -> impl Strategy<Value = IndicatorGrid> {
    prop::collection::vec(((0.8f64..2.2), (0.8f64..2.2), (0.3f64..0.7)), 1..4).prop_map(|disks| {
        IndicatorGrid::from_fn(vec![0.0, 0.0], H, vec![48, 48], |p| {
            disks.iter().any(|(x, y, r)| (p[0] - x).powi(2) + (p[1] - y).powi(2) <= r * r)
        })
        .unwrap()
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.2f64..2.8, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn layer_cake_matches_direct_for_steps(g in blob(), pick in any::<prop::sample::Index>()) {
        let k = step();
        let b = g.essential_boundary().unwrap();
        let x = b.point(pick.index(b.len()));
        let e = MassEvaluator::new(&g, &k).unwrap();
        let direct = e.local_mass_direct(x);
        let cake = e.local_mass_layercake(x).unwrap();
        prop_assert!((direct - cake).abs() <= 1e-3 * direct);
    }

    #[test]
    fn mass_grows_with_the_set(g in blob(), extra in prop::collection::vec(0usize..48 * 48, 1..40), x in point(), k in kernel()) {
        let mut bigger = g.clone();
        for i in extra {
            bigger.set(i, true);
        }
        let small = MassEvaluator::new(&g, &k).unwrap().local_mass_direct(&x);
        let large = MassEvaluator::new(&bigger, &k).unwrap().local_mass_direct(&x);
        prop_assert!(large >= small);
    }

    #[test]
    fn whole_cell_translation_is_exact(g in blob(), x in point(), vx in -8i64..8, vy in -8i64..8, k in kernel()) {
        let moved = g.shifted(&[vx, vy]);
        let y = [x[0] + vx as f64 * H, x[1] + vy as f64 * H];
        let a = MassEvaluator::new(&g, &k).unwrap();
        let b = MassEvaluator::new(&moved, &k).unwrap();
        prop_assert_eq!(a.local_mass_direct(&x), b.local_mass_direct(&y));
        if k.is_bounded() {
            prop_assert_eq!(a.local_mass_layercake(&x).unwrap(), b.local_mass_layercake(&y).unwrap());
        }
    }

    #[test]
    fn pair_deviation_is_symmetric(g in blob(), x1 in point(), x2 in point(), k in kernel()) {
        let e = MassEvaluator::new(&g, &k).unwrap();
        prop_assert_eq!(e.pair_deviation(&x1, &x2), e.pair_deviation(&x2, &x1));
        prop_assert_eq!(e.pair_deviation_direct(&x1, &x2), e.pair_deviation_direct(&x2, &x1));
    }

    #[test]
    fn pair_deviation_obeys_the_triangle_inequality(g in blob(), x1 in point(), x2 in point(), x3 in point(), k in kernel()) {
        let e = MassEvaluator::new(&g, &k).unwrap();
        let (a, b, c) = (e.pair_deviation(&x1, &x3), e.pair_deviation(&x1, &x2), e.pair_deviation(&x2, &x3));
        prop_assert!(a <= (b + c) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn small_sets_under_a_plateau_are_degenerate(r in 0.1f64..0.45, cx in 1.0f64..2.0, cy in 1.0f64..2.0) {
        // diameter below η: every kernel ball around the set covers it
        let k = RadialKernel::indicator(1.0, 2).unwrap();
        let g = IndicatorGrid::from_balls(&[vec![cx, cy]], r, H).unwrap();
        let nd = nondegeneracy_infimum(&g, &k, NondegOptions::default()).unwrap();
        prop_assert!(nd.value <= rasterization_floor(&g).unwrap());
    }
}
