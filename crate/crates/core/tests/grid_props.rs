use nlrigid::{Hyperplane, IndicatorGrid, Side};
use proptest::prelude::*;

const H: f64 = 1.0 / 32.0;

fn blob() -> impl Strategy<Value = IndicatorGrid> {
    prop::collection::vec(((-0.5f64..0.5), (-0.5f64..0.5), (0.15f64..0.6)), 1..4).prop_map(|disks| {
        IndicatorGrid::from_fn(vec![-1.25, -1.25], H, vec![80, 80], |p| {
            disks.iter().any(|(x, y, r)| (p[0] - x).powi(2) + (p[1] - y).powi(2) <= r * r)
        })
        .unwrap()
    })
}

fn plane() -> impl Strategy<Value = Hyperplane> {
    (0.0f64..std::f64::consts::TAU, -0.4f64..0.4)
        .prop_map(|(th, t)| Hyperplane::new(&[th.cos(), th.sin()], t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflection_is_an_involution_up_to_one_layer(g in blob(), p in plane()) {
        let back = g.reflect(&p).reflect(&p);
        let layer = g.essential_boundary().unwrap().len() as f64 * g.cell_volume();
        prop_assert!(back.symmetric_difference_measure(&g) <= layer);
    }

    #[test]
    fn clipping_partitions_the_set(g in blob(), p in plane()) {
        let minus = g.clip_halfspace(&p, Side::Minus);
        let plus = g.clip_halfspace(&p, Side::Plus);
        prop_assert_eq!(minus.occupied_count() + plus.occupied_count(), g.occupied_count());
        prop_assert!(minus.occupied().all(|i| !plus.get(i)));
        // ties sit on the minus side
        for i in plus.occupied() {
            prop_assert!(p.signed_distance(&g.center(i)) > 0.0);
        }
    }

    #[test]
    fn measure_is_additive(g in blob(), p in plane()) {
        let minus = g.clip_halfspace(&p, Side::Minus);
        let plus = g.clip_halfspace(&p, Side::Plus);
        prop_assert_eq!(minus.measure() + plus.measure(), g.measure());
    }

    #[test]
    fn boundary_of_a_disk_hugs_the_circle(cx in -0.3f64..0.3, cy in -0.3f64..0.3, r in 0.3f64..0.8) {
        let g = IndicatorGrid::from_balls(&[vec![cx, cy]], r, H).unwrap();
        let b = g.essential_boundary().unwrap();
        for p in b.points() {
            let dist = ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt();
            prop_assert!((dist - r).abs() <= 2.0 * H);
        }
        // and every analytic boundary point has a sample nearby
        for k in 0..64 {
            let th = k as f64 / 64.0 * std::f64::consts::TAU;
            let q = [cx + r * th.cos(), cy + r * th.sin()];
            let near = b.points().map(|p| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()).fold(f64::INFINITY, f64::min);
            prop_assert!(near <= 2.0 * H);
        }
    }

    #[test]
    fn boundary_of_a_square_hugs_its_sides(a in 0.2f64..0.9) {
        let g = IndicatorGrid::from_fn(vec![-1.25, -1.25], H, vec![80, 80], |p| p[0].abs() < a && p[1].abs() < a).unwrap();
        for p in g.essential_boundary().unwrap().points() {
            let inside = (a - p[0].abs()).min(a - p[1].abs());
            let outside = (p[0].abs() - a).max(0.0).hypot((p[1].abs() - a).max(0.0));
            let dist = if inside > 0.0 { inside } else { outside };
            prop_assert!(dist <= 2.0 * H);
        }
    }
}
