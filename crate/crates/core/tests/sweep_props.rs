use nlrigid::moving_planes::{classify_h_contact, decompose, stopping_time, SweepSettings, Sweeper};
use nlrigid::{Hyperplane, IndicatorGrid, RadialKernel};
use proptest::prelude::*;

const H: f64 = 1.0 / 32.0;

fn convex() -> impl Strategy<Value = IndicatorGrid> {
    prop_oneof![
        ((-0.2f64..0.2), (-0.2f64..0.2), (0.4f64..0.9))
            .prop_map(|(x, y, r)| IndicatorGrid::from_balls(&[vec![x, y]], r, H).unwrap()),
        ((0.3f64..0.9), (0.3f64..0.9)).prop_map(|(a, b)| {
            IndicatorGrid::from_fn(vec![-1.125, -1.125], H, vec![72, 72], |p| p[0].abs() < a && p[1].abs() < b).unwrap()
        }),
    ]
}

fn direction() -> impl Strategy<Value = [f64; 2]> {
    (0.0f64..std::f64::consts::TAU).prop_map(|t| [t.cos(), t.sin()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inclusion_fails_monotonically_on_convex_sets(g in convex(), nu in direction()) {
        let sw = Sweeper::new(&g, &SweepSettings::default()).unwrap();
        let mut failed_at = None;
        for i in 0..48 {
            let t = -1.2 + i as f64 * 0.05;
            let holds = sw.analyze(&Hyperplane::new(&nu, t).unwrap()).inclusion.holds;
            if let Some(t0) = failed_at {
                prop_assert!(!holds, "inclusion failed at {t0} and held again at {t}");
            } else if !holds {
                failed_at = Some(t);
            }
        }
    }

    #[test]
    fn disk_stopping_time_projects_the_center(x in -0.2f64..0.2, y in -0.2f64..0.2, nu in direction()) {
        let g = IndicatorGrid::from_balls(&[vec![x, y]], 0.8, H).unwrap();
        let rep = stopping_time(&g, &nu, &SweepSettings::default()).unwrap();
        prop_assert!((rep.stopping_time - (x * nu[0] + y * nu[1])).abs() <= 2.0 * H);
    }

    #[test]
    fn decomposition_partitions_the_set(g in convex(), nu in direction()) {
        let k = RadialKernel::indicator(0.5, 2).unwrap();
        let rep = stopping_time(&g, &nu, &SweepSettings::default()).unwrap();
        let dec = decompose(&g, &rep, &k).unwrap();
        prop_assert_eq!(dec.symmetric.occupied_count() + dec.nonsymmetric.occupied_count(), g.occupied_count());
        prop_assert!(dec.symmetric.occupied().all(|i| g.get(i) && !dec.nonsymmetric.get(i)));
    }

    #[test]
    fn h_contact_is_symmetric(gap in 0.1f64..1.5, r in 0.3f64..0.6) {
        let k = RadialKernel::indicator(0.8, 2).unwrap();
        let c = r + 0.5 * gap;
        let g = IndicatorGrid::from_balls(&[vec![0.0, -c], vec![0.0, c]], r, H).unwrap();
        let rep = stopping_time(&g, &[1.0, 0.0], &SweepSettings::default()).unwrap();
        let dec = decompose(&g, &rep, &k).unwrap();
        let graph = classify_h_contact(&dec.components, &k).unwrap();
        for i in 0..graph.adjacency.len() {
            for j in 0..graph.adjacency.len() {
                prop_assert_eq!(graph.adjacency[i][j], graph.adjacency[j][i]);
            }
        }
    }
}
