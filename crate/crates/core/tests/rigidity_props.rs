use nlrigid::curvature::{criticality_report, NondegOptions};
use nlrigid::rigidity::{ball_constant_oracle, extract_balls_with, RigidityOptions, Verdict};
use nlrigid::{IndicatorGrid, RadialKernel};
use proptest::prelude::*;

const H: f64 = 1.0 / 32.0;

fn options() -> RigidityOptions {
    RigidityOptions { nondeg: NondegOptions { pair_budget: 20_000, seed: 0 }, ..RigidityOptions::default() }
}

fn kernel() -> impl Strategy<Value = RadialKernel> {
    prop_oneof![
        Just(RadialKernel::step(&[3.0, 2.0, 1.0], &[1.0, 2.0, 3.0], 2).unwrap()),
        (0.4f64..1.2).prop_map(|r| RadialKernel::indicator(r, 2).unwrap()),
    ]
}

/// Equal disks in a row, spaced beyond the kernel support.
fn balls() -> impl Strategy<Value = (Vec<Vec<f64>>, f64)> {
    (1usize..3, 0.6f64..1.0, -0.3f64..0.3).prop_map(|(n, r, y)| {
        let centers = (0..n).map(|i| vec![i as f64 * (2.0 * r + 3.5), y]).collect();
        (centers, r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn extraction_conserves_cells_and_radii((centers, r) in balls(), k in kernel()) {
        let set = IndicatorGrid::from_balls(&centers, r, H).unwrap();
        let rep = extract_balls_with(&set, &k, &options()).unwrap();
        let cells: f64 = rep.balls.iter().map(|b| b.measure).sum::<f64>() + rep.residual_measure;
        prop_assert_eq!((cells / set.cell_volume()).round() as usize, set.occupied_count());
        if rep.verdict == Verdict::Pass {
            let lo = rep.balls.iter().map(|b| b.radius).fold(f64::INFINITY, f64::min);
            let hi = rep.balls.iter().map(|b| b.radius).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(hi - lo <= 4.0 * H);
        }
    }

    #[test]
    fn extraction_is_idempotent((centers, r) in balls()) {
        let k = RadialKernel::step(&[3.0, 2.0, 1.0], &[1.0, 2.0, 3.0], 2).unwrap();
        let set = IndicatorGrid::from_balls(&centers, r, H).unwrap();
        let first = extract_balls_with(&set, &k, &options()).unwrap();
        prop_assert_eq!(first.verdict, Verdict::Pass, "{:?}", first.reasons);
        prop_assert_eq!(first.balls.len(), centers.len());
        let redo: Vec<Vec<f64>> = first.balls.iter().map(|b| b.center.clone()).collect();
        let again = IndicatorGrid::from_balls(&redo, first.balls[0].radius, H).unwrap();
        let second = extract_balls_with(&again, &k, &options()).unwrap();
        prop_assert_eq!(second.balls.len(), first.balls.len());
        let mut a: Vec<f64> = first.balls.iter().map(|b| b.radius).collect();
        let mut b: Vec<f64> = second.balls.iter().map(|b| b.radius).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 2.0 * H);
        }
    }
}

#[test]
fn oracle_matches_rasterized_balls_for_every_family() {
    let h = 1.0 / 128.0;
    let disk = IndicatorGrid::from_balls(&[vec![0.0, 0.0]], 1.0, h).unwrap();
    for k in [
        RadialKernel::indicator(0.6, 2).unwrap(),
        RadialKernel::step(&[3.0, 2.0, 1.0], &[1.0, 2.0, 3.0], 2).unwrap(),
        RadialKernel::table(&[(0.5, 4.0), (1.5, 1.0)], 2).unwrap(),
        RadialKernel::power(1.2, 2).unwrap(),
    ] {
        let c = criticality_report(&disk, &k).unwrap().mean;
        let oracle = ball_constant_oracle(&k, 1.0).unwrap();
        assert!((c - oracle).abs() <= 0.02 * oracle, "{:?}: {c} vs {oracle}", k.kind());
    }
}
