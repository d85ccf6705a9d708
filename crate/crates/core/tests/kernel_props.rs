use nlrigid::RadialKernel;
use proptest::prelude::*;

/// Strictly decreasing positive levels on increasing radii.
fn step_kernel() -> impl Strategy<Value = RadialKernel> {
    prop::collection::vec((1u32..8, 1u32..8), 1..6).prop_map(|steps| {
        let n = steps.len();
        let mut levels = Vec::with_capacity(n);
        let mut radii = Vec::with_capacity(n);
        let (mut level, mut radius) = (0.0, 0.0);
        for (dl, _) in steps.iter().rev() {
            level += *dl as f64 * 0.5;
            levels.push(level);
        }
        levels.reverse();
        for (_, dr) in &steps {
            radius += *dr as f64 * 0.25;
            radii.push(radius);
        }
        RadialKernel::step(&levels, &radii, 2).unwrap()
    })
}

fn kernel() -> impl Strategy<Value = RadialKernel> {
    prop_oneof![
        step_kernel(),
        (0.05f64..1.95).prop_map(|a| RadialKernel::power(a, 2).unwrap()),
        (0.1f64..3.0).prop_map(|r| RadialKernel::indicator(r, 2).unwrap()),
    ]
}

proptest! {
    #[test]
    fn distribution_is_non_increasing(k in kernel(), a in 0.0f64..10.0, b in 0.0f64..10.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(k.distribution(lo).unwrap() >= k.distribution(hi).unwrap());
    }

    #[test]
    fn pseudo_inverse_round_trip(k in kernel(), u in 0.001f64..0.999) {
        let top = k.support_radius().min(10.0);
        let t = u * top;
        // continuity points of a step profile stay away from its radii
        if let Some((_, radii)) = k.steps() {
            prop_assume!(radii.iter().all(|r| (r - t).abs() > 1e-9));
        }
        let s = k.s_of_lambda(t).unwrap();
        let phi = k.eval(t).unwrap();
        prop_assert!((s - phi).abs() <= 1e-9 * phi.max(1.0), "s(lambda) {s} vs phi {phi}");
    }

    #[test]
    fn jumps_are_plateau_lengths(k in step_kernel()) {
        let (levels, radii) = k.steps().unwrap();
        let f = k.distribution_function();
        for (i, &a) in levels.iter().enumerate() {
            let plateau = radii[i] - if i == 0 { 0.0 } else { radii[i - 1] };
            prop_assert_eq!(f.jump(a).unwrap(), plateau);
        }
    }

    #[test]
    fn sigma_characterizes_reach(k in kernel(), diam in 0.01f64..6.0, s in 0.0f64..20.0) {
        let sigma = k.sigma_level(diam).unwrap();
        prop_assert_eq!(k.distribution(s).unwrap() > diam, s < sigma);
    }

    #[test]
    fn eta_is_where_level_preimage_starts(k in step_kernel(), frac in 0.05f64..0.95) {
        // numeric measure of {s : 0 < r(s) < λ} on a fine level grid
        let eta = k.eta();
        let top = k.steps().unwrap().0[0];
        let preimage = |lambda: f64| {
            let n = 20_000;
            (0..n)
                .filter(|&i| {
                    let s = (i as f64 + 0.5) / n as f64 * top * 1.5;
                    let r = k.distribution(s).unwrap();
                    r > 0.0 && r < lambda
                })
                .count() as f64
                / n as f64
                * top
                * 1.5
        };
        prop_assert_eq!(preimage(frac * eta), 0.0);
        prop_assert!(preimage(eta + frac) > 0.0);
    }
}
