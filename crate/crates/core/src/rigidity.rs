//! Ball oracles and the extraction of equal balls from critical sets.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::curvature::{
    criticality_report, nondegeneracy_floor, nondegeneracy_infimum, rasterization_floor, NondegOptions,
};
use crate::error::{Error, Result};
use crate::grid::{dist2, IndicatorGrid};
use crate::kernel::{Profile, RadialKernel};
use crate::moving_planes::{classify_h_contact, decompose, SweepSettings, Sweeper};
use crate::quadrature::{graded_breaks, GaussLegendre};

/// Area of the intersection of two disks of radii `r1`, `r2` whose centers
/// are `dist` apart.
pub fn lens_area(r1: f64, r2: f64, dist: f64) -> f64 {
    if dist >= r1 + r2 {
        return 0.0;
    }
    let m = r1.min(r2);
    if dist <= (r1 - r2).abs() {
        return PI * m * m;
    }
    // Sum of two circular segments cut by the common chord.
    let x1 = (dist * dist + r1 * r1 - r2 * r2) / (2.0 * dist);
    let k = ((-dist + r1 + r2) * (dist + r1 - r2) * (dist - r1 + r2) * (dist + r1 + r2)).max(0.0);
    let y = k.sqrt() / (2.0 * dist);
    let segment = |r: f64, x: f64| 0.5 * r * r * u_minus_sin(2.0 * y.atan2(x));
    segment(r1, x1) + segment(r2, dist - x1)
}

/// `u − sin u` without cancellation near zero.
fn u_minus_sin(u: f64) -> f64 {
    if u.abs() < 0.1 {
        let u2 = u * u;
        u * u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 * (1.0 - u2 / 72.0)))
    } else {
        u - u.sin()
    }
}

/// Volume of the intersection of two balls in ℝ³.
pub fn lens_volume(r1: f64, r2: f64, dist: f64) -> f64 {
    if dist >= r1 + r2 {
        return 0.0;
    }
    let m = r1.min(r2);
    if dist <= (r1 - r2).abs() {
        return 4.0 / 3.0 * PI * m.powi(3);
    }
    PI * (r1 + r2 - dist).powi(2)
        * (dist * dist + 2.0 * dist * (r1 + r2) - 3.0 * (r1 - r2).powi(2))
        / (12.0 * dist)
}

fn overlap(d: usize, big: f64, r: f64) -> Result<f64> {
    Ok(match d {
        1 => r.min(2.0 * big),
        2 => lens_area(big, r, big),
        3 => lens_volume(big, r, big),
        _ => return Err(Error::UnsupportedDimension(d)),
    })
}

/// The constant `∫_{B_R} h(x − y) dy` for `x` on the sphere `∂B_R`.
pub fn ball_constant_oracle(kernel: &RadialKernel, radius: f64) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("ball radius must be positive, got {radius}")));
    }
    let d = kernel.dim();
    match kernel.profile() {
        Profile::Piecewise { levels, radii } => {
            let mut total = 0.0;
            for (i, (&l, &r)) in levels.iter().zip(radii).enumerate() {
                let next = levels.get(i + 1).copied().unwrap_or(0.0);
                total += (l - next) * overlap(d, radius, r)?;
            }
            Ok(total)
        }
        Profile::Power { alpha } => {
            let a = *alpha;
            let two_r = 2.0 * radius;
            // Measure of the sphere of radius t about x that lies inside B_R.
            let slice: Box<dyn Fn(f64) -> f64> = match d {
                1 => Box::new(|_| 1.0),
                2 => Box::new(move |t: f64| 2.0 * t * (t / two_r).clamp(-1.0, 1.0).acos()),
                3 => Box::new(move |t: f64| 2.0 * PI * t * t * (1.0 - t / two_r)),
                _ => return Err(Error::UnsupportedDimension(d)),
            };
            let gl = GaussLegendre::new(16);
            let breaks = graded_breaks(0.0, two_r, 60, 32);
            Ok(gl.integrate_panels(&|t: f64| if t > 0.0 { t.powf(-a) * slice(t) } else { 0.0 }, &breaks))
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FittedBall {
    pub center: Vec<f64>,
    pub radius: f64,
    /// Measure of the cells removed with this ball.
    pub measure: f64,
    pub fit_rms: f64,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not applicable",
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Thresholds {
    pub spacing: f64,
    pub criticality_deviation_max: f64,
    pub nondegeneracy_floor: f64,
    pub rasterization_floor: f64,
    pub fit_rms_max: f64,
    pub radius_spread_max: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RigidityReport {
    pub balls: Vec<FittedBall>,
    pub residual_measure: f64,
    pub eta: f64,
    pub r_sigma: f64,
    pub criticality_mean: f64,
    pub criticality_deviation: f64,
    pub calibration_deviation: f64,
    pub nondegeneracy: f64,
    pub thresholds: Thresholds,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

impl RigidityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone)]
pub struct RigidityOptions {
    pub max_balls: usize,
    pub sweep: SweepSettings,
    pub nondeg: NondegOptions,
    /// Allowed ratio of the set's criticality deviation to the deviation of
    /// a rasterized ball of comparable size.
    pub criticality_factor: f64,
    pub fit_rms: f64,
}

impl Default for RigidityOptions {
    fn default() -> Self {
        Self {
            max_balls: 64,
            sweep: SweepSettings::default(),
            nondeg: NondegOptions::default(),
            criticality_factor: 3.0,
            fit_rms: 3.0,
        }
    }
}

/// Largest relative deviation of the ball constant for a rasterized ball of
/// the given radius centered on a lattice corner.
pub fn calibration_deviation(kernel: &RadialKernel, radius: f64, spacing: f64) -> Result<f64> {
    let ball = IndicatorGrid::from_balls(&[vec![0.0; kernel.dim()]], radius, spacing)?;
    Ok(criticality_report(&ball, kernel)?.max_deviation)
}

/// Least-squares sphere through `points`: algebraic fit, then Gauss–Newton
/// on the geometric residuals. Returns center, radius and RMS residual.
pub fn fit_sphere(points: &[&[f64]]) -> Result<(Vec<f64>, f64, f64)> {
    let d = points.first().map_or(0, |p| p.len());
    if points.len() < d + 1 {
        return Err(Error::InvalidArgument("too few points for a sphere fit".into()));
    }
    let n = points.len();
    let a = DMatrix::from_fn(n, d + 1, |i, k| if k < d { 2.0 * points[i][k] } else { 1.0 });
    let b = DVector::from_fn(n, |i, _| points[i].iter().map(|v| v * v).sum());
    let sol = a.svd(true, true).solve(&b, 1e-12).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut c: Vec<f64> = (0..d).map(|k| sol[k]).collect();
    let mut r = (sol[d] + c.iter().map(|v| v * v).sum::<f64>()).max(0.0).sqrt();
    for _ in 0..20 {
        let mut jac = DMatrix::zeros(n, d + 1);
        let mut res = DVector::zeros(n);
        for (i, p) in points.iter().enumerate() {
            let dist = dist2(p, &c).sqrt().max(1e-300);
            for k in 0..d {
                jac[(i, k)] = -(p[k] - c[k]) / dist;
            }
            jac[(i, d)] = -1.0;
            res[i] = dist - r;
        }
        let Ok(delta) = jac.svd(true, true).solve(&(-res), 1e-12) else { break };
        for k in 0..d {
            c[k] += delta[k];
        }
        r += delta[d];
        if delta.norm() < 1e-12 * r.max(1.0) {
            break;
        }
    }
    let rms = (points.iter().map(|p| (dist2(p, &c).sqrt() - r).powi(2)).sum::<f64>() / n as f64).sqrt();
    Ok((c, r, rms))
}

/// Axes then the main diagonal.
pub fn direction_fan(d: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = (0..d)
        .map(|k| {
            let mut e = vec![0.0; d];
            e[k] = 1.0;
            e
        })
        .collect();
    out.push(vec![1.0 / (d as f64).sqrt(); d]);
    out
}

/// Checks `R > η/2` for every ball and `dist(B_i, B_j) ≥ r(σ)` for every
/// pair, with `2h` slack. Returns the failures.
pub fn check_theorem_bounds(report: &RigidityReport, kernel: &RadialKernel, diam: f64) -> Result<Vec<String>> {
    let slack = report.thresholds.slack;
    let eta = kernel.eta();
    let r_sigma = kernel.distribution(kernel.sigma_level(diam)?)?;
    let mut reasons = Vec::new();
    for (i, b) in report.balls.iter().enumerate() {
        if b.radius <= 0.5 * eta - slack {
            reasons.push(format!("ball {i}: radius {:.6} not above eta/2 = {:.6}", b.radius, 0.5 * eta));
        }
    }
    for i in 0..report.balls.len() {
        for j in i + 1..report.balls.len() {
            let (a, b) = (&report.balls[i], &report.balls[j]);
            let gap = dist2(&a.center, &b.center).sqrt() - a.radius - b.radius;
            if gap < r_sigma - slack {
                reasons.push(format!("balls {i},{j}: gap {gap:.6} below r(sigma) = {r_sigma:.6}"));
            }
        }
    }
    Ok(reasons)
}

/// Runs the extraction loop: sweep, decompose, fit and remove an isolated
/// symmetric component, until only a rasterization-sized residue is left.
pub fn extract_balls(set: &IndicatorGrid, kernel: &RadialKernel) -> Result<RigidityReport> {
    extract_balls_with(set, kernel, &RigidityOptions::default())
}

pub fn extract_balls_with(set: &IndicatorGrid, kernel: &RadialKernel, opts: &RigidityOptions) -> Result<RigidityReport> {
    if set.dim() != kernel.dim() {
        return Err(Error::InvalidArgument("set and kernel dimensions differ".into()));
    }
    let set = set.with_margin();
    let h = set.spacing();
    let d = set.dim();
    let diam = set.diameter()?.max(h);
    let r_sigma = kernel.distribution(kernel.sigma_level(diam)?)?;
    let floor = rasterization_floor(&set)?;

    let crit = criticality_report(&set, kernel)?;
    let largest = set.component_grids().into_iter().map(|c| c.measure()).fold(0.0, f64::max);
    let eq_radius = (largest / crate::kernel::unit_ball_volume(d)).powf(1.0 / d as f64);
    let calibration = calibration_deviation(kernel, eq_radius, h)?;
    let crit_max = opts.criticality_factor * calibration;
    let nd_floor = nondegeneracy_floor(kernel, h);
    let nondeg = nondegeneracy_infimum(&set, kernel, opts.nondeg)?.value;

    let mut report = RigidityReport {
        balls: Vec::new(),
        residual_measure: set.measure(),
        eta: kernel.eta(),
        r_sigma,
        criticality_mean: crit.mean,
        criticality_deviation: crit.max_deviation,
        calibration_deviation: calibration,
        nondegeneracy: nondeg,
        thresholds: Thresholds {
            spacing: h,
            criticality_deviation_max: crit_max,
            nondegeneracy_floor: nd_floor,
            rasterization_floor: floor,
            fit_rms_max: opts.fit_rms * h,
            radius_spread_max: 4.0 * h,
            slack: 2.0 * h,
        },
        verdict: Verdict::NotApplicable,
        reasons: Vec::new(),
    };
    let integrability = kernel.check_improved_integrability();
    if !integrability.converges {
        report.reasons.push("not applicable: kernel fails improved integrability".into());
    }
    if crit.max_deviation > crit_max {
        report.reasons.push(format!(
            "not applicable: criticality deviation {:.6} exceeds {:.6}",
            crit.max_deviation, crit_max
        ));
    }
    if nondeg <= nd_floor {
        report.reasons.push(format!("not applicable: nondegeneracy {nondeg:.6e} not above floor {nd_floor:.6e}"));
    }
    if !report.reasons.is_empty() {
        return Ok(report);
    }

    let mut remaining = set.clone();
    let mut failures = Vec::new();
    while remaining.measure() > floor && report.balls.len() < opts.max_balls {
        let component = match pick_component(&remaining, kernel, opts, floor)? {
            Ok(c) => c,
            Err(why) => {
                failures.push(why);
                break;
            }
        };
        let boundary = component.essential_boundary()?;
        let pts: Vec<&[f64]> = boundary.points().collect();
        let (center, radius, rms) = fit_sphere(&pts)?;
        if rms > opts.fit_rms * h {
            failures.push(format!(
                "component of measure {:.6} is not a ball: fit rms {rms:.6} exceeds {:.6}",
                component.measure(),
                opts.fit_rms * h
            ));
            break;
        }
        let reach2 = (radius + h).powi(2);
        let removed = remaining.masked(|i| component.get(i) || dist2(&remaining.center(i), &center) <= reach2);
        remaining = remaining.masked(|i| !removed.get(i));
        report.balls.push(FittedBall { center, radius, measure: removed.measure(), fit_rms: rms });
        if remaining.measure() > floor {
            let dev = criticality_report(&remaining, kernel)?.max_deviation;
            if dev > crit_max {
                failures.push(format!("remainder is not critical: deviation {dev:.6} exceeds {crit_max:.6}"));
                break;
            }
        }
    }
    report.residual_measure = remaining.measure();
    if report.residual_measure > floor {
        failures.push(format!("residual measure {:.6} exceeds floor {floor:.6}", report.residual_measure));
    }
    if let (Some(lo), Some(hi)) = (
        report.balls.iter().map(|b| b.radius).reduce(f64::min),
        report.balls.iter().map(|b| b.radius).reduce(f64::max),
    ) {
        if hi - lo > 4.0 * h {
            failures.push(format!("radii differ by {:.6}", hi - lo));
        }
    }
    if report.balls.is_empty() {
        failures.push("no ball extracted".into());
    } else {
        failures.extend(check_theorem_bounds(&report, kernel, diam)?);
    }
    report.verdict = if failures.is_empty() { Verdict::Pass } else { Verdict::Fail };
    report.reasons = failures;
    Ok(report)
}

/// Finds an h-isolated symmetric component that is consistent across the
/// direction fan. The inner `Err` explains why none was found.
fn pick_component(
    remaining: &IndicatorGrid,
    kernel: &RadialKernel,
    opts: &RigidityOptions,
    floor: f64,
) -> Result<std::result::Result<IndicatorGrid, String>> {
    let fan = direction_fan(remaining.dim());
    let sweeper = Sweeper::new(remaining, &opts.sweep)?;
    let mut last = String::from("no direction produced a symmetric component");
    for (k, nu) in fan.iter().enumerate() {
        let report = match sweeper.stopping_time(nu) {
            Ok(r) => r,
            Err(Error::DegenerateStart { offset, .. }) => {
                last = format!("sweep along {nu:?} degenerate at offset {offset:.6}");
                continue;
            }
            Err(e) => return Err(e),
        };
        let dec = decompose(remaining, &report, kernel)?;
        if dec.components.is_empty() {
            continue;
        }
        let graph = classify_h_contact(&dec.components, kernel)?;
        let mut order: Vec<usize> = (0..dec.components.len())
            .filter(|&i| graph.is_isolated(i) && dec.components[i].cells.measure() > floor)
            .collect();
        order.sort_by(|&a, &b| dec.components[b].cells.measure().total_cmp(&dec.components[a].cells.measure()));
        for i in order {
            let cells = &dec.components[i].cells;
            if consistent(cells, &fan, k, &opts.sweep, kernel)? {
                return Ok(Ok(cells.clone()));
            }
            last = format!("component of measure {:.6} is not symmetric in every direction", cells.measure());
        }
    }
    Ok(Err(last))
}

fn consistent(
    cells: &IndicatorGrid,
    fan: &[Vec<f64>],
    skip: usize,
    settings: &SweepSettings,
    kernel: &RadialKernel,
) -> Result<bool> {
    let floor = rasterization_floor(cells)?;
    let sweeper = Sweeper::new(cells, settings)?;
    for (k, nu) in fan.iter().enumerate() {
        if k == skip {
            continue;
        }
        let report = match sweeper.stopping_time(nu) {
            Ok(r) => r,
            Err(Error::DegenerateStart { .. }) => return Ok(false),
            Err(e) => return Err(e),
        };
        if decompose(cells, &report, kernel)?.nonsymmetric.measure() > floor {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn monte_carlo_lens(r1: f64, r2: f64, dist: f64, n: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = r1.min(r2);
        let lo = [dist - r2.max(m), -m];
        let w = [2.0 * r2.max(m), 2.0 * m];
        let hits = (0..n)
            .filter(|_| {
                let x = lo[0] + w[0] * rng.gen::<f64>();
                let y = lo[1] + w[1] * rng.gen::<f64>();
                x * x + y * y < r1 * r1 && (x - dist).powi(2) + y * y < r2 * r2
            })
            .count();
        hits as f64 / n as f64 * w[0] * w[1]
    }

    #[test]
    fn lens_area_matches_monte_carlo() {
        let a = lens_area(1.0, 0.8, 1.0);
        assert_relative_eq!(a, monte_carlo_lens(1.0, 0.8, 1.0, 2_000_000), max_relative = 3e-3);
        assert_relative_eq!(a, 0.83176, epsilon = 1e-4);
        assert_eq!(lens_area(1.0, 1.0, 2.5), 0.0);
        assert_relative_eq!(lens_area(1.0, 0.3, 0.2), PI * 0.09);
    }

    #[test]
    fn lens_volume_matches_cap_sum() {
        // oracle: two spherical caps of heights h1, h2
        let (r1, r2, dist) = (1.0f64, 0.7f64, 1.1f64);
        let x = (dist * dist + r1 * r1 - r2 * r2) / (2.0 * dist);
        let cap = |r: f64, h: f64| PI * h * h * (3.0 * r - h) / 3.0;
        let expect = cap(r1, r1 - x) + cap(r2, r2 - (dist - x));
        assert_relative_eq!(lens_volume(r1, r2, dist), expect, max_relative = 1e-12);
    }

    #[test]
    fn oracle_trivial_cases() {
        let tiny = RadialKernel::indicator(1e-6, 2).unwrap();
        assert!(ball_constant_oracle(&tiny, 1.0).unwrap() < 1e-11);
        let big = RadialKernel::indicator(2.0, 2).unwrap();
        assert_relative_eq!(ball_constant_oracle(&big, 1.0).unwrap(), PI, max_relative = 1e-12);
        let k = RadialKernel::indicator(0.8, 2).unwrap();
        assert_relative_eq!(ball_constant_oracle(&k, 1.0).unwrap(), lens_area(1.0, 0.8, 1.0));
        assert!(ball_constant_oracle(&k, 0.0).is_err());
    }

    #[test]
    fn oracle_step_is_level_sum() {
        let k = RadialKernel::step(&[3.0, 2.0, 1.0], &[1.0, 2.0, 3.0], 2).unwrap();
        let expect = lens_area(1.0, 1.0, 1.0) + lens_area(1.0, 2.0, 1.0) + lens_area(1.0, 3.0, 1.0);
        assert_relative_eq!(ball_constant_oracle(&k, 1.0).unwrap(), expect, max_relative = 1e-12);
    }

    #[test]
    fn oracle_power_against_polar_integral() {
        // oracle: midpoint rule in polar coordinates about the boundary point
        let (a, rad) = (0.5, 1.0);
        let k = RadialKernel::power(a, 2).unwrap();
        let n = 4000;
        let mut sum = 0.0;
        for i in 0..n {
            let t = (i as f64 + 0.5) / n as f64 * 2.0 * rad;
            let mut inside = 0usize;
            let m = 2000;
            for j in 0..m {
                let th = (j as f64 + 0.5) / m as f64 * 2.0 * PI;
                let (x, y) = (rad + t * th.cos(), t * th.sin());
                inside += usize::from(x * x + y * y < rad * rad);
            }
            sum += t.powf(-a) * t * inside as f64 / m as f64 * 2.0 * PI * (2.0 * rad / n as f64);
        }
        assert_relative_eq!(ball_constant_oracle(&k, rad).unwrap(), sum, max_relative = 2e-3);
        let k3 = RadialKernel::power(1.0, 3).unwrap();
        // closed form in 3D: ∫ 2π t (1 − t/2) dt over [0, 2] = 4π − 8π/3
        assert_relative_eq!(ball_constant_oracle(&k3, 1.0).unwrap(), 4.0 * PI / 3.0, max_relative = 1e-9);
    }

    #[test]
    fn oracle_matches_rasterized_disk() {
        let h = 1.0 / 128.0;
        let disk = IndicatorGrid::from_balls(&[vec![0.0, 0.0]], 1.0, h).unwrap();
        for k in [
            RadialKernel::indicator(0.8, 2).unwrap(),
            RadialKernel::step(&[3.0, 2.0, 1.0], &[1.0, 2.0, 3.0], 2).unwrap(),
            RadialKernel::power(0.5, 2).unwrap(),
        ] {
            let c = criticality_report(&disk, &k).unwrap().mean;
            assert_relative_eq!(c, ball_constant_oracle(&k, 1.0).unwrap(), max_relative = 0.02);
        }
    }

    #[test]
    fn sphere_fit_recovers_circle() {
        let pts: Vec<Vec<f64>> = (0..50)
            .map(|i| {
                let t = i as f64 * 0.3;
                vec![0.3 + 1.7 * t.cos(), -0.2 + 1.7 * t.sin()]
            })
            .collect();
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let (c, r, rms) = fit_sphere(&refs).unwrap();
        assert_relative_eq!(c[0], 0.3, epsilon = 1e-9);
        assert_relative_eq!(c[1], -0.2, epsilon = 1e-9);
        assert_relative_eq!(r, 1.7, epsilon = 1e-9);
        assert!(rms < 1e-9);
    }

    fn report_with(balls: Vec<FittedBall>, h: f64) -> RigidityReport {
        RigidityReport {
            balls,
            residual_measure: 0.0,
            eta: 0.0,
            r_sigma: 0.0,
            criticality_mean: 0.0,
            criticality_deviation: 0.0,
            calibration_deviation: 0.0,
            nondegeneracy: 0.0,
            thresholds: Thresholds {
                spacing: h,
                criticality_deviation_max: 0.0,
                nondegeneracy_floor: 0.0,
                rasterization_floor: 0.0,
                fit_rms_max: 0.0,
                radius_spread_max: 0.0,
                slack: 2.0 * h,
            },
            verdict: Verdict::Pass,
            reasons: vec![],
        }
    }

    fn ball(c: [f64; 2], r: f64) -> FittedBall {
        FittedBall { center: c.to_vec(), radius: r, measure: 0.0, fit_rms: 0.0 }
    }

    #[test]
    fn theorem_bounds_cases() {
        let h = 1.0 / 64.0;
        let step = RadialKernel::step(&[3.0, 2.0, 1.0], &[1.0, 2.0, 3.0], 2).unwrap();
        assert!(check_theorem_bounds(&report_with(vec![ball([0.0, 0.0], 1.0)], h), &step, 2.0).unwrap().is_empty());
        assert!(!check_theorem_bounds(&report_with(vec![ball([0.0, 0.0], 0.3)], h), &step, 0.6).unwrap().is_empty());
        let ind = RadialKernel::indicator(1.0, 2).unwrap();
        let close = report_with(vec![ball([0.0, 0.0], 1.0), ball([3.0 - 4.0 * h, 0.0], 1.0)], h);
        assert_eq!(check_theorem_bounds(&close, &ind, 5.0).unwrap().len(), 1);
        let far = report_with(vec![ball([0.0, 0.0], 1.0), ball([3.0, 0.0], 1.0)], h);
        assert!(check_theorem_bounds(&far, &ind, 5.0).unwrap().is_empty());
        let pow = RadialKernel::power(0.5, 2).unwrap();
        assert!(check_theorem_bounds(&report_with(vec![ball([0.0, 0.0], 0.01)], h), &pow, 0.02).unwrap().is_empty());
    }

    #[test]
    fn single_disk_is_one_ball() {
        let h = 1.0 / 64.0;
        let k = RadialKernel::step(&[3.0, 2.0, 1.0], &[1.0, 2.0, 3.0], 2).unwrap();
        let set = IndicatorGrid::from_balls(&[vec![0.1, -0.3]], 1.0, h).unwrap();
        let rep = extract_balls(&set, &k).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{:?}", rep.reasons);
        assert_eq!(rep.balls.len(), 1);
        assert!((rep.balls[0].radius - 1.0).abs() <= 2.0 * h);
        let total: f64 = rep.balls.iter().map(|b| b.measure).sum::<f64>() + rep.residual_measure;
        assert_eq!((total / set.cell_volume()).round() as usize, set.occupied_count());
        let json = rep.to_json();
        for key in ["balls", "residual_measure", "eta", "r_sigma", "verdict", "reasons"] {
            assert!(json.contains(&format!("\"{key}\"")));
        }
    }

    #[test]
    fn ellipse_is_not_applicable() {
        let h = 1.0 / 64.0;
        let k = RadialKernel::indicator(0.5, 2).unwrap();
        let set = IndicatorGrid::from_ellipsoid(&[0.0, 0.0], &[1.0, 0.5], h).unwrap();
        let rep = extract_balls(&set, &k).unwrap();
        assert_eq!(rep.verdict, Verdict::NotApplicable);
        assert!(rep.reasons[0].contains("criticality"));
    }
}
