//! Small quadrature toolkit: Gauss-Legendre rules and adaptive Simpson.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Newton iteration on P_n from the Chebyshev-like initial guess.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over `[a, b]` with a single panel.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Integrates over the panels delimited by `breaks` (sorted).
    pub fn integrate_panels<F: Fn(f64) -> f64>(&self, f: &F, breaks: &[f64]) -> f64 {
        breaks
            .windows(2)
            .map(|w| self.integrate(f, w[0], w[1]))
            .sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { p0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Panel breakpoints on `[a, b]` graded geometrically toward both endpoints,
/// for integrands with algebraic endpoint singularities.
pub fn graded_breaks(a: f64, b: f64, levels: usize, interior: usize) -> Vec<f64> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut left = Vec::with_capacity(levels + interior);
    // a, a + half*2^-levels, ..., a + half/2
    left.push(a);
    for k in (1..=levels).rev() {
        left.push(a + half * 0.5f64.powi(k as i32));
    }
    let inner_start = *left.last().unwrap();
    for k in 1..=interior {
        left.push(inner_start + (mid - inner_start) * k as f64 / interior as f64);
    }
    let mut breaks = left.clone();
    for &x in left.iter().rev().skip(1) {
        breaks.push(a + b - x);
    }
    breaks
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let g = GaussLegendre::new(8);
        // degree 15 is integrated exactly by 8 nodes
        let v = g.integrate(&|x: f64| x.powi(14) + 3.0 * x.powi(3), 0.0, 1.0);
        assert!((v - (1.0 / 15.0 + 0.75)).abs() < 1e-14);
    }

    #[test]
    fn graded_panels_handle_sqrt_singularity() {
        let g = GaussLegendre::new(10);
        let breaks = graded_breaks(0.0, 1.0, 60, 8);
        let v = g.integrate_panels(&|x: f64| x.powf(-0.5), &breaks);
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn simpson_on_step_function() {
        let f = |x: f64| if x < 0.3 { 2.0 } else { 1.0 };
        let v = adaptive_simpson(&f, 0.0, 1.0, 1e-12, 60);
        assert!((v - 1.3).abs() < 1e-9, "{v}");
    }
}
