//! Criticality and pair-deviation integrals over indicator grids, by direct
//! cell sums and by the layer-cake identities
//!
//! ```text
//! ∫_Ω h(x−y) dy      = σ|Ω| + ∫_σ^∞ |Ω ∩ B_{r(s)}(x)| ds
//! ∫_Ω |h_x1 − h_x2|  = ∫_σ^∞ |Ω ∩ (B_{r(s)}(x1) Δ B_{r(s)}(x2))| ds
//! ```
//!
//! Ball membership counts cell centers with the predicate shared with
//! [`crate::ballcount`]. For unbounded profiles the cell containing the
//! evaluation point contributes the exact shell mass `∫_{B_{h/2}} h`.

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ballcount::{center_distance, BallCounter};
use crate::error::{Error, Result};
use crate::grid::{neighborhood_offsets, BoundarySample, IndicatorGrid};
use crate::kernel::{Profile, RadialKernel};

pub const DEFAULT_PANELS: usize = 512;
pub const DEFAULT_PAIR_BUDGET: usize = 1_000_000;
const DISTANCE_BINS: usize = 16;

/// Evaluates the local integrals of one set under one kernel.
pub struct MassEvaluator<'a> {
    set: &'a IndicatorGrid,
    kernel: &'a RadialKernel,
    counter: BallCounter<'a>,
    cells: Vec<usize>,
    centers: Vec<f64>,
    diameter: f64,
    sigma: f64,
    /// Level below which no cell is seen from any point of the essential
    /// boundary, which may sit one cell off Ω.
    floor_level: f64,
    panels: usize,
}

impl<'a> MassEvaluator<'a> {
    pub fn new(set: &'a IndicatorGrid, kernel: &'a RadialKernel) -> Result<Self> {
        if set.dim() != kernel.dim() {
            return Err(Error::InvalidArgument(format!(
                "set is {}-dimensional but the kernel is {}-dimensional",
                set.dim(),
                kernel.dim()
            )));
        }
        let d = set.dim();
        let cells: Vec<usize> = set.occupied().collect();
        let mut centers = vec![0.0; cells.len() * d];
        for (n, &i) in cells.iter().enumerate() {
            set.center_into(i, &mut centers[n * d..(n + 1) * d]);
        }
        let (diameter, sigma) = if cells.is_empty() {
            (0.0, 0.0)
        } else {
            let diam = set.diameter()?;
            if diam > 0.0 {
                (diam, kernel.sigma_level(diam)?)
            } else if kernel.is_bounded() {
                (0.0, kernel.ess_sup())
            } else {
                return Err(Error::Domain("a single-cell set has no finite σ under an unbounded kernel".into()));
            }
        };
        let floor_level = if cells.is_empty() || !(diameter > 0.0) {
            sigma
        } else {
            kernel.sigma_level(diameter + (d as f64).sqrt() * set.spacing())?
        };
        Ok(Self { set, kernel, counter: BallCounter::new(set), cells, centers, diameter, sigma, floor_level, panels: DEFAULT_PANELS })
    }

    /// Panel count of the s-quadrature used for unbounded profiles.
    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels.max(1);
        self
    }

    pub fn set(&self) -> &IndicatorGrid {
        self.set
    }

    pub fn kernel(&self) -> &RadialKernel {
        self.kernel
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn r_sigma(&self) -> f64 {
        self.kernel.distribution(self.sigma).unwrap_or(0.0)
    }

    fn cell_volume(&self) -> f64 {
        self.set.cell_volume()
    }

    /// Occupied cell containing `x`, tracked only for unbounded profiles.
    fn singular_cell(&self, x: &[f64]) -> Option<usize> {
        if self.kernel.is_bounded() {
            return None;
        }
        self.set.locate(x).filter(|&i| self.set.get(i))
    }

    fn shell(&self) -> f64 {
        self.kernel.shell_mass(0.5 * self.set.spacing())
    }

    /// `Σ_cells φ(|x − y_cell|)·h^d`.
    pub fn local_mass_direct(&self, x: &[f64]) -> f64 {
        let d = self.set.dim();
        let skip = self.singular_cell(x);
        let hv = self.cell_volume();
        let mut sum = 0.0;
        for (n, &cell) in self.cells.iter().enumerate() {
            if Some(cell) == skip {
                sum += self.shell();
                continue;
            }
            let t = center_distance(&self.centers[n * d..(n + 1) * d], x);
            sum += self.kernel.phi(t) * hv;
        }
        sum
    }

    /// `σ|Ω| + ∫_σ^∞ |Ω ∩ B_{r(s)}(x)| ds`.
    pub fn local_mass_layercake(&self, x: &[f64]) -> Result<f64> {
        if self.cells.is_empty() {
            return Ok(0.0);
        }
        let hv = self.cell_volume();
        match self.kernel.profile() {
            Profile::Piecewise { levels, radii } => {
                // Every level is summed: evaluation points off Ω may see
                // cells beyond r(σ).
                let mut mass = 0.0;
                for (i, (&a, &r)) in levels.iter().zip(radii).enumerate() {
                    let w = a - levels.get(i + 1).copied().unwrap_or(0.0);
                    mass += w * self.counter.count_ball(x, r) as f64 * hv;
                }
                Ok(mass)
            }
            Profile::Power { .. } => {
                let skip = self.singular_cell(x);
                let d = self.set.dim();
                let skip_center = skip.map(|c| self.set.center(c));
                let others = (self.cells.len() - skip.is_some() as usize) as f64;
                let mut mass = self.floor_level * others * hv;
                let integral = self.s_quadrature(|rho| {
                    let n = self.counter.count_ball(x, rho) as f64;
                    let own = skip_center.as_ref().is_some_and(|c| center_distance(&c[..d], x) < rho);
                    n - own as u8 as f64
                })?;
                mass += integral * hv;
                if skip.is_some() {
                    mass += self.shell();
                }
                Ok(mass)
            }
        }
    }

    /// `∫_σ^{φ(h/2)} f(r(s)) ds` on log-spaced midpoint panels.
    fn s_quadrature<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let top = self.kernel.phi(0.5 * self.set.spacing());
        let lo = self.floor_level;
        if !(lo > 0.0) {
            return Err(Error::Divergent(format!(
                "σ = {lo} leaves the level integral unbounded below (diameter {})",
                self.diameter
            )));
        }
        if lo >= top {
            return Ok(0.0);
        }
        let ratio = top / lo;
        let p = self.panels as f64;
        let mut sum = 0.0;
        let mut a = lo;
        for k in 1..=self.panels {
            let b = if k == self.panels { top } else { lo * ratio.powf(k as f64 / p) };
            let s = 0.5 * (a + b);
            let rho = self.kernel.distribution(s)?;
            sum += f(rho) * (b - a);
            a = b;
        }
        if !sum.is_finite() {
            return Err(Error::Divergent(format!("level integral evaluated to {sum}")));
        }
        Ok(sum)
    }

    /// `∫_Ω |h_x1 − h_x2|` by the layer-cake symmetric-difference identity.
    pub fn pair_deviation(&self, x1: &[f64], x2: &[f64]) -> f64 {
        if x1 == x2 || self.cells.is_empty() {
            return 0.0;
        }
        let hv = self.cell_volume();
        match self.kernel.profile() {
            Profile::Piecewise { levels, radii } => {
                let mut total = 0.0;
                for (i, (&a, &r)) in levels.iter().zip(radii).enumerate() {
                    let w = a - levels.get(i + 1).copied().unwrap_or(0.0);
                    total += w * self.counter.count_symmetric_difference(x1, x2, r) as f64 * hv;
                }
                total
            }
            Profile::Power { .. } => {
                let singular = self.singular_pair(x1, x2);
                let mut total: f64 = singular.iter().map(|s| s.2).sum();
                let integral = self
                    .s_quadrature(|rho| {
                        let mut n = self.counter.count_symmetric_difference(x1, x2, rho) as f64;
                        for (c, _, _) in &singular {
                            let in1 = center_distance(c, x1) < rho;
                            let in2 = center_distance(c, x2) < rho;
                            n -= (in1 != in2) as u8 as f64;
                        }
                        n
                    })
                    .unwrap_or(f64::INFINITY);
                total += integral * hv;
                total
            }
        }
    }

    /// Cells holding `x1` or `x2` under an unbounded profile, with their
    /// center and the value of `∫_cell |h_x1 − h_x2|`.
    fn singular_pair(&self, x1: &[f64], x2: &[f64]) -> Vec<(Vec<f64>, usize, f64)> {
        let hv = self.cell_volume();
        let s1 = self.singular_cell(x1);
        let s2 = self.singular_cell(x2).filter(|&c| Some(c) != s1);
        let mut out = Vec::new();
        if let Some(c) = s1 {
            let cc = self.set.center(c);
            let v = (self.shell() - self.kernel.phi(center_distance(&cc, x2)) * hv).abs();
            out.push((cc, c, v));
        }
        if let Some(c) = s2 {
            let cc = self.set.center(c);
            let v = (self.shell() - self.kernel.phi(center_distance(&cc, x1)) * hv).abs();
            out.push((cc, c, v));
        }
        out
    }

    /// `Σ_cells |φ(|x1 − y|) − φ(|x2 − y|)|·h^d`.
    pub fn pair_deviation_direct(&self, x1: &[f64], x2: &[f64]) -> f64 {
        if x1 == x2 {
            return 0.0;
        }
        let d = self.set.dim();
        let hv = self.cell_volume();
        let singular = self.singular_pair(x1, x2);
        let mut sum: f64 = singular.iter().map(|s| s.2).sum();
        for (n, &cell) in self.cells.iter().enumerate() {
            if singular.iter().any(|s| s.1 == cell) {
                continue;
            }
            let c = &self.centers[n * d..(n + 1) * d];
            sum += (self.kernel.phi(center_distance(c, x1)) - self.kernel.phi(center_distance(c, x2))).abs() * hv;
        }
        sum
    }
}

pub fn local_mass_direct(set: &IndicatorGrid, x: &[f64], kernel: &RadialKernel) -> Result<f64> {
    Ok(MassEvaluator::new(set, kernel)?.local_mass_direct(x))
}

pub fn local_mass_layercake(set: &IndicatorGrid, x: &[f64], kernel: &RadialKernel) -> Result<f64> {
    MassEvaluator::new(set, kernel)?.local_mass_layercake(x)
}

pub fn pair_deviation(set: &IndicatorGrid, x1: &[f64], x2: &[f64], kernel: &RadialKernel) -> Result<f64> {
    Ok(MassEvaluator::new(set, kernel)?.pair_deviation(x1, x2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassPath {
    LayerCake,
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalityReport {
    pub dim: usize,
    /// Boundary points, flattened.
    pub points: Vec<f64>,
    pub values: Vec<f64>,
    pub mean: f64,
    pub max_deviation: f64,
    pub count: usize,
}

impl CriticalityReport {
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }
}

pub fn criticality_report(set: &IndicatorGrid, kernel: &RadialKernel) -> Result<CriticalityReport> {
    criticality_report_with(set, kernel, MassPath::LayerCake)
}

pub fn criticality_report_with(set: &IndicatorGrid, kernel: &RadialKernel, path: MassPath) -> Result<CriticalityReport> {
    let boundary = set.essential_boundary()?;
    let eval = MassEvaluator::new(set, kernel)?;
    criticality_on(&eval, &boundary, path)
}

pub(crate) fn criticality_on(eval: &MassEvaluator, boundary: &BoundarySample, path: MassPath) -> Result<CriticalityReport> {
    if boundary.is_empty() {
        return Err(Error::EmptyBoundary("no boundary points to evaluate"));
    }
    let values: Vec<f64> = (0..boundary.len())
        .into_par_iter()
        .map(|i| match path {
            MassPath::LayerCake => eval.local_mass_layercake(boundary.point(i)),
            MassPath::Direct => Ok(eval.local_mass_direct(boundary.point(i))),
        })
        .collect::<Result<_>>()?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let max_deviation = if mean > 0.0 {
        values.iter().map(|v| (v - mean).abs() / mean).fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(CriticalityReport {
        dim: boundary.dim(),
        points: boundary.points().flatten().copied().collect(),
        count: values.len(),
        values,
        mean,
        max_deviation,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct NondegOptions {
    pub pair_budget: usize,
    pub seed: u64,
}

impl Default for NondegOptions {
    fn default() -> Self {
        Self { pair_budget: DEFAULT_PAIR_BUDGET, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NondegReport {
    pub value: f64,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub distance: f64,
    pub pairs_evaluated: usize,
    pub exhaustive: bool,
    pub dim: usize,
    pub points: Vec<f64>,
    /// Per boundary point: minimizing partner index and quotient.
    pub partners: Vec<Option<(usize, f64)>>,
}

impl NondegReport {
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }
}

/// Minimum of `∫_Ω |h_x1 − h_x2| / |x1 − x2|` over a deterministic set of
/// boundary pairs.
pub fn nondegeneracy_infimum(set: &IndicatorGrid, kernel: &RadialKernel, opts: NondegOptions) -> Result<NondegReport> {
    let boundary = set.essential_boundary()?;
    let eval = MassEvaluator::new(set, kernel)?;
    nondegeneracy_on(&eval, &boundary, opts)
}

pub(crate) fn nondegeneracy_on(eval: &MassEvaluator, boundary: &BoundarySample, opts: NondegOptions) -> Result<NondegReport> {
    let n = boundary.len();
    if n < 2 {
        return Err(Error::EmptyBoundary("nondegeneracy needs at least two boundary points"));
    }
    let exhaustive = n.saturating_mul(n) <= opts.pair_budget;
    let pairs = if exhaustive {
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
    } else {
        sampled_pairs(eval.set(), boundary, opts)
    };
    let quotients: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (boundary.point(i), boundary.point(j));
            eval.pair_deviation(a, b) / crate::grid::dist2(a, b).sqrt()
        })
        .collect();
    let mut best = 0;
    let mut partners: Vec<Option<(usize, f64)>> = vec![None; n];
    for (k, (&(i, j), &q)) in pairs.iter().zip(&quotients).enumerate() {
        if q < quotients[best] {
            best = k;
        }
        for (a, b) in [(i, j), (j, i)] {
            if partners[a].is_none_or(|(_, v)| q < v) {
                partners[a] = Some((b, q));
            }
        }
    }
    let (i, j) = pairs[best];
    let (x1, x2) = (boundary.point(i).to_vec(), boundary.point(j).to_vec());
    Ok(NondegReport {
        value: quotients[best],
        distance: crate::grid::dist2(&x1, &x2).sqrt(),
        x1,
        x2,
        pairs_evaluated: pairs.len(),
        exhaustive,
        dim: boundary.dim(),
        points: boundary.points().flatten().copied().collect(),
        partners,
    })
}

/// All pairs of boundary cells that are 3^d neighbors, plus random pairs
/// stratified over 16 distance bins up to the pair budget.
fn sampled_pairs(set: &IndicatorGrid, boundary: &BoundarySample, opts: NondegOptions) -> Vec<(usize, usize)> {
    let d = set.dim();
    let n = boundary.len();
    let index: HashMap<usize, usize> = boundary.cells().iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let forward: Vec<Vec<isize>> = neighborhood_offsets(d)
        .into_iter()
        .filter(|o| o.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0))
        .collect();
    let mut pairs = Vec::new();
    let mut idx = vec![0usize; d];
    for (i, &c) in boundary.cells().iter().enumerate() {
        set.unravel(c, &mut idx);
        'off: for off in &forward {
            let mut flat = 0usize;
            for k in 0..d {
                let v = idx[k] as isize + off[k];
                if v < 0 || v >= set.dims()[k] as isize {
                    continue 'off;
                }
                flat = flat * set.dims()[k] + v as usize;
            }
            if let Some(&j) = index.get(&flat) {
                pairs.push((i, j));
            }
        }
    }
    let remaining = opts.pair_budget.saturating_sub(pairs.len());
    let quota = remaining / DISTANCE_BINS;
    if quota == 0 {
        return pairs;
    }
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in boundary.points() {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let reach = crate::grid::dist2(&lo, &hi).sqrt().max(f64::MIN_POSITIVE);
    let mut filled = [0usize; DISTANCE_BINS];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..8 * remaining {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let dist = crate::grid::dist2(boundary.point(i), boundary.point(j)).sqrt();
        let bin = ((dist / reach * DISTANCE_BINS as f64) as usize).min(DISTANCE_BINS - 1);
        if filled[bin] < quota {
            filled[bin] += 1;
            pairs.push((i.min(j), i.max(j)));
            if filled.iter().all(|&f| f >= quota) {
                break;
            }
        }
    }
    pairs
}

/// One boundary layer of cells: `(boundary sample count)·h^d`.
pub fn rasterization_floor(set: &IndicatorGrid) -> Result<f64> {
    Ok(set.essential_boundary()?.len() as f64 * set.cell_volume())
}

/// Quotient carried by a single cell at unit-cell distance:
/// `(density scale)·h^{d−1}`.
pub fn nondegeneracy_floor(kernel: &RadialKernel, h: f64) -> f64 {
    kernel.density_scale(h) * h.powi(kernel.dim() as i32 - 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerimeterValue {
    pub value: f64,
    /// For non-integrable kernels: the complement is summed only inside the
    /// box, and this radius bounds the interactions fully captured.
    pub truncation_radius: Option<f64>,
}

/// `P_h(Ω) = ∫_Ω ∫_{Ω^c} h(x − y) dy dx`.
pub fn h_perimeter(set: &IndicatorGrid, kernel: &RadialKernel) -> Result<PerimeterValue> {
    if set.dim() != kernel.dim() {
        return Err(Error::InvalidArgument("set and kernel dimensions differ".into()));
    }
    let d = set.dim();
    let hv = set.cell_volume();
    let cells: Vec<usize> = set.occupied().collect();
    match kernel.profile() {
        Profile::Piecewise { levels, radii } => {
            // Lattice points of B_{r_i}: the complement count of a cell at level i
            // is L_i minus the occupied centers in the same ball.
            let lattice: Vec<u64> = radii.iter().map(|&r| lattice_count(d, set.spacing(), r)).collect();
            let counter = BallCounter::new(set);
            let per_cell: Vec<f64> = cells
                .par_iter()
                .map(|&c| {
                    let x = set.center(c);
                    let mut s = 0.0;
                    for (i, (&a, &r)) in levels.iter().zip(radii).enumerate() {
                        let w = a - levels.get(i + 1).copied().unwrap_or(0.0);
                        s += w * (lattice[i] - counter.count_ball(&x, r)) as f64;
                    }
                    s
                })
                .collect();
            Ok(PerimeterValue { value: per_cell.iter().sum::<f64>() * hv * hv, truncation_radius: None })
        }
        Profile::Power { .. } => {
            let empty: Vec<usize> = (0..set.len()).filter(|&i| !set.get(i)).collect();
            let per_cell: Vec<f64> = cells
                .par_iter()
                .map(|&c| {
                    let x = set.center(c);
                    let mut y = vec![0.0; d];
                    empty
                        .iter()
                        .map(|&e| {
                            set.center_into(e, &mut y);
                            kernel.phi(center_distance(&y, &x))
                        })
                        .sum::<f64>()
                })
                .collect();
            let mut reach = f64::INFINITY;
            for &c in &cells {
                let x = set.center(c);
                for k in 0..d {
                    let a = x[k] - set.origin()[k];
                    let b = set.origin()[k] + set.dims()[k] as f64 * set.spacing() - x[k];
                    reach = reach.min(a).min(b);
                }
            }
            Ok(PerimeterValue { value: per_cell.iter().sum::<f64>() * hv * hv, truncation_radius: Some(reach) })
        }
    }
}

/// Number of `m ∈ ℤ^d` with `|m|·h < r`.
fn lattice_count(d: usize, h: f64, r: f64) -> u64 {
    let n = (r / h).ceil() as usize + 1;
    let side = 2 * n + 1;
    let g = IndicatorGrid::from_fn(vec![-(side as f64) * h / 2.0; d], h, vec![side; d], |_| true)
        .expect("lattice box is valid");
    BallCounter::new(&g).count_ball(&vec![0.0; d], r)
}

/// `H_h(Ω)(x) = ‖h‖_{L¹} − 2∫_Ω h(x − y) dy`.
pub fn h_mean_curvature(set: &IndicatorGrid, x: &[f64], kernel: &RadialKernel) -> Result<f64> {
    let norm = kernel.l1_norm().ok_or(Error::NotIntegrable)?;
    if set.is_empty() {
        return Ok(norm);
    }
    Ok(norm - 2.0 * local_mass_direct(set, x, kernel)?)
}

pub fn write_criticality_csv<W: Write>(report: &CriticalityReport, w: &mut W) -> std::io::Result<()> {
    let head: Vec<String> = (1..=report.dim).map(|k| format!("x{k}")).collect();
    writeln!(w, "{},value", head.join(","))?;
    for (i, v) in report.values.iter().enumerate() {
        let p: Vec<String> = report.point(i).iter().map(|c| c.to_string()).collect();
        writeln!(w, "{},{}", p.join(","), v)?;
    }
    Ok(())
}

pub fn write_nondeg_csv<W: Write>(report: &NondegReport, w: &mut W) -> std::io::Result<()> {
    let xs: Vec<String> = (1..=report.dim).map(|k| format!("x{k}")).collect();
    let ys: Vec<String> = (1..=report.dim).map(|k| format!("y{k}")).collect();
    writeln!(w, "{},{},distance,quotient", xs.join(","), ys.join(","))?;
    for (i, partner) in report.partners.iter().enumerate() {
        let Some((j, q)) = partner else { continue };
        let (a, b) = (report.point(i), report.point(*j));
        let cols: Vec<String> = a.iter().chain(b).map(|c| c.to_string()).collect();
        writeln!(w, "{},{},{}", cols.join(","), crate::grid::dist2(a, b).sqrt(), q)?;
    }
    Ok(())
}
