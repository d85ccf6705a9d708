//! Sampling a grid along the family of lines parallel to a plane normal.
//!
//! Samples sit at `τ_j = (j − K + ½)·step`, symmetric about the plane, so the
//! mirror of sample `j` is sample `2K − 1 − j`. Axis-aligned normals use the
//! grid rows as lines; other normals use a lattice in the plane.

use bitvec::slice::BitSlice;

use crate::grid::{dot, Hyperplane, IndicatorGrid};

#[derive(Debug, Clone)]
pub(crate) struct LineFamily {
    normal: Vec<f64>,
    offset: f64,
    basis: Vec<Vec<f64>>,
    coords: Vec<Vec<f64>>,
    line_spacing: f64,
    step: f64,
    half: usize,
}

impl LineFamily {
    pub fn new(grid: &IndicatorGrid, plane: &Hyperplane) -> Self {
        let d = grid.dim();
        let h = grid.spacing();
        let normal = plane.normal().to_vec();
        let offset = plane.offset();
        let step = 0.5 * h;
        let Some((a, b)) = grid.occupied_extent() else {
            return Self { normal, offset, basis: vec![], coords: vec![vec![]; d.saturating_sub(1).max(1)], line_spacing: h, step, half: 0 };
        };
        let corners: Vec<Vec<f64>> = (0..1usize << d)
            .map(|m| (0..d).map(|k| if m >> k & 1 == 1 { b[k] } else { a[k] }).collect())
            .collect();
        let (basis, coords, line_spacing) = match plane.axis() {
            Some(ax) => {
                let (lo, hi) = grid.occupied_bounds().unwrap();
                let mut basis = Vec::new();
                let mut coords = Vec::new();
                for k in (0..d).filter(|&k| k != ax) {
                    let mut e = vec![0.0; d];
                    e[k] = 1.0;
                    basis.push(e);
                    coords.push((lo[k]..=hi[k]).map(|i| grid.center_coord(k, i)).collect());
                }
                (basis, coords, h)
            }
            None => {
                let basis = orthonormal_complement(&normal);
                let ls = if d <= 2 { 0.5 * h } else { h };
                let coords = basis
                    .iter()
                    .map(|e| {
                        let proj: Vec<f64> = corners.iter().map(|c| dot(c, e)).collect();
                        let lo = (proj.iter().cloned().fold(f64::INFINITY, f64::min) / ls).floor() as i64;
                        let hi = (proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / ls).ceil() as i64;
                        (lo..=hi).map(|m| m as f64 * ls).collect()
                    })
                    .collect();
                (basis, coords, ls)
            }
        };
        let reach = corners
            .iter()
            .map(|c| (dot(c, &normal) - offset).abs())
            .fold(0.0, f64::max);
        let half = (reach / step).ceil() as usize + 2;
        Self { normal, offset, basis, coords, line_spacing, step, half }
    }

    pub fn line_count(&self) -> usize {
        if self.half == 0 {
            return 0;
        }
        self.coords.iter().map(Vec::len).product()
    }

    pub fn samples_per_line(&self) -> usize {
        2 * self.half
    }

    pub fn half(&self) -> usize {
        self.half
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Measure carried by one sample.
    pub fn sample_weight(&self) -> f64 {
        self.step * self.line_spacing.powi(self.basis.len() as i32)
    }

    #[inline]
    pub fn tau(&self, j: usize) -> f64 {
        (j as f64 - self.half as f64 + 0.5) * self.step
    }

    /// Foot point of line `line` on the plane.
    pub fn anchor(&self, mut line: usize, out: &mut [f64]) {
        for (o, n) in out.iter_mut().zip(&self.normal) {
            *o = self.offset * n;
        }
        for k in (0..self.basis.len()).rev() {
            let len = self.coords[k].len();
            let u = self.coords[k][line % len];
            line /= len;
            for (o, e) in out.iter_mut().zip(&self.basis[k]) {
                *o += u * e;
            }
        }
    }

    pub fn point(&self, line: usize, tau: f64, out: &mut [f64]) {
        self.anchor(line, out);
        for (o, n) in out.iter_mut().zip(&self.normal) {
            *o += tau * n;
        }
    }

    /// Occupancy of `grid` at every sample of `line`, and whether the sample's
    /// cell lies in `band`.
    pub fn sample(&self, grid: &IndicatorGrid, band: &BitSlice, line: usize, occ: &mut Vec<bool>, fuzzy: &mut Vec<bool>) {
        self.sample_window(grid, band, line, 0, self.samples_per_line(), occ, fuzzy);
    }

    /// Like [`Self::sample`], restricted to the samples `j0..j1`.
    #[allow(clippy::too_many_arguments)]
    pub fn sample_window(
        &self,
        grid: &IndicatorGrid,
        band: &BitSlice,
        line: usize,
        j0: usize,
        j1: usize,
        occ: &mut Vec<bool>,
        fuzzy: &mut Vec<bool>,
    ) {
        let d = self.normal.len();
        let mut z = vec![0.0; d];
        let mut p = vec![0.0; d];
        self.anchor(line, &mut z);
        occ.clear();
        fuzzy.clear();
        for j in j0..j1 {
            let t = self.tau(j);
            for k in 0..d {
                p[k] = z[k] + t * self.normal[k];
            }
            match grid.locate(&p) {
                Some(i) => {
                    occ.push(grid.get(i));
                    fuzzy.push(band[i]);
                }
                None => {
                    occ.push(false);
                    fuzzy.push(false);
                }
            }
        }
    }

    /// The line closest to `p` and the sample index along it.
    pub fn nearest(&self, p: &[f64]) -> Option<(usize, usize)> {
        let mut line = 0usize;
        for (e, c) in self.basis.iter().zip(&self.coords) {
            let u = dot(p, e);
            let m = ((u - c[0]) / self.line_spacing).round();
            if !(m >= 0.0 && m < c.len() as f64) {
                return None;
            }
            line = line * c.len() + m as usize;
        }
        let s = ((dot(p, &self.normal) - self.offset) / self.step).floor() + self.half as f64;
        if !(s >= 0.0 && s < self.samples_per_line() as f64) {
            return None;
        }
        Some((line, s as usize))
    }

    /// Whether the occupancy along a line departs by more than `tol` from the
    /// centered interval with the same 1-D measure. Samples flagged in `fuzzy`
    /// lie in the rasterization band and are not judged.
    pub fn centered_interval_violation(&self, occ: &[bool], fuzzy: &[bool], tol: f64) -> bool {
        interval_violation(occ, fuzzy, self.half, self.step, tol)
    }
}

/// [`LineFamily::centered_interval_violation`] on a window of `2·half`
/// samples centered on the plane.
pub(crate) fn interval_violation(occ: &[bool], fuzzy: &[bool], half: usize, step: f64, tol: f64) -> bool {
    let count = occ.iter().filter(|&&o| o).count();
    if count == 0 {
        return false;
    }
    let half_len = 0.5 * count as f64 * step;
    occ.iter().zip(fuzzy).enumerate().any(|(j, (&o, &f))| {
        let t = ((j as f64 - half as f64 + 0.5) * step).abs();
        !f && ((o && t > half_len + tol) || (!o && t < half_len - tol))
    })
}

/// Orthonormal basis of the complement of the unit vector `n`.
fn orthonormal_complement(n: &[f64]) -> Vec<Vec<f64>> {
    let d = n.len();
    let skip = (0..d)
        .max_by(|&a, &b| n[a].abs().partial_cmp(&n[b].abs()).unwrap())
        .unwrap_or(0);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for k in (0..d).filter(|&k| k != skip) {
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        for b in std::iter::once(n).chain(basis.iter().map(Vec::as_slice)) {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let norm = dot(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        let n = [0.6, 0.0, 0.8];
        let b = orthonormal_complement(&n);
        assert_eq!(b.len(), 2);
        for (i, u) in b.iter().enumerate() {
            assert!(dot(u, &n).abs() < 1e-14);
            assert!((dot(u, u) - 1.0).abs() < 1e-14);
            for v in &b[i + 1..] {
                assert!(dot(u, v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn samples_mirror_exactly() {
        let g = IndicatorGrid::from_balls(&[vec![0.2, 0.1]], 1.0, 1.0 / 16.0).unwrap();
        let plane = Hyperplane::new(&[1.0, 0.0], 0.2).unwrap();
        let f = LineFamily::new(&g, &plane);
        let m = f.samples_per_line();
        for j in 0..m {
            assert_eq!(f.tau(j), -f.tau(m - 1 - j));
        }
    }

    #[test]
    fn sampled_measure_matches_grid() {
        let g = IndicatorGrid::from_balls(&[vec![0.0, 0.0]], 1.0, 1.0 / 32.0).unwrap();
        for normal in [[1.0, 0.0], [0.0, -1.0], [1.0, 1.0], [0.3, -0.8]] {
            let plane = Hyperplane::new(&normal, 0.1).unwrap();
            let f = LineFamily::new(&g, &plane);
            let band = g.boundary_band();
            let (mut buf, mut fz) = (Vec::new(), Vec::new());
            let mut count = 0usize;
            for l in 0..f.line_count() {
                f.sample(&g, &band, l, &mut buf, &mut fz);
                count += buf.iter().filter(|&&o| o).count();
            }
            let m = count as f64 * f.sample_weight();
            assert!((m - g.measure()).abs() / g.measure() < 0.01, "{normal:?}: {m}");
        }
    }

    #[test]
    fn nearest_roundtrip() {
        let g = IndicatorGrid::from_balls(&[vec![0.0, 0.0]], 1.0, 1.0 / 16.0).unwrap();
        let plane = Hyperplane::new(&[1.0, 2.0], 0.0).unwrap();
        let f = LineFamily::new(&g, &plane);
        let mut p = [0.0; 2];
        f.point(37, f.tau(40), &mut p);
        assert_eq!(f.nearest(&p), Some((37, 40)));
    }
}
