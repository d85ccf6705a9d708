//! Bounded measurable sets as occupancy bitmasks on a regular grid.

use bitvec::prelude::*;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lines::LineFamily;

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorGrid {
    origin: Vec<f64>,
    spacing: f64,
    dims: Vec<usize>,
    cells: BitVec,
}

/// Cell centers of the discrete essential boundary, in cell-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySample {
    dim: usize,
    cells: Vec<usize>,
    points: Vec<f64>,
    fractions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    normal: Vec<f64>,
    offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `x·ν ≤ t` (ties land here).
    Minus,
    /// `x·ν > t`.
    Plus,
}

/// Face-connected components: `labels[cell]` is the component id or `u32::MAX`.
#[derive(Debug, Clone)]
pub struct Components {
    pub labels: Vec<u32>,
    pub sizes: Vec<usize>,
}

pub const UNLABELED: u32 = u32::MAX;

impl Hyperplane {
    /// Normalizes `normal`; fails on a zero or non-finite vector.
    pub fn new(normal: &[f64], offset: f64) -> Result<Self> {
        let n = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(n.is_finite() && n > 0.0) || !offset.is_finite() {
            return Err(Error::InvalidArgument("hyperplane needs a finite nonzero normal".into()));
        }
        let normal = if n == 1.0 { normal.to_vec() } else { normal.iter().map(|v| v / n).collect() };
        Ok(Self { normal, offset })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn with_offset(&self, offset: f64) -> Self {
        Self { normal: self.normal.clone(), offset }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn signed_distance(&self, p: &[f64]) -> f64 {
        dot(&self.normal, p) - self.offset
    }

    pub fn reflect_point(&self, p: &[f64], out: &mut [f64]) {
        let s = 2.0 * self.signed_distance(p);
        for ((o, &x), &n) in out.iter_mut().zip(p).zip(&self.normal) {
            *o = x - s * n;
        }
    }

    /// `Some(axis)` when the normal is ±e_axis.
    pub fn axis(&self) -> Option<usize> {
        let mut found = None;
        for (k, &v) in self.normal.iter().enumerate() {
            if v != 0.0 {
                if found.is_some() || v.abs() != 1.0 {
                    return None;
                }
                found = Some(k);
            }
        }
        found
    }
}

impl BoundarySample {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.dim)
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }
}

impl IndicatorGrid {
    pub fn new(origin: Vec<f64>, spacing: f64, dims: Vec<usize>, cells: BitVec) -> Result<Self> {
        validate_geometry(&origin, spacing, &dims)?;
        let n: usize = dims.iter().product();
        if cells.len() != n {
            return Err(Error::InvalidArgument(format!("occupancy has {} cells, dims need {n}", cells.len())));
        }
        Ok(Self { origin, spacing, dims, cells })
    }

    pub fn empty(origin: Vec<f64>, spacing: f64, dims: Vec<usize>) -> Result<Self> {
        validate_geometry(&origin, spacing, &dims)?;
        let n: usize = dims.iter().product();
        Ok(Self { origin, spacing, dims, cells: bitvec![0; n] })
    }

    /// Occupies every cell whose center satisfies `inside`.
    pub fn from_fn<F>(origin: Vec<f64>, spacing: f64, dims: Vec<usize>, inside: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> bool + Sync,
    {
        let mut g = Self::empty(origin, spacing, dims)?;
        let flags: Vec<bool> = (0..g.len())
            .into_par_iter()
            .map_init(
                || vec![0.0; g.dim()],
                |buf, i| {
                    g.center_into(i, buf);
                    inside(buf)
                },
            )
            .collect();
        g.cells = flags.into_iter().collect();
        Ok(g)
    }

    /// Union of closed balls of radius `radius`, rasterized by cell centers on the
    /// lattice `hℤ^d`, with at least two empty cells of margin.
    pub fn from_balls(centers: &[Vec<f64>], radius: f64, spacing: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
        }
        if centers.is_empty() {
            return Err(Error::InvalidArgument("no ball centers".into()));
        }
        let d = centers[0].len();
        if d == 0 || centers.iter().any(|c| c.len() != d || c.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidArgument("ball centers must share a positive dimension".into()));
        }
        let lo: Vec<f64> = (0..d).map(|k| centers.iter().map(|c| c[k]).fold(f64::INFINITY, f64::min) - radius).collect();
        let hi: Vec<f64> = (0..d).map(|k| centers.iter().map(|c| c[k]).fold(f64::NEG_INFINITY, f64::max) + radius).collect();
        let (origin, dims) = lattice_box(&lo, &hi, spacing, 2)?;
        let r2 = radius * radius;
        Self::from_fn(origin, spacing, dims, |p| {
            centers.iter().any(|c| dist2(p, c) <= r2)
        })
    }

    /// Solid ellipsoid `Σ ((x_k − c_k)/a_k)² ≤ 1` on the lattice `hℤ^d`.
    pub fn from_ellipsoid(center: &[f64], semi_axes: &[f64], spacing: f64) -> Result<Self> {
        if center.len() != semi_axes.len() || center.is_empty() {
            return Err(Error::InvalidArgument("ellipsoid center and semi-axes differ in dimension".into()));
        }
        if semi_axes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidArgument("semi-axes must be positive".into()));
        }
        let lo: Vec<f64> = center.iter().zip(semi_axes).map(|(c, a)| c - a).collect();
        let hi: Vec<f64> = center.iter().zip(semi_axes).map(|(c, a)| c + a).collect();
        let (origin, dims) = lattice_box(&lo, &hi, spacing, 2)?;
        Self::from_fn(origin, spacing, dims, |p| {
            p.iter().zip(center).zip(semi_axes).map(|((x, c), a)| ((x - c) / a).powi(2)).sum::<f64>() <= 1.0
        })
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.not_any()
    }

    pub fn bits(&self) -> &BitSlice {
        &self.cells
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim() as i32)
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.count_ones()
    }

    pub fn measure(&self) -> f64 {
        self.occupied_count() as f64 * self.cell_volume()
    }

    #[inline]
    pub fn get(&self, flat: usize) -> bool {
        self.cells[flat]
    }

    pub fn set(&mut self, flat: usize, value: bool) {
        self.cells.set(flat, value);
    }

    pub fn occupied(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells.iter_ones()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn unravel(&self, mut flat: usize, idx: &mut [usize]) {
        for k in (0..self.dim()).rev() {
            idx[k] = flat % self.dims[k];
            flat /= self.dims[k];
        }
    }

    #[inline]
    pub fn center_coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + (i as f64 + 0.5) * self.spacing
    }

    pub fn center_into(&self, mut flat: usize, out: &mut [f64]) {
        for k in (0..self.dim()).rev() {
            out[k] = self.center_coord(k, flat % self.dims[k]);
            flat /= self.dims[k];
        }
    }

    pub fn center(&self, flat: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.dim()];
        self.center_into(flat, &mut c);
        c
    }

    /// Index of the cell containing `p` (half-open cells), if inside the box.
    #[inline]
    pub fn locate(&self, p: &[f64]) -> Option<usize> {
        let mut flat = 0usize;
        for k in 0..self.dim() {
            let u = ((p[k] - self.origin[k]) / self.spacing).floor();
            if !(u >= 0.0 && u < self.dims[k] as f64) {
                return None;
            }
            flat = flat * self.dims[k] + u as usize;
        }
        Some(flat)
    }

    /// Occupancy at `p`, false outside the box.
    #[inline]
    pub fn contains_point(&self, p: &[f64]) -> bool {
        self.locate(p).is_some_and(|i| self.cells[i])
    }

    /// Inclusive per-axis index bounds of the occupied cells.
    pub fn occupied_bounds(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let d = self.dim();
        let mut lo = vec![usize::MAX; d];
        let mut hi = vec![0; d];
        let mut idx = vec![0; d];
        let mut any = false;
        for i in self.occupied() {
            any = true;
            self.unravel(i, &mut idx);
            for k in 0..d {
                lo[k] = lo[k].min(idx[k]);
                hi[k] = hi[k].max(idx[k]);
            }
        }
        any.then_some((lo, hi))
    }

    /// Physical corners of the occupied cells' bounding box.
    pub(crate) fn occupied_extent(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let (lo, hi) = self.occupied_bounds()?;
        let a = (0..self.dim()).map(|k| self.origin[k] + lo[k] as f64 * self.spacing).collect();
        let b = (0..self.dim()).map(|k| self.origin[k] + (hi[k] + 1) as f64 * self.spacing).collect();
        Some((a, b))
    }

    /// True when no occupied cell touches the box boundary.
    pub fn has_margin(&self) -> bool {
        match self.occupied_bounds() {
            None => true,
            Some((lo, hi)) => (0..self.dim()).all(|k| lo[k] > 0 && hi[k] + 1 < self.dims[k]),
        }
    }

    /// The same set on a box padded by one empty cell wherever the occupied
    /// region touches the boundary.
    pub fn with_margin(&self) -> Self {
        if self.has_margin() {
            return self.clone();
        }
        self.padded(1)
    }

    /// The same set on a box enlarged by `pad` cells on every side.
    pub fn padded(&self, pad: usize) -> Self {
        let d = self.dim();
        let dims: Vec<usize> = self.dims.iter().map(|n| n + 2 * pad).collect();
        let origin: Vec<f64> = self.origin.iter().map(|o| o - pad as f64 * self.spacing).collect();
        let mut out = Self { origin, spacing: self.spacing, dims, cells: bitvec![0; 0] };
        out.cells = bitvec![0; out.dims.iter().product()];
        let mut idx = vec![0; d];
        for i in self.occupied() {
            self.unravel(i, &mut idx);
            idx.iter_mut().for_each(|v| *v += pad);
            let j = out.flat_index(&idx);
            out.cells.set(j, true);
        }
        out
    }

    /// Same geometry, keeping only the cells selected by `keep`.
    pub fn masked(&self, keep: impl Fn(usize) -> bool) -> Self {
        let mut out = self.clone();
        for i in self.occupied() {
            if !keep(i) {
                out.cells.set(i, false);
            }
        }
        out
    }

    /// Same geometry with exactly the listed cells occupied.
    pub fn with_cells(&self, cells: impl IntoIterator<Item = usize>) -> Self {
        let mut out = self.clone();
        out.cells.fill(false);
        for i in cells {
            out.cells.set(i, true);
        }
        out
    }

    /// Translates the set by a whole number of cells per axis.
    pub fn shifted(&self, cells: &[i64]) -> Self {
        let origin = self.origin.iter().zip(cells).map(|(o, &c)| o + c as f64 * self.spacing).collect();
        Self { origin, spacing: self.spacing, dims: self.dims.clone(), cells: self.cells.clone() }
    }

    /// Measure of the cells of `self` whose centers are not occupied in `other`.
    pub fn measure_outside(&self, other: &Self) -> f64 {
        let mut buf = vec![0.0; self.dim()];
        let n = self
            .occupied()
            .filter(|&i| {
                self.center_into(i, &mut buf);
                !other.contains_point(&buf)
            })
            .count();
        n as f64 * self.cell_volume()
    }

    pub fn symmetric_difference_measure(&self, other: &Self) -> f64 {
        self.measure_outside(other) + other.measure_outside(self)
    }

    /// Largest distance between occupied cell centers.
    pub fn diameter(&self) -> Result<f64> {
        let pts = self.row_extremes();
        if pts.is_empty() {
            return Err(Error::EmptySet);
        }
        let d = self.dim();
        if d == 2 {
            let hull = convex_hull_2d(pts.chunks_exact(2).map(|c| [c[0], c[1]]).collect());
            let mut best = 0.0f64;
            for i in 0..hull.len() {
                for j in i + 1..hull.len() {
                    let dx = hull[i][0] - hull[j][0];
                    let dy = hull[i][1] - hull[j][1];
                    best = best.max(dx * dx + dy * dy);
                }
            }
            return Ok(best.sqrt());
        }
        let n = pts.len() / d;
        let best = (0..n)
            .into_par_iter()
            .map(|i| {
                let a = &pts[i * d..(i + 1) * d];
                (i + 1..n).map(|j| dist2(a, &pts[j * d..(j + 1) * d])).fold(0.0f64, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        Ok(best.sqrt())
    }

    /// Centers of the first and last occupied cell of every row along the last
    /// axis; their convex hull is the hull of all occupied centers.
    fn row_extremes(&self) -> Vec<f64> {
        let d = self.dim();
        let n_last = self.dims[d - 1];
        let rows = self.len() / n_last;
        let mut out = Vec::new();
        for r in 0..rows {
            let row = &self.cells[r * n_last..(r + 1) * n_last];
            if let (Some(a), Some(b)) = (row.first_one(), row.last_one()) {
                for j in [a, b] {
                    let start = out.len();
                    out.resize(start + d, 0.0);
                    self.center_into(r * n_last + j, &mut out[start..]);
                    if a == b {
                        break;
                    }
                }
            }
        }
        out
    }

    /// Cells whose clipped 3^d neighborhood holds both occupied and empty cells.
    pub fn essential_boundary(&self) -> Result<BoundarySample> {
        let occ = self.occupied_count();
        if occ == 0 {
            return Err(Error::EmptyBoundary("the set is empty"));
        }
        if occ == self.len() {
            return Err(Error::EmptyBoundary("the set fills its bounding box"));
        }
        let d = self.dim();
        let offsets = neighborhood_offsets(d);
        let found: Vec<(usize, f64)> = (0..self.len())
            .into_par_iter()
            .filter_map(|i| {
                let mut idx = vec![0usize; d];
                self.unravel(i, &mut idx);
                let (mut full, mut total) = (0usize, 0usize);
                'outer: for off in &offsets {
                    let mut flat = 0usize;
                    for k in 0..d {
                        let v = idx[k] as isize + off[k];
                        if v < 0 || v >= self.dims[k] as isize {
                            continue 'outer;
                        }
                        flat = flat * self.dims[k] + v as usize;
                    }
                    total += 1;
                    full += self.cells[flat] as usize;
                }
                (full > 0 && full < total).then(|| (i, full as f64 / total as f64))
            })
            .collect();
        let mut points = vec![0.0; found.len() * d];
        for (n, &(i, _)) in found.iter().enumerate() {
            self.center_into(i, &mut points[n * d..(n + 1) * d]);
        }
        Ok(BoundarySample {
            dim: d,
            cells: found.iter().map(|p| p.0).collect(),
            fractions: found.iter().map(|p| p.1).collect(),
            points,
        })
    }

    /// Mask of the cells whose clipped 3^d neighborhood is mixed.
    pub fn boundary_band(&self) -> BitVec {
        let mut band = bitvec![0; self.len()];
        if let Ok(b) = self.essential_boundary() {
            for &c in b.cells() {
                band.set(c, true);
            }
        }
        band
    }

    /// Mirror image about `plane`. Every cell of the output box takes the
    /// occupancy of the source cell containing its reflected center.
    pub fn reflect(&self, plane: &Hyperplane) -> Self {
        let d = self.dim();
        let h = self.spacing;
        let Some((a, b)) = self.occupied_extent() else {
            return self.clone();
        };
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        let mut corner = vec![0.0; d];
        let mut image = vec![0.0; d];
        for mask in 0..1usize << d {
            for k in 0..d {
                corner[k] = if mask >> k & 1 == 1 { b[k] } else { a[k] };
            }
            plane.reflect_point(&corner, &mut image);
            for k in 0..d {
                lo[k] = lo[k].min(image[k]);
                hi[k] = hi[k].max(image[k]);
            }
        }
        // Output box on the same lattice as `self`, one cell wider per side.
        let mut origin = vec![0.0; d];
        let mut dims = vec![0; d];
        for k in 0..d {
            let i0 = ((lo[k] - self.origin[k]) / h).floor() - 1.0;
            let i1 = ((hi[k] - self.origin[k]) / h).ceil() + 1.0;
            origin[k] = self.origin[k] + i0 * h;
            dims[k] = (i1 - i0) as usize;
        }
        let mut out = Self::empty(origin, h, dims).expect("reflected box is valid");
        let flags: Vec<bool> = (0..out.len())
            .into_par_iter()
            .map_init(
                || (vec![0.0; d], vec![0.0; d]),
                |(p, q), i| {
                    out.center_into(i, p);
                    plane.reflect_point(p, q);
                    self.contains_point(q)
                },
            )
            .collect();
        out.cells = flags.into_iter().collect();
        out
    }

    /// Intersection with a closed (−) or open (+) half-space by cell centers.
    pub fn clip_halfspace(&self, plane: &Hyperplane, side: Side) -> Self {
        let mut buf = vec![0.0; self.dim()];
        let mut out = self.clone();
        for i in self.occupied() {
            self.center_into(i, &mut buf);
            let minus = plane.signed_distance(&buf) <= 0.0;
            if minus != (side == Side::Minus) {
                out.cells.set(i, false);
            }
        }
        out
    }

    /// Whether every section along lines parallel to the normal is, up to `tol`,
    /// an interval centered on the plane with the section's 1-D measure. Samples
    /// in the one-cell rasterization band are not judged.
    pub fn steiner_symmetric_about(&self, plane: &Hyperplane, tol: f64) -> bool {
        if self.is_empty() {
            return true;
        }
        let family = LineFamily::new(self, plane);
        let band = self.boundary_band();
        let (mut occ, mut fuzzy) = (Vec::new(), Vec::new());
        (0..family.line_count()).all(|l| {
            family.sample(self, &band, l, &mut occ, &mut fuzzy);
            !family.centered_interval_violation(&occ, &fuzzy, tol)
        })
    }

    /// Face-connected components, labelled in order of their first cell.
    pub fn components(&self) -> Components {
        let d = self.dim();
        let mut labels = vec![UNLABELED; self.len()];
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        let mut idx = vec![0usize; d];
        let strides: Vec<usize> = (0..d).map(|k| self.dims[k + 1..].iter().product()).collect();
        for start in self.occupied() {
            if labels[start] != UNLABELED {
                continue;
            }
            let id = sizes.len() as u32;
            let mut size = 0;
            labels[start] = id;
            stack.push(start);
            while let Some(c) = stack.pop() {
                size += 1;
                self.unravel(c, &mut idx);
                for k in 0..d {
                    if idx[k] > 0 {
                        let n = c - strides[k];
                        if self.cells[n] && labels[n] == UNLABELED {
                            labels[n] = id;
                            stack.push(n);
                        }
                    }
                    if idx[k] + 1 < self.dims[k] {
                        let n = c + strides[k];
                        if self.cells[n] && labels[n] == UNLABELED {
                            labels[n] = id;
                            stack.push(n);
                        }
                    }
                }
            }
            sizes.push(size);
        }
        Components { labels, sizes }
    }

    /// One grid per component, in label order.
    pub fn component_grids(&self) -> Vec<Self> {
        let comps = self.components();
        (0..comps.sizes.len() as u32)
            .map(|id| self.masked(|i| comps.labels[i] == id))
            .collect()
    }

    /// Cells of `self` that share a 3^d neighborhood with an occupied cell of
    /// `other` (same geometry).
    pub(crate) fn touching(&self, other: &Self) -> Vec<usize> {
        let d = self.dim();
        let offsets = neighborhood_offsets(d);
        let mut idx = vec![0usize; d];
        self.occupied()
            .filter(|&i| {
                self.unravel(i, &mut idx);
                offsets.iter().any(|off| {
                    let mut flat = 0usize;
                    for k in 0..d {
                        let v = idx[k] as isize + off[k];
                        if v < 0 || v >= self.dims[k] as isize {
                            return false;
                        }
                        flat = flat * self.dims[k] + v as usize;
                    }
                    other.cells[flat]
                })
            })
            .collect()
    }
}

fn validate_geometry(origin: &[f64], spacing: f64, dims: &[usize]) -> Result<()> {
    if dims.is_empty() || origin.len() != dims.len() {
        return Err(Error::InvalidArgument("origin and dims must have the same positive length".into()));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidArgument(format!("spacing must be positive, got {spacing}")));
    }
    if dims.contains(&0) || origin.iter().any(|o| !o.is_finite()) {
        return Err(Error::InvalidArgument("dims must be positive and the origin finite".into()));
    }
    Ok(())
}

/// Box on the lattice `hℤ^d` covering `[lo, hi]` plus `margin` cells per side.
pub(crate) fn lattice_box(lo: &[f64], hi: &[f64], h: f64, margin: usize) -> Result<(Vec<f64>, Vec<usize>)> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidArgument(format!("spacing must be positive, got {h}")));
    }
    let mut origin = Vec::with_capacity(lo.len());
    let mut dims = Vec::with_capacity(lo.len());
    for (a, b) in lo.iter().zip(hi) {
        let i0 = (a / h).floor() - margin as f64;
        let i1 = (b / h).ceil() + margin as f64;
        origin.push(i0 * h);
        dims.push((i1 - i0) as usize);
    }
    Ok((origin, dims))
}

pub(crate) fn neighborhood_offsets(d: usize) -> Vec<Vec<isize>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-1..=1).map(move |o| {
                    let mut w = v.clone();
                    w.push(o);
                    w
                })
            })
            .collect();
    }
    out
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn convex_hull_2d(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}
