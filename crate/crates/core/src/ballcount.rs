//! Counting occupied cell centers inside balls with per-row prefix sums.
//!
//! A cell center `c` lies in `B_r(x)` iff `sqrt(q + Δ²) < r`, where `q` sums the
//! squared offsets over the leading axes in axis order and `Δ` is the offset on
//! the last axis. Direct sums in the curvature module use the same expression,
//! so both paths agree on membership bit for bit.

use crate::grid::IndicatorGrid;

#[inline]
pub(crate) fn leading_q(c: &[f64], x: &[f64]) -> f64 {
    let d = x.len();
    let mut q = 0.0;
    for k in 0..d - 1 {
        let v = c[k] - x[k];
        q += v * v;
    }
    q
}

#[inline]
pub(crate) fn center_distance(c: &[f64], x: &[f64]) -> f64 {
    let d = x.len();
    let v = c[d - 1] - x[d - 1];
    (leading_q(c, x) + v * v).sqrt()
}

#[inline]
fn within(q: f64, delta: f64, r: f64) -> bool {
    (q + delta * delta).sqrt() < r
}

pub(crate) struct BallCounter<'g> {
    grid: &'g IndicatorGrid,
    n_last: usize,
    prefix: Vec<u32>,
}

impl<'g> BallCounter<'g> {
    pub fn new(grid: &'g IndicatorGrid) -> Self {
        let n_last = *grid.dims().last().unwrap();
        let rows = grid.len() / n_last;
        let mut prefix = Vec::with_capacity(rows * (n_last + 1));
        let bits = grid.bits();
        for r in 0..rows {
            let mut acc = 0u32;
            prefix.push(0);
            for b in bits[r * n_last..(r + 1) * n_last].iter() {
                acc += *b as u32;
                prefix.push(acc);
            }
        }
        Self { grid, n_last, prefix }
    }

    /// Number of occupied cell centers in the open ball `B_r(x)`.
    pub fn count_ball(&self, x: &[f64], r: f64) -> u64 {
        let mut total = 0u64;
        self.for_rows(&[(x, r)], |row, q| {
            if let Some((a, b)) = self.row_interval(q[0], x, r) {
                total += self.row_count(row, a, b);
            }
        });
        total
    }

    /// Number of occupied cell centers in `B_r(x1) Δ B_r(x2)`.
    pub fn count_symmetric_difference(&self, x1: &[f64], x2: &[f64], r: f64) -> u64 {
        let mut total = 0u64;
        self.for_rows(&[(x1, r), (x2, r)], |row, q| {
            let i1 = self.row_interval(q[0], x1, r);
            let i2 = self.row_interval(q[1], x2, r);
            if i1 == i2 {
                return;
            }
            let c1 = i1.map_or(0, |(a, b)| self.row_count(row, a, b));
            let c2 = i2.map_or(0, |(a, b)| self.row_count(row, a, b));
            let both = match (i1, i2) {
                (Some((a1, b1)), Some((a2, b2))) if a1.max(a2) <= b1.min(b2) => {
                    self.row_count(row, a1.max(a2), b1.min(b2))
                }
                _ => 0,
            };
            total += c1 + c2 - 2 * both;
        });
        total
    }

    #[inline]
    fn row_count(&self, row: usize, a: usize, b: usize) -> u64 {
        let base = row * (self.n_last + 1);
        (self.prefix[base + b + 1] - self.prefix[base + a]) as u64
    }

    /// Visits every row meeting the bounding box of any of the balls, passing
    /// the row index and each ball's leading-axis `q`.
    fn for_rows<F: FnMut(usize, &[f64])>(&self, balls: &[(&[f64], f64)], mut visit: F) {
        let g = self.grid;
        let d = g.dim();
        let lead = d - 1;
        let h = g.spacing();
        let mut lo = vec![0usize; lead];
        let mut hi = vec![0usize; lead];
        for k in 0..lead {
            let (mut a, mut b) = (f64::INFINITY, f64::NEG_INFINITY);
            for (x, r) in balls {
                a = a.min((x[k] - r - g.origin()[k]) / h - 0.5);
                b = b.max((x[k] + r - g.origin()[k]) / h - 0.5);
            }
            let a = (a.floor() - 1.0).max(0.0);
            let b = (b.ceil() + 1.0).min(g.dims()[k] as f64 - 1.0);
            if a > b {
                return;
            }
            lo[k] = a as usize;
            hi[k] = b as usize;
        }
        let mut idx = lo.clone();
        let mut c = vec![0.0; lead + 1];
        let mut qs = vec![0.0; balls.len()];
        loop {
            for k in 0..lead {
                c[k] = g.center_coord(k, idx[k]);
            }
            let mut any = false;
            for (q, (x, r)) in qs.iter_mut().zip(balls) {
                *q = leading_q(&c, x);
                any |= within(*q, 0.0, *r);
            }
            if any {
                let row = idx.iter().zip(g.dims()).fold(0, |acc, (&i, &n)| acc * n + i);
                if self.prefix[row * (self.n_last + 1) + self.n_last] > 0 {
                    visit(row, &qs);
                }
            }
            // odometer over the leading axes
            let mut k = lead;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                if idx[k] < hi[k] {
                    idx[k] += 1;
                    break;
                }
                idx[k] = lo[k];
            }
        }
    }

    /// Inclusive index range on the last axis of the cells of a row with
    /// leading offset `q` that lie in `B_r(x)`, clipped to the grid.
    fn row_interval(&self, q: f64, x: &[f64], r: f64) -> Option<(usize, usize)> {
        if !within(q, 0.0, r) {
            return None;
        }
        let g = self.grid;
        let last = g.dim() - 1;
        let o = g.origin()[last];
        let h = g.spacing();
        let xl = x[last];
        let inside = |j: i64| within(q, (o + (j as f64 + 0.5) * h) - xl, r);
        let u = (xl - o) / h - 0.5;
        let j0 = u.round() as i64;
        let jm = (j0 - 1..=j0 + 1)
            .min_by(|&a, &b| {
                let da = ((o + (a as f64 + 0.5) * h) - xl).abs();
                let db = ((o + (b as f64 + 0.5) * h) - xl).abs();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        if !inside(jm) {
            return None;
        }
        let w = (r * r - q).max(0.0).sqrt() / h;
        let mut a = ((u - w).ceil() as i64).min(jm);
        while !inside(a) {
            a += 1;
        }
        while inside(a - 1) {
            a -= 1;
        }
        let mut b = ((u + w).floor() as i64).max(jm);
        while !inside(b) {
            b -= 1;
        }
        while inside(b + 1) {
            b += 1;
        }
        let a = a.max(0);
        let b = b.min(self.n_last as i64 - 1);
        (a <= b).then_some((a as usize, b as usize))
    }
}
