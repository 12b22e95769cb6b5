//! Aggregate shapes and distances between them.
//!
//! A shape is a closed polyline with marked corners; the base corners a and
//! b let shapes be normalized to a common frame (a -> 0, b -> 1), after
//! which Hausdorff distances compare the packed aggregate against the
//! euclidean prototile it approximates.

use crate::complex::AggregateBoundary;
use crate::error::{Error, Result};
use crate::geom::{bbox, polygon_diameter, segment_distance, C};
use crate::packing::{Packing, PackingComplex};
use crate::rules::Prototile;
use crate::complex::TileComplex;

/// Closed polyline (implicitly closed between last and first point) with
/// marked corner indices; `base` gives the ranks of corners a and b within
/// `corners`.
#[derive(Debug, Clone)]
pub struct Shape {
    pub points: Vec<C>,
    /// Index into `points` for each marked corner, in corner order.
    pub corners: Vec<usize>,
    /// Ranks within `corners` of the normalization corners a and b.
    pub base: (usize, usize),
}

impl Shape {
    pub fn corner_a(&self) -> C {
        self.points[self.corners[self.base.0]]
    }

    pub fn corner_b(&self) -> C {
        self.points[self.corners[self.base.1]]
    }

    pub fn diameter(&self) -> f64 {
        polygon_diameter(&self.points)
    }
}

/// Shape of a prototile itself: its corner polygon with every corner
/// marked and the base edge endpoints as normalization corners.
pub fn prototile_shape(prototile: &Prototile) -> Shape {
    let corners: Vec<usize> = (0..prototile.combinatorial_corners.len()).collect();
    Shape {
        points: prototile.combinatorial_corners.clone(),
        corners,
        base: prototile.base_corner_indices(),
    }
}

/// Polyline through the centers of the boundary-chain circles of an
/// aggregate, with the aggregate root's corners marked. Requires a laid-out
/// packing (circles present).
pub fn aggregate_shape(
    pc: &PackingComplex,
    packing: &Packing,
    complex: &TileComplex,
    boundary: &AggregateBoundary,
) -> Result<Shape> {
    let circles = packing
        .circles
        .as_ref()
        .ok_or_else(|| Error::Layout("aggregate_shape needs a laid-out packing".into()))?;
    let cycle = &boundary.cycle;
    let per_step = 1usize << pc.hex_depth;
    let mut points = Vec::with_capacity(cycle.len() * per_step);
    for i in 0..cycle.len() {
        let u = cycle[i];
        let v = cycle[(i + 1) % cycle.len()];
        let chain = pc.chain_between(complex, u, v)?;
        for &w in &chain[..chain.len() - 1] {
            points.push(circles[w].center);
        }
    }
    let corners: Vec<usize> = boundary
        .corner_marks
        .iter()
        .map(|&m| m * per_step)
        .collect();
    Ok(Shape {
        points,
        corners,
        base: boundary.base,
    })
}

/// Maps a shape so corner a lands on 0 and corner b on 1.
pub fn normalize_shape(shape: &Shape) -> Result<Shape> {
    let a = shape.corner_a();
    let b = shape.corner_b();
    let span = b - a;
    if span.norm() <= 1e-12 * shape.diameter().max(f64::MIN_POSITIVE) {
        return Err(Error::CoincidentCorners);
    }
    Ok(Shape {
        points: shape.points.iter().map(|&z| (z - a) / span).collect(),
        corners: shape.corners.clone(),
        base: shape.base,
    })
}

/// Hausdorff distance between two closed polylines, computed by sampling
/// each boundary at arclength steps of at most `step` and measuring exact
/// point-to-segment distances against the other (grid-accelerated). The
/// result is within `step / 2` of the true boundary Hausdorff distance.
pub fn hausdorff_distance(a: &[C], b: &[C], step: f64) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::DegeneratePolygon(
            "hausdorff distance needs at least two points per curve".into(),
        ));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::DegeneratePolygon(format!(
            "sampling step {step} must be positive"
        )));
    }
    let d_ab = directed_hausdorff(a, b, step);
    let d_ba = directed_hausdorff(b, a, step);
    Ok(d_ab.max(d_ba))
}

fn directed_hausdorff(from: &[C], to: &[C], step: f64) -> f64 {
    let grid = SegmentGrid::new(to);
    let mut worst = 0.0f64;
    let m = from.len();
    for i in 0..m {
        let p = from[i];
        let q = from[(i + 1) % m];
        let len = (q - p).norm();
        let pieces = (len / step).ceil().max(1.0) as usize;
        for j in 0..pieces {
            let s = p + (q - p) * (j as f64 / pieces as f64);
            worst = worst.max(grid.nearest(s));
        }
    }
    worst
}

/// Uniform bucket grid over the segments of a closed polyline for nearest
/// point-to-segment queries.
struct SegmentGrid {
    segments: Vec<(C, C)>,
    origin: C,
    cell: f64,
    cols: i64,
    rows: i64,
    buckets: Vec<Vec<u32>>,
}

impl SegmentGrid {
    fn new(points: &[C]) -> SegmentGrid {
        let m = points.len();
        let segments: Vec<(C, C)> = (0..m).map(|i| (points[i], points[(i + 1) % m])).collect();
        let (lo, hi) = bbox(points);
        let perimeter: f64 = segments.iter().map(|(p, q)| (q - p).norm()).sum();
        let span = (hi - lo).norm().max(f64::MIN_POSITIVE);
        let cell = (perimeter / m as f64).max(span * 1e-6).max(f64::MIN_POSITIVE);
        let cols = (((hi.re - lo.re) / cell).floor() as i64 + 1).max(1);
        let rows = (((hi.im - lo.im) / cell).floor() as i64 + 1).max(1);
        let mut buckets = vec![Vec::new(); (cols * rows) as usize];
        for (idx, (p, q)) in segments.iter().enumerate() {
            let ix0 = (((p.re.min(q.re)) - lo.re) / cell).floor() as i64;
            let ix1 = (((p.re.max(q.re)) - lo.re) / cell).floor() as i64;
            let iy0 = (((p.im.min(q.im)) - lo.im) / cell).floor() as i64;
            let iy1 = (((p.im.max(q.im)) - lo.im) / cell).floor() as i64;
            for ix in ix0.max(0)..=ix1.min(cols - 1) {
                for iy in iy0.max(0)..=iy1.min(rows - 1) {
                    buckets[(iy * cols + ix) as usize].push(idx as u32);
                }
            }
        }
        SegmentGrid {
            segments,
            origin: lo,
            cell,
            cols,
            rows,
            buckets,
        }
    }

    fn nearest(&self, p: C) -> f64 {
        let ix = ((p.re - self.origin.re) / self.cell).floor() as i64;
        let iy = ((p.im - self.origin.im) / self.cell).floor() as i64;
        let r_max = [
            (ix).abs() + (iy).abs(),
            (self.cols - 1 - ix).abs() + (self.rows - 1 - iy).abs(),
            (ix).abs() + (self.rows - 1 - iy).abs(),
            (self.cols - 1 - ix).abs() + (iy).abs(),
        ]
        .into_iter()
        .max()
        .unwrap()
            + 1;
        let mut best = f64::INFINITY;
        for r in 0..=r_max {
            // Any segment in a cell at Chebyshev ring r is at least
            // (r - 1) * cell away from p.
            if (r - 1) as f64 * self.cell >= best {
                break;
            }
            self.for_ring_cells(ix, iy, r, |bucket| {
                for &s in bucket {
                    let (a, b) = self.segments[s as usize];
                    let d = segment_distance(p, a, b);
                    if d < best {
                        best = d;
                    }
                }
            });
        }
        best
    }

    fn for_ring_cells<F: FnMut(&Vec<u32>)>(&self, ix: i64, iy: i64, r: i64, mut f: F) {
        let visit = |x: i64, y: i64, f: &mut F| {
            if x >= 0 && x < self.cols && y >= 0 && y < self.rows {
                f(&self.buckets[(y * self.cols + x) as usize]);
            }
        };
        if r == 0 {
            visit(ix, iy, &mut f);
            return;
        }
        for x in (ix - r)..=(ix + r) {
            visit(x, iy - r, &mut f);
            visit(x, iy + r, &mut f);
        }
        for y in (iy - r + 1)..=(iy + r - 1) {
            visit(ix - r, y, &mut f);
            visit(ix + r, y, &mut f);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::c;

    fn square(shift: C, scale: f64) -> Vec<C> {
        [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]
            .iter()
            .map(|&z| z * scale + shift)
            .collect()
    }

    #[test]
    fn shifted_square_distance_is_the_shift() {
        let a = square(c(0.0, 0.0), 1.0);
        let b = square(c(0.3, 0.0), 1.0);
        let d = hausdorff_distance(&a, &b, 1e-3).unwrap();
        assert!((d - 0.3).abs() < 6e-4, "got {d}");
    }

    #[test]
    fn doubled_square_distance_is_corner_gap() {
        let a = square(c(0.0, 0.0), 1.0);
        let b = square(c(0.0, 0.0), 2.0);
        let d = hausdorff_distance(&a, &b, 1e-3).unwrap();
        let expect = std::f64::consts::SQRT_2;
        assert!((d - expect).abs() < 6e-4, "got {d} want {expect}");
    }

    #[test]
    fn distance_is_symmetric_and_zero_on_self() {
        let a = square(c(-0.4, 1.1), 1.7);
        let b = square(c(0.2, -0.3), 0.9);
        let ab = hausdorff_distance(&a, &b, 1e-3).unwrap();
        let ba = hausdorff_distance(&b, &a, 1e-3).unwrap();
        assert_eq!(ab, ba);
        let aa = hausdorff_distance(&a, &a, 1e-3).unwrap();
        assert!(aa < 1e-12, "self distance {aa}");
    }

    #[test]
    fn normalization_sends_base_corners_to_unit_span() {
        let shape = Shape {
            points: square(c(3.0, -2.0), 5.0),
            corners: vec![0, 1, 2, 3],
            base: (0, 1),
        };
        let norm = normalize_shape(&shape).unwrap();
        assert!(norm.corner_a().norm() < 1e-15);
        assert!((norm.corner_b() - c(1.0, 0.0)).norm() < 1e-15);
        // Shape is similarity-invariant after normalization.
        let rotated = Shape {
            points: shape
                .points
                .iter()
                .map(|&z| z * c(0.6, 0.8) + c(9.0, 9.0))
                .collect(),
            corners: vec![0, 1, 2, 3],
            base: (0, 1),
        };
        let norm2 = normalize_shape(&rotated).unwrap();
        for (p, q) in norm.points.iter().zip(&norm2.points) {
            assert!((p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn coincident_corners_are_rejected() {
        let shape = Shape {
            points: square(c(0.0, 0.0), 1.0),
            corners: vec![0, 0],
            base: (0, 1),
        };
        assert!(matches!(
            normalize_shape(&shape),
            Err(Error::CoincidentCorners)
        ));
    }

    #[test]
    fn grid_handles_far_query_points() {
        let b = square(c(0.0, 0.0), 1.0);
        let grid = SegmentGrid::new(&b);
        let d = grid.nearest(c(100.0, 0.5));
        assert!((d - 99.0).abs() < 1e-12, "got {d}");
        let d2 = grid.nearest(c(0.5, 0.5));
        assert!((d2 - 0.5).abs() < 1e-12, "got {d2}");
    }
}
