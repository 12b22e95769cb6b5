//! Planar primitives: complex points, similarities, polygon predicates,
//! triangulation, and clipped-area computations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C = Complex64;

/// Absolute tolerance for geometric predicates on unit-scale inputs.
pub const GEOM_TOL: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn cross(a: C, b: C) -> f64 {
    a.re * b.im - a.im * b.re
}

pub fn dot(a: C, b: C) -> f64 {
    a.re * b.re + a.im * b.im
}

/// Orientation-preserving similarity z -> factor * z + offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub factor: C,
    pub offset: C,
}

impl Similarity {
    pub const IDENTITY: Similarity = Similarity {
        factor: C::new(1.0, 0.0),
        offset: C::new(0.0, 0.0),
    };

    pub fn new(factor: C, offset: C) -> Self {
        Similarity { factor, offset }
    }

    pub fn apply(&self, z: C) -> C {
        self.factor * z + self.offset
    }

    pub fn scale(&self) -> f64 {
        self.factor.norm()
    }

    /// self after inner: (self ∘ inner)(z) = self(inner(z)).
    pub fn compose(&self, inner: &Similarity) -> Similarity {
        Similarity {
            factor: self.factor * inner.factor,
            offset: self.factor * inner.offset + self.offset,
        }
    }

    pub fn inverse(&self) -> Similarity {
        let f = C::new(1.0, 0.0) / self.factor;
        Similarity {
            factor: f,
            offset: -f * self.offset,
        }
    }

    pub fn is_congruence(&self, tol: f64) -> bool {
        (self.scale() - 1.0).abs() <= tol
    }
}

/// Signed polygon area, positive for counterclockwise orientation.
pub fn polygon_area(pts: &[C]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        s += cross(pts[i], pts[(i + 1) % n]);
    }
    s / 2.0
}

/// Area centroid of a simple polygon.
pub fn polygon_centroid(pts: &[C]) -> C {
    let n = pts.len();
    let mut a = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let w = cross(p, q);
        a += w;
        cx += (p.re + q.re) * w;
        cy += (p.im + q.im) * w;
    }
    c(cx / (3.0 * a), cy / (3.0 * a))
}

pub fn polygon_diameter(pts: &[C]) -> f64 {
    let mut d = 0.0_f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max((pts[i] - pts[j]).norm());
        }
    }
    d
}

/// Distance from a point to a closed segment.
pub fn segment_distance(p: C, a: C, b: C) -> f64 {
    let ab = b - a;
    let len2 = dot(ab, ab);
    if len2 <= f64::MIN_POSITIVE {
        return (p - a).norm();
    }
    let t = (dot(p - a, ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Distance from a point to a polygon boundary.
pub fn boundary_distance(p: C, pts: &[C]) -> f64 {
    let n = pts.len();
    let mut d = f64::INFINITY;
    for i in 0..n {
        d = d.min(segment_distance(p, pts[i], pts[(i + 1) % n]));
    }
    d
}

/// Strict interior test by winding parity; points within tol of the
/// boundary count as inside.
pub fn point_in_polygon(p: C, pts: &[C], tol: f64) -> bool {
    if boundary_distance(p, pts) <= tol {
        return true;
    }
    let n = pts.len();
    let mut inside = false;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        if (a.im > p.im) != (b.im > p.im) {
            let x = a.re + (p.im - a.im) / (b.im - a.im) * (b.re - a.re);
            if x > p.re {
                inside = !inside;
            }
        }
    }
    inside
}

/// True when q lies strictly inside segment (a, b), away from endpoints.
pub fn on_segment_interior(q: C, a: C, b: C, tol: f64, end_tol: f64) -> bool {
    segment_distance(q, a, b) <= tol && (q - a).norm() > end_tol && (q - b).norm() > end_tol
}

/// True when segments a and b are collinear with a positive-length overlap
/// whose endpoint sets do not match, i.e. a partial edge contact.
pub fn partial_edge_overlap(a: (C, C), b: (C, C), tol: f64) -> bool {
    let dir = a.1 - a.0;
    let len = dir.norm();
    if len <= tol {
        return false;
    }
    let u = dir / len;
    let off0 = (b.0 - a.0) / u;
    let off1 = (b.1 - a.0) / u;
    if off0.im.abs() > tol || off1.im.abs() > tol {
        return false;
    }
    let (lo, hi) = (off0.re.min(off1.re), off0.re.max(off1.re));
    let overlap = hi.min(len) - lo.max(0.0);
    if overlap <= tol {
        return false;
    }
    let ends_match = ((b.0 - a.0).norm() <= tol && (b.1 - a.1).norm() <= tol)
        || ((b.0 - a.1).norm() <= tol && (b.1 - a.0).norm() <= tol);
    !ends_match
}

fn proper_segment_crossing(a: C, b: C, p: C, q: C) -> bool {
    let d1 = cross(b - a, p - a);
    let d2 = cross(b - a, q - a);
    let d3 = cross(q - p, a - p);
    let d4 = cross(q - p, b - p);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0)
}

/// Simple-polygon test: positive area, no repeated vertices, no edge
/// crossings between non-adjacent edges.
pub fn is_simple_ccw(pts: &[C], tol: f64) -> bool {
    let n = pts.len();
    if n < 3 || polygon_area(pts) <= tol {
        return false;
    }
    for i in 0..n {
        if (pts[i] - pts[(i + 1) % n]).norm() <= tol {
            return false;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if i == j || (i + 1) % n == j || (j + 1) % n == i {
                continue;
            }
            if proper_segment_crossing(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Ear-clipping triangulation of a simple CCW polygon; returns index triples.
pub fn ear_clip(pts: &[C]) -> Result<Vec<[usize; 3]>> {
    let n = pts.len();
    if n < 3 {
        return Err(Error::DegeneratePolygon("fewer than 3 vertices".into()));
    }
    let scale = polygon_diameter(pts);
    let area_tol = GEOM_TOL * scale * scale;
    let mut idx: Vec<usize> = (0..n).collect();
    let mut tris = Vec::with_capacity(n - 2);
    let mut guard = 0usize;
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let (i0, i1, i2) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            let (a, b, q) = (pts[i0], pts[i1], pts[i2]);
            if cross(b - a, q - a) <= area_tol {
                continue;
            }
            let mut contains = false;
            for &j in &idx {
                if j == i0 || j == i1 || j == i2 {
                    continue;
                }
                let p = pts[j];
                let inside = cross(b - a, p - a) >= -area_tol
                    && cross(q - b, p - b) >= -area_tol
                    && cross(a - q, p - q) >= -area_tol;
                if inside {
                    contains = true;
                    break;
                }
            }
            if !contains {
                tris.push([i0, i1, i2]);
                idx.remove(k);
                clipped = true;
                break;
            }
        }
        if !clipped {
            return Err(Error::DegeneratePolygon("ear clipping stalled".into()));
        }
        guard += 1;
        if guard > 4 * n {
            return Err(Error::DegeneratePolygon("ear clipping loop guard".into()));
        }
    }
    tris.push([idx[0], idx[1], idx[2]]);
    Ok(tris)
}

/// Sutherland-Hodgman clip of a convex subject polygon against a convex
/// clip polygon; returns the intersection area.
pub fn convex_clip_area(subject: &[C], clip: &[C]) -> f64 {
    let mut poly: Vec<C> = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if poly.is_empty() {
            return 0.0;
        }
        let a = clip[i];
        let b = clip[(i + 1) % n];
        let dir = b - a;
        let mut out: Vec<C> = Vec::with_capacity(poly.len() + 2);
        for j in 0..poly.len() {
            let p = poly[j];
            let q = poly[(j + 1) % poly.len()];
            let sp = cross(dir, p - a);
            let sq = cross(dir, q - a);
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0) {
                let t = sp / (sp - sq);
                out.push(p + (q - p) * t);
            }
        }
        poly = out;
    }
    if poly.len() < 3 {
        0.0
    } else {
        polygon_area(&poly).abs()
    }
}

/// Area of intersection of two simple polygons, computed by triangulating
/// both and summing pairwise convex clips.
pub fn intersection_area(a: &[C], b: &[C]) -> Result<f64> {
    let ta = ear_clip(a)?;
    let tb = ear_clip(b)?;
    let mut area = 0.0;
    for ia in &ta {
        let tri_a = [a[ia[0]], a[ia[1]], a[ia[2]]];
        let (alo, ahi) = tri_bbox(&tri_a);
        for ib in &tb {
            let tri_b = [b[ib[0]], b[ib[1]], b[ib[2]]];
            let (blo, bhi) = tri_bbox(&tri_b);
            if alo.re > bhi.re || blo.re > ahi.re || alo.im > bhi.im || blo.im > ahi.im {
                continue;
            }
            area += convex_clip_area(&tri_a, &tri_b);
        }
    }
    Ok(area)
}

fn tri_bbox(t: &[C; 3]) -> (C, C) {
    let lo = c(
        t[0].re.min(t[1].re).min(t[2].re),
        t[0].im.min(t[1].im).min(t[2].im),
    );
    let hi = c(
        t[0].re.max(t[1].re).max(t[2].re),
        t[0].im.max(t[1].im).max(t[2].im),
    );
    (lo, hi)
}

pub fn bbox(pts: &[C]) -> (C, C) {
    let mut lo = c(f64::INFINITY, f64::INFINITY);
    let mut hi = c(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo = c(lo.re.min(p.re), lo.im.min(p.im));
        hi = c(hi.re.max(p.re), hi.im.max(p.im));
    }
    (lo, hi)
}
