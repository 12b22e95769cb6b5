//! Per-prototile distortion bound: triangulate each prototile, embed the
//! triangulation into a unit-side regular n-gon with a Tutte drawing, and
//! bound the worst affine dilatation over the triangles.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geom::{cross, ear_clip, polygon_centroid, polygon_diameter, C, GEOM_TOL};
use crate::rules::{Prototile, SubstitutionRule};

pub const TUTTE_TOL: f64 = 1e-10;
const TUTTE_SWEEP_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TriangulationScheme {
    /// Fan from the polygon centroid; falls back to ear clipping when the
    /// centroid does not see the whole boundary.
    #[default]
    CentroidFan,
    EarClip,
}

/// A triangulated polygon. Boundary points come first (`points[..boundary_len]`
/// is the corner cycle); any interior points follow.
#[derive(Debug, Clone)]
pub struct Triangulation {
    pub points: Vec<C>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_len: usize,
}

impl Triangulation {
    pub fn interior_indices(&self) -> std::ops::Range<usize> {
        self.boundary_len..self.points.len()
    }
}

/// True when `p` sees every boundary edge of the CCW polygon from inside.
fn in_kernel(p: C, poly: &[C]) -> bool {
    let n = poly.len();
    let scale = polygon_diameter(poly);
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        cross(b - a, p - a) > GEOM_TOL * scale * (b - a).norm()
    })
}

/// Triangulates the corner polygon of a prototile.
pub fn triangulate_prototile(
    proto: &Prototile,
    scheme: TriangulationScheme,
) -> Result<Triangulation> {
    let corners = &proto.combinatorial_corners;
    let n = corners.len();
    if n < 3 {
        return Err(Error::DegeneratePolygon(format!(
            "{}: fewer than 3 corners",
            proto.label
        )));
    }
    let centroid = polygon_centroid(corners);
    if scheme == TriangulationScheme::CentroidFan && in_kernel(centroid, corners) {
        let mut points = corners.clone();
        points.push(centroid);
        let triangles = (0..n).map(|i| [i, (i + 1) % n, n]).collect();
        return Ok(Triangulation {
            points,
            triangles,
            boundary_len: n,
        });
    }
    let triangles = ear_clip(corners)?;
    Ok(Triangulation {
        points: corners.clone(),
        triangles,
        boundary_len: n,
    })
}

/// Corners of the regular n-gon with unit sides, corner 0 at the origin and
/// the first side along the positive real axis.
pub fn regular_ngon(n: usize) -> Vec<C> {
    let mut pts = Vec::with_capacity(n);
    let mut z = C::new(0.0, 0.0);
    for k in 0..n {
        pts.push(z);
        let phase = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        z += C::new(phase.cos(), phase.sin());
    }
    pts
}

#[derive(Debug, Clone)]
pub struct Embedding {
    pub positions: Vec<C>,
    pub residual: f64,
    pub sweeps: usize,
}

/// Solves the barycentric system: boundary points pinned at
/// `target_boundary` in order, each interior point the average of its
/// triangulation neighbors. Gauss-Seidel, max-norm residual below tol.
pub fn tutte_embed(tri: &Triangulation, target_boundary: &[C], tol: f64) -> Result<Embedding> {
    if target_boundary.len() != tri.boundary_len {
        return Err(Error::EmbeddingFailure(format!(
            "target boundary has {} points, triangulation has {}",
            target_boundary.len(),
            tri.boundary_len
        )));
    }
    let total = tri.points.len();
    let mut neighbors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); total];
    for t in &tri.triangles {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            neighbors[a].insert(b);
            neighbors[b].insert(a);
        }
    }
    let mut pos: Vec<C> = Vec::with_capacity(total);
    pos.extend_from_slice(target_boundary);
    let seed = target_boundary.iter().sum::<C>() / target_boundary.len() as f64;
    pos.resize(total, seed);

    let interior: Vec<usize> = tri.interior_indices().collect();
    for &v in &interior {
        if neighbors[v].is_empty() {
            return Err(Error::SingularSystem(format!(
                "interior point {v} has no neighbors"
            )));
        }
    }
    if interior.is_empty() {
        return Ok(Embedding {
            positions: pos,
            residual: 0.0,
            sweeps: 0,
        });
    }
    let mut residual = f64::INFINITY;
    let mut sweeps = 0;
    while residual > tol {
        if sweeps >= TUTTE_SWEEP_CAP {
            return Err(Error::EmbeddingFailure(format!(
                "barycentric solve stalled at residual {residual:.3e}"
            )));
        }
        for &v in &interior {
            let sum: C = neighbors[v].iter().map(|&u| pos[u]).sum();
            pos[v] = sum / neighbors[v].len() as f64;
        }
        residual = interior
            .iter()
            .map(|&v| {
                let sum: C = neighbors[v].iter().map(|&u| pos[u]).sum();
                (pos[v] - sum / neighbors[v].len() as f64).norm()
            })
            .fold(0.0, f64::max);
        sweeps += 1;
    }
    Ok(Embedding {
        positions: pos,
        residual,
        sweeps,
    })
}

/// Linear part of the affine map taking one triangle onto another with
/// vertices in order.
#[derive(Debug, Clone, Copy)]
pub struct LinearMap2 {
    /// Row-major entries [[a, b], [c, d]].
    pub m: [f64; 4],
}

impl LinearMap2 {
    pub fn from_triangles(src: &[C; 3], dst: &[C; 3]) -> Result<Self> {
        let s1 = src[1] - src[0];
        let s2 = src[2] - src[0];
        let t1 = dst[1] - dst[0];
        let t2 = dst[2] - dst[0];
        let det = cross(s1, s2);
        let scale = s1.norm().max(s2.norm());
        if det.abs() <= GEOM_TOL * scale * scale {
            return Err(Error::DegenerateTriangle);
        }
        // L = [t1 t2] [s1 s2]^{-1}, columns acting on source coordinates.
        let inv = [s2.im / det, -s2.re / det, -s1.im / det, s1.re / det];
        Ok(LinearMap2 {
            m: [
                t1.re * inv[0] + t2.re * inv[2],
                t1.re * inv[1] + t2.re * inv[3],
                t1.im * inv[0] + t2.im * inv[2],
                t1.im * inv[1] + t2.im * inv[3],
            ],
        })
    }

    pub fn det(&self) -> f64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    pub fn apply(&self, v: C) -> C {
        C::new(
            self.m[0] * v.re + self.m[1] * v.im,
            self.m[2] * v.re + self.m[3] * v.im,
        )
    }

    /// Singular values via the closed 2x2 form.
    pub fn singular_values(&self) -> (f64, f64) {
        let [a, b, c, d] = self.m;
        let e = (a + d) / 2.0;
        let f = (a - d) / 2.0;
        let g = (c + b) / 2.0;
        let h = (c - b) / 2.0;
        let q = f64::hypot(e, h);
        let r = f64::hypot(f, g);
        (q + r, (q - r).abs())
    }

    /// Ratio of singular values, >= 1; errors when the map collapses.
    pub fn dilatation(&self) -> Result<f64> {
        let (smax, smin) = self.singular_values();
        if !(smin > 0.0) || !smax.is_finite() {
            return Err(Error::DegenerateTriangle);
        }
        Ok(smax / smin)
    }
}

/// Dilatation of the affine map matching two triangles vertex by vertex.
pub fn triangle_dilatation(src: &[C; 3], dst: &[C; 3]) -> Result<f64> {
    LinearMap2::from_triangles(src, dst)?.dilatation()
}

#[derive(Debug, Clone)]
pub struct PrototileDilatation {
    pub prototile: usize,
    pub label: String,
    /// Per-triangle dilatations, in triangulation order.
    pub kappas: Vec<f64>,
    /// Max over the triangles.
    pub kappa: f64,
    /// Triangles whose embedded image has negative orientation.
    pub flipped: usize,
    pub tutte_residual: f64,
}

#[derive(Debug, Clone)]
pub struct DilatationReport {
    pub per_prototile: Vec<PrototileDilatation>,
    /// Max over all prototiles.
    pub kappa: f64,
}

/// Triangulates one prototile, embeds it in the unit-side regular n-gon,
/// and reports the per-triangle dilatations.
pub fn prototile_dilatation(
    proto: &Prototile,
    scheme: TriangulationScheme,
) -> Result<PrototileDilatation> {
    let tri = triangulate_prototile(proto, scheme)?;
    let target = regular_ngon(tri.boundary_len);
    let emb = tutte_embed(&tri, &target, TUTTE_TOL)?;
    let mut kappas = Vec::with_capacity(tri.triangles.len());
    let mut flipped = 0;
    for t in &tri.triangles {
        let src = [tri.points[t[0]], tri.points[t[1]], tri.points[t[2]]];
        let dst = [emb.positions[t[0]], emb.positions[t[1]], emb.positions[t[2]]];
        let map = LinearMap2::from_triangles(&src, &dst)?;
        if map.det() < 0.0 {
            flipped += 1;
        }
        kappas.push(map.dilatation()?);
    }
    let kappa = kappas.iter().copied().fold(1.0, f64::max);
    Ok(PrototileDilatation {
        prototile: proto.id,
        label: proto.label.clone(),
        kappas,
        kappa,
        flipped,
        tutte_residual: emb.residual,
    })
}

/// The distortion bound of a rule: worst triangle dilatation over every
/// prototile's embedding. Depends only on the prototiles, so it is
/// unchanged by subdivision.
pub fn rule_kappa(rule: &SubstitutionRule, scheme: TriangulationScheme) -> Result<DilatationReport> {
    let per: Vec<PrototileDilatation> = rule
        .prototiles
        .iter()
        .map(|p| prototile_dilatation(p, scheme))
        .collect::<Result<_>>()?;
    let kappa = per.iter().map(|r| r.kappa).fold(1.0, f64::max);
    Ok(DilatationReport {
        per_prototile: per,
        kappa,
    })
}
