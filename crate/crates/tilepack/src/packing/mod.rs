//! Circle packing of a welded complex: combinatorial triangulation with
//! refinement, radius solving in two geometries, center layout, and
//! diagnostics.
//!
//! The triangulation is purely combinatorial. Every n-sided tile is modeled
//! as a unit-side regular n-gon fanned from a center vertex, so same-sided
//! tiles get identical discrete charts regardless of their Euclidean shape;
//! the packing then realizes the complex's conformal structure.

mod layout;
mod solve;

pub use layout::{layout, LayoutAnchor};
pub use solve::{solve_radii, PackMode, SolveOptions};

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::TileComplex;
use crate::error::{Error, Result};
use crate::geom::C;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexTag {
    /// A welded complex vertex (payload: its id in the complex).
    Corner(usize),
    /// Refinement vertex on a complex edge (payload: edge index).
    EdgePoint(usize),
    /// Fan center of a tile (payload: tile index).
    Center(usize),
    /// Refinement vertex in a tile interior.
    Refine,
}

impl VertexTag {
    pub fn word(&self) -> &'static str {
        match self {
            VertexTag::Corner(_) => "corner",
            VertexTag::EdgePoint(_) => "edge",
            VertexTag::Center(_) => "center",
            VertexTag::Refine => "refine",
        }
    }
}

/// Ordered petals around one vertex. Closed flowers wrap around (interior
/// vertices); open flowers run from one boundary neighbor to the other.
#[derive(Debug, Clone)]
pub struct Flower {
    pub petals: Vec<usize>,
    pub closed: bool,
}

#[derive(Debug, Clone)]
pub struct PackingComplex {
    pub tags: Vec<VertexTag>,
    /// CCW vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Owning tile of each triangle.
    pub triangle_tile: Vec<usize>,
    pub flowers: Vec<Flower>,
    /// Unique undirected edges (a < b).
    pub edges: Vec<(usize, usize)>,
    pub is_boundary: Vec<bool>,
    /// Boundary vertex cycle, CCW, refined.
    pub boundary: Vec<usize>,
    /// Per complex edge: the refined vertex chain from EdgeRec.a to
    /// EdgeRec.b inclusive (2^hex_depth + 1 vertices).
    pub chains: Vec<Vec<usize>>,
    /// Per tile: its fan center vertex.
    pub centers: Vec<usize>,
    /// Per tile: every triangulation vertex of its sub-triangulation.
    pub tile_vertices: Vec<Vec<usize>>,
    pub hex_depth: usize,
    /// Triangulation ids 0..complex_vertex_count coincide with complex
    /// vertex ids.
    pub complex_vertex_count: usize,
}

impl PackingComplex {
    pub fn vertex_count(&self) -> usize {
        self.tags.len()
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_count()).filter(|&v| !self.is_boundary[v])
    }

    /// Chain for the complex edge between complex vertices u and v,
    /// oriented from u to v.
    pub fn chain_between(&self, complex: &TileComplex, u: usize, v: usize) -> Result<Vec<usize>> {
        let key = (u.min(v), u.max(v));
        let e = complex
            .edges
            .binary_search_by_key(&key, |r| (r.a, r.b))
            .map_err(|_| Error::Topology(format!("no complex edge ({u}, {v})")))?;
        let chain = &self.chains[e];
        if complex.edges[e].a == u {
            Ok(chain.clone())
        } else {
            Ok(chain.iter().rev().copied().collect())
        }
    }
}

/// Geometry of a packing: circles in the plane, or circles in the
/// hyperbolic disc with horocycles on the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Euclidean,
    Hyperbolic,
}

impl Geometry {
    pub fn word(&self) -> &'static str {
        match self {
            Geometry::Euclidean => "euclidean",
            Geometry::Hyperbolic => "hyperbolic",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Circle {
    pub center: C,
    pub radius: f64,
}

#[derive(Debug, Clone)]
pub struct Packing {
    pub geometry: Geometry,
    /// Model radii; hyperbolic boundary radii are infinite.
    pub radii: Vec<f64>,
    /// Max interior angle-sum error at the end of the solve.
    pub residual: f64,
    /// Sweep-equivalents spent (full residual evaluations count too).
    pub sweeps: usize,
    /// Model-coordinate centers after layout (hyperbolic: disc points,
    /// ideal points for horocycles).
    pub positions: Option<Vec<C>>,
    /// Euclidean representative circles after layout.
    pub circles: Option<Vec<Circle>>,
    /// Worst disagreement between independent placements of one vertex.
    pub layout_gap: f64,
}

/// Builds the refined fan triangulation of a welded complex. Tile fans
/// share the refined chains along shared complex edges.
pub fn build_triangulation(complex: &TileComplex, hex_depth: usize) -> Result<PackingComplex> {
    let vc = complex.vertex_count();
    let mut tags: Vec<VertexTag> = (0..vc).map(VertexTag::Corner).collect();

    let mut centers = Vec::with_capacity(complex.tiles.len());
    for t in 0..complex.tiles.len() {
        tags.push(VertexTag::Center(t));
        centers.push(vc + t);
    }

    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut triangle_tile: Vec<usize> = Vec::new();
    for (t, tile) in complex.tiles.iter().enumerate() {
        let k = tile.corners.len();
        for i in 0..k {
            triangles.push([tile.corners[i], tile.corners[(i + 1) % k], centers[t]]);
            triangle_tile.push(t);
        }
    }

    // Segment -> complex edge bookkeeping so refinement vertices landing on
    // complex edges are tagged and chained.
    let mut seg_edge: BTreeMap<(usize, usize), usize> = complex
        .edges
        .iter()
        .enumerate()
        .map(|(e, rec)| ((rec.a, rec.b), e))
        .collect();
    let mut chains: Vec<Vec<usize>> = complex.edges.iter().map(|rec| vec![rec.a, rec.b]).collect();

    for _ in 0..hex_depth {
        let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut next_tris = Vec::with_capacity(triangles.len() * 4);
        let mut next_tile = Vec::with_capacity(triangles.len() * 4);
        for (ti, tri) in triangles.iter().enumerate() {
            let mut mids = [0usize; 3];
            for (slot, (u, v)) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])]
                .into_iter()
                .enumerate()
            {
                let key = (u.min(v), u.max(v));
                let m = *midpoint.entry(key).or_insert_with(|| {
                    let id = tags.len();
                    if let Some(&e) = seg_edge.get(&key) {
                        tags.push(VertexTag::EdgePoint(e));
                    } else {
                        tags.push(VertexTag::Refine);
                    }
                    id
                });
                // Split the chain segment the first time we see it.
                if let Some(e) = seg_edge.remove(&key) {
                    seg_edge.insert((key.0.min(m), key.0.max(m)), e);
                    seg_edge.insert((key.1.min(m), key.1.max(m)), e);
                    let chain = &mut chains[e];
                    let iu = chain.iter().position(|&x| x == key.0).unwrap();
                    let iv = chain.iter().position(|&x| x == key.1).unwrap();
                    debug_assert_eq!(iu.abs_diff(iv), 1);
                    chain.insert(iu.max(iv), m);
                }
                mids[slot] = m;
            }
            let [a, b, c] = *tri;
            let [mab, mbc, mca] = mids;
            for tri2 in [[a, mab, mca], [mab, b, mbc], [mca, mbc, c], [mab, mbc, mca]] {
                next_tris.push(tri2);
                next_tile.push(triangle_tile[ti]);
            }
        }
        triangles = next_tris;
        triangle_tile = next_tile;
    }

    let n = tags.len();

    let mut edge_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    for tri in &triangles {
        for (u, v) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            edge_set.insert((u.min(v), u.max(v)));
        }
    }
    let edges: Vec<(usize, usize)> = edge_set.into_iter().collect();

    let mut is_boundary = vec![false; n];
    for rec in &complex.edges {
        if rec.tiles.len() == 1 {
            let key = (rec.a, rec.b);
            let e = complex
                .edges
                .binary_search_by_key(&key, |r| (r.a, r.b))
                .expect("edge list is sorted by construction");
            for &v in &chains[e] {
                is_boundary[v] = true;
            }
        }
    }

    let flowers = build_flowers(n, &triangles, &is_boundary)?;

    let coarse_boundary = complex.boundary_cycle()?;
    let mut boundary = Vec::new();
    for i in 0..coarse_boundary.len() {
        let u = coarse_boundary[i];
        let v = coarse_boundary[(i + 1) % coarse_boundary.len()];
        let key = (u.min(v), u.max(v));
        let e = complex
            .edges
            .binary_search_by_key(&key, |r| (r.a, r.b))
            .map_err(|_| Error::Topology("boundary edge missing".into()))?;
        let chain = &chains[e];
        if complex.edges[e].a == u {
            boundary.extend(chain[..chain.len() - 1].iter().copied());
        } else {
            boundary.extend(chain[1..].iter().rev().copied());
        }
    }

    let mut tile_vertices: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); complex.tiles.len()];
    for (ti, tri) in triangles.iter().enumerate() {
        let t = triangle_tile[ti];
        tile_vertices[t].extend(tri.iter().copied());
    }
    let tile_vertices: Vec<Vec<usize>> = tile_vertices
        .into_iter()
        .map(|s| s.into_iter().collect())
        .collect();

    Ok(PackingComplex {
        tags,
        triangles,
        triangle_tile,
        flowers,
        edges,
        is_boundary,
        boundary,
        chains,
        centers,
        tile_vertices,
        hex_depth,
        complex_vertex_count: vc,
    })
}

/// CCW petal cycles from the directed-edge successor relation: triangle
/// (x, y, z) makes z follow y around x.
fn build_flowers(n: usize, triangles: &[[usize; 3]], is_boundary: &[bool]) -> Result<Vec<Flower>> {
    let mut succ: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
    for tri in triangles {
        for (x, y, z) in [
            (tri[0], tri[1], tri[2]),
            (tri[1], tri[2], tri[0]),
            (tri[2], tri[0], tri[1]),
        ] {
            if succ[x].insert(y, z).is_some() {
                return Err(Error::Topology(format!(
                    "directed edge ({x}, {y}) borders two triangles on the same side"
                )));
            }
        }
    }
    let mut flowers = Vec::with_capacity(n);
    for v in 0..n {
        let s = &succ[v];
        if s.is_empty() {
            return Err(Error::Topology(format!("vertex {v} belongs to no triangle")));
        }
        let followed: BTreeSet<usize> = s.values().copied().collect();
        let mut starts = s.keys().copied().filter(|p| !followed.contains(p));
        let (start, closed) = match starts.next() {
            Some(p) => (p, false),
            None => (*s.keys().next().unwrap(), true),
        };
        let mut petals = vec![start];
        let mut cur = start;
        while let Some(&nxt) = s.get(&cur) {
            if nxt == start {
                break;
            }
            petals.push(nxt);
            cur = nxt;
            if petals.len() > s.len() + 1 {
                return Err(Error::Topology(format!("flower of vertex {v} does not close")));
            }
        }
        let expect = if closed { s.len() } else { s.len() + 1 };
        if petals.len() != expect {
            return Err(Error::Topology(format!(
                "flower of vertex {v} is pinched ({} petals, {expect} expected)",
                petals.len()
            )));
        }
        if closed == is_boundary[v] {
            return Err(Error::Topology(format!(
                "vertex {v}: flower closure disagrees with boundary marking"
            )));
        }
        flowers.push(Flower { petals, closed });
    }
    Ok(flowers)
}

/// Independent recomputation of solve/layout quality measures.
#[derive(Debug, Clone, Copy)]
pub struct PackingDiagnostics {
    pub max_angle_residual: f64,
    pub mean_angle_residual: f64,
    /// Max over edges of ||center gap| - (r_u + r_v)| on the Euclidean
    /// representatives; NAN before layout.
    pub max_tangency_gap: f64,
    /// Mean Euclidean representative radius; NAN before layout.
    pub mean_radius: f64,
}

pub fn packing_error(pc: &PackingComplex, packing: &Packing) -> PackingDiagnostics {
    let mut max_res = 0.0f64;
    let mut sum_res = 0.0f64;
    let mut count = 0usize;
    for v in pc.interior_vertices() {
        let theta = solve::angle_sum(pc, &packing.radii, packing.geometry, v);
        let err = (theta - std::f64::consts::TAU).abs();
        max_res = max_res.max(err);
        sum_res += err;
        count += 1;
    }
    let (max_gap, mean_radius) = match &packing.circles {
        Some(circles) => {
            let mut gap = 0.0f64;
            for &(u, v) in &pc.edges {
                let (cu, cv) = (circles[u], circles[v]);
                let d = (cu.center - cv.center).norm();
                gap = gap.max((d - (cu.radius + cv.radius)).abs());
            }
            let mean = circles.iter().map(|c| c.radius).sum::<f64>() / circles.len() as f64;
            (gap, mean)
        }
        None => (f64::NAN, f64::NAN),
    };
    PackingDiagnostics {
        max_angle_residual: max_res,
        mean_angle_residual: if count > 0 { sum_res / count as f64 } else { 0.0 },
        max_tangency_gap: max_gap,
        mean_radius,
    }
}
