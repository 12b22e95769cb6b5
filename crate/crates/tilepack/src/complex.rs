//! Welded tile complexes: canonical vertices, edge incidences, Euler count,
//! boundary extraction, aggregate boundaries, and the pairwise intersection
//! condition.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::geom::{
    bbox, intersection_area, on_segment_interior, partial_edge_overlap, polygon_area, Similarity,
    C,
};
use crate::patch::Patch;
use crate::rules::SubstitutionRule;

/// Relative weld tolerance: eps = WELD_EPS_FACTOR x patch diameter.
pub const WELD_EPS_FACTOR: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ComplexTile {
    pub prototile: usize,
    pub map: Similarity,
    /// Welded vertex ids, one per combinatorial corner, in CCW cycle order.
    pub corners: Vec<usize>,
    pub lineage: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct EdgeRec {
    /// Endpoint vertex ids with a < b.
    pub a: usize,
    pub b: usize,
    /// Incident tile indices; 1 on the boundary, 2 in the interior.
    pub tiles: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct TileComplex {
    pub rule_name: String,
    pub vertices: Vec<C>,
    pub tiles: Vec<ComplexTile>,
    pub edges: Vec<EdgeRec>,
    pub weld_eps: f64,
    /// Prototile and placement of the patch's single ancestor, when the
    /// patch descends from one seed tile.
    pub host: Option<(usize, Similarity)>,
}

impl TileComplex {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.tiles.len()
    }

    /// V - E + F; equals 1 exactly when the complex is a closed disc.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn boundary_edge_indices(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].tiles.len() == 1)
            .collect()
    }

    pub fn boundary_vertex_count(&self) -> usize {
        let mut seen = BTreeSet::new();
        for e in self.boundary_edge_indices() {
            seen.insert(self.edges[e].a);
            seen.insert(self.edges[e].b);
        }
        seen.len()
    }

    pub fn interior_vertex_count(&self) -> usize {
        self.vertex_count() - self.boundary_vertex_count()
    }

    pub fn max_edge_multiplicity(&self) -> usize {
        self.edges.iter().map(|e| e.tiles.len()).max().unwrap_or(0)
    }

    /// Welded polygon of a tile (canonical vertex coordinates).
    pub fn tile_polygon(&self, t: usize) -> Vec<C> {
        self.tiles[t]
            .corners
            .iter()
            .map(|&v| self.vertices[v])
            .collect()
    }

    /// Directed corner edge (u, v) of tile t, oriented as in the cycle.
    fn directed_edges_of(&self, t: usize) -> Vec<(usize, usize)> {
        let cs = &self.tiles[t].corners;
        let k = cs.len();
        (0..k).map(|i| (cs[i], cs[(i + 1) % k])).collect()
    }

    /// Boundary vertex cycle in CCW order (tile interiors on the left),
    /// starting at the smallest boundary vertex id. Errors if the boundary
    /// is pinched or disconnected.
    pub fn boundary_cycle(&self) -> Result<Vec<usize>> {
        let keep: Vec<bool> = vec![true; self.tiles.len()];
        walk_region_boundary(self, &keep)
    }
}

/// Boundary cycle of the union of the tiles flagged in `keep`, CCW.
/// Directed boundary edges inherit the orientation of their unique flagged
/// incident tile, whose corner cycle is CCW.
fn walk_region_boundary(complex: &TileComplex, keep: &[bool]) -> Result<Vec<usize>> {
    let mut boundary: BTreeSet<(usize, usize)> = BTreeSet::new();
    for rec in &complex.edges {
        let inside: Vec<usize> = rec.tiles.iter().copied().filter(|&t| keep[t]).collect();
        if inside.len() != 1 {
            continue;
        }
        let t = inside[0];
        let dir = complex
            .directed_edges_of(t)
            .into_iter()
            .find(|&(u, v)| (u.min(v), u.max(v)) == (rec.a, rec.b))
            .ok_or_else(|| {
                Error::Topology(format!(
                    "edge ({}, {}) missing from its incident tile",
                    rec.a, rec.b
                ))
            })?;
        boundary.insert(dir);
    }
    if boundary.is_empty() {
        return Err(Error::Topology("region has no boundary edges".into()));
    }
    let mut succ = BTreeMap::new();
    for &(u, v) in &boundary {
        if succ.insert(u, v).is_some() {
            return Err(Error::Topology(format!("boundary pinches at vertex {u}")));
        }
    }
    let start = *succ.keys().next().unwrap();
    let mut cycle = vec![start];
    let mut cur = succ[&start];
    while cur != start {
        cycle.push(cur);
        cur = *succ
            .get(&cur)
            .ok_or_else(|| Error::Topology(format!("boundary breaks at vertex {cur}")))?;
        if cycle.len() > boundary.len() {
            return Err(Error::Topology("boundary walk does not close".into()));
        }
    }
    if cycle.len() != boundary.len() {
        return Err(Error::Topology("boundary has more than one cycle".into()));
    }
    Ok(cycle)
}

/// Sparse point-matching grid with cell size eps; any point within eps of a
/// query lies in the 3x3 cell neighborhood.
struct WeldGrid {
    eps: f64,
    cells: BTreeMap<(i64, i64), Vec<usize>>,
}

impl WeldGrid {
    fn new(eps: f64) -> Self {
        WeldGrid {
            eps,
            cells: BTreeMap::new(),
        }
    }

    fn key(&self, p: C) -> (i64, i64) {
        (
            (p.re / self.eps).floor() as i64,
            (p.im / self.eps).floor() as i64,
        )
    }

    fn find(&self, p: C, points: &[C]) -> Option<usize> {
        let (kx, ky) = self.key(p);
        let mut best: Option<(f64, usize)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.cells.get(&(kx + dx, ky + dy)) {
                    for &id in ids {
                        let d = (points[id] - p).norm();
                        if d <= self.eps && best.map_or(true, |(bd, _)| d < bd) {
                            best = Some((d, id));
                        }
                    }
                }
            }
        }
        best.map(|(_, id)| id)
    }

    fn insert(&mut self, p: C, id: usize) {
        self.cells.entry(self.key(p)).or_default().push(id);
    }
}

/// Identifies coincident corner images across tiles. The first occurrence
/// of each point becomes the canonical vertex; later images within eps weld
/// onto it. Default eps is 1e-6 times the patch diameter.
///
/// Errors when two corners of one tile collapse to the same vertex, and
/// when two welded tiles meet along collinear partially overlapping edges
/// at a shared vertex.
pub fn weld(rule: &SubstitutionRule, patch: &Patch, eps: Option<f64>) -> Result<TileComplex> {
    if patch.is_empty() {
        return Err(Error::Topology("cannot weld an empty patch".into()));
    }
    let placed: Vec<Vec<C>> = (0..patch.len())
        .map(|i| patch.placed_corners(rule, i))
        .collect();
    let eps = match eps {
        Some(e) if e > 0.0 => e,
        Some(e) => {
            return Err(Error::Topology(format!(
                "weld tolerance {e} must be positive"
            )));
        }
        None => {
            let all: Vec<C> = placed.iter().flatten().copied().collect();
            let (lo, hi) = bbox(&all);
            WELD_EPS_FACTOR * (hi - lo).norm().max(f64::MIN_POSITIVE)
        }
    };

    let mut vertices: Vec<C> = Vec::new();
    let mut grid = WeldGrid::new(eps);
    let mut tiles = Vec::with_capacity(patch.len());
    for (i, corners) in placed.iter().enumerate() {
        let mut ids = Vec::with_capacity(corners.len());
        for &p in corners {
            let id = match grid.find(p, &vertices) {
                Some(id) => id,
                None => {
                    vertices.push(p);
                    grid.insert(p, vertices.len() - 1);
                    vertices.len() - 1
                }
            };
            ids.push(id);
        }
        let distinct: BTreeSet<usize> = ids.iter().copied().collect();
        if distinct.len() != ids.len() {
            return Err(Error::DegenerateTile(format!(
                "tile {i}: two corners weld to one vertex at eps {eps:.3e}"
            )));
        }
        let t = patch.tile(i);
        tiles.push(ComplexTile {
            prototile: t.prototile,
            map: t.map,
            corners: ids,
            lineage: patch.lineage_path(patch.tiles[i]),
        });
    }

    let mut edge_map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (ti, tile) in tiles.iter().enumerate() {
        let k = tile.corners.len();
        for i in 0..k {
            let (u, v) = (tile.corners[i], tile.corners[(i + 1) % k]);
            edge_map.entry((u.min(v), u.max(v))).or_default().push(ti);
        }
    }
    let edges: Vec<EdgeRec> = edge_map
        .into_iter()
        .map(|((a, b), tiles)| EdgeRec { a, b, tiles })
        .collect();

    let host = patch
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, t)| t.parent.is_none())
        .map(|(_, t)| (t.prototile, t.map))
        .collect::<Vec<_>>();
    let host = if host.len() == 1 { Some(host[0]) } else { None };

    let complex = TileComplex {
        rule_name: rule.name.clone(),
        vertices,
        tiles,
        edges,
        weld_eps: eps,
        host,
    };
    detect_anchored_partial_overlaps(&complex)?;
    Ok(complex)
}

/// Cheap weld-time screen: for tiles meeting at a welded vertex, edges
/// emanating from that vertex must not overlap partially. The full
/// pairwise check lives in check_intersection_condition.
fn detect_anchored_partial_overlaps(complex: &TileComplex) -> Result<()> {
    let mut star: BTreeMap<usize, Vec<(usize, C, C)>> = BTreeMap::new();
    for (ti, tile) in complex.tiles.iter().enumerate() {
        let k = tile.corners.len();
        for i in 0..k {
            let v = tile.corners[i];
            let nxt = complex.vertices[tile.corners[(i + 1) % k]];
            let prv = complex.vertices[tile.corners[(i + k - 1) % k]];
            let at = complex.vertices[v];
            star.entry(v).or_default().push((ti, at, nxt));
            star.entry(v).or_default().push((ti, at, prv));
        }
    }
    for (v, rays) in &star {
        for (i, &(ta, a0, a1)) in rays.iter().enumerate() {
            for &(tb, b0, b1) in &rays[i + 1..] {
                if ta == tb {
                    continue;
                }
                if partial_edge_overlap((a0, a1), (b0, b1), complex.weld_eps) {
                    return Err(Error::IntersectionCondition(format!(
                        "tiles {ta} and {tb} share a partial edge at vertex {v}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Bounding-box grid for candidate tile pairs.
fn candidate_pairs(polys: &[Vec<C>], pad: f64) -> Vec<(usize, usize)> {
    let boxes: Vec<(C, C)> = polys.iter().map(|p| bbox(p)).collect();
    let cell = boxes
        .iter()
        .map(|(lo, hi)| (hi.re - lo.re).max(hi.im - lo.im))
        .fold(0.0f64, f64::max)
        .max(pad)
        .max(f64::MIN_POSITIVE);
    let mut grid: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (i, (lo, hi)) in boxes.iter().enumerate() {
        let x0 = (lo.re / cell).floor() as i64;
        let x1 = (hi.re / cell).floor() as i64;
        let y0 = (lo.im / cell).floor() as i64;
        let y1 = (hi.im / cell).floor() as i64;
        for x in x0..=x1 {
            for y in y0..=y1 {
                grid.entry((x, y)).or_default().push(i);
            }
        }
    }
    let mut pairs = BTreeSet::new();
    for ids in grid.values() {
        for (a, &i) in ids.iter().enumerate() {
            for &j in &ids[a + 1..] {
                let (i, j) = (i.min(j), i.max(j));
                let (lo_i, hi_i) = boxes[i];
                let (lo_j, hi_j) = boxes[j];
                if lo_i.re - pad <= hi_j.re
                    && lo_j.re - pad <= hi_i.re
                    && lo_i.im - pad <= hi_j.im
                    && lo_j.im - pad <= hi_i.im
                {
                    pairs.insert((i, j));
                }
            }
        }
    }
    pairs.into_iter().collect()
}

#[derive(Debug, Clone, Default)]
pub struct IntersectionReport {
    pub pairs_checked: usize,
    pub violations: Vec<String>,
}

impl IntersectionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

const MAX_REPORTED_VIOLATIONS: usize = 1000;

/// Verifies that any two distinct tiles meet in nothing, a single shared
/// vertex, or a single full shared edge. Checks both the combinatorics of
/// the welded cycles and the planar geometry (interior overlap, vertices
/// interior to foreign edges, partial collinear edge contact).
pub fn check_intersection_condition(complex: &TileComplex) -> Result<IntersectionReport> {
    let mut report = IntersectionReport::default();
    let push = |report: &mut IntersectionReport, msg: String| {
        if report.violations.len() < MAX_REPORTED_VIOLATIONS {
            report.violations.push(msg);
        }
    };

    for e in &complex.edges {
        if e.tiles.len() > 2 {
            push(
                &mut report,
                format!("edge ({}, {}) borders {} tiles", e.a, e.b, e.tiles.len()),
            );
        }
    }

    let polys: Vec<Vec<C>> = (0..complex.tiles.len())
        .map(|t| complex.tile_polygon(t))
        .collect();
    let pos_tol = complex.weld_eps;

    for (i, j) in candidate_pairs(&polys, pos_tol) {
        report.pairs_checked += 1;
        let ti = &complex.tiles[i];
        let tj = &complex.tiles[j];
        let area_tol = 1e-9
            * polygon_area(&polys[i])
                .min(polygon_area(&polys[j]))
                .max(f64::MIN_POSITIVE);
        let inter = intersection_area(&polys[i], &polys[j])?;
        if inter > area_tol {
            push(
                &mut report,
                format!("tiles {i} and {j} overlap with area {inter:.3e}"),
            );
        }

        let ki = ti.corners.len();
        let kj = tj.corners.len();
        'edges: for a in 0..ki {
            let ea = (polys[i][a], polys[i][(a + 1) % ki]);
            for b in 0..kj {
                let eb = (polys[j][b], polys[j][(b + 1) % kj]);
                if partial_edge_overlap(ea, eb, pos_tol) {
                    push(&mut report, format!("tiles {i} and {j} share a partial edge"));
                    break 'edges;
                }
            }
        }
        for (t_from, t_to, from, to_poly) in [(i, j, ti, &polys[j]), (j, i, tj, &polys[i])] {
            let other: BTreeSet<usize> = complex.tiles[t_to].corners.iter().copied().collect();
            let k_to = to_poly.len();
            for &v in &from.corners {
                if other.contains(&v) {
                    continue;
                }
                let p = complex.vertices[v];
                for b in 0..k_to {
                    if on_segment_interior(p, to_poly[b], to_poly[(b + 1) % k_to], pos_tol, pos_tol)
                    {
                        push(
                            &mut report,
                            format!(
                                "vertex {v} of tile {t_from} lies inside an edge of tile {t_to}"
                            ),
                        );
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Closed boundary of an aggregate: the union of a marked ancestor's
/// descendants, with the ancestor's corners located among the cycle
/// vertices and the base-edge corners flagged.
#[derive(Debug, Clone)]
pub struct AggregateBoundary {
    /// Welded vertex ids, CCW, starting at the root's corner 0.
    pub cycle: Vec<usize>,
    /// Position in `cycle` of each root corner, in corner order.
    pub corner_marks: Vec<usize>,
    /// Indices into `corner_marks` for the base edge endpoints (a, b).
    pub base: (usize, usize),
    /// Tile indices forming the aggregate.
    pub tiles: Vec<usize>,
}

/// Walks the boundary of the sub-complex of tiles descending from the
/// lineage path `root_path`, then locates the root's combinatorial corners
/// on it by position (within weld_eps).
pub fn aggregate_boundary(
    rule: &SubstitutionRule,
    complex: &TileComplex,
    root_path: &[usize],
) -> Result<AggregateBoundary> {
    let (host_proto, host_map) = complex.host.ok_or_else(|| {
        Error::Topology("complex has no single ancestor tile; cannot resolve lineage".into())
    })?;
    let mut proto = host_proto;
    let mut map = host_map;
    for &ci in root_path {
        let kids = rule.children.get(proto).ok_or(Error::UnknownPrototile(proto))?;
        let ch = kids.get(ci).ok_or_else(|| {
            Error::SelectorOutOfRange(format!("child index {ci} out of range for prototile {proto}"))
        })?;
        map = map.compose(&ch.map);
        proto = ch.prototile;
    }

    let keep: Vec<bool> = complex
        .tiles
        .iter()
        .map(|t| t.lineage.starts_with(root_path))
        .collect();
    let tiles: Vec<usize> = (0..complex.tiles.len()).filter(|&t| keep[t]).collect();
    if tiles.is_empty() {
        return Err(Error::SelectorOutOfRange(format!(
            "no tiles descend from path {root_path:?}"
        )));
    }
    let cycle = walk_region_boundary(complex, &keep)?;

    let root_corners: Vec<C> = rule.prototiles[proto]
        .combinatorial_corners
        .iter()
        .map(|&q| map.apply(q))
        .collect();
    let mut corner_marks = Vec::with_capacity(root_corners.len());
    for (ci, q) in root_corners.iter().enumerate() {
        let hit = cycle
            .iter()
            .position(|&v| (complex.vertices[v] - q).norm() <= complex.weld_eps)
            .ok_or_else(|| {
                Error::UnmatchedCorner(format!(
                    "root corner {ci} at ({:.6}, {:.6}) not on the aggregate boundary",
                    q.re, q.im
                ))
            })?;
        corner_marks.push(hit);
    }

    // Rotate so corner 0 opens the cycle.
    let shift = corner_marks[0];
    let n = cycle.len();
    let cycle: Vec<usize> = (0..n).map(|i| cycle[(shift + i) % n]).collect();
    let corner_marks: Vec<usize> = corner_marks.iter().map(|&m| (m + n - shift) % n).collect();

    let base = rule.prototiles[proto].base_corner_indices();
    Ok(AggregateBoundary {
        cycle,
        corner_marks,
        base,
        tiles,
    })
}
