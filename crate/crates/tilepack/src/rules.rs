//! Substitution rules: prototiles, child placements, rule files, geometric
//! validation, incidence matrices, and the special two-tile configuration
//! search.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geom::{
    self, c, intersection_area, is_simple_ccw, on_segment_interior, polygon_area,
    polygon_diameter, Similarity, C, GEOM_TOL,
};

/// Congruence detection tolerance on |factor| and matched vertices.
pub const CONGRUENCE_TOL: f64 = 1e-7;

pub const BUILTIN_NAMES: [&str; 5] = ["pinwheel", "chair", "domino", "sphinx", "penrose"];

const BUILTIN_FILES: [(&str, &str); 5] = [
    ("pinwheel", include_str!("../data/pinwheel.json")),
    ("chair", include_str!("../data/chair.json")),
    ("domino", include_str!("../data/domino.json")),
    ("sphinx", include_str!("../data/sphinx.json")),
    ("penrose", include_str!("../data/penrose.json")),
];

#[derive(Debug, Clone)]
pub struct Prototile {
    pub id: usize,
    pub label: String,
    pub vertices: Vec<C>,
    pub base_edge: (usize, usize),
    /// Boundary points in cyclic order; superset of the vertices. Extra
    /// points are edge-interior positions forced by same-level neighbors.
    pub combinatorial_corners: Vec<C>,
}

impl Prototile {
    pub fn side_count(&self) -> usize {
        self.combinatorial_corners.len()
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }

    /// Corner index of a base-edge endpoint.
    pub fn corner_index_of_vertex(&self, vertex: usize) -> Option<usize> {
        let v = self.vertices[vertex];
        self.combinatorial_corners
            .iter()
            .position(|&q| (q - v).norm() <= CONGRUENCE_TOL)
    }

    pub fn base_corner_indices(&self) -> (usize, usize) {
        let a = self.corner_index_of_vertex(self.base_edge.0).unwrap_or(0);
        let b = self.corner_index_of_vertex(self.base_edge.1).unwrap_or(0);
        (a, b)
    }

    /// The same prototile with every point moved by an orientation
    /// preserving similarity.
    pub fn transformed(&self, s: &Similarity) -> Prototile {
        Prototile {
            id: self.id,
            label: self.label.clone(),
            vertices: self.vertices.iter().map(|&v| s.apply(v)).collect(),
            base_edge: self.base_edge,
            combinatorial_corners: self
                .combinatorial_corners
                .iter()
                .map(|&q| s.apply(q))
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Child {
    pub prototile: usize,
    pub map: Similarity,
}

#[derive(Debug, Clone)]
pub struct SubstitutionRule {
    pub name: String,
    pub prototiles: Vec<Prototile>,
    pub children: Vec<Vec<Child>>,
}

#[derive(Deserialize)]
struct PrototileDoc {
    id: usize,
    label: String,
    vertices: Vec<[f64; 2]>,
    base_edge: [usize; 2],
    combinatorial_corners: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct ChildDoc {
    prototile: usize,
    factor: [f64; 2],
    offset: [f64; 2],
}

#[derive(Deserialize)]
struct RuleDoc {
    name: String,
    prototiles: Vec<PrototileDoc>,
    children: Vec<Vec<ChildDoc>>,
}

/// Parses a rule document. Only schema-level consistency is checked here;
/// geometry is the business of `validate_rule`.
pub fn load_rule(document: &str) -> Result<SubstitutionRule> {
    let doc: RuleDoc = serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.prototiles.is_empty() {
        return Err(Error::Parse("prototiles: empty".into()));
    }
    if doc.children.len() != doc.prototiles.len() {
        return Err(Error::Parse(
            "children: one list per prototile required".into(),
        ));
    }
    let q = doc.prototiles.len();
    let mut prototiles = Vec::with_capacity(q);
    for (i, p) in doc.prototiles.iter().enumerate() {
        if p.id != i {
            return Err(Error::Parse(format!(
                "prototiles[{i}].id: expected {i}, found {}",
                p.id
            )));
        }
        if p.vertices.len() < 3 {
            return Err(Error::Parse(format!(
                "prototiles[{i}].vertices: need at least 3"
            )));
        }
        if p.base_edge[0] >= p.vertices.len() || p.base_edge[1] >= p.vertices.len() {
            return Err(Error::Parse(format!(
                "prototiles[{i}].base_edge: index out of range"
            )));
        }
        if p.combinatorial_corners.len() < 3 {
            return Err(Error::Parse(format!(
                "prototiles[{i}].combinatorial_corners: need at least 3"
            )));
        }
        prototiles.push(Prototile {
            id: p.id,
            label: p.label.clone(),
            vertices: p.vertices.iter().map(|v| c(v[0], v[1])).collect(),
            base_edge: (p.base_edge[0], p.base_edge[1]),
            combinatorial_corners: p
                .combinatorial_corners
                .iter()
                .map(|v| c(v[0], v[1]))
                .collect(),
        });
    }
    let mut children = Vec::with_capacity(q);
    for (i, list) in doc.children.iter().enumerate() {
        if list.is_empty() {
            return Err(Error::Parse(format!("children[{i}]: empty")));
        }
        let mut out = Vec::with_capacity(list.len());
        for (j, ch) in list.iter().enumerate() {
            if ch.prototile >= q {
                return Err(Error::Parse(format!(
                    "children[{i}][{j}].prototile: index out of range"
                )));
            }
            let factor = c(ch.factor[0], ch.factor[1]);
            if factor.norm() == 0.0 {
                return Err(Error::Parse(format!("children[{i}][{j}].factor: zero")));
            }
            out.push(Child {
                prototile: ch.prototile,
                map: Similarity::new(factor, c(ch.offset[0], ch.offset[1])),
            });
        }
        children.push(out);
    }
    Ok(SubstitutionRule {
        name: doc.name,
        prototiles,
        children,
    })
}

pub fn load_rule_file(path: &Path) -> Result<SubstitutionRule> {
    let text = std::fs::read_to_string(path)?;
    load_rule(&text)
}

/// Loads a built-in rule by name. Resolution order: a file named
/// `<name>.json` under `TILEPACK_DATA_DIR` if that variable is set,
/// otherwise the embedded copy.
pub fn load_builtin(name: &str) -> Result<SubstitutionRule> {
    if let Ok(dir) = std::env::var("TILEPACK_DATA_DIR") {
        let path = Path::new(&dir).join(format!("{name}.json"));
        if path.is_file() {
            return load_rule_file(&path);
        }
    }
    for (n, text) in BUILTIN_FILES {
        if n == name {
            return load_rule(text);
        }
    }
    Err(Error::UnknownRule(name.to_string()))
}

/// Accepts either a built-in name or a path to a rule file.
pub fn load_rule_source(source: &str) -> Result<SubstitutionRule> {
    if BUILTIN_NAMES.contains(&source) {
        return load_builtin(source);
    }
    let path = Path::new(source);
    if path.is_file() {
        return load_rule_file(path);
    }
    Err(Error::UnknownRule(source.to_string()))
}

impl SubstitutionRule {
    pub fn prototile(&self, id: usize) -> Result<&Prototile> {
        self.prototiles.get(id).ok_or(Error::UnknownPrototile(id))
    }

    /// Placed polygon of a child under a parent placement.
    fn child_polygon(&self, parent_map: &Similarity, ch: &Child) -> Vec<C> {
        let m = parent_map.compose(&ch.map);
        self.prototiles[ch.prototile]
            .vertices
            .iter()
            .map(|&v| m.apply(v))
            .collect()
    }

    /// Tiles of tau^depth applied to one prototile, in lineage order.
    /// Each entry is (prototile id, placement, child-index path).
    pub fn expand(&self, prototile: usize, depth: usize) -> Vec<(usize, Similarity, Vec<usize>)> {
        let mut tiles = vec![(prototile, Similarity::IDENTITY, Vec::new())];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(tiles.len() * 4);
            for (p, m, path) in &tiles {
                for (ci, ch) in self.children[*p].iter().enumerate() {
                    let mut path2 = path.clone();
                    path2.push(ci);
                    next.push((ch.prototile, m.compose(&ch.map), path2));
                }
            }
            tiles = next;
        }
        tiles
    }
}

#[derive(Debug, Clone, Default)]
pub struct PrototileReport {
    pub area_residual: f64,
    pub shape_violations: Vec<String>,
    pub containment_violations: Vec<String>,
    pub overlap_violations: Vec<String>,
    pub corner_violations: Vec<String>,
}

impl PrototileReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.area_residual <= tol
            && self.shape_violations.is_empty()
            && self.containment_violations.is_empty()
            && self.overlap_violations.is_empty()
            && self.corner_violations.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub tol: f64,
    pub per_prototile: Vec<PrototileReport>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.per_prototile.iter().all(|r| r.passed(self.tol))
    }
}

/// Checks each prototile's polygon and corner declarations, the child
/// decomposition (containment, pairwise interior disjointness, area sum),
/// and corner consistency of same-level contacts in tau^1 and tau^2.
pub fn validate_rule(rule: &SubstitutionRule, tol: f64) -> ValidationReport {
    let mut per = Vec::with_capacity(rule.prototiles.len());
    for proto in &rule.prototiles {
        let mut rep = PrototileReport::default();
        check_prototile_shape(proto, tol, &mut rep);
        check_children(rule, proto, tol, &mut rep);
        check_corner_consistency(rule, proto, &mut rep);
        per.push(rep);
    }
    ValidationReport {
        tol,
        per_prototile: per,
    }
}

fn check_prototile_shape(proto: &Prototile, tol: f64, rep: &mut PrototileReport) {
    if !is_simple_ccw(&proto.vertices, tol) {
        rep.shape_violations
            .push(format!("{}: not a simple CCW polygon", proto.label));
    }
    let nv = proto.vertices.len();
    for (vi, v) in proto.vertices.iter().enumerate() {
        if proto
            .combinatorial_corners
            .iter()
            .all(|q| (q - v).norm() > CONGRUENCE_TOL)
        {
            rep.corner_violations
                .push(format!("{}: vertex {vi} missing from corners", proto.label));
        }
    }
    for (ci, q) in proto.combinatorial_corners.iter().enumerate() {
        let is_vertex = proto
            .vertices
            .iter()
            .any(|v| (q - v).norm() <= CONGRUENCE_TOL);
        if is_vertex {
            continue;
        }
        let on_edge_interior = (0..nv).any(|i| {
            on_segment_interior(*q, proto.vertices[i], proto.vertices[(i + 1) % nv], tol, tol)
        });
        if !on_edge_interior {
            rep.corner_violations.push(format!(
                "{}: corner {ci} not on an edge interior",
                proto.label
            ));
        }
    }
    for endpoint in [proto.base_edge.0, proto.base_edge.1] {
        if proto.corner_index_of_vertex(endpoint).is_none() {
            rep.corner_violations.push(format!(
                "{}: base-edge endpoint {endpoint} is not a corner",
                proto.label
            ));
        }
    }
}

fn check_children(rule: &SubstitutionRule, proto: &Prototile, tol: f64, rep: &mut PrototileReport) {
    let parent_poly = &proto.vertices;
    let parent_area = polygon_area(parent_poly);
    let kids = &rule.children[proto.id];
    let polys: Vec<Vec<C>> = kids
        .iter()
        .map(|ch| rule.child_polygon(&Similarity::IDENTITY, ch))
        .collect();
    let mut area_sum = 0.0;
    for (ci, poly) in polys.iter().enumerate() {
        let a = polygon_area(poly);
        area_sum += a;
        match intersection_area(poly, parent_poly) {
            Ok(inter) => {
                let outside = a - inter;
                if outside > tol {
                    rep.containment_violations.push(format!(
                        "{}: child {ci} has area {outside:.3e} outside the parent",
                        proto.label
                    ));
                }
            }
            Err(e) => rep
                .containment_violations
                .push(format!("{}: child {ci}: {e}", proto.label)),
        }
    }
    rep.area_residual = (area_sum - parent_area).abs();
    for i in 0..polys.len() {
        for j in i + 1..polys.len() {
            if let Ok(inter) = intersection_area(&polys[i], &polys[j]) {
                if inter > tol {
                    rep.overlap_violations.push(format!(
                        "{}: children {i} and {j} overlap with area {inter:.3e}",
                        proto.label
                    ));
                }
            }
        }
    }
}

/// Corner-split edges of a placed tile.
fn corner_edges(rule: &SubstitutionRule, prototile: usize, map: &Similarity) -> Vec<(C, C)> {
    let cs = &rule.prototiles[prototile].combinatorial_corners;
    let n = cs.len();
    (0..n)
        .map(|i| (map.apply(cs[i]), map.apply(cs[(i + 1) % n])))
        .collect()
}

/// A positive-length collinear contact between two corner-split edges must
/// be a full shared edge (matching endpoint sets).
fn edge_contact_violation(a: (C, C), b: (C, C), scale: f64) -> bool {
    geom::partial_edge_overlap(a, b, CONGRUENCE_TOL * scale.max(1.0))
}

/// Same-level contact discipline inside tau^1 and tau^2: any edge-to-edge
/// contact is a full corner-split edge, and every declared corner of the
/// parent persists as a subdivision vertex.
fn check_corner_consistency(rule: &SubstitutionRule, proto: &Prototile, rep: &mut PrototileReport) {
    let scale = polygon_diameter(&proto.vertices);
    for depth in 1..=2 {
        let tiles = rule.expand(proto.id, depth);
        let edge_sets: Vec<Vec<(C, C)>> = tiles
            .iter()
            .map(|(p, m, _)| corner_edges(rule, *p, m))
            .collect();
        for i in 0..tiles.len() {
            for j in i + 1..tiles.len() {
                for &ea in &edge_sets[i] {
                    for &eb in &edge_sets[j] {
                        if edge_contact_violation(ea, eb, scale) {
                            rep.corner_violations.push(format!(
                                "{}: tau^{depth} tiles {i} and {j} share a partial edge",
                                proto.label
                            ));
                        }
                    }
                }
            }
        }
    }
    let tiles = rule.expand(proto.id, 1);
    for (ci, corner) in proto.combinatorial_corners.iter().enumerate() {
        let found = tiles.iter().any(|(p, m, _)| {
            rule.prototiles[*p]
                .combinatorial_corners
                .iter()
                .any(|&q| (m.apply(q) - corner).norm() <= CONGRUENCE_TOL)
        });
        if !found {
            rep.corner_violations.push(format!(
                "{}: corner {ci} is not a vertex of the subdivision",
                proto.label
            ));
        }
    }
}

/// Entry (i, j) counts children of prototile i with type j; primitive when
/// some power up to q^2 is entrywise positive.
pub fn incidence_matrix(rule: &SubstitutionRule) -> (Vec<Vec<u64>>, bool) {
    let (m, exp) = incidence_with_exponent(rule);
    (m, exp.is_some())
}

pub fn incidence_with_exponent(rule: &SubstitutionRule) -> (Vec<Vec<u64>>, Option<usize>) {
    let q = rule.prototiles.len();
    let mut m = vec![vec![0u64; q]; q];
    for (i, kids) in rule.children.iter().enumerate() {
        for ch in kids {
            m[i][ch.prototile] += 1;
        }
    }
    let mut power = m.clone();
    for k in 1..=q * q {
        if power.iter().all(|row| row.iter().all(|&e| e > 0)) {
            return (m, Some(k));
        }
        power = mat_mul(&power, &m);
    }
    (m, None)
}

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let q = a.len();
    let mut out = vec![vec![0u64; q]; q];
    for i in 0..q {
        for k in 0..q {
            let v = a[i][k];
            if v == 0 {
                continue;
            }
            for j in 0..q {
                out[i][j] = out[i][j].saturating_add(v.saturating_mul(b[k][j]));
            }
        }
    }
    out
}

/// Two same-type tiles inside some tau^k of a prototile, related by a
/// congruence whose linear part is not +-1.
#[derive(Debug, Clone)]
pub struct ConfigurationC {
    pub host_prototile: usize,
    pub depth: usize,
    pub path_p: Vec<usize>,
    pub path_q: Vec<usize>,
    pub relating_map: Similarity,
}

/// Deterministic search ordered by (depth, host prototile id, lexicographic
/// tile pair). The relating map sends tile p onto tile q with base edges
/// corresponding.
pub fn find_special_configuration(
    rule: &SubstitutionRule,
    max_depth: usize,
) -> Option<ConfigurationC> {
    for depth in 1..=max_depth {
        for host in 0..rule.prototiles.len() {
            let tiles = rule.expand(host, depth);
            for i in 0..tiles.len() {
                for j in i + 1..tiles.len() {
                    if tiles[i].0 != tiles[j].0 {
                        continue;
                    }
                    let s = tiles[j].1.compose(&tiles[i].1.inverse());
                    if !s.is_congruence(CONGRUENCE_TOL) {
                        continue;
                    }
                    let a = s.factor;
                    if (a - c(1.0, 0.0)).norm() <= GEOM_TOL || (a + c(1.0, 0.0)).norm() <= GEOM_TOL
                    {
                        continue;
                    }
                    return Some(ConfigurationC {
                        host_prototile: host,
                        depth,
                        path_p: tiles[i].2.clone(),
                        path_q: tiles[j].2.clone(),
                        relating_map: s,
                    });
                }
            }
        }
    }
    None
}

/// Union of prototile types reachable in subdivisions of `prototile`.
pub fn reachable_types(rule: &SubstitutionRule, prototile: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![prototile];
    while let Some(p) = stack.pop() {
        for ch in &rule.children[p] {
            if seen.insert(ch.prototile) {
                stack.push(ch.prototile);
            }
        }
    }
    seen
}
