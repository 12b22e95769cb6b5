//! Patches: placed tiles with full subdivision lineage.

use crate::error::{Error, Result};
use crate::geom::{boundary_distance, polygon_centroid, Similarity, C};
use crate::rules::SubstitutionRule;

/// A placed tile. `parent` points into the lineage arena of the patch that
/// produced it; roots carry `None`.
#[derive(Debug, Clone)]
pub struct Tile {
    pub prototile: usize,
    pub map: Similarity,
    pub parent: Option<usize>,
    pub child_index: usize,
    pub level: usize,
}

/// A set of placed tiles plus the arena of all ancestors. `tiles` indexes
/// into `nodes`; every node's `parent` also indexes into `nodes`.
#[derive(Debug, Clone)]
pub struct Patch {
    pub nodes: Vec<Tile>,
    pub tiles: Vec<usize>,
    pub level: usize,
}

impl Patch {
    /// A single prototile placed by `map`, as a level-0 patch.
    pub fn seed(prototile: usize, map: Similarity) -> Patch {
        Patch {
            nodes: vec![Tile {
                prototile,
                map,
                parent: None,
                child_index: 0,
                level: 0,
            }],
            tiles: vec![0],
            level: 0,
        }
    }

    pub fn tile(&self, i: usize) -> &Tile {
        &self.nodes[self.tiles[i]]
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// Child-index path from the patch root that produced this tile.
    pub fn lineage_path(&self, node: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            path.push(self.nodes[cur].child_index);
            cur = p;
        }
        path.reverse();
        path
    }

    pub fn placed_vertices(&self, rule: &SubstitutionRule, i: usize) -> Vec<C> {
        let t = self.tile(i);
        rule.prototiles[t.prototile]
            .vertices
            .iter()
            .map(|&v| t.map.apply(v))
            .collect()
    }

    pub fn placed_corners(&self, rule: &SubstitutionRule, i: usize) -> Vec<C> {
        let t = self.tile(i);
        rule.prototiles[t.prototile]
            .combinatorial_corners
            .iter()
            .map(|&q| t.map.apply(q))
            .collect()
    }
}

/// Applies the subdivision once: every current tile is replaced by its
/// children, keeping the ancestors in the arena.
pub fn subdivide_patch(rule: &SubstitutionRule, patch: &Patch) -> Result<Patch> {
    let mut nodes = patch.nodes.clone();
    let mut tiles = Vec::with_capacity(patch.tiles.len() * 4);
    for &ni in &patch.tiles {
        let t = nodes[ni].clone();
        let kids = rule
            .children
            .get(t.prototile)
            .ok_or(Error::UnknownPrototile(t.prototile))?;
        for (ci, ch) in kids.iter().enumerate() {
            nodes.push(Tile {
                prototile: ch.prototile,
                map: t.map.compose(&ch.map),
                parent: Some(ni),
                child_index: ci,
                level: t.level + 1,
            });
            tiles.push(nodes.len() - 1);
        }
    }
    Ok(Patch {
        nodes,
        tiles,
        level: patch.level + 1,
    })
}

pub fn subdivide_n(rule: &SubstitutionRule, patch: &Patch, n: usize) -> Result<Patch> {
    let mut cur = patch.clone();
    for _ in 0..n {
        cur = subdivide_patch(rule, &cur)?;
    }
    Ok(cur)
}

/// Expands one prototile `depth` times.
pub fn expand_prototile(rule: &SubstitutionRule, prototile: usize, depth: usize) -> Result<Patch> {
    subdivide_n(rule, &Patch::seed(prototile, Similarity::IDENTITY), depth)
}

/// Selects the interior child of tau^b: the level-b tile whose centroid
/// lies deepest inside the host, ties broken by lineage order.
pub fn buffered_root(
    rule: &SubstitutionRule,
    prototile: usize,
    buffer: usize,
) -> Result<(Vec<usize>, usize, Similarity)> {
    let host = rule.prototile(prototile)?;
    let expanded = subdivide_n(rule, &Patch::seed(prototile, Similarity::IDENTITY), buffer)?;
    let mut best: Option<(f64, Vec<usize>, usize, Similarity)> = None;
    for i in 0..expanded.len() {
        let poly = expanded.placed_vertices(rule, i);
        let centroid = polygon_centroid(&poly);
        let d = boundary_distance(centroid, &host.vertices);
        let t = expanded.tile(i);
        let path = expanded.lineage_path(expanded.tiles[i]);
        let better = match &best {
            None => true,
            Some((bd, bp, _, _)) => d > bd + 1e-12 || (d > bd - 1e-12 && path < *bp),
        };
        if better {
            best = Some((d, path, t.prototile, t.map));
        }
    }
    let (_, path, proto, map) = best.ok_or_else(|| {
        Error::SelectorOutOfRange(format!("no tiles at buffer depth {buffer}"))
    })?;
    Ok((path, proto, map))
}

/// A fully subdivided host patch with one marked interior tile whose
/// descendants form the aggregate under study.
#[derive(Debug, Clone)]
pub struct BufferedPatch {
    /// tau^{buffer + n} of the host prototile.
    pub patch: Patch,
    /// Arena index of the marked level-`buffer` root tile.
    pub root_node: usize,
    /// Lineage path of the root from the host.
    pub root_path: Vec<usize>,
    pub host_prototile: usize,
    pub buffer: usize,
    pub aggregate_level: usize,
}

impl BufferedPatch {
    pub fn root_tile(&self) -> &Tile {
        &self.patch.nodes[self.root_node]
    }

    /// Indices (into `patch.tiles`) of the root's descendants.
    pub fn aggregate_tiles(&self) -> Vec<usize> {
        (0..self.patch.len())
            .filter(|&i| {
                self.patch
                    .lineage_path(self.patch.tiles[i])
                    .starts_with(&self.root_path)
            })
            .collect()
    }
}

/// Expands the host `buffer + n` times, marking the buffer-level tile
/// chosen by `buffered_root`. With buffer 0 the root is the host itself.
pub fn buffered_patch(
    rule: &SubstitutionRule,
    host_prototile: usize,
    buffer: usize,
    n: usize,
) -> Result<BufferedPatch> {
    let root_path = if buffer == 0 {
        Vec::new()
    } else {
        buffered_root(rule, host_prototile, buffer)?.0
    };
    let buffered = subdivide_n(
        rule,
        &Patch::seed(host_prototile, Similarity::IDENTITY),
        buffer,
    )?;
    let root_node = (0..buffered.len())
        .map(|i| buffered.tiles[i])
        .find(|&ni| buffered.lineage_path(ni) == root_path)
        .ok_or_else(|| Error::SelectorOutOfRange(format!("no tile with path {root_path:?}")))?;
    let patch = subdivide_n(rule, &buffered, n)?;
    Ok(BufferedPatch {
        patch,
        root_node,
        root_path,
        host_prototile,
        buffer,
        aggregate_level: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::load_builtin;

    #[test]
    fn tile_counts_follow_child_totals() {
        let rule = load_builtin("pinwheel").unwrap();
        let mut p = Patch::seed(0, Similarity::IDENTITY);
        for n in 1..=4 {
            p = subdivide_patch(&rule, &p).unwrap();
            assert_eq!(p.len(), 5usize.pow(n));
            assert_eq!(p.level, n as usize);
        }
    }

    #[test]
    fn lineage_paths_are_lexicographic() {
        let rule = load_builtin("chair").unwrap();
        let p = expand_prototile(&rule, 0, 3).unwrap();
        let paths: Vec<Vec<usize>> = (0..p.len())
            .map(|i| p.lineage_path(p.tiles[i]))
            .collect();
        assert!(paths.windows(2).all(|w| w[0] < w[1]));
        assert!(paths.iter().all(|p| p.len() == 3));
    }

    #[test]
    fn subdivision_preserves_total_area() {
        use crate::geom::polygon_area;
        for name in ["pinwheel", "chair", "domino", "sphinx", "penrose"] {
            let rule = load_builtin(name).unwrap();
            let host_area = polygon_area(&rule.prototiles[0].vertices);
            let p = expand_prototile(&rule, 0, 3).unwrap();
            let total: f64 = (0..p.len())
                .map(|i| polygon_area(&p.placed_vertices(&rule, i)))
                .sum();
            assert!(
                (total - host_area).abs() < 1e-9 * host_area,
                "{name}: {total} vs {host_area}"
            );
        }
    }

    #[test]
    fn buffered_root_is_interior() {
        let rule = load_builtin("pinwheel").unwrap();
        let (path, proto, map) = buffered_root(&rule, 0, 2).unwrap();
        assert_eq!(path, vec![4, 2]);
        assert_eq!(proto, 1);
        let host = &rule.prototiles[0];
        let poly: Vec<_> = rule.prototiles[proto]
            .vertices
            .iter()
            .map(|&v| map.apply(v))
            .collect();
        let centroid = polygon_centroid(&poly);
        assert!(boundary_distance(centroid, &host.vertices) > 0.37);
    }

    #[test]
    fn buffered_patch_counts() {
        let rule = load_builtin("pinwheel").unwrap();
        let bp = buffered_patch(&rule, 0, 2, 0).unwrap();
        assert_eq!(bp.patch.len(), 25);
        assert_eq!(bp.aggregate_tiles(), vec![bp.patch.tiles.iter().position(|&n| n == bp.root_node).unwrap()]);
        let bp = buffered_patch(&rule, 0, 2, 2).unwrap();
        assert_eq!(bp.patch.len(), 625);
        assert_eq!(bp.aggregate_tiles().len(), 25);
        assert_eq!(bp.root_tile().level, 2);
        let unbuffered = buffered_patch(&rule, 0, 0, 1).unwrap();
        assert_eq!(unbuffered.root_node, 0);
        assert_eq!(unbuffered.aggregate_tiles().len(), 5);
    }
}
