//! End-to-end shape convergence: buffered patch, weld, pack, aggregate
//! shape extraction, and normalized Hausdorff distance to the euclidean
//! prototile, tabulated per subdivision level.

use crate::complex::{aggregate_boundary, weld, AggregateBoundary, TileComplex};
use crate::error::Result;
use crate::packing::{
    build_triangulation, layout, solve_radii, LayoutAnchor, PackMode, Packing, PackingComplex,
    SolveOptions,
};
use crate::patch::buffered_patch;
use crate::rules::SubstitutionRule;
use crate::shape::{aggregate_shape, hausdorff_distance, normalize_shape, prototile_shape, Shape};

#[derive(Debug, Clone, Copy)]
pub struct SeriesParams {
    /// Host prototile whose buffered subdivisions are packed.
    pub host_prototile: usize,
    /// Buffer levels b: the aggregate is a level-b tile of the host,
    /// surrounded by the rest of the host patch.
    pub buffer: usize,
    pub hex_depth: usize,
    pub mode: PackMode,
    pub tol: f64,
    pub max_sweeps: usize,
    /// Hausdorff sampling step relative to the target diameter.
    pub sampling_rel: f64,
}

impl Default for SeriesParams {
    fn default() -> Self {
        SeriesParams {
            host_prototile: 0,
            buffer: 2,
            hex_depth: 1,
            // Euclidean packings realize the complex in the plane, where
            // aggregate shapes are directly comparable to the prototile:
            // boundary-condition effects decay across the buffer collar.
            // Disc-maximal packings measure shapes in disc coordinates,
            // which mixes in the ambient hyperbolic-to-euclidean
            // distortion of the aggregate's (non-small) footprint and
            // drowns the convergence trend after a few levels.
            mode: PackMode::EuclideanBoundary {
                boundary_radius: None,
            },
            tol: 1e-8,
            max_sweeps: 1_000_000,
            sampling_rel: 1e-3,
        }
    }
}

/// Everything produced while packing one aggregate, kept for rendering and
/// serialization.
#[derive(Debug)]
pub struct PackedAggregate {
    pub complex: TileComplex,
    pub pc: PackingComplex,
    pub packing: Packing,
    pub boundary: AggregateBoundary,
    pub root_prototile: usize,
    /// Aggregate boundary polyline in packed coordinates.
    pub shape: Shape,
    /// The same shape with corner a at 0 and corner b at 1.
    pub normalized: Shape,
    /// Normalized euclidean prototile the aggregate approximates.
    pub target: Shape,
    pub d: f64,
    pub c: f64,
    pub aggregate_tiles: usize,
}

/// Packs the buffered level-n subdivision and measures the aggregate shape
/// against its euclidean prototile.
pub fn packed_aggregate(
    rule: &SubstitutionRule,
    n: usize,
    params: &SeriesParams,
) -> Result<PackedAggregate> {
    let buffered = buffered_patch(rule, params.host_prototile, params.buffer, n)?;
    let complex = weld(rule, &buffered.patch, None)?;
    let boundary = aggregate_boundary(rule, &complex, &buffered.root_path)?;
    let pc = build_triangulation(&complex, params.hex_depth)?;
    let opts = SolveOptions {
        tol: params.tol,
        max_sweeps: params.max_sweeps,
    };
    let solved = solve_radii(&pc, params.mode, &opts)?;
    let anchor = choose_anchor(&pc, &complex, &boundary, &solved);
    let packing = layout(&pc, &solved, &anchor)?;

    let root_prototile = buffered.root_tile().prototile;
    let shape = aggregate_shape(&pc, &packing, &complex, &boundary)?;
    let normalized = normalize_shape(&shape)?;
    let target = normalize_shape(&prototile_shape(&rule.prototiles[root_prototile]))?;
    let step = params.sampling_rel * target.diameter();
    let d = hausdorff_distance(&normalized.points, &target.points, step)?;
    let c = d / target.diameter();
    let aggregate_tiles = boundary.tiles.len();

    Ok(PackedAggregate {
        complex,
        pc,
        packing,
        boundary,
        root_prototile,
        shape,
        normalized,
        target,
        d,
        c,
        aggregate_tiles,
    })
}

/// Anchors layout on the aggregate root's base edge (corner a at the
/// origin, heading toward corner b) whenever those vertices can pivot;
/// otherwise falls back to the first aggregate tile's fan center. The
/// normalization step makes the series output independent of this choice.
fn choose_anchor(
    pc: &PackingComplex,
    complex: &TileComplex,
    boundary: &AggregateBoundary,
    solved: &Packing,
) -> LayoutAnchor {
    let fallback = LayoutAnchor::CenterVertex(pc.centers[boundary.tiles[0]]);
    let cycle = &boundary.cycle;
    let len = cycle.len();
    let ia = boundary.corner_marks[boundary.base.0];
    let ib = boundary.corner_marks[boundary.base.1];
    let neighbor = if (ia + 1) % len == ib {
        cycle[(ia + 1) % len]
    } else if (ib + 1) % len == ia {
        cycle[(ia + len - 1) % len]
    } else {
        return fallback;
    };
    let from = cycle[ia];
    let toward = match pc.chain_between(complex, from, neighbor) {
        Ok(chain) => chain[1],
        Err(_) => return fallback,
    };
    if solved.radii[from].is_finite() && solved.radii[toward].is_finite() {
        LayoutAnchor::BaseEdge { from, toward }
    } else {
        fallback
    }
}

#[derive(Debug, Clone)]
pub struct SeriesRow {
    pub rule: String,
    pub n: usize,
    pub tiles: usize,
    pub hex_depth: usize,
    pub buffer: usize,
    pub mode: &'static str,
    pub packing_residual: f64,
    pub d_n: f64,
    pub c_n: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceSeries {
    pub rows: Vec<SeriesRow>,
    /// Set when some level failed; earlier rows are still valid.
    pub failure: Option<String>,
}

/// Runs `packed_aggregate` for n = 0..=n_max and tabulates distances. A
/// failure at some level truncates the series and is reported in
/// `failure` rather than discarding completed rows.
pub fn shape_convergence(
    rule: &SubstitutionRule,
    n_max: usize,
    params: &SeriesParams,
) -> ConvergenceSeries {
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        match packed_aggregate(rule, n, params) {
            Ok(pa) => rows.push(SeriesRow {
                rule: rule.name.clone(),
                n,
                tiles: pa.aggregate_tiles,
                hex_depth: params.hex_depth,
                buffer: params.buffer,
                mode: params.mode.word(),
                packing_residual: pa.packing.residual,
                d_n: pa.d,
                c_n: pa.c,
            }),
            Err(err) => {
                return ConvergenceSeries {
                    rows,
                    failure: Some(format!("level {n}: {err}")),
                }
            }
        }
    }
    ConvergenceSeries { rows, failure: None }
}
