//! Center layout for solved packings.
//!
//! Starting from an anchor, vertices are placed by sweeping flowers of
//! already-placed finite-radius vertices: walking the petal cycle
//! accumulates tangent-triangle angles, so each petal's direction and
//! distance from the pivot are known. Hyperbolic placements move the pivot
//! to the origin with a disc automorphism first. Boundary vertices of a
//! disc-maximal packing are ideal points and are never pivoted.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::geom::C;

use super::solve::triangle_angle;
use super::{Circle, Geometry, Packing, PackingComplex};

/// Finite disc positions are kept at or below this norm. Deeply nested
/// patches push vertices so close to the rim that |z| rounds to 1, which
/// would poison every later disc automorphism; the clamp trades a sub-ulp
/// position error for finite arithmetic throughout.
const RIM: f64 = 1.0 - 1e-15;

/// Where layout starts.
#[derive(Debug, Clone, Copy)]
pub enum LayoutAnchor {
    /// Place `from` at the origin and aim `toward` (a petal of `from`)
    /// along the positive real axis. Both must have finite radii.
    BaseEdge { from: usize, toward: usize },
    /// Place this finite-radius vertex at the origin with its first petal
    /// along the positive real axis.
    CenterVertex(usize),
}

pub fn layout(pc: &PackingComplex, packing: &Packing, anchor: &LayoutAnchor) -> Result<Packing> {
    let n = pc.vertex_count();
    let geometry = packing.geometry;
    let radii = &packing.radii;

    let mut pos: Vec<Option<C>> = vec![None; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut swept = vec![false; n];
    let mut gap = 0.0f64;

    match *anchor {
        LayoutAnchor::BaseEdge { from, toward } => {
            if !radii[from].is_finite() || !radii[toward].is_finite() {
                return Err(Error::Layout(
                    "base-edge anchor needs finite radii; use a center anchor for disc packings"
                        .into(),
                ));
            }
            if !pc.flowers[from].petals.contains(&toward) {
                return Err(Error::Layout(format!(
                    "anchor vertices {from} and {toward} are not neighbors"
                )));
            }
            pos[from] = Some(C::new(0.0, 0.0));
            pos[toward] = Some(first_step(geometry, radii[from], radii[toward]));
            queue.push_back(from);
            queue.push_back(toward);
        }
        LayoutAnchor::CenterVertex(v) => {
            if !radii[v].is_finite() {
                return Err(Error::Layout(format!(
                    "center anchor {v} has infinite radius"
                )));
            }
            let p0 = pc.flowers[v].petals[0];
            pos[v] = Some(C::new(0.0, 0.0));
            pos[p0] = Some(first_step(geometry, radii[v], radii[p0]));
            queue.push_back(v);
            queue.push_back(p0);
        }
    }

    while let Some(v) = queue.pop_front() {
        if swept[v] || !radii[v].is_finite() {
            continue;
        }
        swept[v] = true;
        sweep_flower(pc, geometry, radii, v, &mut pos, &mut queue, &mut gap)?;
    }

    if let Some(miss) = (0..n).find(|&v| pos[v].is_none()) {
        let hint = if geometry == Geometry::Hyperbolic && pc.hex_depth == 0 {
            "; raise hex_depth so interior refinement vertices connect the tiles"
        } else {
            ""
        };
        return Err(Error::Layout(format!(
            "vertex {miss} unreachable from the anchor{hint}"
        )));
    }

    let positions: Vec<C> = pos.into_iter().map(Option::unwrap).collect();
    let circles = representatives(pc, geometry, radii, &positions)?;

    Ok(Packing {
        geometry,
        radii: packing.radii.clone(),
        residual: packing.residual,
        sweeps: packing.sweeps,
        positions: Some(positions),
        circles: Some(circles),
        layout_gap: gap,
    })
}

/// Position of the first petal of an origin-placed pivot, along +x.
fn first_step(geometry: Geometry, rv: f64, rp: f64) -> C {
    match geometry {
        Geometry::Euclidean => C::new(rv + rp, 0.0),
        Geometry::Hyperbolic => {
            if rp.is_infinite() {
                C::new(1.0, 0.0)
            } else {
                clamp_disc(C::new(((rv + rp) / 2.0).tanh(), 0.0))
            }
        }
    }
}

/// Pulls a finite disc position back to norm RIM if rounding pushed it
/// onto or past the unit circle.
fn clamp_disc(z: C) -> C {
    let n = z.norm();
    if n > RIM {
        z * (RIM / n)
    } else {
        z
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep_flower(
    pc: &PackingComplex,
    geometry: Geometry,
    radii: &[f64],
    v: usize,
    pos: &mut [Option<C>],
    queue: &mut VecDeque<usize>,
    gap: &mut f64,
) -> Result<()> {
    let zv = pos[v].expect("pivot is placed before sweeping");
    let flower = &pc.flowers[v];
    let petals = &flower.petals;
    let k = petals.len();

    let start = petals
        .iter()
        .position(|&p| pos[p].is_some())
        .ok_or_else(|| Error::Layout(format!("pivot {v} has no placed petal")))?;

    let rv = radii[v];
    let ref_dir = petal_direction(geometry, zv, pos[petals[start]].unwrap());

    // Forward (counterclockwise) from the reference petal.
    let mut dir = ref_dir;
    let forward_steps = if flower.closed { k - 1 } else { k - 1 - start };
    for s in 0..forward_steps {
        let i = (start + s) % k;
        let j = (start + s + 1) % k;
        dir += triangle_angle(geometry, rv, radii[petals[i]], radii[petals[j]]);
        settle_petal(geometry, zv, rv, petals[j], radii, &mut dir, pos, queue, gap);
    }
    if !flower.closed && start > 0 {
        // Clockwise from the reference petal for open flowers.
        let mut dir = ref_dir;
        for i in (0..start).rev() {
            dir -= triangle_angle(geometry, rv, radii[petals[i]], radii[petals[i + 1]]);
            settle_petal(geometry, zv, rv, petals[i], radii, &mut dir, pos, queue, gap);
        }
    }
    Ok(())
}

/// Places petal p at direction `dir` from the pivot, or if it already has
/// a position, records the disagreement and re-anchors `dir` to the
/// existing placement.
#[allow(clippy::too_many_arguments)]
fn settle_petal(
    geometry: Geometry,
    zv: C,
    rv: f64,
    p: usize,
    radii: &[f64],
    dir: &mut f64,
    pos: &mut [Option<C>],
    queue: &mut VecDeque<usize>,
    gap: &mut f64,
) {
    if let Some(existing) = pos[p] {
        let would = place_at(geometry, zv, *dir, rv, radii[p]);
        *gap = gap.max((existing - would).norm());
        *dir = petal_direction(geometry, zv, existing);
    } else {
        pos[p] = Some(place_at(geometry, zv, *dir, rv, radii[p]));
        queue.push_back(p);
    }
}

/// Disc automorphism sending zv to the origin, and its inverse.
fn to_origin(zv: C, z: C) -> C {
    (z - zv) / (C::new(1.0, 0.0) - zv.conj() * z)
}

fn from_origin(zv: C, z: C) -> C {
    (z + zv) / (C::new(1.0, 0.0) + zv.conj() * z)
}

fn petal_direction(geometry: Geometry, zv: C, zp: C) -> f64 {
    match geometry {
        Geometry::Euclidean => (zp - zv).arg(),
        Geometry::Hyperbolic => to_origin(zv, zp).arg(),
    }
}

fn place_at(geometry: Geometry, zv: C, dir: f64, rv: f64, rp: f64) -> C {
    let e = C::new(dir.cos(), dir.sin());
    match geometry {
        Geometry::Euclidean => zv + e * (rv + rp),
        Geometry::Hyperbolic => {
            if rp.is_infinite() {
                let z = from_origin(zv, e);
                z / z.norm()
            } else {
                clamp_disc(from_origin(zv, e * ((rv + rp) / 2.0).tanh()))
            }
        }
    }
}

/// Euclidean circle representatives: identity in the plane; in the disc,
/// hyperbolic circles map to euclidean circles and ideal vertices become
/// horocycles sized by tangency to the best-conditioned finite neighbor.
/// When every neighbor of an ideal vertex has saturated at the rim, the
/// true horocycle is below double resolution and degenerates to a point.
fn representatives(
    pc: &PackingComplex,
    geometry: Geometry,
    radii: &[f64],
    positions: &[C],
) -> Result<Vec<Circle>> {
    let n = radii.len();
    let mut circles = vec![
        Circle {
            center: C::new(0.0, 0.0),
            radius: 0.0,
        };
        n
    ];
    match geometry {
        Geometry::Euclidean => {
            for v in 0..n {
                circles[v] = Circle {
                    center: positions[v],
                    radius: radii[v],
                };
            }
        }
        Geometry::Hyperbolic => {
            for v in 0..n {
                if radii[v].is_finite() {
                    let t = (radii[v] / 2.0).tanh();
                    let z = positions[v];
                    let denom = 1.0 - t * t * z.norm_sqr();
                    circles[v] = Circle {
                        center: z * ((1.0 - t * t) / denom),
                        radius: t * (1.0 - z.norm_sqr()) / denom,
                    };
                }
            }
            for v in 0..n {
                if radii[v].is_infinite() {
                    let pivot = pc.flowers[v]
                        .petals
                        .iter()
                        .copied()
                        .filter(|&p| radii[p].is_finite())
                        .max_by(|&a, &b| {
                            let da = 1.0 - positions[a].norm_sqr();
                            let db = 1.0 - positions[b].norm_sqr();
                            da.total_cmp(&db)
                        })
                        .ok_or_else(|| {
                            Error::Layout(format!("ideal vertex {v} has no finite neighbor"))
                        })?;
                    let s = horocycle_size(positions[v], positions[pivot], radii[pivot])
                        .unwrap_or(0.0);
                    circles[v] = Circle {
                        center: positions[v] * (1.0 - s),
                        radius: s,
                    };
                }
            }
        }
    }
    Ok(circles)
}

/// Euclidean radius of the horocycle at ideal point `zeta` tangent to the
/// circle with model center `z0` and hyperbolic radius `r`. Level sets of
/// the signed distance to `zeta` give s/(1-s) = exp(-r) |zeta - z0|^2 /
/// (1 - |z0|^2); every term is positive, so no cancellation occurs even
/// when the pivot hugs the rim. Returns None when the pivot position has
/// lost all radial precision (|z0| rounded to 1 or beyond), in which case
/// the quotient carries no information.
fn horocycle_size(zeta: C, z0: C, r: f64) -> Option<f64> {
    let denom = 1.0 - z0.norm_sqr();
    if denom <= 0.0 {
        return None;
    }
    let q = (-r).exp() * (zeta - z0).norm_sqr() / denom;
    if !q.is_finite() || q >= 1e15 {
        return None;
    }
    Some(q / (1.0 + q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::weld;
    use crate::packing::solve::{solve_radii, SolveOptions};
    use crate::packing::{build_triangulation, packing_error, PackMode};
    use crate::patch::expand_prototile;
    use crate::rules::load_builtin;

    fn packed(
        name: &str,
        depth: usize,
        hex: usize,
        mode: PackMode,
        tol: f64,
    ) -> (PackingComplex, Packing) {
        let rule = load_builtin(name).unwrap();
        let patch = expand_prototile(&rule, 0, depth).unwrap();
        let complex = weld(&rule, &patch, None).unwrap();
        let pc = build_triangulation(&complex, hex).unwrap();
        let opts = SolveOptions { tol, max_sweeps: 1_000_000 };
        let packing = solve_radii(&pc, mode, &opts).unwrap();
        let anchor = LayoutAnchor::CenterVertex(pc.centers[0]);
        let laid = layout(&pc, &packing, &anchor).unwrap();
        (pc, laid)
    }

    #[test]
    fn euclidean_layout_is_tangent_and_planar() {
        let (pc, laid) = packed(
            "domino",
            1,
            1,
            PackMode::EuclideanBoundary { boundary_radius: None },
            1e-10,
        );
        let diag = packing_error(&pc, &laid);
        assert!(diag.max_tangency_gap <= 1e-7 * diag.mean_radius.max(1.0), "gap {}", diag.max_tangency_gap);
        let circles = laid.circles.as_ref().unwrap();
        for c in circles {
            assert!(c.radius > 0.0 && c.center.norm().is_finite());
        }
    }

    #[test]
    fn disc_layout_stays_in_the_disc() {
        let (pc, laid) = packed("sphinx", 1, 1, PackMode::DiscMaximal, 1e-9);
        let circles = laid.circles.as_ref().unwrap();
        let positions = laid.positions.as_ref().unwrap();
        for v in 0..pc.vertex_count() {
            let z = positions[v];
            if pc.is_boundary[v] {
                assert!((z.norm() - 1.0).abs() < 1e-9, "ideal vertex off the circle");
            } else {
                assert!(z.norm() < 1.0);
            }
            // Each representative lies inside the closed unit disc.
            assert!(circles[v].center.norm() + circles[v].radius <= 1.0 + 1e-7);
        }
        let diag = packing_error(&pc, &laid);
        assert!(
            diag.max_tangency_gap <= 1e-6 * diag.mean_radius,
            "tangency {} vs mean radius {}",
            diag.max_tangency_gap,
            diag.mean_radius
        );
    }

    #[test]
    fn base_edge_anchor_pins_the_base() {
        let (pc, packing) = {
            let rule = load_builtin("chair").unwrap();
            let patch = expand_prototile(&rule, 0, 1).unwrap();
            let complex = weld(&rule, &patch, None).unwrap();
            let pc = build_triangulation(&complex, 1).unwrap();
            let packing = solve_radii(
                &pc,
                PackMode::EuclideanBoundary { boundary_radius: None },
                &SolveOptions { tol: 1e-10, max_sweeps: 1_000_000 },
            )
            .unwrap();
            (pc, packing)
        };
        let from = pc.boundary[0];
        let toward = pc.boundary[1];
        let laid = layout(&pc, &packing, &LayoutAnchor::BaseEdge { from, toward }).unwrap();
        let positions = laid.positions.as_ref().unwrap();
        assert!(positions[from].norm() < 1e-12);
        assert!(positions[toward].im.abs() < 1e-9);
        assert!(positions[toward].re > 0.0);
    }

    #[test]
    fn horocycle_size_matches_direct_tangency() {
        // Origin pivot closed form: s = 1 / (1 + exp(r)).
        for r in [0.3f64, 1.0, 4.0] {
            let s = horocycle_size(C::new(1.0, 0.0), C::new(0.0, 0.0), r).unwrap();
            assert!((s - 1.0 / (1.0 + r.exp())).abs() < 1e-15);
        }
        // Off-center pivot: the representative circles must be externally
        // tangent, checked against the well-conditioned euclidean identity.
        let z0 = C::new(0.35, -0.2);
        let r = 0.9f64;
        let zeta = C::new(0.6f64.cos(), 0.6f64.sin());
        let s = horocycle_size(zeta, z0, r).unwrap();
        let t = (r / 2.0).tanh();
        let denom = 1.0 - t * t * z0.norm_sqr();
        let e1 = z0 * ((1.0 - t * t) / denom);
        let s1 = t * (1.0 - z0.norm_sqr()) / denom;
        let gap = ((zeta * (1.0 - s) - e1).norm() - (s + s1)).abs();
        assert!(gap < 1e-14, "tangency gap {gap}");
        // A pivot whose position has saturated at the rim carries no radial
        // information and must be reported as such.
        assert!(horocycle_size(zeta, C::new(0.8, 0.6), 2.0).is_none());
    }

    #[test]
    fn disc_anchor_requires_finite_radius() {
        let (pc, packing) = {
            let rule = load_builtin("pinwheel").unwrap();
            let patch = expand_prototile(&rule, 0, 0).unwrap();
            let complex = weld(&rule, &patch, None).unwrap();
            let pc = build_triangulation(&complex, 0).unwrap();
            let packing =
                solve_radii(&pc, PackMode::DiscMaximal, &SolveOptions::default()).unwrap();
            (pc, packing)
        };
        let boundary_vertex = pc.boundary[0];
        let err = layout(&pc, &packing, &LayoutAnchor::CenterVertex(boundary_vertex));
        assert!(err.is_err());
    }
}
