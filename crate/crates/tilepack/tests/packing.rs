//! Circle packing over welded complexes: triangulation size laws, solver
//! convergence for every builtin rule in both geometries, tangency audits
//! on the laid-out circles, and bitwise determinism.

use tilepack::complex::weld;
use tilepack::packing::{
    build_triangulation, layout, packing_error, solve_radii, Geometry, LayoutAnchor, PackMode,
    SolveOptions,
};
use tilepack::patch::expand_prototile;
use tilepack::rules::{load_builtin, BUILTIN_NAMES};

fn complex_of(name: &str, depth: usize) -> tilepack::complex::TileComplex {
    let rule = load_builtin(name).unwrap();
    let patch = expand_prototile(&rule, 0, depth).unwrap();
    weld(&rule, &patch, None).unwrap()
}

#[test]
fn triangle_count_quadruples_per_refinement() {
    let complex = complex_of("pinwheel", 2);
    // 25 four-cornered tiles fan into 100 triangles, quadrupling per pass.
    for (hex, want) in [(0, 100), (1, 400), (2, 1600)] {
        let pc = build_triangulation(&complex, hex).unwrap();
        assert_eq!(pc.triangles.len(), want, "hex {hex}");
        // Triangulated discs keep Euler characteristic 1.
        let v = pc.vertex_count() as i64;
        let e = pc.edges.len() as i64;
        let f = pc.triangles.len() as i64;
        assert_eq!(v - e + f, 1, "hex {hex}");
    }
}

#[test]
fn edge_chains_share_refined_vertices() {
    let complex = complex_of("sphinx", 2);
    for hex in [0usize, 1, 2] {
        let pc = build_triangulation(&complex, hex).unwrap();
        let per_chain = (1 << hex) + 1;
        for (e, chain) in pc.chains.iter().enumerate() {
            assert_eq!(chain.len(), per_chain, "edge {e} at hex {hex}");
            assert_eq!(chain[0], complex.edges[e].a);
            assert_eq!(chain[per_chain - 1], complex.edges[e].b);
        }
    }
}

#[test]
fn solver_converges_for_every_builtin_in_both_modes() {
    for name in BUILTIN_NAMES {
        let complex = complex_of(name, 2);
        let pc = build_triangulation(&complex, 1).unwrap();
        let opts = SolveOptions { tol: 1e-9, max_sweeps: 1_000_000 };
        for mode in [
            PackMode::DiscMaximal,
            PackMode::EuclideanBoundary { boundary_radius: None },
        ] {
            let packing = solve_radii(&pc, mode, &opts).unwrap();
            assert!(
                packing.residual <= 1e-9,
                "{name} {}: residual {}",
                mode.word(),
                packing.residual
            );
            let diag = packing_error(&pc, &packing);
            assert!(
                diag.max_angle_residual <= 1e-9,
                "{name} {}: recomputed residual {}",
                mode.word(),
                diag.max_angle_residual
            );
            match mode.geometry() {
                Geometry::Hyperbolic => {
                    for &b in &pc.boundary {
                        assert!(packing.radii[b].is_infinite(), "{name}: boundary not ideal");
                    }
                }
                Geometry::Euclidean => {
                    assert!(packing.radii.iter().all(|r| r.is_finite() && *r > 0.0));
                }
            }
        }
    }
}

#[test]
fn laid_out_circles_are_mutually_tangent() {
    for name in BUILTIN_NAMES {
        let complex = complex_of(name, 2);
        let pc = build_triangulation(&complex, 1).unwrap();
        let opts = SolveOptions { tol: 1e-10, max_sweeps: 1_000_000 };
        for mode in [
            PackMode::DiscMaximal,
            PackMode::EuclideanBoundary { boundary_radius: None },
        ] {
            let solved = solve_radii(&pc, mode, &opts).unwrap();
            let anchor = LayoutAnchor::CenterVertex(pc.centers[0]);
            let laid = layout(&pc, &solved, &anchor).unwrap();
            let diag = packing_error(&pc, &laid);
            assert!(
                diag.max_tangency_gap <= 1e-6 * diag.mean_radius,
                "{name} {}: tangency gap {} vs mean radius {}",
                mode.word(),
                diag.max_tangency_gap,
                diag.mean_radius
            );
            assert!(
                laid.layout_gap <= 1e-6 * diag.mean_radius,
                "{name} {}: layout gap {}",
                mode.word(),
                laid.layout_gap
            );
        }
    }
}

#[test]
fn disc_packings_fill_the_unit_disc() {
    let complex = complex_of("chair", 2);
    let pc = build_triangulation(&complex, 1).unwrap();
    let opts = SolveOptions { tol: 1e-10, max_sweeps: 1_000_000 };
    let solved = solve_radii(&pc, PackMode::DiscMaximal, &opts).unwrap();
    let laid = layout(&pc, &solved, &LayoutAnchor::CenterVertex(pc.centers[0])).unwrap();
    let circles = laid.circles.as_ref().unwrap();
    for (v, c) in circles.iter().enumerate() {
        assert!(
            c.center.norm() + c.radius <= 1.0 + 1e-9,
            "circle {v} leaves the disc"
        );
        assert!(c.radius >= 0.0 && c.radius < 1.0);
    }
    // Boundary horocycles are internally tangent to the unit circle.
    for &b in &pc.boundary {
        let c = &circles[b];
        assert!(
            (c.center.norm() + c.radius - 1.0).abs() < 1e-9,
            "horocycle {b} not tangent to the rim"
        );
    }
}

#[test]
fn euclidean_packing_scales_with_boundary_radius() {
    let complex = complex_of("domino", 1);
    let pc = build_triangulation(&complex, 1).unwrap();
    let opts = SolveOptions { tol: 1e-11, max_sweeps: 1_000_000 };
    let unit = solve_radii(
        &pc,
        PackMode::EuclideanBoundary { boundary_radius: Some(0.05) },
        &opts,
    )
    .unwrap();
    let tripled = solve_radii(
        &pc,
        PackMode::EuclideanBoundary { boundary_radius: Some(0.15) },
        &opts,
    )
    .unwrap();
    for v in 0..pc.vertex_count() {
        let ratio = tripled.radii[v] / unit.radii[v];
        assert!((ratio - 3.0).abs() < 1e-6, "vertex {v}: ratio {ratio}");
    }
}

#[test]
fn solve_and_layout_are_deterministic() {
    let complex = complex_of("pinwheel", 2);
    let pc = build_triangulation(&complex, 1).unwrap();
    let opts = SolveOptions::default();
    let a = solve_radii(&pc, PackMode::DiscMaximal, &opts).unwrap();
    let b = solve_radii(&pc, PackMode::DiscMaximal, &opts).unwrap();
    assert_eq!(a.sweeps, b.sweeps);
    for v in 0..pc.vertex_count() {
        assert_eq!(a.radii[v].to_bits(), b.radii[v].to_bits(), "radius {v}");
    }
    let anchor = LayoutAnchor::CenterVertex(pc.centers[0]);
    let la = layout(&pc, &a, &anchor).unwrap();
    let lb = layout(&pc, &b, &anchor).unwrap();
    let (pa, pb) = (la.positions.unwrap(), lb.positions.unwrap());
    for v in 0..pc.vertex_count() {
        assert_eq!(pa[v].re.to_bits(), pb[v].re.to_bits(), "position {v}");
        assert_eq!(pa[v].im.to_bits(), pb[v].im.to_bits(), "position {v}");
    }
}

#[test]
fn budget_exhaustion_reports_history() {
    let complex = complex_of("sphinx", 1);
    let pc = build_triangulation(&complex, 1).unwrap();
    let opts = SolveOptions { tol: 1e-12, max_sweeps: 3 };
    let err = solve_radii(&pc, PackMode::DiscMaximal, &opts).unwrap_err();
    match err {
        tilepack::Error::NonConvergence { residual, iterations, history } => {
            assert!(residual > 1e-12);
            assert!(iterations >= 3);
            assert!(!history.is_empty());
        }
        other => panic!("unexpected error {other:?}"),
    }
}
