//! Top-level acceptance checks, one test per criterion. Each prints a
//! single PASS line with its measured numbers; failures carry the same
//! numbers in the panic message.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tilepack::affine::{prototile_dilatation, rule_kappa, TriangulationScheme};
use tilepack::complex::{check_intersection_condition, weld};
use tilepack::geom::{c, intersection_area, polygon_area, segment_distance, Similarity, C};
use tilepack::packing::{packing_error, PackMode};
use tilepack::patch::expand_prototile;
use tilepack::rules::{find_special_configuration, incidence_with_exponent, load_builtin, BUILTIN_NAMES};
use tilepack::series::{packed_aggregate, shape_convergence, SeriesParams};
use tilepack::shape::hausdorff_distance;

#[test]
fn criterion_1_pinwheel_subdivision_counts() {
    let start = Instant::now();
    let rule = load_builtin("pinwheel").unwrap();
    for (n, want) in [(0usize, 1usize), (1, 5), (2, 25), (3, 125), (4, 625)] {
        let got = expand_prototile(&rule, 0, n).unwrap().len();
        assert_eq!(got, want, "level {n}");
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "took {dt:?}");
    println!("criterion 1: PASS -pinwheel levels 0..=4 have 1, 5, 25, 125, 625 tiles ({dt:?})");
}

#[test]
fn criterion_2_subdivision_preserves_the_point_set() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for name in BUILTIN_NAMES {
        let rule = load_builtin(name).unwrap();
        for (p, proto) in rule.prototiles.iter().enumerate() {
            let patch = expand_prototile(&rule, p, 4).unwrap();
            let host_area = polygon_area(&proto.vertices);
            let mut tile_area_sum = 0.0;
            let mut overlap_sum = 0.0;
            for i in 0..patch.len() {
                let poly = patch.placed_vertices(&rule, i);
                tile_area_sum += polygon_area(&poly);
                overlap_sum += intersection_area(&poly, &proto.vertices).unwrap();
            }
            let symdiff = tile_area_sum + host_area - 2.0 * overlap_sum;
            let rel = symdiff.abs() / host_area;
            worst = worst.max(rel);
            assert!(
                rel < 1e-9,
                "{name} prototile {p}: symmetric difference {rel:.3e} of the area"
            );
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "took {dt:?}");
    println!(
        "criterion 2: PASS -four-fold subdivision covers each prototile exactly, \
         worst relative symmetric difference {worst:.3e} ({dt:?})"
    );
}

#[test]
fn criterion_3_intersection_condition_at_depth_two() {
    let start = Instant::now();
    let mut pairs = 0usize;
    for name in BUILTIN_NAMES {
        let rule = load_builtin(name).unwrap();
        let patch = expand_prototile(&rule, 0, 2).unwrap();
        let complex = weld(&rule, &patch, None).unwrap();
        let report = check_intersection_condition(&complex).unwrap();
        assert!(
            report.violations.is_empty(),
            "{name}: {:?}",
            report.violations
        );
        pairs += report.pairs_checked;
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "took {dt:?}");
    println!(
        "criterion 3: PASS -every touching tile pair meets in vertices and/or \
         full edges ({pairs} pairs checked, {dt:?})"
    );
}

#[test]
fn criterion_4_pinwheel_standing_assumption() {
    let start = Instant::now();
    let rule = load_builtin("pinwheel").unwrap();

    let (_, exponent) = incidence_with_exponent(&rule);
    assert_eq!(exponent, Some(1), "incidence matrix not primitive");

    let cfg = find_special_configuration(&rule, 3).expect("no special configuration");
    assert_eq!(cfg.depth, 1, "expected a depth-1 configuration");
    assert_eq!(
        rule.prototiles[cfg.host_prototile].label, "p2",
        "expected the configuration inside p2"
    );
    let angle = cfg.relating_map.factor.arg();
    let distance_to_0_or_pi = angle
        .abs()
        .min((angle.abs() - std::f64::consts::PI).abs());
    assert!(
        distance_to_0_or_pi > 1e-9,
        "relating rotation {angle} is 0 or pi"
    );
    assert!(
        (cfg.relating_map.factor.norm() - 1.0).abs() < 1e-9,
        "relating map is not a congruence"
    );
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "took {dt:?}");
    println!(
        "criterion 4: PASS -primitive incidence matrix; same-type sibling pair \
         inside p2 at depth 1 related by rotation {angle:.6} rad ({dt:?})"
    );
}

#[test]
fn criterion_5_dilatation_bound_apparatus() {
    let start = Instant::now();

    // Tutte embeddings are accurate and orientation preserving; kappa >= 1.
    for name in BUILTIN_NAMES {
        let report = rule_kappa(&load_builtin(name).unwrap(), TriangulationScheme::CentroidFan)
            .unwrap();
        assert!(report.kappa >= 1.0, "{name}: kappa {}", report.kappa);
        for p in &report.per_prototile {
            assert!(
                p.tutte_residual < 1e-10,
                "{name} prototile {}: residual {}",
                p.prototile,
                p.tutte_residual
            );
            assert_eq!(p.flipped, 0, "{name} prototile {}: flipped triangles", p.prototile);
        }
    }

    // A regular prototile embeds onto its own model: kappa exactly 1.
    let square = tilepack::rules::Prototile {
        id: 0,
        label: "unit-square".into(),
        vertices: vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)],
        base_edge: (0, 1),
        combinatorial_corners: vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)],
    };
    let sq = prototile_dilatation(&square, TriangulationScheme::CentroidFan).unwrap();
    assert!((sq.kappa - 1.0).abs() < 1e-12, "square kappa {}", sq.kappa);

    // Dilatation is invariant under similarity: remap the pinwheel
    // prototile by 100 seeded random similarities.
    let pinwheel = load_builtin("pinwheel").unwrap();
    let base = prototile_dilatation(&pinwheel.prototiles[0], TriangulationScheme::CentroidFan)
        .unwrap()
        .kappa;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_drift = 0.0f64;
    for round in 0..100 {
        let scale = rng.gen_range(0.2..5.0);
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let offset = c(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let s = Similarity::new(c(angle.cos(), angle.sin()) * scale, offset);
        let mapped = pinwheel.prototiles[0].transformed(&s);
        let kappa = prototile_dilatation(&mapped, TriangulationScheme::CentroidFan)
            .unwrap()
            .kappa;
        let drift = (kappa - base).abs() / base;
        worst_drift = worst_drift.max(drift);
        assert!(
            drift < 1e-12,
            "round {round}: kappa {kappa} vs {base} (relative drift {drift:.3e})"
        );
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 5.0, "took {dt:?}");
    println!(
        "criterion 5: PASS -residual < 1e-10, no flips, kappa >= 1, \
         kappa(square) = 1, worst relative similarity drift {worst_drift:.3e} \
         over 100 maps ({dt:?})"
    );
}

#[test]
fn criterion_6_packing_quality_at_level_three() {
    let start = Instant::now();
    let rule = load_builtin("pinwheel").unwrap();
    // Laid-out tangency error grows in proportion to the angle residual that
    // is left in the radii, so solve well past the 1e-8 acceptance line.
    let params = SeriesParams {
        tol: 1e-12,
        mode: PackMode::DiscMaximal,
        ..SeriesParams::default()
    };
    let pa = packed_aggregate(&rule, 3, &params).unwrap();
    assert!(
        pa.packing.residual <= 1e-8,
        "angle residual {}",
        pa.packing.residual
    );
    let diag = packing_error(&pa.pc, &pa.packing);
    assert!(
        diag.max_tangency_gap <= 1e-6 * diag.mean_radius,
        "tangency gap {} vs mean radius {}",
        diag.max_tangency_gap,
        diag.mean_radius
    );
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 120.0, "took {dt:?}");
    println!(
        "criterion 6: PASS -residual {:.3e}, tangency gap {:.3e} vs mean radius {:.3e} ({dt:?})",
        pa.packing.residual, diag.max_tangency_gap, diag.mean_radius
    );
}

#[test]
fn criterion_7_normalized_shapes_converge() {
    let start = Instant::now();
    let params = SeriesParams::default();
    let mut lines = Vec::new();
    for name in ["pinwheel", "chair"] {
        let rule = load_builtin(name).unwrap();
        let series = shape_convergence(&rule, 4, &params);
        assert!(
            series.failure.is_none(),
            "{name}: {}",
            series.failure.clone().unwrap_or_default()
        );
        assert_eq!(series.rows.len(), 5, "{name}: missing levels");
        let cs: Vec<f64> = series.rows.iter().map(|r| r.c_n).collect();
        for w in cs.windows(2) {
            assert!(
                w[1] < w[0],
                "{name}: c must strictly decrease, got {cs:?}"
            );
        }
        lines.push(format!(
            "{name}: c = [{}]",
            cs.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(", ")
        ));
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 1800.0, "took {dt:?}");
    println!(
        "criterion 7: PASS -{} ({dt:?})",
        lines.join("; ")
    );
}

#[test]
fn criterion_8_refinement_tightens_the_shape() {
    let start = Instant::now();
    let rule = load_builtin("pinwheel").unwrap();
    // Default euclidean mode throughout: disc layouts need interior
    // refinement vertices to connect tile fans across shared edges, which
    // hex_depth 0 does not provide.
    let shape_at = |hex: usize| {
        let params = SeriesParams { hex_depth: hex, ..SeriesParams::default() };
        packed_aggregate(&rule, 2, &params).unwrap()
    };
    let s0 = shape_at(0);
    let s1 = shape_at(1);
    let s2 = shape_at(2);
    let step = 1e-3 * s1.target.diameter();
    let d10 = hausdorff_distance(&s1.normalized.points, &s0.normalized.points, step).unwrap();
    let d21 = hausdorff_distance(&s2.normalized.points, &s1.normalized.points, step).unwrap();
    assert!(
        d21 < d10,
        "refinement must contract: |hex2 - hex1| = {d21:.6e}, |hex1 - hex0| = {d10:.6e}"
    );
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 600.0, "took {dt:?}");
    println!(
        "criterion 8: PASS -|hex2 - hex1| = {d21:.6e} < |hex1 - hex0| = {d10:.6e} ({dt:?})"
    );
}

#[test]
fn criterion_9_hausdorff_evaluator_matches_brute_force() {
    let start = Instant::now();
    let step = 1e-3;
    let brute = |a: &[C], b: &[C]| -> f64 {
        let directed = |src: &[C], dst: &[C]| {
            let mut worst = 0.0f64;
            for i in 0..src.len() {
                let (p, q) = (src[i], src[(i + 1) % src.len()]);
                let pieces = ((q - p).norm() / step).ceil().max(1.0) as usize;
                for k in 0..=pieces {
                    let z = p + (q - p) * (k as f64 / pieces as f64);
                    let nearest = (0..dst.len())
                        .map(|j| segment_distance(z, dst[j], dst[(j + 1) % dst.len()]))
                        .fold(f64::INFINITY, f64::min);
                    worst = worst.max(nearest);
                }
            }
            worst
        };
        directed(a, b).max(directed(b, a))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut polygon = || -> Vec<C> {
        let center = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let k = rng.gen_range(3..12);
        (0..k)
            .map(|i| {
                let angle = std::f64::consts::TAU * (i as f64) / (k as f64);
                let radius = rng.gen_range(0.2..1.5);
                center + c(angle.cos(), angle.sin()) * radius
            })
            .collect()
    };
    let mut worst = 0.0f64;
    for round in 0..50 {
        let a = polygon();
        let b = polygon();
        let fast = hausdorff_distance(&a, &b, step).unwrap();
        let slow = brute(&a, &b);
        let diff = (fast - slow).abs();
        worst = worst.max(diff);
        assert!(
            diff <= 1e-9 * slow.max(1.0),
            "round {round}: fast {fast} vs brute {slow}"
        );
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "took {dt:?}");
    println!(
        "criterion 9: PASS -50 random pairs agree, worst gap {worst:.3e} ({dt:?})"
    );
}
