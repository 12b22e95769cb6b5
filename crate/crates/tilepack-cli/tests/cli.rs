//! End-to-end runs of the installed binary: exit codes, stdout content,
//! and byte-identical artifacts across repeated invocations.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tilepack"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn temp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("tilepack-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn rules_list_names_all_builtins() {
    let out = run(&["rules", "list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for name in ["pinwheel", "chair", "domino", "sphinx", "penrose"] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn rules_validate_accepts_builtins_and_rejects_unknown() {
    let ok = run(&["rules", "validate", "--rule", "sphinx"]);
    assert!(ok.status.success());
    assert!(stdout(&ok).contains("consistent"));

    let missing = run(&["rules", "validate", "--rule", "no-such-rule"]);
    assert!(!missing.status.success());
}

#[test]
fn rules_kappa_reports_frozen_value() {
    let out = run(&["rules", "kappa", "--rule", "pinwheel"]);
    assert!(out.status.success());
    assert!(
        stdout(&out).contains("kappa(pinwheel) = 6.171292730"),
        "stdout:\n{}",
        stdout(&out)
    );
}

#[test]
fn rules_check_assumption_verifies_builtins() {
    let out = run(&["rules", "check-assumption", "--rule", "sphinx"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("primitive"));
    assert!(text.contains("special configuration"));
    assert!(text.contains("verified"));
}

#[test]
fn subdivide_reports_frozen_complex_counts() {
    let out = run(&["subdivide", "--rule", "pinwheel", "--depth", "2", "--check"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("25 tiles, 36 vertices, 60 edges, euler 1"),
        "stdout:\n{text}"
    );
    assert!(text.contains("0 violations"));
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let json_a = temp_path("weld-a.json");
    let json_b = temp_path("weld-b.json");
    let svg_a = temp_path("weld-a.svg");
    let svg_b = temp_path("weld-b.svg");
    for (json, svg) in [(&json_a, &svg_a), (&json_b, &svg_b)] {
        let out = run(&[
            "subdivide",
            "--rule",
            "sphinx",
            "--depth",
            "2",
            "--out",
            json.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
            "--highlight",
            "0",
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&json_a).unwrap(), std::fs::read(&json_b).unwrap());
    assert_eq!(std::fs::read(&svg_a).unwrap(), std::fs::read(&svg_b).unwrap());
}

#[test]
fn pack_writes_deterministic_packing_json() {
    let out_a = temp_path("pack-a.json");
    let out_b = temp_path("pack-b.json");
    for path in [&out_a, &out_b] {
        let out = run(&[
            "pack",
            "--rule",
            "domino",
            "--depth",
            "1",
            "--buffer",
            "1",
            "--mode",
            "euclid",
            "--tol",
            "1e-9",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(stdout(&out).contains("residual"));
    }
    let bytes = std::fs::read(&out_a).unwrap();
    assert_eq!(bytes, std::fs::read(&out_b).unwrap());
    let doc: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(doc["geometry"], "euclidean");
    assert_eq!(doc["provenance"]["rule"], "domino");
    assert!(doc["vertices"].as_array().unwrap().len() > 50);
}

#[test]
fn converge_prints_csv_rows() {
    let out = run(&[
        "converge",
        "--rule",
        "chair",
        "--n-max",
        "1",
        "--buffer",
        "1",
        "--mode",
        "euclid",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "rule,n,tiles,hex_depth,buffer,mode,packing_residual,d_n,c_n"
    );
    let rows: Vec<&str> = lines.filter(|l| l.starts_with("chair,")).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("chair,0,1,1,1,euclidean_boundary,"));
    assert!(rows[1].starts_with("chair,1,4,1,1,euclidean_boundary,"));
}

#[test]
fn shape_command_emits_normalized_document() {
    let path = temp_path("shape.json");
    let out = run(&[
        "shape",
        "--rule",
        "domino",
        "--depth",
        "1",
        "--buffer",
        "1",
        "--mode",
        "euclid",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(doc["rule"], "domino");
    assert_eq!(doc["n"], 1);
    let c = doc["c"].as_f64().unwrap();
    assert!(c > 0.0 && c < 1.0, "c = {c}");
    // Normalized corners start at 0 and span to 1.
    let corners = doc["corners"].as_array().unwrap();
    assert!(!corners.is_empty());
}

#[test]
fn render_draws_highlighted_patch() {
    let path = temp_path("render.svg");
    let out = run(&[
        "render",
        "--rule",
        "penrose",
        "--depth",
        "2",
        "--highlight",
        "1,0",
        "--svg",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("#7da7d9"), "highlight fill missing");
}
