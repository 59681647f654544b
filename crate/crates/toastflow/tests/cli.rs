//! End-to-end tests of the command-line binary: pipeline wiring, exit
//! codes, and byte-level determinism of generated outputs.

use std::path::Path;
use std::process::{Command, Output};

fn toastflow(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toastflow"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("failed to launch binary")
}

fn assert_code(out: &Output, want: i32) {
    let got = out.status.code().unwrap_or(-1);
    assert_eq!(
        got,
        want,
        "exit code {got}, wanted {want}\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn gen_round_check_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let out = toastflow(
        &[
            "gen-instance", "--torus", "16", "16", "--base", "8", "--factor", "2",
            "--margin", "3", "--circuits", "10", "--denominators", "3,5,7",
            "--seed", "42", "--out-dir", "inst",
        ],
        d,
    );
    assert_code(&out, 0);
    for f in ["graph.json", "toast.json", "flow.json", "witness.json", "demand.json"] {
        assert!(d.join("inst").join(f).exists(), "missing {f}");
    }

    let out = toastflow(
        &["toast-check", "--graph", "inst/graph.json", "--toast", "inst/toast.json", "--k", "3"],
        d,
    );
    assert_code(&out, 0);

    let out = toastflow(
        &[
            "round", "--graph", "inst/graph.json", "--toast", "inst/toast.json",
            "--flow", "inst/flow.json", "--demand", "inst/demand.json",
            "--out", "psi.json", "--trace", "trace.json",
        ],
        d,
    );
    assert_code(&out, 0);
    assert!(d.join("psi.json").exists());
    assert!(d.join("trace.json").exists());

    let out = toastflow(
        &[
            "check-flow", "--graph", "inst/graph.json", "--flow", "psi.json",
            "--demand", "inst/demand.json",
        ],
        d,
    );
    assert_code(&out, 0);
}

#[test]
fn gen_instance_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for name in ["a", "b"] {
        let out = toastflow(
            &[
                "gen-instance", "--torus", "16", "16", "--base", "8", "--factor", "2",
                "--margin", "3", "--circuits", "6", "--seed", "7", "--out-dir", name,
            ],
            d,
        );
        assert_code(&out, 0);
    }
    for f in ["graph.json", "toast.json", "flow.json", "witness.json", "demand.json"] {
        let a = std::fs::read(d.join("a").join(f)).unwrap();
        let b = std::fs::read(d.join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between identical seeded runs");
    }
}

#[test]
fn equidecomp_verify_and_render() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    // A = black squares of the checkerboard, B = white squares: equal
    // per-tile counts, so the decomposition stays local
    let mut a = Vec::new();
    let mut b = Vec::new();
    for y in 0u32..16 {
        for x in 0u32..16 {
            if (x + y) % 2 == 0 {
                a.push(y * 16 + x);
            } else {
                b.push(y * 16 + x);
            }
        }
    }
    std::fs::write(
        d.join("a.json"),
        serde_json::to_string(&serde_json::json!({ "vertices": a })).unwrap(),
    )
    .unwrap();
    std::fs::write(
        d.join("b.json"),
        serde_json::to_string(&serde_json::json!({ "vertices": b })).unwrap(),
    )
    .unwrap();

    let out = toastflow(
        &[
            "equidecomp", "--torus", "16", "16", "--set-a", "a.json", "--set-b", "b.json",
            "--epsilon", "1/2", "--out", "pieces.json",
        ],
        d,
    );
    assert_code(&out, 0);

    let out = toastflow(
        &[
            "verify-pieces", "--torus", "16", "16", "--set-a", "a.json", "--set-b", "b.json",
            "--pieces", "pieces.json",
        ],
        d,
    );
    assert_code(&out, 0);

    let out = toastflow(
        &[
            "render", "--torus", "16", "16", "--pieces", "pieces.json",
            "--format", "svg", "--out", "pieces.svg",
        ],
        d,
    );
    assert_code(&out, 0);
    let svg = std::fs::read_to_string(d.join("pieces.svg")).unwrap();
    assert!(svg.starts_with("<svg"), "render did not produce SVG");
}

#[test]
fn unequal_sets_fail_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("a.json"), r#"{"vertices":[0,1,2,3]}"#).unwrap();
    std::fs::write(d.join("b.json"), r#"{"vertices":[0,1,2]}"#).unwrap();
    let out = toastflow(
        &[
            "equidecomp", "--torus", "8", "8", "--set-a", "a.json", "--set-b", "b.json",
            "--out", "pieces.json",
        ],
        d,
    );
    assert_code(&out, 1);
}

#[test]
fn malformed_input_fails_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("broken.json"), "{\n \"torus\": [8,\n").unwrap();
    let out = toastflow(
        &["toast-check", "--graph", "broken.json", "--toast", "broken.json"],
        d,
    );
    assert_code(&out, 2);

    let out = toastflow(
        &["toast-check", "--graph", "missing.json", "--toast", "missing.json"],
        d,
    );
    assert_code(&out, 2);
}

#[test]
fn toast_check_reports_violated_property() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("graph.json"), r#"{"torus":[8,8]}"#).unwrap();
    // two disjoint root tiles at distance 1: their dichotomy fails
    std::fs::write(
        d.join("toast.json"),
        r#"{"tiles":[{"id":0,"parent":null,"vertices":[0,1]},{"id":1,"parent":null,"vertices":[2,3]}]}"#,
    )
    .unwrap();
    let out = toastflow(
        &["toast-check", "--graph", "graph.json", "--toast", "toast.json"],
        d,
    );
    assert_code(&out, 1);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("property"), "missing property report: {stdout}");
}
