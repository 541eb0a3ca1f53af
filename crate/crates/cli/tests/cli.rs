use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn family(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("families")
        .join(name)
}

fn conejsr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conejsr"))
        .args(args)
        .env_remove("CONEJSR_THREADS")
        .output()
        .expect("binary runs")
}

fn run_to(dir: &Path, stem: &str, args: &[&str]) -> (i32, Value) {
    let out = dir.join(format!("{stem}.json"));
    let mut all = args.to_vec();
    all.extend(["--out", out.to_str().unwrap()]);
    let o = conejsr(&all);
    let code = o.status.code().unwrap();
    if code == 1 {
        panic!("{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    }
    (
        code,
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap(),
    )
}

fn fam(name: &str) -> String {
    family(name).to_str().unwrap().to_string()
}

#[test]
fn jsr_writes_one_row_per_depth() {
    let dir = tempfile::tempdir().unwrap();
    let f = fam("linear_pair.json");
    let (code, rec) = run_to(dir.path(), "jsr", &["jsr", "--family", &f, "--kmax", "6"]);
    assert_eq!(code, 0);
    assert_eq!(rec["command"], "jsr");
    assert_eq!(rec["outputs"]["rows"].as_array().unwrap().len(), 6);
    let csv = std::fs::read_to_string(dir.path().join("jsr.jsr.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,lower_k,upper_k,best_word");
    assert_eq!(lines.len(), 7);
    assert!(lines[2].starts_with("2,1.53500182080506"), "{}", lines[2]);
    assert!(lines[2].ends_with("\"[1,2]\""), "{}", lines[2]);
}

#[test]
fn reruns_are_byte_identical_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let f = fam("tanh_ann.json");
    let args = [
        "trajectory",
        "--family",
        &f,
        "--seed",
        "9",
        "--horizon",
        "10",
    ];
    let (_, a) = run_to(dir.path(), "a", &args);
    let (_, b) = run_to(dir.path(), "b", &args);
    assert_eq!(a["inputs_digest"], b["inputs_digest"]);
    assert_eq!(a["outputs"], b["outputs"]);

    let g = fam("saturating.json");
    let args = ["eigencurve", "--family", &g, "--points", "7"];
    run_to(dir.path(), "c", &args);
    run_to(dir.path(), "d", &args);
    let c = std::fs::read(dir.path().join("c.curve.csv")).unwrap();
    let d = std::fs::read(dir.path().join("d.curve.csv")).unwrap();
    assert_eq!(c, d);
}

#[test]
fn eigencurve_matches_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let f = fam("saturating.json");
    for threads in ["1", "3"] {
        let (code, rec) = run_to(
            dir.path(),
            &format!("curve{threads}"),
            &[
                "eigencurve",
                "--family",
                &f,
                "--cgrid",
                "0.1,1,10",
                "--threads",
                threads,
            ],
        );
        assert_eq!(code, 0);
        let rows = rec["outputs"]["report"]["rows"].as_array().unwrap();
        let got: Vec<f64> = rows.iter().map(|r| r["rho_c"].as_f64().unwrap()).collect();
        for (g, c) in got.iter().zip([0.1, 1.0, 10.0]) {
            let want = 1.0 / (1.0 + c);
            assert!((g - want).abs() <= 1e-12 * want, "c = {c}: {g} vs {want}");
        }
    }
    let one = std::fs::read(dir.path().join("curve1.curve.csv")).unwrap();
    let three = std::fs::read(dir.path().join("curve3.curve.csv")).unwrap();
    assert_eq!(one, three);
}

#[test]
fn polytope_certificate_verifies_and_exit_codes_follow_the_status() {
    let dir = tempfile::tempdir().unwrap();
    let f = fam("power_mean_pair_swapped.json");
    let (code, rec) = run_to(
        dir.path(),
        "cert",
        &["polytope", "--family", &f, "--smp", "1,2"],
    );
    assert_eq!(code, 0);
    assert_eq!(rec["outputs"]["vertex_count"], 4);
    assert_eq!(rec["outputs"]["alpha_15"], "1.11731843209326e0");
    let csv = std::fs::read_to_string(dir.path().join("cert.vertices.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);

    let cert = dir.path().join("cert.json");
    let (code, v) = run_to(
        dir.path(),
        "verify",
        &["verify", "--family", &f, "--cert", cert.to_str().unwrap()],
    );
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["ok"], true);

    // The same certificate checked against the other exponents.
    let g = fam("power_mean_pair.json");
    let (code, v) = run_to(
        dir.path(),
        "wrong",
        &["verify", "--family", &g, "--cert", cert.to_str().unwrap()],
    );
    assert_eq!(code, 2);
    assert_eq!(v["outputs"]["ok"], false);

    let (code, rec) = run_to(
        dir.path(),
        "budget",
        &[
            "polytope",
            "--family",
            &g,
            "--smp",
            "1,2",
            "--max-vertices",
            "200",
        ],
    );
    assert_eq!(code, 3);
    assert_eq!(rec["outputs"]["certificate"]["status"], "BudgetExceeded");
}

#[test]
fn errors_exit_with_one() {
    let ann = fam("tanh_ann.json");
    let o = conejsr(&["jsr", "--family", &ann]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not 1-homogeneous"));

    let o = conejsr(&[
        "spectral",
        "--family",
        &fam("linear_pair.json"),
        "--word",
        "1,3",
    ]);
    assert_eq!(o.status.code(), Some(1));

    let o = conejsr(&["props", "--family", "/nonexistent/family.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn props_and_sandwich_on_a_network() {
    let dir = tempfile::tempdir().unwrap();
    let ann = fam("tanh_ann.json");
    let (code, rec) = run_to(
        dir.path(),
        "props",
        &["props", "--family", &ann, "--samples", "300"],
    );
    assert_eq!(code, 0);
    for m in rec["outputs"]["members"].as_array().unwrap() {
        assert_eq!(m["passed"], true, "{m}");
    }
    let (code, rec) = run_to(
        dir.path(),
        "sandwich",
        &["sandwich", "--family", &ann, "--kmax", "3"],
    );
    assert_eq!(code, 0);
    // tanh saturates, so the family at infinity is the linear part.
    let lower = rec["outputs"]["lower"].as_f64().unwrap();
    assert!((lower - 0.6).abs() < 1e-12, "{lower}");
}
