use std::path::Path;

use gbem::cli::{run, EXIT_INPUT, EXIT_OK};
use gbem::report::read_matrix;

fn bench_path() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/data/bench_single.gbem").to_string()
}

fn gbem(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("gbem").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn extract_csv_has_matrix_and_diagnostics() {
    let (code, out, err) = gbem(&["extract", "--input", &bench_path()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "net,C_1,C_2");
    let c11: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!(c11 > 200e-18 && c11 < 250e-18, "{c11}");
    assert!(out.contains("net,panels,unknowns,method,residual_norm"));
    assert!(out.contains("reciprocity_defect,"));
}

#[test]
fn extract_json_is_deterministic_apart_from_timings() {
    let strip = |s: &str| {
        let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
        for row in v["rows"].as_array_mut().unwrap() {
            let row = row.as_object_mut().unwrap();
            row.remove("assembly_seconds");
            row.remove("solve_seconds");
        }
        v
    };
    let (c1, a, _) = gbem(&["extract", "--input", &bench_path(), "--format", "json"]);
    let (c2, b, _) = gbem(&["extract", "--input", &bench_path(), "--format", "json"]);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    let (a, b) = (strip(&a), strip(&b));
    assert_eq!(a, b);
    assert_eq!(a["nets"], serde_json::json!([1, 2]));
    assert_eq!(a["params"]["p1"], 1.5);
    assert_eq!(a["rows"][0]["method"], "cholesky");
}

#[test]
fn single_net_and_parameter_overrides() {
    let (code, out, _) = gbem(&["extract", "--input", &bench_path(), "--net", "2", "--p1", "3", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["rows"][0]["net"], 2);
    assert_eq!(v["params"]["p1"], 3.0);
    assert!(v["reciprocity_defect"].is_null());
}

#[test]
fn collocation_baseline_uses_lu() {
    let (code, out, _) = gbem(&["extract", "--input", &bench_path(), "--net", "1", "--baseline", "collocation", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"][0]["method"], "lu");
    assert_eq!(v["params"]["baseline"], "collocation");
}

#[test]
fn dump_matrix_writes_one_file_per_row() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("sys.bin");
    let out_file = dir.path().join("out.csv");
    let (code, _, err) = gbem(&[
        "extract",
        "--input",
        &bench_path(),
        "--dump-matrix",
        base.to_str().unwrap(),
        "--output",
        out_file.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(std::fs::read_to_string(&out_file).unwrap().starts_with("net,C_1,C_2"));
    for net in [1, 2] {
        let bytes = std::fs::read(dir.path().join(format!("sys.bin.net{net}"))).unwrap();
        let m = read_matrix(&bytes).expect("well-formed dump");
        assert!(m.dim() > 0);
        assert!(m.asymmetry() < 1e-12);
    }
}

#[test]
fn validate_accepts_the_benchmark() {
    let (code, out, _) = gbem(&["validate", "--input", &bench_path()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("ok (2 nets, 1 regions)"));
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let overlap = write(
        dir.path(),
        "overlap.gbem",
        "domain lo(0,0,0) hi(10,10,10)\nregion 0 1 lo(0,0,0) hi(10,10,10)\nnet 1 cuboid lo(2,2,2) hi(4,4,4)\nnet 2 cuboid lo(3,3,3) hi(5,5,5)\n",
    );
    let (code, _, err) = gbem(&["validate", "--input", &overlap]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.starts_with("error:"));
    let syntax = write(dir.path(), "bad.gbem", "domain (0,0,0)\n");
    assert_eq!(gbem(&["extract", "--input", &syntax]).0, EXIT_INPUT);
    assert_eq!(gbem(&["extract", "--input", "/nonexistent/scene.gbem"]).0, EXIT_INPUT);
    assert_eq!(gbem(&["extract", "--input", &bench_path(), "--net", "7"]).0, EXIT_INPUT);
    assert_eq!(gbem(&["extract", "--input", &bench_path(), "--p1", "-1"]).0, EXIT_INPUT);
    assert_eq!(gbem(&["extract", "--input", &bench_path(), "--format", "xml"]).0, EXIT_INPUT);
    assert_eq!(gbem(&["frobnicate"]).0, EXIT_INPUT);
}

#[test]
fn help_exits_cleanly() {
    let (code, out, _) = gbem(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("extract"));
}

#[test]
fn small_selftest_passes() {
    let (code, out, _) = gbem(&["kernels", "selftest", "--pairs", "2", "--depth", "6"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(out.lines().count(), 8);
    assert!(out.lines().all(|l| l.ends_with("ok")));
}
