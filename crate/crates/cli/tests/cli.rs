use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cheshire"));
    c.env_remove("CHESHIRE_OUTPUT_DIR");
    c
}

fn cheshire(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn cheshire")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn program(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("programs")
        .join(name)
}

fn schema(kind: &str) -> jsonschema::Validator {
    let text = stdout(&cheshire(&["schema", kind]));
    let s: Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&s).unwrap()
}

fn assert_valid(kind: &str, doc: &Value) {
    let v = schema(kind);
    let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{kind}: {errors:?}\n{doc}");
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn close(v: &Value, want: f64) -> bool {
    (num(v) - want).abs() < 1e-12
}

#[test]
fn run_delayed_at_pi_swaps_grin_and_snarl() {
    let o = cheshire(&[
        "run", "delayed", "--theta", "pi", "--phi", "0", "--method", "analytic",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("rows", &doc);
    let row = &doc[0];
    assert!(close(&row["xL_re"], 1.0));
    assert!(close(&row["xR_re"], 0.0));
    assert!(close(&row["zL_re"], 0.0));
    assert!(close(&row["zR_re"], -1.0));
    assert_eq!(row["flag"], "ok");
}

#[test]
fn run_original_reports_cheshire_values() {
    let o = cheshire(&["run", "original"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("report", &doc);
    for (k, want) in [
        ("piL_re", 1.0),
        ("piR_re", 0.0),
        ("xL_re", 0.0),
        ("xR_re", 1.0),
    ] {
        assert!(close(&doc[k], want), "{k}: {}", doc[k]);
    }
    let o = cheshire(&[
        "run",
        "grin-snarl",
        "--method",
        "sample",
        "--g",
        "1e-2",
        "--shots",
        "2000",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("report", &doc);
    assert!(doc["zL_se"].as_f64().unwrap() > 0.0);
}

#[test]
fn run_csv_has_fixed_columns() {
    let o = cheshire(&[
        "run", "delayed", "--theta", "1", "--phi", "-pi/4", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "theta,phi,xL_re,xL_im,xR_re,xR_im,zL_re,zL_im,zR_re,zR_im,prob,flag,method,xL_se,xR_se,zL_se,zR_se"
    );
    assert!(lines.next().unwrap().starts_with("1.0,-0.78539816339744"));
    assert_eq!(lines.next(), None);
}

#[test]
fn pole_exits_with_two() {
    let o = cheshire(&["run", "delayed", "--theta", "pi/2", "--phi", "pi"]);
    assert_eq!(o.status.code(), Some(2));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("rows", &doc);
    assert_eq!(doc[0]["flag"], "diverged");
    assert!(doc[0]["xL_re"].is_null());
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        &["run", "cheshire"][..],
        &["run", "delayed", "--bogus"],
        &["run", "delayed", "--theta", "pie"],
        &["run", "delayed", "--g", "1e-3"],
        &["run", "delayed", "--method", "meter", "--g", "0.5"],
        &["run", "delayed", "--method", "meter", "--shots", "10"],
        &["run", "delayed", "--method", "sample", "--shots", "0"],
        &["run", "original", "--theta", "1"],
        &["sweep", "--theta", "0:1", "--phi", "0:1:2"],
        &[],
    ] {
        let o = cheshire(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
    assert_eq!(cheshire(&["--help"]).status.code(), Some(0));
    assert_eq!(cheshire(&["--version"]).status.code(), Some(0));
}

#[test]
fn sweep_writes_table_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let o = cheshire(&[
        "sweep",
        "--theta",
        "0:2pi:13",
        "--phi",
        "0:2pi:13",
        "--output",
        path.to_str().unwrap(),
    ]);
    // three grid points sit on the pole D = 0
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let summary = stdout(&o);
    assert!(summary.contains("rows=169 flagged=3"), "{summary}");
    let gap: f64 = summary.rsplit('=').next().unwrap().trim().parse().unwrap();
    assert!(gap < 1e-12, "{summary}");
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 170);
}

#[test]
fn sweep_default_path_uses_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args([
            "sweep", "--theta", "0:1:2", "--phi", "0:1:2", "--format", "json",
        ])
        .env("CHESHIRE_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap())
            .unwrap();
    assert_valid("rows", &doc);
    assert_eq!(doc.as_array().unwrap().len(), 4);
}

#[test]
fn sweep_unwritable_path_fails() {
    let o = cheshire(&[
        "sweep",
        "--theta",
        "0:1:2",
        "--phi",
        "0:1:2",
        "--output",
        "/nonexistent/dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot write"));
}

#[test]
fn single_point_sweep_reproduces_run() {
    for method in [
        &["--method", "analytic"][..],
        &["--method", "meter", "--g", "1e-3"],
        &[
            "--method", "sample", "--g", "1e-2", "--shots", "5000", "--seed", "9",
        ],
    ] {
        let mut run = vec![
            "run", "delayed", "--theta", "2.2", "--phi", "0.3", "--format", "csv",
        ];
        run.extend(method);
        let mut sw = vec![
            "sweep", "--theta", "2.2:0:1", "--phi", "0.3:0:1", "--format", "csv", "--output", "-",
        ];
        sw.extend(method);
        let (a, b) = (cheshire(&run), cheshire(&sw));
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(stdout(&a), stdout(&b), "{method:?}");
    }
}

#[test]
fn sweep_at_pi_has_negative_snarl_for_every_phase() {
    let o = cheshire(&[
        "sweep", "--theta", "pi:pi:1", "--phi", "0:2pi:25", "--format", "json", "--output", "-",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for row in doc.as_array().unwrap() {
        assert!(
            close(&row["zR_re"], -1.0) && close(&row["zR_im"], 0.0),
            "{row}"
        );
        assert!(close(&row["zL_re"], 0.0), "{row}");
    }
}

#[test]
fn gnuplot_blocks_per_theta() {
    let o = cheshire(&[
        "sweep", "--theta", "0:1:3", "--phi", "0:1:4", "--format", "gnuplot", "--output", "-",
    ]);
    let text = stdout(&o);
    assert!(text.starts_with("# theta phi xL_re"));
    assert_eq!(text.split("\n\n").count(), 3);
    assert_eq!(
        text.lines()
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .count(),
        12
    );
    assert!(stderr(&o).contains("rows=12"));
}

#[test]
fn exec_flip_pair_exchanges_arms() {
    let values = |name: &str| -> Vec<f64> {
        let o = cheshire(&["exec", program(name).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_valid("program", &doc);
        doc.as_array()
            .unwrap()
            .iter()
            .map(|r| num(&r["value_re"]))
            .collect()
    };
    let before = values("flip_before.mzi");
    let after = values("flip_after.mzi");
    for (got, want) in before.iter().zip([0.0, 1.0, 1.0, 0.0]) {
        assert!((got - want).abs() < 1e-12, "{before:?}");
    }
    for (got, want) in after.iter().zip([1.0, 0.0, 0.0, -1.0]) {
        assert!((got - want).abs() < 1e-12, "{after:?}");
    }
}

#[test]
fn exec_original_program() {
    let o = cheshire(&[
        "exec",
        program("original.mzi").to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 7);
}

#[test]
fn exec_typo_names_line_five() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/typo.mzi");
    let o = cheshire(&["exec", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("typo.mzi:5:1:"), "{err}");
    assert!(err.contains("meassure"), "{err}");
    assert!(stdout(&o).is_empty());
}

#[test]
fn exec_sampled_is_byte_identical() {
    let path = program("sampled.mzi");
    let a = cheshire(&["exec", path.to_str().unwrap()]);
    let b = cheshire(&["exec", path.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_valid("program", &doc);
}

#[test]
fn exec_pole_and_missing_file() {
    let o = cheshire(&["exec", program("pole.mzi").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("\"diverged\""));
    let o = cheshire(&["exec", "/nonexistent.mzi"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot read"));
}

#[test]
fn missing_preselect_reported_without_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.mzi");
    std::fs::write(&path, "# only a comment\n").unwrap();
    let o = cheshire(&["exec", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no preselect"), "{}", stderr(&o));
}

#[test]
fn schemas_are_valid_json_schema() {
    for kind in ["rows", "report", "program"] {
        schema(kind);
    }
}
