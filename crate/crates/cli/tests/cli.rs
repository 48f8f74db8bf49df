use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn example(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name).to_str().unwrap().to_string()
}

fn hlpicone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hlpicone")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write_problem(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(|f| f.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn verify_examples_pass() {
    for (file, id) in [
        ("p13_sine.json", "1.3"),
        ("p16_alpha2.json", "1.6"),
        ("p16_expressions.json", "1.6"),
        ("p23_alpha2.json", "2.3"),
        ("p24_alpha2.json", "2.4"),
        ("p26_n2.json", "2.6"),
        ("p26_n3.json", "2.6"),
    ] {
        let o = hlpicone(&["verify", "--problem", &example(file), "--identity", id]);
        assert_eq!(code(&o), 0, "{file}: {}", String::from_utf8_lossy(&o.stderr));
        let r = json(&o);
        assert_eq!(r["verdict"], "pass");
        assert!(r["residual_int"].as_f64().unwrap() <= 1e-6, "{file}");
        assert!(r["residual_diff"].as_f64().unwrap() <= 1e-4, "{file}");
        assert_eq!(r["grid_n"], 2001);
    }
}

#[test]
fn verify_writes_samples_csv_and_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv) = (dir.path().join("r.json"), dir.path().join("s.csv"));
    let o = hlpicone(&[
        "verify",
        "--problem",
        &example("p16_alpha2.json"),
        "--identity",
        "1.6",
        "--mode",
        "int",
        "--out",
        out.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["mode"], "int");
    let (header, rows) = csv_rows(&csv);
    assert_eq!(header, ["x", "F", "dF", "R"]);
    assert_eq!(rows.len(), 2001);
}

#[test]
fn as_printed_bracket_power_fails() {
    let o = hlpicone(&[
        "verify",
        "--problem",
        &example("p16_alpha2.json"),
        "--identity",
        "1.6",
        "--variant",
        "bracket_power=as_printed",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["verdict"], "fail");
}

#[test]
fn sweep_names_the_default_variant() {
    let o = hlpicone(&["verify", "--problem", &example("p24_alpha2.json"), "--identity", "2.4", "--sweep"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["best_verdict"], "pass");
    assert_eq!(r["best_variant"]["bracket_power"], "corrected");
    assert_eq!(r["best_variant"]["condition_power"], "v_prime");
}

#[test]
fn compare_examples() {
    for (file, theorem, want) in [
        ("sturm_c3.json", "c3", 0),
        ("t1_identical.json", "1", 0),
        ("t1_manufactured.json", "1", 0),
        ("t2_manufactured.json", "2", 0),
        ("t1_violation.json", "1", 4),
    ] {
        let o = hlpicone(&["compare", "--problem", &example(file), "--theorem", theorem]);
        assert_eq!(code(&o), want, "{file}: {}", String::from_utf8_lossy(&o.stderr));
        let r = json(&o);
        assert_eq!(r["counts"]["counterexample"], 0, "{file}");
    }
    let o = hlpicone(&["compare", "--problem", &example("sturm_c3.json"), "--theorem", "c3"]);
    assert_eq!(json(&o)["counts"]["zero_found"], 32);
    let o = hlpicone(&["compare", "--problem", &example("t1_violation.json"), "--theorem", "1"]);
    let r = json(&o);
    assert_eq!(r["hypotheses_hold"], false);
    let broken: Vec<_> = r["hypotheses"].as_array().unwrap().iter().filter(|h| h["holds"] == false).collect();
    assert_eq!(broken.len(), 1);
    assert_eq!(broken[0]["name"], "A <= a");
}

#[test]
fn compare_flags_override_the_file() {
    let o = hlpicone(&[
        "compare",
        "--problem",
        &example("sturm_c3.json"),
        "--theorem",
        "c3",
        "--samples",
        "5",
        "--seed",
        "9",
    ]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["samples"].as_array().unwrap().len(), 5);
    assert_eq!(r["settings"]["seed"], 9);
}

#[test]
fn theorem_must_match_problem_shape() {
    let o = hlpicone(&["compare", "--problem", &example("sturm_c3.json"), "--theorem", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn eigen_examples() {
    let o = hlpicone(&["eigen", "--problem", &example("eigen_dirichlet.json")]);
    assert_eq!(code(&o), 0);
    let lambda: f64 = String::from_utf8(o.stdout).unwrap().trim().parse().unwrap();
    assert!((lambda - 1.0).abs() < 1e-6, "{lambda}");

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.json");
    let o = hlpicone(&[
        "eigen",
        "--problem",
        &example("eigen_clamped.json"),
        "--order",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let lambda: f64 = String::from_utf8(o.stdout).unwrap().trim().parse().unwrap();
    assert!((lambda - 500.564).abs() < 0.5, "{lambda}");
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["boundary_residuals"].as_array().unwrap().len(), 4);

    let o = hlpicone(&["eigen", "--problem", &example("eigen_clamped.json"), "--order", "2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn solve_sine_on_uniform_grid() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = hlpicone(&["solve", "--problem", &example("solve_sine.json"), "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let zeros = r["zeros"].as_array().unwrap();
    assert_eq!(zeros.len(), 1);
    assert!((zeros[0].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-8);
    let (header, rows) = csv_rows(&csv);
    assert_eq!(header, ["x", "y1", "y2", "u", "du", "flux"]);
    assert_eq!(rows.len(), 2001);
    assert_eq!(rows[1000][0], std::f64::consts::FRAC_PI_2);
    assert!((rows[1000][3] - 1.0).abs() < 1e-8);
}

#[test]
fn solve_cubic_fourth_order() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let o = hlpicone(&["solve", "--problem", &example("solve_cubic.json"), "--csv", csv.to_str().unwrap(), "--mesh"]);
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(&csv);
    assert_eq!(header.len(), 11);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1.0);
    assert!((last[5] - 1.0).abs() < 1e-10, "u(1) = {}", last[5]);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_coef = write_problem(
        dir.path(),
        "coef.json",
        r#"{"alpha": 1, "interval": [0, 1], "order": "second", "coefficients": {"p": "2*", "q": "1"}, "initial": [[0, 1]]}"#,
    );
    let o = hlpicone(&["solve", "--problem", bad_coef.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("coefficient p") && msg.contains("byte 2"), "{msg}");

    let no_interval = write_problem(
        dir.path(),
        "iv.json",
        r#"{"alpha": 1, "order": "second", "coefficients": {"p": "1", "q": "1"}}"#,
    );
    let o = hlpicone(&["solve", "--problem", no_interval.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("interval"));

    let unknown = write_problem(
        dir.path(),
        "unknown.json",
        r#"{"alpha": 1, "interval": [0, 1], "order": "second", "colour": "red"}"#,
    );
    assert_eq!(code(&hlpicone(&["solve", "--problem", unknown.to_str().unwrap()])), 2);

    let o = hlpicone(&["verify", "--problem", &example("p16_alpha2.json"), "--identity", "9.9"]);
    assert_eq!(code(&o), 2);
    let o =
        hlpicone(&["verify", "--problem", &example("p16_alpha2.json"), "--identity", "1.6", "--variant", "colour=red"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&hlpicone(&["solve", "--problem", "/nonexistent/problem.json"])), 2);
    assert_eq!(code(&hlpicone(&["frobnicate"])), 2);
    assert_eq!(code(&hlpicone(&["--help"])), 0);
}

#[test]
fn singular_coefficient_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        dir.path(),
        "sing.json",
        r#"{"alpha": 1, "interval": [0, 1], "order": "second", "coefficients": {"p": "x - 0.5", "q": "1"}, "initial": [[0, 1]]}"#,
    );
    let o = hlpicone(&["solve", "--problem", p.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("r{run}.json"));
        let o = hlpicone(&[
            "compare",
            "--problem",
            &example("t2_manufactured.json"),
            "--theorem",
            "2",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
