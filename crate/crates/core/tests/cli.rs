use std::io::Write;
use std::path::PathBuf;
use std::process::Command;

use tempfile::TempDir;

const INTERVAL: &str = r#"{
  "edges": [{"id": 1, "from": "a", "to": "b", "length": 3.141592653589793}],
  "conditions": {"a": {"kind": "dirichlet"}, "b": {"kind": "dirichlet"}},
  "model": {"operator": "laplace"}
}"#;

const STAR: &str = r#"{
  "edges": [
    {"id": 1, "from": "c", "to": "x", "length": 1.0},
    {"id": 2, "from": "c", "to": "y", "length": 0.7071067811865476},
    {"id": 3, "from": "c", "to": "z", "length": 0.7853981633974483}
  ],
  "conditions": {"c": {"kind": "dft"}, "x": {"kind": "dft"}, "y": {"kind": "dft"}, "z": {"kind": "dft"}},
  "model": {"operator": "scattering", "k_min": 0.5, "k_max": 12.0}
}"#;

const LOOPY: &str = r#"{
  "edges": [
    {"id": 1, "from": "a", "to": "a", "length": 1.3},
    {"id": 2, "from": "a", "to": "b", "length": 0.9},
    {"id": 3, "from": "a", "to": "b", "length": 1.1}
  ],
  "conditions": {"a": {"kind": "standard"}, "b": {"kind": "delta", "alpha": 2.0}},
  "model": {"operator": "laplace", "k_min": 0.5, "k_max": 12.0}
}"#;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: TempDir::new().unwrap(),
        }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::File::create(&path)
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
        path
    }
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qgraph")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn p(path: &std::path::Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn spectrum_of_dirichlet_interval() {
    let ws = Workspace::new();
    let f = ws.file("interval.qg", INTERVAL);
    let (code, out, _) = run(&["spectrum", p(&f), "--kmin", "0.5", "--kmax", "5.5"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "index,k,multiplicity,residual");
    assert_eq!(lines.len(), 6);
    for (n, line) in lines[1..].iter().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], (n + 1).to_string());
        assert!((fields[1].parse::<f64>().unwrap() - (n + 1) as f64).abs() < 1e-10);
        assert_eq!(fields[2], "1");
        assert!(fields[3].parse::<f64>().unwrap() < 1e-10);
    }
}

#[test]
fn no_verify_leaves_residual_empty() {
    let ws = Workspace::new();
    let f = ws.file("interval.qg", INTERVAL);
    let (code, out, _) = run(&["spectrum", p(&f), "--kmin", "0.5", "--kmax", "2.5", "--no-verify"]);
    assert_eq!(code, 0);
    assert!(out.lines().skip(1).all(|l| l.ends_with(',')));
}

#[test]
fn output_independent_of_jobs_and_runs() {
    let ws = Workspace::new();
    let f = ws.file("loopy.qg", LOOPY);
    let (_, first, _) = run(&["spectrum", p(&f)]);
    let (_, again, _) = run(&["spectrum", p(&f)]);
    let (_, parallel, _) = run(&["spectrum", p(&f), "--jobs", "4"]);
    assert!(first.lines().count() > 5);
    assert_eq!(first, again);
    assert_eq!(first, parallel);
    let (_, j1, _) = run(&["spectrum", p(&f), "--format", "json"]);
    let (_, j4, _) = run(&["spectrum", p(&f), "--format", "json", "--jobs", "3"]);
    assert_eq!(j1, j4);
}

#[test]
fn json_report_carries_metadata() {
    let ws = Workspace::new();
    let f = ws.file("interval.qg", INTERVAL);
    let (code, out, _) = run(&[
        "spectrum",
        p(&f),
        "--kmin",
        "0.5",
        "--kmax",
        "3.5",
        "--format",
        "json",
        "--grid-q",
        "12",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["metadata"]["operator"], "laplace");
    assert_eq!(v["metadata"]["q"], 12.0);
    assert_eq!(v["metadata"]["input_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn check_reports_each_vertex() {
    let ws = Workspace::new();
    let f = ws.file("loopy.qg", LOOPY);
    let (code, out, _) = run(&["check", p(&f)]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("a,4,standard,yes,yes,yes,yes,yes"));
    assert!(lines[2].starts_with("b,2,delta,yes,no,no,no,no"));
}

#[test]
fn check_flags_inadmissible_vertex_with_exit_two() {
    let ws = Workspace::new();
    let text = INTERVAL.replace(
        r#"{"kind": "dirichlet"}, "b""#,
        r#"{"kind": "matrix_pair", "a": [[1]], "b": [[[0, 1]]]}, "b""#,
    );
    let f = ws.file("bad.qg", &text);
    let (code, out, _) = run(&["check", p(&f)]);
    assert_eq!(code, 2);
    assert!(out.lines().nth(1).unwrap().starts_with("a,1,matrix_pair,no"));
    let (code, _, err) = run(&["spectrum", p(&f), "--kmin", "1", "--kmax", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("error[inadmissible]") && err.contains("'a'"), "{err}");
}

#[test]
fn input_errors_exit_one() {
    let ws = Workspace::new();
    let f = ws.file("broken.qg", "{\"edges\": [");
    let (code, _, err) = run(&["spectrum", p(&f), "--kmin", "1", "--kmax", "2"]);
    assert_eq!(code, 1);
    assert!(err.contains("error[input]"));

    let wrong_dim = INTERVAL.replace(
        r#"{"kind": "dirichlet"}, "b""#,
        r#"{"kind": "unitary", "u": [[1, 0], [0, 1]]}, "b""#,
    );
    let f = ws.file("dim.qg", &wrong_dim);
    let (code, _, err) = run(&["check", p(&f)]);
    assert_eq!(code, 1);
    assert!(err.contains("'a'"));

    let (code, _, _) = run(&["spectrum", "/nonexistent/file.qg", "--kmin", "1", "--kmax", "2"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 1);
    let f = ws.file("interval.qg", INTERVAL);
    let (code, _, err) = run(&["spectrum", p(&f)]);
    assert_eq!(code, 1);
    assert!(err.contains("--kmin"));
}

#[test]
fn verify_command() {
    let ws = Workspace::new();
    let f = ws.file("interval.qg", INTERVAL);
    let (code, out, _) = run(&["verify", p(&f), "--k", "3"]);
    assert_eq!(code, 0);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "1");
    assert!(row[2].parse::<f64>().unwrap() < 1e-12);
    let (code, _, err) = run(&["verify", p(&f), "--k", "3.3"]);
    assert_eq!(code, 3);
    assert!(err.contains("error[numerical]"));
}

#[test]
fn scattering_command_prints_dft() {
    let ws = Workspace::new();
    let f = ws.file("star.qg", STAR);
    let (code, out, _) = run(&["scattering", p(&f), "--vertex", "c", "--k", "2.0", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let m = v["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 3);
    let entry = m[0][0].as_array().unwrap();
    assert!((entry[0].as_f64().unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    assert!(v["unitarity_defect"].as_f64().unwrap() < 1e-14);
    let (code, out, _) = run(&["scattering", p(&f), "--vertex", "x", "--k", "2.0"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 2);
    let (code, _, _) = run(&["scattering", p(&f), "--vertex", "nowhere", "--k", "2.0"]);
    assert_eq!(code, 1);
}

#[test]
fn compare_doubles_multiplicities() {
    let ws = Workspace::new();
    let f = ws.file("star.qg", STAR);
    let (code, out, err) = run(&["compare", p(&f), "--format", "json"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["max_deviation"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["multiplicities_doubled"], true);
    assert!(v["rows"].as_array().unwrap().len() >= 5);
    let (code, out, err) = run(&["compare", p(&f)]);
    assert_eq!(code, 0);
    assert!(out.starts_with("index,k_scattering,"));
    assert!(err.contains("max deviation"));
}

#[test]
fn simplify_round_trips_and_keeps_spectrum() {
    let ws = Workspace::new();
    let f = ws.file("loopy.qg", LOOPY);
    let (code, out, _) = run(&["simplify", p(&f)]);
    assert_eq!(code, 0);
    let doc = qgraph::io::parse_document(&out).unwrap();
    assert!(doc.graph().unwrap().is_simple());
    let g = ws.file("simple.qg", &out);
    let (_, before, _) = run(&["spectrum", p(&f), "--no-verify"]);
    let (_, after, _) = run(&["spectrum", p(&g), "--no-verify"]);
    let ks = |s: &str| {
        s.lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
            .collect::<Vec<_>>()
    };
    let (a, b) = (ks(&before), ks(&after));
    assert_eq!(a.len(), b.len());
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9));
}

#[test]
fn run_command_in_process() {
    let ws = Workspace::new();
    let f = ws.file("interval.qg", INTERVAL);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = qgraph::cli::run_command(
        ["qgraph", "spectrum", p(&f), "--kmin", "0.5", "--kmax", "1.5"],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap().lines().count(), 2);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(qgraph::cli::run_command(["qgraph", "--help"], &mut out, &mut err), 0);
    assert!(String::from_utf8(out).unwrap().contains("spectrum"));
}
