use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use multipop_cli::render::num;
use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"))
}

fn multipop<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multipop")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn structured(args: &[&str]) -> (i32, Value) {
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--format", "structured"]);
    let o = multipop(&all);
    let v = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)));
    (code(&o), v)
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn f(name: &str) -> String {
    fixture(name).display().to_string()
}

fn shares(v: &Value, pop: &str) -> Vec<f64> {
    v["assignment"][pop].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

const BROKEN_ROUTE: &str = r#"{
  "junctions": ["O", "M", "D"],
  "roads": [{"id": "r1", "tail": "O", "head": "M"}, {"id": "r2", "tail": "O", "head": "D"}],
  "populations": [{"name": "a", "origin": "O", "destination": "D", "routes": [["r1", "r2"]],
                   "costs": {"r1": {"kind": "constant", "value": 1}, "r2": {"kind": "constant", "value": 1}}}]
}"#;

/// Third route of each population shares all its roads with the other two.
const NO_PRIVATE_ROAD: &str = r#"{
  "junctions": ["O", "M", "D"],
  "roads": [{"id": "r1", "tail": "O", "head": "M"}, {"id": "r2", "tail": "O", "head": "M"},
            {"id": "r3", "tail": "M", "head": "D"}, {"id": "r4", "tail": "M", "head": "D"}],
  "populations": [
    {"name": "hat", "origin": "O", "destination": "D", "routes": [["r1", "r3"], ["r2", "r4"], ["r1", "r4"]],
     "costs": {"r1": {"kind": "affine", "coeffs": {"hat": 1}}, "r2": {"kind": "constant", "value": 1},
               "r3": {"kind": "constant", "value": 1}, "r4": {"kind": "affine", "constant": 1, "coeffs": {"check": 1}}}},
    {"name": "check", "origin": "O", "destination": "D", "routes": [["r1", "r3"], ["r2", "r4"]],
     "costs": {"r1": {"kind": "constant", "value": 1}, "r2": {"kind": "constant", "value": 1},
               "r3": {"kind": "constant", "value": 1}, "r4": {"kind": "constant", "value": 1}}}
  ]
}"#;

#[test]
fn validate_reports_findings_and_parse_positions() {
    let o = multipop(&["validate", &f("net_a")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("WARNING junction-degree: junction O_hat has no entering road [O_hat]"));

    let dir = TempDir::new().unwrap();
    let broken = write(&dir, "broken.json", BROKEN_ROUTE);
    let o = multipop(&["validate", &broken]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).lines().any(|l| l.starts_with("ERROR route-adjacency:")), "{}", stdout(&o));

    let bad = write(&dir, "bad.json", "{\n  \"junctions\": [\"O\",\n  ]\n}");
    let o = multipop(&["validate", &bad]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("bad.json:3:3:"), "{}", stdout(&o));

    let o = multipop(&["validate", &f("net_a"), &broken, &bad]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&multipop(&["validate", &dir.path().join("missing.json").display().to_string()])), 2);
}

#[test]
fn nonmonotone_costs_are_flagged_by_validate() {
    let o = multipop(&["validate", &f("net_p")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("WARNING cost-nonmonotone"));
}

#[test]
fn solve_examples() {
    let (c, v) = structured(&["solve", &f("net_a")]);
    assert_eq!(c, 0);
    for pop in ["hat", "check"] {
        assert!(shares(&v, pop).iter().all(|s| (s - 0.5).abs() < 1e-8));
        assert!((v["relevant_times"][pop].as_f64().unwrap() - 3.5).abs() < 1e-8);
    }
    let (c, v) = structured(&["solve", &f("net_b")]);
    assert_eq!(c, 0);
    let common = (7.0 + 17f64.sqrt()) / 4.0;
    for pop in ["hat", "check"] {
        assert!((v["relevant_times"][pop].as_f64().unwrap() - common).abs() < 1e-8);
    }
    let o = multipop(&["solve", &f("net_p")]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("not monotone"));
    assert_eq!(code(&multipop(&["solve", &f("net_p"), "--allow-nonmonotone"])), 0);
}

#[test]
fn solve_without_convergence_shows_best_iterate() {
    let o = multipop(&["solve", &f("net_b"), "--max-iters", "3"]);
    assert_eq!(code(&o), 3);
    let text = stdout(&o);
    assert!(text.contains("not converged"), "{text}");
    assert!(text.contains("population hat"));
}

#[test]
fn solve_from_a_start_file_and_multistart() {
    let dir = TempDir::new().unwrap();
    let start = write(&dir, "start.json", r#"{"hat": [0.6, 0.2, 0.2], "check": [0.2, 0.8]}"#);
    let (c, v) = structured(&["solve", &f("net_d6"), "--start", &start]);
    assert_eq!(c, 0, "{v}");
    let (c, v) = structured(&["solve", &f("net_c5"), "--multistart"]);
    assert_eq!(c, 0);
    let eq = v["equilibria"].as_array().unwrap();
    assert_eq!(eq.len(), 1);
    assert_eq!(eq[0]["assignment"]["hat"], serde_json::json!([0.0, 0.0, 1.0]));
}

#[test]
fn verify_examples() {
    let dir = TempDir::new().unwrap();
    let half = write(&dir, "p.json", r#"{"drivers": [0.5, 0.5]}"#);
    assert_eq!(code(&multipop(&["verify", &f("net_p"), &half, "--predicate", "nash"])), 0);
    assert_eq!(code(&multipop(&["verify", &f("net_p"), &half, "--predicate", "eps-nash"])), 1);
    assert_eq!(code(&multipop(&["verify", &f("net_p"), &half, "--predicate", "equilibrium"])), 0);

    let bridge = write(&dir, "c5.json", r#"{"hat": [0, 0, 1], "check": [0, 0, 1]}"#);
    assert_eq!(code(&multipop(&["verify", &f("net_c5"), &bridge])), 0);

    let corner = write(&dir, "a.json", r#"{"hat": [1, 0], "check": [0, 1]}"#);
    let o = multipop(&["verify", &f("net_a"), &corner]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.contains("requested nash: FAILS"));
    assert!(text.contains("hat: unused route 1 has time 3 below the mean 4"), "{text}");
    assert!(text.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["1", "r2", "0", "3"]), "{text}");
}

#[test]
fn verify_rejects_mismatched_assignments() {
    let dir = TempDir::new().unwrap();
    for body in [
        r#"{"hat": [1, 0, 0], "check": [0, 1]}"#,
        r#"{"hat": [1, 0]}"#,
        r#"{"hat": [1, 0], "check": [0, 1], "other": [1]}"#,
        r#"{"hat": [0.5, 0.6], "check": [0, 1]}"#,
    ] {
        let a = write(&dir, "a.json", body);
        assert_eq!(code(&multipop(&["verify", &f("net_a"), &a])), 2, "{body}");
    }
}

#[test]
fn infinite_times_render_as_inf() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "b.json", r#"{"hat": [1, 0], "check": [0, 1]}"#);
    let o = multipop(&["verify", &f("net_b"), &a, "--format", "structured"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["route_times"]["times"][1][0], "inf");
    assert!(stdout(&multipop(&["verify", &f("net_b"), &a])).contains("inf"));
}

#[test]
fn compare_flags_braess_paradoxes() {
    let o = multipop(&["compare", &f("net_c"), &f("net_c5")]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.matches("PARADOX").count(), 3, "{text}");
    assert!(text.contains("BRAESS PARADOX for hat, check"));

    let (c, v) = structured(&["compare", &f("net_d"), &f("net_d6")]);
    assert_eq!(c, 0);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[0]["population"], "hat");
    assert_eq!(rows[0]["paradox"], false);
    assert!(rows[0]["delta"].as_f64().unwrap().abs() < 1e-6);
    assert_eq!(rows[1]["paradox"], true);

    let o = multipop(&["compare", &f("net_a"), &f("net_a")]);
    assert_eq!(code(&o), 0);
    assert!(!stdout(&o).contains("PARADOX") && stdout(&o).contains("no Braess paradox"));
}

#[test]
fn compare_propagates_solver_failures() {
    let o = multipop(&["compare", &f("net_b"), &f("net_b"), "--max-iters", "2"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn oracle_examples() {
    let (c, v) = structured(&["oracle", &f("net_a"), "--grid", "400"]);
    assert_eq!(c, 0);
    assert_eq!(v["clusters"].as_array().unwrap().len(), 1);
    let (c, v) = structured(&["oracle", &f("net_p"), "--grid", "1000"]);
    assert_eq!(c, 0);
    let clusters = v["clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 1);
    assert_eq!(clusters[0]["representative"]["drivers"], serde_json::json!([0.5, 0.5]));
    let o = multipop(&["oracle", &f("net_b"), "--grid", "100000"]);
    assert_eq!(code(&o), 5);
    assert!(stderr(&o).contains("exceeds the budget"));
    assert_eq!(code(&multipop(&["oracle", &f("net_a"), "--grid", "50", "--budget", "100"])), 5);
}

#[test]
fn uniqueness_examples() {
    let o = multipop(&["uniqueness", &f("net_a")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("hypothesis satisfied at all sampled pairs"));

    let dir = TempDir::new().unwrap();
    let gamma = write(&dir, "gamma.json", NO_PRIVATE_ROAD);
    let o = multipop(&["uniqueness", &gamma]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("route 2 (r1 r4) of population hat"), "{}", stderr(&o));

    let (_, v) = structured(&["uniqueness", &f("net_b")]);
    assert!(v["verdict"].as_str().unwrap().contains("(sampled)"));
    let roads = v["roads"].as_array().unwrap();
    assert_eq!(roads.len(), 7);
    assert_eq!(roads[4]["road"], "r5");
    assert_eq!(roads[4]["users"], serde_json::json!(["hat", "check"]));
    assert_eq!(code(&multipop(&["uniqueness", &f("net_p")])), 2);
}

#[test]
fn routes_are_enumerated() {
    let o = multipop(&["routes", &f("net_c5"), "--from", "O", "--to", "D"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "O -> D\n  r1 r4\n  r2 r3\n  r2 r5 r4\n");
    let o = multipop(&["routes", &f("net_a")]);
    assert!(stdout(&o).starts_with("hat: O_hat -> D_hat\n  r1 r3\n  r2\n"));
    assert_eq!(code(&multipop(&["routes", &f("net_a"), "--from", "O_hat"])), 2);
    assert_eq!(code(&multipop(&["routes", &f("net_a"), "--from", "O_hat", "--to", "X"])), 2);
}

#[test]
fn shipped_fixtures_match_the_generator() {
    let mut files = vec![("net_b_delta_0.25".to_string(), vec!["fixture", "net_b", "--delta", "0.25"])];
    for name in multipop_core::fixtures::NAMES {
        files.push((name.to_string(), vec!["fixture", name]));
    }
    for (file, args) in files {
        let o = multipop(&args);
        assert_eq!(code(&o), 0);
        let shipped = fs::read_to_string(fixture(&file)).unwrap();
        assert_eq!(stdout(&o), shipped, "{file}");
        let mut s = args.clone();
        s.extend(["--format", "structured"]);
        assert_eq!(stdout(&multipop(&s)), shipped, "{file}");
    }
    assert_eq!(code(&multipop(&["fixture", "net_z"])), 2);
    assert_eq!(code(&multipop(&["fixture", "net_c", "--delta", "1"])), 2);
}

#[test]
fn delta_regenerates_the_network() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("a1.json").display().to_string();
    assert_eq!(code(&multipop(&["fixture", "net_a", "--delta", "1", "--output", &path])), 0);
    let (c, v) = structured(&["solve", &path]);
    assert_eq!(c, 0);
    let hat = shares(&v, "hat");
    let check = shares(&v, "check");
    assert!((hat[0] - 0.875).abs() < 1e-8 && (check[0] - 0.375).abs() < 1e-8, "{hat:?} {check:?}");
}

#[test]
fn usage_errors_exit_with_two() {
    let a = f("net_a");
    for args in [
        vec!["solve", "x.json", "--bogus"],
        vec!["solve", &a, "--omega", "0"],
        vec!["solve", &a, "--omega", "1.5"],
        vec!["solve", &a, "--max-iters", "0"],
        vec!["solve", &a, "--tol", "-1"],
        vec!["oracle", &a, "--grid", "0"],
        vec!["verify", &a],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&multipop(&args)), 2, "{args:?}");
    }
}

#[test]
fn structured_output_is_deterministic() {
    for args in [
        vec!["solve", "--multistart", "--seed", "3"],
        vec!["uniqueness", "--seed", "5", "--pairs", "20"],
        vec!["oracle", "--grid", "60"],
    ] {
        let mut full = args.clone();
        let net = f("net_d6");
        full.insert(1, &net);
        full.extend(["--format", "structured"]);
        let (a, b) = (multipop(&full), multipop(&full));
        assert_eq!(code(&a), code(&b));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn text_numbers_round_trip_through_structured_output() {
    let text = stdout(&multipop(&["solve", &f("net_b")]));
    let (_, v) = structured(&["solve", &f("net_b")]);
    for pop in ["hat", "check"] {
        for s in shares(&v, pop) {
            assert!(text.contains(&num(s)), "{s} missing from\n{text}");
        }
        assert!(text.contains(&format!("relevant time {}", num(v["relevant_times"][pop].as_f64().unwrap()))));
    }
    // structured shares are exact: feeding them back verifies, and the times agree to 1e-12
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "sol.json", &serde_json::to_string(&v["assignment"]).unwrap());
    let (c, w) = structured(&["verify", &f("net_b"), &a]);
    assert_eq!(c, 0);
    assert_eq!(w["assignment"], v["assignment"]);
    for pop in ["hat", "check"] {
        let (x, y) = (v["relevant_times"][pop].as_f64().unwrap(), w["relevant_times"][pop].as_f64().unwrap());
        assert!((x - y).abs() <= 1e-12);
    }
}

#[test]
fn output_flag_writes_the_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let o = multipop(&["solve", &f("net_a"), "--format", "structured", "-o", &out.display().to_string()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["command"], "solve");
    assert_eq!(v["nash"], true);
}
