use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn lpmink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpmink")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &TempDir, name: &str, v: &Value) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

/// The box with half-widths (1, 2, 0.5) and its L_p targets `h^{1-p} S`.
fn box_problem(p: f64) -> (Value, [f64; 3]) {
    let half: [f64; 3] = [1.0, 2.0, 0.5];
    let mut atoms = Vec::new();
    for k in 0..3 {
        let area = 4.0 * half[(k + 1) % 3] * half[(k + 2) % 3];
        for s in [1.0, -1.0] {
            let mut u = vec![0.0; 3];
            u[k] = s;
            atoms.push(json!({"u": u, "f": half[k].powf(1.0 - p) * area}));
        }
    }
    (json!({"dim": 3, "p": p, "atoms": atoms}), half)
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_recovers_the_box() {
    let dir = TempDir::new().unwrap();
    let (pr, half) = box_problem(-1.0);
    let input = write(&dir, "box.json", &pr);
    let out = dir.path().join("out.json");
    let run = lpmink(&["solve", "--input", &input, "--output", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let res = read(&out);
    assert_eq!(res["converged"], true);
    for (i, h) in res["h"].as_array().unwrap().iter().enumerate() {
        let want = half[i / 2];
        assert!((h.as_f64().unwrap() - want).abs() <= 1e-6 * want);
    }
    let csv = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "index,u1,u2,u3,f,h,residual");
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "box.json", &box_problem(0.5).0);
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|k| {
            let out = dir.path().join(format!("out{k}.json"));
            assert_eq!(code(&lpmink(&["solve", "--input", &input, "--output", out.to_str().unwrap()])), 0);
            std::fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);

    let a = lpmink(&["selftest", "--seed", "4"]);
    let b = lpmink(&["selftest", "--seed", "4"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn problem_round_trips_through_the_result() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "box.json", &box_problem(0.5).0);
    let out = dir.path().join("out.json");
    assert_eq!(code(&lpmink(&["solve", "--input", &input, "--output", out.to_str().unwrap()])), 0);
    let res = read(&out);
    // The written polytope is accepted as input by the diagnostics.
    let diag = lpmink(&["diagnose", "--input", out.to_str().unwrap(), "--p", "0.5"]);
    assert_eq!(code(&diag), 0);
    assert!(String::from_utf8_lossy(&diag.stdout).contains("interior"));
    assert_eq!(res["polytope"]["dim"], 3);
}

#[test]
fn iteration_cap_reports_non_convergence() {
    let dir = TempDir::new().unwrap();
    let pr = json!({"dim": 2, "p": 0.5, "atoms": [
        {"u": [1.0, 0.0], "f": 1.0},
        {"u": [0.0, 1.0], "f": 3.0},
        {"u": [-0.6, -0.8], "f": 2.0},
        {"u": [-1.0, 0.0], "f": 1.5}
    ]});
    let input = write(&dir, "p.json", &pr);
    let out = dir.path().join("out.json");
    let run = lpmink(&["solve", "--input", &input, "--max-iter", "1", "--output", out.to_str().unwrap()]);
    assert_eq!(code(&run), 2);
    assert_eq!(read(&out)["converged"], false);
}

#[test]
fn malformed_input_exits_64() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", &json!({"dim": 2, "p": 0.5, "atoms": [{"u": [1.0, 0.0], "f": 1.0}]}));
    assert_eq!(code(&lpmink(&["solve", "--input", &bad])), 64);
    let mut pr = box_problem(0.5).0;
    pr["p"] = json!(1.5);
    let exponent = write(&dir, "p1.json", &pr);
    assert_eq!(code(&lpmink(&["solve", "--input", &exponent])), 64);
    assert_eq!(code(&lpmink(&["solve", "--input", "/nonexistent/problem.json"])), 64);
    assert_eq!(code(&lpmink(&["solve"])), 64);
    assert_eq!(code(&lpmink(&["verify-example", "ex32", "--n", "2"])), 64);
}

#[test]
fn unwritable_output_exits_70() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "box.json", &box_problem(0.5).0);
    let out = dir.path().join("missing").join("out.json");
    assert_eq!(code(&lpmink(&["solve", "--input", &input, "--output", out.to_str().unwrap()])), 70);
}

#[test]
fn origin_at_a_cube_corner() {
    let dir = TempDir::new().unwrap();
    let mut vertices = Vec::new();
    for k in 0..8 {
        vertices.push(json!([(k & 1) as f64, ((k >> 1) & 1) as f64, ((k >> 2) & 1) as f64]));
    }
    let input = write(&dir, "cube.json", &json!({"dim": 3, "vertices": vertices}));
    let out = dir.path().join("report.json");
    let run = lpmink(&["diagnose", "--input", &input, "--p", "-0.5", "--output", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0);
    let rep = read(&out);
    assert_eq!(rep["zero_set_null"], false);
    assert_eq!(rep["origin_cone_dim"], 3);
}

#[test]
fn verify_example_writes_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ex42.json");
    let run = lpmink(&["verify-example", "ex42", "--grid", "20", "--output", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0);
    let rep = read(&out);
    assert_eq!(rep["value_at_origin"].as_f64(), Some(0.0));
    let csv = std::fs::read_to_string(dir.path().join("ex42.csv")).unwrap();
    assert_eq!(csv.lines().count(), 21);
}
