use std::process::Command;

use serde_json::Value;

fn lacunary(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lacunary"))
        .args(args)
        .env("LACUNARY_JOBS", "1")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn gcd_of_binomial_family() {
    let p = "1000003";
    let q = "1000033";
    let pq = "2000036";
    let sys = format!(r#"{{"gamma": [[6,-3,-2,1],[10,-5,-2,1]], "exponents": ["{p}","{q}","{pq}"]}}"#);
    let (status, out, err) = lacunary(&["gcd", "--input", &sys, "--bound", "6", "--cyclotomic-bound", "100"]);
    assert_eq!(status, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["k"], 1);
    assert_eq!(v["fallback"], false);
    let g = v["g"].to_string();
    assert!(g.contains(p), "{g}");
}

#[test]
fn multiple_absent_reports_cyclotomic() {
    // (1 - t)(1 - t^2) has only the double root 1
    let (status, out, _) = lacunary(&["multiple", "--gamma", "[1,-1,-1,1]", "--exponents", "[1,2,3]"]);
    assert_eq!(status, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["witness"].is_null());
    assert_eq!(v["cyclotomic"]["orders"], serde_json::json!([1]));
}

#[test]
fn verify_round_trip_and_exit_codes() {
    let dir = std::env::temp_dir().join(format!("lacunary-it-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let sys_path = dir.join("sys.json");
    std::fs::write(&sys_path, r#"{"gamma": [[6,-3,-2,1],[10,-5,-2,1]], "exponents": [30,31,61]}"#).unwrap();
    let cert_path = dir.join("cert.json");
    let sys = sys_path.to_str().unwrap();
    let cert = cert_path.to_str().unwrap();
    assert_eq!(lacunary(&["gcd", "--input", sys, "--output", cert]).0, 0);
    let (status, out, _) = lacunary(&["verify", "--input", sys, "--certificate", cert]);
    assert_eq!(status, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);

    // a certificate for a different system fails
    std::fs::write(&sys_path, r#"{"gamma": [[6,-3,-2,1],[10,-5,-2,1]], "exponents": [30,37,67]}"#).unwrap();
    assert_eq!(lacunary(&["verify", "--input", sys, "--certificate", cert]).0, 1);

    assert_eq!(lacunary(&["verify", "--input", sys, "--certificate", "/nonexistent/cert.json"]).0, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn deterministic_output() {
    let args = ["pirola", "--n", "3", "--max-d", "6", "--bound", "2"];
    let (s1, a, _) = lacunary(&args);
    let (s2, b, _) = lacunary(&args);
    assert_eq!((s1, s2), (0, 0));
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 20);
}

#[test]
fn bench_table() {
    let (status, out, _) = lacunary(&["bench", "--max-exp", "4", "--repeats", "1", "--output", "text"]);
    assert_eq!(status, 0);
    assert_eq!(out.lines().count(), 3);
}
