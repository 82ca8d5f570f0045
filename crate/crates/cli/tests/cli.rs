use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

use srs_cli::{run_to, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE};

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn srs(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("srs").chain(args.iter().copied());
    let code = run_to(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn json(args: &[&str]) -> Value {
    let r = srs(args);
    assert_eq!(r.code, EXIT_OK, "{args:?}: {}", r.err);
    serde_json::from_str(&r.out).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("srs-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn ints(v: &Value) -> Vec<Vec<i64>> {
    v.as_array().unwrap().iter().map(|p| p.as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect()).collect()
}

#[test]
fn orbit_reports_the_five_cycle() {
    let v = json(&["orbit", "--r", "9/10,-11/20", "--z", "-1,-1"]);
    assert_eq!(v["period"], 5);
    assert_eq!(v["purely_periodic"], true);
    assert_eq!(v["ends_at_zero"], false);
    assert_eq!(ints(&v["cycle"]), vec![vec![-1, -1], vec![-1, 1], vec![1, 2], vec![2, 1], vec![1, -1]]);
    assert_eq!(v["r"], serde_json::json!(["9/10", "-11/20"]));
}

#[test]
fn mathematical_false_exits_zero() {
    let v = json(&["decide", "--r", "9/10,-11/20"]);
    assert_eq!(v["finiteness"], false);
    assert!(!v["witness_cycle"].as_array().unwrap().is_empty());
    let v = json(&["decide", "--r", "3/4,1"]);
    assert_eq!(v["finiteness"], true);
    assert!(v.get("witness_cycle").is_none());
}

#[test]
fn digits_are_exact_strings() {
    let v = json(&["digits", "--r", "3/4,1", "--z", "3,1", "--level", "5"]);
    assert_eq!(v["digits"], serde_json::json!(["1/4", "3/4", "3/4", "1/4", "0"]));
    assert_eq!(v["identity_holds"], true);
}

#[test]
fn keys_are_sorted() {
    let r = srs(&["orbit", "--r", "1/2,-1/2", "--z", "2,3"]);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn usage_errors_exit_one() {
    let r = srs(&["decide"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("--r"), "{}", r.err);
    assert_eq!(srs(&["no-such-command"]).code, EXIT_USAGE);
    assert_eq!(srs(&["orbit", "--r", "0,1/2", "--z", "1,1"]).code, EXIT_USAGE);
    assert_eq!(srs(&["orbit", "--r", "1/2,-1/2", "--z", "1,2,3"]).code, EXIT_USAGE);
    assert_eq!(srs(&["--help"]).code, EXIT_OK);
    assert_eq!(srs(&["--version"]).code, EXIT_OK);
}

#[test]
fn caps_exit_two_and_name_the_flag() {
    let r = srs(&["orbit", "--r", "9/10,-11/20", "--z", "50,-30", "--cap-steps", "2"]);
    assert_eq!(r.code, EXIT_INCONCLUSIVE);
    assert!(r.err.contains("--cap-steps"), "{}", r.err);
    let r = srs(&["tile", "--r", "1/2,-1/2", "--level", "12", "--cap-points", "100"]);
    assert_eq!(r.code, EXIT_INCONCLUSIVE);
    assert!(r.err.contains("--cap-points"), "{}", r.err);
    let r = srs(&["orbit", "--r", "real:0.5", "--z", "2"]);
    assert_eq!(r.code, EXIT_INCONCLUSIVE);
    assert!(r.err.contains("--precision"), "{}", r.err);
}

#[test]
fn csv_output() {
    let r = srs(&["--format", "csv", "orbit", "--r", "1/2,-1/2", "--z", "2,3"]);
    assert_eq!(r.code, EXIT_OK);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(lines[0], "step,kind,z0,z1");
    assert_eq!(lines[1], "0,pre,2,3");
    assert_eq!(*lines.last().unwrap(), "8,cycle,0,0");
}

#[test]
fn job_file_reproduces_the_command_line() {
    let dir = scratch("job");
    let job = dir.join("job.json");
    std::fs::write(&job, r#"{"command": ["tile", "--z", "1,0"], "r": "3/4,1", "level": 6}"#).unwrap();
    let direct = srs(&["tile", "--r", "3/4,1", "--z", "1,0", "--level", "6"]);
    let a = srs(&["--job", job.to_str().unwrap()]);
    let b = srs(&["--job", job.to_str().unwrap()]);
    assert_eq!(a.code, EXIT_OK, "{}", a.err);
    assert_eq!(a.out, direct.out);
    assert_eq!(a.out.as_bytes(), b.out.as_bytes());
    // Command-line flags override job fields.
    let c = srs(&["--job", job.to_str().unwrap(), "--level", "2"]);
    assert_eq!(c.out, srs(&["tile", "--r", "3/4,1", "--z", "1,0", "--level", "2"]).out);
    assert_eq!(srs(&["--job", job.to_str().unwrap(), "decide"]).code, EXIT_USAGE);
    std::fs::write(&job, r#"{"command": ["decide"], "bogus": 1}"#).unwrap();
    assert_eq!(srs(&["--job", job.to_str().unwrap()]).code, EXIT_USAGE);
}

#[test]
fn certificates_round_trip() {
    let dir = scratch("cert");
    let cert = dir.join("cert.json");
    let r = srs(&["exclusive", "--r", "1/2,-1/2", "--level", "9", "--out", cert.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let v = json(&["verify-certificate", "--cert", cert.to_str().unwrap()]);
    assert_eq!(v["valid"], true);
    assert_eq!(v["multiplicity"], 1);
    // Tampering with the witness set is caught.
    let mut c: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    c["witness_set"] = serde_json::json!([[1, 0]]);
    std::fs::write(&cert, serde_json::to_string(&c).unwrap()).unwrap();
    let v = json(&["verify-certificate", "--cert", cert.to_str().unwrap()]);
    assert_eq!(v["valid"], false);
    assert_eq!(v["witness_set_ok"], false);
}

#[test]
fn thread_count_does_not_change_output() {
    let one = srs(&["--threads", "1", "tile", "--r", "1/2,-1/2", "--level", "8"]);
    let two = srs(&["--threads", "2", "tile", "--r", "1/2,-1/2", "--level", "8"]);
    assert_eq!(one.code, EXIT_OK);
    assert_eq!(one.out, two.out);
}

#[test]
fn renders_are_deterministic() {
    let dir = scratch("render");
    let mut bytes = Vec::new();
    for name in ["a.png", "b.png"] {
        let p = dir.join(name);
        let r = srs(&["render", "--figure", "twin-dragon", "--level", "8", "--out", p.to_str().unwrap()]);
        assert_eq!(r.code, EXIT_OK, "{}", r.err);
        bytes.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    assert_eq!(srs(&["render", "--figure", "nope", "--out", dir.join("c.png").to_str().unwrap()]).code, EXIT_USAGE);
}

#[test]
fn small_scan_writes_png_and_csv() {
    let dir = scratch("scan");
    let png = dir.join("s.png");
    let v = json(&["scan-d2", "--grid", "3x3", "--box", "0.1,0.5,-0.3,0.3", "--out", png.to_str().unwrap()]);
    let counts = v["counts"].as_object().unwrap();
    let total: u64 = counts.values().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(total, 9);
    assert!(png.exists());
    let csv = std::fs::read_to_string(dir.join("s.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("r0,r1,class"));
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn binary_reads_env_overrides() {
    let out = Command::new(env!("CARGO_BIN_EXE_srs")).arg("decide").env("SRS_R", "3/4,1").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["finiteness"], true);
    let out = Command::new(env!("CARGO_BIN_EXE_srs")).args(["decide", "--r", "9/10,-11/20"]).env("SRS_R", "3/4,1").output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["finiteness"], false);
    let out = Command::new(env!("CARGO_BIN_EXE_srs")).arg("decide").env_remove("SRS_R").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}

#[test]
fn cns_beta_and_rational_base_commands() {
    let v = json(&["cns", "digits", "--poly", "2,-1,1", "--p", "5,3", "--level", "6"]);
    assert_eq!(v["digits"], v["formula_digits"]);
    assert_eq!(v["reconstruction_holds"], true);
    let v = json(&["beta", "param", "--minpoly=-1,-1,1"]);
    assert_eq!(v["unit"], true);
    assert!((v["beta"].as_f64().unwrap() - 1.618033988749895).abs() < 1e-12);
    let v = json(&["beta", "decide-f", "--minpoly=-1,-1,-1,1"]);
    assert_eq!(v["property_f"], true);
    // 10 = (1/2)(2 + 0·(3/2) + 2·(3/2)^2 + 1·(3/2)^3 + 2·(3/2)^4).
    let v = json(&["ratbase", "digits", "--p", "3", "--q", "2", "--n", "10"]);
    let d: Vec<i64> = v["digits"].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
    assert_eq!(&d[..6], &[2, 0, 2, 1, 2, 0]);
    assert!(d[5..].iter().all(|&x| x == 0));
}
