use std::path::PathBuf;
use std::process::{Command, Output};

fn musym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_musym")).args(args).output().expect("binary runs")
}

fn corpus(file: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(file);
    p.to_str().unwrap().to_string()
}

/// Writes `text` to a fresh file in the temp directory.
fn scratch(name: &str, text: &str) -> String {
    let p = std::env::temp_dir().join(format!("musym-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

const FREE: &str = "independent x y\ndependent u\nvectorfield X: phi = (1)\nlagrangian L = (u_x^2 + u_y^2)/2\n";

#[test]
fn passing_file_exits_zero() {
    let out = musym(&["run", &corpus("ex4.mun")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn standard_mode_breaks_the_mu_symmetry() {
    let out = musym(&["run", &corpus("ex1.mun"), "--mode", "standard", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let first = v["entries"].as_array().unwrap().iter().find(|e| e["directive"] == "check mu-symmetry X L").unwrap();
    assert_eq!(first["verdict"], "nonzero");
    assert_eq!(first["status"], "fail");
    assert!(v["summary"]["fail"].as_u64().unwrap() >= 1);
}

#[test]
fn error_entries_exit_two() {
    let f = scratch("undeclared.mun", &format!("{FREE}check mu-symmetry Y L\n"));
    let out = musym(&["run", &f, "--json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["entries"][0]["verdict"], "error");
}

#[test]
fn parse_errors_exit_two_with_position() {
    let f = scratch("bad.mun", "independent x\ndependent u\nlagrangian L = u_x + w\ncheck el-form L ; form = (0)\n");
    let out = musym(&["run", &f]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3, column 22"), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(musym(&["run", "/nonexistent/file.mun"]).status.code(), Some(2));
}

#[test]
fn seed_and_points_reach_the_report() {
    let v = json(&musym(&["run", &corpus("ex4.mun"), "--json", "--seed", "42", "--points", "7", "--tol", "1e-8"]));
    assert_eq!((v["seed"].as_u64(), v["points"].as_u64(), v["tolerance"].as_f64()), (Some(42), Some(7), Some(1e-8)));
    assert_eq!(musym(&["run", &corpus("ex4.mun"), "--points", "0"]).status.code(), Some(2));
}

#[test]
fn timing_is_opt_in() {
    let plain = musym(&["run", &corpus("ex4.mun"), "--json"]);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains("timing_ms"));
    let timed = json(&musym(&["run", &corpus("ex4.mun"), "--json", "--timing"]));
    assert!(timed["entries"][0]["timing_ms"].is_number());
}

#[test]
fn fmt_is_a_fixed_point() {
    let once = musym(&["fmt", &corpus("ex9.mun")]);
    assert_eq!(once.status.code(), Some(0));
    let text = String::from_utf8(once.stdout).unwrap();
    let twice = musym(&["fmt", &scratch("fmt.mun", &text)]);
    assert_eq!(String::from_utf8(twice.stdout).unwrap(), text);
}

#[test]
fn corpus_subcommand_matches_manifest() {
    let out = musym(&["corpus"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("mismatch"));
    let a = musym(&["corpus", "--json"]);
    let b = musym(&["corpus", "--json", "--parallel"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a)["ex9"]["summary"]["pass"].as_u64().unwrap() > 0);
    assert_eq!(musym(&["corpus", "--case", "nope"]).status.code(), Some(2));
}
