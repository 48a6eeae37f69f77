use std::path::PathBuf;
use std::process::{Command, Output};

fn fraclim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fraclim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fraclim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn kconst_prints_twelve_digits() {
    let o = fraclim(&["kconst", "--p", "2", "--dim", "1", "--method", "quadrature"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1.00000000000");
    let o = fraclim(&["kconst", "--p", "3", "--method", "closed-form"]);
    assert_eq!(stdout(&o), "0.666666666667");
}

#[test]
fn kconst_rejects_p_at_most_one() {
    let o = fraclim(&["kconst", "--p", "1", "--dim", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p must exceed 1"));
}

#[test]
fn eig_dense_and_pg_agree() {
    let base = ["eig", "--s", "0.5", "--p", "2", "--n", "128", "--m", "1"];
    let dense: f64 = stdout(&fraclim(&[&base[..], &["--solver", "dense"]].concat())).parse().unwrap();
    let pg: f64 = stdout(&fraclim(&[&base[..], &["--solver", "pg"]].concat())).parse().unwrap();
    assert!((dense - pg).abs() / dense < 1e-8, "{dense} vs {pg}");
}

#[test]
fn eig_higher_modes_need_p_two() {
    let o = fraclim(&["eig", "--s", "0.5", "--p", "3", "--m", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("m>2 requires p=2"));
    let o = fraclim(&["eig", "--s", "0.5", "--p", "3", "--solver", "dense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eig_writes_record() {
    let path = tmp("eig.json");
    let o = fraclim(&["eig", "--s", "0.7", "--p", "2", "--n", "32", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let lambda = v["lambda"].as_f64().unwrap();
    let printed: f64 = stdout(&o).parse().unwrap();
    assert!((lambda - printed).abs() / lambda < 1e-11);
}

#[test]
fn courant_suite_passes() {
    let o = fraclim(&["check", "--suite", "courant", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn hardy_below_critical_is_a_regime_error() {
    let o = fraclim(&["check", "--suite", "hardy", "--s", "0.4", "--p", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_suite_exits_two() {
    let o = fraclim(&["check", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_s_list_exits_two() {
    let out = tmp("bad.csv");
    let o = fraclim(&["sweep", "--p", "2", "--s-list", "0.5,abc", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = fraclim(&["sweep", "--p", "2", "--s-list", "0.9,0.5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_is_reproducible_across_thread_counts() {
    let run = |threads: &str, name: &str| {
        let path = tmp(name);
        let o = Command::new(env!("CARGO_BIN_EXE_fraclim"))
            .env("FRACLIM_THREADS", threads)
            .args(["sweep", "--p", "2", "--m", "1", "--s-list", "0.6,0.8", "--n", "64"])
            .args(["--tq", "0.4:2", "--out", path.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(o.status.success());
        std::fs::read(path).unwrap()
    };
    let one = run("1", "one.csv");
    let four = run("4", "four.csv");
    assert_eq!(one, four);
    assert!(String::from_utf8(one).unwrap().starts_with("s,lambda,scaled_lambda,target,rel_err"));
}

#[test]
fn check_reports_are_byte_identical() {
    let a = tmp("a.json");
    let b = tmp("b.json");
    for path in [&a, &b] {
        let o = fraclim(&["check", "--suite", "courant", "--seed", "3", "--out", path.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}
