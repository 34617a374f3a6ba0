use std::path::PathBuf;
use std::process::{Command, Output};

use rulinglab::ruling::RulingPath;
use rulinglab::LaurentPoly;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rulinglab"));
    c.args(args).env_remove("RULINGLAB_BUDGET");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn trefoil_polynomial() {
    let o = run(&["poly", &fixture("trefoil.tgl"), "--m", "2", "--left", "(1,2)(3,4)", "--right", "(1,2)(3,4)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2*z + z^3");
}

#[test]
fn verify_passes_on_four_pairs() {
    let o = run(&["verify", &fixture("trefoil.tgl"), "--m", "2", "--primes", "2,3,5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 4);
    assert!(out.contains("4 boundary pairs, 0 failed"));
}

#[test]
fn no_rulings_on_the_trivial_tangle() {
    let args = [
        "rulings",
        &fixture("trivial4.tgl"),
        "--m",
        "0",
        "--left",
        "(1,2)(3,4)",
        "--right",
        "(1,3)(2,4)",
        "--format",
        "json",
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rulings"], serde_json::json!([]));
}

#[test]
fn json_output_round_trips() {
    let o =
        run(&["poly", &fixture("trefoil.tgl"), "--left", "(1,3)(2,4)", "--right", "(1,2)(3,4)", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let p = LaurentPoly::from_json(&v["polynomial"]).unwrap();
    assert_eq!(p, LaurentPoly::from_terms([(0, 1), (2, 1)]));
    let o =
        run(&["rulings", &fixture("trefoil.tgl"), "--left", "(1,2)(3,4)", "--right", "(1,2)(3,4)", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let paths: Vec<RulingPath> = serde_json::from_value(v["rulings"].clone()).unwrap();
    assert_eq!(paths.len(), 3);
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["verify", "trefoil.tgl", "--format", "json"],
        vec!["dga", "plat_trefoil.tgl"],
        vec!["verify-gen", "type3.tgl", "--homology", "H=[2,0]"],
    ] {
        let mut a: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        a[1] = fixture(args[1]);
        let a: Vec<&str> = a.iter().map(|s| s.as_str()).collect();
        let (x, y) = (run(&a), run(&a));
        assert_eq!(x.status.code(), Some(0));
        assert_eq!(x.stdout, y.stdout);
    }
}

#[test]
fn count_methods_agree() {
    for q in ["2", "3"] {
        let base = ["count", &fixture("trefoil.tgl"), "--left", "(1,2)(3,4)", "--right", "(1,3)(2,4)", "--q", q];
        let a = stdout(&run(&[&base[..], &["--method", "sweep"]].concat()));
        let b = stdout(&run(&[&base[..], &["--method", "dga"]].concat()));
        assert_eq!(a, b);
    }
    let o = run(&["count", &fixture("trefoil.tgl"), "--left", "(1,2)(3,4)", "--right", "(1,3)(2,4)", "--q", "3"]);
    assert!(stdout(&o).starts_with("7 augmentations"));
}

#[test]
fn budget_precedence_and_exit_code() {
    let args = ["count", &fixture("trefoil.tgl"), "--left", "(1,2)(3,4)", "--right", "(1,2)(3,4)", "--q", "5"];
    assert_eq!(run_env(&args, &[("RULINGLAB_BUDGET", "3")]).status.code(), Some(3));
    let flag = [&args[..], &["--budget", "100000"]].concat();
    assert_eq!(run_env(&flag, &[("RULINGLAB_BUDGET", "3")]).status.code(), Some(0));
    let low = [&args[..], &["--budget", "3"]].concat();
    assert_eq!(run(&low).status.code(), Some(3));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(&["poly", "/nonexistent.tgl"]).status.code(), Some(2));
    let bad = ["poly", &fixture("trefoil.tgl"), "--left", "(1,2)", "--right", "(1,2)(3,4)"];
    assert_eq!(run(&bad).status.code(), Some(2));
    assert_eq!(run(&["verify", &fixture("trefoil.tgl"), "--primes", "4"]).status.code(), Some(2));
    assert_eq!(run(&["verify-gen", &fixture("type3.tgl"), "--homology", "H=[0,2]"]).status.code(), Some(2));
    assert_eq!(run(&["verify", &fixture("plat_trefoil.tgl"), "--m", "3"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn compose_check_by_file_and_by_cut() {
    let o = run(&["compose-check", &fixture("trefoil.tgl"), "--cut", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["compose-check", &fixture("r2_before.tgl"), &fixture("trivial4.tgl"), "--m", "2"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    let o = run(&["compose-check", &fixture("trefoil.tgl"), &fixture("trefoil.tgl"), "--m", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn dga_and_barannikov() {
    let o = run(&["dga", &fixture("trefoil.tgl")]);
    let out = stdout(&o);
    assert!(out.contains("da1 = a23"), "{out}");
    assert!(out.contains("d^2 = 0"));
    let dir = std::env::temp_dir().join(format!("rulinglab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("c.json");
    std::fs::write(&p, r#"{"q":5,"m":0,"mu":[1,0,1,0],"entries":[[1,2,1],[1,4,3],[3,4,2]]}"#).unwrap();
    let o = run(&["barannikov", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("(1,2)(3,4)"));
    std::fs::write(&p, r#"{"q":5,"m":0,"mu":[1,0],"entries":[[2,1,1]]}"#).unwrap();
    assert_eq!(run(&["barannikov", p.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn validate_reports_unmarked_components() {
    let o = run(&["validate", &fixture("plat_trefoil_one_bp.tgl")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all right cusps marked: no"));
}
