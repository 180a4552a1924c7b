use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_singular-tr"))
}

fn curve(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/curves").join(format!("{name}.json"));
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String) {
    let Output { status, stdout, .. } = bin().args(args).output().expect("binary runs");
    (status.code().unwrap_or(-1), String::from_utf8(stdout).unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("singular-tr-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn classify_airy() {
    let (code, out) = run(&["classify", &curve("airy23")]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "Regular; (r,s,t)=(2,3,1/2)");
}

#[test]
fn classify_rejects_non_admissible() {
    let path = scratch("75.json");
    std::fs::write(&path, r#"{"branch_points":[{"id":0,"components":[{"id":1,"r":7,"f01":{"5":"-1"}}]}]}"#).unwrap();
    let (code, _) = run(&["classify", path.to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn bad_input_is_an_error() {
    let path = scratch("bad.json");
    std::fs::write(&path, "{").unwrap();
    let (code, _) = run(&["classify", path.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn open_kp_dilaton_constant() {
    let (code, out) = run(&["verify", &curve("open-kp"), "--chi-max", "2"]);
    assert_eq!(code, 0, "{out}");
    let line = out.lines().find(|l| l.starts_with("dilaton constant")).expect("dilaton constant row");
    assert!(line.contains("(g,n)=(1,1)"), "{line}");
    // 1/8 + 3 q^2 / 2 at q = 1.
    assert!(line.contains("F_{1,1}[3] = 13/8, expected 13/8"), "{line}");
}

#[test]
fn verify_saved_store() {
    let store = scratch("airy-store.json");
    let (code, _) = run(&["run", &curve("airy23"), "--chi-max", "2", "--out", store.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, out) = run(&["verify", &curve("airy23"), "--chi-max", "2", "--store", store.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().any(|l| l.starts_with("closed forms") && l.contains("pass")));
}

#[test]
fn run_is_deterministic_across_workers() {
    let (_, a) = run(&["run", &curve("open-kp"), "--chi-max", "2", "--workers", "1"]);
    let (_, b) = run(&["run", &curve("open-kp"), "--chi-max", "2", "--workers", "4"]);
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn witten2_csv() {
    let (code, out) = run(&["intersect", &curve("witten2"), "--chi-max", "4"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("g,n,d,a,value\n"));
    assert!(out.lines().any(|l| l == "1,1,[1],[1],1/24"));
    assert!(out.lines().any(|l| l == r#"0,3,"[0,0,0]","[1,1,1]",1"#));
}

#[test]
fn intersect_needs_r_spin_curve() {
    let (code, _) = run(&["intersect", &curve("irregular43"), "--chi-max", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn oracle_agrees() {
    for name in ["airy23", "spin3", "irregular43"] {
        let (code, out) = run(&["oracle", &curve(name), "--chi-max", "2"]);
        assert_eq!(code, 0, "{name}: {out}");
        assert!(out.contains("mismatches: 0"), "{name}: {out}");
    }
}
