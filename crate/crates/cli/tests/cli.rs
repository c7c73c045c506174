use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_definetti"))
}

// Tests run in parallel, so every fixture gets its own file.
fn file(name: &str, contents: &str) -> PathBuf {
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let id = NEXT.fetch_add(1, Ordering::Relaxed);
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("{}-{id}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json_out(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn half() -> String {
    file("half.json", r#"{"atoms":[{"p":"1/2","w":"1"}]}"#)
        .display()
        .to_string()
}

fn polya() -> String {
    file("polya.json", r#"{"c":["1","1/2","1/3","1/4","1/5"]}"#)
        .display()
        .to_string()
}

fn three_atoms() -> String {
    file(
        "three.json",
        r#"{"atoms":[{"p":"0.2","w":"0.3"},{"p":"0.5","w":"0.4"},{"p":"0.9","w":"0.3"}]}"#,
    )
    .display()
    .to_string()
}

#[test]
fn prefix_prob_from_measure_and_moments() {
    let v = json_out(&["prefix-prob", "--measure", &half(), "--pattern", "1,1,0"]);
    assert_eq!(v["value"], "1/8");
    let v = json_out(&["prefix-prob", "--moments", &polya(), "--pattern", "1,1"]);
    assert_eq!(v["value"], "1/3");
    let v = json_out(&[
        "prefix-prob",
        "--measure",
        &half(),
        "--pattern",
        "1,1,0",
        "--backend",
        "log",
    ]);
    assert_eq!(v["value"], 0.125);
}

#[test]
fn invalid_weights_exit_3() {
    let bad = file("bad.json", r#"{"atoms":[{"p":0.5,"w":0.9}]}"#);
    let out = run(&["prefix-prob", "--measure", bad.to_str().unwrap(), "--pattern", "1"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("sum to 1"));
}

#[test]
fn malformed_input_exits_2() {
    let junk = file("junk.json", "{ not json");
    let out = run(&["prefix-prob", "--measure", junk.to_str().unwrap(), "--pattern", "1"]);
    assert_eq!(code(&out), 2);
    let out = run(&["prefix-prob", "--measure", &half(), "--pattern", "1,2"]);
    assert_eq!(code(&out), 2);
    let float = file("float.json", r#"{"atoms":[{"p":0.5,"w":1}]}"#);
    let out = run(&[
        "prefix-prob",
        "--measure",
        float.to_str().unwrap(),
        "--pattern",
        "1",
        "--backend",
        "exact",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn yn_law_of_point_mass() {
    let v = json_out(&["yn-law", "--measure", &half(), "-N", "3"]);
    assert_eq!(v["q"], serde_json::json!(["1/8", "3/8", "3/8", "1/8"]));
    let v = json_out(&["yn-law", "--moments", &polya(), "-N", "2"]);
    assert_eq!(v["q"], serde_json::json!(["1/3", "1/3", "1/3"]));
}

#[test]
fn verify_reports() {
    let v = json_out(&[
        "verify",
        "--measure",
        &three_atoms(),
        "-N",
        "100",
        "-k",
        "1",
        "--alpha",
        "1",
    ]);
    assert_eq!(v["abs_diff"], "0");
    let v = json_out(&[
        "verify",
        "--measure",
        &three_atoms(),
        "-N",
        "10000",
        "--pattern",
        "1,1,0,1",
    ]);
    let diff = v["abs_diff"].as_f64().unwrap();
    assert!(diff <= v["sandwich_bound"].as_f64().unwrap());
    assert_eq!(v["within_budget"], true);
    let zeros = format!(r#"{{"q":["1"{}]}}"#, r#","0""#.repeat(20));
    let law = file("zeros.json", &zeros);
    let v = json_out(&["verify", "--law", law.to_str().unwrap(), "--pattern", "1,0"]);
    assert_eq!(v["pathological"], true);
    assert_eq!(v["lhs"], "0");
}

#[test]
fn ratio_scan_csv() {
    let out = run(&["ratio-scan", "-N", "1000", "-k", "1", "--alpha", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "i,a,b,ratio,region");
    assert_eq!(lines.len(), 1 + 1001 + 1);
    for line in &lines[1..=1001] {
        let cells: Vec<&str> = line.split(',').collect();
        if cells[4] == "mid" {
            assert_eq!(cells[3], "1", "{line}");
        }
    }
    let summary: Value = serde_json::from_str(lines[1002]).unwrap();
    assert_eq!(summary["eps_mid"], "0");

    assert_eq!(code(&run(&["ratio-scan", "-N", "7", "-k", "1", "--alpha", "1"])), 2);
}

#[test]
fn ratio_scan_eps_shrinks_with_n() {
    let eps = |n: &str, stride: &str| {
        let out = run(&[
            "ratio-scan",
            "-N",
            n,
            "-k",
            "5",
            "--alpha",
            "2",
            "--stride",
            stride,
            "--backend",
            "log",
        ]);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        let summary: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
        assert_eq!(text.lines().next().unwrap(), "i,ln_a,ln_b,ln_ratio,region");
        summary["eps_mid"].as_f64().unwrap()
    };
    assert!(eps("1000000", "97") < eps("10000", "1"));
}

#[test]
fn recover_and_extend_check() {
    let v = json_out(&["recover", "--moments", &polya(), "--level", "2"]);
    assert_eq!(v["level"], 2);
    let atoms = v["atoms"].as_array().unwrap();
    let ps: Vec<&str> = atoms.iter().map(|a| a["p"].as_str().unwrap()).collect();
    assert_eq!(ps, ["0", "1/2", "1"]);
    assert!(atoms.iter().all(|a| a["w"] == "1/3"));

    let bad = file("nonext.json", r#"{"c":["1","1/2","0","0"]}"#);
    let out = run(&["recover", "--moments", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["certificate"]["value"], "-1/2");

    let out = run(&["extend-check", "--moments", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    let v = json_out(&["extend-check", "--moments", &polya()]);
    assert_eq!(v["verdict"], "accept");
}

#[test]
fn oracle_runs() {
    let v = json_out(&["oracle", "--seed", "1", "-N", "6"]);
    assert_eq!(v["max_abs_gap"], "0");
    for seed in 1..=10 {
        let v = json_out(&["oracle", "--seed", &seed.to_string(), "-N", "8", "--measures", "3"]);
        assert_eq!(v["max_abs_gap"], "0", "seed {seed}");
    }
    assert_eq!(code(&run(&["oracle", "-N", "21"])), 2);
}

#[test]
fn tail_check() {
    let v = json_out(&["tail-check", "-N", "10000", "-k", "3", "--alpha", "1"]);
    assert_eq!(v["M1"], 21);
    assert_eq!(v["lower"]["ok"], true);
    assert_eq!(v["upper"]["ok"], true);
}

#[test]
fn output_is_deterministic_and_out_flag_writes_file() {
    let args = [
        "verify",
        "--measure",
        &three_atoms(),
        "-N",
        "300",
        "--pattern",
        "1,1,0,1",
    ];
    let a = run(&args).stdout;
    assert_eq!(a, run(&args).stdout);
    let path = file("scan.csv", "");
    let scan = ["ratio-scan", "-N", "50", "-k", "3", "--alpha", "2"];
    let mut with_out = scan.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    assert!(run(&with_out).stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), run(&scan).stdout);
}
