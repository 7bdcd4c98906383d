//! End-to-end runs of the `kal` binary: outputs and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kal"))
        .args(args)
        .output()
        .expect("kal runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn nw_p13_passes() {
    let out = kal(&["nw", "--prime", "13"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("count=2197"), "{text}");
    assert!(text.contains("max_intersection=2"));
    assert!(text.contains("verdict=PASS"));
}

#[test]
fn nw_rejects_composite() {
    assert_eq!(code(&kal(&["nw", "--prime", "4"])), 2);
}

#[test]
fn nw_p3_degree1_writes_nine_sets() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nw.json");
    let out = kal(&[
        "nw",
        "--prime",
        "3",
        "--degree",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = read(&path);
    assert_eq!(v["system"]["sets"].as_array().unwrap().len(), 9);
    assert_eq!(v["report"]["count"], 9);
    assert_eq!(v["report"]["max_intersection"], 1);
}

#[test]
fn certify_check_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let p = path.to_str().unwrap();
    let out = kal(&[
        "certify",
        "--prime",
        "13",
        "--epsilon",
        "1/16",
        "--pairs",
        "sample:2000",
        "--seed",
        "42",
        "--out",
        p,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("verdict=PASS"));
    let cert = read(&path);
    assert_eq!(cert["witnesses"].as_array().unwrap().len(), 2197);
    assert_eq!(cert["witnesses"][0]["optimum"], "8/1");
    assert_eq!(cert["pairs"].as_array().unwrap().len(), 2000);

    assert_eq!(code(&kal(&["check", p])), 0);

    let mut tampered = cert.clone();
    tampered["witnesses"][5]["optimum"] = Value::from("17/2");
    let bad = dir.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&tampered).unwrap()).unwrap();
    assert_eq!(code(&kal(&["check", bad.to_str().unwrap()])), 1);

    let broken = dir.path().join("broken.json");
    fs::write(
        &broken,
        "{\"format\": \"kal-lowerbound-certificate/1\", \"p\": ",
    )
    .unwrap();
    assert_eq!(code(&kal(&["check", broken.to_str().unwrap()])), 2);
}

#[test]
fn certify_strict_regime_rejected() {
    assert_eq!(
        code(&kal(&["certify", "--prime", "13", "--epsilon", "1/10"])),
        2
    );
}

#[test]
fn certify_relaxed_half_records_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("half.json");
    let out = kal(&[
        "certify",
        "--prime",
        "13",
        "--epsilon",
        "1/2",
        "--relaxed",
        "--pairs",
        "sample:50",
        "--seed",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    let cert = read(&path);
    assert_eq!(cert["verdicts"]["gap"], false);
    assert_eq!(cert["verdicts"]["overall"], false);
}

#[test]
fn sampling_without_seed_is_a_usage_error() {
    assert_eq!(
        code(&kal(&[
            "certify",
            "--prime",
            "13",
            "--epsilon",
            "1/16",
            "--pairs",
            "sample:10"
        ])),
        2
    );
    assert_eq!(code(&kal(&["round", "--n", "3", "--epsilon", "1/2"])), 2);
}

#[test]
fn decimal_epsilon_rejected() {
    assert_eq!(
        code(&kal(&["certify", "--prime", "13", "--epsilon", "0.0625"])),
        2
    );
}

#[test]
fn round_instance_csv() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("k.json");
    fs::write(
        &inst,
        r#"{"n": 4, "weights": ["3", "5/2", "4", "7/3"], "capacity": "6"}"#,
    )
    .unwrap();
    let out = kal(&[
        "--format",
        "csv",
        "round",
        "--instance",
        inst.to_str().unwrap(),
        "--epsilon",
        "1/4",
        "--trials",
        "1000",
        "--seed",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("command,p/n,epsilon,checks,failures,wall_ms")
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..5], &["round", "n=4", "1/4", "1001", "0"]);
}

#[test]
fn round_exhaustive_prints_chain() {
    let out = kal(&[
        "round",
        "--n",
        "2",
        "--epsilon",
        "1/2",
        "--exhaustive",
        "--trials",
        "3",
        "--seed",
        "5",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.contains("<= maxQ=")).count(), 3);
}

#[test]
fn round_zero_objective_passes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("k.json");
    let obj = dir.path().join("c.json");
    let res = dir.path().join("r.json");
    fs::write(&inst, r#"{"n": 2, "weights": ["1", "1"], "capacity": "1"}"#).unwrap();
    fs::write(&obj, r#"["0", "0"]"#).unwrap();
    let out = kal(&[
        "round",
        "--instance",
        inst.to_str().unwrap(),
        "--objective",
        obj.to_str().unwrap(),
        "--epsilon",
        "1/2",
        "--out",
        res.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = read(&res);
    assert_eq!(v["trials"][0]["check"]["verdict"], true);
    assert_eq!(v["trials"][0]["check"]["K"], Value::Null);
}

#[test]
fn extension_n9() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ext.json");
    let out = kal(&[
        "extension",
        "--n",
        "9",
        "--epsilon",
        "1/4",
        "--trials",
        "30",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = read(&path);
    assert_eq!(v["extension"]["b0"], 9);
    assert_eq!(v["extension"]["b1"], 1);
    assert_eq!(v["extension"]["system"]["variables"][18], "lambda");
}

#[test]
fn budget_exhaustion_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("k.json");
    // denominators push the cleared capacity past the DP bound, forcing branch and bound
    fs::write(
        &inst,
        r#"{"n": 6, "weights": ["1/1000003", "1/1000033", "1/1000037", "1/1000039", "3/1000081", "5/1000099"], "capacity": "1/100000"}"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_kal"))
        .args([
            "round",
            "--instance",
            inst.to_str().unwrap(),
            "--epsilon",
            "1/2",
            "--trials",
            "2",
            "--seed",
            "1",
        ])
        .env("KAL_BUDGET_NODES", "1")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn report_summarizes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let nw = dir.path().join("nw.json");
    let ext = dir.path().join("ext.json");
    assert_eq!(
        code(&kal(&[
            "nw",
            "--prime",
            "5",
            "--degree",
            "1",
            "--out",
            nw.to_str().unwrap()
        ])),
        0
    );
    assert_eq!(
        code(&kal(&[
            "extension",
            "--n",
            "4",
            "--epsilon",
            "1/4",
            "--trials",
            "5",
            "--seed",
            "1",
            "--out",
            ext.to_str().unwrap()
        ])),
        0
    );
    let out = kal(&[
        "--format",
        "csv",
        "report",
        nw.to_str().unwrap(),
        ext.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("nw,p=5,,303,0,"));
    assert!(text
        .lines()
        .nth(2)
        .unwrap()
        .starts_with("extension,n=4,1/4,"));
}
