use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mdms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdms"))
        .args(args)
        .output()
        .expect("running mdms")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn mstd_example() {
    let out = mdms(&["mstd", "--set", "[0,2,3,4,7,11,12,14]"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["sumset_size"], 26);
    assert_eq!(v["difference_size"], 25);
    assert_eq!(v["class"], "mstd");
}

#[test]
fn construct_then_verify_h1() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    let out = mdms(&[
        "construct",
        "--h",
        "1",
        "--epsilon",
        "9/10",
        "-o",
        path(&state),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = mdms(&["verify", "--state", path(&state), "--check", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let certs = stdout_json(&out);
    let certs = certs.as_array().unwrap();
    assert_eq!(certs.len(), 4);
    for c in certs {
        assert_eq!(c["verdict"], "pass", "{c}");
        assert_eq!(c["schema"], "mdms-cert/1");
    }
}

#[test]
fn full_inductive_h2_reports_the_plan_and_refuses() {
    let out = mdms(&[
        "construct",
        "--h",
        "2",
        "--epsilon",
        "9/10",
        "--levels",
        "7/10,8/10",
        "--full-inductive",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("n = 31000"), "{err}");
    assert!(err.contains("310019"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn untainted_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    mdms(&[
        "construct",
        "--h",
        "1",
        "--epsilon",
        "9/10",
        "-o",
        path(&state),
    ]);
    // replace f by the zero map: still a subtractive basis, but hA = W
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&state).unwrap()).unwrap();
    v["f"] = serde_json::json!({ "kind": "explicit", "table": vec![0; 25] });
    fs::write(&state, v.to_string()).unwrap();
    let out = mdms(&["verify", "--state", path(&state), "--check", "final"]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout_json(&out)[0]["verdict"], "fail");
}

#[test]
fn tainted_states_do_not_fail_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let s1 = dir.path().join("s1.json");
    let s2 = dir.path().join("s2.json");
    let out = mdms(&[
        "construct",
        "--h",
        "2",
        "--epsilon",
        "9/10",
        "--force-size",
        "3",
        "-o",
        path(&s1),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = mdms(&[
        "construct",
        "--state",
        path(&s1),
        "--pairs",
        "2",
        "--module-size",
        "5",
        "-o",
        path(&s2),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = mdms(&["verify", "--state", path(&s2)]);
    assert_eq!(out.status.code(), Some(0));
    let certs = stdout_json(&out);
    // every state-derived certificate carries the taints
    assert!(certs
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["claim"] != "CoordinateHits")
        .all(|c| !c["taints"].as_array().unwrap().is_empty()));
}

#[test]
fn sumset_of_a_set_file() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("set.json");
    fs::write(
        &set,
        r#"{"spec":{"h":2,"modules":[{"cyclic":7}]},"elements":[[0],[1],[3]]}"#,
    )
    .unwrap();
    let out = mdms(&["sumset", "--h", "2", "--set", path(&set)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert_eq!(v["cardinality"], 6);
    let out = mdms(&["sumset", "--form", "1,-1", "--set", path(&set)]);
    assert_eq!(stdout_json(&out)["cardinality"], 7);
}

#[test]
fn pair_counts() {
    let out = mdms(&[
        "pairs",
        "--count",
        "--group-size",
        "125",
        "--h",
        "2",
        "--level",
        "2",
    ]);
    assert_eq!(stdout_json(&out)["count"], "31000");
    let out = mdms(&[
        "pairs",
        "--list",
        "--group-size",
        "2",
        "--h",
        "2",
        "--level",
        "2",
    ]);
    assert_eq!(stdout_json(&out).as_array().unwrap().len(), 4);
}

#[test]
fn cap_refusal_is_a_usage_error() {
    let out = mdms(&[
        "construct",
        "--h",
        "2",
        "--epsilon",
        "1/1000",
        "--cap",
        "1000",
    ]);
    // the state itself is symbolic; verification needs the group
    assert!(out.status.success());
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("s.json");
    fs::write(&state, &out.stdout).unwrap();
    let out = mdms(&[
        "verify",
        "--state",
        path(&state),
        "--check",
        "subtractive-basis",
        "--cap",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn manifest_replay_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let state = dir.path().join(format!("state-{tag}.json"));
        let manifest = dir.path().join(format!("manifest-{tag}.json"));
        let out = mdms(&[
            "construct",
            "--h",
            "2",
            "--epsilon",
            "9/10",
            "--force-size",
            "3,5",
            "--pairs",
            "3",
            "--module-size",
            "7",
            "--seed",
            "17",
            "-o",
            path(&state),
            "--manifest",
            path(&manifest),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let m: Value = serde_json::from_str(&fs::read_to_string(&manifest).unwrap()).unwrap();
        (fs::read(&state).unwrap(), m)
    };
    let (a, ma) = run("a");
    let (b, mb) = run("b");
    assert_eq!(a, b);
    assert_eq!(ma["output_sha256"], mb["output_sha256"]);
    assert_eq!(ma["output_sha256"].as_str().unwrap().len(), 64);

    let verify_manifest = dir.path().join("verify-manifest.json");
    let state = dir.path().join("state-a.json");
    let out = mdms(&[
        "verify",
        "--state",
        path(&state),
        "--manifest",
        path(&verify_manifest),
    ]);
    assert!(out.status.success());
    let m: Value = serde_json::from_str(&fs::read_to_string(&verify_manifest).unwrap()).unwrap();
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn search_modes() {
    let out = mdms(&["search", "--p", "13", "--h", "2", "--exhaustive"]);
    assert_eq!(stdout_json(&out)["best_density"], "10/13");
    let a = mdms(&[
        "search", "--p", "13", "--h", "2", "--random", "--seed", "3", "--iters", "500",
    ]);
    let b = mdms(&[
        "search", "--p", "13", "--h", "2", "--random", "--seed", "3", "--iters", "500",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let bad = mdms(&["search", "--p", "12", "--h", "2"]);
    assert_eq!(bad.status.code(), Some(2));
}
