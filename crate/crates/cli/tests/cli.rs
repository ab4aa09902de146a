use std::process::{Command, Output};

fn shortdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shortdiv"))
        .args(args)
        .env_remove("SHORTDIV_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn xi_first_case() {
    let o = shortdiv(&["xi", "--theta", "0.5", "--eta", "0.2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "xi = 1 (ETA_LE_THETA_SQ)\n");
}

#[test]
fn lemma4_match() {
    let o = shortdiv(&["lemma4", "--p", "3", "--v", "0", "--u", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "recurrence 2\nbrute force 2\nMATCH\n");
}

#[test]
fn scan_csv_is_deterministic() {
    let args = ["scan", "--max-n", "10000", "--theta", "0.5", "--epsilon", "0.1", "--format", "csv"];
    let a = shortdiv(&args);
    let b = shortdiv(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("n,count,theta,epsilon\n1,1,1/2,1/10\n"));
}

#[test]
fn argument_errors_exit_2() {
    assert_eq!(shortdiv(&["bogus"]).status.code(), Some(2));
    assert_eq!(shortdiv(&["xi", "--theta", "2", "--eta", "0.1"]).status.code(), Some(2));
    assert_eq!(shortdiv(&["xi", "--theta", "x", "--eta", "0.1"]).status.code(), Some(2));
    assert_eq!(shortdiv(&["prop1", "--theta", "0.5", "--epsilon", "0.5"]).status.code(), Some(2));
    assert_eq!(shortdiv(&["witness", "--theta", "0.6", "--epsilon", "0.1", "--search"]).status.code(), Some(2));
    assert_eq!(shortdiv(&["verify-all", "--only", "11"]).status.code(), Some(2));
    // sum(x) > sum(y)
    assert_eq!(shortdiv(&["lemma2", "--pairs", "1:0"]).status.code(), Some(2));
    // 7 has only two divisors.
    assert_eq!(shortdiv(&["split", "--n", "7", "--theta", "0.5", "--eta", "0.3"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_shortdiv"))
        .args(["xi", "--theta", "0.5", "--eta", "0.2"])
        .env("SHORTDIV_PRECISION_BITS", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_checks_exit_1() {
    // Too few primes above M = 10 for the packing.
    assert_eq!(shortdiv(&["witness", "--theta", "0.4", "--epsilon", "0.1", "--M", "10"]).status.code(), Some(1));
    // The packing at M = 10^4 misses the window.
    assert_eq!(shortdiv(&["witness", "--theta", "0.4", "--epsilon", "0.1", "--M", "10000"]).status.code(), Some(1));
}

#[test]
fn good_runs_exit_0() {
    for args in [
        vec!["count", "--n", "720720", "--theta", "0.5", "--eta", "0.3"],
        vec!["count", "--n", "360", "--x", "10", "--y", "5"],
        vec!["alpha", "--theta", "0.4", "--eta", "0.2"],
        vec!["alpha-delta", "--theta", "0.4", "--eta", "0.18", "--delta", "0.01"],
        vec!["alpha-delta", "--grid", "4"],
        vec!["prop1", "--theta", "0.5", "--epsilon", "0.1", "--n", "720720"],
        vec!["split", "--n", "720720", "--theta", "0.5", "--eta", "0.45"],
        vec!["lemma1", "--d", "12,18,30", "--t", "2"],
        vec!["lemma1", "--d", "12,18,30", "--t", "-3"],
        vec!["lemma2", "--pairs", "1:0,0:2,1/2:1/2"],
        vec!["sieve-bound", "--n", "720720", "--a", "1", "--b", "1", "--i", "3", "-Q", "20"],
        vec!["witness", "--theta", "0.4", "--epsilon", "0.1", "--m", "100"],
        vec!["witness", "--theta", "0.6", "--epsilon", "0.5", "--M", "1000"],
        vec!["verify-all", "--only", "1,2"],
    ] {
        let o = shortdiv(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn xi_grid_csv() {
    let o = shortdiv(&["xi", "--grid", "3", "--format", "csv"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 9);
    assert_eq!(text.lines().next(), Some("theta,eta,xi,case"));
}

#[test]
fn witness_json_uses_decimal_strings() {
    let o = shortdiv(&["witness", "--theta", "0.4", "--epsilon", "0.1", "--M", "85899345920000", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["M"], "85899345920000");
    assert_eq!(v["packed_count"], 20);
    assert!(v["N"].is_string());
    assert_eq!(v["stirling"]["exact"], "20");
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("shortdiv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("xi.json");
    let o = shortdiv(&["xi", "--theta", "0.5", "--eta", "0.2", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["xi"], "1");
    std::fs::remove_dir_all(dir).ok();
}
