use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fppflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fppflow")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const LADDER: &str = r#"
seed = 3

[experiment]
kind = "truncation_ladder"
distribution = "{1: 0.5, 4: 0.5}"
levels = ["1", "2"]
p = 4
replicates = 6
plateau_halfwidths = 0.0
"#;

#[test]
fn run_writes_artifacts_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "nu.toml",
        "seed = 5\n[experiment]\nkind = \"estimate_nu\"\ndistribution = \"{1: 1/2, 2: 1/2}\"\nschedule = [2, 4]\nreplicates = 3\n",
    );
    let out = tmp.path().join("out");
    let o = fppflow(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["series.csv", "samples.jsonl", "report.json", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let series = fs::read_to_string(out.join("series.csv")).unwrap();
    assert!(series.starts_with("p,mean,stddev,n,halfwidth,infiniteCount\n"));
    assert_eq!(series.lines().count(), 3);
    let samples = fs::read_to_string(out.join("samples.jsonl")).unwrap();
    assert_eq!(samples.lines().count(), 6);
}

#[test]
fn statistical_failure_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "ladder.toml", LADDER);
    let o = fppflow(&["truncation-ladder", "--config", &cfg]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("FAIL plateau"), "{stdout}");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn input_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.toml", "[experiment]\nkind = \"nope\"\n");
    assert_eq!(fppflow(&["run", "--config", &bad]).status.code(), Some(2));
    // mass at infinity above the critical parameter
    let hyp = write(
        tmp.path(),
        "hyp.toml",
        "[experiment]\nkind = \"annulus\"\ndistribution = \"{1: 0.4, inf: 0.6}\"\np = 4\nheight = 4\nl = 2\nreplicates = 2\n",
    );
    let o = fppflow(&["run", "--config", &hyp]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hypothesis"));
    let cfg = write(tmp.path(), "ladder.toml", LADDER);
    assert_eq!(fppflow(&["annulus", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn replay_prints_one_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "ladder.toml", LADDER);
    let o = fppflow(&["replay", "--config", &cfg, "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 3, "two rungs and the untruncated flow");
    assert!(lines.iter().all(|l| l.contains("\"seed\":5")));
    assert_eq!(fppflow(&["replay", "--config", &cfg, "--seed", "99"]).status.code(), Some(2));
}

#[test]
fn heavy_tail_table_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("t.tsv");
    let o = fppflow(&["table", "heavy-tail", "--steps", "8", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let t = fppflow_lab::literal::read_table(&out).unwrap();
    assert_eq!(t.len(), 8);
    assert_eq!(t[7].1.to_string(), "64");
}
