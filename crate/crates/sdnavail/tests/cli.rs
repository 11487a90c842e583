use std::process::{Command, Output};

use sdnavail::topology_file::write_topology;
use sdnavail_core::topology::build_reference_backbone;

fn sdnavail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdnavail")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn unavailability(csv: &str, label: &str) -> f64 {
    let line = csv.lines().find(|l| l.split(',').next() == Some(label)).unwrap();
    line.split(',').nth(5).unwrap().parse().unwrap()
}

#[test]
fn case_ordering_on_emitted_table() {
    let text = stdout(&sdnavail(&["cases"]));
    let u = |c: &str| unavailability(&text, c);
    for (hi, lo) in [("1", "8"), ("8", "2"), ("2", "3"), ("3", "4"), ("4", "5"), ("3", "6"), ("6", "7")] {
        assert!(u(hi) >= u(lo), "U{hi} = {} < U{lo} = {}", u(hi), u(lo));
    }
    for line in text.lines().skip(1) {
        assert!(line.ends_with(",exact,,"));
    }
}

#[test]
fn exit_statuses_and_streams() {
    let o = sdnavail(&["eval", "--case", "9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("1..8"));

    let o = sdnavail(&["eval", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cases.csv");
    let o = sdnavail(&["cases", "--out", path.to_str().unwrap()]);
    assert!(stdout(&o).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&sdnavail(&["cases"])));
}

#[test]
fn custom_topology_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ref.topo");
    std::fs::write(&path, write_topology(&build_reference_backbone())).unwrap();
    let p = path.to_str().unwrap();

    let as_given = stdout(&sdnavail(&["eval", "--topology", p]));
    let builtin = stdout(&sdnavail(&["eval"]));
    assert_eq!(unavailability(&as_given, "custom"), unavailability(&builtin, "3"));
    let case8 = stdout(&sdnavail(&["eval", "--topology", p, "--case", "8"]));
    assert_eq!(case8, stdout(&sdnavail(&["eval", "--case", "8"])));

    std::fs::write(&path, "node A_1 A fwd\nlink A_1-X_9 A_1 X_9\n").unwrap();
    let o = sdnavail(&["eval", "--topology", p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("X_9"));
}

#[test]
fn params_file_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("worse.params");
    std::fs::write(&path, "# less reliable links\nparam link lambda_H 1/1752\n").unwrap();
    let worse = stdout(&sdnavail(&["eval", "--params", path.to_str().unwrap()]));
    let base = stdout(&sdnavail(&["eval"]));
    assert!(unavailability(&worse, "3") > unavailability(&base, "3"));

    std::fs::write(&path, "param link lambda_Q 1\n").unwrap();
    let o = sdnavail(&["eval", "--params", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn spec_file_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("study.spec");
    std::fs::write(&path, "sweep case=3 axis=alpha_O grid=0.1,1,10 method=exact\nlocations pairs=BRG+STV\n").unwrap();
    let text = stdout(&sdnavail(&["sweep", "--spec", path.to_str().unwrap()]));
    let labels: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(labels, ["3", "3", "3", "BRG+STV"]);
    let flags = stdout(&sdnavail(&["sweep", "--case", "3", "--axis", "alpha_O", "--grid", "0.1,1,10"]));
    assert_eq!(text.lines().take(4).collect::<Vec<_>>(), flags.lines().collect::<Vec<_>>());
}

#[test]
fn monte_carlo_rows() {
    let text = stdout(&sdnavail(&["eval", "--case", "1", "--samples", "50000", "--seed", "5"]));
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[6], "monte-carlo");
    let (lo, hi): (f64, f64) = (fields[7].parse().unwrap(), fields[8].parse().unwrap());
    assert!(lo < hi);
}

#[test]
fn mc_check_verdict() {
    let text = stdout(&sdnavail(&["mc-check", "--case", "8", "--samples", "200000", "--seed", "1"]));
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("8,sdn,"));
    assert!(row.ends_with(",0.99,200000,1,PASS"), "{row}");
}
