use std::io::Write;
use std::net::TcpListener;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn modnim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modnim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn solve_reports_status_and_moves() {
    let o = modnim(&["solve", "--m", "6", "--heaps", "5,6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o), json!({"status": "P", "winningMoves": []}));

    let o = modnim(&["solve", "--m", "6", "--heaps", "3,3"]);
    let v = stdout_json(&o);
    assert_eq!(v["status"], "N");
    assert_eq!(v["winningMoves"].as_array().unwrap().len(), 1);
}

#[test]
fn solve_with_and_without_oracle_agree() {
    for m in 1..=12u64 {
        for (x, y) in [(0u64, 1u64), (3, 3), (m, m + 1), (2 * m, m / 2 + 1), (5, 9)] {
            let heaps = format!("{x},{y}");
            let fast = stdout_json(&modnim(&["solve", "--m", &m.to_string(), "--heaps", &heaps]));
            let slow = stdout_json(&modnim(&["solve", "--m", &m.to_string(), "--heaps", &heaps, "--oracle"]));
            assert_eq!(fast["status"], slow["status"], "m={m} {heaps}");
            if fast["status"] == "N" {
                // closed form gives the preferred move, which is first in the oracle's list
                assert_eq!(fast["winningMoves"][0], slow["winningMoves"][0], "m={m} {heaps}");
            }
        }
    }
}

#[test]
fn solve_usage_errors_exit_2() {
    assert_eq!(modnim(&["solve", "--m", "0", "--heaps", "1,2"]).status.code(), Some(2));
    assert_eq!(modnim(&["solve", "--m", "3", "--heaps", "1,x"]).status.code(), Some(2));
    assert_eq!(modnim(&["solve", "--heaps", "1,2"]).status.code(), Some(2));
    assert_eq!(modnim(&["bogus"]).status.code(), Some(2));
}

#[test]
fn solve_over_budget_exits_3() {
    let o = modnim(&["solve", "--m", "4", "--heaps", "50,50,50", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn ppositions_methods_are_byte_identical() {
    for m in ["1", "6", "8", "12", "40"] {
        for fmt in ["json", "csv"] {
            let a = modnim(&["ppositions", "--m", m, "--format", fmt, "--method", "recursive"]);
            let b = modnim(&["ppositions", "--m", m, "--format", fmt, "--method", "explicit"]);
            assert_eq!(a.status.code(), Some(0));
            assert_eq!(a.stdout, b.stdout, "m={m} {fmt}");
        }
    }
    let csv = modnim(&["ppositions", "--m", "3", "--format", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap(), "x,y\n0,0\n1,1\n2,2\n");
}

#[test]
fn verify_passes_for_small_m() {
    let o = modnim(&["verify", "--m", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["m"], 6);
    assert_eq!(v["bound"], 18);
    assert_eq!(v["pCells"], 9);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn verify_range_emits_one_report_per_m() {
    let o = modnim(&["verify", "--m-max", "5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("m,heaps,bound,name,params,pass,skipped,counterexample,elapsedMs")
    );
    let ms: std::collections::BTreeSet<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ms.into_iter().collect::<Vec<_>>(), ["1", "2", "3", "4", "5"]);
}

#[test]
fn verify_odd_multiheap() {
    let o = modnim(&["verify", "--m", "3", "--heaps", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["checks"][0]["pass"], true);
}

#[test]
fn verify_even_multiheap_needs_oracle_only() {
    let o = modnim(&["verify", "--m", "4", "--heaps", "3"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no closed form for even m with 3 heaps"));

    let o = modnim(&["verify", "--m", "4", "--heaps", "3", "--oracle-only"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_bound_too_small_is_usage() {
    assert_eq!(modnim(&["verify", "--m", "6", "--bound", "5"]).status.code(), Some(2));
}

#[test]
fn verify_budget_overrun_exits_3() {
    let o = modnim(&["verify", "--m", "6", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(3));
    let v = stdout_json(&o);
    let oracle = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "oracle-agreement")
        .unwrap();
    assert_eq!(oracle["skipped"], true);
}

#[test]
fn play_over_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_modnim"))
        .args(["play", "--m", "3", "--heaps", "0,2"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"0,2\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("you win!"));
}

#[test]
fn serve_on_a_busy_port_exits_5() {
    let held = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = held.local_addr().unwrap().port().to_string();
    let o = modnim(&["serve", "--port", &port]);
    assert_eq!(o.status.code(), Some(5));
}
