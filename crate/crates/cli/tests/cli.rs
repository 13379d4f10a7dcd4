use std::process::{Command, Output};

use serde_json::Value;

fn shuffle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shuffle")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn first_line(args: &[&str]) -> String {
    let o = shuffle(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o).lines().next().unwrap().to_string()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json", "--no-timing"]);
    serde_json::from_str(stdout(&shuffle(&all)).lines().last().unwrap()).unwrap()
}

#[test]
fn command_examples() {
    assert_eq!(first_line(&["sigma-inv", "--p", "2", "--order", "8", "1+X"]), "1+X+X^2+X^3+X^4+X^5+X^6+X^7+O(X^8)");
    assert_eq!(first_line(&["sigma-inv", "--p", "2", "--order", "64", "--reconstruct", "8", "1+X"]), "1/(1+X)");
    assert_eq!(first_line(&["sigma", "--p", "2", "--order", "4", "1"]), "1");
    assert_eq!(
        first_line(&["sigma-inv", "--p", "5", "--order", "64", "--reconstruct", "8", "(1+X)/(1-2X)"]),
        "(1-2X-2X^3)/(1-X^4+2X^5)"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(shuffle(&["expand", "1+X"]).status.code(), Some(0));
    assert_eq!(shuffle(&["reconstruct", "--reconstruct", "8", "lacunary(2,1,0)"]).status.code(), Some(2));
    let bad = shuffle(&["sigma", "1+*X"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("parse error at 2"));
    assert_eq!(shuffle(&["sigma", "--form", "nope", "1+X"]).status.code(), Some(1));
    assert_eq!(shuffle(&["sigma", "--p", "4", "1+X"]).status.code(), Some(1));
}

#[test]
fn json_reports_follow_the_schema_and_are_reproducible() {
    let args = ["sigma-inv", "--p", "3", "--reconstruct", "8", "1/(1+X)", "--format", "json", "--no-timing"];
    let a = stdout(&shuffle(&args));
    assert_eq!(a, stdout(&shuffle(&args)));
    let v: Value = serde_json::from_str(&a).unwrap();
    for key in ["job", "inputs", "result", "certification", "timing_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["job"], "sigma-inv");
    assert_eq!(v["result"]["fraction"], "(1-X+X^2)/(1-X^2+X^3)");
    assert_eq!(v["certification"]["method"], "degree-bound");
    assert!(v["certification"]["order_checked"].as_u64().unwrap() > 0);
    assert!(v["timing_ms"].is_null());
    let timed: Value = serde_json::from_str(&stdout(&shuffle(&args[..8]))).unwrap();
    assert!(timed["timing_ms"].is_number());
}

#[test]
fn printed_results_reparse() {
    for (p, expr) in [("2", "sigma_inv(1+X+X^3)"), ("3", "shuffle(1+X, 1/(1-X^2))"), ("2", "psi_inv(1+X)"), ("5", "sigma(1/(1-2X))")] {
        let line = first_line(&["expand", "--p", p, "--order", "24", expr]);
        assert_eq!(first_line(&["expand", "--p", p, "--order", "24", &line]), line, "{expr}");
    }
    let nc = first_line(&["nc-sigma", "1+x1+2*x1x2", "--p", "3"]);
    assert_eq!(first_line(&["expand", "--p", "3", "--vars", "2", &nc]), nc);
}

#[test]
fn forms_and_solvers_are_selectable() {
    let listed = stdout(&shuffle(&["forms"]));
    for name in ["sigma", "sigma-lift", "sigma-digit", "sigma-gf2", "sigma-tilde", "psi", "triangular", "fixed-point"] {
        assert!(listed.contains(name), "{name}");
    }
    let default = first_line(&["sigma-inv", "--order", "32", "1+X+X^5"]);
    for form in ["sigma-lift", "sigma-digit", "sigma-gf2"] {
        for solver in ["triangular", "fixed-point"] {
            let got = first_line(&["sigma-inv", "--order", "32", "--form", form, "--solver", solver, "1+X+X^5"]);
            assert_eq!(got, default, "{form}/{solver}");
        }
    }
}

#[test]
fn verify_corpus_single_entry_and_full_table() {
    let v = json(&["verify-corpus", "--id", "sigma_inv_1px"]);
    assert_eq!(v["result"][0]["passed"], true);
    assert_eq!(shuffle(&["verify-corpus", "--id", "no_such_entry"]).status.code(), Some(1));
    let all = shuffle(&["verify-paper", "--no-timing"]);
    assert!(all.status.success(), "{}", stdout(&all));
    assert!(!stdout(&all).contains("FAIL"));
}

#[test]
fn nc_commands() {
    assert_eq!(first_line(&["nc-shuffle", "--p", "3", "x1", "x2"]), "x1x2+x2x1+O(8)");
    assert_eq!(first_line(&["nc-hankel", "geometric(1,1)"]), "rank 1");
    assert_eq!(first_line(&["nc-closure", "x1x2"]), "dimension 3 (closed)");
    let v = json(&["nc-sigma-inv", "--p", "2", "1+x1x2"]);
    let back = first_line(&["nc-sigma", "--p", "2", v["result"]["nc_series"].as_str().unwrap()]);
    assert_eq!(back, "1+x1x2+O(8)");
}

#[test]
fn orbit_and_kernel_commands() {
    assert_eq!(first_line(&["orbit", "1+X^3+X^5"]), "finite orbit of size 1");
    assert!(first_line(&["orbit", "1+X"]).starts_with("infinite"));
    assert!(first_line(&["kernel", "--order", "1024", "thue_morse(0)"]).starts_with("dimension 2"));
    assert!(first_line(&["classify", "--order", "256", "1/(1+X+X^3)"]).starts_with("rational"));
    assert!(first_line(&["classify", "--order", "4096", "sigma_inv(1+lacunary(2,1,0))"]).starts_with("algebraic"));
    let g = json(&["growth", "1/(1+X+X^3)", "--from", "-2", "--to", "2"]);
    assert_eq!(g["result"].as_array().unwrap().len(), 5);
}

#[test]
fn scan_is_ordered_and_resumable() {
    let base = ["scan", "--max-degree", "4", "--format", "json", "--no-timing"];
    let one = stdout(&shuffle(&[&base[..], &["--jobs", "1"]].concat()));
    let many = stdout(&shuffle(&[&base[..], &["--jobs", "4"]].concat()));
    assert_eq!(one, many);
    let records: Vec<Value> = one.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 17);
    assert!(records[..16].iter().all(|r| r["status"] == "certified" && r["shape"]["conforms"] == true));
    assert_eq!(records[16]["result"]["certified"], 16);

    let dir = tempfile::tempdir().unwrap();
    let progress = dir.path().join("progress.ndjson");
    let p = progress.to_str().unwrap();
    let first = stdout(&shuffle(&[&base[..], &["--resume", p]].concat()));
    assert_eq!(first, one);
    // drop the second half and leave a torn line, as an interrupted run would
    let text = std::fs::read_to_string(&progress).unwrap();
    let kept: Vec<&str> = text.lines().take(8).collect();
    std::fs::write(&progress, format!("{}\n{{\"index\":", kept.join("\n"))).unwrap();
    let resumed = stdout(&shuffle(&[&base[..], &["--resume", p]].concat()));
    assert_eq!(resumed, one);
    let lines = std::fs::read_to_string(&progress).unwrap();
    let complete = lines.lines().filter(|l| serde_json::from_str::<Value>(l).is_ok()).count();
    assert_eq!(complete, 16);
}

#[test]
fn scan_random_is_seeded_and_csv_has_a_header() {
    let args = ["scan", "--generator", "random", "--count", "6", "--max-degree", "3", "--p", "3", "--format", "csv", "--no-timing"];
    let a = stdout(&shuffle(&[&args[..], &["--seed", "7"]].concat()));
    assert_eq!(a, stdout(&shuffle(&[&args[..], &["--seed", "7"]].concat())));
    assert_ne!(a, stdout(&shuffle(&[&args[..], &["--seed", "8"]].concat())));
    assert!(a.starts_with("index,input,status"));
    assert_eq!(a.lines().count(), 7);
}
