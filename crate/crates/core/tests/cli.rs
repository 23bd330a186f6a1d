//! End-to-end checks of the command-line binary: determinism, thread
//! invariance, config layering, output formats, and exit codes.

use std::process::{Command, Output};

fn turanlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_turanlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn construct_is_byte_identical_across_runs_and_thread_counts() {
    let base = ["construct", "--model", "A", "--r", "2", "--s", "2", "--q", "5", "--h", "2", "--seed", "7"];
    let first = turanlab(&base);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let second = turanlab(&base);
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout(&first).starts_with("HGR v1\n"));

    let mut threaded = base.to_vec();
    threaded.extend(["--threads", "2"]);
    let third = turanlab(&threaded);
    assert_eq!(first.stdout, third.stdout);
}

#[test]
fn construct_writes_the_declared_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.hgr");
    let out = turanlab(&[
        "construct", "--model", "B", "--t", "2", "--q", "3", "--seed", "1", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("wrote"));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("HGR v1\n"));

    // File bytes equal the stdout bytes of the same run without --out.
    let plain = turanlab(&["construct", "--model", "B", "--t", "2", "--q", "3", "--seed", "1"]);
    assert_eq!(text, stdout(&plain));
}

#[test]
fn expect_reports_are_thread_invariant() {
    let base = [
        "expect", "--model", "A", "--s", "2", "--q", "5", "--h", "2", "--trials", "6", "--seed",
        "11", "--threshold", "4",
    ];
    let mut one = base.to_vec();
    one.extend(["--threads", "1"]);
    let mut two = base.to_vec();
    two.extend(["--threads", "2"]);
    let a = turanlab(&one);
    let b = turanlab(&two);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    // The payload is a JSON report.
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["trials"], 6);
}

#[test]
fn lemma22_prints_the_exact_probability() {
    let out = turanlab(&["lemma22", "--q", "11", "--r", "2", "--t", "2", "--d", "8", "--usize", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("11^-2"), "{text}");
    assert!(text.contains(&(1.0f64 / 121.0).to_string()), "{text}");
}

#[test]
fn lemma22_guard_violations_warn_then_fail_under_strict() {
    // |U| = 3 from a 3-point pool: C(3,2) = 3 is not below q = 3.
    let relaxed = turanlab(&["lemma22", "--q", "3", "--usize", "3"]);
    assert_eq!(relaxed.status.code(), Some(0), "{}", stderr(&relaxed));
    assert!(stderr(&relaxed).contains("warning"), "{}", stderr(&relaxed));

    let strict = turanlab(&["lemma22", "--q", "3", "--usize", "3", "--strict"]);
    assert_eq!(strict.status.code(), Some(1), "{}", stderr(&strict));
}

#[test]
fn config_files_reproduce_explicit_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "model=A\ns=2\nq=5\nh=2\nseed=7\n").unwrap();
    let via_config = turanlab(&["construct", "--config", path.to_str().unwrap()]);
    let via_flags =
        turanlab(&["construct", "--model", "A", "--s", "2", "--q", "5", "--h", "2", "--seed", "7"]);
    assert_eq!(via_config.status.code(), Some(0), "{}", stderr(&via_config));
    assert_eq!(via_config.stdout, via_flags.stdout);

    // A flag override changes the seed and therefore the graph.
    let overridden =
        turanlab(&["construct", "--config", path.to_str().unwrap(), "--seed", "8"]);
    assert_eq!(overridden.status.code(), Some(0));
    assert_ne!(overridden.stdout, via_config.stdout);
}

#[test]
fn csv_format_emits_per_trial_rows() {
    let out = turanlab(&[
        "expect", "--model", "A", "--s", "2", "--q", "3", "--trials", "3", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("trial,seed,edges"), "{text}");
    assert_eq!(lines.count(), 3);
}

#[test]
fn analyze_emits_a_certificate() {
    let out = turanlab(&[
        "analyze", "--model", "C", "--l", "2", "--q", "3", "--h", "2", "--seed", "5",
        "--threshold", "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["threshold"], 4);
    assert!(v["certificate"]["freeness"].is_object() || v["certificate"]["freeness"].is_string());
}

#[test]
fn usage_and_config_errors_exit_with_2() {
    assert_eq!(turanlab(&[]).status.code(), Some(2));
    assert_eq!(turanlab(&["frobnicate"]).status.code(), Some(2));
    let out = turanlab(&["construct", "--model", "A", "--s", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`q`"), "{}", stderr(&out));
    let out = turanlab(&["expect", "--model", "A", "--s", "2", "--q", "6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("prime power"), "{}", stderr(&out));
    let out = turanlab(&["construct", "--bogus", "1", "--model", "A", "--s", "2", "--q", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bogus"), "{}", stderr(&out));
}

#[test]
fn scaling_and_moments_run_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scaling.json");
    let out = turanlab(&[
        "scaling", "--model", "A", "--s", "2", "--qs", "3,5,7", "--h", "1", "--threshold", "8",
        "--trials", "4", "--seed", "3", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 3);
    assert!(v["slope"].is_number());
    assert!(stderr(&out).contains("slope"));

    let out = turanlab(&[
        "moments", "--model", "A", "--s", "2", "--qs", "3,5", "--exponent", "1", "--trials", "50",
        "--seed", "2", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("q,exponent,trials,mean,stderr"), "{text}");
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn dichotomy_histogram_has_full_mass() {
    let out = turanlab(&[
        "dichotomy", "--model", "A", "--s", "2", "--q", "9", "--trials", "40", "--seed", "6",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let total: u64 = v["counts"].as_object().unwrap().values().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(total, 40);
}
