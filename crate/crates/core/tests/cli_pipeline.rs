//! End-to-end checks of the `cablekin` binary: exit codes, determinism and
//! file formats, on small configurations that run in well under a second.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cablekin"))
        .args(args)
        .current_dir(dir)
        .env_remove("CABLEKIN_THREADS")
        .output()
        .expect("failed to launch cablekin")
}

fn assert_code(out: &Output, expected: i32) {
    let code = out.status.code().expect("no exit code");
    assert_eq!(
        code,
        expected,
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

const TINY: &[&str] = &[
    "--side-start", "1", "--side-stop", "1.5", "--side-step", "0.5",
    "--R", "0.01", "--step", "0.5",
];

fn generate_tiny(dir: &Path) {
    let mut args = vec!["generate"];
    args.extend_from_slice(TINY);
    args.extend_from_slice(&["--out", "tiny.csv"]);
    assert_code(&run(dir, &args), 0);
}

#[test]
fn generate_writes_the_tiny_grid() {
    let dir = tempdir().unwrap();
    generate_tiny(dir.path());
    let text = std::fs::read_to_string(dir.path().join("tiny.csv")).unwrap();
    assert_eq!(text.lines().count(), 9); // header + 8 rows
    assert!(text.starts_with("x,y,z,B,D,H,R,theta0"));
}

#[test]
fn generate_is_deterministic_across_thread_counts() {
    let dir = tempdir().unwrap();
    generate_tiny(dir.path());
    let single = std::fs::read(dir.path().join("tiny.csv")).unwrap();

    let mut args = vec!["generate"];
    args.extend_from_slice(TINY);
    args.extend_from_slice(&["--out", "tiny4.csv"]);
    let out = Command::new(env!("CARGO_BIN_EXE_cablekin"))
        .args(&args)
        .current_dir(dir.path())
        .env("CABLEKIN_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let multi = std::fs::read(dir.path().join("tiny4.csv")).unwrap();
    assert_eq!(single, multi);
}

#[test]
fn generate_rejects_empty_grids_and_bad_paths() {
    let dir = tempdir().unwrap();
    let out = run(
        dir.path(),
        &["generate", "--side-start", "2", "--side-stop", "1", "--out", "x.csv"],
    );
    assert_code(&out, 2);

    let out = run(dir.path(), &["generate", "--out", "no/such/dir/x.csv"]);
    assert_code(&out, 2);
}

#[test]
fn unknown_flags_are_usage_errors() {
    let dir = tempdir().unwrap();
    assert_code(&run(dir.path(), &["generate", "--frobnicate", "--out", "x.csv"]), 2);
    assert_code(&run(dir.path(), &["no-such-command"]), 2);
}

#[test]
fn stats_prints_moments() {
    let dir = tempdir().unwrap();
    generate_tiny(dir.path());
    let out = run(dir.path(), &["stats", "--data", "tiny.csv", "--bins", "4"]);
    assert_code(&out, 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("rows: 8"));
    assert!(text.contains("theta3"));
}

fn train_small(dir: &Path, out_name: &str) {
    generate_tiny(dir);
    let out = run(
        dir,
        &[
            "train", "--data", "tiny.csv", "--out", out_name,
            "--epochs", "8", "--hidden", "8", "--batch-size", "4", "--test-fraction", "0.25",
        ],
    );
    assert_code(&out, 0);
}

#[test]
fn training_twice_gives_identical_blobs() {
    let dir = tempdir().unwrap();
    train_small(dir.path(), "a.bin");
    let out = run(
        dir.path(),
        &[
            "train", "--data", "tiny.csv", "--out", "b.bin",
            "--epochs", "8", "--hidden", "8", "--batch-size", "4", "--test-fraction", "0.25",
        ],
    );
    assert_code(&out, 0);
    let a = std::fs::read(dir.path().join("a.bin")).unwrap();
    let b = std::fs::read(dir.path().join("b.bin")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn linear_baseline_prints_metrics_without_a_blob() {
    let dir = tempdir().unwrap();
    // 64 rows: the least-squares fit needs more rows than features.
    let out = run(
        dir.path(),
        &[
            "generate", "--side-start", "1", "--side-stop", "1.5", "--side-step", "0.5",
            "--R", "0.01", "--step", "0.25", "--out", "small.csv",
        ],
    );
    assert_code(&out, 0);
    let out = run(
        dir.path(),
        &["train", "--data", "small.csv", "--baseline", "linear", "--test-fraction", "0.25"],
    );
    assert_code(&out, 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("linear baseline"));
    assert!(text.contains("R^2"));
}

#[test]
fn missing_dataset_is_exit_2_and_divergence_is_exit_3() {
    let dir = tempdir().unwrap();
    let out = run(dir.path(), &["train", "--data", "absent.csv", "--out", "m.bin"]);
    assert_code(&out, 2);

    generate_tiny(dir.path());
    let out = run(
        dir.path(),
        &[
            "train", "--data", "tiny.csv", "--out", "m.bin",
            "--epochs", "30", "--hidden", "8", "--lr", "1e6", "--test-fraction", "0.25",
        ],
    );
    assert_code(&out, 3);
}

#[test]
fn quantize_is_idempotent_on_already_quantized_blobs() {
    let dir = tempdir().unwrap();
    train_small(dir.path(), "m.bin");
    assert_code(
        &run(dir.path(), &["quantize", "--model-in", "m.bin", "--model-out", "q.bin"]),
        0,
    );
    assert_code(
        &run(dir.path(), &["quantize", "--model-in", "q.bin", "--model-out", "q2.bin"]),
        0,
    );
    let q = std::fs::read(dir.path().join("q.bin")).unwrap();
    let q2 = std::fs::read(dir.path().join("q2.bin")).unwrap();
    assert_eq!(q, q2);
    let m = std::fs::read(dir.path().join("m.bin")).unwrap();
    assert!(q.len() < m.len());
}

#[test]
fn corrupt_blobs_are_rejected_with_exit_2() {
    let dir = tempdir().unwrap();
    std::fs::write(dir.path().join("bad.bin"), b"XXXX not a model").unwrap();
    assert_code(
        &run(dir.path(), &["quantize", "--model-in", "bad.bin", "--model-out", "q.bin"]),
        2,
    );
    assert_code(
        &run(dir.path(), &["emit-c", "--model-in", "bad.bin", "--out", "m.c"]),
        2,
    );
}

#[test]
fn emitted_c_source_reproduces_the_blob() {
    let dir = tempdir().unwrap();
    train_small(dir.path(), "m.bin");
    assert_code(
        &run(dir.path(), &["quantize", "--model-in", "m.bin", "--model-out", "q.bin"]),
        0,
    );
    assert_code(
        &run(
            dir.path(),
            &["emit-c", "--model-in", "q.bin", "--symbol", "g_m", "--out", "model.c"],
        ),
        0,
    );
    let text = std::fs::read_to_string(dir.path().join("model.c")).unwrap();
    let blob = std::fs::read(dir.path().join("q.bin")).unwrap();
    let body = text.split_once('{').unwrap().1.split_once('}').unwrap().0;
    let bytes: Vec<u8> = body
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| u8::from_str_radix(t.trim_start_matches("0x"), 16).unwrap())
        .collect();
    assert_eq!(bytes, blob);
    assert!(text.contains(&format!("g_m_len = {};", blob.len())));

    assert_code(
        &run(
            dir.path(),
            &["emit-c", "--model-in", "q.bin", "--symbol", "0bad", "--out", "x.c"],
        ),
        2,
    );
}

#[test]
fn eval_writes_a_reparseable_report() {
    let dir = tempdir().unwrap();
    train_small(dir.path(), "m.bin");
    assert_code(
        &run(dir.path(), &["quantize", "--model-in", "m.bin", "--model-out", "q.bin"]),
        0,
    );
    let out = run(
        dir.path(),
        &[
            "eval", "--models", "m.bin", "q.bin", "--data", "tiny.csv",
            "--test-fraction", "0.25", "--out", "cmp.csv", "--residuals-dir", "resid",
        ],
    );
    assert_code(&out, 0);
    let csv = std::fs::read_to_string(dir.path().join("cmp.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "model,theta0,theta1,theta2,theta3,mcu");
    // Two computed rows plus three reference rows.
    assert_eq!(lines.count(), 5);
    assert!(dir.path().join("resid/m_residuals_theta0.csv").exists());
    assert!(dir.path().join("resid/q_error_hist_theta3.csv").exists());

    let out = run(dir.path(), &["eval", "--models", "absent.bin", "--data", "tiny.csv"]);
    assert_code(&out, 2);
}

#[test]
fn infer_at_the_base_location_has_zero_exact_column() {
    let dir = tempdir().unwrap();
    train_small(dir.path(), "m.bin");
    let out = run(
        dir.path(),
        &["infer", "--model", "m.bin", "--exact", "0.5", "0.5", "1", "1", "1", "1", "0.01"],
    );
    assert_code(&out, 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for line in text.lines().skip(1) {
        let exact: f64 = line.split_whitespace().nth(2).unwrap().parse().unwrap();
        assert_eq!(exact, 0.0, "base location must need no rotation: {line}");
    }

    let out = run(
        dir.path(),
        &["infer", "--model", "m.bin", "5", "0.5", "0.5", "1", "1", "1", "0.01"],
    );
    assert_code(&out, 2); // x outside the workspace
}

#[test]
fn infer_exact_column_matches_the_hand_derivation() {
    let dir = tempdir().unwrap();
    train_small(dir.path(), "m.bin");
    let out = run(
        dir.path(),
        &["infer", "--model", "m.bin", "--exact", "0", "0", "0", "2", "2", "2", "0.01"],
    );
    assert_code(&out, 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let expected = [58.5786, 141.4214, 204.9888, 141.4214];
    for (line, e) in text.lines().skip(1).zip(expected) {
        let exact: f64 = line.split_whitespace().nth(2).unwrap().parse().unwrap();
        assert!((exact - e).abs() < 1e-4, "exact column {exact} vs {e}");
    }
}

#[test]
fn roundtrip_command_reports_and_gates() {
    let dir = tempdir().unwrap();
    let a = run(dir.path(), &["roundtrip", "--trials", "200", "--seed", "5"]);
    assert_code(&a, 0);
    let b = run(dir.path(), &["roundtrip", "--trials", "200", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);

    assert_code(&run(dir.path(), &["roundtrip", "--trials", "0"]), 2);
}
