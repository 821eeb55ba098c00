//! End-to-end tests of the binary: every invocation goes through argv,
//! files on disk, and exit codes, exactly as a user would drive it.

use std::path::Path;
use std::process::{Command, Output};

fn graphfb(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphfb"))
        .args(args)
        .env("GRAPHFB_CACHE_DIR", dir.join("cache"))
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn assert_ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stdout: {} stderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read_signal(path: &Path) -> Vec<f64> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.trim().parse::<f64>().unwrap())
        .collect()
}

#[test]
fn decompose_reconstruct_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let out = graphfb(
        d,
        &[
            "gen-graph", "--graph", "sensor", "--n", "64", "--seed", "1", "--out", "g.txt",
        ],
    );
    assert!(assert_ok(&out).contains("n=64"));

    let out = graphfb(
        d,
        &[
            "gen-signal",
            "--graph-file",
            "g.txt",
            "--signal",
            "smooth",
            "--out",
            "f.csv",
            "--spectrum-out",
            "spec.csv",
        ],
    );
    assert_ok(&out);
    let spectrum = std::fs::read_to_string(d.join("spec.csv")).unwrap();
    assert!(spectrum.starts_with("i,lambda,value"));

    let out = graphfb(
        d,
        &[
            "decompose",
            "--graph-file",
            "g.txt",
            "--signal",
            "f.csv",
            "--design",
            "cdf97",
            "--levels",
            "3",
            "--out",
            "pyr.json",
        ],
    );
    assert!(assert_ok(&out).contains("coefficients=64"));

    let out = graphfb(
        d,
        &[
            "reconstruct",
            "--graph-file",
            "g.txt",
            "--pyramid",
            "pyr.json",
            "--design",
            "cdf97",
            "--out",
            "rec.csv",
        ],
    );
    assert_ok(&out);

    let original = read_signal(&d.join("f.csv"));
    let rebuilt = read_signal(&d.join("rec.csv"));
    assert_eq!(original.len(), rebuilt.len());
    let scale = original.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in original.iter().zip(rebuilt.iter()) {
        assert!((a - b).abs() <= 1e-9 * scale, "{a} vs {b}");
    }
}

#[test]
fn generated_artifacts_are_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for name in ["a.txt", "b.txt"] {
        assert_ok(&graphfb(
            d,
            &[
                "gen-graph", "--graph", "community", "--n", "64", "--seed", "9", "--out", name,
            ],
        ));
    }
    let a = std::fs::read(d.join("a.txt")).unwrap();
    let b = std::fs::read(d.join("b.txt")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn verify_commands_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = graphfb(d, &["verify-pr", "--design", "meyer", "--n", "64"]);
    let text = assert_ok(&out);
    assert!(text.contains("identity residual"), "{text}");

    let out = graphfb(
        d,
        &["verify-theorem2", "--n", "16", "--graphs", "3", "--seed", "1"],
    );
    assert!(assert_ok(&out).contains("downsample deviation"));

    let out = graphfb(
        d,
        &["verify-theorem3", "--n", "12", "--design", "cdf97", "--seed", "2"],
    );
    assert!(assert_ok(&out).contains("transfer residual"));
}

#[test]
fn denoise_writes_runs_plus_mean_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = [
        "denoise", "--graph", "sensor", "--n", "32", "--sigma", "0.25", "--design", "cdf97",
        "--laplacian", "combinatorial", "--runs", "5", "--seed", "1", "--out", "report.csv",
    ];
    let first = assert_ok(&graphfb(d, &args));
    let report1 = std::fs::read_to_string(d.join("report.csv")).unwrap();
    let second = assert_ok(&graphfb(d, &args));
    let report2 = std::fs::read_to_string(d.join("report.csv")).unwrap();
    assert_eq!(report1, report2);
    assert_eq!(first, second);

    let lines: Vec<&str> = report1.lines().collect();
    assert_eq!(lines[0], "method,protocol,parameter,run,snr_db");
    assert_eq!(lines.len(), 7, "5 runs + header + mean row");
    assert!(lines[6].contains("mean"));
    assert!(first.contains("mean snr"));
}

#[test]
fn nla_takes_a_fraction_list() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = graphfb(
        d,
        &[
            "nla", "--graph", "sensor", "--n", "32", "--fractions", "0.1,0.25,0.5", "--design",
            "meyer", "--levels", "2", "--out", "nla.json",
        ],
    );
    let text = assert_ok(&out);
    assert!(text.contains("0.25"), "{text}");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("nla.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 3);
}

#[test]
fn filter_dump_and_passband_compare() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = graphfb(
        d,
        &["filter-dump", "--design", "ideal", "--n", "8", "--out", "filters.csv"],
    );
    assert_ok(&out);
    let text = std::fs::read_to_string(d.join("filters.csv")).unwrap();
    assert!(text.starts_with("i,h0,h1,g0,g1"));
    assert_eq!(text.lines().count(), 9);

    let out = graphfb(
        d,
        &[
            "passband-compare", "--graph", "sensor-concentrated", "--n", "64", "--runs", "5",
            "--seed", "3", "--out", "pb.csv",
        ],
    );
    let text = assert_ok(&out);
    assert!(text.contains("mean distance"));
    let csv = std::fs::read_to_string(d.join("pb.csv")).unwrap();
    assert_eq!(csv.lines().count(), 16, "header + 5 runs x 3 designs");
}

#[test]
fn errors_are_machine_readable_json_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // odd length rejects the design
    let out = graphfb(d, &["verify-pr", "--design", "meyer", "--n", "63"]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let json: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(json["error"]["kind"], "odd_length");

    // missing graph file
    let out = graphfb(
        d,
        &[
            "decompose", "--graph-file", "missing.txt", "--signal", "f.csv", "--design", "ideal",
            "--out", "p.json",
        ],
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let json: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(json["error"]["kind"], "io");

    // malformed edge list carries the line number
    std::fs::write(d.join("bad.txt"), "n 3\n0 1 1.0\n0 1 2.0\n").unwrap();
    let out = graphfb(
        d,
        &[
            "gen-signal", "--graph-file", "bad.txt", "--signal", "smooth", "--out", "f.csv",
        ],
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let json: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(json["error"]["kind"], "parse");
    assert!(json["error"]["message"]
        .as_str()
        .unwrap()
        .contains("line 3"));
}

#[test]
fn basis_cache_is_reused_and_can_be_disabled() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_ok(&graphfb(
        d,
        &[
            "gen-graph", "--graph", "sensor", "--n", "32", "--seed", "4", "--out", "g.txt",
        ],
    ));
    let args = [
        "gen-signal", "--graph-file", "g.txt", "--signal", "smooth", "--out", "f.csv",
    ];
    assert_ok(&graphfb(d, &args));
    let cache = d.join("cache");
    let entries = std::fs::read_dir(&cache).unwrap().count();
    assert_eq!(entries, 1, "one basis cached");
    // reuse does not add entries, and output stays identical
    let before = std::fs::read_to_string(d.join("f.csv")).unwrap();
    assert_ok(&graphfb(d, &args));
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    assert_eq!(before, std::fs::read_to_string(d.join("f.csv")).unwrap());

    // --no-cache leaves the directory untouched
    let mut no_cache = args.to_vec();
    no_cache.push("--no-cache");
    assert_ok(&graphfb(d, &no_cache));
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    assert_eq!(before, std::fs::read_to_string(d.join("f.csv")).unwrap());
}
