//! End-to-end checks of the command-line interface: exit codes, CSV
//! artifacts, and determinism across reruns and worker counts.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_burstrelay"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("burstrelay-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const TINY_SWEEP: &str = r#"
label = "tiny"
snr_db = [2.0, 6.0]
frame_symbols = 48
max_frames = 32
master_seed = 9
min_errors = 40
max_bits = 20000

[noise]
p_bad = 0.1
memory = 20.0
power_ratio = 50.0

[[scheme]]
label = "dt"
protocol = "dt"
receiver = "map"
power_source = 1.0

[[scheme]]
label = "sdfr-genie"
protocol = "sdfr-genie"
receiver = "map"
power_source = 0.5
power_relay = 0.5
"#;

/// Strip the wall-clock column, the only nondeterministic CSV field.
fn without_seconds(csv: &str) -> String {
    csv.lines()
        .map(|line| {
            let mut parts: Vec<&str> = line.split(',').collect();
            parts.pop();
            parts.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn sweep_runs_and_is_deterministic_across_workers() {
    let config = scratch("tiny.toml");
    fs::write(&config, TINY_SWEEP).unwrap();
    let out_a = scratch("tiny-a.csv");
    let out_b = scratch("tiny-b.csv");

    let run_a = bin()
        .args(["sweep"])
        .arg(&config)
        .arg("--out")
        .arg(&out_a)
        .args(["--workers", "1"])
        .output()
        .unwrap();
    assert!(run_a.status.success(), "{}", stderr_of(&run_a));

    let run_b = bin()
        .args(["sweep"])
        .arg(&config)
        .arg("--out")
        .arg(&out_b)
        .args(["--workers", "3"])
        .output()
        .unwrap();
    assert!(run_b.status.success(), "{}", stderr_of(&run_b));

    let a = fs::read_to_string(&out_a).unwrap();
    let b = fs::read_to_string(&out_b).unwrap();
    assert_eq!(without_seconds(&a), without_seconds(&b));

    let mut lines = a.lines();
    assert_eq!(
        lines.next().unwrap(),
        "snr_db,protocol,receiver,bits,errors,ber,stderr,seconds"
    );
    assert_eq!(lines.count(), 4, "2 schemes x 2 SNR points");
    assert!(a.contains("sdfr-genie,map"));
}

#[test]
fn seed_flag_changes_the_realization() {
    let config = scratch("tiny-seed.toml");
    fs::write(&config, TINY_SWEEP).unwrap();
    let out_a = scratch("seed-a.csv");
    let out_b = scratch("seed-b.csv");
    for (out, seed) in [(&out_a, "9"), (&out_b, "10")] {
        let run = bin()
            .args(["sweep"])
            .arg(&config)
            .arg("--out")
            .arg(out)
            .args(["--seed", seed])
            .output()
            .unwrap();
        assert!(run.status.success(), "{}", stderr_of(&run));
    }
    let a = fs::read_to_string(&out_a).unwrap();
    let b = fs::read_to_string(&out_b).unwrap();
    assert_ne!(
        without_seconds(&a),
        without_seconds(&b),
        "different seeds must give different realizations"
    );
}

#[test]
fn coded_figures_are_config_errors() {
    for id in ["fig6", "fig7", "fig9", "fig10"] {
        let out = bin().args(["figure", id]).output().unwrap();
        assert_eq!(out.status.code(), Some(1), "{id}");
        assert!(stderr_of(&out).contains("out of scope"), "{id}");
    }
    let out = bin().args(["figure", "fig1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_config_is_a_runtime_error() {
    let out = bin()
        .args(["sweep", "/nonexistent/nowhere.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_config_is_a_config_error() {
    let config = scratch("bad.toml");
    fs::write(
        &config,
        TINY_SWEEP.replace("\"dt\"\nreceiver", "\"warp\"\nreceiver"),
    )
    .unwrap();
    let out = bin().args(["sweep"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("unknown protocol"));
}

#[test]
fn analytic_emits_monotone_curves() {
    let out_path = scratch("fig3-analytic.csv");
    let out = bin()
        .args(["analytic", "fig3", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = fs::read_to_string(&out_path).unwrap();
    let mut dt = Vec::new();
    let mut lower = Vec::new();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let v: f64 = f[2].parse().unwrap();
        match f[1] {
            "dt-ber" => dt.push(v),
            "sdfr-lower-ber" => lower.push(v),
            other => panic!("unexpected curve {other}"),
        }
    }
    assert_eq!(dt.len(), 16);
    assert_eq!(lower.len(), 16);
    for w in dt.windows(2) {
        assert!(w[1] < w[0], "dt curve must decrease with SNR");
    }
    for (d, l) in dt.iter().zip(&lower) {
        assert!(l < d, "cooperative bound must beat direct transmission");
    }
}

#[test]
fn oracle_subcommand_passes() {
    let out = bin()
        .args(["oracle", "--frames", "25", "--seed", "4"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS"), "{text}");
}
