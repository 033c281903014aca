use std::process::{Command, Output};

fn morphogen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morphogen"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn manifest_lists_one_seed_per_repeat() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e1");
    let status = morphogen(&[
        "exp1",
        "--repeats",
        "20",
        "--seed",
        "42",
        "--generations",
        "5",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let seeds = manifest["seeds"].as_array().unwrap();
    assert_eq!(seeds.len(), 20);
    assert_eq!(seeds[0].as_u64(), Some(morphogen_core::derive_seed(42, 0)));
    assert_eq!(manifest["base_seed"], 42);
    for f in ["curves.csv", "thresholds.csv", "ttests.csv", "bands.csv"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let curves = std::fs::read_to_string(out.join("curves.csv")).unwrap();
    // 4 variants x 20 repeats x 5 generations plus header
    assert_eq!(curves.lines().count(), 4 * 20 * 5 + 1);
    assert!(!curves.contains('\r'));
}

#[test]
fn out_of_range_mutation_prob_is_rejected() {
    let out = morphogen(&["exp1", "--mutation-prob", "1.5"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("mutation_prob"));
}

#[test]
fn unknown_flag_and_subcommand_fail_with_usage() {
    for args in [&["exp1", "--bogus"][..], &["exp9"][..]] {
        let out = morphogen(args);
        assert!(!out.status.success());
        assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    }
}

#[test]
fn selftest_exits_zero() {
    let out = morphogen(&["selftest"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "repeats = 2\ngenerations = 7\nseed = 9\ncompetency = \"fixed:20\"\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let status = morphogen(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--generations",
        "3",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let curves = std::fs::read_to_string(out.join("curves.csv")).unwrap();
    assert_eq!(curves.lines().count(), 2 * 3 + 1);
    assert!(curves.lines().nth(1).unwrap().starts_with("run,run,0,0,"));
}

#[test]
fn bad_config_key_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "mutation-rate = 0.3\n").unwrap();
    let out = morphogen(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("mutation-rate"));
}

#[test]
fn sweep_grid_point_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sw");
    let status = morphogen(&[
        "sweep",
        "--grid",
        "3x2",
        "--repeats",
        "1",
        "--generations",
        "20",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let grid = std::fs::read_to_string(out.join("sweep_grid.csv")).unwrap();
    assert_eq!(grid.lines().count(), 3 * 2 + 1);
}
