//! End-to-end checks of the command line interface.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_two-end-lab"))
}

fn temp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("two-end-lab-cli-{name}"));
    fs::remove_dir_all(&dir).ok();
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn verify_mode_exits_zero_and_is_reproducible() {
    let dir = temp_dir("verify");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "mode=verify\nseed=7\n").unwrap();
    let out1 = dir.join("out1");
    let out2 = dir.join("out2");
    for out in [&out1, &out2] {
        let status = bin()
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .arg("--quiet")
            .status()
            .unwrap();
        assert!(status.success(), "verify run failed");
    }
    let a = fs::read(out1.join("report.json")).unwrap();
    let b = fs::read(out2.join("report.json")).unwrap();
    assert_eq!(a, b, "verify reports not byte-identical");
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("\"schema\": \"two-end-lab/1\""));
    assert!(text.contains("fermi.metric_identity"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn invalid_config_exits_two() {
    let dir = temp_dir("badcfg");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "mode=solve\nk=1.0\n").unwrap();
    let output = bin().arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("sqrt(2)"), "stderr: {err}");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn missing_arguments_exit_two() {
    let output = bin().output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn probe_mode_emits_verdict() {
    let dir = temp_dir("probe");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "mode=probe\nk_target=0.7071\ntrials=9\nout=unused\n").unwrap();
    let status = bin()
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .arg("--quiet")
        .status()
        .unwrap();
    assert!(status.success());
    let report = fs::read_to_string(dir.join("out/report.json")).unwrap();
    assert!(report.contains("no-two-end-regime"));
    assert!(report.contains("delta_obs"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn solve_mode_small_domain() {
    let dir = temp_dir("solve");
    let cfg = dir.join("run.cfg");
    fs::write(
        &cfg,
        "mode=solve\nk=2.5\ndomain_r=20\ndomain_z=20\nspacing=0.2\n",
    )
    .unwrap();
    let status = bin()
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .arg("--quiet")
        .status()
        .unwrap();
    assert!(status.success(), "solve run failed");
    let field = fs::read_to_string(dir.join("out/field.txt")).unwrap();
    assert!(field.starts_with("axi-field v1 101 101 "));
    let curve = fs::read_to_string(dir.join("out/curve.csv")).unwrap();
    assert!(curve.starts_with("r,f,fp,fpp\n"));
    let report = fs::read_to_string(dir.join("out/report.json")).unwrap();
    assert!(report.contains("\"growth_fit\""));
    assert!(report.contains("\"monotonicity\""));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn continue_mode_emits_branch_table() {
    let dir = temp_dir("continue");
    let cfg = dir.join("run.cfg");
    fs::write(
        &cfg,
        "mode=continue\nk=2.5\ndomain_r=20\ndomain_z=20\nspacing=0.2\nmax_points=3\ndirection=1\n",
    )
    .unwrap();
    let status = bin()
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .arg("--quiet")
        .status()
        .unwrap();
    assert!(status.success(), "continue run failed");
    let branch = fs::read_to_string(dir.join("out/branch.csv")).unwrap();
    assert!(branch.starts_with("s,k,c,apex_axis,apex_dist,newton_iters,residual_norm\n"));
    assert!(branch.lines().count() >= 3);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn reduced_mode_writes_csv_trajectory() {
    let dir = temp_dir("reduced");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "mode=reduced\np0=2\nslope0=0.2\nr0=1\nr_end=1000\n").unwrap();
    let status = bin()
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .arg("--quiet")
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(dir.join("out/trajectory.csv")).unwrap();
    assert!(csv.starts_with("r,p,pp,mu\n"));
    assert!(csv.lines().count() > 10);
    // effective config round-trips
    let eff = fs::read_to_string(dir.join("out/config.effective")).unwrap();
    assert!(eff.contains("mode=reduced"));
    fs::remove_dir_all(&dir).ok();
}
