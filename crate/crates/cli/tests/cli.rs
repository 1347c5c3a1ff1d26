use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use hamrecon_cli::config::GridSpec;
use hamrecon_cli::{experiments, exit_code, Cli, RunConfig};

fn hamrecon(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamrecon")).args(args).arg("--out").arg(out).output().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn every_command_is_registered() {
    let names = experiments().names();
    for cmd in ["ground", "entropy-profile", "xvbs-entropy", "fluct-scan", "qcm", "bw-fit"] {
        assert!(names.contains(&cmd));
    }
}

#[test]
fn grid_spec_includes_endpoint() {
    let g = GridSpec { min: 0.05, max: 0.85, step: 0.02 };
    assert_eq!(g.points(), 41);
    assert!((g.values()[40] - 0.85).abs() <= 1e-12);
}

#[test]
fn config_errors_are_rejected_before_running() {
    let bad: [&[&str]; 7] = [
        &["hamrecon", "qcm", "--length", "12"],
        &["hamrecon", "xvbs-entropy", "--length", "14"],
        &["hamrecon", "entropy-profile", "--length", "9"],
        &["hamrecon", "entropy-profile", "--length", "4", "--cut", "4"],
        &["hamrecon", "bw-fit", "--length", "3", "--subsystem", "3"],
        &["hamrecon", "fluct-scan", "--theta-step", "0"],
        &["hamrecon", "bw-fit", "--beta-min", "0"],
    ];
    for args in bad {
        let err = hamrecon_cli::run(Cli::parse_from(args)).unwrap_err();
        assert_eq!(exit_code(&err), 2, "{args:?}: {err}");
    }
}

#[test]
fn exit_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = hamrecon(&["no-such-command"], dir.path());
    assert_eq!(unknown.status.code(), Some(2));
    let bad_flag = hamrecon(&["qcm", "--weight-convention", "linear"], dir.path());
    assert_eq!(bad_flag.status.code(), Some(2));
    let unconverged = hamrecon(&["ground", "--length", "3", "--tol", "1e-30"], dir.path());
    assert_eq!(unconverged.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&unconverged.stderr).contains("did not converge"));
}

#[test]
fn xvbs_entropy_fifteen_sites() {
    let dir = tempfile::tempdir().unwrap();
    assert!(hamrecon(&["xvbs-entropy", "--length", "15"], dir.path()).status.success());
    let csv = std::fs::read_to_string(dir.path().join("xvbs_entropy.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 15);
    assert!(lines[0].starts_with("cut,transfer_matrix,exact_formula,symmetrized_formula"));
    let summary = json(&dir.path().join("xvbs_entropy.json"));
    assert_eq!(summary["exact_agrees"], true);
    assert!(dir.path().join("xvbs_entropy.csv.manifest.json").exists());
}

#[test]
fn qcm_at_projector_angle() {
    let dir = tempfile::tempdir().unwrap();
    assert!(hamrecon(&["qcm", "--theta0", "0.588", "--length", "6"], dir.path()).status.success());
    let summary = json(&dir.path().join("qcm.json"));
    assert!((summary["theta_hat"].as_f64().unwrap() - 0.588).abs() <= 1e-6);
    let manifest = json(&dir.path().join("qcm.json.manifest.json"));
    assert_eq!(manifest["config"]["length"], 6);
    assert_eq!(manifest["library_version"], env!("CARGO_PKG_VERSION"));
    let bytes = std::fs::read(dir.path().join("qcm.json")).unwrap();
    use sha2::Digest;
    assert_eq!(manifest["sha256"], hex::encode(sha2::Sha256::digest(bytes)));
}

#[test]
fn single_bond_scan_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    assert!(hamrecon(&["fluct-scan", "--theta0", "0.45", "--length", "2"], dir.path()).status.success());
    let summary = json(&dir.path().join("fluct_scan.json"));
    assert!(summary["variance_at_theta0"].as_f64().unwrap() <= 1e-20);
    assert!(summary["min_variance"].as_f64().unwrap() <= 1e-20);
    assert_eq!(summary["identifiable"], false);
}

#[test]
fn state_file_reuse() {
    let dir = tempfile::tempdir().unwrap();
    assert!(hamrecon(&["ground", "--length", "5", "--theta0", "0.3"], dir.path()).status.success());
    let state = dir.path().join("ground.bin");
    let from_file = tempfile::tempdir().unwrap();
    let args = ["entropy-profile", "--length", "5", "--theta0", "0.3", "--state", state.to_str().unwrap()];
    assert!(hamrecon(&args, from_file.path()).status.success());
    let fresh = tempfile::tempdir().unwrap();
    assert!(hamrecon(&args[..5], fresh.path()).status.success());
    assert_eq!(
        std::fs::read(from_file.path().join("entropy_profile.csv")).unwrap(),
        std::fs::read(fresh.path().join("entropy_profile.csv")).unwrap()
    );
    let mismatch = hamrecon(&["qcm", "--length", "5", "--theta0", "0.31", "--state", state.to_str().unwrap()], dir.path());
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn resolved_config_uses_command_defaults() {
    let cli = Cli::parse_from(["hamrecon", "bw-fit", "--joint-beta", "false"]);
    let cfg = RunConfig::from_cli(cli, experiments().get("bw-fit").unwrap().default_length());
    assert_eq!((cfg.length, cfg.subsystem, cfg.joint_beta), (7, 3, false));
    let opts = cfg.fit_options();
    assert_eq!((opts.theta_points, opts.beta_points), (41, 25));
}
