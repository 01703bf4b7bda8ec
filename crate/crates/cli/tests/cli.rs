use std::path::Path;
use std::process::{Command, Output};

fn vbsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vbsim")).args(args).output().expect("binary runs")
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn surface_anchor_rows() {
    let out = vbsim(&["surface", "--theta-steps", "9", "--m-steps", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("theta_deg,mean_photons,p_coherent,p_poisson\n"));
    assert!(!text.contains('\r'));
    let r = rows(&text);
    let at = |deg: f64| r.iter().find(|x| x[0] == deg && x[1] > 1.0).unwrap().clone();
    assert!((at(0.0)[2] - 0.85).abs() < 1e-12 && (at(0.0)[3] - 0.85).abs() < 1e-12);
    assert!((at(45.0)[2] - 0.9775).abs() < 1e-12);
    assert!((at(45.0)[3] - 0.681_46).abs() < 1e-5);
    assert!(at(135.0)[2].abs() < 1e-12);
    assert!((at(135.0)[3] - at(45.0)[3]).abs() < 1e-12);
}

#[test]
fn curves_defaults() {
    let out = vbsim(&["curves", "--theta-steps", "5"]);
    assert!(out.status.success());
    let r = rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(r.len(), 9 * 5);
    for row in r.iter().filter(|x| x[1] == 90.0) {
        assert!((row[2] - 0.85).abs() < 1e-12);
    }
    let chi0_at_90 = r.iter().find(|x| x[1] == 0.0 && x[0] == 90.0).unwrap();
    assert!((chi0_at_90[2] - 0.85).abs() < 1e-12);
    // the Poisson column ignores χ
    for row in &r {
        let same_theta = r.iter().find(|x| x[0] == row[0] && x[1] == 0.0).unwrap();
        assert_eq!(row[3], same_theta[3]);
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("e.csv");
    let cfg = write(
        dir.path(),
        "run.cfg",
        &format!("# poisson run\nsource = poisson\ntrials = 2000\nseed = 4\ntheta_steps = 9\nout = {}\n", out_path.display()),
    );
    assert!(vbsim(&["experiment", "--config", &cfg]).status.success());
    let from_file = std::fs::read_to_string(&out_path).unwrap();
    assert!(rows(&from_file).iter().all(|r| r[1] == 2000.0));

    assert!(vbsim(&["experiment", "--config", &cfg, "--trials", "3000"]).status.success());
    let overridden = std::fs::read_to_string(&out_path).unwrap();
    assert!(rows(&overridden).iter().all(|r| r[1] == 3000.0));
}

#[test]
fn config_errors_exit_2_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "trials = 10\n\nwavelength = 3\n");
    let out = vbsim(&["experiment", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.cfg:3"));

    let cfg = write(dir.path(), "bad2.cfg", "trials = 10\neta = 1.5\n");
    assert_eq!(vbsim(&["experiment", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(vbsim(&["experiment"]).status.code(), Some(2));
    assert_eq!(vbsim(&["surface", "--theta-steps", "1"]).status.code(), Some(2));
    assert_eq!(vbsim(&["curves", "--p-star", "1.0"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let out = vbsim(&["surface", "--theta-steps", "3", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(3));
    let out = vbsim(&["experiment", "--config", "/nonexistent-dir/x.cfg"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn narrow_sweep_cannot_be_classified() {
    let out = vbsim(&["experiment", "--trials", "1000", "--theta-min", "90", "--theta-max", "180", "--theta-steps", "7"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().starts_with("# verdict=none"));
}

#[test]
fn verify_passes_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    let out = vbsim(&["verify", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(!stdout.contains("FAIL"));
    let csv = std::fs::read_to_string(path).unwrap();
    assert!(csv.starts_with("check,value,bound,passed\n"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}
