use std::fs;
use std::process::Command;

fn retsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_retsim"))
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn missing_physics_parameters_exit_with_parse_status() {
    let out = retsim().args(["sweep", "--dE", "800"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eta_d"));
}

#[test]
fn malformed_number_names_the_key() {
    let out = retsim().args(["populate", "--preset", "case1", "--dE", "4oo"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`dE`"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "preset = case1\ndE = 800\nwavelength = 3\n").unwrap();
    let out = retsim().args(["sweep", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wavelength"));
}

#[test]
fn zero_coupling_gives_flat_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out = retsim()
        .args(["populate", "--preset", "case2", "--dE", "800", "--j0", "0", "--r", "0.3"])
        .args(["--t-max", "50", "--report-dt", "5", "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for m in ["CRET", "FRET"] {
        let text = fs::read_to_string(dir.path().join(format!("pop_{m}_dE800_r0.3.csv"))).unwrap();
        assert!(text.starts_with("# preset=case2"));
        let rows = data_lines(&text);
        assert_eq!(rows[0], "t_fs,P_D,P_A,coh_re,coh_im,converged");
        assert_eq!(rows.len(), 12);
        for row in &rows[1..] {
            let f: Vec<&str> = row.split(',').collect();
            assert_eq!(f[1].parse::<f64>().unwrap(), 1.0, "{m}: {row}");
        }
    }
}

#[test]
fn strict_mode_flags_unfinished_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let out = retsim()
        .args(["sweep", "--preset", "case1", "--dE", "800", "--r", "0.5", "--methods", "fret"])
        .args(["--t-max", "20", "--t-cap", "40", "--set", "memory=200", "--strict"])
        .args(["--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("sweep_dE800.csv")).unwrap();
    let rows = data_lines(&text);
    assert_eq!(rows[0], "R_over_R0,k_eff_FRET,k_eff_FRET_r6");
    assert_eq!(rows[1], "0.5,NaN,NaN");
}

#[test]
fn fig3_mode_adds_exponential_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = retsim()
        .args(["populate", "--preset", "case1", "--dE", "400", "--r", "0.2", "--methods", "fret", "--fig3"])
        .args(["--t-max", "200", "--report-dt", "1", "--set", "memory=400"])
        .args(["--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("pop_FRET_dE400_r0.2.csv")).unwrap();
    let rows = data_lines(&text);
    assert_eq!(rows[0], "t_fs,P_D,P_A,coh_re,coh_im,converged,P_D_exp,P_A_exp");
    let first: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(first[6], "1");
    // the exponential reaches the same plateau as the trajectory
    let last: Vec<f64> = rows.last().unwrap().split(',').filter_map(|s| s.parse().ok()).collect();
    assert!((last[1] - last[3]).abs() < 0.05, "{last:?}");
}

#[test]
fn bath_probe_writes_lineshapes_and_spectra() {
    let dir = tempfile::tempdir().unwrap();
    let out = retsim()
        .args(["bath-probe", "--preset", "case1", "--dE", "800", "--set", "memory=500"])
        .args(["--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["g_D.csv", "g_A.csv", "emission_dE800.csv", "absorption.csv"] {
        let text = fs::read_to_string(dir.path().join(f)).unwrap();
        assert!(text.starts_with("# preset=case1"), "{f}");
        assert!(data_lines(&text).len() > 100, "{f}");
    }
}
