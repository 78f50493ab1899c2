use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
    dir: TempDir,
}

impl Run {
    fn file(&self, name: &str) -> String {
        fs::read_to_string(self.dir.path().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn run(cmd: &str, config: &str, extra: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    fs::write(&cfg, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_tunnelwell"))
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .args(extra)
        .current_dir(dir.path())
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        dir,
    }
}

/// Data rows as maps from column name to value.
fn rows(csv: &str) -> Vec<Vec<(String, String)>> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#') && !l.is_empty());
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    lines
        .map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect())
        .collect()
}

fn num(row: &[(String, String)], key: &str) -> f64 {
    row.iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("no column {key}"))
        .1
        .parse()
        .unwrap()
}

fn text<'a>(row: &'a [(String, String)], key: &str) -> &'a str {
    &row.iter().find(|(k, _)| k == key).unwrap().1
}

const QUARTIC_SYM: &str = r#"{"potential": {"kind": "quartic", "v0": 2.0, "eta": 0.0}}"#;

#[test]
fn characterize_symmetric_quartic() {
    let r = run("characterize", QUARTIC_SYM, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let row = &rows(&r.stdout)[0];
    assert!((num(row, "a_L") + 4.0).abs() < 1e-10);
    assert!((num(row, "a_R") - 4.0).abs() < 1e-10);
    assert!((num(row, "omega_L") - 1.0).abs() < 1e-12);
    assert!((num(row, "omega_R") - 1.0).abs() < 1e-12);
    assert_eq!(text(row, "flag"), "ok");
}

#[test]
fn characterize_biased_quartic() {
    let r = run(
        "characterize",
        r#"{"potential": {"kind": "quartic", "v0": 2.0, "eta": 0.5}}"#,
        &[],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let row = &rows(&r.stdout)[0];
    // Roots of 4u³ − 4u − 0.5 by bisection.
    let f = |u: f64| 4.0 * u * u * u - 4.0 * u - 0.5;
    let bis = |mut lo: f64, mut hi: f64| {
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if (f(m) > 0.0) == (f(lo) > 0.0) {
                lo = m
            } else {
                hi = m
            }
        }
        lo
    };
    let k = 1.0 / 3f64.sqrt();
    assert!((num(row, "a_L") / 4.0 - bis(-2.0, -k)).abs() < 1e-9);
    assert!((num(row, "a_C") / 4.0 - bis(-k, k)).abs() < 1e-9);
    assert!((num(row, "a_R") / 4.0 - bis(k, 2.0)).abs() < 1e-9);
    assert_eq!(text(row, "flag"), "resonance");
}

#[test]
fn malformed_config_names_key() {
    let r = run(
        "characterize",
        r#"{"potential": {"kind": "quartic", "v0": 2.0, "etaa": 0.1}}"#,
        &[],
    );
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("etaa"), "{}", r.stderr);
    let r = run("characterize", r#"{"potential": {"kind": "quartic"}}"#, &[]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("v0"), "{}", r.stderr);
    let r = run("characterize", "{not json", &[]);
    assert_eq!(r.code, 3);
}

#[test]
fn missing_config_file_is_config_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_tunnelwell"))
        .args(["amplitude", "--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn not_double_well_is_geometry_error() {
    let cfg = r#"{"potential": {"kind": "expr", "expr": "x^2", "window": [-5, 5]}}"#;
    let r = run("characterize", cfg, &[]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    let cfg = r#"{"potential": {"kind": "expr", "expr": "x^2 + k", "window": [-5, 5]}}"#;
    let r = run("characterize", cfg, &[]);
    assert_eq!(r.code, 3, "{}", r.stderr);
}

#[test]
fn amplitude_closed_forms() {
    let r = run(
        "amplitude",
        r#"{"potential": {"kind": "parabolic", "v0": 1.0, "eta": 0.0}}"#,
        &[],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!((num(&rows(&r.stdout)[0], "nu") - 0.10798).abs() < 1e-5);

    let r = run("amplitude", QUARTIC_SYM, &[]);
    let row = &rows(&r.stdout)[0];
    assert!((num(row, "nu") - 1.0521e-4).abs() < 1e-8);
    assert_eq!(num(row, "A"), 1.0);
    assert!((num(row, "C_L") - 2f64.ln()).abs() < 1e-9);

    let r0 = run(
        "amplitude",
        r#"{"potential": {"kind": "parabolic", "v0": 2.0, "eta": 0.0}}"#,
        &[],
    );
    let r1 = run(
        "amplitude",
        r#"{"potential": {"kind": "parabolic", "v0": 2.0, "eta": 0.2}}"#,
        &[],
    );
    let ratio = num(&rows(&r1.stdout)[0], "nu") / num(&rows(&r0.stdout)[0], "nu");
    assert!((ratio - 0.6417).abs() < 1e-4);
    assert!(text(&rows(&r1.stdout)[0], "warnings").contains("cusp"));
}

#[test]
fn amplitude_resonance_exit_code() {
    let r = run(
        "amplitude",
        r#"{"potential": {"kind": "quartic", "v0": 2.0, "eta": 0.5}}"#,
        &[],
    );
    assert_eq!(r.code, 4, "{}", r.stderr);
    let r = run(
        "amplitude",
        r#"{"potential": {"kind": "quartic", "v0": 2.0, "eta": 1.6}}"#,
        &[],
    );
    assert_eq!(r.code, 2, "{}", r.stderr);
}

#[test]
fn quartic_sweep_truncates_at_resonance() {
    let cfg = r#"{
        "potential": {"kind": "quartic", "v0": 2.0},
        "command": {"sweep": {"eta": {"min": 0.0, "max": 1.0, "step": 0.01}, "v0": [1.0, 2.0, 4.0]}},
        "output": {"prefix": "out/q"}
    }"#;
    let r = run("sweep", cfg, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut ends = Vec::new();
    for v0 in ["1", "2", "4"] {
        let rs = rows(&r.file(&format!("out/q_sweep_v0_{v0}.csv")));
        let last = rs.last().unwrap();
        assert_eq!(text(last, "flag"), "resonance");
        assert!(rs[..rs.len() - 1].iter().all(|row| text(row, "flag") != "resonance"));
        assert_eq!(num(&rs[0], "nu_ratio"), 1.0);
        let etas: Vec<f64> = rs.iter().map(|row| num(row, "eta")).collect();
        assert!(etas.windows(2).all(|w| w[1] > w[0]));
        ends.push(num(last, "eta"));
    }
    assert!(ends[0] > ends[1] && ends[1] > ends[2], "{ends:?}");
}

#[test]
fn parabolic_sweep_softening_and_hardening() {
    let cfg = r#"{
        "potential": {"kind": "parabolic", "v0": 2.0},
        "command": {"sweep": {"eta": {"min": -0.5, "max": 0.5, "step": 0.05}}}
    }"#;
    let r = run("sweep", cfg, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rs = rows(&r.stdout);
    for row in &rs {
        let (eta, ratio) = (num(row, "eta"), num(row, "nu_ratio"));
        if eta < -1e-12 {
            assert!(ratio > 1.0);
        } else if eta > 1e-12 {
            assert!(ratio < 1.0);
        }
    }
    let ratios: Vec<f64> = rs.iter().map(|row| num(row, "nu_ratio")).collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn sweep_range_errors() {
    let cfg = r#"{
        "potential": {"kind": "parabolic", "v0": 2.0},
        "command": {"sweep": {"eta": {"min": 0.1, "max": 0.1, "step": 0.05}}}
    }"#;
    assert_eq!(run("sweep", cfg, &[]).code, 3);
    assert_eq!(run("sweep", QUARTIC_SYM, &[]).code, 3);
}

#[test]
fn expression_sweep() {
    let cfg = r#"{
        "potential": {"kind": "expr", "expr": "V0*(((x/a)^2-1)^2 - 1 - b*x/a)",
                      "params": {"V0": 2, "a": 4, "b": 0}, "window": [-12, 12]},
        "command": {"sweep": {"eta": {"min": 0.0, "max": 0.1, "step": 0.05}, "param": "b"}}
    }"#;
    let r = run("sweep", cfg, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rs = rows(&r.stdout);
    assert_eq!(rs.len(), 3);
    assert!((num(&rs[0], "nu_ratio") - 1.0).abs() < 1e-12);
    assert!(num(&rs[2], "nu_ratio") < 1.0);
}

#[test]
fn exact_compare_table() {
    let cfg = r#"{
        "potential": {"kind": "parabolic", "v0": 1.0, "eta": 0.0},
        "command": {"exact_compare": {"v0": {"min": 1.0, "max": 2.0, "step": 0.5}}}
    }"#;
    let r = run("exact-compare", cfg, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rs = rows(&r.stdout);
    assert_eq!(rs.len(), 3);
    for row in &rs {
        assert_eq!(text(row, "converged"), "true");
        assert!(num(row, "rel_diff") < 0.02);
    }
    assert_eq!(run("exact-compare", QUARTIC_SYM, &[]).code, 3);
}

#[test]
fn zeno_defaults() {
    let r = run("zeno", QUARTIC_SYM, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rs = rows(&r.stdout);
    assert_eq!(rs.len(), 1001);
    assert_eq!(num(&rs[0], "t"), 0.0);
    assert_eq!(num(&rs[0], "P_L_schedule"), 1.0);
    assert!(rs.iter().all(|row| num(row, "P_L_schedule") >= num(row, "P_L_const")));
    assert!(!r.stdout.contains("warning: switching interval"));
}

#[test]
fn zeno_without_suppression() {
    let cfg = r#"{
        "potential": {"kind": "quartic", "v0": 2.0},
        "command": {"zeno": {"nu1_over_nu0": 1.0, "samples": 50}}
    }"#;
    let r = run("zeno", cfg, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    for row in rows(&r.stdout) {
        assert_eq!(text(&row, "P_L_schedule"), text(&row, "P_L_const"));
    }
    let bad = r#"{"potential": {"kind": "quartic", "v0": 2.0}, "command": {"zeno": {"nu1_over_nu0": 2.0}}}"#;
    assert_eq!(run("zeno", bad, &[]).code, 3);
}

#[test]
fn zeno_adiabaticity_warning() {
    let cfg = r#"{
        "potential": {"kind": "quartic", "v0": 2.0},
        "command": {"zeno": {"nu0": 1.0, "samples": 10}}
    }"#;
    let r = run("zeno", cfg, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("# warning: switching interval"), "{}", r.stdout);
}

#[test]
fn metadata_and_plot_scripts() {
    let cfg = r#"{"potential": {"kind": "quartic", "v0": 2.0, "eta": 0.1}, "output": {"prefix": "res/run"}}"#;
    let r = run("amplitude", cfg, &["--plot"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let csv = r.file("res/run_amplitude.csv");
    assert!(csv.starts_with("# tunnelwell amplitude\n# config_sha256: "));
    assert!(csv.contains("# units: hbar = m = omega = 1"));
    assert!(!csv.contains('\r'));
    // Amplitude has no plot; sweeps do.
    assert!(!r.path("res/run_amplitude.gp").exists());

    let cfg = r#"{"potential": {"kind": "quartic", "v0": 2.0},
                  "command": {"sweep": {"eta": {"min": 0, "max": 0.1, "step": 0.05}}}}"#;
    let r = run("sweep", cfg, &["--plot", "--out", "p/x"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let gp = r.file("p/x_sweep.gp");
    assert!(gp.contains("'x_sweep.csv' using 1:2"));
    let r = run("sweep", cfg, &["--plot"]);
    assert_eq!(r.code, 3);
}

#[test]
fn config_hash_tracks_bytes() {
    let a = run("characterize", QUARTIC_SYM, &[]);
    let b = run("characterize", &format!("{QUARTIC_SYM} "), &[]);
    let hash = |s: &str| s.lines().nth(1).unwrap().to_string();
    assert_ne!(hash(&a.stdout), hash(&b.stdout));
    let rest = |s: &str| s.lines().skip(2).collect::<Vec<_>>().join("\n");
    assert_eq!(rest(&a.stdout), rest(&b.stdout));
    assert!(Path::new(env!("CARGO_BIN_EXE_tunnelwell")).exists());
}
