use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_qsatom");

fn config_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const SCALARS: &str = r#""mode": "scalars",
  "scalars": {"delta0_plus": -0.03, "delta0_minus": 0.13, "norm2_pg_plus": 0.005,
              "norm2_pg_minus": 0.005, "norm2_pdg": 0.02, "eps_r": -0.001}"#;

#[test]
fn xsection_plateau_and_byte_stability() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        &dir,
        "c.json",
        &format!(r#"{{ {SCALARS}, "eta2": [10, 40], "ztilde": [-10000, 10000] }}"#),
    );
    let out = dir.path().join("o.csv");
    let a = run(&[
        "xsection",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--threads",
        "3",
    ]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let first = std::fs::read_to_string(&out).unwrap();
    let b = run(&["xsection", "--config", &cfg, "--threads", "1"]);
    assert_eq!(String::from_utf8(b.stdout).unwrap(), first);

    let rows: Vec<Vec<f64>> = first
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert!((r[2] - 0.0218).abs() < 5e-4);
    }
}

#[test]
fn spectrum_json_with_reference_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        &dir,
        "c.json",
        r#"{ "mode": "scalars",
             "scalars": {"delta0_plus": 0, "delta0_minus": 0, "norm2_pg_plus": 0,
                         "norm2_pg_minus": 0, "norm2_pdg": 0, "eps_r": 0},
             "eta2": [9], "ztilde": [0], "gammatilde": 0.6,
             "x_grid": {"start": -4, "stop": 4, "num": 9}, "mollow_reference": true }"#,
    );
    let o = run(&["spectrum", "--config", &cfg, "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "qsatom v1");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    // reference columns are even in x on resonance
    for k in 0..9 {
        let (a, b) = (&rows[k], &rows[8 - k]);
        assert_eq!(a[6].as_f64(), b[6].as_f64());
        assert_eq!(a[7].as_f64(), b[7].as_f64());
    }
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(
        &dir,
        "e.json",
        &format!(r#"{{ {SCALARS}, "eta2": [10], "ztilde": [] }}"#),
    );
    assert_eq!(run(&["xsection", "--config", &empty]).status.code(), Some(2));
    let zero_width = write(
        &dir,
        "z.json",
        &format!(r#"{{ {SCALARS}, "eta2": [10], "ztilde": [0], "gammatilde": 0, "x_grid": [0] }}"#),
    );
    assert_eq!(run(&["spectrum", "--config", &zero_width]).status.code(), Some(2));
    let unknown = write(
        &dir,
        "u.json",
        &format!(r#"{{ {SCALARS}, "eta2": [1], "ztilde": [0], "eta": 1 }}"#),
    );
    assert_eq!(run(&["xsection", "--config", &unknown]).status.code(), Some(2));
    assert_eq!(
        run(&["xsection", "--config", "/nonexistent.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn shipped_configs_are_valid() {
    for (cmd, name) in [
        ("xsection", "detuning_sweep.json"),
        ("xsection", "mollow.json"),
        ("spectrum", "resonant_spectra.json"),
        ("spectrum", "detuned_spectra.json"),
        ("spectrum", "phase_shifts.json"),
    ] {
        let path = config_dir().join(name);
        let o = run(&[cmd, "--config", path.to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o
            .stdout
            .starts_with(b"# qsatom v1, reduced units (alpha2=1), columns: "));
    }
}

#[test]
fn verify_with_phase_shift_config() {
    let path = config_dir().join("phase_shifts.json");
    let o = run(&["verify", "--config", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"finite_beam_balance"));
    assert!(names.contains(&"spectral_normalization[config]"));
}
