//! End-to-end checks of the binary: determinism, output round-trips, and
//! the error-record contract.

use std::path::PathBuf;
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ionglow"))
}

fn run_ok(args: &[&str]) -> String {
    let output = binary().args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout).expect("utf-8 output")
}

fn run_err(args: &[&str]) -> Output {
    let output = binary().args(args).output().expect("binary runs");
    assert!(!output.status.success());
    output
}

#[test]
fn positions_prints_three_ion_analytic_values() {
    let text = run_ok(&["positions", "--n", "3"]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "index,v,z_um");
    let values: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let expect = (5.0_f64 / 4.0).cbrt();
    assert_eq!(values.len(), 3);
    assert!((values[0] + expect).abs() < 1e-4);
    assert!(values[1].abs() < 1e-12);
    assert!((values[2] - expect).abs() < 1e-4);
}

#[test]
fn enhance_single_ion_reports_unit_enhancement() {
    let text = run_ok(&["enhance", "--n", "1"]);
    let row = text.lines().nth(1).unwrap();
    let p_rel: f64 = row.split(',').last().unwrap().parse().unwrap();
    assert!((p_rel - 1.0).abs() < 1e-9);
}

#[test]
fn sweep_outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| -> Vec<u8> {
        let path: PathBuf = dir.path().join(name);
        let output = binary()
            .args([
                "--seed",
                "11",
                "--output",
                path.to_str().unwrap(),
                "sweep",
                "--n-list",
                "2,3",
                "--na-list",
                "0.05,0.07",
                "--samples",
                "300",
            ])
            .output()
            .expect("binary runs");
        assert!(output.status.success());
        std::fs::read(&path).unwrap()
    };
    let first = run("a.csv");
    let second = run("b.csv");
    assert!(!first.is_empty());
    assert_eq!(first, second);
}

#[test]
fn phase_optimizer_seed_controls_reproducibility() {
    let args = |seed: &str| {
        vec![
            "--seed".to_string(),
            seed.to_string(),
            "--format".to_string(),
            "json".to_string(),
            "optimize-phases".to_string(),
            "--n".to_string(),
            "3".to_string(),
            "--samples".to_string(),
            "200".to_string(),
        ]
    };
    let a = run_ok(&args("5").iter().map(String::as_str).collect::<Vec<_>>());
    let b = run_ok(&args("5").iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(a, b);
}

#[test]
fn json_output_round_trips_to_in_memory_values() {
    let text = run_ok(&["--format", "json", "enhance", "--n", "2", "--l-um", "4.5"]);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let p_rel = value["p_d_rel"].as_f64().unwrap();
    let flux_na = value["flux_na"].as_f64().unwrap();
    let p_d = value["p_d"].as_f64().unwrap();
    // P_D = Φ_NA / (4πn) must hold exactly after the round-trip.
    assert!((p_d - flux_na / (4.0 * std::f64::consts::PI * 2.0)).abs() < 1e-15);
    assert!(p_rel > 0.0 && p_rel <= 2.0 + 1e-9);

    // CSV emits 13 significant digits; the same run must agree to that
    // precision.
    let csv = run_ok(&["enhance", "--n", "2", "--l-um", "4.5"]);
    let row = csv.lines().nth(1).unwrap();
    let csv_p_rel: f64 = row.split(',').last().unwrap().parse().unwrap();
    assert!((csv_p_rel - p_rel).abs() <= 1e-12 * p_rel.abs());
}

#[test]
fn pattern_csv_has_two_columns_and_forward_peak() {
    // Constructive fringe: k l Δv (1 − cos α) = 4π at l ≈ 2.1516 µm.
    let text = run_ok(&[
        "pattern",
        "--n",
        "2",
        "--l-um",
        "2.151574",
        "--points",
        "3",
        "--beta-max-deg",
        "2.0",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "beta_deg,intensity");
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(first.len(), 2);
    assert_eq!(first[0], 0.0);
    assert!((first[1] - 4.0).abs() < 1e-3, "I(0) = {}", first[1]);
}

#[test]
fn config_file_env_and_flags_layer_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "[scenario]\nn = 4\nna = 0.05\n").unwrap();

    // File value wins over the default.
    let text = run_ok(&["--config", config.to_str().unwrap(), "enhance"]);
    assert!(text.lines().nth(1).unwrap().starts_with("4,"));

    // Environment beats the file; flag beats both.
    let output = binary()
        .args(["--config", config.to_str().unwrap(), "enhance"])
        .env("IONGLOW_N", "3")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&output.stdout)
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("3,"));

    let output = binary()
        .args(["--config", config.to_str().unwrap(), "enhance", "--n", "5"])
        .env("IONGLOW_N", "3")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&output.stdout)
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("5,"));
}

#[test]
fn invalid_na_yields_machine_readable_error_record() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "[scenario]\nna = 1.5\n").unwrap();
    let output = run_err(&["--config", config.to_str().unwrap(), "enhance"]);
    let stderr = String::from_utf8_lossy(&output.stderr);
    let record: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(record["error"]["kind"], "config");
    assert!(record["error"]["message"]
        .as_str()
        .unwrap()
        .contains("scenario.na"));
}

#[test]
fn toml_parse_errors_carry_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("broken.toml");
    std::fs::write(&config, "[scenario\nn = 2\n").unwrap();
    let output = run_err(&["--config", config.to_str().unwrap(), "enhance"]);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 1"), "stderr: {stderr}");
    assert!(stderr.contains("column"), "stderr: {stderr}");
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("unknown.toml");
    std::fs::write(&config, "[scenario]\nmystery = 1\n").unwrap();
    let output = run_err(&["--config", config.to_str().unwrap(), "enhance"]);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("unknown field"), "stderr: {stderr}");
    assert!(stderr.contains("mystery"), "stderr: {stderr}");
}

#[test]
fn empty_config_applies_documented_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("empty.toml");
    std::fs::write(&config, "").unwrap();
    let text = run_ok(&["--config", config.to_str().unwrap(), "enhance"]);
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    // Defaults: n = 2, alpha = 45 deg, NA = 0.07, thermal off.
    assert_eq!(fields[0], "2");
    let alpha: f64 = fields[2].parse().unwrap();
    let na: f64 = fields[3].parse().unwrap();
    assert!((alpha - 45.0).abs() < 1e-9);
    assert!((na - 0.07).abs() < 1e-12);
    assert_eq!(fields[4], "false");
}

#[test]
fn fit_recovers_known_coherent_fraction_from_csv_input() {
    // Build a synthetic measured trace by inverting the count
    // normalization at a known coherent fraction, using enhancement values
    // from the enhance command itself.
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("fit.toml");
    std::fs::write(
        &config,
        "[scenario]\nn = 2\n\n[fit]\nc1 = 270.0\ncbg = 24.0\n",
    )
    .unwrap();

    let lengths = [3.8, 4.0, 4.2, 4.303, 4.5, 4.8, 5.0, 5.2, 5.379, 5.8, 6.2];
    let coherent = 0.57;
    let mut trace = String::from("scan_value,counts,uncertainty\n");
    for l in lengths {
        let text = run_ok(&["enhance", "--n", "2", "--l-um", &l.to_string()]);
        let p_cal: f64 = text
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .last()
            .unwrap()
            .parse()
            .unwrap();
        let p_exp = (1.0 - coherent) + coherent * p_cal;
        let counts = p_exp * (270.0 - 24.0) * 2.0 + 24.0;
        trace.push_str(&format!("{l},{counts},5.0\n"));
    }
    let input = dir.path().join("trace.csv");
    std::fs::write(&input, trace).unwrap();

    let text = run_ok(&[
        "--config",
        config.to_str().unwrap(),
        "--format",
        "json",
        "fit",
        "--input",
        input.to_str().unwrap(),
    ]);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let recovered = value["coherent_fraction"].as_f64().unwrap();
    assert!(
        (recovered - coherent).abs() < 1e-6,
        "recovered {recovered}"
    );
    let incoherent = value["incoherent_fraction"].as_f64().unwrap();
    assert!((recovered + incoherent - 1.0).abs() < 1e-12);
}

#[test]
fn sweep_records_cell_errors_and_continues() {
    // At omega_r = 2π × 0.1 MHz a 45-ion chain has no linear window while
    // two ions still do; the failing cell is recorded and the sweep goes on.
    let output = binary()
        .args(["sweep", "--n-list", "45,2", "--na-list", "0.07", "--samples", "200"])
        .env("IONGLOW_OMEGA_R_2PI_MHZ", "0.1")
        .output()
        .expect("binary runs");
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].contains("error:empty-length-scale-range"), "{}", lines[1]);
    assert!(lines[2].contains("ok"), "{}", lines[2]);
}

#[test]
fn compare_species_defaults_to_barium_candidate() {
    let text = run_ok(&["compare-species", "--n", "2", "--samples", "200"]);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("ca40,ba138,2,"));
}

#[test]
fn default_config_reproduces_stability_bounds_end_to_end() {
    // Empty config, two ions: the default length scale is the smallest
    // stable one at omega_r = 2π × 5 MHz, i.e. 1.6099 µm; the positions
    // output carries it as z/v.
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("empty.toml");
    std::fs::write(&config, "").unwrap();
    let text = run_ok(&["--config", config.to_str().unwrap(), "positions", "--n", "2"]);
    let row: Vec<f64> = text
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .skip(1)
        .map(|x| x.parse().unwrap())
        .collect();
    let length_um = row[1] / row[0];
    assert!((length_um - 1.6099).abs() < 0.01, "l = {length_um} um");
}
