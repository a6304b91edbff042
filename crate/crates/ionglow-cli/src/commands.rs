//! Subcommand execution. Every command renders its report into a string;
//! identical configuration and seed give identical bytes.

use std::f64::consts::TAU;
use std::path::Path;

use serde::Serialize;

use ionglow::analysis::{
    fit_coherent_fraction_with, normalize_counts, species_comparison, ComparisonOptions,
    CountRecord, FitOptions,
};
use ionglow::collection::{relative_enhancement, CollectionAperture, EnhancementResult};
use ionglow::crystal::{
    axial_frequency_for_length, axial_modes, length_scale, length_scale_bounds, CrystalGeometry,
};
use ionglow::optimize::{run_mode, sweep, Argmax, OptimumRecord, ScanMode, ScanSpec};
use ionglow::physical::{axial_frequency, doppler_temperature, IonSpecies};
use ionglow::scattering::{ScatterScenario, ThermalState};

use crate::cli::{Command, OutputFormat};
use crate::config::{FitInputKind, RunConfig};
use crate::output::{csv_line, float, json};
use crate::{CliError, Result};

pub fn execute(command: &Command, config: &RunConfig) -> Result<String> {
    match command {
        Command::Positions { n, l_um } => positions(config, *n, *l_um),
        Command::Modes {
            n,
            l_um,
            omega_z_2pi_mhz,
        } => modes(config, *n, *l_um, *omega_z_2pi_mhz),
        Command::Pattern {
            n,
            l_um,
            alpha_deg,
            beta_max_deg,
            points,
            thermal,
        } => pattern(config, *n, *l_um, *alpha_deg, *beta_max_deg, *points, *thermal),
        Command::Enhance {
            n,
            l_um,
            na,
            alpha_deg,
            thermal,
        } => enhance(config, *n, *l_um, *na, *alpha_deg, *thermal),
        Command::Sweep {
            n_list,
            na_list,
            equidistant,
            thermal,
            samples,
        } => run_sweep(config, n_list, na_list, *equidistant, *thermal, *samples),
        Command::OptimizePhases { n, na, samples } => optimize_phases(config, *n, *na, *samples),
        Command::Fit {
            input,
            weighted,
            window,
        } => fit(config, input, *weighted, *window),
        Command::CompareSpecies {
            species_b,
            n,
            na,
            thermal,
            samples,
        } => compare_species(config, species_b.as_deref(), *n, *na, *thermal, *samples),
    }
}

/// Default length scale: configured value, otherwise the smallest stable
/// scale of the (at least two-ion) crystal.
fn default_length(config: &RunConfig, n: usize, flag: Option<f64>) -> Result<f64> {
    if let Some(l_um) = flag {
        if !(l_um > 0.0) {
            return Err(CliError::Config(format!(
                "--l-um must be positive, got {l_um}"
            )));
        }
        return Ok(l_um * 1e-6);
    }
    if let Some(l) = config.l {
        return Ok(l);
    }
    let bounds = length_scale_bounds(n.max(2), config.omega_r, &config.species)?;
    Ok(bounds.l_min)
}

fn thermal_state(
    config: &RunConfig,
    geometry: &CrystalGeometry,
    species: &IonSpecies,
) -> Result<ThermalState> {
    let omega_z = axial_frequency_for_length(geometry.length_scale(), species);
    let modes = axial_modes(geometry, omega_z)?;
    let temperature = config
        .temperature
        .unwrap_or_else(|| doppler_temperature(species));
    let variance = ionglow::crystal::pair_distance_variance(&modes, species, temperature)?;
    Ok(ThermalState::new(variance, config.thermal_keff))
}

fn scenario(
    config: &RunConfig,
    n: usize,
    length: f64,
    alpha: f64,
    thermal: bool,
) -> Result<ScatterScenario> {
    let geometry = CrystalGeometry::harmonic(n, length)?;
    let mut scenario = ScatterScenario::new(geometry, config.species.wavenumber(), alpha)?;
    if let Some(phases) = &config.phases {
        if phases.len() != n {
            return Err(CliError::Config(format!(
                "scenario.phases_deg has {} entries but n = {n}",
                phases.len()
            )));
        }
        scenario = scenario.with_phases(phases.clone())?;
    }
    if thermal {
        let state = thermal_state(config, scenario.geometry(), &config.species)?;
        scenario = scenario.with_thermal(state)?;
    }
    Ok(scenario)
}

fn scan_spec(config: &RunConfig, n: usize, thermal: bool, samples: Option<usize>) -> Result<ScanSpec> {
    let mut spec = ScanSpec::new(n, config.species.clone(), config.alpha, config.omega_r)?
        .with_samples(samples.unwrap_or(config.samples))
        .with_thermal(thermal)
        .with_thermal_keff(config.thermal_keff)
        .with_seed(config.seed);
    if let Some((lo, hi)) = config.l_range {
        spec = spec.with_l_range(lo, hi);
    }
    if let Some(t) = config.temperature {
        spec = spec.with_temperature(t);
    }
    Ok(spec)
}

#[derive(Serialize)]
struct PositionsReport {
    n: usize,
    l_um: f64,
    positions: Vec<PositionRow>,
}

#[derive(Serialize)]
struct PositionRow {
    index: usize,
    v: f64,
    z_um: f64,
}

fn positions(config: &RunConfig, n: Option<usize>, l_um: Option<f64>) -> Result<String> {
    let n = n.unwrap_or(config.n);
    let length = default_length(config, n, l_um)?;
    let geometry = CrystalGeometry::harmonic(n, length)?;
    let rows: Vec<PositionRow> = geometry
        .positions()
        .iter()
        .enumerate()
        .map(|(index, v)| PositionRow {
            index,
            v: *v,
            z_um: v * length * 1e6,
        })
        .collect();
    match config.format {
        OutputFormat::Json => Ok(json(&PositionsReport {
            n,
            l_um: length * 1e6,
            positions: rows,
        })),
        OutputFormat::Csv => {
            let mut text = csv_line(&["index".into(), "v".into(), "z_um".into()]);
            for row in rows {
                text += &csv_line(&[row.index.to_string(), float(row.v), float(row.z_um)]);
            }
            Ok(text)
        }
    }
}

#[derive(Serialize)]
struct ModesReport {
    n: usize,
    omega_z_2pi_mhz: f64,
    modes: Vec<ModeRow>,
}

#[derive(Serialize)]
struct ModeRow {
    index: usize,
    eigenvalue: f64,
    frequency_2pi_mhz: f64,
    eigenvector: Vec<f64>,
}

fn modes(
    config: &RunConfig,
    n: Option<usize>,
    l_um: Option<f64>,
    omega_z_2pi_mhz: Option<f64>,
) -> Result<String> {
    let n = n.unwrap_or(config.n);
    let length = default_length(config, n, l_um)?;
    let omega_z = match omega_z_2pi_mhz {
        Some(mhz) => {
            if !(mhz > 0.0) {
                return Err(CliError::Config(format!(
                    "--omega-z-2pi-mhz must be positive, got {mhz}"
                )));
            }
            TAU * mhz * 1e6
        }
        None => match (&config.hardware, l_um.is_some() || config.l.is_some()) {
            // An explicit length wins; otherwise trap hardware sets the
            // frequency directly.
            (Some(hw), false) => axial_frequency(hw, &config.species),
            _ => axial_frequency_for_length(length, &config.species),
        },
    };
    let geometry = CrystalGeometry::harmonic(n, length)?;
    let mode_set = axial_modes(&geometry, omega_z)?;
    let rows: Vec<ModeRow> = (0..n)
        .map(|p| ModeRow {
            index: p,
            eigenvalue: mode_set.eigenvalues[p],
            frequency_2pi_mhz: mode_set.mode_frequencies[p] / TAU / 1e6,
            eigenvector: mode_set.eigenvectors.column(p),
        })
        .collect();
    match config.format {
        OutputFormat::Json => Ok(json(&ModesReport {
            n,
            omega_z_2pi_mhz: omega_z / TAU / 1e6,
            modes: rows,
        })),
        OutputFormat::Csv => {
            let mut header = vec![
                "index".to_string(),
                "eigenvalue".to_string(),
                "frequency_2pi_mhz".to_string(),
            ];
            header.extend((0..n).map(|i| format!("b{i}")));
            let mut text = csv_line(&header);
            for row in rows {
                let mut fields = vec![
                    row.index.to_string(),
                    float(row.eigenvalue),
                    float(row.frequency_2pi_mhz),
                ];
                fields.extend(row.eigenvector.iter().map(|x| float(*x)));
                text += &csv_line(&fields);
            }
            Ok(text)
        }
    }
}

#[derive(Serialize)]
struct PatternReport {
    n: usize,
    l_um: f64,
    alpha_deg: f64,
    thermal: bool,
    points: Vec<PatternPoint>,
}

#[derive(Serialize)]
struct PatternPoint {
    beta_deg: f64,
    intensity: f64,
}

fn pattern(
    config: &RunConfig,
    n: Option<usize>,
    l_um: Option<f64>,
    alpha_deg: Option<f64>,
    beta_max_deg: Option<f64>,
    points: Option<usize>,
    thermal: Option<bool>,
) -> Result<String> {
    let n = n.unwrap_or(config.n);
    let length = default_length(config, n, l_um)?;
    let alpha = alpha_deg.map(f64::to_radians).unwrap_or(config.alpha);
    let beta_max = beta_max_deg.map(f64::to_radians).unwrap_or(config.beta_max);
    let count = points.unwrap_or(config.beta_points);
    if count < 2 {
        return Err(CliError::Config(format!(
            "--points must be at least 2, got {count}"
        )));
    }
    let thermal = thermal.unwrap_or(config.thermal);
    let scenario = scenario(config, n, length, alpha, thermal)?;
    let grid: Vec<f64> = (0..count)
        .map(|i| beta_max * i as f64 / (count as f64 - 1.0))
        .collect();
    let angular = scenario.pattern(&grid)?;
    let rows: Vec<PatternPoint> = angular
        .angles
        .iter()
        .zip(&angular.intensities)
        .map(|(b, i)| PatternPoint {
            beta_deg: b.to_degrees(),
            intensity: *i,
        })
        .collect();
    match config.format {
        OutputFormat::Json => Ok(json(&PatternReport {
            n,
            l_um: length * 1e6,
            alpha_deg: alpha.to_degrees(),
            thermal,
            points: rows,
        })),
        OutputFormat::Csv => {
            let mut text = csv_line(&["beta_deg".into(), "intensity".into()]);
            for row in rows {
                text += &csv_line(&[float(row.beta_deg), float(row.intensity)]);
            }
            Ok(text)
        }
    }
}

#[derive(Serialize)]
struct EnhanceReport {
    n: usize,
    l_um: f64,
    alpha_deg: f64,
    na: f64,
    thermal: bool,
    flux_na: f64,
    p_d: f64,
    p_d_rel: f64,
}

impl EnhanceReport {
    fn new(result: &EnhancementResult) -> Self {
        EnhanceReport {
            n: result.context.ion_count,
            l_um: result.context.length_scale * 1e6,
            alpha_deg: result.context.excitation_angle.to_degrees(),
            na: result.context.numerical_aperture,
            thermal: result.context.thermal,
            flux_na: result.flux_na,
            p_d: result.collection_efficiency,
            p_d_rel: result.relative_enhancement,
        }
    }

    fn csv(&self) -> String {
        let mut text = csv_line(&[
            "n".into(),
            "l_um".into(),
            "alpha_deg".into(),
            "na".into(),
            "thermal".into(),
            "flux_na".into(),
            "p_d".into(),
            "p_d_rel".into(),
        ]);
        text += &csv_line(&[
            self.n.to_string(),
            float(self.l_um),
            float(self.alpha_deg),
            float(self.na),
            self.thermal.to_string(),
            float(self.flux_na),
            float(self.p_d),
            float(self.p_d_rel),
        ]);
        text
    }
}

fn enhance(
    config: &RunConfig,
    n: Option<usize>,
    l_um: Option<f64>,
    na: Option<f64>,
    alpha_deg: Option<f64>,
    thermal: Option<bool>,
) -> Result<String> {
    let n = n.unwrap_or(config.n);
    let length = default_length(config, n, l_um)?;
    let alpha = alpha_deg.map(f64::to_radians).unwrap_or(config.alpha);
    let thermal = thermal.unwrap_or(config.thermal);
    let aperture = CollectionAperture::from_na(na.unwrap_or(config.na))?;
    let scenario = scenario(config, n, length, alpha, thermal)?;
    let result = relative_enhancement(&scenario, &aperture)?;
    let report = EnhanceReport::new(&result);
    match config.format {
        OutputFormat::Json => Ok(json(&report)),
        OutputFormat::Csv => Ok(report.csv()),
    }
}

#[derive(Serialize)]
struct SweepReport {
    alpha_deg: f64,
    mode: &'static str,
    thermal: bool,
    cells: Vec<SweepRow>,
}

#[derive(Serialize)]
struct SweepRow {
    n: usize,
    na: f64,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_p_rel: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    argmax_um: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn argmax_um(argmax: &Argmax) -> f64 {
    match argmax {
        Argmax::LengthScale { value } => value * 1e6,
        Argmax::Spacing { value } => value * 1e6,
        Argmax::Phases { length_scale, .. } => length_scale * 1e6,
    }
}

fn run_sweep(
    config: &RunConfig,
    n_list: &[usize],
    na_list: &[f64],
    equidistant: Option<bool>,
    thermal: Option<bool>,
    samples: Option<usize>,
) -> Result<String> {
    let n_values: Vec<usize> = if n_list.is_empty() {
        config.n_list.clone()
    } else {
        n_list.to_vec()
    };
    let na_values: Vec<f64> = if na_list.is_empty() {
        config.na_list.clone()
    } else {
        na_list.to_vec()
    };
    let equidistant = equidistant.unwrap_or(config.equidistant);
    let thermal = thermal.unwrap_or(config.thermal);
    let mode = if equidistant {
        ScanMode::EquidistantSpacing
    } else {
        ScanMode::HarmonicLength
    };
    let base = scan_spec(config, n_values[0], thermal, samples)?.with_mode(mode);
    base.validate()?;
    let cells = sweep(&base, &n_values, &na_values);

    let rows: Vec<SweepRow> = cells
        .iter()
        .map(|cell| match &cell.outcome {
            Ok(record) => SweepRow {
                n: cell.n,
                na: cell.na,
                status: "ok".into(),
                best_p_rel: Some(record.best_value),
                argmax_um: Some(argmax_um(&record.argmax)),
                error: None,
            },
            Err(e) => SweepRow {
                n: cell.n,
                na: cell.na,
                status: format!("error:{}", e.kind()),
                best_p_rel: None,
                argmax_um: None,
                error: Some(e.to_string()),
            },
        })
        .collect();

    let mode_name = if equidistant { "equidistant" } else { "harmonic" };
    match config.format {
        OutputFormat::Json => Ok(json(&SweepReport {
            alpha_deg: config.alpha.to_degrees(),
            mode: mode_name,
            thermal,
            cells: rows,
        })),
        OutputFormat::Csv => {
            let mut text = csv_line(&[
                "n".into(),
                "na".into(),
                "alpha_deg".into(),
                "mode".into(),
                "thermal".into(),
                "status".into(),
                "best_p_rel".into(),
                "argmax_um".into(),
            ]);
            for row in rows {
                text += &csv_line(&[
                    row.n.to_string(),
                    float(row.na),
                    float(config.alpha.to_degrees()),
                    mode_name.to_string(),
                    thermal.to_string(),
                    row.status.clone(),
                    row.best_p_rel.map(float).unwrap_or_else(|| "nan".into()),
                    row.argmax_um.map(float).unwrap_or_else(|| "nan".into()),
                ]);
            }
            Ok(text)
        }
    }
}

#[derive(Serialize)]
struct PhasesReport {
    n: usize,
    na: f64,
    alpha_deg: f64,
    l_um: f64,
    best_p_rel: f64,
    phases_rad: Vec<f64>,
    trace: Vec<(f64, f64)>,
}

fn optimize_phases(
    config: &RunConfig,
    n: Option<usize>,
    na: Option<f64>,
    samples: Option<usize>,
) -> Result<String> {
    let n = n.unwrap_or(config.n);
    let aperture = CollectionAperture::from_na(na.unwrap_or(config.na))?;
    let spec = scan_spec(config, n, config.thermal, samples)?.with_mode(ScanMode::PhasesAtMinLength);
    let record: OptimumRecord = run_mode(&spec, &aperture)?;
    let (length, phases) = match &record.argmax {
        Argmax::Phases {
            length_scale,
            phases,
        } => (*length_scale, phases.clone()),
        _ => unreachable!("phase optimization returns phase argmax"),
    };
    let report = PhasesReport {
        n,
        na: aperture.na(),
        alpha_deg: config.alpha.to_degrees(),
        l_um: length * 1e6,
        best_p_rel: record.best_value,
        phases_rad: phases,
        trace: record.trace.clone(),
    };
    match config.format {
        OutputFormat::Json => Ok(json(&report)),
        OutputFormat::Csv => {
            let mut text = csv_line(&[
                "n".into(),
                "na".into(),
                "alpha_deg".into(),
                "l_um".into(),
                "best_p_rel".into(),
                "phases_rad".into(),
            ]);
            let joined = report
                .phases_rad
                .iter()
                .map(|p| float(*p))
                .collect::<Vec<_>>()
                .join(";");
            text += &csv_line(&[
                report.n.to_string(),
                float(report.na),
                float(report.alpha_deg),
                float(report.l_um),
                float(report.best_p_rel),
                joined,
            ]);
            Ok(text)
        }
    }
}

#[derive(Serialize)]
struct FitReport {
    n: usize,
    coherent_fraction: f64,
    incoherent_fraction: f64,
    residual_norm: f64,
    points: Vec<FitPoint>,
}

#[derive(Serialize)]
struct FitPoint {
    scan_value: f64,
    l_um: f64,
    p_exp: f64,
    p_cal: f64,
    p_fit: f64,
}

fn parse_fit_file(path: &Path) -> Result<Vec<(f64, f64, f64)>> {
    let text =
        std::fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))?;
    let mut rows = Vec::new();
    for (number, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() < 2 {
            return Err(CliError::Config(format!(
                "{}:{}: expected `scan_value,counts[,uncertainty]`",
                path.display(),
                number + 1
            )));
        }
        let parse = |field: &str, name: &str| -> Result<f64> {
            field.parse::<f64>().map_err(|_| {
                CliError::Config(format!(
                    "{}:{}: cannot parse {name} {field:?}",
                    path.display(),
                    number + 1
                ))
            })
        };
        // A non-numeric first row is a header.
        if number == 0 && fields[0].parse::<f64>().is_err() {
            continue;
        }
        let scan = parse(fields[0], "scan value")?;
        let counts = parse(fields[1], "count rate")?;
        let uncertainty = if fields.len() > 2 {
            parse(fields[2], "uncertainty")?
        } else {
            0.0
        };
        rows.push((scan, counts, uncertainty));
    }
    if rows.len() < 2 {
        return Err(CliError::Config(format!(
            "{}: the fit needs at least 2 data rows",
            path.display()
        )));
    }
    Ok(rows)
}

fn fit(
    config: &RunConfig,
    input: &Path,
    weighted: Option<bool>,
    window: Option<usize>,
) -> Result<String> {
    let n = config.n;
    let c1 = config
        .fit_c1
        .ok_or_else(|| CliError::Config("fit.c1 is required by the fit command".into()))?;
    let cbg = config
        .fit_cbg
        .ok_or_else(|| CliError::Config("fit.cbg is required by the fit command".into()))?;
    let weighted = weighted.unwrap_or(config.fit_weighted);
    let window = window.or(config.fit_window);

    let rows = parse_fit_file(input)?;

    // Scan-parameter conversion to a length scale.
    let to_length = |scan: f64| -> Result<f64> {
        match config.fit_input_kind {
            FitInputKind::LengthUm => {
                if !(scan > 0.0) {
                    return Err(CliError::Config(format!(
                        "fit input: length must be positive, got {scan}"
                    )));
                }
                Ok(scan * 1e-6)
            }
            FitInputKind::TipVoltage => {
                let mut hw = config.hardware.expect("validated with hardware");
                if !(scan > 0.0) {
                    return Err(CliError::Config(format!(
                        "fit input: tip voltage must be positive, got {scan}"
                    )));
                }
                hw.tip_voltage = scan;
                Ok(length_scale(
                    axial_frequency(&hw, &config.species),
                    &config.species,
                ))
            }
        }
    };

    let mut data = Vec::with_capacity(rows.len());
    let mut weights = Vec::with_capacity(rows.len());
    for (scan, counts, uncertainty) in &rows {
        let record = CountRecord {
            ion_count: n,
            scan_value: *scan,
            counts: *counts,
            single_ion_counts: c1,
            background_counts: cbg,
            uncertainty: *uncertainty,
        };
        let p_exp = normalize_counts(&record)?;
        data.push((to_length(*scan)?, p_exp));
        if weighted {
            if !(*uncertainty > 0.0) {
                return Err(CliError::Config(format!(
                    "fit input: weighting needs positive uncertainties, got {uncertainty}"
                )));
            }
            let sigma_p = uncertainty / ((c1 - cbg) * n as f64);
            weights.push(1.0 / (sigma_p * sigma_p));
        }
    }

    // The calculated enhancement at each measured length scale.
    let positions = ionglow::crystal::equilibrium_positions(n)?;
    let aperture = CollectionAperture::from_na(config.na)?;
    let model = |l: f64| -> ionglow::Result<f64> {
        let geometry = CrystalGeometry::from_positions(l, positions.clone())?;
        let mut scenario = ScatterScenario::new(geometry, config.species.wavenumber(), config.alpha)?;
        if let Some(phases) = &config.phases {
            scenario = scenario.with_phases(phases.clone())?;
        }
        if config.thermal {
            let omega_z = axial_frequency_for_length(l, &config.species);
            let modes = axial_modes(scenario.geometry(), omega_z)?;
            let temperature = config
                .temperature
                .unwrap_or_else(|| doppler_temperature(&config.species));
            let variance =
                ionglow::crystal::pair_distance_variance(&modes, &config.species, temperature)?;
            scenario = scenario.with_thermal(ThermalState::new(variance, config.thermal_keff))?;
        }
        Ok(relative_enhancement(&scenario, &aperture)?.relative_enhancement)
    };

    let options = FitOptions {
        weights: if weighted { Some(weights) } else { None },
        window,
    };
    let result = fit_coherent_fraction_with(&data, &model, &options)?;

    let mut points = Vec::with_capacity(rows.len());
    for (((scan, _, _), (l, p_exp)), p_fit) in
        rows.iter().zip(&data).zip(&result.model_values)
    {
        points.push(FitPoint {
            scan_value: *scan,
            l_um: l * 1e6,
            p_exp: *p_exp,
            p_cal: model(*l)?,
            p_fit: *p_fit,
        });
    }

    let report = FitReport {
        n,
        coherent_fraction: result.coherent_fraction,
        incoherent_fraction: result.incoherent_fraction,
        residual_norm: result.residual_norm,
        points,
    };
    match config.format {
        OutputFormat::Json => Ok(json(&report)),
        OutputFormat::Csv => {
            let mut text = csv_line(&[
                "coherent_fraction".into(),
                "incoherent_fraction".into(),
                "residual_norm".into(),
            ]);
            text += &csv_line(&[
                float(report.coherent_fraction),
                float(report.incoherent_fraction),
                float(report.residual_norm),
            ]);
            Ok(text)
        }
    }
}

#[derive(Serialize)]
struct CompareReport {
    species_a: String,
    species_b: String,
    n: usize,
    na: f64,
    alpha_deg: f64,
    thermal: bool,
    p_rel_a: f64,
    p_rel_b: f64,
    ratio: f64,
    argmax_a_um: f64,
    argmax_b_um: f64,
}

fn compare_species(
    config: &RunConfig,
    species_b: Option<&str>,
    n: Option<usize>,
    na: Option<f64>,
    thermal: Option<bool>,
    samples: Option<usize>,
) -> Result<String> {
    let n = n.unwrap_or(config.n);
    let na = na.unwrap_or(config.na);
    let candidate = match species_b {
        None => config.species_b.clone(),
        Some(name) => config
            .registry
            .get(name)
            .ok_or_else(|| CliError::Config(format!("--species-b: {name:?} is not registered")))?
            .clone(),
    };
    let mut options = ComparisonOptions::new(config.omega_r);
    options.thermal = thermal.unwrap_or(config.thermal);
    options.thermal_keff = config.thermal_keff;
    options.samples = samples.unwrap_or(config.samples);
    options.seed = config.seed;
    options.l_range = config.l_range;
    let comparison = species_comparison(n, na, config.alpha, &config.species, &candidate, &options)?;

    let report = CompareReport {
        species_a: config.species.name().to_string(),
        species_b: candidate.name().to_string(),
        n,
        na,
        alpha_deg: config.alpha.to_degrees(),
        thermal: options.thermal,
        p_rel_a: comparison.baseline.best_value,
        p_rel_b: comparison.candidate.best_value,
        ratio: comparison.ratio,
        argmax_a_um: argmax_um(&comparison.baseline.argmax),
        argmax_b_um: argmax_um(&comparison.candidate.argmax),
    };
    match config.format {
        OutputFormat::Json => Ok(json(&report)),
        OutputFormat::Csv => {
            let mut text = csv_line(&[
                "species_a".into(),
                "species_b".into(),
                "n".into(),
                "na".into(),
                "alpha_deg".into(),
                "thermal".into(),
                "p_rel_a".into(),
                "p_rel_b".into(),
                "ratio".into(),
                "argmax_a_um".into(),
                "argmax_b_um".into(),
            ]);
            text += &csv_line(&[
                report.species_a.clone(),
                report.species_b.clone(),
                report.n.to_string(),
                float(report.na),
                float(report.alpha_deg),
                report.thermal.to_string(),
                float(report.p_rel_a),
                float(report.p_rel_b),
                float(report.ratio),
                float(report.argmax_a_um),
                float(report.argmax_b_um),
            ]);
            Ok(text)
        }
    }
}
