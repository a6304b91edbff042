//! Layered configuration: built-in defaults, then the TOML file, then
//! IONGLOW_* environment variables, then command-line flags. Angles enter
//! in degrees and lengths in µm; everything is converted to SI once, here.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::Deserialize;

use ionglow::physical::{IonSpecies, SpeciesRegistry, TrapHardware};
use ionglow::scattering::ThermalKeff;

use crate::cli::{Cli, OutputFormat};
use crate::{CliError, Result};

/// Environment-variable prefix for CI-style overrides.
pub const ENV_PREFIX: &str = "IONGLOW_";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    species: Option<String>,
    #[serde(default)]
    species_defs: BTreeMap<String, SpeciesDef>,
    #[serde(default)]
    trap: TrapSection,
    #[serde(default)]
    scenario: ScenarioSection,
    #[serde(default)]
    mode: ModeSection,
    #[serde(default)]
    scan: ScanSection,
    #[serde(default)]
    fit: FitSection,
    #[serde(default)]
    compare: CompareSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeciesDef {
    mass_amu: f64,
    #[serde(default = "default_charge")]
    charge: u32,
    wavelength_nm: f64,
    linewidth_2pi_mhz: f64,
}

fn default_charge() -> u32 {
    1
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrapSection {
    omega_r_2pi_mhz: Option<f64>,
    hardware: Option<HardwareSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct HardwareSection {
    u_tip_v: f64,
    u_rf_v: f64,
    omega_rf_2pi_mhz: f64,
    kappa: f64,
    z0_mm: f64,
    r0_mm: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSection {
    n: Option<usize>,
    alpha_deg: Option<f64>,
    na: Option<f64>,
    l_um: Option<f64>,
    n_list: Option<Vec<usize>>,
    na_list: Option<Vec<f64>>,
    beta_max_deg: Option<f64>,
    beta_points: Option<usize>,
    phases_deg: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeSection {
    thermal: Option<bool>,
    thermal_keff: Option<String>,
    equidistant: Option<bool>,
    temperature_mk: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanSection {
    l_lo_um: Option<f64>,
    l_hi_um: Option<f64>,
    samples: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FitSection {
    input_kind: Option<String>,
    c1: Option<f64>,
    cbg: Option<f64>,
    window: Option<usize>,
    weighted: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareSection {
    species_b: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    path: Option<String>,
    format: Option<String>,
}

/// How the scan column of a fit input file is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitInputKind {
    /// Spatial length scale in µm.
    LengthUm,
    /// Tip-electrode voltage in V (requires `[trap.hardware]`).
    TipVoltage,
}

/// Fully resolved, validated configuration in SI units.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub species: IonSpecies,
    pub species_b: IonSpecies,
    pub registry: SpeciesRegistry,
    pub hardware: Option<TrapHardware>,
    /// Radial secular frequency (rad/s).
    pub omega_r: f64,
    pub n: usize,
    /// Excitation angle (rad).
    pub alpha: f64,
    pub na: f64,
    /// Fixed length scale (m) for geometry commands; the smallest stable
    /// scale when absent.
    pub l: Option<f64>,
    pub n_list: Vec<usize>,
    pub na_list: Vec<f64>,
    /// Pattern grid limit (rad) and size.
    pub beta_max: f64,
    pub beta_points: usize,
    /// Optional per-ion phase offsets (rad, first entry 0).
    pub phases: Option<Vec<f64>>,
    pub thermal: bool,
    pub thermal_keff: ThermalKeff,
    pub equidistant: bool,
    /// Thermal-state temperature (K); species Doppler limit when absent.
    pub temperature: Option<f64>,
    /// Scan window override (m).
    pub l_range: Option<(f64, f64)>,
    pub samples: usize,
    pub seed: u64,
    pub fit_input_kind: FitInputKind,
    pub fit_c1: Option<f64>,
    pub fit_cbg: Option<f64>,
    pub fit_window: Option<usize>,
    pub fit_weighted: bool,
    pub output_path: Option<std::path::PathBuf>,
    pub format: OutputFormat,
}

fn config_error(message: impl Into<String>) -> CliError {
    CliError::Config(message.into())
}

fn env_var(name: &str) -> Option<String> {
    std::env::var(format!("{ENV_PREFIX}{name}")).ok()
}

fn env_parse<T: std::str::FromStr>(name: &str) -> Result<Option<T>> {
    match env_var(name) {
        None => Ok(None),
        Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
            config_error(format!("{ENV_PREFIX}{name}: cannot parse value {raw:?}"))
        }),
    }
}

/// Loads the file (if any), layers environment and CLI overrides on top,
/// and validates every field against its downstream precondition.
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let file: FileConfig = match &cli.config {
        None => FileConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(CliError::io(format!("reading {}", path.display())))?;
            toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?
        }
    };

    // Species registry: built-ins plus user definitions.
    let mut registry = SpeciesRegistry::with_builtins();
    for (name, def) in &file.species_defs {
        let species = IonSpecies::new(
            name,
            def.mass_amu,
            def.charge,
            def.wavelength_nm * 1e-9,
            TAU * def.linewidth_2pi_mhz * 1e6,
        )
        .map_err(|e| config_error(format!("species_defs.{name}: {e}")))?;
        registry.register(species);
    }

    let species_name = env_var("SPECIES")
        .or_else(|| file.species.clone())
        .unwrap_or_else(|| "ca40".to_string());
    let species = registry
        .get(&species_name)
        .ok_or_else(|| config_error(format!("species: {species_name:?} is not registered")))?
        .clone();

    let species_b_name = env_var("SPECIES_B")
        .or_else(|| file.compare.species_b.clone())
        .unwrap_or_else(|| "ba138".to_string());
    let species_b = registry
        .get(&species_b_name)
        .ok_or_else(|| {
            config_error(format!("compare.species_b: {species_b_name:?} is not registered"))
        })?
        .clone();

    // Trap: explicit hardware wins over a bare radial frequency.
    let hardware = match &file.trap.hardware {
        None => None,
        Some(hw) => Some(
            TrapHardware::new(
                hw.u_tip_v,
                hw.u_rf_v,
                TAU * hw.omega_rf_2pi_mhz * 1e6,
                hw.kappa,
                hw.z0_mm * 1e-3,
                hw.r0_mm * 1e-3,
            )
            .map_err(|e| config_error(format!("trap.hardware: {e}")))?,
        ),
    };
    let omega_r_mhz = env_parse::<f64>("OMEGA_R_2PI_MHZ")?
        .or(file.trap.omega_r_2pi_mhz)
        .unwrap_or(5.0);
    let omega_r = match &hardware {
        Some(hw) => ionglow::physical::radial_frequency(hw, &species),
        None => TAU * omega_r_mhz * 1e6,
    };
    if !(omega_r > 0.0) {
        return Err(config_error(format!(
            "trap.omega_r_2pi_mhz must be positive, got {omega_r_mhz}"
        )));
    }

    let n = env_parse::<usize>("N")?.or(file.scenario.n).unwrap_or(2);
    if n == 0 || n > ionglow::crystal::MAX_IONS {
        return Err(config_error(format!(
            "scenario.n must lie in 1..={}, got {n}",
            ionglow::crystal::MAX_IONS
        )));
    }

    let alpha_deg = env_parse::<f64>("ALPHA_DEG")?
        .or(file.scenario.alpha_deg)
        .unwrap_or(45.0);
    if !(alpha_deg > 0.0 && alpha_deg <= 90.0) {
        return Err(config_error(format!(
            "scenario.alpha_deg must lie in (0, 90], got {alpha_deg}"
        )));
    }

    let na = env_parse::<f64>("NA")?.or(file.scenario.na).unwrap_or(0.07);
    if !(na > 0.0 && na < 1.0) {
        return Err(config_error(format!(
            "scenario.na must lie in (0, 1), got {na}"
        )));
    }

    let l = match env_parse::<f64>("L_UM")?.or(file.scenario.l_um) {
        None => None,
        Some(l_um) => {
            if !(l_um > 0.0) {
                return Err(config_error(format!(
                    "scenario.l_um must be positive, got {l_um}"
                )));
            }
            Some(l_um * 1e-6)
        }
    };

    let n_list = file.scenario.n_list.clone().unwrap_or_else(|| vec![n]);
    if n_list.is_empty() || n_list.iter().any(|&x| x == 0 || x > ionglow::crystal::MAX_IONS) {
        return Err(config_error(format!(
            "scenario.n_list entries must lie in 1..={}",
            ionglow::crystal::MAX_IONS
        )));
    }
    let na_list = file.scenario.na_list.clone().unwrap_or_else(|| vec![na]);
    if na_list.is_empty() || na_list.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
        return Err(config_error(
            "scenario.na_list entries must lie in (0, 1)".to_string(),
        ));
    }

    let beta_max_deg = file.scenario.beta_max_deg.unwrap_or(10.0);
    if !(beta_max_deg > 0.0 && beta_max_deg <= 180.0) {
        return Err(config_error(format!(
            "scenario.beta_max_deg must lie in (0, 180], got {beta_max_deg}"
        )));
    }
    let beta_points = file.scenario.beta_points.unwrap_or(1001);
    if beta_points < 2 {
        return Err(config_error(format!(
            "scenario.beta_points must be at least 2, got {beta_points}"
        )));
    }

    let phases = match &file.scenario.phases_deg {
        None => None,
        Some(list) => {
            if list.len() != n {
                return Err(config_error(format!(
                    "scenario.phases_deg must have {n} entries, got {}",
                    list.len()
                )));
            }
            if list[0] != 0.0 {
                return Err(config_error(
                    "scenario.phases_deg: the first entry is the reference and must be 0"
                        .to_string(),
                ));
            }
            Some(list.iter().map(|p| p.to_radians()).collect())
        }
    };

    let thermal = env_parse::<bool>("THERMAL")?
        .or(file.mode.thermal)
        .unwrap_or(false);
    let keff_name = env_var("THERMAL_KEFF")
        .or_else(|| file.mode.thermal_keff.clone())
        .unwrap_or_else(|| "axial".to_string());
    let thermal_keff = match keff_name.as_str() {
        "axial" => ThermalKeff::Axial,
        "scalar" => ThermalKeff::Scalar,
        other => {
            return Err(config_error(format!(
                "mode.thermal_keff must be \"axial\" or \"scalar\", got {other:?}"
            )))
        }
    };
    let equidistant = file.mode.equidistant.unwrap_or(false);
    let temperature = match env_parse::<f64>("TEMPERATURE_MK")?.or(file.mode.temperature_mk) {
        None => None,
        Some(t_mk) => {
            if t_mk < 0.0 {
                return Err(config_error(format!(
                    "mode.temperature_mk must be non-negative, got {t_mk}"
                )));
            }
            Some(t_mk * 1e-3)
        }
    };

    let l_lo = env_parse::<f64>("L_LO_UM")?.or(file.scan.l_lo_um);
    let l_hi = env_parse::<f64>("L_HI_UM")?.or(file.scan.l_hi_um);
    let l_range = match (l_lo, l_hi) {
        (None, None) => None,
        (Some(lo), Some(hi)) => {
            if !(lo > 0.0 && lo < hi) {
                return Err(config_error(format!(
                    "scan.l_lo_um/l_hi_um must satisfy 0 < lo < hi, got [{lo}, {hi}]"
                )));
            }
            Some((lo * 1e-6, hi * 1e-6))
        }
        _ => {
            return Err(config_error(
                "scan.l_lo_um and scan.l_hi_um must be given together".to_string(),
            ))
        }
    };

    let samples = env_parse::<usize>("SAMPLES")?
        .or(file.scan.samples)
        .unwrap_or(ionglow::optimize::DEFAULT_SCAN_SAMPLES);
    if samples < 2 {
        return Err(config_error(format!(
            "scan.samples must be at least 2, got {samples}"
        )));
    }
    let seed = cli
        .seed
        .or(env_parse::<u64>("SEED")?)
        .or(file.scan.seed)
        .unwrap_or(0);

    let fit_input_kind = match file.fit.input_kind.as_deref().unwrap_or("l_um") {
        "l_um" => FitInputKind::LengthUm,
        "u_tip_v" => FitInputKind::TipVoltage,
        other => {
            return Err(config_error(format!(
                "fit.input_kind must be \"l_um\" or \"u_tip_v\", got {other:?}"
            )))
        }
    };
    if fit_input_kind == FitInputKind::TipVoltage && hardware.is_none() {
        return Err(config_error(
            "fit.input_kind = \"u_tip_v\" requires the [trap.hardware] section".to_string(),
        ));
    }
    for (key, value) in [("fit.c1", file.fit.c1), ("fit.cbg", file.fit.cbg)] {
        if let Some(v) = value {
            if v < 0.0 {
                return Err(config_error(format!("{key} must be non-negative, got {v}")));
            }
        }
    }

    let output_path = cli
        .output
        .clone()
        .or_else(|| env_var("OUTPUT").map(std::path::PathBuf::from))
        .or_else(|| file.output.path.clone().map(std::path::PathBuf::from));
    let format = match cli.format {
        Some(f) => f,
        None => match env_var("FORMAT")
            .or_else(|| file.output.format.clone())
            .as_deref()
        {
            None | Some("csv") => OutputFormat::Csv,
            Some("json") => OutputFormat::Json,
            Some(other) => {
                return Err(config_error(format!(
                    "output.format must be \"csv\" or \"json\", got {other:?}"
                )))
            }
        },
    };

    Ok(RunConfig {
        species,
        species_b,
        registry,
        hardware,
        omega_r,
        n,
        alpha: alpha_deg.to_radians(),
        na,
        l,
        n_list,
        na_list,
        beta_max: beta_max_deg.to_radians(),
        beta_points,
        phases,
        thermal,
        thermal_keff,
        equidistant,
        temperature,
        l_range,
        samples,
        seed,
        fit_input_kind,
        fit_c1: file.fit.c1,
        fit_cbg: file.fit.cbg,
        fit_window: file.fit.window,
        fit_weighted: file.fit.weighted.unwrap_or(false),
        output_path,
        format,
    })
}
