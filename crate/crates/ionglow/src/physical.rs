//! Ion species, trap hardware, and the voltage-to-frequency conversions of a
//! linear Paul trap.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::Serialize;

use crate::constants::{ATOMIC_MASS_UNIT, BOLTZMANN, ELEMENTARY_CHARGE, HBAR};
use crate::error::{Error, Result};

/// A trapped-ion species characterized by the elastic-scattering transition
/// used for detection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IonSpecies {
    name: String,
    /// Ion mass (kg).
    mass: f64,
    /// Ion charge (C).
    charge: f64,
    /// Wavelength of the scattering transition (m).
    wavelength: f64,
    /// Natural linewidth of the cooling transition (rad/s); only enters
    /// through the Doppler temperature.
    linewidth: f64,
}

impl IonSpecies {
    /// Builds a species from an atomic mass in u and a charge state in
    /// units of the elementary charge.
    pub fn new(
        name: &str,
        mass_amu: f64,
        charge_multiple: u32,
        wavelength: f64,
        linewidth: f64,
    ) -> Result<Self> {
        if !(mass_amu > 0.0) {
            return Err(Error::InvalidInput(format!(
                "species mass must be positive, got {mass_amu} u"
            )));
        }
        if charge_multiple == 0 {
            return Err(Error::InvalidInput(
                "species charge must be a positive multiple of e".into(),
            ));
        }
        if !(wavelength > 0.0) {
            return Err(Error::InvalidInput(format!(
                "scattering wavelength must be positive, got {wavelength} m"
            )));
        }
        if !(linewidth > 0.0) {
            return Err(Error::InvalidInput(format!(
                "transition linewidth must be positive, got {linewidth} rad/s"
            )));
        }
        Ok(IonSpecies {
            name: name.to_string(),
            mass: mass_amu * ATOMIC_MASS_UNIT,
            charge: charge_multiple as f64 * ELEMENTARY_CHARGE,
            wavelength,
            linewidth,
        })
    }

    /// ⁴⁰Ca⁺ scattering at 397 nm. The linewidth is the tabulated value for
    /// the S₁/₂–P₁/₂ cooling transition, 2π × 21.6 MHz.
    pub fn calcium_40() -> Self {
        IonSpecies::new("ca40", 39.962_590_9, 1, 397e-9, TAU * 21.6e6)
            .expect("built-in species is valid")
    }

    /// ¹³⁸Ba⁺ scattering at 493 nm; tabulated linewidth 2π × 20.1 MHz.
    pub fn barium_138() -> Self {
        IonSpecies::new("ba138", 137.905_247_2, 1, 493e-9, TAU * 20.1e6)
            .expect("built-in species is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Ion mass (kg).
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Ion charge (C).
    pub fn charge(&self) -> f64 {
        self.charge
    }

    /// Scattering wavelength (m).
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Natural linewidth (rad/s).
    pub fn linewidth(&self) -> f64 {
        self.linewidth
    }

    /// Wavenumber 2π/λ of the scattering transition (rad/m).
    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength
    }
}

/// Named registry of ion species, preloaded with the built-ins.
#[derive(Debug, Clone, Default)]
pub struct SpeciesRegistry {
    entries: BTreeMap<String, IonSpecies>,
}

impl SpeciesRegistry {
    /// Registry containing `ca40` and `ba138`.
    pub fn with_builtins() -> Self {
        let mut reg = SpeciesRegistry::default();
        reg.register(IonSpecies::calcium_40());
        reg.register(IonSpecies::barium_138());
        reg
    }

    /// Inserts or replaces a species under its own name.
    pub fn register(&mut self, species: IonSpecies) {
        self.entries.insert(species.name.clone(), species);
    }

    pub fn get(&self, name: &str) -> Option<&IonSpecies> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Electrode voltages and geometry of a linear Paul trap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapHardware {
    /// Static voltage on the axial tip electrodes (V).
    pub tip_voltage: f64,
    /// RF amplitude on the radial electrodes (V).
    pub rf_voltage: f64,
    /// RF drive angular frequency (rad/s).
    pub rf_frequency: f64,
    /// Dimensionless geometric factor of the tip electrodes.
    pub geometric_factor: f64,
    /// Half the tip–tip distance (m).
    pub axial_half_distance: f64,
    /// Radial electrode distance (m).
    pub radial_distance: f64,
}

impl TrapHardware {
    pub fn new(
        tip_voltage: f64,
        rf_voltage: f64,
        rf_frequency: f64,
        geometric_factor: f64,
        axial_half_distance: f64,
        radial_distance: f64,
    ) -> Result<Self> {
        let fields = [
            ("tip voltage", tip_voltage),
            ("RF voltage", rf_voltage),
            ("RF frequency", rf_frequency),
            ("geometric factor", geometric_factor),
            ("axial half distance", axial_half_distance),
            ("radial distance", radial_distance),
        ];
        for (label, value) in fields {
            if !(value > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "trap {label} must be positive, got {value}"
                )));
            }
        }
        Ok(TrapHardware {
            tip_voltage,
            rf_voltage,
            rf_frequency,
            geometric_factor,
            axial_half_distance,
            radial_distance,
        })
    }
}

/// Secular frequencies of the time-averaged trap potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapFrequencies {
    /// Axial secular frequency (rad/s).
    pub axial: f64,
    /// Radial secular frequency (rad/s).
    pub radial: f64,
}

/// Axial secular frequency √(2 q U_tip κ / (m z₀²)) (rad/s).
pub fn axial_frequency(hw: &TrapHardware, species: &IonSpecies) -> f64 {
    let z0 = hw.axial_half_distance;
    (2.0 * species.charge() * hw.tip_voltage * hw.geometric_factor / (species.mass() * z0 * z0))
        .sqrt()
}

/// Radial secular frequency q U_rf / (m r₀² ω_rf √2) (rad/s).
pub fn radial_frequency(hw: &TrapHardware, species: &IonSpecies) -> f64 {
    let r0 = hw.radial_distance;
    species.charge() * hw.rf_voltage
        / (species.mass() * r0 * r0 * hw.rf_frequency * std::f64::consts::SQRT_2)
}

/// Both secular frequencies at once.
pub fn trap_frequencies(hw: &TrapHardware, species: &IonSpecies) -> TrapFrequencies {
    TrapFrequencies {
        axial: axial_frequency(hw, species),
        radial: radial_frequency(hw, species),
    }
}

/// Doppler cooling limit ħΓ/(2 k_B) (K).
pub fn doppler_temperature(species: &IonSpecies) -> f64 {
    HBAR * species.linewidth() / (2.0 * BOLTZMANN)
}
