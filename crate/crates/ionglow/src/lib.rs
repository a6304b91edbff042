//! Simulation and optimization of coherent photon collection from linear
//! trapped-ion crystals.
//!
//! A string of ions held in a single harmonic axial potential scatters
//! excitation light elastically; the scattered fields interfere in the far
//! field along the trap axis. This crate computes the pieces of that picture
//! end to end:
//!
//! * [`physical`] — ion species, trap-voltage-to-frequency conversions, and
//!   the Doppler cooling limit,
//! * [`crystal`] — equilibrium ion positions, stability-limited length-scale
//!   bounds, and axial normal modes,
//! * [`scattering`] — far-field angular intensity patterns with optional
//!   per-ion phase control and thermal dephasing,
//! * [`collection`] — photon flux within a numerical aperture and the
//!   relative collection-efficiency enhancement,
//! * [`optimize`] — maximization of the enhancement over the crystal length
//!   scale, equidistant spacings, or per-ion phases,
//! * [`analysis`] — experimental count-rate reduction, coherent-fraction
//!   fitting, and species comparisons.
//!
//! All quantities are SI (meters, seconds, radians, kelvin); angular
//! frequencies are rad/s throughout.

pub mod analysis;
pub mod collection;
pub mod constants;
pub mod crystal;
mod error;
pub mod numeric;
pub mod optimize;
pub mod physical;
pub mod scattering;

pub use error::{Error, Result};

pub use analysis::{
    absolute_efficiency, fit_coherent_fraction, normalize_counts, species_comparison,
    CoherentFit, CountRecord, SpeciesComparison,
};
pub use collection::{flux, relative_enhancement, CollectionAperture, EnhancementResult};
pub use crystal::{
    axial_modes, equilibrium_positions, length_scale, length_scale_bounds,
    pair_distance_variance, AxialModeSet, CrystalGeometry, LengthScaleBounds,
};
pub use optimize::{
    optimize_equidistant, optimize_length_scale, optimize_phases, sweep, Argmax, OptimumRecord,
    ScanMode, ScanSpec, SweepCell,
};
pub use physical::{
    axial_frequency, doppler_temperature, radial_frequency, IonSpecies, SpeciesRegistry,
    TrapFrequencies, TrapHardware,
};
pub use scattering::{path_difference, AngularPattern, ScatterScenario, ThermalKeff, ThermalState};
