//! Photon flux through a numerical aperture centered on the trap axis and
//! the relative collection-efficiency enhancement.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::adaptive_simpson;
use crate::scattering::ScatterScenario;

/// Relative accuracy target of the flux quadrature.
const FLUX_REL_TOL: f64 = 1e-8;
/// Absolute floor below which the tolerance stops tightening.
const FLUX_ABS_FLOOR: f64 = 1e-12;

/// Collection cone along the +z axis, parameterized by the numerical
/// aperture NA = sin θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollectionAperture {
    na: f64,
    half_angle: f64,
}

impl CollectionAperture {
    pub fn from_na(na: f64) -> Result<Self> {
        if !(na > 0.0 && na < 1.0) {
            return Err(Error::InvalidInput(format!(
                "numerical aperture must lie in (0, 1), got {na}"
            )));
        }
        Ok(CollectionAperture {
            na,
            half_angle: na.asin(),
        })
    }

    pub fn from_half_angle(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidInput(format!(
                "aperture half-angle must lie in (0, π/2), got {theta} rad"
            )));
        }
        Ok(CollectionAperture {
            na: theta.sin(),
            half_angle: theta,
        })
    }

    pub fn na(&self) -> f64 {
        self.na
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    /// Solid angle of the cone (sr): 2π(1 − cos θ).
    pub fn solid_angle(&self) -> f64 {
        std::f64::consts::TAU * (1.0 - self.half_angle.cos())
    }
}

/// Flux collected from a single ion, 2π(1 − cos θ); the pattern is 1
/// everywhere so the cap integral is exact.
pub fn single_ion_flux(aperture: &CollectionAperture) -> f64 {
    aperture.solid_angle()
}

/// Photon flux of the scenario within the aperture,
/// `Φ_NA = 2π ∫₀^θ I(β) sin β dβ`.
///
/// The integrand oscillates with an angular period no shorter than
/// ~π/(k l span θ) inside the cone, so the quadrature starts from
/// `max(64, 8 ⌈k l span θ / π⌉)` panels before refining adaptively.
pub fn flux(scenario: &ScatterScenario, aperture: &CollectionAperture) -> Result<f64> {
    let geometry = scenario.geometry();
    let theta = aperture.half_angle();
    let fringe_scale =
        scenario.wavenumber() * geometry.length_scale() * geometry.span() * theta
            / std::f64::consts::PI;
    let panels = 64_usize.max(8 * fringe_scale.ceil() as usize);

    let mut integrand = |beta: f64| scenario.intensity(beta) * beta.sin();
    let integral = adaptive_simpson(
        &mut integrand,
        0.0,
        theta,
        FLUX_REL_TOL,
        FLUX_ABS_FLOOR,
        panels,
    )?;
    Ok(std::f64::consts::TAU * integral)
}

/// Context echoed alongside an enhancement value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub ion_count: usize,
    /// Spatial length scale (m).
    pub length_scale: f64,
    /// Excitation angle (rad).
    pub excitation_angle: f64,
    pub numerical_aperture: f64,
    pub phases: Option<Vec<f64>>,
    pub thermal: bool,
}

/// Collected flux and the derived efficiency figures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnhancementResult {
    /// Φ_NA, the aperture-weighted flux (sr, single-ion normalization).
    pub flux_na: f64,
    /// P_D = Φ_NA / (4π n), with the total per-ion emission taken as 4π.
    pub collection_efficiency: f64,
    /// P_D,rel = Φ_NA / (Φ_NA(1) · n), the enhancement over n independent
    /// single ions.
    pub relative_enhancement: f64,
    pub context: ScenarioSummary,
}

/// Collection efficiency of the scenario and its enhancement relative to
/// the same number of independent single-ion emitters.
pub fn relative_enhancement(
    scenario: &ScatterScenario,
    aperture: &CollectionAperture,
) -> Result<EnhancementResult> {
    let n = scenario.geometry().ion_count();
    let flux_na = flux(scenario, aperture)?;
    let single = single_ion_flux(aperture);
    let relative = flux_na / (single * n as f64);
    Ok(EnhancementResult {
        flux_na,
        collection_efficiency: flux_na / (4.0 * std::f64::consts::PI * n as f64),
        relative_enhancement: relative,
        context: ScenarioSummary {
            ion_count: n,
            length_scale: scenario.geometry().length_scale(),
            excitation_angle: scenario.excitation_angle(),
            numerical_aperture: aperture.na(),
            phases: scenario.phases().map(<[f64]>::to_vec),
            thermal: scenario.thermal().is_some(),
        },
    })
}
