//! Far-field angular intensity of light scattered elastically from the ion
//! string.
//!
//! The observation angle β is measured from the +z trap axis (the detector
//! sits at β = 0); the excitation beam propagates in the z–x plane at angle
//! α to the axis. With identical unit amplitudes per ion, the pattern is
//! the double sum over ion pairs
//!
//! ```text
//! I(β) = Σ_ab D_ab(β) cos(k Δ_ab(β) + φ'_a − φ'_b),
//! Δ_ab(β) = l (v_a − v_b)(cos α − cos β),
//! ```
//!
//! normalized so a single ion gives 1 everywhere. `D_ab` is the thermal
//! dephasing factor `exp(−½ k_eff² σ²_ab)`, equal to 1 without a thermal
//! state. Because the ions sit on the z axis the pattern carries no
//! azimuthal dependence.

use serde::Serialize;

use crate::crystal::CrystalGeometry;
use crate::error::{Error, Result};
use crate::numeric::Matrix;

/// Which effective wavevector enters the thermal dephasing exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThermalKeff {
    /// Axial projection `k (cos β − cos α)`: only z displacements
    /// fluctuate, so the damping follows the observation angle and is
    /// exactly 1 at β = α.
    Axial,
    /// Fixed magnitude of the scattering-vector change for detection along
    /// the axis, `2 k sin(α/2)`, independent of β.
    Scalar,
}

/// Thermal position spread of the crystal, as the pair-distance variance
/// matrix (m²) from [`crate::crystal::pair_distance_variance`].
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalState {
    variance: Matrix,
    keff: ThermalKeff,
}

impl ThermalState {
    pub fn new(variance: Matrix, keff: ThermalKeff) -> Self {
        ThermalState { variance, keff }
    }

    pub fn variance(&self) -> &Matrix {
        &self.variance
    }

    pub fn keff(&self) -> ThermalKeff {
        self.keff
    }
}

/// A fully specified scattering configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterScenario {
    geometry: CrystalGeometry,
    wavenumber: f64,
    excitation_angle: f64,
    phases: Option<Vec<f64>>,
    thermal: Option<ThermalState>,
}

impl ScatterScenario {
    /// Scenario with equal phases and no thermal motion.
    pub fn new(geometry: CrystalGeometry, wavenumber: f64, excitation_angle: f64) -> Result<Self> {
        if !(wavenumber > 0.0) {
            return Err(Error::InvalidInput(format!(
                "wavenumber must be positive, got {wavenumber} rad/m"
            )));
        }
        if !(excitation_angle > 0.0 && excitation_angle <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidInput(format!(
                "excitation angle must lie in (0, π/2], got {excitation_angle} rad"
            )));
        }
        Ok(ScatterScenario {
            geometry,
            wavenumber,
            excitation_angle,
            phases: None,
            thermal: None,
        })
    }

    /// Adds per-ion phase offsets; the first entry is the reference and
    /// must be zero.
    pub fn with_phases(mut self, phases: Vec<f64>) -> Result<Self> {
        if phases.len() != self.geometry.ion_count() {
            return Err(Error::InvalidInput(format!(
                "expected {} phase offsets, got {}",
                self.geometry.ion_count(),
                phases.len()
            )));
        }
        if phases[0] != 0.0 {
            return Err(Error::InvalidInput(
                "the first ion is the phase reference and must have offset 0".into(),
            ));
        }
        self.phases = Some(phases);
        Ok(self)
    }

    /// Adds thermal dephasing from a pair-distance variance matrix.
    pub fn with_thermal(mut self, thermal: ThermalState) -> Result<Self> {
        let n = self.geometry.ion_count();
        if thermal.variance.rows() != n || thermal.variance.cols() != n {
            return Err(Error::InvalidInput(format!(
                "variance matrix must be {n}×{n}, got {}×{}",
                thermal.variance.rows(),
                thermal.variance.cols()
            )));
        }
        self.thermal = Some(thermal);
        Ok(self)
    }

    pub fn geometry(&self) -> &CrystalGeometry {
        &self.geometry
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn excitation_angle(&self) -> f64 {
        self.excitation_angle
    }

    pub fn phases(&self) -> Option<&[f64]> {
        self.phases.as_deref()
    }

    pub fn thermal(&self) -> Option<&ThermalState> {
        self.thermal.as_ref()
    }

    /// Normalized far-field intensity at observation angle `beta`.
    pub fn intensity(&self, beta: f64) -> f64 {
        let n = self.geometry.ion_count();
        let v = self.geometry.positions();
        let geometric_phase = self.wavenumber
            * self.geometry.length_scale()
            * (self.excitation_angle.cos() - beta.cos());

        let keff_sq = self.thermal.as_ref().map(|t| {
            let keff = match t.keff {
                ThermalKeff::Axial => self.wavenumber * (beta.cos() - self.excitation_angle.cos()),
                ThermalKeff::Scalar => {
                    2.0 * self.wavenumber * (0.5 * self.excitation_angle).sin()
                }
            };
            keff * keff
        });

        let mut total = n as f64;
        for a in 0..n {
            for b in a + 1..n {
                let mut phase = geometric_phase * (v[a] - v[b]);
                if let Some(phases) = &self.phases {
                    phase += phases[a] - phases[b];
                }
                let damping = match (&self.thermal, keff_sq) {
                    (Some(t), Some(k2)) if k2 > 0.0 => {
                        (-0.5 * k2 * t.variance.get(a, b)).exp()
                    }
                    _ => 1.0,
                };
                total += 2.0 * damping * phase.cos();
            }
        }
        total
    }

    /// Intensity sampled over a strictly increasing grid of observation
    /// angles within [0, π].
    pub fn pattern(&self, grid: &[f64]) -> Result<AngularPattern> {
        if grid.is_empty() {
            return Err(Error::InvalidInput("angle grid is empty".into()));
        }
        for w in grid.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidInput(
                    "angle grid must be strictly increasing".into(),
                ));
            }
        }
        if grid[0] < 0.0 || *grid.last().unwrap() > std::f64::consts::PI {
            return Err(Error::InvalidInput(
                "angle grid must lie within [0, π]".into(),
            ));
        }
        Ok(AngularPattern {
            angles: grid.to_vec(),
            intensities: grid.iter().map(|b| self.intensity(*b)).collect(),
        })
    }
}

/// Sampled far-field pattern.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngularPattern {
    /// Observation angles from the +z axis (rad).
    pub angles: Vec<f64>,
    /// Normalized intensities (single ion ≡ 1).
    pub intensities: Vec<f64>,
}

/// Optical path difference between the fields scattered from ions `a` and
/// `b` (m): `l (v_a − v_b)(cos α − cos β)`. Antisymmetric in `(a, b)`.
pub fn path_difference(
    geometry: &CrystalGeometry,
    alpha: f64,
    beta: f64,
    a: usize,
    b: usize,
) -> f64 {
    let v = geometry.positions();
    geometry.length_scale() * (v[a] - v[b]) * (alpha.cos() - beta.cos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI, TAU};

    const WAVELENGTH: f64 = 397e-9;

    fn wavenumber() -> f64 {
        TAU / WAVELENGTH
    }

    #[test]
    fn path_difference_vanishes_at_matching_angles() {
        let geom = CrystalGeometry::harmonic(3, 5e-6).unwrap();
        assert_eq!(path_difference(&geom, FRAC_PI_4, FRAC_PI_4, 0, 2), 0.0);
        assert_eq!(path_difference(&geom, FRAC_PI_4, 0.3, 1, 1), 0.0);
    }

    #[test]
    fn path_difference_is_antisymmetric() {
        let geom = CrystalGeometry::harmonic(4, 3e-6).unwrap();
        let d = path_difference(&geom, FRAC_PI_4, 0.1, 0, 3);
        let r = path_difference(&geom, FRAC_PI_4, 0.1, 3, 0);
        assert_eq!(d, -r);
    }

    #[test]
    fn two_ion_axial_path_difference_value() {
        // l = 1 μm, α = 45°, β = 0: Δ = 2^(1/3) μm (cos 45° − 1).
        let geom = CrystalGeometry::harmonic(2, 1e-6).unwrap();
        let d = path_difference(&geom, FRAC_PI_4, 0.0, 1, 0);
        let expect = 2.0_f64.cbrt() * 1e-6 * (FRAC_PI_4.cos() - 1.0);
        assert!((d - expect).abs() < 1e-18);
        assert!((d + 3.690e-7).abs() < 1e-10, "got {d}");
    }

    #[test]
    fn single_ion_intensity_is_flat() {
        let geom = CrystalGeometry::harmonic(1, 1e-6).unwrap();
        let scenario = ScatterScenario::new(geom, wavenumber(), FRAC_PI_4).unwrap();
        for beta in [0.0, 0.3, 1.1, PI] {
            assert_eq!(scenario.intensity(beta), 1.0);
        }
        let pattern = scenario.pattern(&[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(pattern.intensities, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn forward_intensity_is_n_squared() {
        for n in [2, 3, 5, 8] {
            let geom = CrystalGeometry::harmonic(n, 4e-6).unwrap();
            let scenario = ScatterScenario::new(geom, wavenumber(), FRAC_PI_4).unwrap();
            let got = scenario.intensity(FRAC_PI_4);
            assert!(
                (got - (n * n) as f64).abs() < 1e-9,
                "n = {n}, got {got}"
            );
        }
    }

    #[test]
    fn two_ion_destructive_node_on_axis() {
        // Choose l so the single pair phase k l Δv (cos α − 1) = −π.
        let dv = 2.0_f64.cbrt();
        let l = WAVELENGTH / (2.0 * dv * (1.0 - FRAC_PI_4.cos()));
        let geom = CrystalGeometry::harmonic(2, l).unwrap();
        let scenario = ScatterScenario::new(geom, wavenumber(), FRAC_PI_4).unwrap();
        assert!(scenario.intensity(0.0).abs() < 1e-9);
    }

    #[test]
    fn infinite_variance_reaches_incoherent_floor() {
        let n = 4;
        let geom = CrystalGeometry::harmonic(n, 4e-6).unwrap();
        let mut variance = Matrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    variance.set(a, b, 1e10);
                }
            }
        }
        let scenario = ScatterScenario::new(geom, wavenumber(), FRAC_PI_4)
            .unwrap()
            .with_thermal(ThermalState::new(variance, ThermalKeff::Axial))
            .unwrap();
        // Away from β = α the damping kills every off-diagonal term.
        assert!((scenario.intensity(0.0) - n as f64).abs() < 1e-9);
        // At β = α the axial momentum transfer vanishes and the coherent
        // peak survives untouched.
        assert!((scenario.intensity(FRAC_PI_4) - (n * n) as f64).abs() < 1e-9);
    }

    #[test]
    fn scalar_keff_damps_even_at_matching_angle() {
        let n = 3;
        let geom = CrystalGeometry::harmonic(n, 4e-6).unwrap();
        let mut variance = Matrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    variance.set(a, b, 1e10);
                }
            }
        }
        let scenario = ScatterScenario::new(geom, wavenumber(), FRAC_PI_4)
            .unwrap()
            .with_thermal(ThermalState::new(variance, ThermalKeff::Scalar))
            .unwrap();
        assert!((scenario.intensity(FRAC_PI_4) - n as f64).abs() < 1e-9);
    }

    #[test]
    fn phase_offsets_shift_the_pattern() {
        let geom = CrystalGeometry::harmonic(2, 2.5e-6).unwrap();
        let k = wavenumber();
        let base = ScatterScenario::new(geom.clone(), k, FRAC_PI_4).unwrap();
        let i0 = base.intensity(0.0);
        // Compensate the β = 0 pair phase exactly: intensity returns to n².
        let v = geom.positions().to_vec();
        let pair_phase = k * geom.length_scale() * (v[1] - v[0]) * (FRAC_PI_4.cos() - 1.0);
        let tuned = ScatterScenario::new(geom, k, FRAC_PI_4)
            .unwrap()
            .with_phases(vec![0.0, -pair_phase])
            .unwrap();
        assert!((tuned.intensity(0.0) - 4.0).abs() < 1e-10);
        assert!(tuned.intensity(0.0) >= i0);
    }

    #[test]
    fn scenario_validation() {
        let geom = CrystalGeometry::harmonic(2, 2e-6).unwrap();
        assert!(ScatterScenario::new(geom.clone(), 0.0, FRAC_PI_4).is_err());
        assert!(ScatterScenario::new(geom.clone(), 1.0, 0.0).is_err());
        assert!(ScatterScenario::new(geom.clone(), 1.0, 2.0).is_err());
        let s = ScatterScenario::new(geom.clone(), wavenumber(), FRAC_PI_4).unwrap();
        assert!(s.clone().with_phases(vec![0.0]).is_err());
        assert!(s.clone().with_phases(vec![0.1, 0.0]).is_err());
        assert!(s
            .clone()
            .with_thermal(ThermalState::new(Matrix::zeros(3, 3), ThermalKeff::Axial))
            .is_err());
        let p = s.pattern(&[0.2, 0.1]);
        assert!(p.is_err());
        assert!(s.pattern(&[-0.1, 0.2]).is_err());
        assert!(s.pattern(&[0.1, 4.0]).is_err());
    }
}
