//! Equilibrium geometry of a linear ion crystal in a single harmonic axial
//! potential, the stability-limited length-scale window, and the axial
//! normal modes.
//!
//! Positions are parameterized by one spatial length scale `l` and the
//! dimensionless equilibrium coordinates `v`, so that the physical position
//! of ion `i` is `z_i = l v_i`. In these units the potential of the
//! crystal is `Σ v_i²/2 + Σ_{a<b} 1/|v_a − v_b|`.

use serde::Serialize;

use crate::constants::{BOLTZMANN, FOUR_PI_EPS0, HBAR};
use crate::error::{Error, Result};
use crate::numeric::{jacobi_eigen, solve_linear, Matrix};
use crate::physical::IonSpecies;

/// Largest supported crystal.
pub const MAX_IONS: usize = 50;

/// Coefficient of the linear–zigzag stability criterion
/// (ω_z/ω_r)² < `STABILITY_COEFF` · n^`STABILITY_EXPONENT`.
pub const STABILITY_COEFF: f64 = 2.94;
pub const STABILITY_EXPONENT: f64 = -1.8;

const FORCE_TOLERANCE: f64 = 1e-12;
const MAX_NEWTON_ITERATIONS: usize = 200;

/// Residual of the dimensionless force balance,
/// `r_i = v_i − Σ_{j<i} (v_i−v_j)⁻² + Σ_{j>i} (v_j−v_i)⁻²`,
/// which is also the gradient of the dimensionless potential.
fn force_residual(positions: &[f64], residual: &mut [f64]) {
    let n = positions.len();
    for i in 0..n {
        let mut r = positions[i];
        for j in 0..n {
            if j == i {
                continue;
            }
            let d = positions[i] - positions[j];
            r -= d.signum() / (d * d);
        }
        residual[i] = r;
    }
}

/// Hessian of the dimensionless potential:
/// diagonal `1 + 2 Σ_{m≠i} |v_i−v_m|⁻³`, off-diagonal `−2 |v_i−v_j|⁻³`.
pub(crate) fn dimensionless_hessian(positions: &[f64]) -> Matrix {
    let n = positions.len();
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            let mut diag = 1.0;
            for m in 0..n {
                if m != i {
                    diag += 2.0 / (positions[i] - positions[m]).abs().powi(3);
                }
            }
            diag
        } else {
            -2.0 / (positions[i] - positions[j]).abs().powi(3)
        }
    })
}

fn max_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Dimensionless equilibrium positions of `n` ions, ascending.
///
/// Damped Newton iteration on the force-balance system, started from a
/// uniformly spaced chain with the empirical central spacing
/// `2.018 / n^0.559`. The Jacobian of the force system is the potential
/// Hessian, which is positive definite at the (unique) minimum.
pub fn equilibrium_positions(n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > MAX_IONS {
        return Err(Error::InvalidInput(format!(
            "ion count must be between 1 and {MAX_IONS}, got {n}"
        )));
    }
    if n == 1 {
        return Ok(vec![0.0]);
    }

    let spacing = 2.018 / (n as f64).powf(0.559);
    let mut positions: Vec<f64> = (0..n)
        .map(|i| spacing * (i as f64 - (n as f64 - 1.0) / 2.0))
        .collect();

    let mut residual = vec![0.0; n];
    force_residual(&positions, &mut residual);
    let mut norm = max_norm(&residual);

    for _ in 0..MAX_NEWTON_ITERATIONS {
        if norm < FORCE_TOLERANCE {
            // Exact symmetrization: average out the residual asymmetry of
            // the converged iterate so sign-flip symmetry holds to rounding.
            for i in 0..n / 2 {
                let s = 0.5 * (positions[i] - positions[n - 1 - i]);
                positions[i] = s;
                positions[n - 1 - i] = -s;
            }
            if n % 2 == 1 {
                positions[n / 2] = 0.0;
            }
            return Ok(positions);
        }

        let jacobian = dimensionless_hessian(&positions);
        let rhs: Vec<f64> = residual.iter().map(|r| -r).collect();
        let step = solve_linear(jacobian, rhs)?;

        // Backtracking damping: halve the step until the residual shrinks.
        let mut factor = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let trial: Vec<f64> = positions
                .iter()
                .zip(&step)
                .map(|(p, s)| p + factor * s)
                .collect();
            let mut ordered = true;
            for w in trial.windows(2) {
                if w[1] <= w[0] {
                    ordered = false;
                    break;
                }
            }
            if ordered {
                force_residual(&trial, &mut residual);
                let trial_norm = max_norm(&residual);
                if trial_norm < norm {
                    positions = trial;
                    norm = trial_norm;
                    improved = true;
                    break;
                }
            }
            factor *= 0.5;
        }
        if !improved {
            break;
        }
    }

    if norm < FORCE_TOLERANCE {
        Ok(positions)
    } else {
        Err(Error::SolverFailure {
            what: "equilibrium-position Newton iteration",
            iterations: MAX_NEWTON_ITERATIONS,
            residual: norm,
        })
    }
}

/// Ion-string geometry: a length scale (m) and dimensionless positions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrystalGeometry {
    length_scale: f64,
    positions: Vec<f64>,
}

impl CrystalGeometry {
    /// Equilibrium crystal of `n` ions in a harmonic potential with the
    /// given length scale.
    pub fn harmonic(n: usize, length_scale: f64) -> Result<Self> {
        let positions = equilibrium_positions(n)?;
        CrystalGeometry::from_positions(length_scale, positions)
    }

    /// Regularly spaced string with nearest-neighbor distance `spacing`.
    pub fn equidistant(n: usize, spacing: f64) -> Result<Self> {
        if n == 0 || n > MAX_IONS {
            return Err(Error::InvalidInput(format!(
                "ion count must be between 1 and {MAX_IONS}, got {n}"
            )));
        }
        let positions = (0..n)
            .map(|i| i as f64 - (n as f64 - 1.0) / 2.0)
            .collect();
        CrystalGeometry::from_positions(spacing, positions)
    }

    /// Geometry from explicit dimensionless positions (strictly ascending,
    /// centered on the origin).
    pub fn from_positions(length_scale: f64, positions: Vec<f64>) -> Result<Self> {
        if !(length_scale > 0.0) {
            return Err(Error::InvalidInput(format!(
                "length scale must be positive, got {length_scale} m"
            )));
        }
        if positions.is_empty() {
            return Err(Error::InvalidInput("geometry needs at least one ion".into()));
        }
        for w in positions.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidInput(
                    "dimensionless positions must be strictly increasing".into(),
                ));
            }
        }
        let center: f64 = positions.iter().sum::<f64>() / positions.len() as f64;
        if center.abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "positions must be centered on the origin (center of mass {center:.3e})"
            )));
        }
        Ok(CrystalGeometry {
            length_scale,
            positions,
        })
    }

    pub fn ion_count(&self) -> usize {
        self.positions.len()
    }

    /// Common spatial length scale (m).
    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    /// Dimensionless positions, ascending.
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Physical positions `z_i = l v_i` (m).
    pub fn z_positions(&self) -> Vec<f64> {
        self.positions.iter().map(|v| v * self.length_scale).collect()
    }

    /// Dimensionless extent `v_n − v_1` (0 for a single ion).
    pub fn span(&self) -> f64 {
        match self.positions.len() {
            0 | 1 => 0.0,
            n => self.positions[n - 1] - self.positions[0],
        }
    }

    /// Mean nearest-neighbor distance (m); 0 for a single ion.
    pub fn mean_spacing(&self) -> f64 {
        let n = self.positions.len();
        if n < 2 {
            0.0
        } else {
            self.length_scale * self.span() / (n as f64 - 1.0)
        }
    }
}

/// Spatial length scale `l = (q² / (4π ε₀ m ω_z²))^(1/3)` (m).
pub fn length_scale(omega_z: f64, species: &IonSpecies) -> f64 {
    let q = species.charge();
    (q * q / (FOUR_PI_EPS0 * species.mass() * omega_z * omega_z)).cbrt()
}

/// Axial frequency that produces the given length scale; inverse of
/// [`length_scale`].
pub fn axial_frequency_for_length(length: f64, species: &IonSpecies) -> f64 {
    let q = species.charge();
    (q * q / (FOUR_PI_EPS0 * species.mass() * length.powi(3))).sqrt()
}

/// Feasible window of axial confinement and the matching length scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthScaleBounds {
    /// Smallest stable length scale (m), set by the linear–zigzag limit.
    pub l_min: f64,
    /// Largest useful length scale (m), set by the weakest axial
    /// confinement that still resolves two-ion interference at the Doppler
    /// limit.
    pub l_max: f64,
    /// Axial frequency at `l_min` (rad/s).
    pub omega_z_max: f64,
    /// Axial frequency at `l_max` (rad/s).
    pub omega_z_min: f64,
}

/// Length-scale window for `n` ions at radial confinement `omega_r`.
///
/// The upper axial frequency keeps the crystal linear,
/// `ω_z < ω_r √(2.94 n^−1.8)`; the lower one is `(λ/4)⁻² ħ/(2m)`, below
/// which the thermal position spread at the Doppler limit washes out the
/// two-scatterer fringe.
pub fn length_scale_bounds(
    n: usize,
    omega_r: f64,
    species: &IonSpecies,
) -> Result<LengthScaleBounds> {
    if n < 2 || n > MAX_IONS {
        return Err(Error::InvalidInput(format!(
            "length-scale bounds need 2..={MAX_IONS} ions, got {n}"
        )));
    }
    if !(omega_r > 0.0) {
        return Err(Error::InvalidInput(format!(
            "radial frequency must be positive, got {omega_r} rad/s"
        )));
    }
    let critical_ratio = STABILITY_COEFF * (n as f64).powf(STABILITY_EXPONENT);
    let omega_z_max = omega_r * critical_ratio.sqrt();
    let quarter_wave = species.wavelength() / 4.0;
    let omega_z_min = HBAR / (2.0 * species.mass() * quarter_wave * quarter_wave);
    if omega_z_min >= omega_z_max {
        return Err(Error::EmptyLengthScaleRange {
            n,
            omega_z_min,
            omega_z_max,
        });
    }
    Ok(LengthScaleBounds {
        l_min: length_scale(omega_z_max, species),
        l_max: length_scale(omega_z_min, species),
        omega_z_max,
        omega_z_min,
    })
}

/// Axial normal modes of the crystal.
///
/// `eigenvalues` are the dimensionless Hessian eigenvalues μ_p (ascending;
/// μ₁ = 1 is the center-of-mass mode, μ₂ = 3 the breathing mode),
/// `eigenvectors` holds the orthonormal mode vectors as columns, and
/// `mode_frequencies` are ω_p = √μ_p · ω_z.
#[derive(Debug, Clone, PartialEq)]
pub struct AxialModeSet {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
    pub mode_frequencies: Vec<f64>,
}

impl AxialModeSet {
    /// Same mode structure at a different axial confinement; only the
    /// frequencies rescale.
    pub fn scaled_to(&self, omega_z: f64) -> AxialModeSet {
        AxialModeSet {
            eigenvalues: self.eigenvalues.clone(),
            eigenvectors: self.eigenvectors.clone(),
            mode_frequencies: self.eigenvalues.iter().map(|mu| mu.sqrt() * omega_z).collect(),
        }
    }

    pub fn mode_count(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Full eigen-decomposition of the axial Hessian at axial frequency
/// `omega_z`.
pub fn axial_modes(geometry: &CrystalGeometry, omega_z: f64) -> Result<AxialModeSet> {
    if !(omega_z > 0.0) {
        return Err(Error::InvalidInput(format!(
            "axial frequency must be positive, got {omega_z} rad/s"
        )));
    }
    let hessian = dimensionless_hessian(geometry.positions());
    let (eigenvalues, eigenvectors) = jacobi_eigen(&hessian)?;
    let mode_frequencies = eigenvalues.iter().map(|mu| mu.sqrt() * omega_z).collect();
    Ok(AxialModeSet {
        eigenvalues,
        eigenvectors,
        mode_frequencies,
    })
}

/// Thermal occupation of a harmonic mode at temperature `t` (K).
fn bose_occupation(omega: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (BOLTZMANN * t);
    if x > 700.0 {
        0.0
    } else {
        1.0 / x.exp_m1()
    }
}

/// Variance of the mutual axial distance of each ion pair (m²) in a thermal
/// state at temperature `t`, decomposed over all axial modes:
/// `σ²_ab = Σ_p (b_a − b_b)² · ħ/(2 m ω_p) · (2 n̄_p + 1)`.
///
/// Symmetric with a zero diagonal.
pub fn pair_distance_variance(
    modes: &AxialModeSet,
    species: &IonSpecies,
    temperature: f64,
) -> Result<Matrix> {
    if temperature < 0.0 {
        return Err(Error::InvalidInput(format!(
            "temperature must be non-negative, got {temperature} K"
        )));
    }
    let n = modes.mode_count();
    let mut variance = Matrix::zeros(n, n);
    for p in 0..n {
        let omega = modes.mode_frequencies[p];
        let quantum = HBAR / (2.0 * species.mass() * omega);
        let weight = quantum * (2.0 * bose_occupation(omega, temperature) + 1.0);
        for a in 0..n {
            for b in a + 1..n {
                let diff = modes.eigenvectors.get(a, p) - modes.eigenvectors.get(b, p);
                let add = diff * diff * weight;
                let cur = variance.get(a, b);
                variance.set(a, b, cur + add);
                variance.set(b, a, cur + add);
            }
        }
    }
    Ok(variance)
}
