//! Physical constants, CODATA 2018 values, SI units.
//!
//! Every derived number in the crate traces back to this table so results
//! are reproducible bit for bit.

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Vacuum permittivity (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Unified atomic mass unit (kg).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Coulomb-law denominator 4πε₀ (F/m).
pub const FOUR_PI_EPS0: f64 = 4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coulomb_denominator_matches_permittivity() {
        assert!((FOUR_PI_EPS0 / VACUUM_PERMITTIVITY - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
