//! Maximization of the relative collection enhancement over the crystal
//! length scale, over equidistant spacings, and over per-ion phases.

use rayon::prelude::*;
use serde::Serialize;

use crate::collection::{relative_enhancement, CollectionAperture};
use crate::crystal::{
    axial_frequency_for_length, axial_modes, equilibrium_positions, length_scale_bounds,
    pair_distance_variance, AxialModeSet, CrystalGeometry, MAX_IONS,
};
use crate::error::{Error, Result};
use crate::numeric::{golden_section_max, nelder_mead_max};
use crate::physical::{doppler_temperature, IonSpecies};
use crate::scattering::{ScatterScenario, ThermalKeff, ThermalState};

/// Two refined maxima whose values agree within this are treated as a tie
/// and resolved toward the smaller scan parameter (smaller thermal spread).
const TIE_TOLERANCE: f64 = 1e-9;

/// Relative parameter tolerance of the golden-section refinement.
const REFINE_TOLERANCE: f64 = 1e-6;

/// Default number of coarse scan samples. The enhancement trace oscillates
/// in `l` with period ≈ λ/(span · (1 − cos α)); 2000 samples keep several
/// points per fringe across every feasible window handled here.
pub const DEFAULT_SCAN_SAMPLES: usize = 2000;

/// Number of low-discrepancy starts for the phase optimizer, in addition to
/// the zero-phase and axis-aligned analytic starts.
const PHASE_STARTS: usize = 16;

/// What a scan varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    /// Harmonic crystal, single parameter `l`.
    HarmonicLength,
    /// Ideal regular lattice, single parameter `d` (nearest-neighbor
    /// distance).
    EquidistantSpacing,
    /// Per-ion phases at the smallest feasible `l`.
    PhasesAtMinLength,
}

/// A fully specified optimization problem.
#[derive(Debug, Clone)]
pub struct ScanSpec {
    pub n: usize,
    pub species: IonSpecies,
    /// Excitation angle (rad).
    pub alpha: f64,
    /// Radial secular frequency (rad/s); fixes the default length-scale
    /// window through the linear-stability criterion.
    pub omega_r: f64,
    pub mode: ScanMode,
    /// Scan window override (m); defaults to the stability bounds.
    pub l_range: Option<(f64, f64)>,
    pub samples: usize,
    pub thermal: bool,
    pub thermal_keff: ThermalKeff,
    /// Thermal-state temperature (K); defaults to the species' Doppler
    /// limit.
    pub temperature: Option<f64>,
    /// Seed for the phase-optimizer starts.
    pub seed: u64,
}

impl ScanSpec {
    pub fn new(n: usize, species: IonSpecies, alpha: f64, omega_r: f64) -> Result<Self> {
        let spec = ScanSpec {
            n,
            species,
            alpha,
            omega_r,
            mode: ScanMode::HarmonicLength,
            l_range: None,
            samples: DEFAULT_SCAN_SAMPLES,
            thermal: false,
            thermal_keff: ThermalKeff::Axial,
            temperature: None,
            seed: 0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_mode(mut self, mode: ScanMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_thermal(mut self, thermal: bool) -> Self {
        self.thermal = thermal;
        self
    }

    pub fn with_thermal_keff(mut self, keff: ThermalKeff) -> Self {
        self.thermal_keff = keff;
        self
    }

    pub fn with_l_range(mut self, lo: f64, hi: f64) -> Self {
        self.l_range = Some((lo, hi));
        self
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = Some(temperature);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_ion_count(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_IONS {
            return Err(Error::InvalidInput(format!(
                "ion count must be between 1 and {MAX_IONS}, got {}",
                self.n
            )));
        }
        if !(self.alpha > 0.0 && self.alpha <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidInput(format!(
                "excitation angle must lie in (0, π/2], got {} rad",
                self.alpha
            )));
        }
        if !(self.omega_r > 0.0) {
            return Err(Error::InvalidInput(format!(
                "radial frequency must be positive, got {} rad/s",
                self.omega_r
            )));
        }
        if self.samples < 2 {
            return Err(Error::InvalidInput(format!(
                "a scan needs at least 2 samples, got {}",
                self.samples
            )));
        }
        if let Some((lo, hi)) = self.l_range {
            if !(lo > 0.0 && lo < hi) {
                return Err(Error::InvalidInput(format!(
                    "scan range must satisfy 0 < lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        if let Some(t) = self.temperature {
            if t < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "temperature must be non-negative, got {t} K"
                )));
            }
        }
        if self.thermal && self.mode == ScanMode::EquidistantSpacing {
            return Err(Error::InvalidInput(
                "thermal dephasing is defined through the harmonic-crystal modes and \
                 is not available for the equidistant lattice scan"
                    .into(),
            ));
        }
        Ok(())
    }

    /// Scan window (m): explicit override, else the stability bounds.
    fn scan_window(&self) -> Result<(f64, f64)> {
        if let Some(range) = self.l_range {
            return Ok(range);
        }
        // A single ion has no stability window; any scale gives the same
        // (unit) enhancement, so borrow the two-ion window.
        let bounds = length_scale_bounds(self.n.max(2), self.omega_r, &self.species)?;
        Ok((bounds.l_min, bounds.l_max))
    }

    fn thermal_temperature(&self) -> f64 {
        self.temperature
            .unwrap_or_else(|| doppler_temperature(&self.species))
    }
}

/// Location of an optimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Argmax {
    /// Harmonic-crystal length scale (m).
    LengthScale { value: f64 },
    /// Equidistant nearest-neighbor distance (m).
    Spacing { value: f64 },
    /// Per-ion phases (rad, first entry 0) at a fixed length scale (m).
    Phases { length_scale: f64, phases: Vec<f64> },
}

/// Result of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimumRecord {
    /// Best relative enhancement found.
    pub best_value: f64,
    pub argmax: Argmax,
    /// Coarse scan samples `(parameter, value)`; for the phase optimizer,
    /// `(start index, best value of that start)`.
    pub trace: Vec<(f64, f64)>,
}

/// Shared machinery: harmonic positions and (optionally) the dimensionless
/// mode structure, reused across every sample of a scan.
struct Evaluator<'a> {
    spec: &'a ScanSpec,
    aperture: &'a CollectionAperture,
    positions: Vec<f64>,
    /// Mode set at unit axial frequency; `None` when thermal is off.
    modes_template: Option<AxialModeSet>,
    temperature: f64,
}

impl<'a> Evaluator<'a> {
    fn new(spec: &'a ScanSpec, aperture: &'a CollectionAperture) -> Result<Self> {
        spec.validate()?;
        let positions = equilibrium_positions(spec.n)?;
        let modes_template = if spec.thermal {
            let geometry = CrystalGeometry::from_positions(1.0, positions.clone())?;
            Some(axial_modes(&geometry, 1.0)?)
        } else {
            None
        };
        Ok(Evaluator {
            spec,
            aperture,
            positions,
            modes_template,
            temperature: spec.thermal_temperature(),
        })
    }

    fn scenario_at_length(&self, length: f64) -> Result<ScatterScenario> {
        let geometry = CrystalGeometry::from_positions(length, self.positions.clone())?;
        let mut scenario = ScatterScenario::new(
            geometry,
            self.spec.species.wavenumber(),
            self.spec.alpha,
        )?;
        if let Some(template) = &self.modes_template {
            let omega_z = axial_frequency_for_length(length, &self.spec.species);
            let modes = template.scaled_to(omega_z);
            let variance = pair_distance_variance(&modes, &self.spec.species, self.temperature)?;
            scenario =
                scenario.with_thermal(ThermalState::new(variance, self.spec.thermal_keff))?;
        }
        Ok(scenario)
    }

    fn value_at_length(&self, length: f64) -> Result<f64> {
        let scenario = self.scenario_at_length(length)?;
        Ok(relative_enhancement(&scenario, self.aperture)?.relative_enhancement)
    }

    fn value_at_spacing(&self, spacing: f64) -> Result<f64> {
        let geometry = CrystalGeometry::equidistant(self.spec.n, spacing)?;
        let scenario = ScatterScenario::new(
            geometry,
            self.spec.species.wavenumber(),
            self.spec.alpha,
        )?;
        Ok(relative_enhancement(&scenario, self.aperture)?.relative_enhancement)
    }

    fn value_with_phases(&self, base: &ScatterScenario, offsets: &[f64]) -> Result<f64> {
        let mut phases = Vec::with_capacity(offsets.len() + 1);
        phases.push(0.0);
        phases.extend_from_slice(offsets);
        let scenario = base.clone().with_phases(phases)?;
        Ok(relative_enhancement(&scenario, self.aperture)?.relative_enhancement)
    }
}

/// Coarse grid scan over `[lo, hi]` followed by golden-section refinement
/// of the best bracketing interval (and of any near-tied local maximum,
/// resolving ties toward the smaller parameter).
fn scan_and_refine(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<(f64, f64, Vec<(f64, f64)>)> {
    let mut trace = Vec::with_capacity(samples);
    for i in 0..samples {
        let x = lo + (hi - lo) * i as f64 / (samples as f64 - 1.0);
        trace.push((x, f(x)?));
    }

    let mut best_idx = 0;
    for (i, sample) in trace.iter().enumerate() {
        if sample.1 > trace[best_idx].1 {
            best_idx = i;
        }
    }
    let best_coarse = trace[best_idx].1;

    // Strict interior maxima near-tied with the global best, plus the best
    // sample itself.
    let mut candidates: Vec<usize> = Vec::new();
    for i in 0..samples {
        let left = i == 0 || trace[i].1 > trace[i - 1].1;
        let right = i == samples - 1 || trace[i].1 > trace[i + 1].1;
        if left && right && best_coarse - trace[i].1 <= TIE_TOLERANCE {
            candidates.push(i);
        }
    }
    if !candidates.contains(&best_idx) {
        candidates.push(best_idx);
        candidates.sort_unstable();
    }
    // Degenerate (flat) traces can tie everywhere; a handful of brackets is
    // enough since the values agree to within the tie tolerance anyway.
    candidates.truncate(8);

    let mut best: Option<(f64, f64)> = None;
    for idx in candidates {
        let a = trace[idx.saturating_sub(1)].0;
        let b = trace[(idx + 1).min(samples - 1)].0;
        let mut failure = None;
        let (mut x, mut value) = golden_section_max(
            |x| match f(x) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    f64::NEG_INFINITY
                }
            },
            a,
            b,
            REFINE_TOLERANCE,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        // Refinement must never fall below the sample it started from; on
        // an exact tie (flat trace) prefer the grid sample.
        if trace[idx].1 >= value {
            x = trace[idx].0;
            value = trace[idx].1;
        }
        best = match best {
            None => Some((x, value)),
            // Candidates arrive in ascending parameter order, so keeping
            // the incumbent on a tie prefers the smaller parameter.
            Some((_, incumbent)) if value > incumbent + TIE_TOLERANCE => Some((x, value)),
            other => other,
        };
    }

    let (mut x, mut value) = best.expect("at least one candidate bracket");
    // Guard the floor: never report less than the best coarse sample.
    if trace[best_idx].1 > value {
        x = trace[best_idx].0;
        value = trace[best_idx].1;
    }
    Ok((x, value, trace))
}

/// Maximizes the enhancement of the harmonic crystal over the length scale.
pub fn optimize_length_scale(
    spec: &ScanSpec,
    aperture: &CollectionAperture,
) -> Result<OptimumRecord> {
    if spec.mode != ScanMode::HarmonicLength {
        return Err(Error::InvalidInput(format!(
            "optimize_length_scale requires the harmonic-length mode, got {:?}",
            spec.mode
        )));
    }
    let evaluator = Evaluator::new(spec, aperture)?;
    let (lo, hi) = spec.scan_window()?;
    let (x, value, trace) =
        scan_and_refine(|l| evaluator.value_at_length(l), lo, hi, spec.samples)?;
    Ok(OptimumRecord {
        best_value: value,
        argmax: Argmax::LengthScale { value: x },
        trace,
    })
}

/// Maximizes the enhancement of an ideal regular lattice over the
/// nearest-neighbor distance. The spacing window is matched to the mean
/// nearest-neighbor distance of the harmonic crystal across its own
/// feasible length-scale window.
pub fn optimize_equidistant(
    spec: &ScanSpec,
    aperture: &CollectionAperture,
) -> Result<OptimumRecord> {
    if spec.mode != ScanMode::EquidistantSpacing {
        return Err(Error::InvalidInput(format!(
            "optimize_equidistant requires the equidistant-spacing mode, got {:?}",
            spec.mode
        )));
    }
    if spec.n < 2 {
        return Err(Error::InvalidInput(
            "an equidistant scan needs at least two ions".into(),
        ));
    }
    let evaluator = Evaluator::new(spec, aperture)?;
    let (l_lo, l_hi) = spec.scan_window()?;
    let span = evaluator.positions[spec.n - 1] - evaluator.positions[0];
    let per_gap = span / (spec.n as f64 - 1.0);
    let (d_lo, d_hi) = (l_lo * per_gap, l_hi * per_gap);
    let (x, value, trace) =
        scan_and_refine(|d| evaluator.value_at_spacing(d), d_lo, d_hi, spec.samples)?;
    Ok(OptimumRecord {
        best_value: value,
        argmax: Argmax::Spacing { value: x },
        trace,
    })
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 / (1u64 << 53) as f64
}

/// Generalized-golden-ratio low-discrepancy sequence over the unit
/// hypercube, shifted by a seed-derived offset per dimension.
fn low_discrepancy_starts(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    // Unique positive root of x^(dim+1) = x + 1.
    let mut root = 2.0_f64;
    for _ in 0..64 {
        root = (1.0 + root).powf(1.0 / (dim as f64 + 1.0));
    }
    let alphas: Vec<f64> = (1..=dim).map(|j| root.powi(-(j as i32)).fract()).collect();

    let mut state = seed ^ 0xA076_1D64_78BD_642F;
    let offsets: Vec<f64> = (0..dim).map(|_| unit_f64(splitmix64(&mut state))).collect();

    (1..=count)
        .map(|i| {
            (0..dim)
                .map(|j| (offsets[j] + i as f64 * alphas[j]).fract() * std::f64::consts::TAU)
                .collect()
        })
        .collect()
}

/// Maximizes the enhancement over the `n − 1` per-ion phase offsets at the
/// smallest feasible length scale.
///
/// Multi-start Nelder–Mead: the zero-phase start, the analytic start that
/// aligns every pair phase at β = 0, and 16 seeded low-discrepancy starts.
/// The result can therefore never fall below the phase-free value at the
/// same length scale.
pub fn optimize_phases(spec: &ScanSpec, aperture: &CollectionAperture) -> Result<OptimumRecord> {
    if spec.mode != ScanMode::PhasesAtMinLength {
        return Err(Error::InvalidInput(format!(
            "optimize_phases requires the phases-at-min-length mode, got {:?}",
            spec.mode
        )));
    }
    if spec.n < 2 {
        return Err(Error::InvalidInput(
            "phase optimization needs at least two ions".into(),
        ));
    }
    let evaluator = Evaluator::new(spec, aperture)?;
    let (length, _) = spec.scan_window()?;
    let base = evaluator.scenario_at_length(length)?;
    let dim = spec.n - 1;

    let failure: std::cell::Cell<Option<Error>> = std::cell::Cell::new(None);
    let objective = |offsets: &[f64]| match evaluator.value_with_phases(&base, offsets) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            f64::NEG_INFINITY
        }
    };

    // Analytic start: cancel every pair phase in the detector direction.
    let k = spec.species.wavenumber();
    let geo = k * length * (spec.alpha.cos() - 1.0);
    let aligned: Vec<f64> = (1..spec.n)
        .map(|j| {
            (-geo * (evaluator.positions[j] - evaluator.positions[0]))
                .rem_euclid(std::f64::consts::TAU)
        })
        .collect();

    let mut starts = vec![vec![0.0; dim], aligned];
    starts.extend(low_discrepancy_starts(dim, PHASE_STARTS, spec.seed));

    let budget = 600 * dim + 600;
    let mut trace = Vec::with_capacity(starts.len());
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (index, start) in starts.iter().enumerate() {
        let (point, value) = nelder_mead_max(&objective, start, 0.4, budget);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        trace.push((index as f64, value));
        best = match best {
            None => Some((point, value)),
            Some((_, incumbent)) if value > incumbent => Some((point, value)),
            other => other,
        };
    }

    let (offsets, value) = best.expect("at least one start");
    let mut phases = Vec::with_capacity(spec.n);
    phases.push(0.0);
    phases.extend(offsets.iter().map(|p| p.rem_euclid(std::f64::consts::TAU)));
    Ok(OptimumRecord {
        best_value: value,
        argmax: Argmax::Phases {
            length_scale: length,
            phases,
        },
        trace,
    })
}

/// One `(n, NA)` cell of a sweep.
#[derive(Debug)]
pub struct SweepCell {
    pub n: usize,
    pub na: f64,
    pub outcome: Result<OptimumRecord>,
}

/// Dispatches a spec to the optimizer selected by its mode.
pub fn run_mode(spec: &ScanSpec, aperture: &CollectionAperture) -> Result<OptimumRecord> {
    match spec.mode {
        ScanMode::HarmonicLength => optimize_length_scale(spec, aperture),
        ScanMode::EquidistantSpacing => optimize_equidistant(spec, aperture),
        ScanMode::PhasesAtMinLength => optimize_phases(spec, aperture),
    }
}

/// Runs one optimization per `(n, NA)` combination. Cells are independent
/// and evaluated concurrently; failures are recorded per cell and the sweep
/// continues. Results come back in input order (`n` outer, `NA` inner).
pub fn sweep(base: &ScanSpec, n_values: &[usize], na_values: &[f64]) -> Vec<SweepCell> {
    let cells: Vec<(usize, f64)> = n_values
        .iter()
        .flat_map(|&n| na_values.iter().map(move |&na| (n, na)))
        .collect();
    cells
        .into_par_iter()
        .map(|(n, na)| {
            let outcome = CollectionAperture::from_na(na)
                .and_then(|aperture| run_mode(&base.clone().with_ion_count(n), &aperture));
            SweepCell { n, na, outcome }
        })
        .collect()
}
