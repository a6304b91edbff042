use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Simulation and optimization of coherent photon collection from linear
/// trapped-ion crystals.
#[derive(Debug, Parser)]
#[command(name = "ionglow", version, about)]
pub struct Cli {
    /// TOML configuration file; flags and IONGLOW_* environment variables
    /// override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Seed for the phase-optimizer starts.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibrium positions of the ion crystal.
    Positions {
        #[arg(long)]
        n: Option<usize>,
        /// Spatial length scale in µm (default: the smallest stable scale).
        #[arg(long)]
        l_um: Option<f64>,
    },
    /// Axial normal-mode spectrum.
    Modes {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        l_um: Option<f64>,
        /// Axial frequency in MHz (overrides the value derived from the
        /// length scale or trap hardware).
        #[arg(long)]
        omega_z_2pi_mhz: Option<f64>,
    },
    /// Far-field angular intensity pattern.
    Pattern {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        l_um: Option<f64>,
        #[arg(long)]
        alpha_deg: Option<f64>,
        #[arg(long)]
        beta_max_deg: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        thermal: Option<bool>,
    },
    /// Collection-efficiency enhancement of a fixed geometry.
    Enhance {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        l_um: Option<f64>,
        #[arg(long)]
        na: Option<f64>,
        #[arg(long)]
        alpha_deg: Option<f64>,
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        thermal: Option<bool>,
    },
    /// Optimized enhancement over an (n, NA) grid.
    Sweep {
        /// Comma-separated ion counts (default: the configured n).
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<usize>,
        /// Comma-separated numerical apertures (default: the configured NA).
        #[arg(long, value_delimiter = ',')]
        na_list: Vec<f64>,
        /// Scan an ideal equidistant lattice instead of the harmonic
        /// crystal.
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        equidistant: Option<bool>,
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        thermal: Option<bool>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Per-ion phase optimization at the smallest feasible length scale.
    OptimizePhases {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        na: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Coherent-fraction fit of a measured count-rate trace.
    Fit {
        /// CSV file with rows `scan_value,counts,uncertainty`.
        #[arg(long)]
        input: PathBuf,
        /// Weight points by inverse variance of the stated uncertainties.
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        weighted: Option<bool>,
        /// Half-width (points) of a fit window around the measured peak.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Optimized-enhancement ratio between two species.
    CompareSpecies {
        #[arg(long)]
        species_b: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        na: Option<f64>,
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        thermal: Option<bool>,
        #[arg(long)]
        samples: Option<usize>,
    },
}
