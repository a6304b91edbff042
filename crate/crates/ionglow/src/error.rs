use thiserror::Error;

/// Failure modes shared by every module in the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A precondition on user-supplied input was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterative solver ran out of iterations.
    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    SolverFailure {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// The stability criterion leaves no axial frequency window for this
    /// ion number at the given radial confinement.
    #[error(
        "no feasible length-scale range for n = {n}: \
         minimum axial frequency {omega_z_min:.6e} rad/s exceeds the \
         stability limit {omega_z_max:.6e} rad/s"
    )]
    EmptyLengthScaleRange {
        n: usize,
        omega_z_min: f64,
        omega_z_max: f64,
    },

    /// Adaptive quadrature hit its depth limit before reaching the
    /// requested accuracy; `estimate` is the best value obtained.
    #[error("quadrature did not reach the requested accuracy (estimate {estimate:.12e})")]
    QuadratureAccuracy { estimate: f64 },

    /// Count normalization needs a single-ion rate above background.
    #[error("degenerate normalization: single-ion rate {single_ion:.6} <= background {background:.6}")]
    DegenerateNormalization { single_ion: f64, background: f64 },

    /// The calculated model trace carries no variation, so the coherent
    /// fraction cannot be identified from the data.
    #[error("coherent-fraction fit is unidentifiable: model trace has zero variance")]
    UnidentifiableFit,
}

impl Error {
    /// Stable machine-readable tag for serialized error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::SolverFailure { .. } => "solver-failure",
            Error::EmptyLengthScaleRange { .. } => "empty-length-scale-range",
            Error::QuadratureAccuracy { .. } => "quadrature-accuracy",
            Error::DegenerateNormalization { .. } => "degenerate-normalization",
            Error::UnidentifiableFit => "unidentifiable-fit",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
