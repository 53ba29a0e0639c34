use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operator is not Hermitian (relative defect {defect:.3e} exceeds {tolerance:.1e})")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("eigensolver failed to converge: {0}")]
    EigenFailure(&'static str),

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("requested {requested} levels but only {available} are certified against truncation")]
    TooManyLevels { requested: usize, available: usize },

    #[error("no Liouvillian eigenvalue within {tolerance:.1e} of zero (closest {closest:.3e})")]
    NoSteadyState { closest: f64, tolerance: f64 },

    #[error("steady state is not unique (kernel dimension {0})")]
    DegenerateKernel(usize),

    #[error("Boltzmann weight beyond the retained levels is {tail:.3e} (limit {limit:.1e}); raise the level count or lower the temperature")]
    ThermalTail { tail: f64, limit: f64 },

    #[error("series is overdamped: found {extrema} extrema, need at least 3")]
    Overdamped { extrema: usize },

    #[error("rate series truncated at {cutoff} terms leaves a relative tail of {tail:.3e}")]
    SeriesTail { cutoff: usize, tail: f64 },

    #[error("no net cooling: total rate {0:.3e} is not positive")]
    NoNetCooling(f64),

    #[error("initial state loses norm {lost:.3e} when projected on the retained levels")]
    ProjectionLoss { lost: f64 },

    #[error("time propagation failed at t = {time}: {reason}")]
    Integration { time: f64, reason: &'static str },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Non-fatal conditions reported alongside a result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Warning {
    /// Wavefunction amplitude at the hard wall exceeds 1e-6; enlarge `x_max`.
    BoundaryAmplitude(f64),
    /// The polaron coupling is not perturbative for this k-resonance.
    GrwaValidity,
    /// `ω_d ≲ ω_c` is violated for the symmetric gRWA.
    GrwaDetuning,
    /// `γ < Ω_(k,k)`: adiabatic elimination of the cavity is not justified.
    AdiabaticRegime,
    /// `g/ω_c < 1`: tunneling is not suppressed, effective rates are indicative only.
    WeakCoupling,
    /// Population in the highest retained boson state.
    TruncationLeakage(f64),
}
