use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// `Delta_a^2 + kappa_a^2 - Omega^2` vanished: parametric resonance.
    #[error("degenerate denominator: |delta_a^2 + kappa_a^2 - omega^2| = {0:e}")]
    DegenerateDenominator(f64),

    #[error("branch {0} is not admissible")]
    InadmissibleBranch(&'static str),

    #[error("phase equation inconsistent: |rhs| - 1 = {0:e}")]
    PhaseInconsistent(f64),

    #[error("cavity-magnon coupling is zero")]
    ZeroCoupling,

    #[error("no real threshold: radicand = {0:e}")]
    NoRealThreshold(f64),

    #[error("eigensolver failed to converge")]
    ConvergenceFailure,

    #[error("drift matrix is not stable (max Re lambda = {0:e})")]
    UnstableDrift(f64),

    #[error("Lyapunov system is numerically singular")]
    SingularSystem,

    #[error("at least one Kerr sign is in the unstable region")]
    UnstableRegion,

    #[error("trajectory diverged at t = {0}")]
    Diverged(f64),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

impl Error {
    /// Short machine-readable tag, used for sentinel cells in grid output.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid_params",
            Error::DegenerateDenominator(_) => "degenerate_denominator",
            Error::InadmissibleBranch(_) => "inadmissible_branch",
            Error::PhaseInconsistent(_) => "phase_inconsistent",
            Error::ZeroCoupling => "zero_coupling",
            Error::NoRealThreshold(_) => "no_real_threshold",
            Error::ConvergenceFailure => "convergence_failure",
            Error::UnstableDrift(_) => "unstable_drift",
            Error::SingularSystem => "singular_system",
            Error::UnstableRegion => "unstable_region",
            Error::Diverged(_) => "diverged",
            Error::InvalidSweep(_) => "invalid_sweep",
        }
    }
}
