//! Mean-field steady states, linear stability, quadrature fluctuations and
//! the nonreciprocity contrast of a parametrically driven cavity-magnon
//! system with a magnon Kerr term.
//!
//! All rates and detunings are expressed in units of the cavity decay rate
//! `kappa_a`. The crate is organised bottom-up:
//!
//! - [`model`]: parameters and the mean-field right-hand side
//! - [`steadystate`]: the three occupation branches, phases and thresholds
//! - [`stability`]: drift matrix, spectrum and phase classification
//! - [`fluctuations`]: Lyapunov covariance and magnon-number fluctuations
//! - [`nonreciprocity`]: order parameter convention and contrast ratio
//! - [`sweep`]: deterministic parallel grids
//! - [`oracle`]: brute-force time-domain cross-checks

pub mod error;
pub mod fluctuations;
pub mod model;
pub mod nonreciprocity;
pub mod oracle;
pub mod stability;
pub mod steadystate;
pub mod sweep;

pub use error::{Error, Result};
pub use fluctuations::{
    diffusion_matrix, magnon_fluctuations, solve_lyapunov, CovarianceMatrix, DiffusionMatrix,
    LyapunovSolution,
};
pub use model::{
    bose_occupancy, derived, mean_field_rhs, DerivedQuantities, KerrSign, SystemParams, Tolerances,
};
pub use nonreciprocity::{contrast_ratio, order_parameter, ContrastPoint, OrderParameter};
pub use stability::{
    build_drift_matrix, classify_phase, eigenvalues, is_stable, DriftMatrix, PhaseLabel,
    StabilityVerdict,
};
pub use steadystate::{
    admissibility, critical_xi, magnon_branches, mean_field_amplitudes, omega_1, omega_2,
    photon_occupation, Admissibility, BranchLabel, BranchSolution,
};

pub use num_complex::Complex64;
