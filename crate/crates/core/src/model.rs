//! Physical parameters of one operating point and the mean-field equations
//! of motion for the cavity amplitude `A` and magnon amplitude `M`.
//!
//! Rates and detunings share one unit. The CLI normalizes everything by
//! `kappa_a`, so in practice `kappa_a == 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Sign of the magnon Kerr coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KerrSign {
    Positive,
    Negative,
}

impl KerrSign {
    pub fn as_f64(self) -> f64 {
        match self {
            KerrSign::Positive => 1.0,
            KerrSign::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            KerrSign::Positive => KerrSign::Negative,
            KerrSign::Negative => KerrSign::Positive,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            KerrSign::Positive => '+',
            KerrSign::Negative => '-',
        }
    }
}

impl std::str::FromStr for KerrSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "+" | "+1" | "1" | "pos" | "positive" => Ok(KerrSign::Positive),
            "-" | "-1" | "neg" | "negative" => Ok(KerrSign::Negative),
            other => Err(Error::InvalidParams(format!("unknown kerr sign {other:?}"))),
        }
    }
}

/// Numerical tolerances, all in normalized units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Minimum `|Delta_a^2 + kappa_a^2 - Omega^2|` before the branch formulas are singular.
    pub eps_den: f64,
    /// Allowed deviation of the phase-equation modulus from one.
    pub tol_phase: f64,
    /// Allowed mean-field residual at a reconstructed fixed point.
    pub tol_fp: f64,
    /// Eigenvalues with `|Re lambda| <= tol_stab` are marginal.
    pub tol_stab: f64,
    /// Relative tolerance under which two order parameters count as equal.
    pub eps_contrast: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_den: 1e-9,
            tol_phase: 1e-6,
            tol_fp: 1e-8,
            tol_stab: 1e-9,
            eps_contrast: 1e-9,
        }
    }
}

/// Constants of one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub delta_a: f64,
    pub delta_m: f64,
    pub kappa_a: f64,
    pub gamma_m: f64,
    pub g_m: f64,
    pub kerr_sign: KerrSign,
    /// `|K|`. Only rescales `|M|^2`; the scaled order parameter does not depend on it.
    pub kerr_magnitude: f64,
    pub omega_drive: f64,
    pub nbar_a: f64,
    pub nbar_m: f64,
    pub tol: Tolerances,
}

impl Default for SystemParams {
    /// Reference operating point: `Delta_a = 3`, `g_m = 2.4`, `gamma_m = 1`,
    /// `Delta_m / Delta_a = 1.3`, undriven, zero temperature.
    fn default() -> Self {
        Self {
            delta_a: 3.0,
            delta_m: 3.9,
            kappa_a: 1.0,
            gamma_m: 1.0,
            g_m: 2.4,
            kerr_sign: KerrSign::Positive,
            kerr_magnitude: 1.0,
            omega_drive: 0.0,
            nbar_a: 0.0,
            nbar_m: 0.0,
            tol: Tolerances::default(),
        }
    }
}

impl SystemParams {
    /// Reference parameters at drive `omega`, detuning ratio `ratio` and the given Kerr sign.
    pub fn reference(omega: f64, ratio: f64, sign: KerrSign) -> Self {
        Self::default()
            .with_ratio(ratio)
            .with_omega(omega)
            .with_kerr_sign(sign)
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega_drive = omega;
        self
    }

    /// Sets `delta_m = ratio * delta_a`.
    pub fn with_ratio(mut self, ratio: f64) -> Self {
        self.delta_m = ratio * self.delta_a;
        self
    }

    pub fn with_kerr_sign(mut self, sign: KerrSign) -> Self {
        self.kerr_sign = sign;
        self
    }

    pub fn with_kerr_magnitude(mut self, magnitude: f64) -> Self {
        self.kerr_magnitude = magnitude;
        self
    }

    /// Signed Kerr coefficient `K`.
    pub fn kerr(&self) -> f64 {
        self.kerr_sign.as_f64() * self.kerr_magnitude
    }

    pub fn detuning_ratio(&self) -> f64 {
        self.delta_m / self.delta_a
    }

    /// Scaled order parameter `|K| |M|^2 / gamma_m` for a magnon occupation.
    pub fn scaled_occupation(&self, magnon_occ: f64) -> f64 {
        self.kerr_magnitude * magnon_occ / self.gamma_m
    }

    /// Checks the physical invariants. Solvers do not require this, so
    /// degenerate matrices (e.g. zero detunings) stay constructible in tests.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.delta_a,
            self.delta_m,
            self.kappa_a,
            self.gamma_m,
            self.g_m,
            self.kerr_magnitude,
            self.omega_drive,
            self.nbar_a,
            self.nbar_m,
        ]
        .iter()
        .all(|x| x.is_finite());
        let checks = [
            (finite, "all parameters must be finite"),
            (self.kappa_a > 0.0, "kappa_a must be > 0"),
            (self.gamma_m > 0.0, "gamma_m must be > 0"),
            (self.g_m >= 0.0, "g_m must be >= 0"),
            (self.kerr_magnitude > 0.0, "kerr magnitude must be > 0"),
            (self.delta_a > 0.0, "delta_a must be > 0"),
            (self.delta_m > 0.0, "delta_m must be > 0"),
            (self.omega_drive >= 0.0, "omega must be >= 0"),
            (self.nbar_a >= 0.0, "nbar_a must be >= 0"),
            (self.nbar_m >= 0.0, "nbar_m must be >= 0"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::InvalidParams((*msg).to_string())),
            None => Ok(()),
        }
    }
}

/// Auxiliary combinations entering the branch formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedQuantities {
    /// `g_m^2 / (Delta_a^2 + kappa_a^2 - Omega^2)`
    pub eta: f64,
    /// `Delta_m - eta Delta_a`
    pub delta_m_prime: f64,
    /// `gamma_m + eta kappa_a`
    pub gamma_m_prime: f64,
}

pub fn derived(params: &SystemParams) -> Result<DerivedQuantities> {
    let p = params;
    let den = p.delta_a * p.delta_a + p.kappa_a * p.kappa_a - p.omega_drive * p.omega_drive;
    if den.abs() <= p.tol.eps_den {
        return Err(Error::DegenerateDenominator(den));
    }
    let eta = p.g_m * p.g_m / den;
    Ok(DerivedQuantities {
        eta,
        delta_m_prime: p.delta_m - eta * p.delta_a,
        gamma_m_prime: p.gamma_m + eta * p.kappa_a,
    })
}

/// Time derivatives `(dA/dt, dM/dt)` of the mean-field amplitudes.
pub fn mean_field_rhs(params: &SystemParams, a: Complex64, m: Complex64) -> (Complex64, Complex64) {
    let p = params;
    let da = -I * Complex64::new(p.delta_a, -p.kappa_a) * a - I * p.g_m * m
        - I * p.omega_drive * a.conj();
    let dm = -I * Complex64::new(p.delta_m + p.kerr() * m.norm_sqr(), -p.gamma_m) * m
        - I * p.g_m * a;
    (da, dm)
}

/// Bose-Einstein occupancy `1 / (e^x - 1)` for `x = hbar omega / (k_B T)`.
/// Returns 0 for `x = +inf` (zero temperature).
pub fn bose_occupancy(x: f64) -> f64 {
    if x.is_infinite() && x > 0.0 {
        0.0
    } else {
        1.0 / x.exp_m1()
    }
}
