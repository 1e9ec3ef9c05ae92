//! Steady-state branches of the magnon and photon occupations, fixed-point
//! amplitudes with their phase, and the critical thresholds `xi`, `Omega_1`,
//! `Omega_2`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{derived, mean_field_rhs, KerrSign, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BranchLabel {
    Zero,
    Plus,
    Minus,
}

impl BranchLabel {
    pub const ALL: [BranchLabel; 3] = [BranchLabel::Zero, BranchLabel::Plus, BranchLabel::Minus];

    pub fn name(self) -> &'static str {
        match self {
            BranchLabel::Zero => "zero",
            BranchLabel::Plus => "plus",
            BranchLabel::Minus => "minus",
        }
    }

    /// The nonzero branch that can be stable for a given Kerr sign.
    pub fn physical_for(sign: KerrSign) -> Self {
        match sign {
            KerrSign::Positive => BranchLabel::Plus,
            KerrSign::Negative => BranchLabel::Minus,
        }
    }
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One candidate steady state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchSolution {
    pub label: BranchLabel,
    /// `|M|^2`. For an inadmissible branch this is the raw formula value,
    /// which may be negative, or NaN when the discriminant is negative.
    pub magnon_occ: f64,
    /// `|A|^2` evaluated from `magnon_occ`; NaN when that is NaN.
    pub photon_occ: f64,
    /// Fixed-point amplitudes, present only for admissible branches.
    pub m_amplitude: Option<Complex64>,
    pub a_amplitude: Option<Complex64>,
    /// `eta^2 Omega^2 - gamma_m'^2`; zero for the zero branch.
    pub discriminant: f64,
    pub admissible: bool,
}

impl BranchSolution {
    fn zero() -> Self {
        Self {
            label: BranchLabel::Zero,
            magnon_occ: 0.0,
            photon_occ: 0.0,
            m_amplitude: Some(Complex64::new(0.0, 0.0)),
            a_amplitude: Some(Complex64::new(0.0, 0.0)),
            discriminant: 0.0,
            admissible: true,
        }
    }
}

fn photon_from_magnon(params: &SystemParams, magnon_occ: f64) -> f64 {
    let p = params;
    let shifted = p.delta_m + p.kerr() * magnon_occ;
    (shifted * shifted + p.gamma_m * p.gamma_m) * magnon_occ / (p.g_m * p.g_m)
}

/// The three steady-state branches `[Zero, Plus, Minus]`.
pub fn magnon_branches(params: &SystemParams) -> Result<[BranchSolution; 3]> {
    let d = derived(params)?;
    let k = params.kerr();
    let disc = d.eta * d.eta * params.omega_drive * params.omega_drive
        - d.gamma_m_prime * d.gamma_m_prime;
    let root = if disc >= 0.0 { disc.sqrt() } else { f64::NAN };

    let make = |label: BranchLabel, sign: f64| -> Result<BranchSolution> {
        let occ = (-d.delta_m_prime + sign * root) / k;
        let admissible = disc >= 0.0 && occ > 0.0;
        let mut sol = BranchSolution {
            label,
            magnon_occ: occ,
            photon_occ: if params.g_m > 0.0 {
                photon_from_magnon(params, occ)
            } else {
                f64::NAN
            },
            m_amplitude: None,
            a_amplitude: None,
            discriminant: disc,
            admissible,
        };
        if admissible {
            let (m, a) = mean_field_amplitudes(params, &sol)?;
            sol.m_amplitude = Some(m);
            sol.a_amplitude = Some(a);
        }
        Ok(sol)
    };

    Ok([
        BranchSolution::zero(),
        make(BranchLabel::Plus, 1.0)?,
        make(BranchLabel::Minus, -1.0)?,
    ])
}

/// `|A|^2` on an admissible branch.
pub fn photon_occupation(params: &SystemParams, branch: &BranchSolution) -> Result<f64> {
    if !branch.admissible {
        return Err(Error::InadmissibleBranch(branch.label.name()));
    }
    if branch.label == BranchLabel::Zero {
        return Ok(0.0);
    }
    if params.g_m == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    Ok(photon_from_magnon(params, branch.magnon_occ))
}

/// Reconstructs the complex fixed point `(M, A)` of an admissible branch.
///
/// The phase `theta` of `M = |M| e^{i theta}` solves
/// `e^{-2 i theta} = [g^2 - (Delta_a - i kappa)(D - i gamma)] / [Omega (D + i gamma)]`
/// with `D = Delta_m + K |M|^2`, canonicalized to `[0, pi)`. The parity
/// partner `theta + pi` is an equally valid fixed point.
pub fn mean_field_amplitudes(
    params: &SystemParams,
    branch: &BranchSolution,
) -> Result<(Complex64, Complex64)> {
    let p = params;
    if branch.label == BranchLabel::Zero {
        return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    if !branch.admissible {
        return Err(Error::InadmissibleBranch(branch.label.name()));
    }
    if p.g_m == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let n = branch.magnon_occ;
    let shifted = p.delta_m + p.kerr() * n;
    let num = Complex64::new(p.g_m * p.g_m, 0.0)
        - Complex64::new(p.delta_a, -p.kappa_a) * Complex64::new(shifted, -p.gamma_m);
    let den = p.omega_drive * Complex64::new(shifted, p.gamma_m);
    let z = num / den;
    let modulus_err = z.norm() - 1.0;
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN fails too
    if !(modulus_err.abs() <= p.tol.tol_phase) {
        return Err(Error::PhaseInconsistent(modulus_err));
    }
    let theta = (-z.arg() / 2.0).rem_euclid(PI);
    let m = Complex64::from_polar(n.sqrt(), theta);
    let a = -Complex64::new(shifted, -p.gamma_m) * m / p.g_m;

    let (da, dm) = mean_field_rhs(p, a, m);
    let residual = da.norm().max(dm.norm());
    let scale = 1.0f64.max(m.norm()).max(a.norm());
    if residual > p.tol.tol_fp * scale {
        return Err(Error::PhaseInconsistent(residual));
    }
    Ok((m, a))
}

/// Critical detuning ratio `Delta_m / Delta_a` at which `Omega_1 = Omega_2`.
pub fn critical_xi(params: &SystemParams) -> f64 {
    let p = params;
    let g2 = p.g_m * p.g_m;
    let g4 = g2 * g2;
    let kg = p.kappa_a * p.gamma_m;
    let root = (4.0 * (p.delta_a * p.delta_a + p.kappa_a * p.kappa_a) * p.gamma_m * p.gamma_m
        + 4.0 * kg * g2
        + g4)
        .sqrt();
    2.0 * p.gamma_m * p.gamma_m / (root - (2.0 * kg + g2))
}

/// Drive strength at which the Plus/Minus discriminant first vanishes.
pub fn omega_1(params: &SystemParams) -> f64 {
    let p = params;
    let g2 = p.g_m * p.g_m;
    (p.delta_a * p.delta_a
        + p.kappa_a * p.kappa_a
        + (4.0 * p.kappa_a * p.gamma_m + g2) * g2 / (4.0 * p.gamma_m * p.gamma_m))
        .sqrt()
        - g2 / (2.0 * p.gamma_m)
}

/// Drive strength at which the zero branch changes stability.
pub fn omega_2(params: &SystemParams) -> Result<f64> {
    let p = params;
    let g2 = p.g_m * p.g_m;
    let radicand = p.delta_a * p.delta_a + p.kappa_a * p.kappa_a
        - (2.0 * p.delta_a * p.delta_m - 2.0 * p.kappa_a * p.gamma_m - g2) * g2
            / (p.delta_m * p.delta_m + p.gamma_m * p.gamma_m);
    if radicand < 0.0 || !radicand.is_finite() {
        return Err(Error::NoRealThreshold(radicand));
    }
    Ok(radicand.sqrt())
}

/// Admissibility of a nonzero branch under the threshold rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BranchStatus {
    Admissible,
    Inadmissible,
    /// The branch of the wrong sign for this Kerr coefficient; it is never stable.
    NotConsidered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub zero: BranchStatus,
    pub plus: BranchStatus,
    pub minus: BranchStatus,
}

impl Admissibility {
    pub fn get(&self, label: BranchLabel) -> BranchStatus {
        match label {
            BranchLabel::Zero => self.zero,
            BranchLabel::Plus => self.plus,
            BranchLabel::Minus => self.minus,
        }
    }
}

/// Threshold form of the positivity conditions: for `K > 0` the Plus branch
/// needs `Omega > Omega_1` below `xi` and `Omega > Omega_2` above it; for
/// `K < 0` the Minus branch has the two thresholds swapped.
pub fn admissibility(params: &SystemParams) -> Admissibility {
    let omega = params.omega_drive;
    let below_xi = params.detuning_ratio() < critical_xi(params);
    let o1 = omega_1(params);
    let o2 = omega_2(params).unwrap_or(f64::NAN);
    let use_omega_1 = match params.kerr_sign {
        KerrSign::Positive => below_xi,
        KerrSign::Negative => !below_xi,
    };
    let threshold = if use_omega_1 { o1 } else { o2 };
    let status = if omega > threshold {
        BranchStatus::Admissible
    } else {
        BranchStatus::Inadmissible
    };
    let (plus, minus) = match params.kerr_sign {
        KerrSign::Positive => (status, BranchStatus::NotConsidered),
        KerrSign::Negative => (BranchStatus::NotConsidered, status),
    };
    Admissibility {
        zero: BranchStatus::Admissible,
        plus,
        minus,
    }
}
