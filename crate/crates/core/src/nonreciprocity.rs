//! Order-parameter convention and the bidirectional contrast between the
//! `K > 0` and `K < 0` configurations at otherwise identical parameters.
//!
//! The order parameter is the scaled magnon number `rho = |K| |M|^2 / gamma_m`.
//! In the bistable phase the excited branch is reported; the zero branch is
//! the alternative, available through [`crate::stability::analyze_phase`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{KerrSign, SystemParams};
use crate::stability::{analyze_phase, PhaseAnalysis, PhaseLabel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderParameter {
    /// NaN in the unstable phase.
    pub rho: f64,
    pub phase: PhaseLabel,
    pub marginal: bool,
}

impl OrderParameter {
    pub fn from_analysis(params: &SystemParams, analysis: &PhaseAnalysis) -> Self {
        let rho = match analysis.label {
            PhaseLabel::Normal => 0.0,
            PhaseLabel::Superradiant | PhaseLabel::Bistable => {
                params.scaled_occupation(analysis.excited.solution.magnon_occ)
            }
            PhaseLabel::Unstable => f64::NAN,
        };
        Self {
            rho,
            phase: analysis.label,
            marginal: analysis.marginal(),
        }
    }

    pub fn is_unstable(&self) -> bool {
        self.phase == PhaseLabel::Unstable
    }
}

pub fn order_parameter(params: &SystemParams) -> Result<OrderParameter> {
    let analysis = analyze_phase(params)?;
    Ok(OrderParameter::from_analysis(params, &analysis))
}

/// `|rho+ - rho-| / (rho+ + rho-)`, or 0 when the two agree within the
/// relative tolerance `eps` (including both zero).
pub fn contrast_value(rho_pos: f64, rho_neg: f64, eps: f64) -> f64 {
    let sum = rho_pos + rho_neg;
    let diff = (rho_pos - rho_neg).abs();
    if sum == 0.0 || diff <= eps * sum {
        0.0
    } else {
        diff / sum
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContrastPoint {
    pub omega: f64,
    pub detuning_ratio: f64,
    pub rho_pos: f64,
    pub rho_neg: f64,
    /// NaN when either sign is unstable.
    pub contrast: f64,
    pub phase_pos: PhaseLabel,
    pub phase_neg: PhaseLabel,
    pub marginal: bool,
}

impl ContrastPoint {
    pub fn in_unstable_region(&self) -> bool {
        self.phase_pos == PhaseLabel::Unstable || self.phase_neg == PhaseLabel::Unstable
    }
}

/// Evaluates both Kerr signs at `params`; the sign stored in `params` is ignored.
/// Unstable points get a NaN contrast instead of an error.
pub fn evaluate_contrast(params: &SystemParams) -> Result<ContrastPoint> {
    let pos = order_parameter(&params.with_kerr_sign(KerrSign::Positive))?;
    let neg = order_parameter(&params.with_kerr_sign(KerrSign::Negative))?;
    let contrast = if pos.is_unstable() || neg.is_unstable() {
        f64::NAN
    } else {
        contrast_value(pos.rho, neg.rho, params.tol.eps_contrast)
    };
    Ok(ContrastPoint {
        omega: params.omega_drive,
        detuning_ratio: params.detuning_ratio(),
        rho_pos: pos.rho,
        rho_neg: neg.rho,
        contrast,
        phase_pos: pos.phase,
        phase_neg: neg.phase,
        marginal: pos.marginal || neg.marginal,
    })
}

/// Contrast ratio at one point; [`Error::UnstableRegion`] if either sign is unstable.
pub fn contrast_ratio(params: &SystemParams) -> Result<ContrastPoint> {
    let point = evaluate_contrast(params)?;
    if point.in_unstable_region() {
        return Err(Error::UnstableRegion);
    }
    Ok(point)
}
