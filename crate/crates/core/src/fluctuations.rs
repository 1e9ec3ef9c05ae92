//! Steady-state quadrature covariance from the Lyapunov equation
//! `L V + V L^T = -D` and the magnon-number fluctuations derived from it.

use nalgebra::{Matrix4, SMatrix, SVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{SystemParams, Tolerances};
use crate::stability::{
    analyze_phase, eigenvalues, max_real_part, BranchAnalysis, DriftMatrix, PhaseLabel,
    StabilityVerdict,
};

type Mat16 = SMatrix<f64, 16, 16>;
type Vec16 = SVector<f64, 16>;

/// Solutions with `max Re lambda` above this are flagged as near-marginal.
pub const NEAR_MARGINAL: f64 = -1e-6;

const PIVOT_RATIO: f64 = 1e-14;
const REFINEMENT_STEPS: usize = 3;

/// Diagonal noise-input matrix `diag[(2n_a+1) kappa, (2n_a+1) kappa, (2n_m+1) gamma, (2n_m+1) gamma]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiffusionMatrix(pub [f64; 4]);

impl DiffusionMatrix {
    pub fn matrix(&self) -> Matrix4<f64> {
        Matrix4::from_diagonal(&self.0.into())
    }
}

pub fn diffusion_matrix(params: &SystemParams) -> DiffusionMatrix {
    let cav = (2.0 * params.nbar_a + 1.0) * params.kappa_a;
    let mag = (2.0 * params.nbar_m + 1.0) * params.gamma_m;
    DiffusionMatrix([cav, cav, mag, mag])
}

/// Symmetric quadrature covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix(pub Matrix4<f64>);

impl CovarianceMatrix {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn max_asymmetry(&self) -> f64 {
        (self.0 - self.0.transpose()).amax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let sym = (self.0 + self.0.transpose()) * 0.5;
        sym.symmetric_eigenvalues().min()
    }
}

/// `max |L V + V L^T + D|`.
pub fn lyapunov_residual(drift: &DriftMatrix, diff: &DiffusionMatrix, cov: &Matrix4<f64>) -> f64 {
    let l = drift.matrix();
    (l * cov + cov * l.transpose() + diff.matrix()).amax()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovSolution {
    pub covariance: CovarianceMatrix,
    pub residual: f64,
    pub max_re: f64,
    /// `max Re lambda > NEAR_MARGINAL`: the solution is large and has lost digits.
    pub near_marginal: bool,
}

impl LyapunovSolution {
    pub fn magnon_fluctuations(&self) -> f64 {
        magnon_fluctuations(&self.covariance)
    }
}

/// Matrix of the vectorized operator `V -> L V + V L^T` acting on the
/// column-major `vec(V)`, i.e. `I (x) L + L (x) I`.
fn vectorized_operator(l: &Matrix4<f64>) -> Mat16 {
    let mut op = Mat16::zeros();
    for j in 0..4 {
        for i in 0..4 {
            let row = i + 4 * j;
            for k in 0..4 {
                op[(row, k + 4 * j)] += l[(i, k)];
                op[(row, i + 4 * k)] += l[(j, k)];
            }
        }
    }
    op
}

fn vec_of(m: &Matrix4<f64>) -> Vec16 {
    Vec16::from_iterator(m.iter().copied())
}

fn unvec(v: &Vec16) -> Matrix4<f64> {
    Matrix4::from_iterator(v.iter().copied())
}

pub fn solve_lyapunov(drift: &DriftMatrix, diff: &DiffusionMatrix) -> Result<LyapunovSolution> {
    solve_lyapunov_with(drift, diff, Tolerances::default().tol_stab)
}

/// Solves `L V + V L^T = -D` by dense LU on the 16x16 vectorized system,
/// with a few rounds of iterative refinement. Requires a stable drift.
pub fn solve_lyapunov_with(
    drift: &DriftMatrix,
    diff: &DiffusionMatrix,
    tol_stab: f64,
) -> Result<LyapunovSolution> {
    let max_re = max_real_part(&eigenvalues(drift)?);
    match StabilityVerdict::from_max_re(max_re, tol_stab) {
        StabilityVerdict::Unstable => return Err(Error::UnstableDrift(max_re)),
        StabilityVerdict::Marginal => return Err(Error::SingularSystem),
        StabilityVerdict::Stable => {}
    }

    let lu = vectorized_operator(drift.matrix()).lu();
    let u = lu.u();
    let pivots = u.diagonal().map(f64::abs);
    if pivots.min() <= PIVOT_RATIO * pivots.max() {
        return Err(Error::SingularSystem);
    }

    let d = diff.matrix();
    let mut x = lu.solve(&(-vec_of(&d))).ok_or(Error::SingularSystem)?;
    let mut cov = unvec(&x);
    let mut residual = lyapunov_residual(drift, diff, &cov);
    for _ in 0..REFINEMENT_STEPS {
        if residual == 0.0 {
            break;
        }
        let l = drift.matrix();
        let r = l * cov + cov * l.transpose() + d;
        let Some(dx) = lu.solve(&(-vec_of(&r))) else {
            break;
        };
        let candidate = unvec(&(x + dx));
        let cand_res = lyapunov_residual(drift, diff, &candidate);
        if cand_res >= residual {
            break;
        }
        x += dx;
        cov = candidate;
        residual = cand_res;
    }

    let sym = (cov + cov.transpose()) * 0.5;
    let residual = lyapunov_residual(drift, diff, &sym);
    Ok(LyapunovSolution {
        covariance: CovarianceMatrix(sym),
        residual,
        max_re,
        near_marginal: max_re > NEAR_MARGINAL,
    })
}

/// `<dm^dag dm> = [(V_33 + V_44) - 1] / 2`.
pub fn magnon_fluctuations(cov: &CovarianceMatrix) -> f64 {
    (cov.0[(2, 2)] + cov.0[(3, 3)] - 1.0) / 2.0
}

/// Fluctuations on the branch the order parameter reports for this phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluctuationSample {
    pub phase: PhaseLabel,
    /// `<dm^dag dm>` on the reported branch; NaN in the unstable phase.
    pub magnon_fluct: f64,
    /// Same on the zero branch when it is stable (differs from the above
    /// only in the bistable phase).
    pub zero_branch_fluct: Option<f64>,
    pub residual: f64,
    pub near_marginal: bool,
}

impl FluctuationSample {
    /// `lg(<dm^dag dm> + 1)`.
    pub fn log_fluct(&self) -> f64 {
        (self.magnon_fluct + 1.0).log10()
    }
}

pub fn phase_fluctuations(params: &SystemParams) -> Result<FluctuationSample> {
    let analysis = analyze_phase(params)?;
    let diff = diffusion_matrix(params);
    let tol = params.tol.tol_stab;
    let solve = |b: &BranchAnalysis| -> Result<Option<LyapunovSolution>> {
        match b.drift {
            Some(drift) if b.is_stable() => solve_lyapunov_with(&drift, &diff, tol).map(Some),
            _ => Ok(None),
        }
    };
    let zero = solve(&analysis.zero)?;
    let reported = match analysis.label {
        PhaseLabel::Normal => zero,
        PhaseLabel::Superradiant | PhaseLabel::Bistable => solve(&analysis.excited)?,
        PhaseLabel::Unstable => None,
    };
    Ok(FluctuationSample {
        phase: analysis.label,
        magnon_fluct: reported.map_or(f64::NAN, |s| s.magnon_fluctuations()),
        zero_branch_fluct: zero.map(|s| s.magnon_fluctuations()),
        residual: reported.map_or(0.0, |s| s.residual),
        near_marginal: reported.is_some_and(|s| s.near_marginal),
    })
}
