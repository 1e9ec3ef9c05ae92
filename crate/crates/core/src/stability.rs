//! Linearized fluctuation dynamics around a steady state and the phase
//! classification built on it.
//!
//! Quadratures are ordered `(x_a, y_a, x_m, y_m)`. For a fixed point with
//! magnon amplitude `M` the drift matrix is
//!
//! ```text
//! [ -kappa      Delta_a - Omega   0               g             ]
//! [ -Delta_a - Omega   -kappa     -g              0             ]
//! [ 0           g                 -gamma + Im F   D - Re F      ]
//! [ -g          0                 -D - Re F       -gamma - Im F ]
//! ```
//!
//! with `D = Delta_m + 2 K |M|^2` and `F = K M^2`.

use std::fmt;

use nalgebra::{linalg::Schur, Matrix4};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::steadystate::{magnon_branches, BranchLabel, BranchSolution};

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 500;

/// Real 4x4 drift matrix of the quadrature fluctuations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix(pub Matrix4<f64>);

impl DriftMatrix {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Row-major entries.
    pub fn rows(&self) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[(i, j)];
            }
        }
        out
    }
}

pub fn build_drift_matrix(params: &SystemParams, m_amplitude: Complex64) -> DriftMatrix {
    let p = params;
    let k = p.kerr();
    let f = k * m_amplitude * m_amplitude;
    let shifted = p.delta_m + 2.0 * k * m_amplitude.norm_sqr();
    let (g, om) = (p.g_m, p.omega_drive);
    #[rustfmt::skip]
    let m = Matrix4::new(
        -p.kappa_a,        p.delta_a - om, 0.0,                g,
        -p.delta_a - om,   -p.kappa_a,     -g,                 0.0,
        0.0,               g,              -p.gamma_m + f.im,  shifted - f.re,
        -g,                0.0,            -shifted - f.re,    -p.gamma_m - f.im,
    );
    DriftMatrix(m)
}

/// The four eigenvalues, sorted by real then imaginary part.
///
/// Computed from the real Schur form (Hessenberg reduction followed by
/// shifted QR), so conjugate pairs are exact.
pub fn eigenvalues(matrix: &DriftMatrix) -> Result<[Complex64; 4]> {
    let schur =
        Schur::try_new(matrix.0, SCHUR_EPS, SCHUR_MAX_ITER).ok_or(Error::ConvergenceFailure)?;
    let ev = schur.complex_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

pub fn max_real_part(eigs: &[Complex64]) -> f64 {
    eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Tri-state stability of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StabilityVerdict {
    Stable,
    /// `|max Re lambda| <= tol_stab`.
    Marginal,
    Unstable,
}

impl StabilityVerdict {
    pub fn from_max_re(max_re: f64, tol_stab: f64) -> Self {
        if max_re < -tol_stab {
            StabilityVerdict::Stable
        } else if max_re <= tol_stab {
            StabilityVerdict::Marginal
        } else {
            StabilityVerdict::Unstable
        }
    }

    pub fn is_stable(self) -> bool {
        self == StabilityVerdict::Stable
    }
}

pub fn stability_verdict(matrix: &DriftMatrix, tol_stab: f64) -> Result<StabilityVerdict> {
    let eigs = eigenvalues(matrix)?;
    Ok(StabilityVerdict::from_max_re(max_real_part(&eigs), tol_stab))
}

/// True iff every eigenvalue satisfies `Re lambda < -tol_stab`.
/// An eigensolver failure counts as not stable.
pub fn is_stable(matrix: &DriftMatrix, tol_stab: f64) -> bool {
    matches!(
        stability_verdict(matrix, tol_stab),
        Ok(StabilityVerdict::Stable)
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PhaseLabel {
    Normal,
    Superradiant,
    Bistable,
    Unstable,
}

impl PhaseLabel {
    pub fn from_stability(zero_stable: bool, nonzero_stable: bool) -> Self {
        match (zero_stable, nonzero_stable) {
            (true, false) => PhaseLabel::Normal,
            (false, true) => PhaseLabel::Superradiant,
            (true, true) => PhaseLabel::Bistable,
            (false, false) => PhaseLabel::Unstable,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PhaseLabel::Normal => "normal",
            PhaseLabel::Superradiant => "superradiant",
            PhaseLabel::Bistable => "bistable",
            PhaseLabel::Unstable => "unstable",
        }
    }

    /// Whether the macroscopically excited branch is stable in this phase.
    pub fn has_excited_state(self) -> bool {
        matches!(self, PhaseLabel::Superradiant | PhaseLabel::Bistable)
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Stability data for one steady-state branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchAnalysis {
    pub solution: BranchSolution,
    /// `None` for inadmissible branches, which are not steady states.
    pub drift: Option<DriftMatrix>,
    pub eigenvalues: Option<[Complex64; 4]>,
    pub verdict: Option<StabilityVerdict>,
}

impl BranchAnalysis {
    pub fn is_stable(&self) -> bool {
        self.verdict.is_some_and(StabilityVerdict::is_stable)
    }

    pub fn max_real_part(&self) -> Option<f64> {
        self.eigenvalues.as_ref().map(|e| max_real_part(e))
    }

    pub fn is_marginal(&self) -> bool {
        self.verdict == Some(StabilityVerdict::Marginal)
    }
}

pub fn analyze_branch(params: &SystemParams, solution: &BranchSolution) -> Result<BranchAnalysis> {
    let Some(m) = solution.m_amplitude.filter(|_| solution.admissible) else {
        return Ok(BranchAnalysis {
            solution: *solution,
            drift: None,
            eigenvalues: None,
            verdict: None,
        });
    };
    let drift = build_drift_matrix(params, m);
    let eigs = eigenvalues(&drift)?;
    Ok(BranchAnalysis {
        solution: *solution,
        drift: Some(drift),
        eigenvalues: Some(eigs),
        verdict: Some(StabilityVerdict::from_max_re(
            max_real_part(&eigs),
            params.tol.tol_stab,
        )),
    })
}

/// Stability of all three branches, including the one of the wrong sign.
pub fn analyze_all_branches(params: &SystemParams) -> Result<[BranchAnalysis; 3]> {
    let b = magnon_branches(params)?;
    Ok([
        analyze_branch(params, &b[0])?,
        analyze_branch(params, &b[1])?,
        analyze_branch(params, &b[2])?,
    ])
}

/// Phase of one parameter point with the branch data it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAnalysis {
    pub label: PhaseLabel,
    pub zero: BranchAnalysis,
    /// The sign-appropriate nonzero branch (Plus for `K > 0`, Minus for `K < 0`).
    pub excited: BranchAnalysis,
}

impl PhaseAnalysis {
    /// Either evaluated branch sits within `tol_stab` of the imaginary axis.
    pub fn marginal(&self) -> bool {
        self.zero.is_marginal() || self.excited.is_marginal()
    }
}

pub fn analyze_phase(params: &SystemParams) -> Result<PhaseAnalysis> {
    let b = magnon_branches(params)?;
    let zero = analyze_branch(params, &b[0])?;
    let label = BranchLabel::physical_for(params.kerr_sign);
    let excited = b.iter().find(|s| s.label == label).expect("three branches");
    let excited = analyze_branch(params, excited)?;
    Ok(PhaseAnalysis {
        label: PhaseLabel::from_stability(zero.is_stable(), excited.is_stable()),
        zero,
        excited,
    })
}

/// Normal if only the zero branch is stable, Superradiant if only the
/// sign-appropriate excited branch is, Bistable if both, Unstable if neither.
pub fn classify_phase(params: &SystemParams) -> Result<PhaseLabel> {
    analyze_phase(params).map(|a| a.label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::KerrSign;
    use approx::assert_relative_eq;

    fn reference(omega: f64, ratio: f64, sign: KerrSign) -> SystemParams {
        SystemParams::reference(omega, ratio, sign)
    }

    #[test]
    fn zero_branch_matrix_layout() {
        let p = reference(2.2, 1.3, KerrSign::Positive);
        let d = build_drift_matrix(&p, Complex64::new(0.0, 0.0)).rows();
        let dm = p.delta_m;
        assert_eq!(d[2], [0.0, 2.4, -1.0, dm]);
        assert_eq!(d[3], [-2.4, 0.0, -dm, -1.0]);
        assert_eq!(d[0], [-1.0, 3.0 - 2.2, 0.0, 2.4]);
        assert_eq!(d[1], [-3.0 - 2.2, -1.0, -2.4, 0.0]);
    }

    #[test]
    fn structural_zeros_and_couplings() {
        let p = reference(1.9, 0.7, KerrSign::Negative);
        let d = build_drift_matrix(&p, Complex64::new(0.8, -1.3)).rows();
        assert_eq!([d[0][2], d[1][3], d[2][0], d[3][1]], [0.0; 4]);
        assert_eq!([d[0][3], d[1][2], d[2][1], d[3][0]], [2.4, -2.4, 2.4, -2.4]);
    }

    #[test]
    fn diagonal_spectrum() {
        let p = SystemParams {
            delta_a: 0.0,
            delta_m: 0.0,
            g_m: 0.0,
            omega_drive: 0.0,
            kappa_a: 0.7,
            gamma_m: 0.7,
            ..SystemParams::default()
        };
        let eigs = eigenvalues(&build_drift_matrix(&p, Complex64::new(0.0, 0.0))).unwrap();
        for z in eigs {
            assert_relative_eq!(z.re, -0.7, epsilon = 1e-14);
            assert_relative_eq!(z.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn identity_verdicts() {
        let neg = DriftMatrix(-Matrix4::identity());
        let pos = DriftMatrix(Matrix4::identity());
        assert!(is_stable(&neg, 1e-9));
        assert!(!is_stable(&pos, 1e-9));
        let zero = DriftMatrix(Matrix4::zeros());
        assert_eq!(
            stability_verdict(&zero, 1e-9).unwrap(),
            StabilityVerdict::Marginal
        );
    }

    #[test]
    fn superradiant_branch_is_stable() {
        let p = reference(2.2, 1.3, KerrSign::Positive);
        let a = analyze_all_branches(&p).unwrap();
        assert!(a[1].is_stable());
        // wrong-sign branch does not exist here and is never stable
        assert!(!a[2].solution.admissible);
        assert!(!a[2].is_stable());
    }

    #[test]
    fn bistable_point_has_two_stable_branches() {
        let p = reference(2.05, 1.3, KerrSign::Negative);
        let a = analyze_all_branches(&p).unwrap();
        assert!(a[0].is_stable());
        assert!(a[2].is_stable());
    }

    #[test]
    fn wrong_sign_branch_unstable_where_it_exists() {
        // Close to the parametric resonance the Minus branch is positive for K > 0.
        let mut found = 0;
        for i in 0..60 {
            for j in 0..60 {
                let omega = 2.0 + 1.15 * i as f64 / 59.0;
                let ratio = 0.2 + 2.8 * j as f64 / 59.0;
                let a = analyze_all_branches(&reference(omega, ratio, KerrSign::Positive)).unwrap();
                if a[2].solution.admissible {
                    found += 1;
                    assert!(!a[2].is_stable(), "omega={omega} ratio={ratio}");
                }
                let a = analyze_all_branches(&reference(omega, ratio, KerrSign::Negative)).unwrap();
                if a[1].solution.admissible {
                    found += 1;
                    assert!(!a[1].is_stable(), "omega={omega} ratio={ratio}");
                }
            }
        }
        assert!(found > 50);
    }

    #[test]
    fn reference_classifications() {
        for sign in [KerrSign::Positive, KerrSign::Negative] {
            assert_eq!(
                classify_phase(&reference(1.0, 1.3, sign)).unwrap(),
                PhaseLabel::Normal
            );
        }
        assert_eq!(
            classify_phase(&reference(2.05, 1.3, KerrSign::Negative)).unwrap(),
            PhaseLabel::Bistable
        );
        assert_eq!(
            classify_phase(&reference(2.05, 1.3, KerrSign::Positive)).unwrap(),
            PhaseLabel::Normal
        );
        assert_eq!(
            classify_phase(&reference(2.2, 1.3, KerrSign::Positive)).unwrap(),
            PhaseLabel::Superradiant
        );
    }

    #[test]
    fn classify_propagates_singularity() {
        let p = reference(10f64.sqrt(), 1.3, KerrSign::Positive);
        assert!(matches!(
            classify_phase(&p),
            Err(Error::DegenerateDenominator(_))
        ));
    }

    proptest::proptest! {
        #[test]
        fn trace_and_conjugate_pairs(
            omega in 0.0f64..4.0,
            ratio in 0.0f64..3.0,
            re in -3.0f64..3.0,
            im in -3.0f64..3.0,
            positive in proptest::bool::ANY,
        ) {
            let sign = if positive { KerrSign::Positive } else { KerrSign::Negative };
            let p = reference(omega, ratio, sign);
            let d = build_drift_matrix(&p, Complex64::new(re, im));
            let expected = -2.0 * (p.kappa_a + p.gamma_m);
            proptest::prop_assert!((d.trace() - expected).abs() < 1e-12);
            let eigs = eigenvalues(&d).unwrap();
            let sum: Complex64 = eigs.iter().sum();
            proptest::prop_assert!((sum.re - d.trace()).abs() < 1e-8);
            proptest::prop_assert!(sum.im.abs() < 1e-8);
            for z in eigs {
                let partner = eigs.iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
                proptest::prop_assert!(partner < 1e-8 * (1.0 + z.norm()));
            }
        }
    }
}
