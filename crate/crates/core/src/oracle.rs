//! Brute-force cross-checks that do not share code paths with the analytic
//! branch formulas or the eigensolver: fixed-step RK4 relaxation of the
//! mean-field equations and of the covariance ODE, perturbation probes,
//! hysteresis sweeps and the Routh-Hurwitz test on the characteristic
//! polynomial.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fluctuations::{diffusion_matrix, solve_lyapunov_with, CovarianceMatrix, DiffusionMatrix};
use crate::model::{mean_field_rhs, SystemParams};
use crate::stability::{analyze_all_branches, DriftMatrix};
use crate::steadystate::BranchLabel;

/// Fixed-step integration settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rk4Settings {
    pub dt: f64,
    pub t_end: f64,
    /// Length of the trailing window used for the convergence test.
    pub window: f64,
    /// Converged once the state moves less than this over one window.
    pub tol: f64,
    /// Norm beyond which the trajectory counts as diverged.
    pub bound: f64,
    /// Stop at the first converged window instead of running to `t_end`.
    pub stop_early: bool,
}

impl Default for Rk4Settings {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 200.0,
            window: 1.0,
            tol: 1e-9,
            bound: 1e6,
            stop_early: true,
        }
    }
}

impl Rk4Settings {
    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.t_end > self.dt && self.window >= self.dt) {
            return Err(Error::InvalidParams(
                "need dt > 0, t_end > dt and window >= dt".into(),
            ));
        }
        Ok(())
    }

    fn steps_per_window(&self) -> usize {
        ((self.window / self.dt).round() as usize).max(1)
    }
}

fn rk4_step<const N: usize>(y: &mut [f64; N], dt: f64, f: &impl Fn(&[f64; N]) -> [f64; N]) {
    let shifted = |y: &[f64; N], k: &[f64; N], h: f64| -> [f64; N] {
        std::array::from_fn(|i| y[i] + h * k[i])
    };
    let k1 = f(y);
    let k2 = f(&shifted(y, &k1, dt / 2.0));
    let k3 = f(&shifted(y, &k2, dt / 2.0));
    let k4 = f(&shifted(y, &k3, dt));
    for i in 0..N {
        y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

fn max_abs_diff<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

struct Integration<const N: usize> {
    state: [f64; N],
    t: f64,
    converged: bool,
}

/// Integrates in windows; convergence is checked at every window boundary.
fn integrate<const N: usize>(
    mut y: [f64; N],
    settings: &Rk4Settings,
    f: impl Fn(&[f64; N]) -> [f64; N],
) -> Result<Integration<N>> {
    settings.validate()?;
    let per_window = settings.steps_per_window();
    let total = (settings.t_end / settings.dt).round() as usize;
    let mut step = 0;
    let mut converged = false;
    while step < total {
        let start = y;
        let n = per_window.min(total - step);
        for _ in 0..n {
            rk4_step(&mut y, settings.dt, &f);
        }
        step += n;
        let t = step as f64 * settings.dt;
        let norm = y.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if !norm.is_finite() || norm > settings.bound {
            return Err(Error::Diverged(t));
        }
        converged = n == per_window && max_abs_diff(&start, &y) < settings.tol;
        if converged && settings.stop_early {
            return Ok(Integration {
                state: y,
                t,
                converged,
            });
        }
    }
    Ok(Integration {
        state: y,
        t: step as f64 * settings.dt,
        converged,
    })
}

/// Final state of a mean-field relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Relaxation {
    pub a: Complex64,
    pub m: Complex64,
    pub converged: bool,
    pub t: f64,
}

impl Relaxation {
    pub fn magnon_occ(&self) -> f64 {
        self.m.norm_sqr()
    }
}

fn pack(a: Complex64, m: Complex64) -> [f64; 4] {
    [a.re, a.im, m.re, m.im]
}

fn unpack(y: &[f64; 4]) -> (Complex64, Complex64) {
    (Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]))
}

/// RK4 relaxation of the mean-field equations from `(a0, m0)`.
pub fn relax_mean_field(
    params: &SystemParams,
    a0: Complex64,
    m0: Complex64,
    settings: &Rk4Settings,
) -> Result<Relaxation> {
    let run = integrate(pack(a0, m0), settings, |y| {
        let (a, m) = unpack(y);
        let (da, dm) = mean_field_rhs(params, a, m);
        pack(da, dm)
    })?;
    let (a, m) = unpack(&run.state);
    Ok(Relaxation {
        a,
        m,
        converged: run.converged,
        t: run.t,
    })
}

/// Deterministic pseudorandom vector with entries in `[-scale, scale]`.
pub fn seeded_kick(seed: u64, scale: f64) -> [f64; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::array::from_fn(|_| scale * rng.gen_range(-1.0..=1.0))
}

/// Outcome of perturbing a fixed point and letting it evolve.
///
/// Envelopes are the largest distance from the fixed point over
/// `[T/4, T/2]` (early) and `[3T/4, T]` (late), which smooths out
/// oscillation and the initial transient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationProbe {
    pub initial_distance: f64,
    pub early_envelope: f64,
    pub late_envelope: f64,
    pub max_distance: f64,
    pub diverged: bool,
}

impl PerturbationProbe {
    /// Growth factor beyond which the state is taken to have left the fixed point.
    pub const ESCAPE_FACTOR: f64 = 1e3;

    pub fn grew(&self) -> bool {
        self.diverged
            || self.late_envelope > self.early_envelope
            || self.max_distance > Self::ESCAPE_FACTOR * self.initial_distance
    }
}

/// Kicks `(a, m)` by a seeded perturbation of size `scale` and integrates
/// for `settings.t_end`, tracking the distance to the fixed point.
pub fn probe_fixed_point(
    params: &SystemParams,
    a: Complex64,
    m: Complex64,
    scale: f64,
    seed: u64,
    settings: &Rk4Settings,
) -> Result<PerturbationProbe> {
    settings.validate()?;
    let fixed = pack(a, m);
    let kick = seeded_kick(seed, scale);
    let mut y: [f64; 4] = std::array::from_fn(|i| fixed[i] + kick[i]);
    let rhs = |y: &[f64; 4]| {
        let (a, m) = unpack(y);
        let (da, dm) = mean_field_rhs(params, a, m);
        pack(da, dm)
    };
    let total = (settings.t_end / settings.dt).round() as usize;
    let mut probe = PerturbationProbe {
        initial_distance: max_abs_diff(&y, &fixed),
        early_envelope: 0.0,
        late_envelope: 0.0,
        max_distance: 0.0,
        diverged: false,
    };
    for step in 1..=total {
        rk4_step(&mut y, settings.dt, &rhs);
        let norm = y.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if !norm.is_finite() || norm > settings.bound {
            probe.diverged = true;
            probe.max_distance = f64::INFINITY;
            probe.late_envelope = f64::INFINITY;
            return Ok(probe);
        }
        let d = max_abs_diff(&y, &fixed);
        probe.max_distance = probe.max_distance.max(d);
        if 4 * step >= total && 2 * step <= total {
            probe.early_envelope = probe.early_envelope.max(d);
        }
        if 4 * step >= 3 * total {
            probe.late_envelope = probe.late_envelope.max(d);
        }
    }
    Ok(probe)
}

fn pack_matrix(m: &Matrix4<f64>) -> [f64; 16] {
    std::array::from_fn(|k| m[(k % 4, k / 4)])
}

fn unpack_matrix(y: &[f64; 16]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| y[i + 4 * j])
}

/// Integrates `dV/dt = L V + V L^T + D` from `V(0) = 0` to `t_end`.
pub fn relax_covariance(
    drift: &DriftMatrix,
    diff: &DiffusionMatrix,
    t_end: f64,
    dt: f64,
) -> Result<CovarianceMatrix> {
    relax_covariance_from(drift, diff, &Matrix4::zeros(), t_end, dt)
}

pub fn relax_covariance_from(
    drift: &DriftMatrix,
    diff: &DiffusionMatrix,
    v0: &Matrix4<f64>,
    t_end: f64,
    dt: f64,
) -> Result<CovarianceMatrix> {
    let l = *drift.matrix();
    let lt = l.transpose();
    let d = diff.matrix();
    let settings = Rk4Settings {
        dt,
        t_end,
        window: t_end.min(1.0).max(dt),
        tol: 0.0,
        stop_early: false,
        ..Rk4Settings::default()
    };
    let run = integrate(pack_matrix(v0), &settings, |y| {
        let v = unpack_matrix(y);
        pack_matrix(&(l * v + v * lt + d))
    })?;
    let v = unpack_matrix(&run.state);
    Ok(CovarianceMatrix((v + v.transpose()) * 0.5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HysteresisSettings {
    pub rk4: Rk4Settings,
    /// Size of the seeded kick added before each point so that an unstable
    /// state is actually left.
    pub kick: f64,
    pub seed: u64,
}

impl Default for HysteresisSettings {
    /// The long horizon lets a kick of `1e-4` escape an unstable state with
    /// growth rate down to about `5e-4`; stable points stop early.
    fn default() -> Self {
        Self {
            rk4: Rk4Settings {
                t_end: 2e4,
                ..Rk4Settings::default()
            },
            kick: 1e-4,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HysteresisRow {
    pub omega: f64,
    /// `|K| |M|^2 / gamma_m` of the state reached; NaN if diverged.
    pub rho: f64,
    pub converged: bool,
    pub diverged: bool,
}

/// Follows the attractor along `omegas`, carrying each final state forward
/// as the next initial condition. The first point starts near the origin.
pub fn hysteresis_sweep(
    params: &SystemParams,
    omegas: &[f64],
    settings: &HysteresisSettings,
) -> Result<Vec<HysteresisRow>> {
    let monotone = omegas.windows(2).all(|w| w[1] > w[0]) || omegas.windows(2).all(|w| w[1] < w[0]);
    if !monotone {
        return Err(Error::InvalidSweep("omega list must be strictly monotone".into()));
    }
    let mut state = [0.0; 4];
    let mut rows = Vec::with_capacity(omegas.len());
    for (k, &omega) in omegas.iter().enumerate() {
        let p = params.with_omega(omega);
        let kick = seeded_kick(settings.seed.wrapping_add(k as u64), settings.kick);
        let start: [f64; 4] = std::array::from_fn(|i| state[i] + kick[i]);
        let (a0, m0) = unpack(&start);
        match relax_mean_field(&p, a0, m0, &settings.rk4) {
            Ok(r) => {
                state = pack(r.a, r.m);
                rows.push(HysteresisRow {
                    omega,
                    rho: p.scaled_occupation(r.magnon_occ()),
                    converged: r.converged,
                    diverged: false,
                });
            }
            Err(Error::Diverged(_)) => {
                state = [0.0; 4];
                rows.push(HysteresisRow {
                    omega,
                    rho: f64::NAN,
                    converged: false,
                    diverged: true,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

/// Coefficients `[1, c1, c2, c3, c4]` of `det(lambda I - L)`, by the
/// Faddeev-LeVerrier recursion.
pub fn characteristic_polynomial(m: &Matrix4<f64>) -> [f64; 5] {
    let mut coeffs = [1.0, 0.0, 0.0, 0.0, 0.0];
    let mut mk = Matrix4::<f64>::zeros();
    for k in 1..=4 {
        mk = m * (mk + Matrix4::identity() * coeffs[k - 1]);
        coeffs[k] = -mk.trace() / k as f64;
    }
    coeffs
}

/// Routh-Hurwitz test for the quartic `l^4 + c1 l^3 + c2 l^2 + c3 l + c4`:
/// all roots lie in the open left half plane iff `c1, c3, c4 > 0`,
/// `c1 c2 - c3 > 0` and `c1 c2 c3 - c3^2 - c1^2 c4 > 0`.
pub fn routh_hurwitz_stable(drift: &DriftMatrix) -> bool {
    let [_, c1, c2, c3, c4] = characteristic_polynomial(drift.matrix());
    c1 > 0.0
        && c3 > 0.0
        && c4 > 0.0
        && c1 * c2 - c3 > 0.0
        && c1 * c2 * c3 - c3 * c3 - c1 * c1 * c4 > 0.0
}

/// Settings for [`validate_point`]. Integration times grow with the
/// slowest decay rate, up to `t_cap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationSettings {
    pub relax: Rk4Settings,
    pub relax_kick: f64,
    pub probe: Rk4Settings,
    pub probe_kick: f64,
    pub cov_dt: f64,
    pub cov_t_end: f64,
    pub t_cap: f64,
    pub seed: u64,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        Self {
            relax: Rk4Settings {
                tol: 1e-12,
                ..Rk4Settings::default()
            },
            relax_kick: 1e-3,
            probe: Rk4Settings {
                stop_early: false,
                ..Rk4Settings::default()
            },
            probe_kick: 1e-7,
            cov_dt: 1e-2,
            cov_t_end: 50.0,
            t_cap: 2e5,
            seed: 17,
        }
    }
}

/// Oracle-versus-formula comparison for one branch at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchCheck {
    pub label: BranchLabel,
    pub admissible: bool,
    /// Eigenvalue verdict; false for inadmissible branches.
    pub stable: bool,
    /// NaN for inadmissible branches.
    pub max_re: f64,
    /// Perturbation growth, for admissible branches.
    pub probe_grew: Option<bool>,
    pub rho_formula: f64,
    /// Relaxed order parameter, for stable branches.
    pub rho_oracle: Option<f64>,
    /// Largest entrywise gap between the Lyapunov solution and the relaxed
    /// covariance, for stable branches.
    pub lyapunov_diff: Option<f64>,
    pub lyapunov_residual: Option<f64>,
}

impl BranchCheck {
    pub fn stability_agrees(&self) -> bool {
        self.probe_grew.is_none_or(|grew| grew != self.stable)
    }

    pub fn rho_diff(&self) -> Option<f64> {
        self.rho_oracle.map(|r| (r - self.rho_formula).abs())
    }
}

fn slow_time(max_re: f64, factor: f64, floor: f64, cap: f64) -> f64 {
    (factor / max_re.abs()).max(floor).min(cap)
}

/// Runs every oracle against the analytic results for all three branches.
pub fn validate_point(params: &SystemParams, settings: &ValidationSettings) -> Result<[BranchCheck; 3]> {
    let branches = analyze_all_branches(params)?;
    let diff = diffusion_matrix(params);
    let mut out = Vec::with_capacity(3);
    for (k, b) in branches.iter().enumerate() {
        let s = &b.solution;
        let seed = settings.seed.wrapping_mul(31).wrapping_add(k as u64);
        let mut check = BranchCheck {
            label: s.label,
            admissible: s.admissible,
            stable: b.is_stable(),
            max_re: b.max_real_part().unwrap_or(f64::NAN),
            probe_grew: None,
            rho_formula: if s.admissible {
                params.scaled_occupation(s.magnon_occ)
            } else {
                f64::NAN
            },
            rho_oracle: None,
            lyapunov_diff: None,
            lyapunov_residual: None,
        };
        let (Some(m), Some(a), Some(drift)) = (s.m_amplitude, s.a_amplitude, b.drift) else {
            out.push(check);
            continue;
        };
        check.probe_grew = Some(
            probe_fixed_point(params, a, m, settings.probe_kick, seed, &settings.probe)?.grew(),
        );
        if check.stable {
            let kick = seeded_kick(seed ^ 0x5eed, settings.relax_kick);
            let relax = Rk4Settings {
                t_end: slow_time(check.max_re, 25.0, settings.relax.t_end, settings.t_cap),
                ..settings.relax
            };
            let r = relax_mean_field(
                params,
                a + Complex64::new(kick[0], kick[1]),
                m + Complex64::new(kick[2], kick[3]),
                &relax,
            )?;
            check.rho_oracle = Some(params.scaled_occupation(r.magnon_occ()));

            let exact = solve_lyapunov_with(&drift, &diff, params.tol.tol_stab)?;
            let scale = exact.covariance.0.amax().max(1.0);
            let t = slow_time(
                check.max_re,
                0.75 * (1e7 * scale).ln(),
                settings.cov_t_end,
                settings.t_cap,
            );
            let relaxed = relax_covariance(&drift, &diff, t, settings.cov_dt)?;
            check.lyapunov_diff = Some((exact.covariance.0 - relaxed.0).amax());
            check.lyapunov_residual = Some(exact.residual);
        }
        out.push(check);
    }
    Ok([out[0], out[1], out[2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluctuations::{diffusion_matrix, solve_lyapunov};
    use crate::model::KerrSign;
    use crate::stability::{analyze_all_branches, analyze_phase, is_stable};
    use crate::steadystate::{magnon_branches, omega_1, omega_2};

    fn reference(omega: f64, ratio: f64, sign: KerrSign) -> SystemParams {
        SystemParams::reference(omega, ratio, sign)
    }

    #[test]
    fn undriven_decay_to_origin() {
        let p = reference(0.0, 1.3, KerrSign::Positive);
        let k = seeded_kick(1, 0.1);
        let r = relax_mean_field(
            &p,
            Complex64::new(k[0], k[1]),
            Complex64::new(k[2], k[3]),
            &Rk4Settings::default(),
        )
        .unwrap();
        assert!(r.converged);
        assert!(r.a.norm() < 1e-8 && r.m.norm() < 1e-8);
    }

    #[test]
    fn relaxation_returns_to_excited_branch() {
        let p = reference(2.2, 1.3, KerrSign::Positive);
        let b = magnon_branches(&p).unwrap()[1];
        let (m, a) = (b.m_amplitude.unwrap(), b.a_amplitude.unwrap());
        let k = seeded_kick(3, 1e-3);
        let r = relax_mean_field(
            &p,
            a + Complex64::new(k[0], k[1]),
            m + Complex64::new(k[2], k[3]),
            &Rk4Settings::default(),
        )
        .unwrap();
        assert!(r.converged);
        assert!((r.magnon_occ() - b.magnon_occ).abs() < 1e-6);
        let (da, dm) = mean_field_rhs(&p, r.a, r.m);
        assert!(da.norm() < 1e-8 && dm.norm() < 1e-8);
    }

    #[test]
    fn two_basins_in_bistable_phase() {
        let p = reference(2.05, 1.3, KerrSign::Negative);
        let k = seeded_kick(5, 1e-6);
        let r = relax_mean_field(
            &p,
            Complex64::new(k[0], k[1]),
            Complex64::new(k[2], k[3]),
            &Rk4Settings::default(),
        )
        .unwrap();
        assert!(r.magnon_occ() < 1e-12);

        let b = magnon_branches(&p).unwrap()[2];
        let (m, a) = (b.m_amplitude.unwrap(), b.a_amplitude.unwrap());
        let k = seeded_kick(6, 1e-3);
        let r = relax_mean_field(
            &p,
            a + Complex64::new(k[0], k[1]),
            m + Complex64::new(k[2], k[3]),
            &Rk4Settings {
                t_end: 1000.0,
                ..Rk4Settings::default()
            },
        )
        .unwrap();
        assert!((r.magnon_occ() - b.magnon_occ).abs() < 1e-6);
    }

    #[test]
    fn runaway_is_reported() {
        // Deep in the unstable corner for K < 0 nothing is an attractor.
        let p = reference(2.38, 1.45, KerrSign::Negative);
        let settings = Rk4Settings {
            bound: 1e3,
            t_end: 2000.0,
            ..Rk4Settings::default()
        };
        let r = relax_mean_field(&p, Complex64::new(0.01, 0.0), Complex64::new(0.0, 0.01), &settings);
        match r {
            Err(Error::Diverged(_)) => {}
            Ok(r) => assert!(!r.converged, "settled at |M|^2 = {}", r.magnon_occ()),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn perturbation_probes_agree_with_spectrum() {
        let p = reference(2.05, 1.3, KerrSign::Negative);
        for b in analyze_all_branches(&p).unwrap() {
            let Some(m) = b.solution.m_amplitude else { continue };
            let a = b.solution.a_amplitude.unwrap();
            let probe = probe_fixed_point(&p, a, m, 1e-7, 11, &Rk4Settings::default()).unwrap();
            assert_eq!(probe.grew(), !b.is_stable(), "{:?}", b.solution.label);
        }
    }

    #[test]
    fn scalar_covariance_relaxation() {
        let drift = DriftMatrix(-Matrix4::identity());
        let diff = DiffusionMatrix([1.0; 4]);
        let t = 3.0;
        let v = relax_covariance(&drift, &diff, t, 1e-3).unwrap();
        let expected = (1.0 - (-2.0 * t).exp()) / 2.0;
        for i in 0..4 {
            assert!((v.0[(i, i)] - expected).abs() < 1e-12);
        }
        let v = relax_covariance(&drift, &diff, 50.0, 1e-3).unwrap();
        assert!((v.0 - Matrix4::identity() * 0.5).amax() < 1e-12);
    }

    #[test]
    fn covariance_relaxation_matches_lyapunov() {
        let p = reference(2.2, 1.3, KerrSign::Positive);
        let a = analyze_phase(&p).unwrap();
        let drift = a.excited.drift.unwrap();
        let diff = diffusion_matrix(&p);
        let exact = solve_lyapunov(&drift, &diff).unwrap().covariance;
        let relaxed = relax_covariance(&drift, &diff, 50.0, 1e-3).unwrap();
        assert!((exact.0 - relaxed.0).amax() < 1e-6);
        // independent of the starting covariance
        let v0 = Matrix4::from_diagonal(&[3.0, 1.0, 2.0, 0.5].into());
        let relaxed = relax_covariance_from(&drift, &diff, &v0, 50.0, 1e-3).unwrap();
        assert!((exact.0 - relaxed.0).amax() < 1e-6);
    }

    #[test]
    fn unstable_covariance_diverges() {
        let drift = DriftMatrix(Matrix4::identity() * 0.5);
        let r = relax_covariance(&drift, &DiffusionMatrix([1.0; 4]), 50.0, 1e-3);
        assert!(matches!(r, Err(Error::Diverged(_))));
    }

    #[test]
    fn characteristic_polynomial_of_diagonal() {
        let m = Matrix4::from_diagonal(&[1.0, 2.0, 3.0, 4.0].into());
        // (l-1)(l-2)(l-3)(l-4) = l^4 - 10 l^3 + 35 l^2 - 50 l + 24
        assert_eq!(characteristic_polynomial(&m), [1.0, -10.0, 35.0, -50.0, 24.0]);
    }

    #[test]
    fn routh_hurwitz_on_reference_points() {
        let p = reference(2.05, 1.3, KerrSign::Negative);
        let a = analyze_phase(&p).unwrap();
        assert!(routh_hurwitz_stable(&a.zero.drift.unwrap()));
        assert!(routh_hurwitz_stable(&a.excited.drift.unwrap()));
        let q = reference(2.2, 1.3, KerrSign::Positive);
        let a = analyze_phase(&q).unwrap();
        assert!(!routh_hurwitz_stable(&a.zero.drift.unwrap()));
        assert!(!is_stable(&a.zero.drift.unwrap(), 1e-9));
    }

    #[test]
    fn hysteresis_flat_below_threshold() {
        let p = reference(0.0, 1.3, KerrSign::Negative);
        let up: Vec<f64> = (0..8).map(|i| 1.5 + 0.05 * i as f64).collect();
        let down: Vec<f64> = up.iter().rev().copied().collect();
        for omegas in [up, down] {
            let rows = hysteresis_sweep(&p, &omegas, &HysteresisSettings::default()).unwrap();
            assert!(rows.iter().all(|r| r.rho < 1e-6));
        }
    }

    #[test]
    fn hysteresis_loop_brackets_bistable_window() {
        let p = reference(0.0, 1.3, KerrSign::Negative);
        let (o1, o2) = (omega_1(&p), omega_2(&p).unwrap());
        let step = 0.005;
        let up: Vec<f64> = (0..61).map(|i| 1.95 + step * i as f64).collect();
        let down: Vec<f64> = up.iter().rev().copied().collect();
        let settings = HysteresisSettings::default();
        let rows_up = hysteresis_sweep(&p, &up, &settings).unwrap();
        let rows_down = hysteresis_sweep(&p, &down, &settings).unwrap();
        let jump_up = rows_up.iter().find(|r| r.rho > 1e-3).unwrap().omega;
        let drop_down = rows_down.iter().find(|r| r.rho < 1e-3).unwrap().omega;
        assert!(jump_up > o2 && jump_up - o2 <= step + 1e-12, "up {jump_up} vs {o2}");
        assert!(drop_down < o1 && o1 - drop_down <= step + 1e-12, "down {drop_down} vs {o1}");
    }

    #[test]
    fn validation_at_bistable_point() {
        let p = reference(2.05, 1.3, KerrSign::Negative);
        let checks = validate_point(&p, &ValidationSettings::default()).unwrap();
        for c in &checks {
            assert!(c.stability_agrees(), "{c:?}");
            if c.stable {
                assert!(c.rho_diff().unwrap() < 1e-5, "{c:?}");
                assert!(c.lyapunov_diff.unwrap() < 1e-6, "{c:?}");
            }
        }
        assert_eq!(checks.iter().filter(|c| c.stable).count(), 2);
    }

    #[test]
    fn non_monotone_list_rejected() {
        let p = SystemParams::default();
        assert!(hysteresis_sweep(&p, &[1.0, 1.2, 1.1], &HysteresisSettings::default()).is_err());
    }
}
