//! Deterministic grid evaluation over drive strength and detuning ratio.
//!
//! Points are evaluated independently and collected by index, so the output
//! is identical for any worker count. Rows are ordered by ratio, then by
//! omega within a row.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fluctuations::{phase_fluctuations, FluctuationSample};
use crate::model::{KerrSign, SystemParams};
use crate::nonreciprocity::{evaluate_contrast, order_parameter, ContrastPoint, OrderParameter};
use crate::stability::{analyze_phase, PhaseLabel};

/// Evenly spaced samples `min..=max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidSweep(format!("{name}: count must be >= 2")));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN fails too
        if !(self.min < self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::InvalidSweep(format!("{name}: need finite min < max")));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RatioAxis {
    Range(Axis),
    Fixed(f64),
}

impl RatioAxis {
    pub fn count(&self) -> usize {
        match self {
            RatioAxis::Range(a) => a.count,
            RatioAxis::Fixed(_) => 1,
        }
    }

    pub fn value(&self, j: usize) -> f64 {
        match self {
            RatioAxis::Range(a) => a.value(j),
            RatioAxis::Fixed(r) => *r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub omega: Axis,
    pub ratio: RatioAxis,
    /// Supplies everything except the drive, the magnon detuning and (for
    /// two-sign datasets) the Kerr sign.
    pub base: SystemParams,
}

impl SweepSpec {
    /// Default phase-diagram domain: 400 x 400 over `Omega in [1.8, 2.4]`, ratio in `[0.5, 1.5]`.
    pub fn diagram(base: SystemParams) -> Self {
        Self {
            omega: Axis::new(1.8, 2.4, 400),
            ratio: RatioAxis::Range(Axis::new(0.5, 1.5, 400)),
            base,
        }
    }

    /// Default 1-D cut: 2000 points over `Omega in [1.8, 2.4]` at a fixed ratio.
    pub fn cut(base: SystemParams, ratio: f64) -> Self {
        Self {
            omega: Axis::new(1.8, 2.4, 2000),
            ratio: RatioAxis::Fixed(ratio),
            base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.omega.validate("omega")?;
        match self.ratio {
            RatioAxis::Range(a) => a.validate("ratio")?,
            RatioAxis::Fixed(r) if !(r.is_finite() && r > 0.0) => {
                return Err(Error::InvalidSweep("ratio must be finite and > 0".into()))
            }
            RatioAxis::Fixed(_) => {}
        }
        self.base.validate().map_err(|e| Error::InvalidSweep(e.to_string()))
    }

    pub fn len(&self) -> usize {
        self.omega.count * self.ratio.count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Parameters of flat index `k` (row-major, ratio outer).
    pub fn params_at(&self, k: usize) -> SystemParams {
        let (j, i) = (k / self.omega.count, k % self.omega.count);
        self.base
            .with_ratio(self.ratio.value(j))
            .with_omega(self.omega.value(i))
    }
}

/// Worker count for grid evaluation. `0` means the machine default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Workers(pub usize);

impl Workers {
    /// Maps `f` over `0..n` in parallel, returning results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        if self.0 == 1 {
            return (0..n).map(f).collect();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.0)
            .build()
            .expect("thread pool");
        pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint<T> {
    pub omega: f64,
    pub ratio: f64,
    pub value: Result<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    pub spec: SweepSpec,
    pub points: Vec<GridPoint<T>>,
}

impl<T> Grid<T> {
    /// Point at omega index `i`, ratio index `j`.
    pub fn get(&self, i: usize, j: usize) -> &GridPoint<T> {
        &self.points[j * self.spec.omega.count + i]
    }

    pub fn row(&self, j: usize) -> &[GridPoint<T>] {
        let n = self.spec.omega.count;
        &self.points[j * n..(j + 1) * n]
    }
}

/// Evaluates `f` on every grid point. Per-point errors are kept in place.
pub fn evaluate<T, F>(spec: &SweepSpec, workers: Workers, f: F) -> Result<Grid<T>>
where
    T: Send,
    F: Fn(&SystemParams) -> Result<T> + Sync + Send,
{
    spec.validate()?;
    let points = workers.map(spec.len(), |k| {
        let p = spec.params_at(k);
        GridPoint {
            omega: p.omega_drive,
            ratio: p.detuning_ratio(),
            value: f(&p),
        }
    });
    Ok(Grid {
        spec: *spec,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseSample {
    pub label: PhaseLabel,
    pub marginal: bool,
}

pub fn phase_diagram(spec: &SweepSpec, sign: KerrSign, workers: Workers) -> Result<Grid<PhaseSample>> {
    evaluate(spec, workers, |p| {
        let a = analyze_phase(&p.with_kerr_sign(sign))?;
        Ok(PhaseSample {
            label: a.label,
            marginal: a.marginal(),
        })
    })
}

/// Order parameter for both Kerr signs at each point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignPair<T> {
    pub pos: T,
    pub neg: T,
}

fn both_signs<T>(p: &SystemParams, f: impl Fn(&SystemParams) -> Result<T>) -> Result<SignPair<T>> {
    Ok(SignPair {
        pos: f(&p.with_kerr_sign(KerrSign::Positive))?,
        neg: f(&p.with_kerr_sign(KerrSign::Negative))?,
    })
}

pub fn order_parameter_cut(
    spec: &SweepSpec,
    workers: Workers,
) -> Result<Grid<SignPair<OrderParameter>>> {
    evaluate(spec, workers, |p| both_signs(p, order_parameter))
}

pub fn fluctuation_cut(
    spec: &SweepSpec,
    workers: Workers,
) -> Result<Grid<SignPair<FluctuationSample>>> {
    evaluate(spec, workers, |p| both_signs(p, phase_fluctuations))
}

pub fn contrast_map(spec: &SweepSpec, workers: Workers) -> Result<Grid<ContrastPoint>> {
    evaluate(spec, workers, evaluate_contrast)
}
