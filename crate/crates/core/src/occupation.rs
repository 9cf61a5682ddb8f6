//! Path Monte Carlo for the positive sojourn time.
//!
//! `A_t` is approximated on an equispaced grid by
//! `(t/n)·#{1 ≤ k ≤ n : X_{kt/n} > 0}`. Node 0 (where `X_0 = 0`) never
//! counts, and the inequality is strict.

use alloc::vec::Vec;

use crate::error::{ensure, Error, Result};
use crate::exec::Executor;
use crate::models::{sample_bridge_path, ProcessModel};
use crate::rng::RandomStream;
use crate::stats::EcdfTable;

pub const MIN_STEPS: usize = 64;
/// Default grid resolution for acceptance-grade runs.
pub const DEFAULT_STEPS: usize = 4096;
/// Exponential horizons are capped at `EXP_HORIZON_CAP / q`.
pub const EXP_HORIZON_CAP: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    horizon: f64,
    values: Vec<f64>,
}

impl GridPath {
    pub fn new(horizon: f64, values: Vec<f64>) -> Result<Self> {
        ensure(horizon > 0.0, "grid path horizon must be positive")?;
        ensure(values.len() >= 2, "grid path needs at least two nodes")?;
        ensure(values[0] == 0.0, "grid path must start at 0")?;
        Ok(Self { horizon, values })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of steps `n` (the path has `n + 1` nodes).
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    /// Every other node, i.e. the same path on the grid with half the steps.
    pub fn coarsen(&self) -> Option<GridPath> {
        if !self.steps().is_multiple_of(2) || self.steps() < 2 {
            return None;
        }
        Some(GridPath { horizon: self.horizon, values: self.values.iter().step_by(2).copied().collect() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupationSample {
    pub a_t: f64,
    pub t: f64,
    /// Set iff no grid node after 0 is positive (`a_t == 0`).
    pub zero_flag: bool,
}

impl OccupationSample {
    fn from_count(positive: usize, n: usize, t: f64) -> Self {
        let a_t = if positive == n { t } else { t * positive as f64 / n as f64 };
        Self { a_t, t, zero_flag: positive == 0 }
    }
}

pub fn occupation_of_path(path: &GridPath) -> OccupationSample {
    let positive = path.values[1..].iter().filter(|&&v| v > 0.0).count();
    OccupationSample::from_count(positive, path.steps(), path.horizon)
}

/// One occupation sample on `[0, horizon]` with `n` steps, without storing
/// the path for Lévy models.
pub fn occupation_sample(model: &ProcessModel, horizon: f64, n: usize, rng: &mut RandomStream) -> Result<OccupationSample> {
    if let ProcessModel::BrownianBridge { horizon: h } = *model {
        ensure(h == horizon, "bridge occupation is taken over the bridge horizon")?;
        return Ok(occupation_of_path(&sample_bridge_path(h, n, rng)?));
    }
    let inc = model.increment_sampler(horizon / n as f64)?;
    let mut x = 0.0;
    let mut positive = 0usize;
    for _ in 0..n {
        x += inc.draw(rng);
        if x > 0.0 {
            positive += 1;
        }
    }
    Ok(OccupationSample::from_count(positive, n, horizon))
}

/// Monte Carlo law of `A_t` with the atoms at `0` and `t` reported separately.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationLaw {
    pub t: f64,
    pub ecdf: EcdfTable,
    pub atom_zero: f64,
    pub atom_full: f64,
}

impl OccupationLaw {
    /// ECDF of `A_t / t`.
    pub fn fraction_ecdf(&self) -> EcdfTable {
        EcdfTable::from_samples(self.ecdf.samples().iter().map(|a| a / self.t).collect())
            .expect("occupation fractions are finite")
    }
}

fn check_path_model(model: &ProcessModel) -> Result<()> {
    model.validate()?;
    if !model.has_path_sampler() {
        return Err(Error::UnsupportedModel("constant positivity has no path sampler"));
    }
    Ok(())
}

/// `n_paths` independent samples of `A_t`; path `i` uses stream `(seed, i)`.
pub fn simulate_occupation<E: Executor>(
    model: &ProcessModel,
    t: f64,
    n_steps: usize,
    n_paths: usize,
    seed: u64,
    exec: &E,
) -> Result<OccupationLaw> {
    check_path_model(model)?;
    ensure(t > 0.0 && t.is_finite(), "t must be positive")?;
    ensure(n_steps >= MIN_STEPS, "n_steps must be at least 64")?;
    ensure(n_paths > 0, "n_paths must be positive")?;
    if let ProcessModel::BrownianBridge { horizon } = *model {
        ensure(horizon == t, "bridge occupation is taken over the bridge horizon")?;
    }
    let samples = exec.map_indexed(n_paths, |i| {
        let mut rng = RandomStream::new(seed, i as u64);
        occupation_sample(model, t, n_steps, &mut rng).map(|s| s.a_t)
    });
    let samples: Vec<f64> = samples.into_iter().collect::<Result<_>>()?;
    let ecdf = EcdfTable::from_samples(samples)?;
    let atom_zero = ecdf.atom_at(0.0);
    let atom_full = ecdf.atom_at(t);
    Ok(OccupationLaw { t, ecdf, atom_zero, atom_full })
}

/// Joint samples `(E, A_E)` with `E ~ Exp(q)` independent of the path.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpOccupation {
    pub q: f64,
    pub horizons: Vec<f64>,
    pub values: Vec<f64>,
}

impl ExpOccupation {
    pub fn ecdf(&self) -> EcdfTable {
        EcdfTable::from_samples(self.values.clone()).expect("finite samples")
    }

    /// `A_E / E` for each path.
    pub fn ratios(&self) -> Vec<f64> {
        self.values.iter().zip(&self.horizons).map(|(a, e)| a / e).collect()
    }
}

/// `n_paths` samples of `A_{E^{(q)}}`. Path `i` draws its horizon and then its
/// increments from stream `(seed, i)`; the grid has `⌈E·steps_per_unit⌉`
/// steps (at least 64) and `E` is capped at `50/q`.
pub fn simulate_occupation_at_exp<E: Executor>(
    model: &ProcessModel,
    q: f64,
    steps_per_unit: usize,
    n_paths: usize,
    seed: u64,
    exec: &E,
) -> Result<ExpOccupation> {
    check_path_model(model)?;
    if !model.is_levy() {
        return Err(Error::UnsupportedModel("exponential-time occupation needs a Lévy model"));
    }
    ensure(q > 0.0 && q.is_finite(), "q must be positive")?;
    ensure(steps_per_unit > 0, "steps_per_unit must be positive")?;
    ensure(n_paths > 0, "n_paths must be positive")?;
    let cap = EXP_HORIZON_CAP / q;
    let pairs = exec.map_indexed(n_paths, |i| {
        let mut rng = RandomStream::new(seed, i as u64);
        let horizon = rng.exponential(q).min(cap);
        let n = (libm::ceil(horizon * steps_per_unit as f64) as usize).max(MIN_STEPS);
        occupation_sample(model, horizon, n, &mut rng).map(|s| (horizon, s.a_t))
    });
    let mut horizons = Vec::with_capacity(n_paths);
    let mut values = Vec::with_capacity(n_paths);
    for p in pairs {
        let (h, a) = p?;
        horizons.push(h);
        values.push(a);
    }
    Ok(ExpOccupation { q, horizons, values })
}
