//! Process models, their positivity functions `t ↦ P(X_t > 0)` and exact
//! increment samplers.
//!
//! Conventions:
//!
//! * `SymmetricStable(α)` increments over `dt` are `dt^{1/α}·Z` with `Z` the
//!   Chambers–Mallows–Stuck variate
//!   `sin(αV)/cos(V)^{1/α} · (cos((1-α)V)/W)^{(1-α)/α}`,
//!   `V ~ U(-π/2, π/2)`, `W ~ Exp(1)`. **With this scale `α = 2` is a
//!   Gaussian with variance `2·dt`**, and `α = 1` is the standard Cauchy.
//! * `HalfStableSubordinatorDrift(μ)` is `X_t = S_t - μt` where `S` is the
//!   first-passage process `S_t = inf{s : B_s = t/√2}`. Then
//!   `S_t =_d t²/(2N²)` for a standard normal `N`, so
//!   `P(S_t ≤ x) = 2(1 - Φ(t/√(2x)))` and the positivity function is
//!   `erf(√(b t))` with `b = 1/(4μ)`. For `μ ≤ 0` the drift is nonnegative
//!   and `X_t > 0` for every `t > 0`.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{ensure, Error, Result};
use crate::occupation::GridPath;
use crate::quad;
use crate::rng::RandomStream;
use crate::specfun::{erf, normal_cdf};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessModel {
    /// Abstract Lévy process with `P(X_t > 0) = c`; no path sampler.
    ConstantPositivity { c: f64 },
    BrownianMotion,
    /// `B_t + μt`, `μ ≠ 0`.
    BrownianDrift { mu: f64 },
    /// Symmetric α-stable Lévy process, `α ∈ (0, 2]`.
    SymmetricStable { alpha: f64 },
    /// (1/2)-stable subordinator with drift `-μ`.
    HalfStableSubordinatorDrift { mu: f64 },
    /// Standard Brownian bridge pinned at `horizon`; not a Lévy process.
    BrownianBridge { horizon: f64 },
}

impl ProcessModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ProcessModel::ConstantPositivity { c } => ensure((0.0..=1.0).contains(&c), "c must lie in [0, 1]"),
            ProcessModel::BrownianMotion => Ok(()),
            ProcessModel::BrownianDrift { mu } => ensure(mu.is_finite() && mu != 0.0, "drift must be finite and nonzero"),
            ProcessModel::SymmetricStable { alpha } => ensure(alpha > 0.0 && alpha <= 2.0, "alpha must lie in (0, 2]"),
            ProcessModel::HalfStableSubordinatorDrift { mu } => ensure(mu.is_finite(), "mu must be finite"),
            ProcessModel::BrownianBridge { horizon } => {
                ensure(horizon > 0.0 && horizon.is_finite(), "bridge horizon must be positive")
            }
        }
    }

    pub fn is_levy(&self) -> bool {
        !matches!(self, ProcessModel::BrownianBridge { .. })
    }

    pub fn has_path_sampler(&self) -> bool {
        !matches!(self, ProcessModel::ConstantPositivity { .. })
    }

    pub fn has_increment_sampler(&self) -> bool {
        self.is_levy() && self.has_path_sampler()
    }

    /// The positivity function of a Lévy model.
    pub fn positivity_function(&self) -> Result<ModelPositivity> {
        self.validate()?;
        Ok(match *self {
            ProcessModel::ConstantPositivity { c } => ModelPositivity::Constant(c),
            ProcessModel::BrownianMotion => ModelPositivity::Constant(0.5),
            ProcessModel::SymmetricStable { .. } => ModelPositivity::Constant(0.5),
            ProcessModel::BrownianDrift { mu } => ModelPositivity::GaussianDrift { mu },
            ProcessModel::HalfStableSubordinatorDrift { mu } if mu <= 0.0 => ModelPositivity::Constant(1.0),
            ProcessModel::HalfStableSubordinatorDrift { mu } => ModelPositivity::HalfStable { b: 0.25 / mu },
            ProcessModel::BrownianBridge { .. } => {
                return Err(Error::UnsupportedModel("the Brownian bridge has no stationary-increment positivity"))
            }
        })
    }

    /// Exact sampler for `X_{t+dt} - X_t`.
    pub fn increment_sampler(&self, dt: f64) -> Result<IncrementSampler> {
        self.validate()?;
        ensure(dt > 0.0 && dt.is_finite(), "dt must be positive")?;
        Ok(match *self {
            ProcessModel::BrownianMotion => IncrementSampler::Gaussian { mean: 0.0, sd: libm::sqrt(dt) },
            ProcessModel::BrownianDrift { mu } => IncrementSampler::Gaussian { mean: mu * dt, sd: libm::sqrt(dt) },
            ProcessModel::SymmetricStable { alpha } => IncrementSampler::Stable {
                alpha,
                inv_alpha: 1.0 / alpha,
                tail_exp: (1.0 - alpha) / alpha,
                scale: libm::pow(dt, 1.0 / alpha),
            },
            ProcessModel::HalfStableSubordinatorDrift { mu } => {
                IncrementSampler::HalfStable { half_dt2: 0.5 * dt * dt, drift: mu * dt }
            }
            ProcessModel::ConstantPositivity { .. } => {
                return Err(Error::UnsupportedModel("constant positivity has no path sampler"))
            }
            ProcessModel::BrownianBridge { .. } => {
                return Err(Error::UnsupportedModel("the Brownian bridge has no independent increments"))
            }
        })
    }
}

/// `P(X_t > 0)` for a [`ProcessModel`] (requires a Lévy model).
pub fn positivity(model: &ProcessModel, t: f64) -> Result<f64> {
    ensure(t > 0.0, "positivity requires t > 0")?;
    Ok(model.positivity_function()?.eval(t))
}

/// One draw of `X_{t+dt} - X_t`.
pub fn sample_increment(model: &ProcessModel, dt: f64, rng: &mut RandomStream) -> Result<f64> {
    Ok(model.increment_sampler(dt)?.draw(rng))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IncrementSampler {
    Gaussian { mean: f64, sd: f64 },
    Stable { alpha: f64, inv_alpha: f64, tail_exp: f64, scale: f64 },
    HalfStable { half_dt2: f64, drift: f64 },
}

impl IncrementSampler {
    #[inline]
    pub fn draw(&self, rng: &mut RandomStream) -> f64 {
        match *self {
            IncrementSampler::Gaussian { mean, sd } => mean + sd * rng.standard_normal(),
            IncrementSampler::Stable { alpha, inv_alpha, tail_exp, scale } => {
                let v = core::f64::consts::PI * (rng.uniform() - 0.5);
                let w = rng.exponential(1.0);
                let z = if alpha == 1.0 {
                    libm::tan(v)
                } else {
                    libm::sin(alpha * v) / libm::pow(libm::cos(v), inv_alpha)
                        * libm::pow(libm::cos((1.0 - alpha) * v) / w, tail_exp)
                };
                scale * z
            }
            IncrementSampler::HalfStable { half_dt2, drift } => {
                let mut n = rng.standard_normal();
                while n == 0.0 {
                    n = rng.standard_normal();
                }
                half_dt2 / (n * n) - drift
            }
        }
    }
}

/// Evaluable positivity function `t ↦ p_t ∈ [0, 1]`.
pub trait Positivity: Sync {
    fn eval(&self, t: f64) -> f64;

    /// `Some(c)` when `p_t ≡ c`.
    fn constant(&self) -> Option<f64> {
        None
    }

    /// Right limit `p_{0+}`.
    fn at_zero(&self) -> f64 {
        self.eval(f64::MIN_POSITIVE)
    }

    /// Points where `p` may jump, increasing.
    fn breakpoints(&self) -> &[f64] {
        &[]
    }
}

impl<P: Positivity + ?Sized> Positivity for &P {
    fn eval(&self, t: f64) -> f64 {
        (**self).eval(t)
    }
    fn constant(&self) -> Option<f64> {
        (**self).constant()
    }
    fn at_zero(&self) -> f64 {
        (**self).at_zero()
    }
    fn breakpoints(&self) -> &[f64] {
        (**self).breakpoints()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelPositivity {
    Constant(f64),
    /// `Φ(μ√t)`.
    GaussianDrift { mu: f64 },
    /// `erf(√(b t))`.
    HalfStable { b: f64 },
}

impl Positivity for ModelPositivity {
    fn eval(&self, t: f64) -> f64 {
        match *self {
            ModelPositivity::Constant(c) => c,
            ModelPositivity::GaussianDrift { mu } => normal_cdf(mu * libm::sqrt(t)),
            ModelPositivity::HalfStable { b } => erf(libm::sqrt(b * t)),
        }
    }

    fn constant(&self) -> Option<f64> {
        match *self {
            ModelPositivity::Constant(c) => Some(c),
            _ => None,
        }
    }

    fn at_zero(&self) -> f64 {
        match *self {
            ModelPositivity::Constant(c) => c,
            ModelPositivity::GaussianDrift { .. } => 0.5,
            ModelPositivity::HalfStable { .. } => 0.0,
        }
    }
}

/// Right-continuous step function: value `values[i]` on `[breaks[i-1], breaks[i])`,
/// with `breaks[-1] = 0` and the last value extending to infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        ensure(values.len() == breaks.len() + 1, "need one more value than breakpoints")?;
        ensure(breaks.windows(2).all(|w| w[0] < w[1]), "breakpoints must increase")?;
        ensure(breaks.first().is_none_or(|&b| b > 0.0), "breakpoints must be positive")?;
        ensure(values.iter().all(|v| (0.0..=1.0).contains(v)), "values must lie in [0, 1]")?;
        Ok(Self { breaks, values })
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }
}

impl Positivity for PiecewiseConstant {
    fn eval(&self, t: f64) -> f64 {
        self.values[self.breaks.partition_point(|&b| b <= t)]
    }

    fn constant(&self) -> Option<f64> {
        let first = self.values[0];
        self.values.iter().all(|&v| v == first).then_some(first)
    }

    fn at_zero(&self) -> f64 {
        self.values[0]
    }

    fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }
}

/// `∫_0^∞ w(u) p(u/q) du`, split at the jumps of `p`. The first piece uses a
/// square-root substitution, which absorbs `√u` behaviour at the origin.
pub fn integrate_weighted<P, W>(p: &P, q: f64, weight: W, abs_tol: f64, rel_tol: f64) -> Result<f64>
where
    P: Positivity + ?Sized,
    W: Fn(f64) -> f64,
{
    let f = |u: f64| {
        let w = weight(u);
        if w == 0.0 {
            0.0
        } else {
            w * p.eval(u / q)
        }
    };
    let breaks = p.breakpoints();
    if breaks.is_empty() {
        return Ok(quad::integrate_half_line_sqrt(f, abs_tol, rel_tol)?.value);
    }
    let mut sum = quad::CompensatedSum::new();
    let mut lo = 0.0;
    for (i, &b) in breaks.iter().enumerate() {
        let hi = b * q;
        let piece = if i == 0 {
            quad::integrate_sqrt_left(f, lo, hi, abs_tol, rel_tol)?
        } else {
            quad::integrate(f, lo, hi, abs_tol, rel_tol)?
        };
        sum.add(piece.value);
        lo = hi;
    }
    sum.add(quad::integrate_to_infinity(f, lo, abs_tol, rel_tol)?.value);
    Ok(sum.value())
}

/// Brownian bridge on `[0, horizon]` sampled at `n + 1` equispaced nodes:
/// `B_s - (s/horizon)·B_horizon` from one Brownian path.
pub fn sample_bridge_path(horizon: f64, n: usize, rng: &mut RandomStream) -> Result<GridPath> {
    ensure(horizon > 0.0, "bridge horizon must be positive")?;
    ensure(n >= 2, "bridge path needs n >= 2")?;
    let dt = horizon / n as f64;
    let sd = libm::sqrt(dt);
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    let mut b = 0.0;
    for _ in 0..n {
        b += sd * rng.standard_normal();
        values.push(b);
    }
    let end = values[n];
    for (k, v) in values.iter_mut().enumerate() {
        *v -= (k as f64 / n as f64) * end;
    }
    values[n] = 0.0;
    GridPath::new(horizon, values)
}

/// Grid path of any model with a path sampler; for the bridge the horizon
/// must equal the bridge's own horizon.
pub fn sample_path(model: &ProcessModel, horizon: f64, n: usize, rng: &mut RandomStream) -> Result<GridPath> {
    if let ProcessModel::BrownianBridge { horizon: h } = *model {
        ensure(h == horizon, "bridge paths are sampled on their own horizon")?;
        return sample_bridge_path(h, n, rng);
    }
    ensure(n >= 1, "path needs at least one step")?;
    let inc = model.increment_sampler(horizon / n as f64)?;
    let mut values = Vec::with_capacity(n + 1);
    let mut x = 0.0;
    values.push(x);
    for _ in 0..n {
        x += inc.draw(rng);
        values.push(x);
    }
    GridPath::new(horizon, values)
}

impl fmt::Display for ProcessModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ProcessModel::ConstantPositivity { c } => write!(f, "const:{c}"),
            ProcessModel::BrownianMotion => write!(f, "bm"),
            ProcessModel::BrownianDrift { mu } => write!(f, "bm-drift:{mu}"),
            ProcessModel::SymmetricStable { alpha } => write!(f, "stable:{alpha}"),
            ProcessModel::HalfStableSubordinatorDrift { mu } => write!(f, "half-stable:{mu}"),
            ProcessModel::BrownianBridge { horizon } => write!(f, "bridge:{horizon}"),
        }
    }
}

impl FromStr for ProcessModel {
    type Err = Error;

    /// Parses `const:c`, `bm`, `bm-drift:μ`, `stable:α`, `half-stable:μ`,
    /// `bridge:T`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ModelSpec(s.to_string());
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let num = |a: Option<&str>| -> Result<f64> { a.ok_or_else(bad)?.parse::<f64>().map_err(|_| bad()) };
        let model = match kind {
            "const" => ProcessModel::ConstantPositivity { c: num(arg)? },
            "bm" if arg.is_none() => ProcessModel::BrownianMotion,
            "bm-drift" => ProcessModel::BrownianDrift { mu: num(arg)? },
            "stable" => ProcessModel::SymmetricStable { alpha: num(arg)? },
            "half-stable" => ProcessModel::HalfStableSubordinatorDrift { mu: num(arg)? },
            "bridge" => ProcessModel::BrownianBridge { horizon: num(arg)? },
            _ => return Err(bad()),
        };
        model.validate()?;
        Ok(model)
    }
}
