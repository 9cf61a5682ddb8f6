//! Double Laplace transform `G(q, λ) = ∫_0^∞ e^{-qt} E[e^{-λ A_t}] dt` and
//! its numerical inversion in `q`.
//!
//! For a Lévy process with positivity function `p`,
//! `G(q, λ) = q^{-1} exp(-∫_0^∞ e^{-qt} t^{-1} p_t (1 - e^{-λt}) dt)`.

use alloc::vec::Vec;

use crate::error::{ensure, Error, Result};
use crate::models::{integrate_weighted, Positivity};
use crate::quad::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceQuery {
    pub q: f64,
    pub lambda: f64,
}

impl LaplaceQuery {
    pub fn new(q: f64, lambda: f64) -> Result<Self> {
        let query = Self { q, lambda };
        query.validate()?;
        Ok(query)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.q > 0.0 && self.q.is_finite(), "q must be positive")?;
        ensure(self.lambda >= 0.0 && self.lambda.is_finite(), "lambda must be nonnegative")
    }
}

/// The exponent `∫_0^∞ e^{-qt} t^{-1} p_t (1 - e^{-λt}) dt`.
///
/// With `u = qt` the integrand is `e^{-u} p(u/q) (1 - e^{-ru})/u`, `r = λ/q`,
/// whose limit at `u = 0` is `r·p_{0+}`; `1 - e^{-ru}` goes through `expm1`.
pub fn exponent_quadrature<P: Positivity + ?Sized>(positivity: &P, query: LaplaceQuery) -> Result<f64> {
    query.validate()?;
    let r = query.lambda / query.q;
    if r == 0.0 {
        return Ok(0.0);
    }
    let weight = |u: f64| {
        if u == 0.0 {
            r
        } else {
            libm::exp(-u) * -libm::expm1(-r * u) / u
        }
    };
    integrate_weighted(positivity, query.q, weight, 1e-14, 1e-12)
}

/// `G(q, λ)` by quadrature of the exponent. `λ = 0` gives `1/q` exactly.
pub fn g_double_laplace_quadrature<P: Positivity + ?Sized>(positivity: &P, query: LaplaceQuery) -> Result<f64> {
    query.validate()?;
    if query.lambda == 0.0 {
        return Ok(1.0 / query.q);
    }
    let e = exponent_quadrature(positivity, query)?;
    Ok(libm::exp(-e) / query.q)
}

/// `G(q, λ) = 1/(q (1 + λ/q)^c)` for constant positivity `c`.
pub fn g_closed_constant(c: f64, query: LaplaceQuery) -> Result<f64> {
    query.validate()?;
    ensure((0.0..=1.0).contains(&c), "c must lie in [0, 1]")?;
    Ok(libm::exp(-c * libm::log1p(query.lambda / query.q)) / query.q)
}

/// `G(q, λ) = (q+λ)^{-1} ((√b + √(q+λ+b)) / (√b + √(q+b)))²`, `b = 1/(4μ)`,
/// for the (1/2)-stable subordinator with drift `-μ`.
pub fn g_closed_halfstable(mu: f64, query: LaplaceQuery) -> Result<f64> {
    query.validate()?;
    ensure(mu > 0.0 && mu.is_finite(), "mu must be positive")?;
    let b = 0.25 / mu;
    let sb = libm::sqrt(b);
    let ratio = (sb + libm::sqrt(query.q + query.lambda + b)) / (sb + libm::sqrt(query.q + b));
    Ok(ratio * ratio / (query.q + query.lambda))
}

pub const MIN_STAGES: usize = 10;
pub const MAX_STAGES: usize = 18;
pub const DEFAULT_STAGES: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionResult {
    pub value: f64,
    /// `|f_N - f_{N-2}|`.
    pub stability: f64,
    pub stable: bool,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Gaver–Stehfest weights `V_1..V_N` for even `N`.
pub fn stehfest_weights(n: usize) -> Result<Vec<f64>> {
    ensure(n >= 2 && n.is_multiple_of(2), "Stehfest stage count must be even")?;
    let half = n / 2;
    let mut v = Vec::with_capacity(n);
    for k in 1..=n {
        let mut sum = CompensatedSum::new();
        for j in k.div_ceil(2)..=k.min(half) {
            let num = libm::pow(j as f64, half as f64) * factorial(2 * j);
            let den = factorial(half - j) * factorial(j) * factorial(j - 1) * factorial(k - j) * factorial(2 * j - k);
            sum.add(num / den);
        }
        let sign = if (k + half).is_multiple_of(2) { 1.0 } else { -1.0 };
        v.push(sign * sum.value());
    }
    Ok(v)
}

fn stehfest_sum<F: Fn(f64) -> f64>(transform: &F, t: f64, n: usize) -> Result<f64> {
    let a = core::f64::consts::LN_2 / t;
    let mut sum = CompensatedSum::new();
    for (i, w) in stehfest_weights(n)?.into_iter().enumerate() {
        let fv = transform(a * (i + 1) as f64);
        if !fv.is_finite() {
            return Err(Error::InversionFailure("transform is not finite on the Stehfest abscissae"));
        }
        sum.add(w * fv);
    }
    Ok(a * sum.value())
}

/// Inverts `q ↦ f̄(q)` at `t`. The result is flagged unstable when
/// `|f_N - f_{N-2}| > 1e-3·max(1, |f_N|)`; the value is returned either way.
pub fn gaver_stehfest_invert<F: Fn(f64) -> f64>(transform: F, t: f64, stages: usize) -> Result<InversionResult> {
    ensure(t > 0.0 && t.is_finite(), "t must be positive")?;
    ensure((MIN_STAGES..=MAX_STAGES).contains(&stages) && stages.is_multiple_of(2), "stages must be even and in 10..=18")?;
    let value = stehfest_sum(&transform, t, stages)?;
    let previous = stehfest_sum(&transform, t, stages - 2)?;
    let stability = (value - previous).abs();
    let stable = stability <= 1e-3 * value.abs().max(1.0);
    if !stable {
        log::warn!("Gaver-Stehfest inversion at t = {t} is unstable (indicator {stability:e})");
    }
    Ok(InversionResult { value, stability, stable })
}

/// `E[e^{-λ A_t}]` by inverting `q ↦ G(q, λ)` computed by quadrature.
pub fn laplace_of_occupation<P: Positivity + ?Sized>(positivity: &P, lambda: f64, t: f64, stages: usize) -> Result<InversionResult> {
    ensure(lambda >= 0.0, "lambda must be nonnegative")?;
    // Quadrature failures surface as NaN and are reported by the inverter.
    gaver_stehfest_invert(
        |q| g_double_laplace_quadrature(positivity, LaplaceQuery { q, lambda }).unwrap_or(f64::NAN),
        t,
        stages,
    )
}
