//! Law of `A_t` for the (1/2)-stable subordinator with drift `-μ`, `μ > 0`.
//!
//! With `b = 1/(4μ)`, `A_t` has an atom `g(t)` at zero and density
//! `h(x) g(t-x)` on `(0, t)`, where
//!
//! * `h(u) = 2(b(erf√(bu) + 1) + √(b/(πu)) e^{-bu})`,
//!   with `∫ e^{-su} h(u) du = (√b + √(s+b))²/s - 1`,
//! * `g(u) = (2bu+1) erfc√(bu) - 2 e^{-bu} √(bu/π)`,
//!   with `∫ e^{-qu} g(u) du = (√b + √(q+b))^{-2}`.
//!
//! The closed form is commonly printed with the opposite overall sign on
//! `g`. Both candidates are available; [`resolve_g_sign`] picks the one whose
//! numerical Laplace transform matches `(√b + √(q+b))^{-2}` and caches it.

use core::sync::atomic::{AtomicI8, Ordering};

use crate::error::{ensure, Error, Result};
use crate::laplace::LaplaceQuery;
use crate::quad;
use crate::specfun::{erf, erfc};
use crate::stats::ReferenceCdf;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Abscissae of the sign-resolution oracle.
pub const SIGN_ORACLE_GRID: [f64; 5] = [0.1, 0.3, 1.0, 3.0, 10.0];
pub const SIGN_ORACLE_TOL: f64 = 1e-6;
pub const MASS_TOL: f64 = 1e-6;

static G_SIGN: AtomicI8 = AtomicI8::new(0);

fn b_of(mu: f64) -> f64 {
    0.25 / mu
}

pub fn halfstable_h(mu: f64, u: f64) -> f64 {
    let b = b_of(mu);
    let x = libm::sqrt(b * u);
    2.0 * (b * (erf(x) + 1.0) + libm::sqrt(b / u) / SQRT_PI * libm::exp(-b * u))
}

/// `g` with the commonly printed sign, `(2bu+1)(erf√(bu) - 1) + 2e^{-bu}√(bu/π)`.
/// `erf - 1` is evaluated as `-erfc`.
pub fn halfstable_g_printed(mu: f64, u: f64) -> f64 {
    let b = b_of(mu);
    let x = libm::sqrt(b * u);
    -(2.0 * b * u + 1.0) * erfc(x) + 2.0 * libm::exp(-b * u) * x / SQRT_PI
}

/// Sign-resolved `g` (nonnegative, `g(0+) = 1`).
pub fn halfstable_g(mu: f64, u: f64) -> Result<f64> {
    let sign = resolve_g_sign(mu)?;
    Ok((sign * halfstable_g_printed(mu, u)).max(0.0))
}

fn g_transform_target(mu: f64, q: f64) -> f64 {
    let sb = libm::sqrt(b_of(mu));
    let d = sb + libm::sqrt(q + b_of(mu));
    1.0 / (d * d)
}

/// `∫_0^∞ e^{-qu} g_printed(u) du`.
pub fn printed_g_transform(mu: f64, q: f64) -> Result<f64> {
    Ok(quad::integrate_half_line_sqrt(|u| libm::exp(-q * u) * halfstable_g_printed(mu, u), 1e-14, 1e-12)?.value)
}

/// `∫_0^∞ e^{-su} h(u) du`.
pub fn h_transform(mu: f64, s: f64) -> Result<f64> {
    Ok(quad::integrate_half_line_sqrt(|u| libm::exp(-s * u) * halfstable_h(mu, u), 1e-14, 1e-12)?.value)
}

/// `+1` if the printed `g` has transform `(√b + √(q+b))^{-2}` on the oracle
/// grid, `-1` if its negative does. Computed once and cached.
pub fn resolve_g_sign(mu: f64) -> Result<f64> {
    match G_SIGN.load(Ordering::Relaxed) {
        0 => {}
        s => return Ok(s as f64),
    }
    ensure(mu > 0.0 && mu.is_finite(), "mu must be positive")?;
    let mut plus = true;
    let mut minus = true;
    for &q in &SIGN_ORACLE_GRID {
        let numeric = printed_g_transform(mu, q)?;
        let target = g_transform_target(mu, q);
        plus &= (numeric - target).abs() <= SIGN_ORACLE_TOL * target;
        minus &= (numeric + target).abs() <= SIGN_ORACLE_TOL * target;
    }
    let sign: i8 = match (plus, minus) {
        (true, false) => 1,
        (false, true) => -1,
        _ => return Err(Error::InversionFailure("neither sign of g matches its Laplace transform")),
    };
    log::info!("half-stable g: sign {sign:+} relative to the printed expression");
    G_SIGN.store(sign, Ordering::Relaxed);
    Ok(sign as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfStableLaw {
    mu: f64,
    b: f64,
    t: f64,
    sign: f64,
    atom0: f64,
    left_mass: f64,
    right_mass: f64,
}

impl HalfStableLaw {
    /// Fails with [`Error::Normalization`] when `atom0 + ∫ density` is not 1
    /// within [`MASS_TOL`].
    pub fn new(mu: f64, t: f64) -> Result<Self> {
        ensure(mu > 0.0 && mu.is_finite(), "mu must be positive")?;
        ensure(t > 0.0 && t.is_finite(), "t must be positive")?;
        let sign = resolve_g_sign(mu)?;
        let mut law = Self { mu, b: b_of(mu), t, sign, atom0: 0.0, left_mass: 0.0, right_mass: 0.0 };
        law.atom0 = law.g(t);
        let half = 0.5 * t;
        law.left_mass = quad::integrate_sqrt_left(|x| law.density(x), 0.0, half, 1e-14, 1e-12)?.value;
        law.right_mass = quad::integrate_sqrt_right(|x| law.density(x), half, t, 1e-14, 1e-12)?.value;
        let total = law.atom0 + law.left_mass + law.right_mass;
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Normalization(total));
        }
        Ok(law)
    }

    fn g(&self, u: f64) -> f64 {
        (self.sign * halfstable_g_printed(self.mu, u)).max(0.0)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `P(A_t = 0) = g(t)`.
    pub fn atom0(&self) -> f64 {
        self.atom0
    }

    /// `atom0 + ∫_0^t density`.
    pub fn total_mass(&self) -> f64 {
        self.atom0 + self.left_mass + self.right_mass
    }

    pub fn density(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= self.t {
            return 0.0;
        }
        halfstable_h(self.mu, x) * self.g(self.t - x)
    }

    /// `E[e^{-λ A_t}]`.
    pub fn laplace(&self, lambda: f64) -> Result<f64> {
        LaplaceQuery::new(1.0, lambda)?;
        if lambda == 0.0 {
            return Ok(1.0);
        }
        let half = 0.5 * self.t;
        let f = |x: f64| libm::exp(-lambda * x) * self.density(x);
        let left = quad::integrate_sqrt_left(f, 0.0, half, 1e-14, 1e-12)?.value;
        let right = quad::integrate_sqrt_right(f, half, self.t, 1e-14, 1e-12)?.value;
        Ok(self.atom0 + left + right)
    }

    /// `P(A_t ≤ x)` for `0 ≤ x ≤ t`.
    pub fn cdf_at(&self, x: f64) -> Result<f64> {
        ensure((0.0..=self.t).contains(&x), "x must lie in [0, t]")?;
        if x == self.t {
            return Ok(1.0);
        }
        let half = 0.5 * self.t;
        let integral = if x <= half {
            quad::integrate_sqrt_left(|y| self.density(y), 0.0, x, 1e-14, 1e-12)?.value
        } else {
            let beyond = quad::integrate_sqrt_right(|y| self.density(y), x, self.t, 1e-14, 1e-12)?.value;
            self.left_mass + (self.right_mass - beyond)
        };
        Ok((self.atom0 + integral).clamp(0.0, 1.0))
    }
}

impl ReferenceCdf for HalfStableLaw {
    fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else if x >= self.t {
            1.0
        } else {
            self.cdf_at(x).unwrap_or(f64::NAN)
        }
    }

    fn cdf_left(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            self.cdf(x)
        }
    }
}

/// `P(A_t ≤ x)`.
pub fn halfstable_cdf(mu: f64, t: f64, x: f64) -> Result<f64> {
    HalfStableLaw::new(mu, t)?.cdf_at(x)
}
