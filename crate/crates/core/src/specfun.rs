//! Special functions on the real line.
//!
//! Everything is pure, deterministic and built on `libm`, so results are
//! identical on every platform.

use crate::error::{ensure, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub const FRAC_2_SQRT_PI: f64 = core::f64::consts::FRAC_2_SQRT_PI;
const SQRT_PI: f64 = 1.772_453_850_905_516;
const TINY: f64 = 1.0e-300;

/// Error function `(2/√π) ∫_0^x e^{-u²} du`.
///
/// The Taylor series of `e^{x²} erf(x)` (all terms positive) is used for
/// `|x| ≤ 2`, the continued fraction for `erfc` beyond.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let v = if ax <= 2.0 {
        erf_series(ax)
    } else {
        1.0 - erfc_cf(ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Complementary error function `1 - erf(x)`, accurate in the right tail.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x > 2.0 {
        erfc_cf(x)
    } else if x >= -2.0 {
        1.0 - erf(x)
    } else {
        2.0 - erfc_cf(-x)
    }
}

// e^{-x²} (2/√π) Σ 2^n x^{2n+1} / (2n+1)!!
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    FRAC_2_SQRT_PI * libm::exp(-x2) * sum
}

// erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), x > 0.
fn erfc_cf(x: f64) -> f64 {
    if x > 27.3 {
        return 0.0;
    }
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..500 {
        let an = 0.5 * n as f64;
        d = x + an * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    libm::exp(-x * x) / (SQRT_PI * f)
}

/// Standard Gaussian distribution function `Φ(x) = (1 + erf(x/√2))/2`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * core::f64::consts::FRAC_1_SQRT_2)
}

/// Exponential integral `E₁(x) = ∫_x^∞ e^{-u}/u du` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    ensure(x > 0.0, "exp_integral_e1 requires x > 0")?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x <= 1.0 {
        // -γ - ln x + Σ (-1)^{n+1} x^n / (n n!)
        let mut sum = 0.0;
        let mut fact = 1.0;
        for n in 1..60 {
            let nf = n as f64;
            fact *= x / nf;
            let term = fact / nf;
            if n % 2 == 1 {
                sum += term;
            } else {
                sum -= term;
            }
            if term < 1e-18 {
                break;
            }
        }
        Ok(-EULER_GAMMA - libm::log(x) + sum)
    } else {
        // Even contraction of the continued fraction, modified Lentz.
        let mut b = x + 1.0;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let delta = c * d;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                return Ok(h * libm::exp(-x));
            }
        }
        Err(crate::Error::InversionFailure("E1 continued fraction"))
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn log_gamma(x: f64) -> Result<f64> {
    ensure(x > 0.0 && x.is_finite(), "log_gamma requires finite x > 0")?;
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return ln_gamma_unchecked(x + 1.0) - libm::log(x);
    }
    // Exact on small integers so that factorial identities hold.
    if x == libm::floor(x) && x <= 20.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return libm::log(f);
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        a += p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * libm::log(2.0 * core::f64::consts::PI) + (z + 0.5) * libm::log(t) - t + libm::log(a)
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    ensure(a > 0.0 && b > 0.0, "reg_inc_beta requires a, b > 0")?;
    ensure((0.0..=1.0).contains(&x), "reg_inc_beta requires x in [0, 1]")?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = ln_gamma_unchecked(a + b) - ln_gamma_unchecked(a) - ln_gamma_unchecked(b)
        + a * libm::log(x)
        + b * libm::log1p(-x);
    let front = libm::exp(ln_front);
    let v = if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x)? / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x)? / b
    };
    Ok(v.clamp(0.0, 1.0))
}

fn beta_cf(a: f64, b: f64, x: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            return Ok(h);
        }
    }
    Err(crate::Error::InversionFailure("incomplete beta continued fraction"))
}

/// Regularized lower incomplete gamma function `P(k, x)`.
pub fn reg_lower_inc_gamma(k: f64, x: f64) -> Result<f64> {
    ensure(k > 0.0 && k.is_finite(), "reg_lower_inc_gamma requires k > 0")?;
    ensure(x >= 0.0, "reg_lower_inc_gamma requires x >= 0")?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let ln_front = -x + k * libm::log(x) - ln_gamma_unchecked(k);
    if x < k + 1.0 {
        let mut ap = k;
        let mut del = 1.0 / k;
        let mut sum = del;
        for _ in 0..10_000 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-17 {
                return Ok((sum * libm::exp(ln_front)).clamp(0.0, 1.0));
            }
        }
        Err(crate::Error::InversionFailure("incomplete gamma series"))
    } else {
        let mut b = x + 1.0 - k;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - k);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                return Ok((1.0 - libm::exp(ln_front) * h).clamp(0.0, 1.0));
            }
        }
        Err(crate::Error::InversionFailure("incomplete gamma continued fraction"))
    }
}
