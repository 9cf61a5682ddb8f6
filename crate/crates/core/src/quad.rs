//! Adaptive Gauss–Kronrod (7/15) quadrature and the endpoint substitutions
//! used throughout the crate.

use alloc::vec::Vec;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

/// Integral estimate with its absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * libm::pow(200.0 * error / res_asc, 1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error, abs_value: res_abs }
}

/// Integrates `f` over the finite interval `[a, b]` until the error estimate
/// drops below `max(abs_tol, rel_tol·|I|)`. Tolerances under the rounding
/// floor `100ε·∫|f|` are raised to it.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let first = kronrod15(&f, a, b);
    let mut segments: Vec<Segment> = Vec::with_capacity(64);
    segments.push(first);
    let mut value = first.value;
    let mut error = first.error;
    let mut abs_value = first.abs_value;
    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureFailure { estimate: value, error });
        }
        let tol = abs_tol.max(rel_tol * value.abs()).max(100.0 * f64::EPSILON * abs_value);
        if error <= tol {
            break;
        }
        if segments.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureFailure { estimate: value, error });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc });
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            return Err(Error::QuadratureFailure { estimate: value, error });
        }
        let left = kronrod15(&f, seg.a, mid);
        let right = kronrod15(&f, mid, seg.b);
        segments.push(left);
        segments.push(right);
        // Resum from scratch to avoid drift.
        value = segments.iter().map(|s| s.value).sum();
        error = segments.iter().map(|s| s.error).sum();
        abs_value = segments.iter().map(|s| s.abs_value).sum();
    }
    Ok(Estimate { value, error })
}

/// Integrates over `[a, ∞)` via `x = a + s/(1-s)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, abs_tol: f64, rel_tol: f64) -> Result<Estimate> {
    integrate(
        |s| {
            let om = 1.0 - s;
            let x = a + s / om;
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v / (om * om)
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

/// Integrates over `[a, b]` with `x = a + v²`, which flattens integrable
/// `(x-a)^{-1/2}` singularities and `√(x-a)` cusps at the left endpoint.
pub fn integrate_sqrt_left<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Estimate> {
    let top = libm::sqrt(b - a);
    integrate(|v| 2.0 * v * f(a + v * v), 0.0, top, abs_tol, rel_tol)
}

/// Mirror of [`integrate_sqrt_left`] for the right endpoint: `x = b - v²`.
pub fn integrate_sqrt_right<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Estimate> {
    let top = libm::sqrt(b - a);
    integrate(|v| 2.0 * v * f(b - v * v), 0.0, top, abs_tol, rel_tol)
}

/// Integrates over `[0, ∞)` for integrands with square-root behaviour at the
/// origin: `[0, 1]` under `t = v²`, the tail via [`integrate_to_infinity`].
pub fn integrate_half_line_sqrt<F: Fn(f64) -> f64>(f: F, abs_tol: f64, rel_tol: f64) -> Result<Estimate> {
    let head = integrate_sqrt_left(&f, 0.0, 1.0, abs_tol * 0.5, rel_tol)?;
    let tail = integrate_to_infinity(&f, 1.0, abs_tol * 0.5, rel_tol)?;
    Ok(Estimate { value: head.value + tail.value, error: head.error + tail.error })
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_on_polynomials() {
        // The 15-point Kronrod rule integrates degree ≤ 22 exactly.
        for deg in 0..=22 {
            let s = kronrod15(&|x: f64| libm::pow(x, deg as f64), 0.0, 1.0);
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((s.value - exact).abs() < 1e-15, "degree {deg}");
        }
    }

    #[test]
    fn gauss_weights_sum_to_two() {
        let s = 2.0 * (WG[0] + WG[1] + WG[2]) + WG[3];
        assert!((s - 2.0).abs() < 1e-15);
        let k: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        assert!((k - 2.0).abs() < 1e-15);
    }

    #[test]
    fn oscillatory_and_peaked_integrands() {
        let r = integrate(libm::sin, 0.0, core::f64::consts::PI, 1e-14, 1e-14).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        let r = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12, 1e-12).unwrap();
        let exact = 2.0 * libm::atan(1.0 / 1e-2) / 1e-2;
        assert!((r.value / exact - 1.0).abs() < 1e-11);
    }

    #[test]
    fn half_line_and_sqrt_singularities() {
        let r = integrate_to_infinity(|x| libm::exp(-x), 0.0, 1e-14, 1e-14).unwrap();
        assert!((r.value - 1.0).abs() < 1e-13);
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate_sqrt_left(|x| 1.0 / libm::sqrt(x), 0.0, 1.0, 1e-14, 1e-14).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        let r = integrate_sqrt_right(|x| 1.0 / libm::sqrt(1.0 - x), 0.0, 1.0, 1e-14, 1e-14).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        // ∫_0^∞ x^{-1/2} e^{-x} dx = √π
        let r = integrate_half_line_sqrt(|x| libm::exp(-x) / libm::sqrt(x), 1e-14, 1e-13).unwrap();
        assert!((r.value - libm::sqrt(core::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn divergent_integral_is_reported() {
        let r = integrate(|x| 1.0 / x, 0.0, 1.0, 1e-12, 1e-12);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }
}
