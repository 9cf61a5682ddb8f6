//! Poisson point process representation of `A` at an exponential time.
//!
//! For `E ~ Exp(q)` independent of a Lévy process `X`,
//! `A_E` has the law of the sum of the points of a Poisson process on
//! `(0, ∞)` with intensity `e^{-qt} t^{-1} p_t`. Points are sampled by
//! thinning the gamma-process intensity `e^{-qt}/t` restricted to `(ε, ∞)`:
//! its mass is `E₁(qε)`, its normalized tail `u ↦ E₁(qt)/E₁(qε)` is inverted
//! per point, and a point at `t` is kept with probability `p_t`.
//!
//! The discarded points below `ε` have total mean `∫_0^ε e^{-qt} p_t dt ≤ ε`;
//! no compensation is added, so a sample is exactly Poisson over `(ε, ∞)`.

use alloc::vec::Vec;

use crate::error::{ensure, Error, Result};
use crate::exec::Executor;
use crate::models::{integrate_weighted, Positivity};
use crate::quad;
use crate::rng::RandomStream;
use crate::specfun::exp_integral_e1;

/// Hard cap on the number of dominating points per sample.
pub const MAX_POINTS: u64 = 10_000;

/// `ε = 1e-9/q`.
pub fn default_epsilon(q: f64) -> f64 {
    1e-9 / q
}

#[derive(Debug, Clone)]
pub struct IntensitySpec<P> {
    q: f64,
    positivity: P,
    epsilon: f64,
    dominating_mass: f64,
    truncation_bias_bound: f64,
}

impl<P: Positivity> IntensitySpec<P> {
    pub fn new(q: f64, positivity: P, epsilon: f64) -> Result<Self> {
        ensure(q > 0.0 && q.is_finite(), "q must be positive")?;
        ensure(epsilon > 0.0, "epsilon must be positive")?;
        ensure(epsilon <= 1e-6 / q, "epsilon must not exceed 1e-6/q")?;
        let dominating_mass = exp_integral_e1(q * epsilon)?;
        let bias = quad::integrate_sqrt_left(|t| libm::exp(-q * t) * positivity.eval(t), 0.0, epsilon, 0.0, 1e-10)?;
        Ok(Self { q, positivity, epsilon, dominating_mass, truncation_bias_bound: bias.value.min(epsilon) })
    }

    pub fn with_default_epsilon(q: f64, positivity: P) -> Result<Self> {
        Self::new(q, positivity, default_epsilon(q))
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn positivity(&self) -> &P {
        &self.positivity
    }

    /// `E₁(qε)`, the mass of the dominating intensity on `(ε, ∞)`.
    pub fn dominating_mass(&self) -> f64 {
        self.dominating_mass
    }

    /// `∫_0^ε e^{-qt} p_t dt`.
    pub fn truncation_bias_bound(&self) -> f64 {
        self.truncation_bias_bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointProcessSample {
    pub points: Vec<f64>,
    pub total: f64,
    pub epsilon: f64,
    pub truncation_bias_bound: f64,
}

/// Solves `E₁(q t) = target` for `t > ε` by safeguarded Newton iteration on
/// `s = ln(q t)`, keeping a bracket so every step is at least a bisection.
fn invert_e1_tail(q: f64, epsilon: f64, target: f64) -> Result<f64> {
    let ln_target = libm::log(target);
    let g = |s: f64| -> Result<(f64, f64)> {
        let x = libm::exp(s);
        let e1 = exp_integral_e1(x)?;
        Ok((libm::log(e1) - ln_target, -libm::exp(-x) / e1))
    };
    let mut lo = libm::log(q * epsilon);
    let mut hi = libm::log((-ln_target).max(1.0) + 2.0);
    while g(hi)?.0 > 0.0 {
        hi += 1.0;
        if hi > 10.0 {
            return Err(Error::InversionFailure("no upper bracket for the gamma-process tail"));
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (val, slope) = g(s)?;
        if val > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let newton = s - val / slope;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - s).abs() <= 1e-13 * s.abs().max(1.0) || hi - lo <= 1e-12 {
            return Ok(libm::exp(next) / q);
        }
        s = next;
    }
    Err(Error::InversionFailure("gamma-process tail inversion did not converge"))
}

/// Points of the dominating process with intensity `e^{-qt}/t` on `(ε, ∞)`.
pub fn sample_dominating_points(q: f64, epsilon: f64, mass: f64, rng: &mut RandomStream) -> Result<Vec<f64>> {
    let k = rng.poisson(mass);
    if k >= MAX_POINTS {
        return Err(Error::PointOverflow(k));
    }
    let mut points = Vec::with_capacity(k as usize);
    for _ in 0..k {
        let u = rng.uniform();
        points.push(invert_e1_tail(q, epsilon, u * mass)?);
    }
    Ok(points)
}

/// One realization of `Σ_{T∈Π} T` truncated to points above `ε`.
pub fn sample_poisson_sum<P: Positivity>(spec: &IntensitySpec<P>, rng: &mut RandomStream) -> Result<PointProcessSample> {
    let mut accepted = Vec::new();
    if spec.positivity.constant() != Some(0.0) {
        for t in sample_dominating_points(spec.q, spec.epsilon, spec.dominating_mass, rng)? {
            if rng.uniform() < spec.positivity.eval(t) {
                accepted.push(t);
            }
        }
    }
    let total = accepted.iter().sum();
    Ok(PointProcessSample {
        points: accepted,
        total,
        epsilon: spec.epsilon,
        truncation_bias_bound: spec.truncation_bias_bound,
    })
}

/// `n` independent Poisson sums; sample `i` uses stream `(seed, i)`.
pub fn sample_poisson_sums<P: Positivity, E: Executor>(
    spec: &IntensitySpec<P>,
    n: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<PointProcessSample>> {
    exec.map_indexed(n, |i| sample_poisson_sum(spec, &mut RandomStream::new(seed, i as u64)))
        .into_iter()
        .collect()
}

/// Campbell mean `∫ p_t e^{-qt} dt` and variance `∫ p_t t e^{-qt} dt` of the
/// untruncated sum.
pub fn expected_sum<P: Positivity>(spec: &IntensitySpec<P>) -> Result<(f64, f64)> {
    let q = spec.q;
    let p = &spec.positivity;
    if let Some(c) = p.constant() {
        return Ok((c / q, c / (q * q)));
    }
    let mean = integrate_weighted(p, q, |u| libm::exp(-u), 1e-15, 1e-12)?;
    let var = integrate_weighted(p, q, |u| u * libm::exp(-u), 1e-15, 1e-12)?;
    Ok((mean / q, var / (q * q)))
}

/// Sums of the black and white points when each point of the gamma process
/// `e^{-qt}/t` is coloured black with probability `c`:
/// `(Γ_c, Γ'_{1-c}) ~ Gam(q, c) ⊗ Gam(q, 1-c)`.
pub fn sample_colored_gamma(c: f64, q: f64, rng: &mut RandomStream) -> Result<(f64, f64)> {
    ensure((0.0..=1.0).contains(&c), "c must lie in [0, 1]")?;
    ensure(q > 0.0 && q.is_finite(), "q must be positive")?;
    let eps = default_epsilon(q);
    let mass = exp_integral_e1(q * eps)?;
    let (mut black, mut white) = (0.0, 0.0);
    for t in sample_dominating_points(q, eps, mass, rng)? {
        if rng.uniform() < c {
            black += t;
        } else {
            white += t;
        }
    }
    Ok((black, white))
}

pub fn sample_colored_gammas<E: Executor>(c: f64, q: f64, n: usize, seed: u64, exec: &E) -> Result<Vec<(f64, f64)>> {
    exec.map_indexed(n, |i| sample_colored_gamma(c, q, &mut RandomStream::new(seed, i as u64)))
        .into_iter()
        .collect()
}

/// Points divided by their total, in non-increasing order.
pub fn normalized_points(sample: &PointProcessSample) -> Result<Vec<f64>> {
    if sample.points.is_empty() || sample.total <= 0.0 {
        return Err(Error::Empty);
    }
    let mut v: Vec<f64> = sample.points.iter().map(|t| t / sample.total).collect();
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::laws::{Arcsine, GammaLaw};
    use crate::models::{ModelPositivity, ProcessModel};
    use crate::stats::{correlation, ks_one_sample, ks_two_sample, mean_se, variance_se, EcdfTable};

    fn totals<P: Positivity>(spec: &IntensitySpec<P>, n: usize, seed: u64) -> Vec<f64> {
        sample_poisson_sums(spec, n, seed, &Sequential).unwrap().into_iter().map(|s| s.total).collect()
    }

    #[test]
    fn tail_inversion_hits_target() {
        let (q, eps) = (2.0, 1e-9 / 2.0);
        let mass = exp_integral_e1(q * eps).unwrap();
        for &u in &[1e-15, 1e-6, 0.01, 0.3, 0.77, 0.999_999] {
            let t = invert_e1_tail(q, eps, u * mass).unwrap();
            assert!(t > eps);
            let back = exp_integral_e1(q * t).unwrap() / mass;
            assert!((back / u - 1.0).abs() < 1e-10, "u = {u}: {back}");
        }
    }

    #[test]
    fn epsilon_is_bounded() {
        assert!(IntensitySpec::new(1.0, ModelPositivity::Constant(0.5), 1e-3).is_err());
        let spec = IntensitySpec::with_default_epsilon(1.0, ModelPositivity::Constant(0.5)).unwrap();
        assert!(spec.truncation_bias_bound() <= spec.epsilon());
        assert!((spec.dominating_mass() - 20.15).abs() < 0.1);
    }

    #[test]
    fn zero_intensity_gives_empty_sum() {
        let spec = IntensitySpec::with_default_epsilon(1.0, ModelPositivity::Constant(0.0)).unwrap();
        let s = sample_poisson_sum(&spec, &mut RandomStream::new(1, 0)).unwrap();
        assert!(s.points.is_empty());
        assert_eq!(s.total, 0.0);
        assert_eq!(normalized_points(&s), Err(Error::Empty));
    }

    #[test]
    fn full_positivity_sum_is_exponential() {
        for q in [1.0, 2.5] {
            let spec = IntensitySpec::with_default_epsilon(q, ModelPositivity::Constant(1.0)).unwrap();
            let e = EcdfTable::from_samples(totals(&spec, 100_000, 2)).unwrap();
            let r = ks_one_sample(&e, &GammaLaw { shape: 1.0, rate: q }).unwrap();
            assert!(r.statistic <= 0.01, "q = {q}: KS {}", r.statistic);
        }
    }

    #[test]
    fn campbell_moments() {
        let models = [
            ProcessModel::BrownianMotion,
            ProcessModel::BrownianDrift { mu: 1.0 },
            ProcessModel::BrownianDrift { mu: -1.0 },
            ProcessModel::HalfStableSubordinatorDrift { mu: 1.0 },
        ];
        for (k, model) in models.iter().enumerate() {
            for (j, q) in [0.5, 1.0, 2.0].into_iter().enumerate() {
                let spec = IntensitySpec::with_default_epsilon(q, model.positivity_function().unwrap()).unwrap();
                let (mean, var) = expected_sum(&spec).unwrap();
                assert!(mean <= 1.0 / q && var <= 1.0 / (q * q));
                let xs = totals(&spec, 100_000, 100 + 10 * k as u64 + j as u64);
                let (m, se) = mean_se(&xs).unwrap();
                let (v, vse) = variance_se(&xs).unwrap();
                assert!((m - mean).abs() < 4.0 * se, "{model} q={q}: mean {m} vs {mean} (se {se})");
                assert!((v - var).abs() < 4.0 * vse, "{model} q={q}: var {v} vs {var} (se {vse})");
            }
        }
    }

    #[test]
    fn expected_sum_constant_and_drift() {
        let spec = IntensitySpec::with_default_epsilon(2.0, ModelPositivity::Constant(0.3)).unwrap();
        assert_eq!(expected_sum(&spec).unwrap(), (0.15, 0.075));
        let bm = IntensitySpec::with_default_epsilon(1.0, ModelPositivity::Constant(0.5)).unwrap();
        assert_eq!(expected_sum(&bm).unwrap().0, 0.5);
        // ∫ Φ(√t) e^{-t} dt = (1 + 1/√3)/2
        let d = IntensitySpec::with_default_epsilon(1.0, ModelPositivity::GaussianDrift { mu: 1.0 }).unwrap();
        let (m, _) = expected_sum(&d).unwrap();
        assert!((m - 0.5 * (1.0 + 1.0 / libm::sqrt(3.0))).abs() < 1e-11);
    }

    #[test]
    fn truncation_levels_are_coupled() {
        // A sample at ε/10 restricted to (ε, ∞) is a sample at ε.
        let q = 1.0;
        let eps = 1e-6;
        let fine = IntensitySpec::new(q, ModelPositivity::Constant(0.5), eps / 10.0).unwrap();
        let n = 20_000;
        let mut diff = 0.0;
        for s in sample_poisson_sums(&fine, n, 3, &Sequential).unwrap() {
            let coarse: f64 = s.points.iter().filter(|&&t| t > eps).sum();
            diff += s.total - coarse;
        }
        assert!(diff / (n as f64) < 2.0 * eps);
    }

    #[test]
    fn colored_gamma_marginals_and_ratio() {
        let (c, q) = (0.3, 1.0);
        let pairs = sample_colored_gammas(c, q, 100_000, 4, &Sequential).unwrap();
        let black: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let white: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let ratio: Vec<f64> = pairs.iter().map(|(b, w)| b / (b + w)).collect();
        let r = ks_one_sample(&EcdfTable::from_samples(black.clone()).unwrap(), &GammaLaw { shape: c, rate: q }).unwrap();
        assert!(r.statistic <= 0.01, "black KS {}", r.statistic);
        let r = ks_one_sample(&EcdfTable::from_samples(white.clone()).unwrap(), &GammaLaw { shape: 1.0 - c, rate: q })
            .unwrap();
        assert!(r.statistic <= 0.01, "white KS {}", r.statistic);
        let r = ks_one_sample(&EcdfTable::from_samples(ratio).unwrap(), &Arcsine::new(c)).unwrap();
        assert!(r.statistic <= 0.01, "ratio KS {}", r.statistic);
        let (rho, se) = correlation(&black, &white).unwrap();
        assert!(rho.abs() < 4.0 * se);
    }

    #[test]
    fn colored_gamma_all_black() {
        let mut rng = RandomStream::new(5, 0);
        for _ in 0..100 {
            let (b, w) = sample_colored_gamma(1.0, 2.0, &mut rng).unwrap();
            assert_eq!(w, 0.0);
            assert!(b > 0.0);
        }
        assert!(sample_colored_gamma(1.5, 1.0, &mut rng).is_err());
    }

    #[test]
    fn superposition_reproduces_dominating_sum() {
        let (c, q, n) = (0.4, 1.0, 100_000);
        let black = IntensitySpec::with_default_epsilon(q, ModelPositivity::Constant(c)).unwrap();
        let white = IntensitySpec::with_default_epsilon(q, ModelPositivity::Constant(1.0 - c)).unwrap();
        let full = IntensitySpec::with_default_epsilon(q, ModelPositivity::Constant(1.0)).unwrap();
        let merged: Vec<f64> = totals(&black, n, 6).iter().zip(totals(&white, n, 7)).map(|(a, b)| a + b).collect();
        let r = ks_two_sample(&EcdfTable::from_samples(merged).unwrap(), &EcdfTable::from_samples(totals(&full, n, 8)).unwrap())
            .unwrap();
        assert!(r.statistic <= 0.01, "KS {}", r.statistic);
    }

    #[test]
    fn normalized_points_are_ranked() {
        let single = PointProcessSample { points: vec![0.7], total: 0.7, epsilon: 1e-9, truncation_bias_bound: 0.0 };
        assert_eq!(normalized_points(&single).unwrap(), vec![1.0]);
        let spec = IntensitySpec::with_default_epsilon(1.0, ModelPositivity::Constant(0.5)).unwrap();
        let mut largest = Vec::new();
        for s in sample_poisson_sums(&spec, 2000, 9, &Sequential).unwrap() {
            if let Ok(v) = normalized_points(&s) {
                assert!(v.windows(2).all(|w| w[0] >= w[1]));
                assert!(v.iter().all(|&x| x > 0.0 && x <= 1.0));
                assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                largest.push(v[0]);
            }
        }
        // Descriptive only: the mean largest share of PD(1/2) is about 0.76.
        let (m, _) = mean_se(&largest).unwrap();
        assert!(m > 0.5 && m < 1.0);
    }
}
