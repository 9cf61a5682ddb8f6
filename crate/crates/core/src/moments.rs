//! Moments of `A_t` and persistence probabilities at Poisson epochs.
//!
//! * `E[A_t^m] = Σ_{ρ ∈ 𝒫_m} ∫_0^t (✱_{B∈ρ} f_{|B|})(s) ds` with
//!   `f_b(u) = u^{b-1} p_u`, evaluated per block-size profile by trapezoid
//!   convolutions on a uniform grid.
//! * `p_k(q) = P(X_{T_1} > 0, …, X_{T_k} > 0)` for the epochs of a rate-`q`
//!   Poisson process is `B_k(1, w)/k!` with `w_j = (j-1)! P(X_{T_j} > 0)`.
//! * Monte Carlo counterparts of both.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure, Error, Result};
use crate::exec::Executor;
use crate::laplace;
use crate::models::{integrate_weighted, sample_path, Positivity, ProcessModel};
use crate::occupation::occupation_of_path;
use crate::partitions::{block_sizes, for_each_set_partition, size_profiles};
use crate::quad::CompensatedSum;
use crate::rng::RandomStream;
use crate::specfun::ln_gamma_unchecked;
use crate::stats::mean_se;

pub const MAX_PARTITION_ORDER: usize = 8;
pub const MAX_BELL_ORDER: usize = 12;
pub const MAX_ENUMERATION_ORDER: usize = 8;
pub const MIN_GRID: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMethod {
    PartitionQuadrature,
    Bell,
    MonteCarlo,
}

impl MomentMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            MomentMethod::PartitionQuadrature => "partition",
            MomentMethod::Bell => "bell",
            MomentMethod::MonteCarlo => "mc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEntry {
    pub m: usize,
    pub value: f64,
    pub method: MomentMethod,
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub t: f64,
    pub entries: Vec<MomentEntry>,
}

impl MomentTable {
    /// `0 ≤ E[A_t^m] ≤ t^m` up to the reported errors.
    pub fn is_bounded(&self) -> bool {
        self.entries.iter().all(|e| {
            let slack = 3.0 * e.err + 1e-12 * libm::pow(self.t, e.m as f64);
            e.value >= -slack && e.value <= libm::pow(self.t, e.m as f64) + slack
        })
    }

    /// All finite differences of `m ↦ E[(A_t/t)^m]` (with `m = 0` giving 1)
    /// have the sign `(-1)^k` required of a Hausdorff moment sequence. Entries
    /// must be `m = 1, 2, …` without gaps.
    pub fn is_completely_monotone(&self) -> bool {
        let mut mu = vec![1.0];
        let mut err = vec![0.0];
        for (i, e) in self.entries.iter().enumerate() {
            if e.m != i + 1 {
                return false;
            }
            let scale = libm::pow(self.t, e.m as f64);
            mu.push(e.value / scale);
            err.push(e.err / scale);
        }
        let max_err = err.iter().fold(0.0f64, |a, &b| a.max(b)) + 1e-12;
        let mut diff = mu;
        let mut k = 0;
        while diff.len() > 1 {
            diff = diff.windows(2).map(|w| w[0] - w[1]).collect();
            k += 1;
            let tol = libm::pow(2.0, k as f64) * 3.0 * max_err;
            if diff.iter().any(|&d| d < -tol) {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

/// Trapezoid approximation of `(f * g)(t_i)`, `i = 0..=n`, on a grid of step `h`.
fn trapezoid_convolve(f: &[f64], g: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    for i in 1..n {
        let mut s = 0.0;
        for j in 0..=i {
            s += f[j] * g[i - j];
        }
        s -= 0.5 * (f[0] * g[i] + f[i] * g[0]);
        out[i] = h * s;
    }
    out
}

fn trapezoid_integral(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    let s: f64 = f.iter().sum();
    h * (s - 0.5 * (f[0] + f[n - 1]))
}

fn partition_sum<P: Positivity + ?Sized>(positivity: &P, t: f64, m: usize, n: usize) -> f64 {
    let h = t / n as f64;
    let p: Vec<f64> = (0..=n)
        .map(|i| if i == 0 { positivity.at_zero() } else { positivity.eval(i as f64 * h) })
        .collect();
    let f: Vec<Vec<f64>> = (1..=m)
        .map(|b| {
            (0..=n)
                .map(|i| if b == 1 { p[i] } else { libm::pow(i as f64 * h, (b - 1) as f64) * p[i] })
                .collect()
        })
        .collect();
    let mut total = CompensatedSum::new();
    for profile in size_profiles(m) {
        let mut conv = f[profile.sizes[0] - 1].clone();
        for &b in &profile.sizes[1..] {
            conv = trapezoid_convolve(&conv, &f[b - 1], h);
        }
        total.add(profile.count as f64 * trapezoid_integral(&conv, h));
    }
    total.value()
}

/// `E[A_t^m]` by the partition formula at grids `grid_n` and `2·grid_n`,
/// Richardson-extrapolated. The error is `|I_{2N} - I_N|/3`; the call fails
/// when it exceeds `1e-3` of the value.
pub fn moment_partition_quadrature<P: Positivity + ?Sized>(positivity: &P, t: f64, m: usize, grid_n: usize) -> Result<Estimate> {
    ensure((1..=MAX_PARTITION_ORDER).contains(&m), "m must lie in 1..=8")?;
    ensure(grid_n >= MIN_GRID, "grid_n must be at least 512")?;
    ensure(t > 0.0 && t.is_finite(), "t must be positive")?;
    let coarse = partition_sum(positivity, t, m, grid_n);
    let fine = partition_sum(positivity, t, m, 2 * grid_n);
    let err = (fine - coarse).abs() / 3.0;
    let value = fine + (fine - coarse) / 3.0;
    if !value.is_finite() || err > 1e-3 * value.abs().max(1e-300) {
        return Err(Error::GridRefinement { coarse, fine });
    }
    Ok(Estimate { value, err })
}

/// Moments `m = 1..=max_m` by the partition formula.
pub fn moment_table_partition<P: Positivity + ?Sized>(positivity: &P, t: f64, max_m: usize, grid_n: usize) -> Result<MomentTable> {
    let mut entries = Vec::with_capacity(max_m);
    for m in 1..=max_m {
        let e = moment_partition_quadrature(positivity, t, m, grid_n)?;
        entries.push(MomentEntry { m, value: e.value, method: MomentMethod::PartitionQuadrature, err: e.err });
    }
    Ok(MomentTable { t, entries })
}

/// `P(X_{T_j} > 0)` with `T_j ~ Gam(q, j)`:
/// `∫_0^∞ u^{j-1} e^{-u} p(u/q) du / Γ(j)`.
pub fn gamma_time_positivity<P: Positivity + ?Sized>(positivity: &P, q: f64, j: usize) -> Result<f64> {
    ensure(q > 0.0 && q.is_finite(), "q must be positive")?;
    ensure(j >= 1, "j must be at least 1")?;
    if let Some(c) = positivity.constant() {
        return Ok(c);
    }
    let lg = ln_gamma_unchecked(j as f64);
    let k = (j - 1) as f64;
    let weight = |u: f64| {
        if u == 0.0 {
            if j == 1 {
                1.0
            } else {
                0.0
            }
        } else {
            libm::exp(k * libm::log(u) - u - lg)
        }
    };
    Ok(integrate_weighted(positivity, q, weight, 1e-15, 1e-13)?.clamp(0.0, 1.0))
}

fn bell_weights<P: Positivity + ?Sized>(positivity: &P, q: f64, k: usize) -> Result<Vec<f64>> {
    let mut w = Vec::with_capacity(k);
    let mut fact = 1.0;
    for j in 1..=k {
        if j > 1 {
            fact *= (j - 1) as f64;
        }
        w.push(fact * gamma_time_positivity(positivity, q, j)?);
    }
    Ok(w)
}

/// Complete Bell polynomial `Y_k(w_1, …, w_k)` by
/// `Y_{n+1} = Σ_{j=0}^n C(n, j) w_{j+1} Y_{n-j}`.
pub fn complete_bell(w: &[f64]) -> f64 {
    let k = w.len();
    let mut y = vec![1.0];
    let mut binom = vec![1.0];
    for n in 0..k {
        let mut s = CompensatedSum::new();
        for j in 0..=n {
            s.add(binom[j] * w[j] * y[n - j]);
        }
        y.push(s.value());
        let mut next = vec![1.0; n + 2];
        for j in 1..=n {
            next[j] = binom[j - 1] + binom[j];
        }
        binom = next;
    }
    y[k]
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `p_k(q)` from the Bell recurrence, `k ≤ 12`.
pub fn persistence_prob_bell<P: Positivity + ?Sized>(positivity: &P, q: f64, k: usize) -> Result<f64> {
    ensure((1..=MAX_BELL_ORDER).contains(&k), "k must lie in 1..=12")?;
    let w = bell_weights(positivity, q, k)?;
    Ok(complete_bell(&w) / factorial(k))
}

/// `p_k(q)` by summing over all set partitions of `{1..k}`, `k ≤ 8`.
pub fn persistence_prob_enumeration<P: Positivity + ?Sized>(positivity: &P, q: f64, k: usize) -> Result<f64> {
    ensure((1..=MAX_ENUMERATION_ORDER).contains(&k), "k must lie in 1..=8")?;
    let w = bell_weights(positivity, q, k)?;
    let mut s = CompensatedSum::new();
    for_each_set_partition(k, |rgs| {
        s.add(block_sizes(rgs).iter().map(|&b| w[b - 1]).product());
    });
    Ok(s.value() / factorial(k))
}

/// `E[A_t^m]` by inverting `q ↦ m! p_m(q) / q^{m+1}`.
pub fn moment_bell_inversion<P: Positivity + ?Sized>(positivity: &P, t: f64, m: usize, stages: usize) -> Result<Estimate> {
    ensure((1..=MAX_BELL_ORDER).contains(&m), "m must lie in 1..=12")?;
    let mf = factorial(m);
    let r = laplace::gaver_stehfest_invert(
        |q| persistence_prob_bell(positivity, q, m).map_or(f64::NAN, |p| mf * p / libm::pow(q, (m + 1) as f64)),
        t,
        stages,
    )?;
    Ok(Estimate { value: r.value, err: r.stability })
}

fn check_increment_model(model: &ProcessModel) -> Result<()> {
    model.validate()?;
    if !model.has_increment_sampler() {
        return Err(Error::UnsupportedModel("model has no increment sampler"));
    }
    Ok(())
}

/// Frequency of `{X_{T_1} > 0, …, X_{T_k} > 0}` over `n_trials` trials; trial
/// `i` uses stream `(seed, i)`. Returns the estimate and its binomial SE.
pub fn persistence_prob_mc<E: Executor>(
    model: &ProcessModel,
    q: f64,
    k: usize,
    n_trials: usize,
    seed: u64,
    exec: &E,
) -> Result<(f64, f64)> {
    check_increment_model(model)?;
    ensure(q > 0.0 && q.is_finite(), "q must be positive")?;
    ensure(k >= 1, "k must be at least 1")?;
    ensure(n_trials > 1, "need at least two trials")?;
    let hits = exec.map_indexed(n_trials, |i| -> Result<bool> {
        let mut rng = RandomStream::new(seed, i as u64);
        let mut x = 0.0;
        for _ in 0..k {
            let dt = rng.exponential(q);
            x += model.increment_sampler(dt)?.draw(&mut rng);
            if x <= 0.0 {
                return Ok(false);
            }
        }
        Ok(true)
    });
    let mut count = 0usize;
    for h in hits {
        count += h? as usize;
    }
    let p = count as f64 / n_trials as f64;
    Ok((p, libm::sqrt(p * (1.0 - p) / n_trials as f64)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingEstimate {
    /// Frequency of the all-positive event at `m` uniform times.
    pub estimate: f64,
    pub se: f64,
    /// Mean of `(A_t/t)^m` over the same paths.
    pub path_mean: f64,
    pub path_se: f64,
}

/// `E[(A_t/t)^m] = P(X_{U_1} > 0, …, X_{U_m} > 0)` for i.i.d. uniform `U_k`.
/// The sign at `U` is read at the grid node closing the cell that contains
/// `U`, which matches the right-endpoint rule of the occupation estimator.
pub fn moment_sampling_mc<E: Executor>(
    model: &ProcessModel,
    t: f64,
    m: usize,
    n_paths: usize,
    n_steps: usize,
    seed: u64,
    exec: &E,
) -> Result<SamplingEstimate> {
    model.validate()?;
    if !model.has_path_sampler() {
        return Err(Error::UnsupportedModel("model has no path sampler"));
    }
    ensure(m >= 1, "m must be at least 1")?;
    ensure(n_paths > 1, "need at least two paths")?;
    let rows = exec.map_indexed(n_paths, |i| -> Result<(f64, f64)> {
        let mut rng = RandomStream::new(seed, i as u64);
        let path = sample_path(model, t, n_steps, &mut rng)?;
        let values = path.values();
        let mut all = true;
        for _ in 0..m {
            let u = rng.uniform();
            let node = (libm::ceil(u * n_steps as f64) as usize).clamp(1, n_steps);
            all &= values[node] > 0.0;
        }
        let frac = occupation_of_path(&path).a_t / t;
        Ok((all as u8 as f64, libm::pow(frac, m as f64)))
    });
    let mut ind = Vec::with_capacity(n_paths);
    let mut pm = Vec::with_capacity(n_paths);
    for r in rows {
        let (a, b) = r?;
        ind.push(a);
        pm.push(b);
    }
    let (estimate, se) = mean_se(&ind)?;
    let (path_mean, path_se) = mean_se(&pm)?;
    Ok(SamplingEstimate { estimate, se, path_mean, path_se })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::laws::arcsine_moment;
    use crate::models::{ModelPositivity, PiecewiseConstant};
    use proptest::prelude::*;

    #[test]
    fn constant_positivity_moments() {
        let p = ModelPositivity::Constant(0.5);
        let e = moment_partition_quadrature(&p, 1.0, 1, 512).unwrap();
        assert!((e.value - 0.5).abs() < 1e-12);
        let e = moment_partition_quadrature(&p, 1.0, 2, 512).unwrap();
        assert!((e.value - 0.375).abs() < 1e-9);
        let p = ModelPositivity::Constant(0.3);
        let e = moment_partition_quadrature(&p, 2.0, 3, 512).unwrap();
        let expect = 8.0 * 0.3 * 1.3 * 2.3 / 6.0;
        assert!((e.value / expect - 1.0).abs() < 1e-8);
    }

    #[test]
    fn beta_moments_up_to_six() {
        for c in [0.1, 0.5, 0.9] {
            let p = ModelPositivity::Constant(c);
            for t in [1.0, 2.0] {
                for m in 1..=6 {
                    let e = moment_partition_quadrature(&p, t, m, 512).unwrap();
                    let expect = arcsine_moment(c, m as u32) * libm::pow(t, m as f64);
                    assert!((e.value / expect - 1.0).abs() < 1e-6, "c={c} t={t} m={m}: {} vs {expect}", e.value);
                }
            }
        }
    }

    #[test]
    fn order_and_grid_are_checked() {
        let p = ModelPositivity::Constant(0.5);
        assert!(moment_partition_quadrature(&p, 1.0, 0, 512).is_err());
        assert!(moment_partition_quadrature(&p, 1.0, 9, 512).is_err());
        assert!(moment_partition_quadrature(&p, 1.0, 2, 256).is_err());
    }

    #[test]
    fn drift_moments_are_completely_monotone() {
        for p in [
            ModelPositivity::GaussianDrift { mu: 0.8 },
            ModelPositivity::GaussianDrift { mu: -1.5 },
            ModelPositivity::HalfStable { b: 0.25 },
        ] {
            let table = moment_table_partition(&p, 1.5, 6, 512).unwrap();
            assert!(table.is_bounded());
            assert!(table.is_completely_monotone(), "{p:?}: {table:?}");
        }
        let bad = MomentTable {
            t: 1.0,
            entries: vec![
                MomentEntry { m: 1, value: 0.5, method: MomentMethod::Bell, err: 0.0 },
                MomentEntry { m: 2, value: 0.6, method: MomentMethod::Bell, err: 0.0 },
            ],
        };
        assert!(!bad.is_completely_monotone());
    }

    #[test]
    fn drift_first_moment_matches_direct_integral() {
        // E[A_t] = ∫_0^t p_s ds.
        let p = ModelPositivity::GaussianDrift { mu: 1.0 };
        let direct =
            crate::quad::integrate_sqrt_left(|s| p.eval(s), 0.0, 2.0, 1e-15, 1e-13).unwrap().value;
        let e = moment_partition_quadrature(&p, 2.0, 1, 1024).unwrap();
        assert!((e.value - direct).abs() < 1e-6, "{} vs {direct}", e.value);
    }

    #[test]
    fn persistence_constant_values() {
        let p = ModelPositivity::Constant(0.5);
        for q in [0.1, 1.0, 10.0] {
            assert!((persistence_prob_bell(&p, q, 2).unwrap() - 0.375).abs() < 1e-15);
            assert!((persistence_prob_bell(&p, q, 3).unwrap() - 0.3125).abs() < 1e-15);
            assert!((persistence_prob_enumeration(&p, q, 3).unwrap() - 0.3125).abs() < 1e-15);
        }
        for c in [0.0, 0.3, 1.0] {
            let p = ModelPositivity::Constant(c);
            assert_eq!(persistence_prob_bell(&p, 1.0, 1).unwrap(), c);
            // For constant c, p_k is the Beta moment.
            for k in 1..=12 {
                let v = persistence_prob_bell(&p, 1.0, k).unwrap();
                assert!((v - arcsine_moment(c, k as u32)).abs() < 1e-13);
            }
        }
        assert!(persistence_prob_bell(&p, 1.0, 13).is_err());
        assert!(persistence_prob_enumeration(&p, 1.0, 9).is_err());
    }

    #[test]
    fn gamma_time_positivity_first_epoch() {
        // P(X_{T_1} > 0) = q ∫ e^{-qt} p_t dt; for drift 1, q = 1 it is (1 + 1/√3)/2.
        let p = ModelPositivity::GaussianDrift { mu: 1.0 };
        let v = gamma_time_positivity(&p, 1.0, 1).unwrap();
        assert!((v - 0.5 * (1.0 + 1.0 / libm::sqrt(3.0))).abs() < 1e-12);
        let pw = PiecewiseConstant::new(vec![1.0], vec![0.0, 1.0]).unwrap();
        // P(Gam(1, 3) > 1) = e^{-1}(1 + 1 + 1/2).
        let v = gamma_time_positivity(&pw, 1.0, 3).unwrap();
        assert!((v - 2.5 * libm::exp(-1.0)).abs() < 1e-12);
    }

    fn random_piecewise(rng: &mut RandomStream) -> PiecewiseConstant {
        let n = 1 + (rng.uniform() * 4.0) as usize;
        let mut breaks: Vec<f64> = (0..n).map(|_| 0.05 + 5.0 * rng.uniform()).collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let values = (0..=breaks.len()).map(|_| rng.uniform()).collect();
        PiecewiseConstant::new(breaks, values).unwrap()
    }

    #[test]
    fn bell_matches_enumeration_on_random_functions() {
        let mut rng = RandomStream::new(11, 0);
        for i in 0..50 {
            let q = 0.2 + 3.0 * rng.uniform();
            let check = |p: &dyn Positivity| {
                for k in 1..=8 {
                    let a = persistence_prob_bell(p, q, k).unwrap();
                    let b = persistence_prob_enumeration(p, q, k).unwrap();
                    assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300), "case {i}, k={k}: {a} vs {b}");
                }
            };
            match i % 3 {
                0 => check(&random_piecewise(&mut rng)),
                1 => check(&ModelPositivity::Constant(rng.uniform())),
                _ => check(&ModelPositivity::GaussianDrift { mu: 4.0 * rng.uniform() - 2.0 }),
            }
        }
    }

    #[test]
    fn bell_inversion_recovers_beta_moments() {
        let p = ModelPositivity::Constant(0.3);
        for m in 1..=3 {
            let e = moment_bell_inversion(&p, 2.0, m, 14).unwrap();
            let expect = arcsine_moment(0.3, m as u32) * libm::pow(2.0, m as f64);
            assert!((e.value / expect - 1.0).abs() < 1e-4, "m={m}: {} vs {expect}", e.value);
        }
    }

    #[test]
    fn partition_moments_agree_with_bell_inversion_for_drift() {
        let p = ModelPositivity::GaussianDrift { mu: 0.7 };
        for m in 1..=3 {
            let a = moment_partition_quadrature(&p, 1.0, m, 1024).unwrap();
            let b = moment_bell_inversion(&p, 1.0, m, 14).unwrap();
            assert!((a.value / b.value - 1.0).abs() < 1e-3, "m={m}: {} vs {}", a.value, b.value);
        }
    }

    #[test]
    fn persistence_mc_brownian() {
        let (p, se) = persistence_prob_mc(&ProcessModel::BrownianMotion, 1.0, 2, 1_000_000, 21, &Sequential).unwrap();
        assert!((p - 0.375).abs() < 3.0 * se, "{p} ± {se}");
    }

    #[test]
    fn persistence_mc_drift() {
        let model = ProcessModel::BrownianDrift { mu: 1.0 };
        let pos = model.positivity_function().unwrap();
        let exact = persistence_prob_enumeration(&pos, 1.0, 3).unwrap();
        let (p, se) = persistence_prob_mc(&model, 1.0, 3, 400_000, 22, &Sequential).unwrap();
        assert!((p - exact).abs() < 3.0 * se, "{p} ± {se} vs {exact}");
        let exact1 = persistence_prob_enumeration(&pos, 1.0, 1).unwrap();
        let (p1, se1) = persistence_prob_mc(&model, 1.0, 1, 400_000, 23, &Sequential).unwrap();
        assert!((p1 - exact1).abs() < 3.0 * se1);
    }

    #[test]
    fn sampling_identity_brownian() {
        let r = moment_sampling_mc(&ProcessModel::BrownianMotion, 1.0, 1, 20_000, 256, 31, &Sequential).unwrap();
        assert!((r.estimate - 0.5).abs() < 3.0 * r.se);
        let r = moment_sampling_mc(&ProcessModel::BrownianMotion, 1.0, 2, 20_000, 256, 32, &Sequential).unwrap();
        assert!((r.estimate - 0.375).abs() < 3.0 * r.se, "{r:?}");
        assert!((r.estimate - r.path_mean).abs() < 3.0 * r.se);
        assert!(moment_sampling_mc(&ProcessModel::ConstantPositivity { c: 0.5 }, 1.0, 2, 10, 64, 0, &Sequential).is_err());
    }

    #[test]
    fn complete_bell_small_cases() {
        assert_eq!(complete_bell(&[]), 1.0);
        assert_eq!(complete_bell(&[2.0]), 2.0);
        // Y_3 = w1³ + 3 w1 w2 + w3
        assert_eq!(complete_bell(&[2.0, 3.0, 5.0]), 8.0 + 18.0 + 5.0);
        // All ones gives the Bell numbers.
        assert_eq!(complete_bell(&[1.0; 8]), 4140.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn bell_equals_enumeration_for_constants(c in 0.0f64..1.0, q in 0.1f64..10.0, k in 1usize..=8) {
            let p = ModelPositivity::Constant(c);
            let a = persistence_prob_bell(&p, q, k).unwrap();
            let b = persistence_prob_enumeration(&p, q, k).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
        }
    }
}
