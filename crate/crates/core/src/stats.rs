//! Empirical distribution functions and goodness-of-fit statistics.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Asymptotic Kolmogorov quantile at α = 0.05.
pub const KOLMOGOROV_95: f64 = 1.36;

/// A reference distribution function. `cdf_left(x)` is `P(X < x)`; it only
/// differs from `cdf` at atoms.
pub trait ReferenceCdf {
    fn cdf(&self, x: f64) -> f64;

    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
}

impl<F: Fn(f64) -> f64> ReferenceCdf for F {
    fn cdf(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Sorted sample with right-continuous step-function evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EcdfTable {
    samples: Vec<f64>,
}

impl EcdfTable {
    pub fn from_samples(mut samples: Vec<f64>) -> Result<Self> {
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::InvalidArgument("ECDF sample contains NaN"));
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// `#{x_i ≤ x} / n`.
    pub fn eval(&self, x: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.partition_point(|&s| s <= x) as f64 / self.samples.len() as f64
    }

    /// `#{x_i < x} / n`.
    pub fn eval_left(&self, x: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.partition_point(|&s| s < x) as f64 / self.samples.len() as f64
    }

    /// Relative frequency of the exact value `v`.
    pub fn atom_at(&self, v: f64) -> f64 {
        self.eval(v) - self.eval_left(v)
    }

    /// Sorted merge; the result does not depend on argument order.
    pub fn merge(&self, other: &EcdfTable) -> EcdfTable {
        let (a, b) = (&self.samples, &other.samples);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i].total_cmp(&b[j]).is_le() {
                out.push(a[i]);
                i += 1;
            } else {
                out.push(b[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        EcdfTable { samples: out }
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsReport {
    pub statistic: f64,
    pub n: usize,
    pub m: Option<usize>,
    /// `1.36/√n` (one-sample) or `1.36·√((n+m)/(nm))` (two-sample).
    pub threshold_at_alpha: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl KsReport {
    fn new(statistic: f64, n: usize, m: Option<usize>, threshold: f64) -> Self {
        Self { statistic, n, m, threshold_at_alpha: threshold, tolerance: threshold, pass: statistic <= threshold }
    }

    /// Re-judges the statistic against a criterion's own tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.statistic <= tolerance;
        self
    }
}

/// One-sample Kolmogorov–Smirnov distance between an ECDF and a reference
/// law. The supremum is taken over both one-sided limits at every sample
/// value, which is exact for step-versus-continuous comparisons and handles
/// atoms of the reference through `cdf_left`.
pub fn ks_one_sample<C: ReferenceCdf + ?Sized>(ecdf: &EcdfTable, reference: &C) -> Result<KsReport> {
    let xs = ecdf.samples();
    if xs.is_empty() {
        return Err(Error::Empty);
    }
    let n = xs.len();
    let nf = n as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < n {
        let v = xs[i];
        let mut j = i + 1;
        while j < n && xs[j] == v {
            j += 1;
        }
        let below = i as f64 / nf;
        let upto = j as f64 / nf;
        d = d.max((below - reference.cdf_left(v)).abs());
        d = d.max((upto - reference.cdf(v)).abs());
        i = j;
    }
    Ok(KsReport::new(d.min(1.0), n, None, KOLMOGOROV_95 / libm::sqrt(nf)))
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &EcdfTable, b: &EcdfTable) -> Result<KsReport> {
    let (xa, xb) = (a.samples(), b.samples());
    if xa.is_empty() || xb.is_empty() {
        return Err(Error::Empty);
    }
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() || j < xb.len() {
        let v = match (xa.get(i), xb.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        while i < xa.len() && xa[i] == v {
            i += 1;
        }
        while j < xb.len() && xb[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let threshold = KOLMOGOROV_95 * libm::sqrt((na + nb) / (na * nb));
    Ok(KsReport::new(d, xa.len(), Some(xb.len()), threshold))
}

/// Sample mean and its standard error `√(σ̂²/n)`, with the
/// divide-by-`n` variance `σ̂²`.
pub fn mean_se(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument("mean_se needs at least two samples"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Ok((mean, libm::sqrt(var / n)))
}

/// Unbiased sample variance and its large-sample standard error
/// `√((m₄ - s⁴)/n)`.
pub fn variance_se(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.len() < 4 {
        return Err(Error::InvalidArgument("variance_se needs at least four samples"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for x in samples {
        let d = (x - mean) * (x - mean);
        m2 += d;
        m4 += d * d;
    }
    let var = m2 / (n - 1.0);
    let m4 = m4 / n;
    let m2b = m2 / n;
    Ok((var, libm::sqrt(((m4 - m2b * m2b) / n).max(0.0))))
}

/// Pearson correlation and its standard error `√((1-r²)/(n-2))`.
pub fn correlation(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::InvalidArgument("correlation needs two equal-length samples of size ≥ 3"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::InvalidArgument("correlation of a constant sample"));
    }
    let r = sxy / libm::sqrt(sxx * syy);
    Ok((r, libm::sqrt(((1.0 - r * r) / (n - 2.0)).max(0.0))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws;
    use crate::rng::RandomStream;
    use proptest::prelude::*;

    fn uniform_sample(seed: u64, n: usize) -> Vec<f64> {
        let mut s = RandomStream::new(seed, 0);
        (0..n).map(|_| s.uniform()).collect()
    }

    #[test]
    fn ecdf_is_right_continuous() {
        let e = EcdfTable::from_samples(vec![3.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(e.samples(), &[1.0, 2.0, 2.0, 3.0]);
        assert_eq!(e.eval(0.5), 0.0);
        assert_eq!(e.eval(2.0), 0.75);
        assert_eq!(e.eval_left(2.0), 0.25);
        assert_eq!(e.atom_at(2.0), 0.5);
        assert_eq!(e.eval(3.0), 1.0);
        assert!(EcdfTable::from_samples(vec![f64::NAN]).is_err());
    }

    #[test]
    fn ks_against_atoms() {
        let zeros = EcdfTable::from_samples(vec![0.0; 10]).unwrap();
        let unit_atom = laws::PointMass(0.0);
        assert_eq!(ks_one_sample(&zeros, &unit_atom).unwrap().statistic, 0.0);
        let uniform = |x: f64| x.clamp(0.0, 1.0);
        assert_eq!(ks_one_sample(&zeros, &uniform).unwrap().statistic, 1.0);
        let empty = EcdfTable::from_samples(vec![]).unwrap();
        assert_eq!(ks_one_sample(&empty, &uniform), Err(Error::Empty));
    }

    #[test]
    fn ks_one_sample_threshold_oracle() {
        // Kolmogorov asymptotics: exceeding 1.36/√n happens ~5% of the time.
        let n = 100_000;
        let uniform = |x: f64| x.clamp(0.0, 1.0);
        let mut below = 0;
        for rep in 0..100 {
            let e = EcdfTable::from_samples(uniform_sample(1000 + rep, n)).unwrap();
            let r = ks_one_sample(&e, &uniform).unwrap();
            assert!((r.threshold_at_alpha - 0.0043).abs() < 1e-4);
            if r.pass {
                below += 1;
            }
        }
        assert!(below >= 90, "{below}/100 below threshold");
    }

    #[test]
    fn ks_two_sample_basics() {
        let a = EcdfTable::from_samples(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
        let b = EcdfTable::from_samples(vec![10.0, 11.0]).unwrap();
        assert_eq!(ks_two_sample(&a, &b).unwrap().statistic, 1.0);
        assert_eq!(ks_two_sample(&a, &EcdfTable::from_samples(vec![]).unwrap()), Err(Error::Empty));
    }

    #[test]
    fn ks_two_sample_threshold_oracle() {
        let n = 100_000;
        let mut below = 0;
        for rep in 0..40 {
            let a = EcdfTable::from_samples(uniform_sample(5000 + 2 * rep, n)).unwrap();
            let b = EcdfTable::from_samples(uniform_sample(5001 + 2 * rep, n)).unwrap();
            if ks_two_sample(&a, &b).unwrap().pass {
                below += 1;
            }
        }
        assert!(below >= 34, "{below}/40 below threshold");
    }

    #[test]
    fn ks_invariant_under_monotone_map() {
        let xs = uniform_sample(9, 5000);
        let e = EcdfTable::from_samples(xs.clone()).unwrap();
        let cubed = EcdfTable::from_samples(xs.iter().map(|x| x * x * x).collect()).unwrap();
        let d1 = ks_one_sample(&e, &|x: f64| x.clamp(0.0, 1.0)).unwrap().statistic;
        let d2 = ks_one_sample(&cubed, &|y: f64| libm::cbrt(y.clamp(0.0, 1.0))).unwrap().statistic;
        assert!((d1 - d2).abs() < 1e-12);
    }

    #[test]
    fn mean_se_values() {
        assert_eq!(mean_se(&[2.0, 2.0, 2.0]).unwrap(), (2.0, 0.0));
        let (m, se) = mean_se(&[0.0, 1.0]).unwrap();
        assert_eq!(m, 0.5);
        assert!((se - 0.5 * libm::sqrt(2.0 / 2.0) / libm::sqrt(2.0)).abs() < 1e-15);
        assert!(mean_se(&[1.0]).is_err());
    }

    #[test]
    fn correlation_of_independent_samples() {
        let x = uniform_sample(11, 10_000);
        let y = uniform_sample(12, 10_000);
        let (r, se) = correlation(&x, &y).unwrap();
        assert!(r.abs() < 4.0 * se);
        let (r, _) = correlation(&x, &x).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ecdf_is_deterministic() {
        let a = EcdfTable::from_samples(uniform_sample(77, 1000)).unwrap();
        let b = EcdfTable::from_samples(uniform_sample(77, 1000)).unwrap();
        let ab: Vec<u64> = a.samples().iter().map(|x| x.to_bits()).collect();
        let bb: Vec<u64> = b.samples().iter().map(|x| x.to_bits()).collect();
        assert_eq!(ab, bb);
    }

    proptest! {
        #[test]
        fn merge_is_order_independent(a in proptest::collection::vec(-10.0f64..10.0, 0..50),
                                      b in proptest::collection::vec(-10.0f64..10.0, 0..50)) {
            let ea = EcdfTable::from_samples(a.clone()).unwrap();
            let eb = EcdfTable::from_samples(b.clone()).unwrap();
            let mut all = a;
            all.extend(b);
            let direct = EcdfTable::from_samples(all).unwrap();
            prop_assert_eq!(ea.merge(&eb), direct.clone());
            prop_assert_eq!(eb.merge(&ea), direct);
        }

        #[test]
        fn ks_statistic_in_unit_interval(xs in proptest::collection::vec(-2.0f64..2.0, 1..100)) {
            let e = EcdfTable::from_samples(xs).unwrap();
            let d = ks_one_sample(&e, &|x: f64| x.clamp(0.0, 1.0)).unwrap().statistic;
            prop_assert!((0.0..=1.0).contains(&d));
        }
    }
}
