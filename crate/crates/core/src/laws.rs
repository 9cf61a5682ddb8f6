//! Reference laws used as goodness-of-fit targets.

use crate::specfun;
use crate::stats::ReferenceCdf;

/// Dirac mass at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass(pub f64);

impl ReferenceCdf for PointMass {
    fn cdf(&self, x: f64) -> f64 {
        if x >= self.0 {
            1.0
        } else {
            0.0
        }
    }

    fn cdf_left(&self, x: f64) -> f64 {
        if x > self.0 {
            1.0
        } else {
            0.0
        }
    }
}

/// Generalized arcsine law `Arcsin(c)` = Beta(c, 1-c), scaled to `[0, scale]`.
/// Degenerates to `δ_0` for `c = 0` and to `δ_scale` for `c = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arcsine {
    pub c: f64,
    pub scale: f64,
}

impl Arcsine {
    pub fn new(c: f64) -> Self {
        Self { c, scale: 1.0 }
    }

    pub fn scaled(c: f64, scale: f64) -> Self {
        Self { c, scale }
    }

    /// `E[(A/scale)^m] = ∏_{j<m} (c+j)/(1+j)`.
    pub fn moment(&self, m: u32) -> f64 {
        arcsine_moment(self.c, m)
    }

    pub fn density(&self, x: f64) -> f64 {
        let u = x / self.scale;
        if u <= 0.0 || u >= 1.0 || self.c <= 0.0 || self.c >= 1.0 {
            return 0.0;
        }
        let c = self.c;
        libm::sin(c * core::f64::consts::PI) / core::f64::consts::PI
            * libm::pow(u, c - 1.0)
            * libm::pow(1.0 - u, -c)
            / self.scale
    }
}

impl ReferenceCdf for Arcsine {
    fn cdf(&self, x: f64) -> f64 {
        let u = x / self.scale;
        if self.c <= 0.0 {
            return PointMass(0.0).cdf(u);
        }
        if self.c >= 1.0 {
            return PointMass(1.0).cdf(u);
        }
        if u <= 0.0 {
            0.0
        } else if u >= 1.0 {
            1.0
        } else {
            specfun::reg_inc_beta(self.c, 1.0 - self.c, u).unwrap_or(f64::NAN)
        }
    }

    fn cdf_left(&self, x: f64) -> f64 {
        let u = x / self.scale;
        if self.c <= 0.0 {
            return PointMass(0.0).cdf_left(u);
        }
        if self.c >= 1.0 {
            return PointMass(1.0).cdf_left(u);
        }
        self.cdf(x)
    }
}

pub fn arcsine_moment(c: f64, m: u32) -> f64 {
    (0..m).map(|j| (c + j as f64) / (1.0 + j as f64)).product()
}

/// `Gam(rate, shape)` with density `rate^k t^{k-1} e^{-rate t}/Γ(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaLaw {
    pub shape: f64,
    pub rate: f64,
}

impl ReferenceCdf for GammaLaw {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        specfun::reg_lower_inc_gamma(self.shape, self.rate * x).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    pub lo: f64,
    pub hi: f64,
}

impl ReferenceCdf for Uniform {
    fn cdf(&self, x: f64) -> f64 {
        ((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
}
