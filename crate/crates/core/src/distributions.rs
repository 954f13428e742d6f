//! Parametric building blocks: exponential and Weibull lifetimes and the
//! scaled Beta(1, β) enrollment-time law on `(0, a)`.
//!
//! All models validate their parameters on construction and are immutable
//! afterwards. Times are in months.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{check_positive, Error, Result};

pub use crate::special::gamma_cdf;

fn check_quantile_level(p: f64) -> Result<f64> {
    if (0.0..1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::param("p", format!("quantile level must lie in [0, 1), got {p}")))
    }
}

/// Shared surface of the continuous models.
pub trait Continuous {
    fn cdf(&self, x: f64) -> f64;
    fn pdf(&self, x: f64) -> f64;
    fn quantile(&self, p: f64) -> Result<f64>;

    fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentialModel {
    rate: f64,
}

impl ExponentialModel {
    pub fn new(rate: f64) -> Result<Self> {
        Ok(Self {
            rate: check_positive("rate", rate)?,
        })
    }

    pub fn from_median(median: f64) -> Result<Self> {
        check_positive("median", median)?;
        Self::new(LN_2 / median)
    }

    /// Degenerate law that never fires; stands in for "no drop-out".
    pub(crate) fn never() -> Self {
        Self { rate: 0.0 }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn median(&self) -> f64 {
        LN_2 / self.rate
    }
}

impl Continuous for ExponentialModel {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.rate * x).exp_m1()
        }
    }

    fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-self.rate * x).exp()
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.rate * (-self.rate * x).exp()
        }
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        let p = check_quantile_level(p)?;
        if p == 0.0 {
            return Ok(0.0);
        }
        if self.rate == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(-(-p).ln_1p() / self.rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeibullModel {
    shape: f64,
    scale: f64,
}

impl WeibullModel {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        Ok(Self {
            shape: check_positive("shape", shape)?,
            scale: check_positive("scale", scale)?,
        })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn median(&self) -> f64 {
        self.scale * LN_2.powf(1.0 / self.shape)
    }

    fn cum_hazard(&self, x: f64) -> f64 {
        (x / self.scale).powf(self.shape)
    }
}

impl Continuous for WeibullModel {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.cum_hazard(x)).exp_m1()
        }
    }

    fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-self.cum_hazard(x)).exp()
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return match self.shape.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => 1.0 / self.scale,
                _ => 0.0,
            };
        }
        let z = x / self.scale;
        self.shape / self.scale * z.powf(self.shape - 1.0) * (-z.powf(self.shape)).exp()
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        let p = check_quantile_level(p)?;
        if p == 0.0 {
            return Ok(0.0);
        }
        Ok(self.scale * (-(-p).ln_1p()).powf(1.0 / self.shape))
    }
}

/// Event or drop-out time law for one subgroup arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum SurvivalModel {
    Exponential(ExponentialModel),
    Weibull(WeibullModel),
}

impl SurvivalModel {
    pub fn exponential_median(median: f64) -> Result<Self> {
        Ok(Self::Exponential(ExponentialModel::from_median(median)?))
    }

    pub fn exponential_rate(rate: f64) -> Result<Self> {
        Ok(Self::Exponential(ExponentialModel::new(rate)?))
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Ok(Self::Weibull(WeibullModel::new(shape, scale)?))
    }

    /// Hazard rate if this is an exponential law.
    pub fn exponential_rate_of(&self) -> Option<f64> {
        match self {
            Self::Exponential(e) => Some(e.rate()),
            Self::Weibull(_) => None,
        }
    }

    pub fn median(&self) -> f64 {
        match self {
            Self::Exponential(e) => e.median(),
            Self::Weibull(w) => w.median(),
        }
    }
}

impl Continuous for SurvivalModel {
    fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Exponential(m) => m.cdf(x),
            Self::Weibull(m) => m.cdf(x),
        }
    }

    fn sf(&self, x: f64) -> f64 {
        match self {
            Self::Exponential(m) => m.sf(x),
            Self::Weibull(m) => m.sf(x),
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        match self {
            Self::Exponential(m) => m.pdf(x),
            Self::Weibull(m) => m.pdf(x),
        }
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        match self {
            Self::Exponential(m) => m.quantile(p),
            Self::Weibull(m) => m.quantile(p),
        }
    }
}

/// Enrollment time `U` with `U / a ~ Beta(1, β)`.
///
/// `β = 1` is uniform accrual; `β < 1` back-loads and `β > 1` front-loads it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnrollmentBeta {
    period_a: f64,
    beta: f64,
}

impl EnrollmentBeta {
    pub fn new(period_a: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            period_a: check_positive("period_a", period_a)?,
            beta: check_positive("beta", beta)?,
        })
    }

    pub fn uniform(period_a: f64) -> Result<Self> {
        Self::new(period_a, 1.0)
    }

    pub fn period_a(&self) -> f64 {
        self.period_a
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `P(U > u)`, i.e. `(1 - u/a)^β` on `[0, a]`.
    fn remaining(&self, u: f64) -> f64 {
        if u <= 0.0 {
            1.0
        } else if u >= self.period_a {
            0.0
        } else {
            (1.0 - u / self.period_a).powf(self.beta)
        }
    }
}

impl Continuous for EnrollmentBeta {
    fn cdf(&self, u: f64) -> f64 {
        1.0 - self.remaining(u)
    }

    fn sf(&self, u: f64) -> f64 {
        self.remaining(u)
    }

    fn pdf(&self, u: f64) -> f64 {
        if u < 0.0 || u > self.period_a {
            0.0
        } else {
            self.beta / self.period_a * (1.0 - u / self.period_a).powf(self.beta - 1.0)
        }
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        let p = check_quantile_level(p)?;
        if p == 0.0 {
            return Ok(0.0);
        }
        // 1 - (1-p)^{1/β}, written to keep precision for small p
        let frac = -((-p).ln_1p() / self.beta).exp_m1();
        Ok(self.period_a * frac)
    }
}
