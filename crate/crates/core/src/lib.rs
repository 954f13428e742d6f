//! Study-duration prediction for event-driven clinical trials whose
//! population is a mixture of subgroups.
//!
//! The time from study start to an observed event is modelled per
//! (treatment, subgroup) cell as enrollment time plus event time, censored to
//! `+inf` by drop-out. The study ends at the `d`-th order statistic of `n`
//! such times drawn from the cell mixture.
//!
//! Modules, bottom-up:
//!
//! - [`special`], [`quadrature`]: incomplete gamma/beta and adaptive
//!   Gauss–Kronrod integration.
//! - [`distributions`]: exponential, Weibull and scaled Beta(1, β) laws.
//! - [`event_time`]: the defective CDF of the observed event time.
//! - [`duration`]: percentile, exact order-statistic and Monte Carlo
//!   estimators of the study duration.
//! - [`heterogeneity`]: biomarker subgroup scenarios built from an overall
//!   median survival.
//! - [`design_compare`]: all-comers versus enrichment comparison, closed form
//!   and on parameter grids.
//! - [`fitting`]: Weibull and enrollment fits from patient-level data and
//!   actual-versus-calculated re-assessment.
//! - [`cli`]: the `durasim` command-line front end.

pub mod cli;
pub mod design_compare;
pub mod distributions;
pub mod duration;
pub mod error;
pub mod event_time;
pub mod fitting;
pub mod heterogeneity;
pub mod numfmt;
pub mod quadrature;
pub mod special;

pub use distributions::{
    Continuous, EnrollmentBeta, ExponentialModel, SurvivalModel, WeibullModel,
};
pub use duration::{DurationEstimate, Estimator, Months, TrialSpec};
pub use error::{Error, Result};
pub use event_time::{EventTimeCdf, SubgroupArm};
