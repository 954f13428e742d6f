//! Distribution of the time from study start to an *observed* event.
//!
//! For one subgroup arm the observed time is `T = U + V` when the event
//! precedes drop-out (`V <= W`) and `+inf` otherwise, with `U` the enrollment
//! time, `V` the event time and `W` the drop-out time, all independent. The
//! CDF of `T` is therefore defective: its finite part tops out at
//! `P(V <= W)` and the remaining mass sits at `+inf`. [`EventTimeCdf`] only
//! ever evaluates the finite part and reports the top separately as
//! [`EventTimeCdf::total_mass`].

use rand::Rng;
use serde::Serialize;

use crate::distributions::{Continuous, EnrollmentBeta, ExponentialModel, SurvivalModel};
use crate::error::{check_probability, Error, Result};
use crate::quadrature::{integrate, DEFAULT_MAX_SUBDIVISIONS, DEFAULT_TOL};
use crate::special::{gamma_pq, ln_gamma};

/// Tolerance on `sum(weights) == 1` for a full design.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// One (treatment, subgroup) cell of the design.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgroupArm {
    label: Option<String>,
    weight: f64,
    enrollment: EnrollmentBeta,
    event: SurvivalModel,
    #[serde(skip)]
    dropout: SurvivalModel,
    #[serde(rename = "dropout")]
    dropout_public: Option<SurvivalModel>,
}

impl SubgroupArm {
    pub fn new(
        weight: f64,
        enrollment: EnrollmentBeta,
        event: SurvivalModel,
        dropout: Option<SurvivalModel>,
    ) -> Result<Self> {
        check_probability("weight", weight)?;
        Ok(Self {
            label: None,
            weight,
            enrollment,
            event,
            dropout: dropout.unwrap_or(SurvivalModel::Exponential(ExponentialModel::never())),
            dropout_public: dropout,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn enrollment(&self) -> &EnrollmentBeta {
        &self.enrollment
    }

    pub fn event(&self) -> &SurvivalModel {
        &self.event
    }

    pub fn dropout(&self) -> Option<&SurvivalModel> {
        self.dropout_public.as_ref()
    }

    pub(crate) fn with_weight(&self, weight: f64) -> Result<Self> {
        check_probability("weight", weight)?;
        Ok(Self {
            weight,
            ..self.clone()
        })
    }

    /// `(λ_V, λ_W)` when both event and drop-out are exponential
    /// (`λ_W = 0` without drop-out).
    fn exponential_rates(&self) -> Option<(f64, f64)> {
        Some((
            self.event.exponential_rate_of()?,
            self.dropout.exponential_rate_of()?,
        ))
    }

    pub fn has_closed_form(&self) -> bool {
        self.exponential_rates().is_some()
    }

    fn has_dropout(&self) -> bool {
        self.dropout_public.is_some()
    }

    /// Draw one observed event time: `U + V` if `V <= W`, else `+inf`.
    pub fn sample_observed_time<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = self
            .enrollment
            .quantile(rng.random::<f64>())
            .expect("uniform draw lies in [0, 1)");
        let v = self
            .event
            .quantile(rng.random::<f64>())
            .expect("uniform draw lies in [0, 1)");
        let w = self
            .dropout
            .quantile(rng.random::<f64>())
            .expect("uniform draw lies in [0, 1)");
        if v <= w {
            u + v
        } else {
            f64::INFINITY
        }
    }
}

fn check_time(t: f64) -> Result<f64> {
    if t >= 0.0 {
        Ok(t)
    } else {
        Err(Error::param("t", format!("must be nonnegative, got {t}")))
    }
}

/// Closed-form `F_T(t)` for exponential event and drop-out times under
/// Beta(1, β) enrollment on `(0, a)`.
///
/// With `λ = λ_V + λ_W` and `F_G` the Gamma(β, λ) CDF:
///
/// ```text
/// F(t) = λ_V/λ · (1 − max(0, (a−t)/a)^β
///                 − β Γ(β) e^{−λ(t−a)} (F_G(a) − F_G(max(0, a−t))) / (aλ)^β)
/// ```
///
/// The gamma term is assembled in log space so large `λa` does not overflow.
pub fn cdf_closed_form(arm: &SubgroupArm, t: f64) -> Result<f64> {
    let (rate_v, rate_w) = arm.exponential_rates().ok_or(Error::UnsupportedModel(
        "closed form needs exponential event and drop-out times",
    ))?;
    let t = check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    if t.is_infinite() {
        return Ok(rate_v / (rate_v + rate_w));
    }
    let lambda = rate_v + rate_w;
    let prefactor = rate_v / lambda;
    let a = arm.enrollment.period_a();
    let beta = arm.enrollment.beta();

    let not_yet_enrolled = ((a - t) / a).max(0.0).powf(beta);

    let z_hi = lambda * a;
    let z_lo = lambda * (a - t).max(0.0);
    let (p_hi, q_hi) = gamma_pq(beta, z_hi)?;
    let gamma_mass = if z_lo == 0.0 {
        p_hi
    } else {
        let (p_lo, q_lo) = gamma_pq(beta, z_lo)?;
        if z_lo >= beta {
            q_lo - q_hi
        } else {
            p_hi - p_lo
        }
    };
    let tail = if gamma_mass > 0.0 {
        (beta.ln() + lambda * (a - t) + ln_gamma(beta) + gamma_mass.ln() - beta * z_hi.ln())
            .exp()
    } else {
        0.0
    };
    Ok((prefactor * (1.0 - not_yet_enrolled - tail)).clamp(0.0, prefactor))
}

/// Uniform-enrollment (β = 1) specialisation of [`cdf_closed_form`]:
///
/// ```text
/// F(t) = λ_V/λ · (1 − max(0, (a−t)/a) − e^{−λt} (e^{λ min(a,t)} − 1) / (aλ))
/// ```
pub fn cdf_uniform_closed_form(arm: &SubgroupArm, t: f64) -> Result<f64> {
    let (rate_v, rate_w) = arm.exponential_rates().ok_or(Error::UnsupportedModel(
        "closed form needs exponential event and drop-out times",
    ))?;
    if arm.enrollment.beta() != 1.0 {
        return Err(Error::UnsupportedModel(
            "uniform closed form needs beta = 1 enrollment",
        ));
    }
    let t = check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let lambda = rate_v + rate_w;
    let a = arm.enrollment.period_a();
    let c = a.min(t);
    // e^{-λt}(e^{λc} - 1) = e^{-λ(t-c)} (1 - e^{-λc})
    let tail = (-lambda * (t - c)).exp() * -(-lambda * c).exp_m1() / (a * lambda);
    let value = rate_v / lambda * (1.0 - ((a - t) / a).max(0.0) - tail);
    Ok(value.max(0.0))
}

/// `P(V <= s, V <= W)`, the probability an event is observed within `s`
/// months of enrollment.
///
/// Integrated over `p = F_V(v)`, which turns `∫₀ˢ S_W(v) f_V(v) dv` into
/// `∫₀^{F_V(s)} S_W(F_V⁻¹(p)) dp` and removes any density singularity at 0.
fn observed_within(arm: &SubgroupArm, s: f64, tol: f64) -> Result<f64> {
    if s <= 0.0 {
        return Ok(0.0);
    }
    if !arm.has_dropout() {
        return Ok(arm.event.cdf(s));
    }
    let upper = arm.event.cdf(s);
    let integrand = |p: f64| match arm.event.quantile(p) {
        Ok(v) => arm.dropout.sf(v),
        Err(_) => 0.0,
    };
    Ok(integrate(integrand, 0.0, upper, tol, DEFAULT_MAX_SUBDIVISIONS)?.value)
}

/// `F_T(t)` by nested adaptive Gauss–Kronrod quadrature of
/// `∫₀^{min(t,a)} [∫₀^{t−u} S_W(v) f_V(v) dv] f_U(u) du`.
///
/// The innermost drop-out integral is already collapsed into `S_W`. The outer
/// integral runs over `s = P(U > u)` so that the Beta(1, β) density never
/// appears explicitly; its `min(t, a)` kink becomes the lower limit.
pub fn cdf_quadrature(arm: &SubgroupArm, t: f64, tol: f64) -> Result<f64> {
    let t = check_time(t)?;
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t.is_infinite() {
        return arm_total_mass(arm, tol);
    }
    let enrollment = arm.enrollment;
    let a = enrollment.period_a();
    let beta = enrollment.beta();
    let s_lo = enrollment.sf(a.min(t));
    let inner_tol = 0.25 * tol;
    let mut failure = None;
    let integrand = |s: f64| {
        // u = a (1 - s^{1/β})
        let u = -a * (s.ln() / beta).exp_m1();
        match observed_within(arm, t - u, inner_tol) {
            Ok(g) => g,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let outer = integrate(integrand, s_lo, 1.0, 0.5 * tol, DEFAULT_MAX_SUBDIVISIONS)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(outer.value.clamp(0.0, 1.0))
}

/// `P(V <= W)`: the finite-part mass of one arm's observed-time law.
pub fn arm_total_mass(arm: &SubgroupArm, tol: f64) -> Result<f64> {
    if let Some((rate_v, rate_w)) = arm.exponential_rates() {
        return Ok(rate_v / (rate_v + rate_w));
    }
    if !arm.has_dropout() {
        return Ok(1.0);
    }
    let integrand = |p: f64| match arm.event.quantile(p) {
        Ok(v) => arm.dropout.sf(v),
        Err(_) => 0.0,
    };
    Ok(integrate(integrand, 0.0, 1.0, tol, DEFAULT_MAX_SUBDIVISIONS)?.value)
}

fn arm_cdf(arm: &SubgroupArm, t: f64, tol: f64) -> Result<f64> {
    if arm.has_closed_form() {
        cdf_closed_form(arm, t)
    } else {
        cdf_quadrature(arm, t, tol)
    }
}

fn check_weights(arms: &[SubgroupArm]) -> Result<()> {
    if arms.is_empty() {
        return Err(Error::Config("a design needs at least one arm".into()));
    }
    let total: f64 = arms.iter().map(SubgroupArm::weight).sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::Config(format!(
            "arm weights must sum to 1, got {total}"
        )));
    }
    Ok(())
}

/// `Σ r_kl F_{T_kl}(t)`, closed form per arm where available.
pub fn mixture_cdf(arms: &[SubgroupArm], t: f64) -> Result<f64> {
    EventTimeCdf::new(arms.to_vec())?.eval(t)
}

/// Finite part of the (mixture) observed-event-time CDF.
///
/// The atom at `+inf` is never folded in: `eval(t)` tends to
/// [`total_mass`](Self::total_mass) as `t` grows, not to 1.
#[derive(Debug, Clone)]
pub struct EventTimeCdf {
    arms: Vec<SubgroupArm>,
    total_mass: f64,
    support_hint: f64,
    tol: f64,
}

impl EventTimeCdf {
    pub fn new(arms: Vec<SubgroupArm>) -> Result<Self> {
        Self::with_tolerance(arms, DEFAULT_TOL)
    }

    pub fn with_tolerance(arms: Vec<SubgroupArm>, tol: f64) -> Result<Self> {
        check_weights(&arms)?;
        let mut total_mass = 0.0;
        for arm in &arms {
            total_mass += arm.weight() * arm_total_mass(arm, tol)?;
        }
        let support_hint = arms
            .iter()
            .map(|a| a.enrollment.period_a())
            .fold(0.0, f64::max);
        Ok(Self {
            arms,
            total_mass: total_mass.min(1.0),
            support_hint,
            tol,
        })
    }

    /// Single-arm CDF (weight forced to 1).
    pub fn single(arm: &SubgroupArm) -> Result<Self> {
        Self::new(vec![arm.with_weight(1.0)?])
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let t = check_time(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        if t.is_infinite() {
            return Ok(self.total_mass);
        }
        let mut acc = 0.0;
        for arm in &self.arms {
            if arm.weight() > 0.0 {
                acc += arm.weight() * arm_cdf(arm, t, self.tol)?;
            }
        }
        Ok(acc.clamp(0.0, self.total_mass))
    }

    /// `lim_{t→∞} F(t) = Σ r_kl P(V_kl <= W_kl)`.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Latest enrollment completion time among the arms.
    pub fn support_hint(&self) -> f64 {
        self.support_hint
    }

    pub fn arms(&self) -> &[SubgroupArm] {
        &self.arms
    }
}
