//! Study duration as the `d`-th order statistic `T(d)` of `n` observed event
//! times, estimated three ways:
//!
//! - [`duration_percentile`]: `F_T^{-1}(d/n)`, the large-sample limit.
//! - [`duration_exact_median`]: quantiles of the exact law
//!   `P(T(d) <= t) = P(Binomial(n, F_T(t)) >= d)`.
//! - [`duration_montecarlo`]: replicate whole trials patient by patient.
//!
//! Heavy drop-out leaves `T(d) = +inf` with positive probability; any
//! quantile that lies in that atom is reported as [`Months::Unreachable`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::event_time::{EventTimeCdf, SubgroupArm};
use crate::special::binomial_upper_tail;

pub const DEFAULT_LEVEL: f64 = 0.05;
pub const DEFAULT_REPS: usize = 10_000;
pub const MIN_REPS: usize = 100;
/// Bisection stops once the bracket is this narrow (months).
pub const BISECTION_TOL: f64 = 1e-6;
const MASS_MARGIN: f64 = 1e-12;
const MAX_BRACKET_DOUBLINGS: usize = 200;

/// A time in months, or the atom at `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Months {
    Finite(f64),
    Unreachable,
}

impl Months {
    fn from_f64(v: f64) -> Self {
        if v.is_finite() {
            Months::Finite(v)
        } else {
            Months::Unreachable
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Months::Finite(v) => Some(v),
            Months::Unreachable => None,
        }
    }

    pub fn is_unreachable(self) -> bool {
        matches!(self, Months::Unreachable)
    }

    /// `+inf` for the unreachable atom.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl Serialize for Months {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Months::Finite(v) => s.serialize_f64(*v),
            Months::Unreachable => s.serialize_str("unreachable"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Percentile,
    ExactMedian,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    /// Fraction of replicates whose `d`-th event never happens (Monte Carlo),
    /// or `P(T(d) = +inf)` (exact).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unreachable_probability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bisection_iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DurationEstimate {
    pub point: Months,
    pub interval_low: Months,
    pub interval_high: Months,
    pub method: Method,
    /// Two-sided coverage of the interval; `None` for the percentile method,
    /// which has no interval.
    pub confidence: Option<f64>,
    pub diagnostics: Diagnostics,
}

/// Sample size, target events and the (treatment, subgroup) cells.
#[derive(Debug, Clone)]
pub struct TrialSpec {
    n: u64,
    d: u64,
    cdf: EventTimeCdf,
}

impl TrialSpec {
    pub fn new(n: u64, d: u64, arms: Vec<SubgroupArm>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("sample size n must be positive".into()));
        }
        if d == 0 || d > n {
            return Err(Error::Config(format!(
                "target events d must satisfy 1 <= d <= n, got d={d}, n={n}"
            )));
        }
        Ok(Self {
            n,
            d,
            cdf: EventTimeCdf::new(arms)?,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn arms(&self) -> &[SubgroupArm] {
        self.cdf.arms()
    }

    pub fn event_time_cdf(&self) -> &EventTimeCdf {
        &self.cdf
    }

    /// Same arms, different target event count.
    pub fn with_target_events(&self, d: u64) -> Result<Self> {
        if d == 0 || d > self.n {
            return Err(Error::Config(format!(
                "target events d must satisfy 1 <= d <= n, got d={d}, n={}",
                self.n
            )));
        }
        Ok(Self {
            d,
            ..self.clone()
        })
    }
}

fn check_level(level: f64) -> Result<f64> {
    if level > 0.0 && level < 1.0 {
        Ok(level)
    } else {
        Err(Error::param("level", format!("must lie in (0, 1), got {level}")))
    }
}

/// Smallest `t` with `f(t) >= target` for a nondecreasing `f` bounded by
/// `sup`, or `Unreachable` when `target` is not below `sup`.
fn invert_monotone<F>(f: F, target: f64, sup: f64, initial_hi: f64) -> Result<(Months, usize)>
where
    F: Fn(f64) -> Result<f64>,
{
    if target >= sup - MASS_MARGIN {
        return Ok((Months::Unreachable, 0));
    }
    if target <= 0.0 {
        return Ok((Months::Finite(0.0), 0));
    }
    let mut iterations = 0;
    let mut lo = 0.0;
    let mut hi = if initial_hi > 0.0 { initial_hi } else { 1.0 };
    loop {
        let v = f(hi)?;
        iterations += 1;
        if v >= target {
            break;
        }
        if v >= sup - MASS_MARGIN || iterations > MAX_BRACKET_DOUBLINGS {
            return Ok((Months::Unreachable, iterations));
        }
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
        if iterations > 10_000 {
            return Err(Error::Numeric {
                what: "bisection",
                estimate: mid,
                error: hi - lo,
            });
        }
    }
    Ok((Months::Finite(0.5 * (lo + hi)), iterations))
}

/// `F_T^{-1}(d/n)`, the strong-law limit of `T(d)`.
pub fn duration_percentile(spec: &TrialSpec) -> Result<DurationEstimate> {
    let cdf = spec.event_time_cdf();
    let target = spec.d as f64 / spec.n as f64;
    let (point, iterations) =
        invert_monotone(|t| cdf.eval(t), target, cdf.total_mass(), cdf.support_hint())?;
    Ok(DurationEstimate {
        point,
        interval_low: point,
        interval_high: point,
        method: Method::Percentile,
        confidence: None,
        diagnostics: Diagnostics {
            bisection_iterations: Some(iterations),
            ..Diagnostics::default()
        },
    })
}

/// `P(T(d) <= t) = P(Binomial(n, F_T(t)) >= d) = I_{F_T(t)}(d, n - d + 1)`.
pub fn order_statistic_cdf(spec: &TrialSpec, t: f64) -> Result<f64> {
    let p = spec.event_time_cdf().eval(t)?;
    binomial_upper_tail(spec.n, spec.d, p)
}

/// `P(T(d) < +inf)`.
pub fn order_statistic_reach_probability(spec: &TrialSpec) -> Result<f64> {
    binomial_upper_tail(spec.n, spec.d, spec.event_time_cdf().total_mass())
}

/// Quantile of `T(d)` at probability `p`.
pub fn order_statistic_quantile(spec: &TrialSpec, p: f64) -> Result<(Months, usize)> {
    let sup = order_statistic_reach_probability(spec)?;
    let hint = spec.event_time_cdf().support_hint();
    invert_monotone(|t| order_statistic_cdf(spec, t), p, sup, hint)
}

/// Median of `T(d)` with the `(level/2, 1 - level/2)` quantiles around it,
/// all from the exact order-statistic law.
pub fn duration_exact_median(spec: &TrialSpec, level: f64) -> Result<DurationEstimate> {
    let level = check_level(level)?;
    let (low, it_lo) = order_statistic_quantile(spec, 0.5 * level)?;
    let (point, it_mid) = order_statistic_quantile(spec, 0.5)?;
    let (high, it_hi) = order_statistic_quantile(spec, 1.0 - 0.5 * level)?;
    let reach = order_statistic_reach_probability(spec)?;
    Ok(DurationEstimate {
        point,
        interval_low: low,
        interval_high: high,
        method: Method::ExactMedian,
        confidence: Some(1.0 - level),
        diagnostics: Diagnostics {
            unreachable_probability: Some(1.0 - reach),
            bisection_iterations: Some(it_lo + it_mid + it_hi),
            ..Diagnostics::default()
        },
    })
}

/// Cumulative arm weights for inverse-CDF cell selection.
fn cumulative_weights(arms: &[SubgroupArm]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cum: Vec<f64> = arms
        .iter()
        .map(|a| {
            acc += a.weight();
            acc
        })
        .collect();
    if let Some(last) = cum.last_mut() {
        *last = f64::INFINITY;
    }
    cum
}

/// Replicate stream `rep` of the master `seed`.
fn replicate_rng(seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    rng
}

fn simulate_one<R: Rng>(
    arms: &[SubgroupArm],
    cum: &[f64],
    n: usize,
    d: usize,
    rng: &mut R,
    buf: &mut Vec<f64>,
) -> f64 {
    buf.clear();
    for _ in 0..n {
        let pick: f64 = rng.random();
        let cell = cum.partition_point(|&c| c <= pick).min(arms.len() - 1);
        buf.push(arms[cell].sample_observed_time(rng));
    }
    let (_, dth, _) = buf.select_nth_unstable_by(d - 1, f64::total_cmp);
    *dth
}

/// `reps` independent draws of `T(d)`; `+inf` where the `d`-th event never
/// happens. Replicate `i` uses its own stream of `seed`, so the output does
/// not depend on how the work is scheduled.
pub fn simulate_order_statistics(spec: &TrialSpec, reps: usize, seed: u64) -> Vec<f64> {
    let arms = spec.arms();
    let cum = cumulative_weights(arms);
    let n = spec.n as usize;
    let d = spec.d as usize;
    (0..reps)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |buf, rep| {
                let mut rng = replicate_rng(seed, rep);
                simulate_one(arms, &cum, n, d, &mut rng, buf)
            },
        )
        .collect()
}

/// Linear-interpolation (type 7) sample quantile of sorted data; an
/// interpolation that touches `+inf` is `+inf`.
fn sorted_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if frac == 0.0 || lo + 1 >= sorted.len() {
        return sorted[lo];
    }
    let (a, b) = (sorted[lo], sorted[lo + 1]);
    if b.is_infinite() {
        f64::INFINITY
    } else {
        a + frac * (b - a)
    }
}

/// Median and `(level/2, 1 - level/2)` percentiles of simulated `T(d)`.
pub fn duration_montecarlo(
    spec: &TrialSpec,
    reps: usize,
    level: f64,
    seed: u64,
) -> Result<DurationEstimate> {
    if reps < MIN_REPS {
        return Err(Error::param(
            "reps",
            format!("need at least {MIN_REPS} replicates, got {reps}"),
        ));
    }
    let level = check_level(level)?;
    let mut draws = simulate_order_statistics(spec, reps, seed);
    draws.sort_by(f64::total_cmp);
    let unreachable = draws.iter().filter(|x| x.is_infinite()).count();
    Ok(DurationEstimate {
        point: Months::from_f64(sorted_quantile(&draws, 0.5)),
        interval_low: Months::from_f64(sorted_quantile(&draws, 0.5 * level)),
        interval_high: Months::from_f64(sorted_quantile(&draws, 1.0 - 0.5 * level)),
        method: Method::MonteCarlo,
        confidence: Some(1.0 - level),
        diagnostics: Diagnostics {
            replicates: Some(reps),
            unreachable_probability: Some(unreachable as f64 / reps as f64),
            bisection_iterations: None,
        },
    })
}

/// Estimator choice with its settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    Percentile,
    ExactMedian { level: f64 },
    MonteCarlo { reps: usize, level: f64, seed: u64 },
}

impl Default for Estimator {
    fn default() -> Self {
        Estimator::ExactMedian {
            level: DEFAULT_LEVEL,
        }
    }
}

impl Estimator {
    pub fn estimate(&self, spec: &TrialSpec) -> Result<DurationEstimate> {
        match *self {
            Estimator::Percentile => duration_percentile(spec),
            Estimator::ExactMedian { level } => duration_exact_median(spec, level),
            Estimator::MonteCarlo { reps, level, seed } => {
                duration_montecarlo(spec, reps, level, seed)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{EnrollmentBeta, SurvivalModel};

    fn arm(weight: f64, a: f64, beta: f64, median: f64, dropout: f64) -> SubgroupArm {
        SubgroupArm::new(
            weight,
            EnrollmentBeta::new(a, beta).unwrap(),
            SurvivalModel::exponential_median(median).unwrap(),
            (dropout > 0.0).then(|| SurvivalModel::exponential_rate(dropout).unwrap()),
        )
        .unwrap()
    }

    fn fast_accrual() -> TrialSpec {
        TrialSpec::new(
            140,
            88,
            vec![arm(0.5, 14.0, 1.0, 10.0, 0.0), arm(0.5, 14.0, 1.0, 20.0, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn spec_validation() {
        let arms = vec![arm(1.0, 14.0, 1.0, 10.0, 0.0)];
        assert!(TrialSpec::new(10, 0, arms.clone()).is_err());
        assert!(TrialSpec::new(10, 11, arms.clone()).is_err());
        assert!(TrialSpec::new(0, 0, arms.clone()).is_err());
        assert!(TrialSpec::new(10, 10, vec![arm(0.6, 14.0, 1.0, 10.0, 0.0)]).is_err());
        assert!(TrialSpec::new(10, 10, arms).is_ok());
    }

    #[test]
    fn instant_enrollment_percentile_is_survival_median() {
        let spec = TrialSpec::new(2, 1, vec![arm(1.0, 1e-6, 1.0, 10.0, 0.0)]).unwrap();
        let est = duration_percentile(&spec).unwrap();
        assert!((est.point.finite().unwrap() - 10.0).abs() < 1e-3);
        assert_eq!(est.method, Method::Percentile);
        assert_eq!(est.confidence, None);
    }

    #[test]
    fn heavy_censoring_is_unreachable() {
        // total mass = (ln2/10) / (ln2/10 + 0.5) ~ 0.12 < 88/140
        let spec = TrialSpec::new(140, 88, vec![arm(1.0, 14.0, 1.0, 10.0, 0.5)]).unwrap();
        assert!(duration_percentile(&spec).unwrap().point.is_unreachable());
        let exact = duration_exact_median(&spec, 0.05).unwrap();
        assert!(exact.point.is_unreachable());
        assert!(exact.interval_low.is_unreachable());
        let mc = duration_montecarlo(&spec, 200, 0.05, 1).unwrap();
        assert!(mc.point.is_unreachable());
        assert_eq!(mc.diagnostics.unreachable_probability, Some(1.0));
    }

    #[test]
    fn order_statistic_cdf_basics() {
        let single = TrialSpec::new(1, 1, vec![arm(1.0, 14.0, 1.0, 10.0, 0.0)]).unwrap();
        for &t in &[0.0, 3.0, 14.0, 40.0] {
            let f = single.event_time_cdf().eval(t).unwrap();
            assert!((order_statistic_cdf(&single, t).unwrap() - f).abs() < 1e-14);
        }
        let s1 = fast_accrual();
        assert_eq!(order_statistic_cdf(&s1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn order_statistic_cdf_symmetric_binomial() {
        // find t with F_T(t) = 0.5, then P(Bin(3, .5) >= 2) = .5
        let base = TrialSpec::new(3, 2, vec![arm(1.0, 14.0, 1.0, 10.0, 0.0)]).unwrap();
        let half = duration_percentile(&TrialSpec::new(2, 1, base.arms().to_vec()).unwrap())
            .unwrap()
            .point
            .finite()
            .unwrap();
        let v = order_statistic_cdf(&base, half).unwrap();
        assert!((v - 0.5).abs() < 1e-6);
    }

    #[test]
    fn order_statistic_monotone_in_t_and_d() {
        let s1 = fast_accrual();
        let cdf = s1.event_time_cdf();
        let mut prev = 0.0;
        for i in 0..200 {
            let t = i as f64 * 0.3;
            let v = order_statistic_cdf(&s1, t).unwrap();
            assert!(v >= prev);
            prev = v;
            let lower_d = s1.with_target_events(60).unwrap();
            assert!(order_statistic_cdf(&lower_d, t).unwrap() >= v);
            let first = s1.with_target_events(1).unwrap();
            let f = cdf.eval(t).unwrap();
            let direct = 1.0 - (1.0 - f).powi(140);
            assert!((order_statistic_cdf(&first, t).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn single_patient_exact_median_matches_percentile() {
        let arms = vec![arm(1.0, 14.0, 1.0, 10.0, 0.0)];
        let one = TrialSpec::new(1, 1, arms.clone()).unwrap();
        let exact = duration_exact_median(&one, 0.05).unwrap();
        let pct = duration_percentile(&TrialSpec::new(2, 1, arms).unwrap()).unwrap();
        let (e, p) = (exact.point.finite().unwrap(), pct.point.finite().unwrap());
        assert!((e - p).abs() < 2e-6);
    }

    #[test]
    fn exact_median_unreachable_when_reach_probability_small() {
        // total mass ~ 0.62; P(Bin(140, 0.62) >= 88) < 0.5
        let rate_v = std::f64::consts::LN_2 / 10.0;
        let rate_w = rate_v * (1.0 / 0.62 - 1.0);
        let spec = TrialSpec::new(140, 88, vec![arm(1.0, 14.0, 1.0, 10.0, rate_w)]).unwrap();
        assert!(order_statistic_reach_probability(&spec).unwrap() < 0.5);
        let est = duration_exact_median(&spec, 0.05).unwrap();
        assert!(est.point.is_unreachable());
        assert!(est.interval_high.is_unreachable());
    }

    #[test]
    fn exact_interval_brackets_point() {
        let est = duration_exact_median(&fast_accrual(), 0.05).unwrap();
        let (lo, mid, hi) = (
            est.interval_low.finite().unwrap(),
            est.point.finite().unwrap(),
            est.interval_high.finite().unwrap(),
        );
        assert!(lo < mid && mid < hi);
        assert_eq!(est.confidence, Some(0.95));
    }

    #[test]
    fn montecarlo_is_deterministic() {
        let s1 = fast_accrual();
        let a = duration_montecarlo(&s1, 500, 0.05, 42).unwrap();
        let b = duration_montecarlo(&s1, 500, 0.05, 42).unwrap();
        assert_eq!(a, b);
        let c = duration_montecarlo(&s1, 500, 0.05, 43).unwrap();
        assert_ne!(a.point, c.point);
    }

    #[test]
    fn montecarlo_rejects_bad_inputs() {
        let s1 = fast_accrual();
        assert!(duration_montecarlo(&s1, 99, 0.05, 1).is_err());
        assert!(duration_montecarlo(&s1, 1000, 0.0, 1).is_err());
        assert!(duration_montecarlo(&s1, 1000, 1.0, 1).is_err());
        assert!(duration_exact_median(&s1, 1.5).is_err());
    }

    #[test]
    fn montecarlo_single_patient_median() {
        let spec = TrialSpec::new(1, 1, vec![arm(1.0, 1e-6, 1.0, 10.0, 0.0)]).unwrap();
        let est = duration_montecarlo(&spec, 100_000, 0.05, 7).unwrap();
        let m = est.point.finite().unwrap();
        assert!((m - 10.0).abs() / 10.0 < 0.01, "median {m}");
    }

    #[test]
    fn montecarlo_tracks_exact_order_statistic_law() {
        let s1 = fast_accrual();
        let reps = 10_000;
        let draws = simulate_order_statistics(&s1, reps, 2024);
        for &t in &[24.0, 27.0, 30.0] {
            let p = order_statistic_cdf(&s1, t).unwrap();
            let emp = draws.iter().filter(|&&x| x <= t).count() as f64 / reps as f64;
            let sigma = (p * (1.0 - p) / reps as f64).sqrt();
            assert!((emp - p).abs() < 4.0 * sigma.max(1e-4), "t={t}: {emp} vs {p}");
        }
    }

    #[test]
    fn type7_quantile_with_infinity() {
        let v = [1.0, 2.0, 3.0, f64::INFINITY];
        assert_eq!(sorted_quantile(&v, 0.0), 1.0);
        assert!((sorted_quantile(&v, 0.5) - 2.5).abs() < 1e-15);
        assert!(sorted_quantile(&v, 0.9).is_infinite());
    }

    #[test]
    fn months_serialises_unreachable_as_string() {
        assert_eq!(serde_json::to_string(&Months::Unreachable).unwrap(), "\"unreachable\"");
        assert_eq!(serde_json::to_string(&Months::Finite(2.5)).unwrap(), "2.5");
    }
}
