//! Model components estimated from patient-level data, and re-assessment of
//! the actual study duration against the calculated one.
//!
//! Patient CSV columns: `enroll_time,followup_time,event,arm,subgroup`, with
//! times in months (enrollment measured from any common origin), `event` 1
//! for an observed event and 0 for a censored follow-up.

use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{EnrollmentBeta, SurvivalModel, WeibullModel};
use crate::duration::{duration_exact_median, Months, TrialSpec};
use crate::error::{Error, Result};
use crate::event_time::SubgroupArm;
use crate::numfmt::fmt_sig;

/// Gradient tolerance per event for the Weibull shape equation.
pub const WEIBULL_GRAD_TOL: f64 = 1e-10;
/// Relative margin added to the last enrollment time when the enrollment
/// period is not given.
pub const PERIOD_MARGIN: f64 = 1e-6;
const MAX_NEWTON_ITER: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatientRecord {
    pub enroll_time: f64,
    pub followup_time: f64,
    pub event: bool,
    pub arm: String,
    pub subgroup: String,
}

impl PatientRecord {
    /// Calendar time (same origin as `enroll_time`) at which follow-up ends.
    pub fn exit_time(&self) -> f64 {
        self.enroll_time + self.followup_time
    }
}

#[derive(Deserialize)]
struct RawRecord {
    enroll_time: f64,
    followup_time: f64,
    event: u8,
    arm: String,
    subgroup: String,
}

/// Reads patient records, rejecting negative or non-finite times and event
/// codes other than 0/1. Errors name the offending data line.
pub fn read_patient_csv<R: io::Read>(input: R) -> Result<Vec<PatientRecord>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let mut records = Vec::new();
    for (i, row) in reader.deserialize::<RawRecord>().enumerate() {
        let line = i + 2;
        let raw = row.map_err(|e| Error::Domain(format!("patient CSV line {line}: {e}")))?;
        for (name, v) in [("enroll_time", raw.enroll_time), ("followup_time", raw.followup_time)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Domain(format!(
                    "patient CSV line {line}: {name} must be a nonnegative number, got {v}"
                )));
            }
        }
        let event = match raw.event {
            0 => false,
            1 => true,
            e => {
                return Err(Error::Domain(format!(
                    "patient CSV line {line}: event must be 0 or 1, got {e}"
                )))
            }
        };
        records.push(PatientRecord {
            enroll_time: raw.enroll_time,
            followup_time: raw.followup_time,
            event,
            arm: raw.arm,
            subgroup: raw.subgroup,
        });
    }
    Ok(records)
}

/// Right-censored Weibull log-likelihood: log density at events plus log
/// survival at censoring times.
pub fn weibull_censored_loglik(obs: &[(f64, bool)], model: &WeibullModel) -> f64 {
    let (k, lam) = (model.shape(), model.scale());
    obs.iter()
        .map(|&(t, event)| {
            let z = t / lam;
            let cum_hazard = z.powf(k);
            if event {
                k.ln() - lam.ln() + (k - 1.0) * z.ln() - cum_hazard
            } else {
                -cum_hazard
            }
        })
        .sum()
}

/// Maximum-likelihood Weibull fit to `(time, event)` pairs.
///
/// Given the shape `k`, the scale has the closed form
/// `λ^k = Σ t^k / r` (r = number of events), which leaves the score equation
/// `r/k + Σ_events ln t − r·Σ t^k ln t / Σ t^k = 0`. Its left side is strictly
/// decreasing in `k`; it is solved by Newton steps kept inside a bracket,
/// bisecting whenever a step would leave it.
pub fn fit_weibull_censored(obs: &[(f64, bool)]) -> Result<WeibullModel> {
    let events = obs.iter().filter(|o| o.1).count();
    if events < 3 {
        return Err(Error::InsufficientData(format!(
            "Weibull fit needs at least 3 events, got {events}"
        )));
    }
    if let Some(&(t, _)) = obs.iter().find(|o| !(o.0.is_finite() && o.0 > 0.0)) {
        return Err(Error::Domain(format!(
            "Weibull fit needs positive finite times, got {t}"
        )));
    }
    // scale-free working times in (0, 1]
    let t_max = obs.iter().map(|o| o.0).fold(0.0, f64::max);
    let logs: Vec<f64> = obs.iter().map(|o| (o.0 / t_max).ln()).collect();
    let r = events as f64;
    let sum_event_logs: f64 = logs.iter().zip(obs).filter(|(_, o)| o.1).map(|(l, _)| l).sum();

    // score and its derivative in k
    let score = |k: f64| -> (f64, f64) {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for &l in &logs {
            let w = (k * l).exp();
            s0 += w;
            s1 += w * l;
            s2 += w * l * l;
        }
        let mean1 = s1 / s0;
        let g = r / k + sum_event_logs - r * mean1;
        let dg = -r / (k * k) - r * (s2 / s0 - mean1 * mean1);
        (g, dg)
    };
    let tol = WEIBULL_GRAD_TOL * r;

    let mut k = 1.0;
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut last = (f64::NAN, f64::NAN);
    for _ in 0..MAX_NEWTON_ITER {
        let (g, dg) = score(k);
        last = (k, g);
        if g.abs() <= tol {
            let scale = t_max * (logs.iter().map(|&l| (k * l).exp()).sum::<f64>() / r).powf(1.0 / k);
            return WeibullModel::new(k, scale);
        }
        if g > 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let newton = k - g / dg;
        k = if newton > lo && newton < hi && newton.is_finite() {
            newton
        } else if hi.is_finite() {
            0.5 * (lo + hi)
        } else {
            2.0 * k
        };
        if hi.is_finite() && (hi - lo) <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Err(Error::Numeric {
        what: "Weibull shape score equation",
        estimate: last.0,
        error: last.1,
    })
}

/// Maximum-likelihood `β` of the Beta(1, β) enrollment law on `(0, a)`:
/// `β̂ = −n / Σ ln(1 − u/a)`.
pub fn fit_enrollment_beta(enroll_times: &[f64], period_a: f64) -> Result<EnrollmentBeta> {
    if enroll_times.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "enrollment fit needs at least 2 times, got {}",
            enroll_times.len()
        )));
    }
    if !(period_a.is_finite() && period_a > 0.0) {
        return Err(Error::param("period_a", format!("must be positive and finite, got {period_a}")));
    }
    let mut log_sum = 0.0;
    for &u in enroll_times {
        if !(u >= 0.0 && u < period_a) {
            return Err(Error::Domain(format!(
                "enrollment time {u} outside [0, {period_a})"
            )));
        }
        log_sum += (-u / period_a).ln_1p();
    }
    if log_sum == 0.0 {
        return Err(Error::Domain(
            "all enrollment times are zero; the enrollment shape is unidentifiable".into(),
        ));
    }
    EnrollmentBeta::new(period_a, -(enroll_times.len() as f64) / log_sum)
}

/// One (arm, subgroup) cell of a fitted design.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FittedCell {
    pub arm: String,
    pub subgroup: String,
    pub patients: usize,
    pub events: usize,
    pub weight: f64,
    pub survival: WeibullModel,
}

/// Per-cell Weibull survival, a shared Beta(1, β) enrollment law and the
/// empirical cell weights of the records it was fitted on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FittedDesign {
    pub cells: Vec<FittedCell>,
    pub enrollment: EnrollmentBeta,
    /// Enrollment time of the first patient; the fitted design's time zero.
    pub origin: f64,
    pub n_used: usize,
}

impl FittedDesign {
    /// A trial of `n` patients targeting `d` events under this design.
    pub fn trial_spec(&self, n: u64, d: u64) -> Result<TrialSpec> {
        let arms = self
            .cells
            .iter()
            .map(|c| {
                Ok(SubgroupArm::new(
                    c.weight,
                    self.enrollment,
                    SurvivalModel::Weibull(c.survival),
                    None,
                )?
                .with_label(format!("{}/{}", c.arm, c.subgroup)))
            })
            .collect::<Result<Vec<_>>>()?;
        TrialSpec::new(n, d, arms)
    }
}

/// Fits every (arm, subgroup) cell and the enrollment law.
///
/// Enrollment times are measured from the first enrollment. Without an
/// explicit `period_a` the period is the last enrollment time inflated by
/// [`PERIOD_MARGIN`]. Cells are listed in order of first appearance.
pub fn fit_design(records: &[PatientRecord], period_a: Option<f64>) -> Result<FittedDesign> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no patient records".into()));
    }
    let origin = records.iter().map(|r| r.enroll_time).fold(f64::INFINITY, f64::min);
    let relative: Vec<f64> = records.iter().map(|r| r.enroll_time - origin).collect();
    let period_a = match period_a {
        Some(a) => a,
        None => {
            let last = relative.iter().copied().fold(0.0, f64::max);
            if last <= 0.0 {
                return Err(Error::Domain(
                    "all patients enrolled at the same time; cannot infer the enrollment period"
                        .into(),
                ));
            }
            last * (1.0 + PERIOD_MARGIN)
        }
    };
    let enrollment = fit_enrollment_beta(&relative, period_a)?;

    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in records {
        let key = (r.arm.as_str(), r.subgroup.as_str());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let n_used = records.len();
    let cells = keys
        .par_iter()
        .map(|&(arm, subgroup)| {
            let obs: Vec<(f64, bool)> = records
                .iter()
                .filter(|r| r.arm == arm && r.subgroup == subgroup)
                .map(|r| (r.followup_time, r.event))
                .collect();
            let survival = fit_weibull_censored(&obs).map_err(|e| match e {
                Error::InsufficientData(m) => {
                    Error::InsufficientData(format!("cell {arm}/{subgroup}: {m}"))
                }
                other => other,
            })?;
            Ok(FittedCell {
                arm: arm.to_string(),
                subgroup: subgroup.to_string(),
                patients: obs.len(),
                events: obs.iter().filter(|o| o.1).count(),
                weight: obs.len() as f64 / n_used as f64,
                survival,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FittedDesign {
        cells,
        enrollment,
        origin,
        n_used,
    })
}

/// The first `n` records by enrollment time, ties kept in input order,
/// optionally restricted to one subgroup.
pub fn hypothetical_trial(
    records: &[PatientRecord],
    subgroup_filter: Option<&str>,
    n: usize,
) -> Result<Vec<PatientRecord>> {
    let mut chosen: Vec<PatientRecord> = records
        .iter()
        .filter(|r| subgroup_filter.is_none_or(|s| r.subgroup == s))
        .cloned()
        .collect();
    if chosen.len() < n {
        return Err(Error::InsufficientData(format!(
            "need {n} patients{}, found {}",
            subgroup_filter.map(|s| format!(" in subgroup `{s}`")).unwrap_or_default(),
            chosen.len()
        )));
    }
    chosen.sort_by(|a, b| a.enroll_time.total_cmp(&b.enroll_time));
    chosen.truncate(n);
    Ok(chosen)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReassessFlag {
    Ok,
    /// Fewer than `d` events were observed in the data.
    Unobserved,
    /// The fitted model never reaches `d` events.
    Unreachable,
}

impl ReassessFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            ReassessFlag::Ok => "ok",
            ReassessFlag::Unobserved => "unobserved",
            ReassessFlag::Unreachable => "unreachable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReassessRow {
    pub d: u64,
    pub actual_months: Option<f64>,
    pub calculated_months: Months,
    pub flag: ReassessFlag,
}

/// Actual versus calculated duration of a hypothetical trial made of the
/// first `n` (filtered) patients.
///
/// The actual duration for `d` is the calendar time of the `d`-th observed
/// event minus the first enrollment. The calculated duration is the exact
/// order-statistic median under the design fitted to the same `n` patients.
pub fn reassess(
    records: &[PatientRecord],
    subgroup_filter: Option<&str>,
    n: usize,
    d_values: &[u64],
) -> Result<Vec<ReassessRow>> {
    if n == 0 {
        return Err(Error::Config("sample size n must be positive".into()));
    }
    if let Some(&d) = d_values.iter().find(|&&d| d == 0 || d > n as u64) {
        return Err(Error::Config(format!("target events d must satisfy 1 <= d <= n, got d={d}, n={n}")));
    }
    let trial = hypothetical_trial(records, subgroup_filter, n)?;
    let design = fit_design(&trial, None)?;
    let mut event_times: Vec<f64> = trial
        .iter()
        .filter(|r| r.event)
        .map(|r| r.exit_time() - design.origin)
        .collect();
    event_times.sort_by(f64::total_cmp);

    d_values
        .par_iter()
        .map(|&d| {
            let spec = design.trial_spec(n as u64, d)?;
            let calculated = duration_exact_median(&spec, crate::duration::DEFAULT_LEVEL)?.point;
            let actual = event_times.get(d as usize - 1).copied();
            let flag = match (actual, calculated) {
                (None, _) => ReassessFlag::Unobserved,
                (_, Months::Unreachable) => ReassessFlag::Unreachable,
                _ => ReassessFlag::Ok,
            };
            Ok(ReassessRow {
                d,
                actual_months: actual,
                calculated_months: calculated,
                flag,
            })
        })
        .collect()
}

/// CSV table `d,actual_months,calculated_months,flag`; missing values are
/// left empty.
pub fn write_reassess_csv<W: io::Write>(rows: &[ReassessRow], out: W) -> Result<()> {
    let io_err = |e: csv::Error| Error::Domain(format!("writing re-assessment CSV: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["d", "actual_months", "calculated_months", "flag"])
        .map_err(io_err)?;
    for row in rows {
        w.write_record([
            row.d.to_string(),
            row.actual_months.map(fmt_sig).unwrap_or_default(),
            row.calculated_months.finite().map(fmt_sig).unwrap_or_default(),
            row.flag.as_str().to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush()
        .map_err(|e| Error::Domain(format!("writing re-assessment CSV: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Continuous;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::LN_2;

    fn weibull_draws(shape: f64, scale: f64, n: usize, censor_max: Option<f64>, seed: u64) -> Vec<(f64, bool)> {
        let m = WeibullModel::new(shape, scale).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let t = m.quantile(rng.random::<f64>()).unwrap();
                match censor_max {
                    Some(c) => {
                        let c = rng.random_range(0.0..c);
                        if c < t { (c, false) } else { (t, true) }
                    }
                    None => (t, true),
                }
            })
            .collect()
    }

    #[test]
    fn recovers_exponential_data() {
        let obs = weibull_draws(1.0, 10.0, 500, None, 1);
        let fit = fit_weibull_censored(&obs).unwrap();
        assert!((0.85..=1.15).contains(&fit.shape()), "{fit:?}");
        assert!((fit.scale() - 10.0).abs() < 1.0, "{fit:?}");
    }

    #[test]
    fn recovers_censored_weibull() {
        // uniform censoring on (0, 15) censors about 30% of Weibull(2, 5)
        let obs = weibull_draws(2.0, 5.0, 500, Some(15.0), 2);
        let censored = obs.iter().filter(|o| !o.1).count() as f64 / 500.0;
        assert!((0.2..0.4).contains(&censored), "{censored}");
        let fit = fit_weibull_censored(&obs).unwrap();
        assert!((fit.shape() - 2.0).abs() < 0.2, "{fit:?}");
    }

    #[test]
    fn all_censored_is_insufficient() {
        let obs: Vec<_> = (1..20).map(|i| (i as f64, false)).collect();
        assert!(matches!(fit_weibull_censored(&obs), Err(Error::InsufficientData(_))));
        assert!(matches!(
            fit_weibull_censored(&[(1.0, true), (2.0, true), (3.0, false)]),
            Err(Error::InsufficientData(_))
        ));
        assert!(fit_weibull_censored(&[(1.0, true), (0.0, true), (3.0, true)]).is_err());
    }

    #[test]
    fn fit_is_a_local_maximum() {
        let obs = weibull_draws(1.6, 8.0, 300, Some(30.0), 3);
        let fit = fit_weibull_censored(&obs).unwrap();
        let best = weibull_censored_loglik(&obs, &fit);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..32 {
            let k = fit.shape() * rng.random_range(0.8..1.2);
            let s = fit.scale() * rng.random_range(0.8..1.2);
            let other = weibull_censored_loglik(&obs, &WeibullModel::new(k, s).unwrap());
            assert!(best >= other, "{best} < {other} at ({k}, {s})");
        }
    }

    #[test]
    fn fit_is_scale_equivariant() {
        let obs = weibull_draws(0.7, 3.0, 200, Some(20.0), 5);
        let a = fit_weibull_censored(&obs).unwrap();
        let scaled: Vec<_> = obs.iter().map(|&(t, e)| (t * 12.5, e)).collect();
        let b = fit_weibull_censored(&scaled).unwrap();
        assert!((a.shape() - b.shape()).abs() < 1e-9);
        assert!((b.scale() / a.scale() - 12.5).abs() < 1e-8);
    }

    #[test]
    fn enrollment_beta_identity() {
        // Σ ln(1 − u/a) = −n  ⇒  β̂ = 1
        let a = 10.0;
        let u = a * (1.0 - (-1.0f64).exp());
        let fit = fit_enrollment_beta(&[u, u, u], a).unwrap();
        assert!((fit.beta() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn enrollment_beta_recovery() {
        let truth = EnrollmentBeta::new(14.0, 0.45).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let times: Vec<f64> = (0..10_000).map(|_| truth.quantile(rng.random()).unwrap()).collect();
        let fit = fit_enrollment_beta(&times, 14.0).unwrap();
        assert!((fit.beta() / 0.45 - 1.0).abs() < 0.05, "{}", fit.beta());
    }

    #[test]
    fn enrollment_beta_preconditions() {
        assert!(matches!(fit_enrollment_beta(&[7.0], 14.0), Err(Error::InsufficientData(_))));
        assert!(matches!(fit_enrollment_beta(&[1.0, 14.0], 14.0), Err(Error::Domain(_))));
        assert!(matches!(fit_enrollment_beta(&[1.0, -0.5], 14.0), Err(Error::Domain(_))));
        assert!(matches!(fit_enrollment_beta(&[0.0, 0.0], 14.0), Err(Error::Domain(_))));
    }

    #[test]
    fn enrollment_beta_rescaling_invariance() {
        let times = [0.3, 2.0, 5.5, 9.1, 13.2];
        let b = fit_enrollment_beta(&times, 14.0).unwrap().beta();
        for c in [0.01, 3.0, 250.0] {
            let scaled: Vec<f64> = times.iter().map(|t| t * c).collect();
            let bc = fit_enrollment_beta(&scaled, 14.0 * c).unwrap().beta();
            assert!((bc - b).abs() < 1e-12 * b);
        }
    }

    fn record(enroll: f64, follow: f64, event: bool, arm: &str, subgroup: &str) -> PatientRecord {
        PatientRecord {
            enroll_time: enroll,
            followup_time: follow,
            event,
            arm: arm.into(),
            subgroup: subgroup.into(),
        }
    }

    #[test]
    fn csv_round_trip_and_validation() {
        let text = "enroll_time,followup_time,event,arm,subgroup\n0.5,3.25,1,placebo,pos\n1.0, 7.0 ,0,treatment,neg\n";
        let recs = read_patient_csv(text.as_bytes()).unwrap();
        assert_eq!(recs, vec![record(0.5, 3.25, true, "placebo", "pos"), record(1.0, 7.0, false, "treatment", "neg")]);
        let bad = "enroll_time,followup_time,event,arm,subgroup\n0.5,-1,1,p,x\n";
        let err = read_patient_csv(bad.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("followup_time"), "{err}");
        let bad = "enroll_time,followup_time,event,arm,subgroup\n0.5,1,2,p,x\n";
        assert!(read_patient_csv(bad.as_bytes()).unwrap_err().to_string().contains("event"));
        let bad = "enroll_time,followup_time\n0.5,1\n";
        assert!(read_patient_csv(bad.as_bytes()).is_err());
    }

    #[test]
    fn first_patients_in_stable_order() {
        let recs = vec![
            record(2.0, 1.0, true, "a", "x"),
            record(1.0, 1.0, true, "a", "y"),
            record(1.0, 2.0, true, "b", "x"),
            record(0.5, 1.0, true, "b", "x"),
        ];
        let t = hypothetical_trial(&recs, None, 3).unwrap();
        assert_eq!(t.iter().map(|r| (r.enroll_time, r.followup_time)).collect::<Vec<_>>(),
                   vec![(0.5, 1.0), (1.0, 1.0), (1.0, 2.0)]);
        let t = hypothetical_trial(&recs, Some("x"), 3).unwrap();
        assert!(t.iter().all(|r| r.subgroup == "x"));
        assert!(matches!(hypothetical_trial(&recs, Some("y"), 2), Err(Error::InsufficientData(_))));
    }

    /// Fast-accrual trial: 1:1 placebo/treatment, exponential medians 10
    /// and 20 months, uniform enrollment over 14 months, data cut at
    /// `cutoff` months after the first enrollment.
    fn synthetic_trial(n: usize, cutoff: f64, seed: u64) -> Vec<PatientRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let (arm, median) = if i % 2 == 0 { ("placebo", 10.0) } else { ("treatment", 20.0) };
                let u = rng.random_range(0.0..14.0);
                let v = -median / LN_2 * (1.0 - rng.random::<f64>()).ln();
                let window = cutoff - u;
                record(u, v.min(window), v <= window, arm, "all")
            })
            .collect()
    }

    #[test]
    fn full_event_dataset_actual_duration_is_last_exit() {
        let recs = synthetic_trial(40, 1e6, 7);
        let rows = reassess(&recs, None, 40, &[40]).unwrap();
        let first = recs.iter().map(|r| r.enroll_time).fold(f64::INFINITY, f64::min);
        let last_exit = recs.iter().map(|r| r.exit_time()).fold(0.0, f64::max);
        assert_eq!(rows[0].actual_months, Some(last_exit - first));
        assert_eq!(rows[0].flag, ReassessFlag::Ok);
    }

    #[test]
    fn unobserved_when_data_runs_out() {
        let recs = synthetic_trial(60, 16.0, 8);
        let events = recs.iter().filter(|r| r.event).count() as u64;
        let rows = reassess(&recs, None, 60, &[events, events + 1]).unwrap();
        assert_eq!(rows[0].flag, ReassessFlag::Ok);
        assert_eq!(rows[1].flag, ReassessFlag::Unobserved);
        assert_eq!(rows[1].actual_months, None);
        assert!(rows[1].calculated_months.finite().is_some());
        assert!(reassess(&recs, None, 60, &[61]).is_err());
    }

    #[test]
    fn fitted_design_weights_sum_to_one() {
        let recs = synthetic_trial(140, 60.0, 9);
        let design = fit_design(&recs, None).unwrap();
        assert_eq!(design.n_used, 140);
        assert_eq!(design.cells.len(), 2);
        let total: f64 = design.cells.iter().map(|c| c.weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(design.enrollment.period_a() > 13.0 && design.enrollment.period_a() < 14.0);
    }

    #[test]
    fn reassess_csv_layout() {
        let rows = vec![
            ReassessRow { d: 3, actual_months: Some(4.5), calculated_months: Months::Finite(5.0), flag: ReassessFlag::Ok },
            ReassessRow { d: 9, actual_months: None, calculated_months: Months::Unreachable, flag: ReassessFlag::Unobserved },
        ];
        let mut buf = Vec::new();
        write_reassess_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "d,actual_months,calculated_months,flag\n3,4.500000000,5.000000000,ok\n9,,,unobserved\n"
        );
    }
}
