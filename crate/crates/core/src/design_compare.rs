//! All-comers versus biomarker-enrichment designs.
//!
//! The closed forms cover a single-arm study on two exponential subgroups
//! with uniform enrollment and no drop-out. The all-comers trial enrolls the
//! whole population over `a` months. The enrichment trial enrolls the same
//! `n` biomarker-positive patients at the reduced rate `r1·n/a`, which takes
//! `a/r1` months. Anything more general goes through [`duration_difference`]
//! and [`heatmap`].

use std::fmt;
use std::io;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::distributions::{EnrollmentBeta, SurvivalModel};
use crate::duration::{DurationEstimate, Estimator, Months, TrialSpec};
use crate::error::{check_positive, Error, Result};
use crate::event_time::SubgroupArm;
use crate::heterogeneity::{build_allcomers_spec, build_enrichment_spec, BiomarkerSpec};
use crate::numfmt::fmt_sig;

/// Single-arm, two-subgroup comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareScenario {
    prevalence_r1: f64,
    lambda_pos: f64,
    lambda_neg: f64,
    period_a: f64,
    n: u64,
    d: u64,
}

impl CompareScenario {
    pub fn new(
        prevalence_r1: f64,
        lambda_pos: f64,
        lambda_neg: f64,
        period_a: f64,
        n: u64,
        d: u64,
    ) -> Result<Self> {
        if !(prevalence_r1 > 0.0 && prevalence_r1 <= 1.0) {
            return Err(Error::param(
                "prevalence_r1",
                format!("must lie in (0, 1], got {prevalence_r1}"),
            ));
        }
        if n == 0 || d == 0 || d > n {
            return Err(Error::Config(format!("need 1 <= d <= n, got d={d}, n={n}")));
        }
        Ok(Self {
            prevalence_r1,
            lambda_pos: check_positive("lambda_pos", lambda_pos)?,
            lambda_neg: check_positive("lambda_neg", lambda_neg)?,
            period_a: check_positive("period_a", period_a)?,
            n,
            d,
        })
    }

    pub fn prevalence(&self) -> f64 {
        self.prevalence_r1
    }

    pub fn lambda_pos(&self) -> f64 {
        self.lambda_pos
    }

    pub fn lambda_neg(&self) -> f64 {
        self.lambda_neg
    }

    pub fn period_a(&self) -> f64 {
        self.period_a
    }

    /// All-comers accrual, patients per month.
    pub fn enroll_rate(&self) -> f64 {
        self.n as f64 / self.period_a
    }

    /// Enrollment period of the enrichment trial.
    pub fn enrichment_period(&self) -> f64 {
        self.period_a / self.prevalence_r1
    }

    /// The all-comers design as a general [`TrialSpec`].
    pub fn allcomers_spec(&self) -> Result<TrialSpec> {
        let enrollment = EnrollmentBeta::uniform(self.period_a)?;
        let mut arms = vec![SubgroupArm::new(
            self.prevalence_r1,
            enrollment,
            SurvivalModel::exponential_rate(self.lambda_pos)?,
            None,
        )?
        .with_label("positive")];
        if self.prevalence_r1 < 1.0 {
            arms.push(
                SubgroupArm::new(
                    1.0 - self.prevalence_r1,
                    enrollment,
                    SurvivalModel::exponential_rate(self.lambda_neg)?,
                    None,
                )?
                .with_label("negative"),
            );
        }
        TrialSpec::new(self.n, self.d, arms)
    }

    /// The enrichment design as a general [`TrialSpec`].
    pub fn enrichment_spec(&self) -> Result<TrialSpec> {
        let arm = SubgroupArm::new(
            1.0,
            EnrollmentBeta::uniform(self.enrichment_period())?,
            SurvivalModel::exponential_rate(self.lambda_pos)?,
            None,
        )?
        .with_label("positive");
        TrialSpec::new(self.n, self.d, vec![arm])
    }
}

/// `(1 − e^{−λx}) / λ` without cancellation.
fn exposure(lambda: f64, x: f64) -> f64 {
    -(-lambda * x).exp_m1() / lambda
}

/// Event-time CDF of one exponential subgroup enrolled uniformly on `(0, a)`.
fn uniform_exponential_cdf(a: f64, lambda: f64, t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t <= a {
        (t - exposure(lambda, t)) / a
    } else {
        1.0 - (-lambda * (t - a)).exp() * exposure(lambda, a) / a
    }
}

/// CDF of the all-comers event time at `t`.
pub fn cdf_allcomers(s: &CompareScenario, t: f64) -> f64 {
    let r1 = s.prevalence_r1;
    r1 * uniform_exponential_cdf(s.period_a, s.lambda_pos, t)
        + (1.0 - r1) * uniform_exponential_cdf(s.period_a, s.lambda_neg, t)
}

/// CDF of the enrichment event time at `t`.
pub fn cdf_enrichment(s: &CompareScenario, t: f64) -> f64 {
    uniform_exponential_cdf(s.enrichment_period(), s.lambda_pos, t)
}

/// `cdf_enrichment − cdf_allcomers` via the three-branch formula: both
/// trials enrolling, only the enrichment trial enrolling, neither. Branch
/// end points belong to the branch on their left.
pub fn cdf_difference_piecewise(s: &CompareScenario, t: f64) -> f64 {
    let (r1, a, l1, l2) = (s.prevalence_r1, s.period_a, s.lambda_pos, s.lambda_neg);
    let r2 = 1.0 - r1;
    if t <= 0.0 {
        return 0.0;
    }
    // (e^{−λ(t−a)} − e^{−λt}) / λ, the negatives' post-enrollment term
    let negatives_tail = (-l2 * (t - a)).exp() * exposure(l2, a);
    if t <= a {
        r2 / a * (exposure(l2, t) - t)
    } else if t <= a / r1 {
        -r2 + r1 / a * ((t - a) - exposure(l1, t - a)) + r2 / a * negatives_tail
    } else {
        post_enrollment_positive_term(r1, l1, a, t) + r2 / a * negatives_tail
    }
}

/// First term of the last branch, `(r1/a)(e^{−λ1(t−a)} − e^{−λ1(t−a/r1)})/λ1`,
/// which is `<= 0` and nondecreasing in both `r1` and `λ1` for `t >= a/r1`.
pub fn post_enrollment_positive_term(r1: f64, lambda_pos: f64, a: f64, t: f64) -> f64 {
    // e^{−λ(t−a)} − e^{−λ(t−a/r1)} = e^{−λ(t−a/r1)}·(e^{−λ(a/r1−a)} − 1)
    let gap = a / r1 - a;
    r1 / a * (-lambda_pos * (t - a / r1)).exp() * (-lambda_pos * gap).exp_m1() / lambda_pos
}

/// Signed duration difference, or no number at all when a design never
/// reaches its target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Difference {
    Months(f64),
    Incomparable,
}

impl Difference {
    pub fn months(self) -> Option<f64> {
        match self {
            Difference::Months(v) => Some(v),
            Difference::Incomparable => None,
        }
    }
}

impl Serialize for Difference {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Difference::Months(v) => s.serialize_f64(*v),
            Difference::Incomparable => s.serialize_str("incomparable"),
        }
    }
}

/// Both estimates and their difference (all-comers minus enrichment;
/// positive means the enrichment trial finishes first).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignComparison {
    pub allcomers: DurationEstimate,
    pub enrichment: DurationEstimate,
    pub difference: Difference,
}

/// Runs the same estimator on both designs.
pub fn compare_designs(
    allcomers: &TrialSpec,
    enrichment: &TrialSpec,
    estimator: Estimator,
) -> Result<DesignComparison> {
    if allcomers.n() != enrichment.n() || allcomers.d() != enrichment.d() {
        return Err(Error::Config(format!(
            "designs must share n and d: all-comers (n={}, d={}), enrichment (n={}, d={})",
            allcomers.n(),
            allcomers.d(),
            enrichment.n(),
            enrichment.d()
        )));
    }
    let a = estimator.estimate(allcomers)?;
    let e = estimator.estimate(enrichment)?;
    let difference = match (a.point, e.point) {
        (Months::Finite(x), Months::Finite(y)) => Difference::Months(x - y),
        _ => Difference::Incomparable,
    };
    Ok(DesignComparison {
        allcomers: a,
        enrichment: e,
        difference,
    })
}

/// `duration(allcomers) − duration(enrichment)`.
pub fn duration_difference(
    allcomers: &TrialSpec,
    enrichment: &TrialSpec,
    estimator: Estimator,
) -> Result<Difference> {
    Ok(compare_designs(allcomers, enrichment, estimator)?.difference)
}

/// Scenario parameters a heatmap axis may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatmapParam {
    Prevalence,
    HazardRatio,
    EnrollRate,
    MstPbo,
}

impl HeatmapParam {
    pub const ALL: [HeatmapParam; 4] = [
        HeatmapParam::Prevalence,
        HeatmapParam::HazardRatio,
        HeatmapParam::EnrollRate,
        HeatmapParam::MstPbo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HeatmapParam::Prevalence => "prevalence",
            HeatmapParam::HazardRatio => "hazard_ratio",
            HeatmapParam::EnrollRate => "enroll_rate",
            HeatmapParam::MstPbo => "mst_pbo",
        }
    }
}

impl fmt::Display for HeatmapParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeatmapParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HeatmapParam::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown heatmap parameter `{s}` (expected prevalence, hazard_ratio, enroll_rate or mst_pbo)"
                ))
            })
    }
}

/// The all-comers setting every heatmap cell starts from: a 1:1 randomised
/// trial with a prognostic biomarker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatmapBase {
    pub n: u64,
    pub d: u64,
    pub enroll_rate: f64,
    pub mst_pbo: f64,
    pub treatment_hr: f64,
    pub prevalence: f64,
    pub hazard_ratio: f64,
}

impl HeatmapBase {
    pub fn with(mut self, param: HeatmapParam, value: f64) -> Self {
        match param {
            HeatmapParam::Prevalence => self.prevalence = value,
            HeatmapParam::HazardRatio => self.hazard_ratio = value,
            HeatmapParam::EnrollRate => self.enroll_rate = value,
            HeatmapParam::MstPbo => self.mst_pbo = value,
        }
        self
    }

    /// (all-comers, enrichment) specs.
    pub fn specs(&self) -> Result<(TrialSpec, TrialSpec)> {
        let b = BiomarkerSpec::new(self.prevalence, self.hazard_ratio)?;
        let args = (self.n, self.d, self.enroll_rate, self.mst_pbo, self.treatment_hr);
        Ok((
            build_allcomers_spec(args.0, args.1, args.2, args.3, args.4, &b)?,
            build_enrichment_spec(args.0, args.1, args.2, args.3, args.4, &b)?,
        ))
    }

    pub fn difference(&self, estimator: Estimator) -> Result<Difference> {
        let (all, enr) = self.specs()?;
        duration_difference(&all, &enr, estimator)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub param: HeatmapParam,
    pub values: Vec<f64>,
}

/// A point on the interpolated zero-difference boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub x: f64,
    pub y: f64,
}

/// Duration differences on an `x × y` grid.
///
/// `cells` is row-major with one row per `y` value:
/// `cells[iy * x.values.len() + ix]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapGrid {
    pub x: Axis,
    pub y: Axis,
    pub cells: Vec<Difference>,
    pub boundary: Vec<BoundaryPoint>,
}

impl HeatmapGrid {
    pub fn cell(&self, ix: usize, iy: usize) -> Difference {
        self.cells[iy * self.x.values.len() + ix]
    }

    /// CSV with header `<x param>,<y param>,diff_months,status`; the
    /// difference is left empty when `status` is `incomparable`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io_err = |e: csv::Error| Error::Domain(format!("writing heatmap CSV: {e}"));
        w.write_record([self.x.param.name(), self.y.param.name(), "diff_months", "status"])
            .map_err(io_err)?;
        for (iy, &y) in self.y.values.iter().enumerate() {
            for (ix, &x) in self.x.values.iter().enumerate() {
                let (diff, status) = match self.cell(ix, iy) {
                    Difference::Months(v) => (fmt_sig(v), "ok"),
                    Difference::Incomparable => (String::new(), "incomparable"),
                };
                w.write_record([fmt_sig(x), fmt_sig(y), diff, status.to_string()])
                    .map_err(io_err)?;
            }
        }
        w.flush()
            .map_err(|e| Error::Domain(format!("writing heatmap CSV: {e}")))?;
        Ok(())
    }
}

/// For each column (fixed `x`), the first sign change of the difference
/// going up the `y` axis, located by linear interpolation. Incomparable
/// cells break the scan.
fn extract_boundary(x: &[f64], y: &[f64], cells: &[Difference]) -> Vec<BoundaryPoint> {
    let nx = x.len();
    let mut boundary = Vec::new();
    for (ix, &xv) in x.iter().enumerate() {
        for iy in 0..y.len().saturating_sub(1) {
            let (Some(d0), Some(d1)) = (cells[iy * nx + ix].months(), cells[(iy + 1) * nx + ix].months())
            else {
                continue;
            };
            if d0 == 0.0 {
                boundary.push(BoundaryPoint { x: xv, y: y[iy] });
                break;
            }
            if d0 * d1 < 0.0 || d1 == 0.0 {
                let w = d0 / (d0 - d1);
                boundary.push(BoundaryPoint {
                    x: xv,
                    y: y[iy] + w * (y[iy + 1] - y[iy]),
                });
                break;
            }
        }
    }
    boundary
}

/// Evaluates [`HeatmapBase::difference`] over the full grid in parallel.
pub fn heatmap(
    base: &HeatmapBase,
    x_param: HeatmapParam,
    x_values: &[f64],
    y_param: HeatmapParam,
    y_values: &[f64],
    estimator: Estimator,
) -> Result<HeatmapGrid> {
    if x_values.is_empty() || y_values.is_empty() {
        return Err(Error::Config("heatmap axes must be nonempty".into()));
    }
    if x_param == y_param {
        return Err(Error::Config(format!(
            "heatmap axes must differ, both are `{x_param}`"
        )));
    }
    let nx = x_values.len();
    let cells = (0..nx * y_values.len())
        .into_par_iter()
        .map(|i| {
            base.with(x_param, x_values[i % nx])
                .with(y_param, y_values[i / nx])
                .difference(estimator)
        })
        .collect::<Result<Vec<_>>>()?;
    let boundary = extract_boundary(x_values, y_values, &cells);
    Ok(HeatmapGrid {
        x: Axis {
            param: x_param,
            values: x_values.to_vec(),
        },
        y: Axis {
            param: y_param,
            values: y_values.to_vec(),
        },
        cells,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duration::{duration_exact_median, duration_percentile};
    use crate::event_time::{cdf_closed_form, mixture_cdf};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::LN_2;

    fn scenario(r1: f64, l1: f64, l2: f64, a: f64) -> CompareScenario {
        CompareScenario::new(r1, l1, l2, a, 140, 88).unwrap()
    }

    fn random_scenario(rng: &mut ChaCha8Rng) -> CompareScenario {
        scenario(
            rng.random_range(0.05..1.0),
            rng.random_range(0.005..0.5),
            rng.random_range(0.005..0.5),
            rng.random_range(1.0..40.0),
        )
    }

    /// Literal transcription of the max/min form of the two CDFs.
    fn textbook_difference(s: &CompareScenario, t: f64) -> f64 {
        let (r1, a, l1, l2) = (s.prevalence(), s.period_a(), s.lambda_pos(), s.lambda_neg());
        let fa = 1.0
            - (1.0 - t / a).max(0.0)
            - r1 * (-l1 * t).exp() / (a * l1) * ((l1 * a.min(t)).exp() - 1.0)
            - (1.0 - r1) * (-l2 * t).exp() / (a * l2) * ((l2 * a.min(t)).exp() - 1.0);
        let fe = 1.0
            - (1.0 - r1 * t / a).max(0.0)
            - r1 * (-l1 * t).exp() / (a * l1) * ((l1 * (a / r1).min(t)).exp() - 1.0);
        fe - fa
    }

    #[test]
    fn scenario_validation() {
        assert!(CompareScenario::new(0.0, 0.1, 0.1, 10.0, 10, 5).is_err());
        assert!(CompareScenario::new(1.2, 0.1, 0.1, 10.0, 10, 5).is_err());
        assert!(CompareScenario::new(0.5, 0.0, 0.1, 10.0, 10, 5).is_err());
        assert!(CompareScenario::new(0.5, 0.1, 0.1, -1.0, 10, 5).is_err());
        assert!(CompareScenario::new(0.5, 0.1, 0.1, 10.0, 10, 11).is_err());
        assert!(CompareScenario::new(1.0, 0.1, 0.1, 10.0, 10, 5).is_ok());
    }

    #[test]
    fn cdfs_vanish_at_zero() {
        let s = scenario(0.4, 0.1, 0.03, 14.0);
        assert_eq!(cdf_allcomers(&s, 0.0), 0.0);
        assert_eq!(cdf_enrichment(&s, 0.0), 0.0);
        assert_eq!(cdf_difference_piecewise(&s, 0.0), 0.0);
    }

    #[test]
    fn equal_hazards_collapse_to_single_population() {
        let s = scenario(0.3, 0.07, 0.07, 14.0);
        let single = SubgroupArm::new(
            1.0,
            EnrollmentBeta::uniform(14.0).unwrap(),
            SurvivalModel::exponential_rate(0.07).unwrap(),
            None,
        )
        .unwrap();
        for t in [1.0, 7.0, 14.0, 20.0, 60.0] {
            let want = cdf_closed_form(&single, t).unwrap();
            assert!((cdf_allcomers(&s, t) - want).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn allcomers_matches_general_mixture() {
        let s = scenario(0.5, LN_2 / 5.0, LN_2 / 15.0, 14.0);
        let spec = s.allcomers_spec().unwrap();
        for t in [20.0, 3.0, 14.0, 45.0] {
            let general = mixture_cdf(spec.arms(), t).unwrap();
            assert!((cdf_allcomers(&s, t) - general).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn enrichment_matches_stretched_single_arm() {
        let s = scenario(0.4, LN_2 / 8.0, 0.1, 14.0);
        let arm = SubgroupArm::new(
            1.0,
            EnrollmentBeta::uniform(35.0).unwrap(),
            SurvivalModel::exponential_rate(LN_2 / 8.0).unwrap(),
            None,
        )
        .unwrap();
        for t in [40.0, 5.0, 35.0, 80.0] {
            let want = cdf_closed_form(&arm, t).unwrap();
            assert!((cdf_enrichment(&s, t) - want).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn full_prevalence_makes_designs_identical() {
        let s = scenario(1.0, 0.09, 0.02, 10.0);
        for t in [0.5, 5.0, 10.0, 10.5, 30.0] {
            assert_eq!(cdf_difference_piecewise(&s, t), 0.0, "t={t}");
            assert!((cdf_enrichment(&s, t) - cdf_allcomers(&s, t)).abs() < 1e-15);
        }
        let (all, enr) = (s.allcomers_spec().unwrap(), s.enrichment_spec().unwrap());
        let diff = duration_difference(&all, &enr, Estimator::default()).unwrap();
        assert_eq!(diff, Difference::Months(0.0));
    }

    #[test]
    fn piecewise_matches_direct_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let s = random_scenario(&mut rng);
            let t = rng.random_range(0.0..3.0 * s.enrichment_period());
            let direct = cdf_enrichment(&s, t) - cdf_allcomers(&s, t);
            let textbook = textbook_difference(&s, t);
            let piecewise = cdf_difference_piecewise(&s, t);
            assert!((piecewise - direct).abs() < 1e-10, "{s:?} t={t}");
            assert!((piecewise - textbook).abs() < 1e-10, "{s:?} t={t}");
        }
    }

    #[test]
    fn enrichment_is_behind_while_both_enroll() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..500 {
            let s = random_scenario(&mut rng);
            if s.prevalence() >= 1.0 {
                continue;
            }
            let t = rng.random_range(0.0..1.0) * s.period_a();
            if t == 0.0 {
                continue;
            }
            assert!(cdf_difference_piecewise(&s, t) < 0.0, "{s:?} t={t}");
        }
    }

    #[test]
    fn branches_join_continuously() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let s = random_scenario(&mut rng);
            for knot in [s.period_a(), s.enrichment_period()] {
                let h = 1e-12 * knot;
                let left = cdf_difference_piecewise(&s, knot - h);
                let right = cdf_difference_piecewise(&s, knot + h);
                assert!((left - right).abs() < 1e-9, "{s:?} knot={knot}");
                let at = cdf_difference_piecewise(&s, knot);
                assert!((at - left).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn first_inequality() {
        // (1 − e^{−bx})/b − x < 0 for x > 0
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..10_000 {
            let b = rng.random_range(1e-3..20.0);
            let x = rng.random_range(1e-6..50.0);
            assert!(exposure(b, x) - x < 0.0, "b={b} x={x}");
        }
        assert_eq!(exposure(2.0, 0.0), 0.0);
    }

    #[test]
    fn second_inequality() {
        // f(x) = (e^{−bx} − e^{−cx})/x: bounded by 0 and c − b, monotone
        // toward 0 as x grows
        let f = |b: f64, c: f64, x: f64| ((-b * x).exp() - (-c * x).exp()) / x;
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..10_000 {
            let b: f64 = rng.random_range(1e-2..5.0);
            let c: f64 = rng.random_range(1e-2..5.0);
            if (b - c).abs() < 1e-6 {
                continue;
            }
            let x = rng.random_range(1e-4..10.0);
            let v = f(b, c, x);
            let lo = (c - b).min(0.0);
            let hi = (c - b).max(0.0);
            assert!(v > lo && v < hi, "b={b} c={c} x={x} f={v}");
            let step = 1e-3 * x;
            let ahead = f(b, c, x + step);
            if b > c {
                assert!(ahead >= v, "b={b} c={c} x={x}");
            } else {
                assert!(ahead <= v, "b={b} c={c} x={x}");
            }
        }
    }

    #[test]
    fn late_positive_term_grows_with_prevalence_and_hazard() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..1000 {
            let r1 = rng.random_range(0.05..0.95);
            let l1 = rng.random_range(0.005..1.0);
            let a = rng.random_range(1.0..30.0);
            let t = a / r1 + rng.random_range(0.0..50.0);
            let v = post_enrollment_positive_term(r1, l1, a, t);
            assert!(v <= 0.0);
            let h = 1e-4;
            assert!(post_enrollment_positive_term(r1 + h * r1, l1, a, t) >= v, "r1={r1} l1={l1}");
            assert!(post_enrollment_positive_term(r1, l1 * (1.0 + h), a, t) >= v, "r1={r1} l1={l1}");
        }
    }

    #[test]
    fn sign_of_difference_tracks_cdf_at_completion() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        while checked < 50 {
            let s = random_scenario(&mut rng);
            let (all, enr) = (s.allcomers_spec().unwrap(), s.enrichment_spec().unwrap());
            let diff = duration_difference(&all, &enr, Estimator::Percentile).unwrap();
            let Some(diff) = diff.months() else { continue };
            if diff.abs() < 1e-3 {
                continue;
            }
            let t_e = duration_percentile(&enr).unwrap().point.as_f64();
            let faster = cdf_enrichment(&s, t_e) > cdf_allcomers(&s, t_e);
            assert_eq!(diff > 0.0, faster, "{s:?}");
            checked += 1;
        }
    }

    #[test]
    fn mismatched_designs_rejected() {
        let s = scenario(0.5, 0.1, 0.05, 14.0);
        let all = s.allcomers_spec().unwrap();
        let enr = s.enrichment_spec().unwrap().with_target_events(50).unwrap();
        assert!(matches!(
            duration_difference(&all, &enr, Estimator::Percentile),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn identical_specs_have_zero_difference() {
        let s = scenario(0.5, 0.1, 0.05, 14.0);
        let all = s.allcomers_spec().unwrap();
        for est in [
            Estimator::Percentile,
            Estimator::default(),
            Estimator::MonteCarlo {
                reps: 200,
                level: 0.05,
                seed: 3,
            },
        ] {
            assert_eq!(duration_difference(&all, &all, est).unwrap(), Difference::Months(0.0));
        }
    }

    #[test]
    fn slow_enrollment_favours_allcomers() {
        // 2 patients a month: the all-comers trial reaches d = 30 well before
        // its 70-month enrollment ends
        let s = CompareScenario::new(0.5, LN_2 / 5.0, LN_2 / 15.0, 70.0, 140, 30).unwrap();
        let (all, enr) = (s.allcomers_spec().unwrap(), s.enrichment_spec().unwrap());
        let t_a = duration_exact_median(&all, 0.05).unwrap().point.as_f64();
        assert!(t_a < s.period_a());
        assert!(cdf_difference_piecewise(&s, t_a) < 0.0);
        let diff = duration_difference(&all, &enr, Estimator::default()).unwrap();
        assert!(diff.months().unwrap() < 0.0);
    }

    fn enrichment_cell_base() -> HeatmapBase {
        HeatmapBase {
            n: 140,
            d: 88,
            enroll_rate: 20.0,
            mst_pbo: 15.0,
            treatment_hr: 0.5,
            prevalence: 0.3,
            hazard_ratio: 2.0,
        }
    }

    #[test]
    fn mild_biomarker_with_fast_accrual_favours_enrichment() {
        let base = enrichment_cell_base();
        let d = base.difference(Estimator::default()).unwrap().months().unwrap();
        assert!(d > 0.0, "{d}");
        let null = base.with(HeatmapParam::HazardRatio, 1.0);
        let d = null.difference(Estimator::default()).unwrap().months().unwrap();
        assert!(d < 0.0, "{d}");
    }

    #[test]
    fn null_biomarker_grid_is_all_negative() {
        let grid = heatmap(
            &enrichment_cell_base().with(HeatmapParam::HazardRatio, 1.0),
            HeatmapParam::Prevalence,
            &[0.2, 0.5, 0.8],
            HeatmapParam::EnrollRate,
            &[7.0, 20.0],
            Estimator::default(),
        )
        .unwrap();
        assert_eq!(grid.cells.len(), 6);
        assert!(grid.cells.iter().all(|c| c.months().unwrap() < 0.0));
        assert!(grid.boundary.is_empty());
    }

    #[test]
    fn one_cell_grid_is_one_comparison() {
        let base = enrichment_cell_base();
        let grid = heatmap(
            &base,
            HeatmapParam::Prevalence,
            &[0.3],
            HeatmapParam::HazardRatio,
            &[2.0],
            Estimator::default(),
        )
        .unwrap();
        assert_eq!(grid.cells, vec![base.difference(Estimator::default()).unwrap()]);
    }

    #[test]
    fn grid_layout_and_boundary() {
        let xs = [0.2, 0.5];
        let ys = [1.0, 2.0, 4.0];
        let grid = heatmap(
            &enrichment_cell_base(),
            HeatmapParam::Prevalence,
            &xs,
            HeatmapParam::HazardRatio,
            &ys,
            Estimator::default(),
        )
        .unwrap();
        for (iy, &y) in ys.iter().enumerate() {
            for (ix, &x) in xs.iter().enumerate() {
                let want = enrichment_cell_base()
                    .with(HeatmapParam::Prevalence, x)
                    .with(HeatmapParam::HazardRatio, y)
                    .difference(Estimator::default())
                    .unwrap();
                assert_eq!(grid.cell(ix, iy), want);
            }
        }
        for p in &grid.boundary {
            let ix = xs.iter().position(|&x| x == p.x).unwrap();
            let iy = ys.iter().rposition(|&y| y <= p.y).unwrap();
            let lo = grid.cell(ix, iy).months().unwrap();
            let hi = grid.cell(ix, iy + 1).months().unwrap();
            assert!(lo * hi <= 0.0);
            let w = (p.y - ys[iy]) / (ys[iy + 1] - ys[iy]);
            assert!((lo + w * (hi - lo)).abs() < 1e-9);
        }
    }

    #[test]
    fn boundary_skips_incomparable_cells() {
        let cells = vec![
            Difference::Months(-1.0),
            Difference::Incomparable,
            Difference::Months(1.0),
        ];
        assert!(extract_boundary(&[0.0], &[1.0, 2.0, 3.0], &cells).is_empty());
        let cells = vec![Difference::Months(-1.0), Difference::Months(3.0)];
        let b = extract_boundary(&[0.5], &[1.0, 2.0], &cells);
        assert_eq!(b, vec![BoundaryPoint { x: 0.5, y: 1.25 }]);
    }

    #[test]
    fn heatmap_rejects_bad_axes() {
        let base = enrichment_cell_base();
        let e = Estimator::default();
        use HeatmapParam::*;
        assert!(heatmap(&base, Prevalence, &[], HazardRatio, &[1.0], e).is_err());
        assert!(heatmap(&base, Prevalence, &[0.2], Prevalence, &[0.3], e).is_err());
        assert!(heatmap(&base, Prevalence, &[1.5], HazardRatio, &[1.0], e).is_err());
        assert_eq!("mst_pbo".parse::<HeatmapParam>().unwrap(), MstPbo);
        assert!("rate".parse::<HeatmapParam>().is_err());
    }

    #[test]
    fn csv_layout() {
        let grid = HeatmapGrid {
            x: Axis {
                param: HeatmapParam::EnrollRate,
                values: vec![7.0, 10.0],
            },
            y: Axis {
                param: HeatmapParam::MstPbo,
                values: vec![7.5],
            },
            cells: vec![Difference::Months(-1.5), Difference::Incomparable],
            boundary: vec![],
        };
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "enroll_rate,mst_pbo,diff_months,status");
        assert_eq!(lines[1], "7.000000000,7.500000000,-1.500000000,ok");
        assert_eq!(lines[2], "10.00000000,7.500000000,,incomparable");
        let json = serde_json::to_value(&grid).unwrap();
        assert_eq!(json["cells"][1], "incomparable");
        assert_eq!(json["x"]["param"], "enroll_rate");
    }

    proptest! {
        #[test]
        fn difference_bounded_by_unit_interval(
            r1 in 0.05f64..1.0, l1 in 0.01f64..1.0, l2 in 0.01f64..1.0,
            a in 1.0f64..30.0, frac in 0.0f64..4.0,
        ) {
            let s = scenario(r1, l1, l2, a);
            let t = frac * s.enrichment_period();
            let d = cdf_difference_piecewise(&s, t);
            prop_assert!(d.abs() <= 1.0);
            prop_assert!((0.0..=1.0).contains(&cdf_allcomers(&s, t)));
            prop_assert!((0.0..=1.0).contains(&cdf_enrichment(&s, t)));
        }
    }
}
