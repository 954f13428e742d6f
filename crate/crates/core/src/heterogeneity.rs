//! Biomarker-mixture scenarios.
//!
//! An arm whose overall median survival is `MST` is split into a
//! biomarker-positive fraction `q` with hazard `HR` times that of the
//! negatives. With exponential subgroups the negative median `m` solves
//!
//! ```text
//! q·exp(−ln2·HR·MST/m) + (1−q)·exp(−ln2·MST/m) = 1/2
//! ```
//!
//! and the positive median is `m / HR`. The biomarker is prognostic: the
//! same `HR` applies in both treatment arms.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::distributions::{EnrollmentBeta, SurvivalModel};
use crate::duration::TrialSpec;
use crate::error::{check_positive, Error, Result};
use crate::event_time::SubgroupArm;

pub const DEFAULT_TREATMENT_HR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiomarkerSpec {
    prevalence_q: f64,
    hr_pos: f64,
    prognostic: bool,
}

impl BiomarkerSpec {
    /// `0 < prevalence <= 1`; prevalence 1 is the whole population.
    pub fn new(prevalence_q: f64, hr_pos: f64) -> Result<Self> {
        if !(prevalence_q > 0.0 && prevalence_q <= 1.0) {
            return Err(Error::param(
                "prevalence",
                format!("must lie in (0, 1], got {prevalence_q}"),
            ));
        }
        Ok(Self {
            prevalence_q,
            hr_pos: check_positive("hazard_ratio", hr_pos)?,
            prognostic: true,
        })
    }

    /// No biomarker effect.
    pub fn null(prevalence_q: f64) -> Result<Self> {
        Self::new(prevalence_q, 1.0)
    }

    pub fn prevalence(&self) -> f64 {
        self.prevalence_q
    }

    pub fn hazard_ratio(&self) -> f64 {
        self.hr_pos
    }

    pub fn is_prognostic(&self) -> bool {
        self.prognostic
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubgroupMedians {
    pub mst_neg: f64,
    pub mst_pos: f64,
}

/// Survival of the two-subgroup exponential mixture at `overall_mst`, minus 1/2,
/// when the negative subgroup has median `mst_neg`.
pub fn mixture_median_residual(overall_mst: f64, biomarker: &BiomarkerSpec, mst_neg: f64) -> f64 {
    let x = overall_mst / mst_neg;
    let q = biomarker.prevalence_q;
    q * (-LN_2 * biomarker.hr_pos * x).exp() + (1.0 - q) * (-LN_2 * x).exp() - 0.5
}

/// Negative/positive subgroup medians reproducing `overall_mst` as the
/// mixture median.
pub fn solve_subgroup_medians(
    overall_mst: f64,
    biomarker: &BiomarkerSpec,
) -> Result<SubgroupMedians> {
    check_positive("overall_mst", overall_mst)?;
    let q = biomarker.prevalence_q;
    let hr = biomarker.hr_pos;
    // work in x = MST / m; the residual is strictly decreasing in x
    let resid = |x: f64| q * (-LN_2 * hr * x).exp() + (1.0 - q) * (-LN_2 * x).exp() - 0.5;
    let (mut lo, mut hi) = (1e-3, 1e3);
    let mut expansions = 0;
    while resid(lo) < 0.0 || resid(hi) > 0.0 {
        if resid(lo) < 0.0 {
            lo *= 1e-3;
        }
        if resid(hi) > 0.0 {
            hi *= 1e3;
        }
        expansions += 1;
        if expansions > 50 {
            return Err(Error::Numeric {
                what: "subgroup median bracket",
                estimate: overall_mst / hi,
                error: hi - lo,
            });
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if resid(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = if resid(lo).abs() <= resid(hi).abs() { lo } else { hi };
    let mst_neg = overall_mst / x;
    Ok(SubgroupMedians {
        mst_neg,
        mst_pos: mst_neg / hr,
    })
}

fn check_design_inputs(n: u64, d: u64, enroll_rate: f64, mst: f64, treatment_hr: f64) -> Result<()> {
    check_positive("enroll_rate", enroll_rate)?;
    check_positive("mst_pbo", mst)?;
    check_positive("treatment_hr", treatment_hr)?;
    if n == 0 || d == 0 || d > n {
        return Err(Error::Config(format!(
            "need 1 <= d <= n, got d={d}, n={n}"
        )));
    }
    Ok(())
}

fn exp_arm(weight: f64, enrollment: EnrollmentBeta, median: f64, label: &str) -> Result<SubgroupArm> {
    Ok(SubgroupArm::new(weight, enrollment, SurvivalModel::exponential_median(median)?, None)?
        .with_label(label))
}

/// Placebo and treatment subgroup medians (placebo, treatment).
pub fn arm_medians(
    overall_mst_pbo: f64,
    treatment_hr: f64,
    biomarker: &BiomarkerSpec,
) -> Result<(SubgroupMedians, SubgroupMedians)> {
    let pbo = solve_subgroup_medians(overall_mst_pbo, biomarker)?;
    let trt = solve_subgroup_medians(overall_mst_pbo / treatment_hr, biomarker)?;
    Ok((pbo, trt))
}

/// 1:1 randomised all-comers trial: four (treatment × biomarker) cells,
/// uniform enrollment over `n / enroll_rate`, no drop-out.
pub fn build_allcomers_spec(
    n: u64,
    d: u64,
    enroll_rate: f64,
    overall_mst_pbo: f64,
    treatment_hr: f64,
    biomarker: &BiomarkerSpec,
) -> Result<TrialSpec> {
    check_design_inputs(n, d, enroll_rate, overall_mst_pbo, treatment_hr)?;
    let q = biomarker.prevalence_q;
    let (pbo, trt) = arm_medians(overall_mst_pbo, treatment_hr, biomarker)?;
    let enrollment = EnrollmentBeta::uniform(n as f64 / enroll_rate)?;
    TrialSpec::new(
        n,
        d,
        vec![
            exp_arm(0.5 * q, enrollment, pbo.mst_pos, "placebo/positive")?,
            exp_arm(0.5 * (1.0 - q), enrollment, pbo.mst_neg, "placebo/negative")?,
            exp_arm(0.5 * q, enrollment, trt.mst_pos, "treatment/positive")?,
            exp_arm(0.5 * (1.0 - q), enrollment, trt.mst_neg, "treatment/negative")?,
        ],
    )
}

/// Enrichment trial on biomarker positives only: the same `n` accrues at
/// `q · enroll_rate`, so enrollment runs over `(n / enroll_rate) / q`.
pub fn build_enrichment_spec(
    n: u64,
    d: u64,
    enroll_rate: f64,
    overall_mst_pbo: f64,
    treatment_hr: f64,
    biomarker: &BiomarkerSpec,
) -> Result<TrialSpec> {
    check_design_inputs(n, d, enroll_rate, overall_mst_pbo, treatment_hr)?;
    let q = biomarker.prevalence_q;
    let (pbo, trt) = arm_medians(overall_mst_pbo, treatment_hr, biomarker)?;
    let enrollment = EnrollmentBeta::uniform((n as f64 / enroll_rate) / q)?;
    TrialSpec::new(
        n,
        d,
        vec![
            exp_arm(0.5, enrollment, pbo.mst_pos, "placebo/positive")?,
            exp_arm(0.5, enrollment, trt.mst_pos, "treatment/positive")?,
        ],
    )
}
