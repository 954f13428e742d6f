//! Study duration of two 1:1 placebo/treatment trials (n = 140, d = 88)
//! under all three estimators.
//!
//!     cargo run --release --example scenario_duration

use durasim::duration::{duration_exact_median, duration_montecarlo, duration_percentile};
use durasim::{EnrollmentBeta, SubgroupArm, SurvivalModel, TrialSpec};

fn trial(period_a: f64, mst_pbo: f64, mst_trt: f64) -> durasim::Result<TrialSpec> {
    let enrollment = EnrollmentBeta::uniform(period_a)?;
    let arm = |median: f64, label: &str| -> durasim::Result<SubgroupArm> {
        Ok(SubgroupArm::new(0.5, enrollment, SurvivalModel::exponential_median(median)?, None)?
            .with_label(label))
    };
    TrialSpec::new(140, 88, vec![arm(mst_pbo, "placebo")?, arm(mst_trt, "treatment")?])
}

fn main() -> durasim::Result<()> {
    for (name, spec) in [
        ("fast accrual, 14-month enrollment, MST 10/20", trial(14.0, 10.0, 20.0)?),
        ("slow accrual, 36-month enrollment, MST 5/10", trial(36.0, 5.0, 10.0)?),
    ] {
        println!("{name}");
        let pct = duration_percentile(&spec)?;
        let exact = duration_exact_median(&spec, 0.05)?;
        let mc = duration_montecarlo(&spec, 10_000, 0.05, 42)?;
        println!("  percentile     {:>8.3} months", pct.point.as_f64());
        println!(
            "  exact median   {:>8.3} months  (95% interval {:.3} – {:.3})",
            exact.point.as_f64(),
            exact.interval_low.as_f64(),
            exact.interval_high.as_f64()
        );
        println!(
            "  Monte Carlo    {:>8.3} months  (95% interval {:.3} – {:.3}, 10^4 trials)",
            mc.point.as_f64(),
            mc.interval_low.as_f64(),
            mc.interval_high.as_f64()
        );
    }
    Ok(())
}
