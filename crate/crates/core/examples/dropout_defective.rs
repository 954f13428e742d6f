//! With drop-out the observed event time is defective: some patients are
//! never seen to have an event, so F_T(+inf) < 1 and an ambitious target d
//! may never be reached.
//!
//!     cargo run --release --example dropout_defective

use durasim::duration::{duration_exact_median, order_statistic_reach_probability};
use durasim::{EnrollmentBeta, SubgroupArm, SurvivalModel, TrialSpec};

fn main() -> durasim::Result<()> {
    let arm = SubgroupArm::new(
        1.0,
        EnrollmentBeta::new(12.0, 1.5)?,
        SurvivalModel::exponential_median(12.0)?,
        Some(SurvivalModel::exponential_median(18.0)?),
    )?;
    let spec = TrialSpec::new(100, 10, vec![arm])?;
    let mass = spec.event_time_cdf().total_mass();
    println!("share of patients whose event is ever observed: {mass:.4}");
    for d in [20, 50, 58, 60, 62, 70] {
        let s = spec.with_target_events(d)?;
        let est = duration_exact_median(&s, 0.05)?;
        let reach = order_statistic_reach_probability(&s)?;
        let point = est.point.finite().map_or("unreachable".into(), |v| format!("{v:.2} months"));
        println!("d = {d:>3}: P(reached) = {reach:.4}, median duration {point}");
    }
    Ok(())
}
