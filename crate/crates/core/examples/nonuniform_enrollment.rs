//! How the shape of the Beta(1, β) enrollment curve moves the study
//! duration: β < 1 back-loads accrual, β > 1 front-loads it.
//!
//!     cargo run --release --example nonuniform_enrollment

use durasim::duration::duration_exact_median;
use durasim::{EnrollmentBeta, SubgroupArm, SurvivalModel, TrialSpec};

fn trial(period_a: f64, beta: f64, mst_pbo: f64, mst_trt: f64) -> durasim::Result<TrialSpec> {
    let enrollment = EnrollmentBeta::new(period_a, beta)?;
    let arms = [mst_pbo, mst_trt]
        .into_iter()
        .map(|m| SubgroupArm::new(0.5, enrollment, SurvivalModel::exponential_median(m)?, None))
        .collect::<durasim::Result<Vec<_>>>()?;
    TrialSpec::new(140, 88, arms)
}

fn main() -> durasim::Result<()> {
    println!("{:>6} {:>22} {:>22}", "beta", "14 mo, MST 10/20", "36 mo, MST 5/10");
    for beta in [0.45, 0.75, 1.0, 1.25, 2.0] {
        let fast = duration_exact_median(&trial(14.0, beta, 10.0, 20.0)?, 0.05)?;
        let slow = duration_exact_median(&trial(36.0, beta, 5.0, 10.0)?, 0.05)?;
        println!(
            "{beta:>6.2} {:>22.3} {:>22.3}",
            fast.point.as_f64(),
            slow.point.as_f64()
        );
    }
    let a = duration_exact_median(&trial(14.0, 0.45, 10.0, 20.0)?, 0.05)?.point.as_f64();
    let b = duration_exact_median(&trial(36.0, 1.25, 5.0, 10.0)?, 0.05)?.point.as_f64();
    println!("\nback-loaded fast trial vs front-loaded slow trial: {a:.3} vs {b:.3} months");
    Ok(())
}
