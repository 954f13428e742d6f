//! Fit Weibull survival cells and the Beta enrollment law to patient-level
//! data, then compare the actual d-th event time with the calculated
//! duration. The data here are simulated; `durasim fit`/`durasim reassess`
//! do the same from a CSV file.
//!
//!     cargo run --release --example fit_and_reassess

use durasim::distributions::Continuous;
use durasim::fitting::{fit_design, reassess, PatientRecord};
use durasim::{EnrollmentBeta, WeibullModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> durasim::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let enrollment = EnrollmentBeta::new(18.0, 0.7)?;
    let survival = [
        ("placebo", "positive", WeibullModel::new(1.3, 6.0)?),
        ("placebo", "negative", WeibullModel::new(1.1, 14.0)?),
        ("treatment", "positive", WeibullModel::new(1.3, 11.0)?),
        ("treatment", "negative", WeibullModel::new(1.1, 25.0)?),
    ];
    let cutoff = 48.0;
    let records: Vec<PatientRecord> = (0..200)
        .map(|i| {
            let (arm, subgroup, model) = &survival[i % 4];
            let u = enrollment.quantile(rng.random()).unwrap();
            let v = model.quantile(rng.random()).unwrap();
            let window = cutoff - u;
            PatientRecord {
                enroll_time: u,
                followup_time: v.min(window),
                event: v <= window,
                arm: arm.to_string(),
                subgroup: subgroup.to_string(),
            }
        })
        .collect();

    let design = fit_design(&records, None)?;
    println!("enrollment: a = {:.2}, beta = {:.3}", design.enrollment.period_a(), design.enrollment.beta());
    for c in &design.cells {
        println!(
            "  {:>9}/{:<8} n={:>3} events={:>3}  shape {:.3} scale {:.3}",
            c.arm, c.subgroup, c.patients, c.events, c.survival.shape(), c.survival.scale()
        );
    }

    println!("\n{:>4} {:>10} {:>12}", "d", "actual", "calculated");
    let rows = reassess(&records, None, 200, &[20, 40, 60, 80, 100, 120])?;
    for row in rows {
        println!(
            "{:>4} {:>10} {:>12.2}",
            row.d,
            row.actual_months.map_or("-".into(), |v| format!("{v:.2}")),
            row.calculated_months.as_f64()
        );
    }
    Ok(())
}
