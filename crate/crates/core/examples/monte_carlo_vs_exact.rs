//! The simulated distribution of T(d) against its exact law
//! P(T(d) <= t) = P(Binomial(n, F_T(t)) >= d).
//!
//!     cargo run --release --example monte_carlo_vs_exact

use durasim::duration::{order_statistic_cdf, order_statistic_quantile, simulate_order_statistics};
use durasim::{EnrollmentBeta, SubgroupArm, SurvivalModel, TrialSpec};

fn main() -> durasim::Result<()> {
    let enrollment = EnrollmentBeta::uniform(14.0)?;
    let spec = TrialSpec::new(
        140,
        88,
        vec![
            SubgroupArm::new(0.5, enrollment, SurvivalModel::exponential_median(10.0)?, None)?,
            SubgroupArm::new(0.5, enrollment, SurvivalModel::weibull(1.4, 26.0)?, None)?,
        ],
    )?;
    let mut draws = simulate_order_statistics(&spec, 20_000, 2024);
    draws.sort_by(f64::total_cmp);
    println!("{:>6} {:>12} {:>12}", "p", "exact", "simulated");
    for p in [0.025, 0.1, 0.25, 0.5, 0.75, 0.9, 0.975] {
        let exact = order_statistic_quantile(&spec, p)?.0.as_f64();
        let sim = draws[((p * draws.len() as f64) as usize).min(draws.len() - 1)];
        println!("{p:>6.3} {exact:>12.3} {sim:>12.3}");
    }
    let t = 30.0;
    let frac = draws.iter().filter(|&&x| x <= t).count() as f64 / draws.len() as f64;
    println!("\nP(T(d) <= {t}): exact {:.4}, simulated {frac:.4}", order_statistic_cdf(&spec, t)?);
    Ok(())
}
