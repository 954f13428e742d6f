//! Ignoring a prognostic biomarker underestimates the duration: for a fixed
//! overall placebo median, the duration grows as the biomarker effect grows,
//! most at intermediate prevalence.
//!
//!     cargo run --release --example heterogeneity_curve

use durasim::duration::duration_exact_median;
use durasim::heterogeneity::{build_allcomers_spec, solve_subgroup_medians, BiomarkerSpec};

fn main() -> durasim::Result<()> {
    let (n, d, rate, mst, treatment_hr) = (140, 88, 10.0, 10.0, 0.5);
    let baseline = {
        let spec = build_allcomers_spec(n, d, rate, mst, treatment_hr, &BiomarkerSpec::null(0.5)?)?;
        duration_exact_median(&spec, 0.05)?.point.as_f64()
    };
    println!("no biomarker effect: {baseline:.3} months\n");
    println!("{:>5} {:>10} {:>10} {:>10}", "q", "HR=2", "HR=3", "HR=5");
    for i in 1..=9 {
        let q = i as f64 / 10.0;
        let mut row = format!("{q:>5.2}");
        for hr in [2.0, 3.0, 5.0] {
            let b = BiomarkerSpec::new(q, hr)?;
            let spec = build_allcomers_spec(n, d, rate, mst, treatment_hr, &b)?;
            let t = duration_exact_median(&spec, 0.05)?.point.as_f64();
            row += &format!(" {:>+9.2}%", 100.0 * (t / baseline - 1.0));
        }
        println!("{row}");
    }
    let m = solve_subgroup_medians(mst, &BiomarkerSpec::new(0.45, 5.0)?)?;
    println!(
        "\nq = 0.45, HR = 5: negatives' median {:.3}, positives' median {:.3} (overall {mst})",
        m.mst_neg, m.mst_pos
    );
    Ok(())
}
