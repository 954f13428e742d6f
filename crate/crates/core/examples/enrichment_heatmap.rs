//! All-comers minus enrichment duration over a prevalence × hazard-ratio
//! grid, with the interpolated zero boundary. Positive cells favour the
//! enrichment design. Prints the grid CSV on stdout.
//!
//!     cargo run --release --example enrichment_heatmap > grid.csv

use durasim::design_compare::{heatmap, HeatmapBase, HeatmapParam};
use durasim::Estimator;

fn main() -> durasim::Result<()> {
    let base = HeatmapBase {
        n: 140,
        d: 88,
        enroll_rate: 20.0,
        mst_pbo: 15.0,
        treatment_hr: 0.5,
        prevalence: 0.5,
        hazard_ratio: 1.0,
    };
    let prevalence: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let hazard_ratio = [1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0];
    let grid = heatmap(
        &base,
        HeatmapParam::Prevalence,
        &prevalence,
        HeatmapParam::HazardRatio,
        &hazard_ratio,
        Estimator::default(),
    )?;
    eprintln!("HR \\ q {}", prevalence.iter().map(|q| format!("{q:>6.1}")).collect::<String>());
    for (iy, hr) in hazard_ratio.iter().enumerate().rev() {
        let row: String = (0..prevalence.len())
            .map(|ix| match grid.cell(ix, iy).months() {
                Some(v) => format!("{v:>6.1}"),
                None => format!("{:>6}", "--"),
            })
            .collect();
        eprintln!("{hr:>6.1} {row}");
    }
    eprintln!("\nzero boundary (prevalence, hazard ratio):");
    for p in &grid.boundary {
        eprintln!("  ({:.2}, {:.3})", p.x, p.y);
    }
    grid.write_csv(std::io::stdout().lock())
}
