//! Compute the open-channel scattering block of a rectangular half-guide
//! and print it with its diagnostics. Mirrors the README walkthrough.

use wavescat::analysis::Scenario;
use wavescat::coupling::{Cutoff, Variant};
use wavescat::effective::ResolventMethod;
use wavescat::geometry::Geometry;

fn main() -> wavescat::Result<()> {
    let pi = std::f64::consts::PI;
    let rect = Scenario::new(
        Geometry::Rect2d {
            length: pi,
            width: pi,
        },
        400.0, // materialize interior modes with energy <= 400
        1e-8,  // threshold guard band
    )?;
    let result = rect.smatrix_at(
        2.5,
        Cutoff::All,          // interior cutoff: keep everything materialized
        Cutoff::Energy(12.0), // channel cutoff: thresholds up to 12
        Variant::Transpose,
        ResolventMethod::Auto, // Woodbury when the channel count is small
    )?;

    let n = result.s_open.rows();
    println!("open channels: {n}");
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| {
                format!(
                    "{:+.4}{:+.4}i",
                    result.s_open[(i, j)].re,
                    result.s_open[(i, j)].im
                )
            })
            .collect();
        println!("  [{}]", row.join("  "));
    }
    println!(
        "projected unitarity defect: {:.3e}",
        result.unitarity_defect_open
    );
    println!(
        "full-matrix symmetry defect: {:.3e}",
        result.symmetry_defect_full
    );
    Ok(())
}
