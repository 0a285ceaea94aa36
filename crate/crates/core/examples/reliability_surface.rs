//! Reliability over a coarse (k0, b) grid, written as CSV to stdout.
//!
//! ```text
//! cargo run --release --example reliability_surface > surface.csv
//! ```

use qrel::model::ModelParams;
use qrel::reliability::{linspace, sweep, Reading};

fn main() -> qrel::Result<()> {
    let base = ModelParams::default();
    let reports = sweep(
        &base,
        &linspace(2.0, 15.0, 27),
        &linspace(5.0, 50.0, 10),
        &[base.bx],
        Reading::BetaTilde,
    )?;
    println!("k0,b,R,delta_B");
    for r in &reports {
        println!("{},{},{:.10},{:.10}", r.k0, r.b, r.r, r.delta_b);
    }
    let best = reports.iter().max_by(|a, b| a.r.total_cmp(&b.r)).unwrap();
    eprintln!("max R = {:.6} at k0 = {}, b = {}", best.r, best.k0, best.b);
    Ok(())
}
