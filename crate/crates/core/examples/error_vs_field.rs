//! Systematic error, sensitivity and the applicability threshold along a
//! field sweep at the single-point configuration.
//!
//! ```text
//! cargo run --example error_vs_field
//! ```

use qrel::model::ModelParams;
use qrel::reliability::{
    applicability_min_field, error_derivative, linspace, sweep, ErrorDerivative, Reading,
};

fn main() -> qrel::Result<()> {
    let p = ModelParams::default();
    println!("B_min = {:.6e} (b = {})", applicability_min_field(&p), p.b);
    println!(
        "{:>8} {:>12} {:>14} {:>12} {:>14}",
        "Bx", "1-R", "delta_B", "S", "d(dB)/dBx"
    );
    let bxs = linspace(0.1, 2.5, 13);
    for r in sweep(&p, &[p.k0], &[p.b], &bxs, Reading::BetaTilde)? {
        let d = match error_derivative(&p.with_field(r.bx), 1e-5)? {
            ErrorDerivative::Value(v) => format!("{v:.6e}"),
            ErrorDerivative::Degenerate => "degenerate".into(),
        };
        println!(
            "{:>8.3} {:>12.6e} {:>14.6e} {:>12.6} {:>14}",
            r.bx,
            1.0 - r.r,
            r.delta_b,
            r.sensitivity,
            d
        );
    }
    Ok(())
}
