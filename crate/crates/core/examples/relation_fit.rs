//! Linear fit of `1 - R` against `S |dB|` over the near-ideal part of a
//! `(k0, b)` grid, for two field values.
//!
//! ```text
//! cargo run --release --example relation_fit
//! ```

use qrel::model::ModelParams;
use qrel::reliability::{linspace, relation_fit, sweep, Reading};

fn main() -> qrel::Result<()> {
    let base = ModelParams::default();
    let k0s = linspace(10.0, 15.0, 41);
    let bs = linspace(30.0, 50.0, 41);
    for bx in [2.0, 1.5] {
        let rf = relation_fit(&sweep(&base, &k0s, &bs, &[bx], Reading::BetaTilde)?)?;
        let f = rf.fit;
        println!(
            "Bx = {bx}: {} points ({} excluded), slope {:.4}, intercept {:.3e} ({:.1}% of range), r^2 {:.4}",
            f.n_points,
            rf.excluded,
            f.slope,
            f.intercept,
            100.0 * f.intercept.abs() / rf.y_range,
            f.r_squared
        );
    }
    Ok(())
}
