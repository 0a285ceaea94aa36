//! Power-law exponent of `|dB|` against `1 - R` in the two field regimes.
//!
//! ```text
//! cargo run --release --example scaling
//! ```

use qrel::model::ModelParams;
use qrel::reliability::{linspace, scaling_fit, sweep, Reading, Regime};

fn main() -> qrel::Result<()> {
    let base = ModelParams::default();
    let k0s = linspace(13.0, 15.0, 21);
    let bs = linspace(30.0, 50.0, 21);
    for (regime, bx) in [(Regime::FirstOrder, 2.0), (Regime::SecondOrder, 1e-3)] {
        let reports = sweep(&base, &k0s, &bs, &[bx], Reading::BetaTilde)?;
        let f = scaling_fit(&reports, regime)?;
        println!(
            "{regime:?} (Bx = {bx}): |dB| ~ (1-R)^{:.4}, expected {}, r^2 {:.4}",
            f.slope,
            regime.target_slope(),
            f.r_squared
        );
    }
    Ok(())
}
