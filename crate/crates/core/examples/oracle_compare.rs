//! Closed forms against Crank-Nicolson propagation on a grid.
//!
//! Uses coarse grids so the run takes a few seconds.
//!
//! ```text
//! cargo run --release --example oracle_compare
//! ```

use qrel::model::ModelParams;
use qrel::oracle::{sg_run, transmission_run, GridResolution};
use qrel::reliability::measurement_pipeline;
use qrel::scattering::{momentum_averaged_transmission, Channel};

fn main() -> qrel::Result<()> {
    let p = ModelParams::default();
    for res in [
        GridResolution {
            dz: 0.08,
            dt: 0.016,
        },
        GridResolution {
            dz: 0.04,
            dt: 0.008,
        },
    ] {
        println!("dz = {}, dt = {}", res.dz, res.dt);
        for ch in [Channel::Plus, Channel::Minus] {
            let grid = transmission_run(&p, ch, res, None)?.probability;
            let exact = momentum_averaged_transmission(&p, ch)?;
            println!(
                "  {ch:?}: grid {grid:.8}, closed form {exact:.8}, diff {:.2e}",
                grid - exact
            );
        }
    }
    let sg = sg_run(
        &p,
        GridResolution {
            dz: 0.02,
            dt: 0.004,
        },
    )?;
    let rep = measurement_pipeline(&p)?;
    println!("gradient stage, dz = 0.02:");
    println!("  alpha~ {:.10} vs {:.10}", sg.alpha_tilde, rep.alpha_tilde);
    println!("  beta~  {:.10} vs {:.10}", sg.beta_tilde, rep.beta_tilde);
    println!("  R      {:.10} vs {:.10}", sg.r, rep.r);
    Ok(())
}
