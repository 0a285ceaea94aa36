//! Separation of the two spin packets in the gradient.
//!
//! ```text
//! cargo run --example stern_gerlach
//! ```

use qrel::model::ModelParams;
use qrel::reliability::linspace;
use qrel::scattering::scatter_spinor;
use qrel::stern_gerlach::{overlap_integral, sg_evolve, sg_projection_reliability};

fn main() -> qrel::Result<()> {
    let p = ModelParams::default();
    let spinor = scatter_spinor(&p)?;
    println!(
        "after the field: |c_up|^2 = {:.6}, |c_down|^2 = {:.6}",
        spinor.up_coeff.norm_sqr(),
        spinor.down_coeff.norm_sqr()
    );
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>12}",
        "t2", "alpha~", "beta~", "overlap", "R_SG"
    );
    for t2 in linspace(0.0, 2.0 * p.t2(), 9) {
        let out = sg_evolve(&spinor, p.f, t2, &p)?;
        println!(
            "{t2:>8.3} {:>12.8} {:>12.8} {:>12.3e} {:>12.8}",
            out.alpha_tilde,
            out.beta_tilde,
            overlap_integral(&out.packet_up, &out.packet_down),
            sg_projection_reliability(&out.packet_up, &out.packet_down),
        );
    }
    let out = sg_evolve(&spinor, p.f, p.t2(), &p)?;
    println!(
        "\nat the end of the gradient (t2 = {:.4}): B_measured = {:.8}",
        p.t2(),
        out.b_measured
    );
    Ok(())
}
