//! Transmission through the field region for both spin channels.
//!
//! Prints |T|^2 over a wavenumber scan, the first few transparent points of
//! the barrier channel, and the packet-averaged transmission.
//!
//! ```text
//! cargo run --example scattering
//! ```

use qrel::model::ModelParams;
use qrel::reliability::linspace;
use qrel::scattering::{channel_coefficients, momentum_averaged_transmission, Channel};

fn main() -> qrel::Result<()> {
    let p = ModelParams::default();
    println!(
        "a = {}, Bx = {}: barrier height {}, well depth {}",
        p.a, p.bx, p.bx, p.bx
    );
    println!("{:>8} {:>12} {:>12}", "k", "|T+|^2", "|T-|^2");
    for k in linspace(0.5, 8.0, 16) {
        let plus = channel_coefficients(k, &p, p.bx, Channel::Plus)?;
        let minus = channel_coefficients(k, &p, p.bx, Channel::Minus)?;
        println!(
            "{k:>8.3} {:>12.6} {:>12.6}",
            plus.t.norm_sqr(),
            minus.t.norm_sqr()
        );
    }

    println!("\nbarrier resonances (q a = n pi):");
    for n in 1..=4 {
        let q = n as f64 * std::f64::consts::PI / p.a;
        let k = (q * q + 2.0 * p.m * p.bx / (p.hbar * p.hbar)).sqrt();
        let c = channel_coefficients(k, &p, p.bx, Channel::Plus)?;
        println!("  n = {n}: k = {k:.6}, |T| = {:.15}", c.t.norm());
    }

    println!("\npacket k0 = {}, sigma = {}:", p.k0, p.sigma);
    for ch in [Channel::Plus, Channel::Minus] {
        println!(
            "  {ch:?}: <|T|^2> = {:.10}",
            momentum_averaged_transmission(&p, ch)?
        );
    }
    Ok(())
}
