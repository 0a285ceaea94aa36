//! Stern-Gerlach stage: exact evolution in the linear gradient `-f z sigma_z`,
//! half-plane readout and the overlap/projection figures of merit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{half_line_mass, GaussianPacket, ModelParams, Side, SpinorPacket};
use crate::scattering::invert_reading;

/// Result of the Stern-Gerlach stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgOutcome {
    /// Population of the upper half-plane (both spin components).
    pub alpha_tilde: f64,
    /// Population of the lower half-plane.
    pub beta_tilde: f64,
    pub packet_up: GaussianPacket,
    pub packet_down: GaussianPacket,
    pub b_measured: f64,
}

/// Evolves the spinor through the gradient for `t2`.
///
/// Spin up sees the force `+f`, spin down `-f`. The readout is normalization
/// invariant since only `beta/alpha` enters the inversion.
pub fn sg_evolve(input: &SpinorPacket, f: f64, t2: f64, params: &ModelParams) -> Result<SgOutcome> {
    if !(t2.is_finite() && t2 >= 0.0) {
        return Err(Error::Domain(format!("SG time must be >= 0, got {t2}")));
    }
    let (m, hbar) = (params.m, params.hbar);
    let packet_up = input.z_packet_up.linear_evolve(f, t2, m, hbar);
    let packet_down = input.z_packet_down.linear_evolve(-f, t2, m, hbar);
    let w_up = input.up_coeff.norm_sqr();
    let w_down = input.down_coeff.norm_sqr();
    let alpha_tilde = w_up * half_line_mass(&packet_up, Side::Positive)
        + w_down * half_line_mass(&packet_down, Side::Positive);
    let beta_tilde = w_up * half_line_mass(&packet_up, Side::Negative)
        + w_down * half_line_mass(&packet_down, Side::Negative);
    let b_measured = invert_reading(alpha_tilde, beta_tilde, params)?;
    Ok(SgOutcome {
        alpha_tilde,
        beta_tilde,
        packet_up,
        packet_down,
        b_measured,
    })
}

/// `|<p1|p2>|` for two Gaussian packets, in closed form.
pub fn overlap_integral(p1: &GaussianPacket, p2: &GaussianPacket) -> f64 {
    // conj(psi1) psi2 = C exp(-P z^2 + Q z - C0)
    let s1 = p1.width_sq.conj();
    let s2 = p2.width_sq;
    let p = 1.0 / (4.0 * s1) + 1.0 / (4.0 * s2);
    let q = p1.center / (2.0 * s1)
        + p2.center / (2.0 * s2)
        + Complex64::new(0.0, p2.wavenumber - p1.wavenumber);
    let c0 = p1.center * p1.center / (4.0 * s1) + p2.center * p2.center / (4.0 * s2);
    let log_mag = (q * q / (4.0 * p) - c0).re;
    let prefactor = (2.0 * std::f64::consts::PI).powf(-0.5)
        * (p1.width_sq.re * p2.width_sq.re).powf(0.25)
        / (p1.width_sq.norm() * p2.width_sq.norm()).sqrt();
    let gauss = (std::f64::consts::PI / p).sqrt().norm();
    p1.amplitude.norm() * p2.amplitude.norm() * prefactor * gauss * log_mag.exp()
}

/// Projection figure of merit of the gradient alone, on unit packets:
/// `int_0^inf |psi_up|^2 + int_-inf^0 |psi_down|^2`.
///
/// Equals 1 for coincident packets at the origin and tends to 2 as the two
/// packets separate completely.
pub fn sg_projection_reliability(p_up: &GaussianPacket, p_down: &GaussianPacket) -> f64 {
    half_line_mass(p_up, Side::Positive) + half_line_mass(p_down, Side::Negative)
}
