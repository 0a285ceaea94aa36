//! Parameters, Gaussian wave-packet algebra and the special functions shared
//! by every stage of the pipeline.
//!
//! Packets use the complex width convention `s(t) = sigma^2 + i hbar t / (2m)`,
//! so a packet is
//!
//! ```text
//! psi(z) = A e^{i theta} N(s) exp(-(z - d)^2 / (4 s) + i k z),
//! N(s)   = (2 pi)^{-1/4} (Re s)^{1/4} / sqrt(s)
//! ```
//!
//! Note the plane-wave factor is `e^{ikz}`, not `e^{ik(z-d)}`: the phase
//! `theta` is the global phase in that gauge.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Physical constants and apparatus geometry.
///
/// Natural units (`hbar = m = 1`) are the defaults but every formula carries
/// both constants explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub hbar: f64,
    pub m: f64,
    /// Width of the field region along x.
    pub a: f64,
    /// Initial packet width (both x and z).
    pub sigma: f64,
    /// Stern-Gerlach gradient.
    pub f: f64,
    /// Initial packet center along x.
    pub x0: f64,
    /// Length of the Stern-Gerlach region.
    pub b: f64,
    /// Mean incident wavenumber.
    pub k0: f64,
    /// Field under measurement (energy units).
    pub bx: f64,
}

impl Default for ModelParams {
    /// The single-point configuration `hbar = m = 1, a = 3, sigma = 0.5,
    /// f = 1, b = 35, k0 = 5, Bx = 2`.
    fn default() -> Self {
        Self {
            hbar: 1.0,
            m: 1.0,
            a: 3.0,
            sigma: 0.5,
            f: 1.0,
            x0: -5.0,
            b: 35.0,
            k0: 5.0,
            bx: 2.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("hbar", self.hbar),
            ("m", self.m),
            ("a", self.a),
            ("sigma", self.sigma),
            ("f", self.f),
            ("b", self.b),
            ("k0", self.k0),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.bx.is_finite() && self.bx >= 0.0) {
            return Err(invalid(
                "Bx",
                format!("must be finite and >= 0, got {}", self.bx),
            ));
        }
        if !self.x0.is_finite() || self.x0 + 5.0 * self.sigma >= 0.0 {
            return Err(invalid(
                "x0",
                format!(
                    "packet must start left of the field: x0 + 5 sigma = {} is not < 0",
                    self.x0 + 5.0 * self.sigma
                ),
            ));
        }
        Ok(())
    }

    pub fn with_field(self, bx: f64) -> Self {
        Self { bx, ..self }
    }

    pub fn with_k0_b(self, k0: f64, b: f64) -> Self {
        Self { k0, b, ..self }
    }

    /// Incident kinetic energy `hbar^2 k0^2 / (2m)`.
    pub fn energy(&self) -> f64 {
        self.hbar * self.hbar * self.k0 * self.k0 / (2.0 * self.m)
    }

    pub fn group_velocity(&self) -> f64 {
        self.hbar * self.k0 / self.m
    }

    /// Time spent in the field region.
    pub fn t1(&self) -> f64 {
        transit_time(self.a, self.k0, self.m, self.hbar)
    }

    /// Time spent in the Stern-Gerlach region.
    pub fn t2(&self) -> f64 {
        transit_time(self.b, self.k0, self.m, self.hbar)
    }

    /// Ideal precession angle `Bx t1 / hbar`.
    pub fn precession_angle(&self, bx: f64) -> f64 {
        bx * self.t1() / self.hbar
    }

    /// Field per radian of precession, `hbar / t1`.
    pub fn field_per_radian(&self) -> f64 {
        self.hbar / self.t1()
    }

    /// z-packet width after the field region.
    pub fn entry_width_sq(&self) -> Complex64 {
        free_width(
            Complex64::new(self.sigma * self.sigma, 0.0),
            self.t1(),
            self.m,
            self.hbar,
        )
    }
}

/// Complex-width Gaussian wave packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub center: f64,
    pub wavenumber: f64,
    pub width_sq: Complex64,
    pub phase: f64,
    pub amplitude: Complex64,
}

impl GaussianPacket {
    /// Unit-amplitude packet with real width `sigma`.
    pub fn new(center: f64, wavenumber: f64, sigma: f64) -> Self {
        Self {
            center,
            wavenumber,
            width_sq: Complex64::new(sigma * sigma, 0.0),
            phase: 0.0,
            amplitude: Complex64::new(1.0, 0.0),
        }
    }

    pub fn with_width_sq(center: f64, wavenumber: f64, width_sq: Complex64) -> Self {
        Self {
            center,
            wavenumber,
            width_sq,
            phase: 0.0,
            amplitude: Complex64::new(1.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width_sq.re.is_nan() || self.width_sq.re <= 0.0 || !self.width_sq.im.is_finite() {
            return Err(Error::Domain(format!(
                "packet width must have Re(s) > 0, got {}",
                self.width_sq
            )));
        }
        Ok(())
    }

    /// Variance of `|psi|^2`, i.e. `|s|^2 / Re(s)`.
    pub fn spatial_variance(&self) -> f64 {
        self.width_sq.norm_sqr() / self.width_sq.re
    }

    /// Total probability `|A|^2`.
    pub fn norm_sq(&self) -> f64 {
        self.amplitude.norm_sqr()
    }

    pub fn eval(&self, z: f64) -> Complex64 {
        let s = self.width_sq;
        let dz = z - self.center;
        let exponent = -Complex64::new(dz * dz, 0.0) / (4.0 * s)
            + Complex64::new(0.0, self.wavenumber * z + self.phase);
        self.amplitude * normalization(s) * exponent.exp()
    }

    /// Exact free evolution for time `t`.
    pub fn free_evolve(&self, t: f64, m: f64, hbar: f64) -> Self {
        let k = self.wavenumber;
        Self {
            center: self.center + hbar * k * t / m,
            wavenumber: k,
            width_sq: free_width(self.width_sq, t, m, hbar),
            phase: self.phase - hbar * k * k * t / (2.0 * m),
            amplitude: self.amplitude,
        }
    }

    /// Exact evolution under `H = p^2/2m - F z` for time `t`.
    ///
    /// Uses the factorization `U = e^{-i F^2 t^3 / 6 m hbar} e^{i F t z / hbar}
    /// T(F t^2 / 2m) U_free(t)`: free spreading, a rigid shift, a momentum kick
    /// and a global phase.
    pub fn linear_evolve(&self, force: f64, t: f64, m: f64, hbar: f64) -> Self {
        let free = self.free_evolve(t, m, hbar);
        let shift = force * t * t / (2.0 * m);
        Self {
            center: free.center + shift,
            wavenumber: free.wavenumber + force * t / hbar,
            width_sq: free.width_sq,
            phase: free.phase
                - free.wavenumber * shift
                - force * force * t * t * t / (6.0 * m * hbar),
            amplitude: free.amplitude,
        }
    }
}

fn normalization(s: Complex64) -> Complex64 {
    (2.0 * PI).powf(-0.25) * s.re.powf(0.25) / s.sqrt()
}

/// Two-component spinor with Gaussian spatial parts: the state that enters
/// the Stern-Gerlach region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorPacket {
    pub up_coeff: Complex64,
    pub down_coeff: Complex64,
    pub z_packet_up: GaussianPacket,
    pub z_packet_down: GaussianPacket,
    pub x_packet: GaussianPacket,
}

impl SpinorPacket {
    /// `|c1|^2 + |c2|^2`.
    pub fn norm_sq(&self) -> f64 {
        self.up_coeff.norm_sqr() + self.down_coeff.norm_sqr()
    }
}

/// Half-line selector with `z = 0` as the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Positive,
    Negative,
}

/// Complex width after free flight: `s0 + i hbar t / (2m)`.
pub fn free_width(s0: Complex64, t: f64, m: f64, hbar: f64) -> Complex64 {
    s0 + Complex64::new(0.0, hbar * t / (2.0 * m))
}

/// Probability of the packet on one side of `z = 0`, in closed form.
pub fn half_line_mass(packet: &GaussianPacket, side: Side) -> f64 {
    let scale = (2.0 * packet.spatial_variance()).sqrt();
    let x = packet.center / scale;
    let frac = match side {
        Side::Positive => 0.5 * erfc(-x),
        Side::Negative => 0.5 * erfc(x),
    };
    packet.norm_sq() * frac
}

/// Time to cross a length `l` at the group velocity `hbar k0 / m`.
pub fn transit_time(l: f64, k0: f64, m: f64, hbar: f64) -> f64 {
    l * m / (hbar * k0)
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_width_examples() {
        let s0 = Complex64::new(0.25, 0.0);
        assert_eq!(free_width(s0, 0.0, 1.0, 1.0), s0);
        let s = free_width(s0, 0.6, 1.0, 1.0);
        assert!((s - Complex64::new(0.25, 0.3)).norm() < 1e-15);
    }

    #[test]
    fn free_width_is_additive() {
        let s0 = Complex64::new(0.3, 0.1);
        let a = free_width(free_width(s0, 0.25, 2.0, 1.5), 0.5, 2.0, 1.5);
        let b = free_width(s0, 0.75, 2.0, 1.5);
        assert_eq!(a, b);
    }

    #[test]
    fn transit_times() {
        assert!((transit_time(3.0, 5.0, 1.0, 1.0) - 0.6).abs() < 1e-15);
        assert!((transit_time(35.0, 5.0, 1.0, 1.0) - 7.0).abs() < 1e-15);
        assert!(transit_time(1e-300, 5.0, 1.0, 1.0) < 1e-299);
    }

    #[test]
    fn half_line_symmetry_and_limits() {
        let p = GaussianPacket::with_width_sq(0.0, 1.3, Complex64::new(0.25, 2.0));
        assert_eq!(half_line_mass(&p, Side::Positive), 0.5);
        assert_eq!(half_line_mass(&p, Side::Negative), 0.5);
        let far = GaussianPacket::new(1e6, 0.0, 0.5);
        assert_eq!(half_line_mass(&far, Side::Positive), 1.0);
        assert_eq!(half_line_mass(&far, Side::Negative), 0.0);
    }

    #[test]
    fn erfc_reference_values() {
        // erfc(1) from Abramowitz & Stegun table 7.1
        assert!((erfc(1.0) - 0.157_299_207_050_285_1).abs() < 1e-16);
        assert!((erf(0.5) - 0.520_499_877_813_046_5).abs() < 1e-16);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::default().validate().is_ok());
        let bad = ModelParams {
            x0: -1.0,
            ..Default::default()
        };
        assert!(matches!(
            bad.validate(),
            Err(Error::InvalidParam { name: "x0", .. })
        ));
        let bad = ModelParams {
            k0: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ModelParams {
            bx: -0.1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn linear_evolve_drift_law() {
        let p = GaussianPacket::with_width_sq(0.0, 0.0, Complex64::new(0.25, 0.3));
        let t = 2.0;
        let up = p.linear_evolve(1.0, t, 1.0, 1.0);
        assert_eq!(up.center, 2.0);
        assert_eq!(up.wavenumber, 2.0);
        assert!((up.phase + 8.0 / 6.0).abs() < 1e-15);
        assert!((up.width_sq - Complex64::new(0.25, 1.3)).norm() < 1e-15);
    }
}
