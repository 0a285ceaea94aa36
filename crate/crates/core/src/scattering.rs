//! One-dimensional scattering of the spin packet on the field region.
//!
//! In the `|+>`/`|->` eigenbasis of `sigma_x` the field region is a square
//! barrier (`+Bx`) or well (`-Bx`) of width `a` starting at `x = 0`. The
//! plane-wave solution is
//!
//! ```text
//! x < 0      e^{ikx} + R e^{-ikx}
//! 0 < x < a  M1 e^{iqx} + M2 e^{-iqx}
//! x > a      T e^{ikx}
//! ```
//!
//! with `q = sqrt(k^2 - 2 m V / hbar^2)` on the principal branch
//! (`Im q >= 0`). The closed forms are evaluated through
//! `G = 2k cos(qa) - i (k^2 + q^2) a sinc(qa)`, which is regular at `q = 0`;
//! the common factor `e^{|Im qa|}` is divided out so deep tunneling does not
//! overflow.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{free_width, GaussianPacket, ModelParams, SpinorPacket};
use crate::quad;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Below this `|q a|` the sinc is replaced by its Taylor series.
const SINC_SERIES_BELOW: f64 = 1e-4;

/// Spin channel in the `sigma_x` eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    /// `|+>`: sees a barrier of height `Bx`.
    Plus,
    /// `|->`: sees a well of depth `Bx`.
    Minus,
}

impl Channel {
    pub fn potential(self, bx: f64) -> f64 {
        match self {
            Channel::Plus => bx,
            Channel::Minus => -bx,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringCoefficients {
    pub t: Complex64,
    pub r: Complex64,
    /// Right-moving interior amplitude. Diverges like `1/q` at `q = 0`.
    pub m1: Complex64,
    /// Left-moving interior amplitude. Diverges like `1/q` at `q = 0`.
    pub m2: Complex64,
    pub q: Complex64,
    pub k: f64,
    pub channel: Channel,
}

impl ScatteringCoefficients {
    pub fn flux_residual(&self) -> f64 {
        (self.t.norm_sqr() + self.r.norm_sqr() - 1.0).abs()
    }
}

/// Population pair of the ideal (scattering-free, perfectly separated)
/// apparatus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealReading {
    pub alpha: f64,
    pub beta: f64,
}

/// `cos(w) e^{-|Im w|}`, `sinc(w) e^{-|Im w|}` and `e^{-|Im w|}`.
fn scaled_trig(w: Complex64) -> (Complex64, Complex64, f64) {
    let lambda = w.im.abs();
    let scale = (-lambda).exp();
    let ep = (I * w - lambda).exp();
    let em = (-I * w - lambda).exp();
    let cos = 0.5 * (ep + em);
    let sinc = if w.norm() < SINC_SERIES_BELOW {
        (1.0 - w * w / 6.0) * scale
    } else {
        (ep - em) / (2.0 * I * w)
    };
    (cos, sinc, scale)
}

fn internal_wavenumber(k: f64, v: f64, m: f64, hbar: f64) -> Complex64 {
    let q = Complex64::new(k * k - 2.0 * m * v / (hbar * hbar), 0.0).sqrt();
    // principal sqrt already has Re >= 0; force the decaying branch on the
    // negative real axis where -0.0 could flip the sign of Im.
    if q.im < 0.0 {
        -q
    } else {
        q
    }
}

/// Transmission, reflection and interior amplitudes for a square potential
/// of height `v` (negative for a well) and width `a`.
pub fn barrier_coefficients(
    k: f64,
    v: f64,
    a: f64,
    m: f64,
    hbar: f64,
) -> Result<ScatteringCoefficients> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be > 0, got {k}")));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Domain(format!("barrier width must be > 0, got {a}")));
    }
    if !v.is_finite() {
        return Err(Error::Domain(format!("potential must be finite, got {v}")));
    }
    let q = internal_wavenumber(k, v, m, hbar);
    let kc = Complex64::new(k, 0.0);
    let w = q * a;
    let (cos, sinc, scale) = scaled_trig(w);
    // G e^{-|Im qa|}
    let g = 2.0 * kc * cos - I * (kc * kc + q * q) * a * sinc;
    let t = 2.0 * kc * Complex64::new(0.0, -k * a).exp() * scale / g;
    let r = -I * (kc * kc - q * q) * a * sinc / g;
    let m1 = kc * (kc + q) * (-I * w - w.im.abs()).exp() / (q * g);
    let m2 = -kc * (kc - q) * (I * w - w.im.abs()).exp() / (q * g);
    let channel = if v >= 0.0 {
        Channel::Plus
    } else {
        Channel::Minus
    };
    Ok(ScatteringCoefficients {
        t,
        r,
        m1,
        m2,
        q,
        k,
        channel,
    })
}

/// Coefficients of one spin channel at wavenumber `k`.
pub fn channel_coefficients(
    k: f64,
    params: &ModelParams,
    bx: f64,
    channel: Channel,
) -> Result<ScatteringCoefficients> {
    let mut c = barrier_coefficients(k, channel.potential(bx), params.a, params.m, params.hbar)?;
    c.channel = channel;
    Ok(c)
}

/// Ideal populations `(cos^2 theta, sin^2 theta)` with `theta = Bx t1 / hbar`.
pub fn ideal_populations(bx: f64, params: &ModelParams) -> IdealReading {
    let theta = params.precession_angle(bx);
    let (s, c) = theta.sin_cos();
    IdealReading {
        alpha: c * c,
        beta: s * s,
    }
}

/// Field inferred from a population pair through the ideal map,
/// `(hbar / t1) arctan sqrt(beta / alpha)`.
pub fn invert_reading(alpha: f64, beta: f64, params: &ModelParams) -> Result<f64> {
    if !(alpha.is_finite() && beta.is_finite()) || alpha < 0.0 || beta < 0.0 {
        return Err(Error::Domain(format!(
            "populations must be finite and non-negative, got ({alpha}, {beta})"
        )));
    }
    if alpha == 0.0 {
        return Err(Error::Saturated);
    }
    Ok(params.field_per_radian() * (beta / alpha).sqrt().atan())
}

/// Transmitted spinor after the field region, with the reflected part
/// discarded and no renormalization.
pub fn scatter_spinor(params: &ModelParams) -> Result<SpinorPacket> {
    scatter_spinor_at(params, params.bx)
}

/// As [`scatter_spinor`] but at an arbitrary signed field; used by the
/// finite-difference derivatives, which may step below zero.
pub(crate) fn scatter_spinor_at(params: &ModelParams, bx: f64) -> Result<SpinorPacket> {
    let plus = channel_coefficients(params.k0, params, bx, Channel::Plus)?;
    let minus = channel_coefficients(params.k0, params, bx, Channel::Minus)?;
    let t1 = params.t1();
    let z1 = GaussianPacket::with_width_sq(
        0.0,
        0.0,
        free_width(
            Complex64::new(params.sigma * params.sigma, 0.0),
            t1,
            params.m,
            params.hbar,
        ),
    );
    let x_packet = GaussianPacket::new(params.x0, params.k0, params.sigma).free_evolve(
        t1,
        params.m,
        params.hbar,
    );
    Ok(SpinorPacket {
        up_coeff: 0.5 * (plus.t + minus.t),
        down_coeff: 0.5 * (plus.t - minus.t),
        z_packet_up: z1,
        z_packet_down: z1,
        x_packet,
    })
}

/// `|phi(k)|^2` of the initial x packet.
pub fn momentum_density(k: f64, k0: f64, sigma: f64) -> f64 {
    let d = k - k0;
    (2.0 * sigma * sigma / std::f64::consts::PI).sqrt() * (-2.0 * sigma * sigma * d * d).exp()
}

/// Transmission probability of the finite packet, `int |phi(k)|^2 |T_k|^2 dk`
/// over `k0 +- 8 / (2 sigma)`. Components with `k <= 0` never reach the
/// field and contribute nothing.
pub fn momentum_averaged_transmission(params: &ModelParams, channel: Channel) -> Result<f64> {
    params.validate()?;
    let half = 8.0 / (2.0 * params.sigma);
    let lo = (params.k0 - half).max(0.0);
    let hi = params.k0 + half;
    let v = channel.potential(params.bx);
    let integrand = |k: f64| {
        if k <= 0.0 {
            return 0.0;
        }
        match barrier_coefficients(k, v, params.a, params.m, params.hbar) {
            Ok(c) => momentum_density(k, params.k0, params.sigma) * c.t.norm_sqr(),
            Err(_) => f64::NAN,
        }
    };
    let r = quad::integrate(integrand, lo, hi, 1e-13)?;
    if !r.value.is_finite() {
        return Err(Error::Numeric {
            what: "non-finite transmission integrand".into(),
            residual: r.error,
        });
    }
    Ok(r.value)
}

/// Stationary scattering state of one channel at wavenumber `k`.
#[derive(Debug, Clone, Copy)]
pub struct ScatteringState {
    coeffs: ScatteringCoefficients,
    a: f64,
}

impl ScatteringState {
    pub fn coefficients(&self) -> &ScatteringCoefficients {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let c = &self.coeffs;
        let k = c.k;
        if x < 0.0 {
            Complex64::new(0.0, k * x).exp() + c.r * Complex64::new(0.0, -k * x).exp()
        } else if x <= self.a {
            // M1 e^{iqx} + M2 e^{-iqx} rewritten to stay finite at q = 0:
            // (2k/G) [cos(q(x-a)) + i k (x-a) sinc(q(x-a))]
            let a = self.a;
            let kc = Complex64::new(k, 0.0);
            let (cos_a, sinc_a, scale_a) = scaled_trig(c.q * a);
            let g = 2.0 * kc * cos_a - I * (kc * kc + c.q * c.q) * a * sinc_a;
            let u = x - a;
            let (cos_u, sinc_u, scale_u) = scaled_trig(c.q * u);
            let inner = cos_u + I * k * u * sinc_u;
            2.0 * k * inner * (scale_a / scale_u) / g
        } else {
            c.t * Complex64::new(0.0, k * x).exp()
        }
    }
}

pub fn scattering_state(k: f64, params: &ModelParams, channel: Channel) -> Result<ScatteringState> {
    let coeffs = channel_coefficients(k, params, params.bx, channel)?;
    Ok(ScatteringState {
        coeffs,
        a: params.a,
    })
}
