//! Finite-dimensional model of the measurement for the histories engine.
//!
//! The space is `spin (2) x channel (2) x z grid (n / 4)`, index order
//! `(spin, channel, z)` with spin up and the left channel first. The x
//! motion is reduced to a left/right channel: the field region acts on it
//! through the 2x2 scattering matrix of each `sigma_x` channel,
//!
//! ```text
//! S = | R  -conj(T) |
//!     | T   conj(R) |
//! ```
//!
//! with `(R, T)` at `k0`, so multiple reflections are not resolved. The z
//! motion uses exact exponentials of a sinc-DVR Hamiltonian.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::histories::{CMatrix, CVector, HistoryFamily, Operator, Schedule};
use crate::model::ModelParams;
use crate::scattering::{channel_coefficients, Channel};

/// Largest total dimension accepted by [`discretize_pipeline`].
pub const PIPELINE_DIM_CAP: usize = 2048;

#[derive(Debug, Clone)]
pub struct DiscretePipeline {
    /// Theta family over `(E1, E2)`: `[F1, F2, R2]`.
    pub family: HistoryFamily,
    /// Right channel, any spin and z.
    pub e1: Operator,
    /// `(up x z > 0 + down x z < 0) x right`.
    pub e2: Operator,
    pub z: Vec<f64>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `exp(-i H t / hbar)` for the DVR Hamiltonian with potential `v` on the
/// uniform grid `z`.
fn dvr_propagator(z: &[f64], v: impl Fn(f64) -> f64, t: f64, hbar: f64, m: f64) -> CMatrix {
    let n = z.len();
    let dz = z[1] - z[0];
    let scale = hbar * hbar / (2.0 * m * dz * dz);
    let h = DMatrix::<f64>::from_fn(n, n, |i, j| {
        if i == j {
            scale * PI * PI / 3.0 + v(z[i])
        } else {
            let d = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            scale * 2.0 * sign / (d * d)
        }
    });
    let eig = h.symmetric_eigen();
    let vecs = &eig.eigenvectors;
    let mut cos_part = vecs.clone();
    let mut sin_part = vecs.clone();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let (s, co) = (l * t / hbar).sin_cos();
        cos_part.column_mut(k).scale_mut(co);
        sin_part.column_mut(k).scale_mut(s);
    }
    let re = cos_part * vecs.transpose();
    let im = -(sin_part * vecs.transpose());
    CMatrix::from_fn(n, n, |i, j| Complex64::new(re[(i, j)], im[(i, j)]))
}

/// Places `blocks[b]` on the diagonal block `b` of a `nb * nz` matrix.
fn block_diag(blocks: &[&CMatrix]) -> CMatrix {
    let nz = blocks[0].nrows();
    let d = nz * blocks.len();
    let mut out = CMatrix::zeros(d, d);
    for (b, m) in blocks.iter().enumerate() {
        out.view_mut((b * nz, b * nz), (nz, nz)).copy_from(m);
    }
    out
}

/// Builds the two-stage measurement on `n` basis states (`n` divisible by
/// four, at most [`PIPELINE_DIM_CAP`]) and its reliability family.
pub fn discretize_pipeline(params: &ModelParams, n: usize) -> Result<DiscretePipeline> {
    params.validate()?;
    if n > PIPELINE_DIM_CAP {
        return Err(Error::DimensionCap {
            dim: n,
            cap: PIPELINE_DIM_CAP,
        });
    }
    if !n.is_multiple_of(4) || n < 16 {
        return Err(invalid(
            "n",
            format!("must be a multiple of 4 and >= 16, got {n}"),
        ));
    }
    let nz = n / 4;
    let (hbar, m) = (params.hbar, params.m);
    let (t1, t2) = (params.t1(), params.t2());
    let drift = params.f * t2 * t2 / (2.0 * m);
    let t = t1 + t2;
    let spread = (params.sigma.powi(2) + (hbar * t / (2.0 * m * params.sigma)).powi(2)).sqrt();
    let half = drift + 8.0 * spread + 2.0;
    let dz = 2.0 * half / nz as f64;
    let k_max = params.f * t2 / hbar + 8.0 / (2.0 * params.sigma);
    if PI / dz < k_max {
        return Err(invalid(
            "n",
            format!("grid spacing {dz:.3} cannot carry wavenumber {k_max:.3}; raise n"),
        ));
    }
    let z: Vec<f64> = (0..nz)
        .map(|j| (j as f64 - 0.5 * (nz - 1) as f64) * dz)
        .collect();

    let plus = channel_coefficients(params.k0, params, params.bx, Channel::Plus)?;
    let minus = channel_coefficients(params.k0, params, params.bx, Channel::Minus)?;
    let s_matrix =
        |r: Complex64, t: Complex64| CMatrix::from_row_slice(2, 2, &[r, -t.conj(), t, r.conj()]);
    let proj_plus = CMatrix::from_element(2, 2, c(0.5));
    let proj_minus = CMatrix::from_row_slice(2, 2, &[c(0.5), c(-0.5), c(-0.5), c(0.5)]);
    let spin_channel = proj_plus.kronecker(&s_matrix(plus.r, plus.t))
        + proj_minus.kronecker(&s_matrix(minus.r, minus.t));
    let u_free = dvr_propagator(&z, |_| 0.0, t1, hbar, m);
    let u1 = spin_channel.kronecker(&u_free);

    let f = params.f;
    let u_up = dvr_propagator(&z, |x| -f * x, t2, hbar, m);
    let u_down = dvr_propagator(&z, |x| f * x, t2, hbar, m);
    let u2 = block_diag(&[&u_up, &u_up, &u_down, &u_down]);

    let norm = (2.0 * PI * params.sigma.powi(2)).powf(-0.25);
    let mut psi = CVector::zeros(n);
    for (j, &x) in z.iter().enumerate() {
        psi[j] = c(norm * (-x * x / (4.0 * params.sigma.powi(2))).exp() * dz.sqrt());
    }
    let psi = psi.unscale(psi.norm());

    let index = |spin: usize, chan: usize, j: usize| (2 * spin + chan) * nz + j;
    let mut e1 = vec![false; n];
    let mut e2 = vec![false; n];
    for (j, &x) in z.iter().enumerate() {
        for spin in 0..2 {
            e1[index(spin, 1, j)] = true;
        }
        e2[index(0, 1, j)] = x > 0.0;
        e2[index(1, 1, j)] = x < 0.0;
    }
    let e1 = Operator::indicator(e1);
    let e2 = Operator::indicator(e2);

    let schedule = Arc::new(Schedule::pure(
        psi,
        vec![Operator::Dense(u1), Operator::Dense(u2)],
    )?);
    let family = HistoryFamily::theta(schedule, vec![e1.clone(), e2.clone()])?;
    Ok(DiscretePipeline { family, e1, e2, z })
}
