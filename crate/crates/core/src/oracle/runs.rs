//! Oracle runs of the two apparatus stages with grids sized from the
//! parameters.

use rayon::prelude::*;

use super::grid::{CnSolver, GridState, PotentialSpec, Units};
use crate::error::{invalid, Result};
use crate::model::{GaussianPacket, ModelParams};
use crate::scattering::{scatter_spinor, Channel};

/// Grid spacing and time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridResolution {
    pub dz: f64,
    pub dt: f64,
}

impl GridResolution {
    /// `dz` resolving both `sigma / 20` and a twentieth of the wavelength at
    /// `k_max`, with `dt = dz^2 m / hbar`.
    pub fn for_scales(sigma: f64, k_max: f64, units: Units) -> Self {
        let lambda = 2.0 * std::f64::consts::PI / k_max;
        let dz = (sigma / 20.0).min(lambda / 20.0);
        Self {
            dz,
            dt: dz * dz * units.m / units.hbar,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dz.is_finite() && self.dz > 0.0) {
            return Err(invalid("dz", format!("must be > 0, got {}", self.dz)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", format!("must be > 0, got {}", self.dt)));
        }
        Ok(())
    }
}

fn units(p: &ModelParams) -> Units {
    Units {
        hbar: p.hbar,
        m: p.m,
    }
}

/// Spread of a free packet of initial width `sigma` after `t`.
fn spread(sigma: f64, t: f64, u: Units) -> f64 {
    (sigma * sigma + (u.hbar * t / (2.0 * u.m * sigma)).powi(2)).sqrt()
}

fn steps_for(t: f64, dt: f64) -> (usize, f64) {
    let n = (t / dt).ceil().max(1.0) as usize;
    (n, t / n as f64)
}

#[derive(Debug, Clone)]
pub struct TransmissionRun {
    pub probability: f64,
    pub t_stop: f64,
    pub state: GridState,
}

/// Propagates the x packet through one spin channel of the field region and
/// reads the probability beyond `x = a`.
///
/// The run stops at `t_stop` (default: sixteen transit times over
/// `a - x0`), by which the transmitted part has left the region.
pub fn transmission_run(
    params: &ModelParams,
    channel: Channel,
    res: GridResolution,
    t_stop: Option<f64>,
) -> Result<TransmissionRun> {
    params.validate()?;
    res.validate()?;
    let u = units(params);
    let v = u.hbar * params.k0 / u.m;
    let t_stop = t_stop.unwrap_or(16.0 * (params.a - params.x0) / v);
    let width = 8.0 * spread(params.sigma, t_stop, u) + 5.0;
    let travel = params.x0 + v * t_stop;
    let z_max = (travel + width).max(params.a + 10.0);
    let z_min = (-travel - width).min(params.x0 - 10.0 * params.sigma - 5.0);
    let n = ((z_max - z_min) / res.dz).ceil() as usize + 1;
    let packet = GaussianPacket::new(params.x0, params.k0, params.sigma);
    let mut state = GridState::from_packet(&packet, z_min, z_max, n)?;
    let height = channel.potential(params.bx);
    let potential = if height >= 0.0 {
        PotentialSpec::SquareBarrier {
            height,
            start: 0.0,
            width: params.a,
        }
    } else {
        PotentialSpec::SquareWell {
            depth: -height,
            start: 0.0,
            width: params.a,
        }
    };
    let (steps, dt) = steps_for(t_stop, res.dt);
    CnSolver::new(&state, &potential, dt, u)?.advance(&mut state, steps)?;
    Ok(TransmissionRun {
        probability: state.transmitted_probability(params.a)?,
        t_stop,
        state,
    })
}

#[derive(Debug, Clone)]
pub struct SgRun {
    pub alpha_tilde: f64,
    pub beta_tilde: f64,
    /// `|c_up|^2 P(up, z > 0) + |c_down|^2 P(down, z < 0)`.
    pub r: f64,
    pub up: GridState,
    pub down: GridState,
}

/// Grid propagation of the z motion: free flight during the field crossing
/// followed by the gradient, one scalar run per spin component. Spin weights
/// come from the closed-form scattering amplitudes.
pub fn sg_run(params: &ModelParams, res: GridResolution) -> Result<SgRun> {
    params.validate()?;
    res.validate()?;
    let u = units(params);
    let (t1, t2) = (params.t1(), params.t2());
    let drift = params.f * t2 * t2 / (2.0 * u.m);
    let z_max = drift + 8.0 * spread(params.sigma, t1 + t2, u) + 5.0;
    let n = 2 * ((z_max / res.dz).ceil() as usize) + 1;
    let start = GridState::from_packet(
        &GaussianPacket::new(0.0, 0.0, params.sigma),
        -z_max,
        z_max,
        n,
    )?;
    let run = |force: f64| -> Result<GridState> {
        let mut s = start.clone();
        let (n1, dt1) = steps_for(t1, res.dt);
        CnSolver::new(&s, &PotentialSpec::Free, dt1, u)?.advance(&mut s, n1)?;
        let (n2, dt2) = steps_for(t2, res.dt);
        CnSolver::new(&s, &PotentialSpec::Linear { force }, dt2, u)?.advance(&mut s, n2)?;
        Ok(s)
    };
    let mut out: Vec<Result<GridState>> =
        [params.f, -params.f].par_iter().map(|&f| run(f)).collect();
    let down = out.pop().expect("two runs")?;
    let up = out.pop().expect("two runs")?;
    let spinor = scatter_spinor(params)?;
    let (w_up, w_down) = (spinor.up_coeff.norm_sqr(), spinor.down_coeff.norm_sqr());
    let (up_pos, down_pos) = (up.half_line_mass(0.0, true), down.half_line_mass(0.0, true));
    let (up_neg, down_neg) = (
        up.half_line_mass(0.0, false),
        down.half_line_mass(0.0, false),
    );
    Ok(SgRun {
        alpha_tilde: w_up * up_pos + w_down * down_pos,
        beta_tilde: w_up * up_neg + w_down * down_neg,
        r: w_up * up_pos + w_down * down_neg,
        up,
        down,
    })
}

/// Extrapolates two results of a second-order scheme, the second computed
/// with `dz` and `dt` both halved, to zero spacing.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}
