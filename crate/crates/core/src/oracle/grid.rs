use std::io::Write;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::GaussianPacket;

/// Amplitude above which a wave reaching the grid edge counts as
/// contamination.
pub const EDGE_TOL: f64 = 1e-6;

/// Density at a readout boundary above which the packet has not cleared it.
const READY_TOL: f64 = 1e-6;

/// How often (in steps) the edges are inspected.
const GUARD_EVERY: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    pub hbar: f64,
    pub m: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self { hbar: 1.0, m: 1.0 }
    }
}

/// Complex amplitudes on a uniform grid `z_min + j dz`, `j = 0..n`, with
/// hard walls just outside both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub z_min: f64,
    pub dz: f64,
    pub values: Vec<Complex64>,
}

impl GridState {
    pub fn from_fn(z_min: f64, z_max: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        if n < 3 {
            return Err(invalid(
                "n",
                format!("grid needs at least 3 points, got {n}"),
            ));
        }
        if !(z_min.is_finite() && z_max.is_finite() && z_max > z_min) {
            return Err(invalid("grid", format!("bad extent [{z_min}, {z_max}]")));
        }
        let dz = (z_max - z_min) / (n - 1) as f64;
        let values = (0..n).map(|j| f(z_min + j as f64 * dz)).collect();
        Ok(Self { z_min, dz, values })
    }

    pub fn from_packet(p: &GaussianPacket, z_min: f64, z_max: f64, n: usize) -> Result<Self> {
        Self::from_fn(z_min, z_max, n, |z| p.eval(z))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn z_max(&self) -> f64 {
        self.position(self.len() - 1)
    }

    pub fn position(&self, j: usize) -> f64 {
        self.z_min + j as f64 * self.dz
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dz
    }

    /// `<z>` of the normalized density.
    pub fn mean(&self) -> f64 {
        let w: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| self.position(j) * v.norm_sqr())
            .sum::<f64>()
            * self.dz;
        w / self.norm_sq()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        let w: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| (self.position(j) - mu).powi(2) * v.norm_sqr())
            .sum::<f64>()
            * self.dz;
        w / self.norm_sq()
    }

    /// `<p>` from a central difference, `hbar Im sum conj(psi) psi'`.
    pub fn mean_momentum(&self, hbar: f64) -> f64 {
        let v = &self.values;
        let s: f64 = (1..v.len() - 1)
            .map(|j| (v[j].conj() * (v[j + 1] - v[j - 1])).im)
            .sum();
        hbar * s * 0.5 / self.norm_sq()
    }

    /// Probability on one side of `boundary`. Each cell `[z - dz/2, z + dz/2]`
    /// contributes the fraction of it lying on that side, so a boundary on a
    /// grid point gives the trapezoid rule.
    pub fn half_line_mass(&self, boundary: f64, above: bool) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let frac = ((self.position(j) - boundary) / self.dz + 0.5).clamp(0.0, 1.0);
                let w = if above { frac } else { 1.0 - frac };
                w * v.norm_sqr()
            })
            .sum::<f64>()
            * self.dz
    }

    /// Probability to the right of `boundary`, once the packet has cleared
    /// it: fails when the density there exceeds `1e-6`.
    pub fn transmitted_probability(&self, boundary: f64) -> Result<f64> {
        let j = ((boundary - self.z_min) / self.dz).round();
        if j < 0.0 || j >= self.len() as f64 {
            return Err(Error::Domain(format!(
                "boundary {boundary} is off the grid"
            )));
        }
        let density = self.values[j as usize].norm_sqr();
        if density > READY_TOL {
            return Err(Error::NotReady { boundary, density });
        }
        Ok(self.half_line_mass(boundary, true))
    }

    /// Debug dump with columns `x,re,im,abs2`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,re,im,abs2")?;
        for (j, v) in self.values.iter().enumerate() {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e}",
                self.position(j),
                v.re,
                v.im,
                v.norm_sqr()
            )?;
        }
        Ok(())
    }

    fn edge_amplitude(&self) -> (f64, f64) {
        let n = self.len();
        let lo = self.values[..2]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        let hi = self.values[n - 2..]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        (lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Free,
    /// `V = height` on `[start, start + width]`.
    SquareBarrier {
        height: f64,
        start: f64,
        width: f64,
    },
    /// `V = -depth` on `[start, start + width]`.
    SquareWell {
        depth: f64,
        start: f64,
        width: f64,
    },
    /// `V = -force z`.
    Linear {
        force: f64,
    },
    /// One value per grid point.
    Sampled(Vec<f64>),
}

impl PotentialSpec {
    /// Checks that a finite-extent potential sits inside the grid with at
    /// least 10% margin on both sides.
    pub fn validate(&self, state: &GridState) -> Result<()> {
        let (z0, z1) = (state.z_min, state.z_max());
        let margin = 0.1 * (z1 - z0);
        match self {
            PotentialSpec::SquareBarrier {
                height: v,
                start,
                width,
            }
            | PotentialSpec::SquareWell {
                depth: v,
                start,
                width,
            } => {
                if !(v.is_finite() && start.is_finite() && *width > 0.0) {
                    return Err(invalid(
                        "potential",
                        "non-finite value or width <= 0".to_string(),
                    ));
                }
                if *start < z0 + margin || start + width > z1 - margin {
                    return Err(invalid(
                        "potential",
                        format!(
                            "extent [{start}, {}] needs 10% margin inside [{z0}, {z1}]",
                            start + width
                        ),
                    ));
                }
            }
            PotentialSpec::Linear { force } if !force.is_finite() => {
                return Err(invalid("potential", "non-finite force".to_string()));
            }
            PotentialSpec::Sampled(v) if v.len() != state.len() => {
                return Err(Error::DimensionMismatch {
                    expected: state.len(),
                    got: v.len(),
                });
            }
            _ => {}
        }
        Ok(())
    }

    /// Average of `V` over the cell `[z - dz/2, z + dz/2]`; step edges fall
    /// between cells with fractional weight.
    fn cell_average(&self, j: usize, z: f64, dz: f64) -> f64 {
        let step = |v: f64, start: f64, width: f64| {
            let lo = (z - 0.5 * dz).max(start);
            let hi = (z + 0.5 * dz).min(start + width);
            v * ((hi - lo).max(0.0) / dz)
        };
        match self {
            PotentialSpec::Free => 0.0,
            PotentialSpec::SquareBarrier {
                height,
                start,
                width,
            } => step(*height, *start, *width),
            PotentialSpec::SquareWell {
                depth,
                start,
                width,
            } => step(-*depth, *start, *width),
            PotentialSpec::Linear { force } => -force * z,
            PotentialSpec::Sampled(v) => v[j],
        }
    }
}

/// Crank-Nicolson stepper with the tridiagonal factorization computed once.
#[derive(Debug, Clone)]
pub struct CnSolver {
    /// Off-diagonal of the implicit side, `-i dt hbar / (4 m dz^2)`.
    off: Complex64,
    /// Diagonal of the explicit side.
    rhs_diag: Vec<Complex64>,
    /// Thomas forward-sweep factors.
    c_prime: Vec<Complex64>,
    inv_denom: Vec<Complex64>,
    dz: f64,
    z_min: f64,
}

impl CnSolver {
    pub fn new(
        state: &GridState,
        potential: &PotentialSpec,
        dt: f64,
        units: Units,
    ) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", format!("must be > 0, got {dt}")));
        }
        potential.validate(state)?;
        let n = state.len();
        let dz = state.dz;
        let r = units.hbar / (2.0 * units.m * dz * dz);
        let half = Complex64::new(0.0, 0.5 * dt);
        let off = -half * r;
        let mut rhs_diag = Vec::with_capacity(n);
        let mut lhs_diag = Vec::with_capacity(n);
        for j in 0..n {
            let h = 2.0 * r + potential.cell_average(j, state.position(j), dz) / units.hbar;
            lhs_diag.push(1.0 + half * h);
            rhs_diag.push(1.0 - half * h);
        }
        let mut c_prime = vec![Complex64::new(0.0, 0.0); n];
        let mut inv_denom = vec![Complex64::new(0.0, 0.0); n];
        inv_denom[0] = 1.0 / lhs_diag[0];
        c_prime[0] = off * inv_denom[0];
        for j in 1..n {
            inv_denom[j] = 1.0 / (lhs_diag[j] - off * c_prime[j - 1]);
            c_prime[j] = off * inv_denom[j];
        }
        Ok(Self {
            off,
            rhs_diag,
            c_prime,
            inv_denom,
            dz,
            z_min: state.z_min,
        })
    }

    /// One step in place; `scratch` must match the grid length.
    fn step(&self, psi: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = psi.len();
        let b = -self.off;
        // explicit side
        scratch[0] = self.rhs_diag[0] * psi[0] + b * psi[1];
        for ((out, w), &d) in scratch[1..n - 1]
            .iter_mut()
            .zip(psi.windows(3))
            .zip(&self.rhs_diag[1..n - 1])
        {
            *out = d * w[1] + b * (w[0] + w[2]);
        }
        scratch[n - 1] = self.rhs_diag[n - 1] * psi[n - 1] + b * psi[n - 2];
        // forward sweep, y_j = rhs_j / d_j - c'_j y_{j-1} since c'_j = off / d_j
        let mut prev = Complex64::new(0.0, 0.0);
        for ((p, &s), (&inv, &cp)) in psi
            .iter_mut()
            .zip(scratch.iter())
            .zip(self.inv_denom.iter().zip(&self.c_prime))
        {
            prev = flush(s * inv - cp * prev);
            *p = prev;
        }
        // back substitution
        let mut next = psi[n - 1];
        for (p, &cp) in psi[..n - 1]
            .iter_mut()
            .rev()
            .zip(self.c_prime[..n - 1].iter().rev())
        {
            next = flush(*p - cp * next);
            *p = next;
        }
    }

    /// Advances `state` by `steps`, aborting if amplitude reaches an edge.
    pub fn advance(&self, state: &mut GridState, steps: usize) -> Result<()> {
        if state.len() != self.rhs_diag.len() || state.dz != self.dz || state.z_min != self.z_min {
            return Err(Error::DimensionMismatch {
                expected: self.rhs_diag.len(),
                got: state.len(),
            });
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); state.len()];
        for i in 0..steps {
            self.step(&mut state.values, &mut scratch);
            if (i + 1) % GUARD_EVERY == 0 || i + 1 == steps {
                guard(state)?;
            }
        }
        Ok(())
    }
}

/// Zeroes amplitudes far below any physical scale. The far tails otherwise
/// decay into subnormals, which are orders of magnitude slower to process.
#[inline(always)]
fn flush(v: Complex64) -> Complex64 {
    if v.re.abs() + v.im.abs() < 1e-150 {
        Complex64::new(0.0, 0.0)
    } else {
        v
    }
}

fn guard(state: &GridState) -> Result<()> {
    let (lo, hi) = state.edge_amplitude();
    if lo > EDGE_TOL {
        return Err(Error::BoundaryContamination {
            edge: "lower",
            amplitude: lo,
        });
    }
    if hi > EDGE_TOL {
        return Err(Error::BoundaryContamination {
            edge: "upper",
            amplitude: hi,
        });
    }
    Ok(())
}

/// Propagates `initial` for `steps` Crank-Nicolson steps of size `dt`.
pub fn propagate(
    initial: &GridState,
    potential: &PotentialSpec,
    dt: f64,
    steps: usize,
    units: Units,
) -> Result<GridState> {
    guard(initial)?;
    let solver = CnSolver::new(initial, potential, dt, units)?;
    let mut state = initial.clone();
    solver.advance(&mut state, steps)?;
    Ok(state)
}
