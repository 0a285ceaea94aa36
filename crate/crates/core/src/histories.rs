//! Finite-dimensional consistent-histories calculator.
//!
//! A history is a sequence of projectors `Y_1 .. Y_n` interleaved with a
//! shared schedule of unitaries `U_1 .. U_n`. Its chain operator is
//! `C = Y_n U_n ... Y_1 U_1` and two histories have the inner product
//! (decoherence functional) `<a, b> = Tr[C_a rho C_b^dagger]`. The initial
//! density operator is stored as a factor `rho = L L^dagger`, so every inner
//! product reduces to a Frobenius product of the images `C L`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest supported Hilbert-space dimension.
pub const DIMENSION_CAP: usize = 4096;

/// Default absolute tolerance on `|<a, b>|` for the consistency check.
pub const DEFAULT_CONSISTENCY_TOL: f64 = 1e-8;

const OPERATOR_TOL: f64 = 1e-12;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Linear operator on the history Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Identity(usize),
    /// Diagonal in the computational basis; indicator projectors live here.
    Diagonal(CVector),
    Dense(CMatrix),
}

impl Operator {
    pub fn dim(&self) -> usize {
        match self {
            Operator::Identity(d) => *d,
            Operator::Diagonal(v) => v.len(),
            Operator::Dense(m) => m.nrows(),
        }
    }

    /// Diagonal 0/1 projector from an indicator.
    pub fn indicator(mask: impl IntoIterator<Item = bool>) -> Self {
        Operator::Diagonal(
            mask.into_iter()
                .map(|b| Complex64::new(if b { 1.0 } else { 0.0 }, 0.0))
                .collect::<Vec<_>>()
                .into(),
        )
    }

    /// `I - P`.
    pub fn complement(&self) -> Self {
        match self {
            Operator::Identity(d) => Operator::Diagonal(CVector::zeros(*d)),
            Operator::Diagonal(v) => Operator::Diagonal(v.map(|x| Complex64::new(1.0, 0.0) - x)),
            Operator::Dense(m) => Operator::Dense(CMatrix::identity(m.nrows(), m.ncols()) - m),
        }
    }

    /// Left-multiplies a `d x r` block.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        match self {
            Operator::Identity(_) => x.clone(),
            Operator::Diagonal(v) => {
                let mut out = x.clone();
                for (mut row, &d) in out.row_iter_mut().zip(v.iter()) {
                    row *= d;
                }
                out
            }
            Operator::Dense(m) => m * x,
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        match self {
            Operator::Identity(d) => CMatrix::identity(*d, *d),
            Operator::Diagonal(v) => CMatrix::from_diagonal(v),
            Operator::Dense(m) => m.clone(),
        }
    }

    fn check_square(&self) -> Result<()> {
        if let Operator::Dense(m) = self {
            if m.nrows() != m.ncols() {
                return Err(Error::InvalidOperator(format!(
                    "operator is {}x{}, not square",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(())
    }

    /// `P^2 = P = P^dagger` within `tol` (max-abs entrywise).
    pub fn check_projector(&self, tol: f64) -> Result<()> {
        self.check_square()?;
        let bad = match self {
            Operator::Identity(_) => None,
            Operator::Diagonal(v) => v
                .iter()
                .map(|&x| (x * x - x).norm().max(x.im.abs()))
                .fold(None, |acc: Option<f64>, e| {
                    Some(acc.map_or(e, |a| a.max(e)))
                })
                .filter(|&e| e > tol),
            Operator::Dense(m) => {
                let herm = max_abs(&(m - m.adjoint()));
                let idem = max_abs(&(m * m - m));
                Some(herm.max(idem)).filter(|&e| e > tol)
            }
        };
        match bad {
            Some(e) => Err(Error::InvalidOperator(format!(
                "not an orthogonal projector (violation {e:e})"
            ))),
            None => Ok(()),
        }
    }

    /// `U^dagger U = I` within `tol`.
    ///
    /// Dense operators above dimension 256 are checked on random probe
    /// vectors, `||U^dagger U v - v|| <= tol ||v||`, rather than by forming
    /// the full product.
    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        self.check_square()?;
        let violation = match self {
            Operator::Identity(_) => 0.0,
            Operator::Diagonal(v) => v.iter().map(|x| (x.norm() - 1.0).abs()).fold(0.0, f64::max),
            Operator::Dense(m) if m.nrows() <= 256 => {
                max_abs(&(m.adjoint() * m - CMatrix::identity(m.nrows(), m.ncols())))
            }
            Operator::Dense(m) => {
                let d = m.nrows();
                let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
                let probes = CMatrix::from_fn(d, 4, |_, _| {
                    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                });
                let back = m.adjoint() * (m * &probes);
                (0..4)
                    .map(|j| (back.column(j) - probes.column(j)).norm() / probes.column(j).norm())
                    .fold(0.0, f64::max)
            }
        };
        if violation > tol {
            return Err(Error::InvalidOperator(format!(
                "not unitary (violation {violation:e})"
            )));
        }
        Ok(())
    }
}

/// Initial density operator and the unitary schedule shared by a family.
#[derive(Debug, Clone)]
pub struct Schedule {
    /// `rho = factor factor^dagger`.
    factor: CMatrix,
    unitaries: Vec<Operator>,
}

impl Schedule {
    /// Pure initial state `|psi><psi|`; `psi` must be normalized.
    pub fn pure(psi: CVector, unitaries: Vec<Operator>) -> Result<Self> {
        let d = psi.len();
        if (psi.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidOperator(format!(
                "initial state norm {} != 1",
                psi.norm()
            )));
        }
        Self::build(CMatrix::from_column_slice(d, 1, psi.as_slice()), unitaries)
    }

    /// Mixed initial state; `rho` must be Hermitian, positive and of unit
    /// trace.
    pub fn mixed(rho: CMatrix, unitaries: Vec<Operator>) -> Result<Self> {
        let d = rho.nrows();
        if rho.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: rho.ncols(),
            });
        }
        check_dim(d)?;
        if max_abs(&(&rho - rho.adjoint())) > OPERATOR_TOL {
            return Err(Error::InvalidOperator(
                "density operator not Hermitian".into(),
            ));
        }
        if (rho.trace().re - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidOperator(format!(
                "density operator trace {} != 1",
                rho.trace()
            )));
        }
        let eig = rho.symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| l < -1e-10) {
            return Err(Error::InvalidOperator(
                "density operator not positive".into(),
            ));
        }
        let cols: Vec<CVector> = eig
            .eigenvalues
            .iter()
            .zip(eig.eigenvectors.column_iter())
            .filter(|(l, _)| **l > 1e-14)
            .map(|(l, v)| v.into_owned() * Complex64::new(l.sqrt(), 0.0))
            .collect();
        Self::build(CMatrix::from_columns(&cols), unitaries)
    }

    fn build(factor: CMatrix, unitaries: Vec<Operator>) -> Result<Self> {
        let d = factor.nrows();
        check_dim(d)?;
        for u in &unitaries {
            if u.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: u.dim(),
                });
            }
            u.check_unitary(OPERATOR_TOL)?;
        }
        Ok(Self { factor, unitaries })
    }

    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn density(&self) -> CMatrix {
        &self.factor * self.factor.adjoint()
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn check_dim(d: usize) -> Result<()> {
    if d > DIMENSION_CAP {
        return Err(Error::DimensionCap {
            dim: d,
            cap: DIMENSION_CAP,
        });
    }
    Ok(())
}

/// One history: a projector for every slot of the schedule.
#[derive(Debug, Clone)]
pub struct History {
    schedule: Arc<Schedule>,
    projectors: Vec<Arc<Operator>>,
}

impl History {
    pub fn new(schedule: Arc<Schedule>, projectors: Vec<Arc<Operator>>) -> Result<Self> {
        if projectors.len() != schedule.len() {
            return Err(Error::DimensionMismatch {
                expected: schedule.len(),
                got: projectors.len(),
            });
        }
        for p in &projectors {
            if p.dim() != schedule.dim() {
                return Err(Error::DimensionMismatch {
                    expected: schedule.dim(),
                    got: p.dim(),
                });
            }
            p.check_projector(OPERATOR_TOL)?;
        }
        Ok(Self {
            schedule,
            projectors,
        })
    }

    pub fn schedule(&self) -> &Arc<Schedule> {
        &self.schedule
    }

    pub fn projectors(&self) -> &[Arc<Operator>] {
        &self.projectors
    }

    /// `C rho^{1/2}`-style image of the initial factor under the chain.
    fn image(&self, x: &CMatrix) -> CMatrix {
        self.schedule
            .unitaries
            .iter()
            .zip(&self.projectors)
            .fold(x.clone(), |acc, (u, y)| y.apply(&u.apply(&acc)))
    }

    pub fn weight(&self) -> f64 {
        frobenius(
            &self.image(&self.schedule.factor),
            &self.image(&self.schedule.factor),
        )
        .re
    }
}

fn frobenius(b: &CMatrix, a: &CMatrix) -> Complex64 {
    // Tr[a b^dagger] = sum conj(b_ij) a_ij
    b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Dense chain operator `Y_n U_n ... Y_1 U_1`.
pub fn chain_operator(h: &History) -> CMatrix {
    let d = h.schedule.dim();
    h.image(&CMatrix::identity(d, d))
}

/// `Tr[C_1 rho C_2^dagger]`.
pub fn history_inner_product(h1: &History, h2: &History) -> Result<Complex64> {
    if !Arc::ptr_eq(&h1.schedule, &h2.schedule) {
        return Err(Error::Domain(
            "histories do not share an initial state and schedule".into(),
        ));
    }
    let x = &h1.schedule.factor;
    Ok(frobenius(&h2.image(x), &h1.image(x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FamilyKind {
    Generic,
    /// Failure histories `F_1..F_n` followed by the survival history `R_n`.
    Theta,
}

#[derive(Debug, Clone)]
pub struct HistoryFamily {
    histories: Vec<History>,
    kind: FamilyKind,
    reliable: Vec<Arc<Operator>>,
}

impl HistoryFamily {
    pub fn new(histories: Vec<History>) -> Result<Self> {
        if let Some(first) = histories.first() {
            if histories
                .iter()
                .any(|h| !Arc::ptr_eq(&h.schedule, &first.schedule))
            {
                return Err(Error::Domain(
                    "family histories must share a schedule".into(),
                ));
            }
        }
        Ok(Self {
            histories,
            kind: FamilyKind::Generic,
            reliable: Vec::new(),
        })
    }

    /// The reliability family for the reliable projectors `E_1..E_n`:
    ///
    /// ```text
    /// F_k = E_1, ..., E_{k-1}, E_k^perp, I, ..., I    (k = 1..n)
    /// R_n = E_1, ..., E_n
    /// ```
    pub fn theta(schedule: Arc<Schedule>, reliable: Vec<Operator>) -> Result<Self> {
        let n = schedule.len();
        if reliable.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: reliable.len(),
            });
        }
        let d = schedule.dim();
        let e: Vec<Arc<Operator>> = reliable.into_iter().map(Arc::new).collect();
        let perp: Vec<Arc<Operator>> = e.iter().map(|p| Arc::new(p.complement())).collect();
        let id = Arc::new(Operator::Identity(d));
        let mut histories = Vec::with_capacity(n + 1);
        for k in 0..n {
            let slots = (0..n)
                .map(|j| match j.cmp(&k) {
                    std::cmp::Ordering::Less => e[j].clone(),
                    std::cmp::Ordering::Equal => perp[j].clone(),
                    std::cmp::Ordering::Greater => id.clone(),
                })
                .collect();
            histories.push(History::new(schedule.clone(), slots)?);
        }
        histories.push(History::new(schedule, e.clone())?);
        Ok(Self {
            histories,
            kind: FamilyKind::Theta,
            reliable: e,
        })
    }

    pub fn histories(&self) -> &[History] {
        &self.histories
    }

    pub fn weights(&self) -> Vec<f64> {
        self.histories.par_iter().map(History::weight).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub max_violation: f64,
}

/// Largest `|<a, b>|` over distinct pairs, compared with `tol`.
pub fn check_consistency(fam: &HistoryFamily, tol: f64) -> Result<ConsistencyReport> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be > 0, got {tol}")));
    }
    let images: Vec<CMatrix> = fam
        .histories
        .par_iter()
        .map(|h| h.image(&h.schedule.factor))
        .collect();
    let n = images.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let max_violation = pairs
        .par_iter()
        .map(|&(i, j)| frobenius(&images[j], &images[i]).norm())
        .reduce(|| 0.0, f64::max);
    Ok(ConsistencyReport {
        consistent: max_violation <= tol,
        max_violation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Survival {
    /// `R(t_k)`, the weight of surviving the first `k` checkpoints.
    pub r_of_t: Vec<f64>,
    /// `W(F_k)`: failure first detected at checkpoint `k`.
    pub lifetime_pmf: Vec<f64>,
}

/// Survival curve and lifetime distribution of a reliability family.
pub fn survival_and_lifetime(fam: &HistoryFamily) -> Result<Survival> {
    if fam.kind != FamilyKind::Theta {
        return Err(Error::Domain(
            "survival analysis needs a family built with HistoryFamily::theta".into(),
        ));
    }
    let report = check_consistency(fam, DEFAULT_CONSISTENCY_TOL)?;
    if !report.consistent {
        return Err(Error::Inconsistent {
            max_violation: report.max_violation,
        });
    }
    let n = fam.reliable.len();
    let weights = fam.weights();
    let lifetime_pmf = weights[..n].to_vec();
    let schedule = fam.histories[0].schedule.clone();
    let d = schedule.dim();
    let id = Arc::new(Operator::Identity(d));
    let r_of_t = (1..=n)
        .map(|k| {
            let slots = (0..n)
                .map(|j| {
                    if j < k {
                        fam.reliable[j].clone()
                    } else {
                        id.clone()
                    }
                })
                .collect();
            History::new(schedule.clone(), slots).map(|h| h.weight())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Survival {
        r_of_t,
        lifetime_pmf,
    })
}

/// `exp(-i H t)` for a Hermitian `H`, through its eigendecomposition.
pub fn unitary_from_hamiltonian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            got: h.ncols(),
        });
    }
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = CVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::new(0.0, -l * t).exp()),
    );
    let mut vd = v.clone();
    for (mut col, &p) in vd.column_iter_mut().zip(phases.iter()) {
        col *= p;
    }
    Ok(vd * v.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ket0() -> CVector {
        CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])
    }

    fn sigma_x_rotation(theta: f64) -> Operator {
        let (s, co) = theta.sin_cos();
        Operator::Dense(CMatrix::from_row_slice(
            2,
            2,
            &[c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)],
        ))
    }

    #[test]
    fn single_slot_projector_chain() {
        let sched = Arc::new(Schedule::pure(ket0(), vec![Operator::Identity(2)]).unwrap());
        let p = Arc::new(Operator::indicator([true, false]));
        let h = History::new(sched, vec![p]).unwrap();
        let chain = chain_operator(&h);
        let expect =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(max_abs(&(chain - expect)) < 1e-15);
        assert!((h.weight() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_projectors_give_unitary_product() {
        let u1 = sigma_x_rotation(0.3);
        let u2 = sigma_x_rotation(0.5);
        let sched = Arc::new(Schedule::pure(ket0(), vec![u1, u2]).unwrap());
        let id = Arc::new(Operator::Identity(2));
        let h = History::new(sched, vec![id.clone(), id]).unwrap();
        let expect = sigma_x_rotation(0.8).to_dense();
        assert!(max_abs(&(chain_operator(&h) - expect)) < 1e-15);
    }

    #[test]
    fn orthogonal_first_projectors_do_not_interfere() {
        let sched = Arc::new(
            Schedule::pure(
                CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]),
                vec![Operator::Identity(2)],
            )
            .unwrap(),
        );
        let p = Arc::new(Operator::indicator([true, false]));
        let q = Arc::new(p.complement());
        let h1 = History::new(sched.clone(), vec![p]).unwrap();
        let h2 = History::new(sched, vec![q]).unwrap();
        assert_eq!(history_inner_product(&h1, &h2).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn single_step_survival_is_cos_squared() {
        let theta = 0.7;
        let sched = Arc::new(Schedule::pure(ket0(), vec![sigma_x_rotation(theta)]).unwrap());
        let fam = HistoryFamily::theta(sched, vec![Operator::indicator([true, false])]).unwrap();
        let s = survival_and_lifetime(&fam).unwrap();
        assert!((s.r_of_t[0] - theta.cos().powi(2)).abs() < 1e-15);
        assert!((s.lifetime_pmf[0] - theta.sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_operators() {
        let not_unitary = Operator::Dense(CMatrix::from_element(2, 2, c(1.0, 0.0)));
        assert!(Schedule::pure(ket0(), vec![not_unitary]).is_err());
        let sched = Arc::new(Schedule::pure(ket0(), vec![Operator::Identity(2)]).unwrap());
        let not_proj = Arc::new(Operator::Diagonal(CVector::from_vec(vec![
            c(0.5, 0.0),
            c(1.0, 0.0),
        ])));
        assert!(History::new(sched.clone(), vec![not_proj]).is_err());
        let wrong_dim = Arc::new(Operator::Identity(3));
        assert!(matches!(
            History::new(sched, vec![wrong_dim]),
            Err(Error::DimensionMismatch { .. })
        ));
        let big = CVector::from_element(DIMENSION_CAP + 1, c(0.0, 0.0));
        let mut big = big;
        big[0] = c(1.0, 0.0);
        assert!(matches!(
            Schedule::pure(big, vec![]),
            Err(Error::DimensionCap { .. })
        ));
    }

    #[test]
    fn generic_family_refused_for_survival() {
        let sched = Arc::new(Schedule::pure(ket0(), vec![Operator::Identity(2)]).unwrap());
        let h = History::new(sched, vec![Arc::new(Operator::Identity(2))]).unwrap();
        let fam = HistoryFamily::new(vec![h]).unwrap();
        assert!(survival_and_lifetime(&fam).is_err());
    }

    #[test]
    fn hamiltonian_exponential_matches_rotation() {
        let h =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.3, 0.0), c(1.3, 0.0), c(0.0, 0.0)]);
        let u = unitary_from_hamiltonian(&h, 0.4).unwrap();
        assert!(max_abs(&(u - sigma_x_rotation(1.3 * 0.4).to_dense())) < 1e-14);
    }
}
