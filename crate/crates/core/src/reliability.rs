//! Reliability of the full sensing pipeline, the systematic error of the
//! inferred field, the apparatus sensitivity and the regressions that tie
//! them together.
//!
//! For a transmitted spinor `c1 |up> + c2 |down>` the reliability is the
//! weight of the survival history: the packet transmitted through the field
//! and each spin component found in its own half-plane after the gradient,
//!
//! ```text
//! R = |c1|^2 int_0^inf |psi_up|^2 + |c2|^2 int_-inf^0 |psi_down|^2.
//! ```

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::{linear_fit, power_law_fit, FitResult};
use crate::model::{erf, erfc, half_line_mass, ModelParams, Side, SpinorPacket};
use crate::scattering::scatter_spinor_at;
use crate::stern_gerlach::{sg_evolve, SgOutcome};

/// Which apparatus reading the sensitivity differentiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reading {
    /// Lower half-plane population.
    #[default]
    BetaTilde,
    /// Inferred field.
    BMeasured,
}

impl Reading {
    pub fn name(self) -> &'static str {
        match self {
            Reading::BetaTilde => "beta_tilde",
            Reading::BMeasured => "B_measured",
        }
    }
}

impl std::str::FromStr for Reading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta_tilde" => Ok(Reading::BetaTilde),
            "B_measured" => Ok(Reading::BMeasured),
            other => Err(Error::Config(format!(
                "unknown reading `{other}` (expected beta_tilde or B_measured)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReliabilityReport {
    pub r: f64,
    pub alpha_tilde: f64,
    pub beta_tilde: f64,
    pub b_measured: f64,
    /// `B_measured - Bx`.
    pub delta_b: f64,
    pub sensitivity: f64,
    /// Set when the sensitivity vanishes identically (zero field).
    pub degenerate_sensitivity: bool,
    /// `|c1|^2 + |c2|^2`, the probability of transmission.
    pub transmitted: f64,
    pub k0: f64,
    pub b: f64,
    pub bx: f64,
}

/// Pipeline evaluated at one (possibly negative) field value.
#[derive(Debug, Clone, Copy)]
pub struct PipelineState {
    pub spinor: SpinorPacket,
    pub outcome: SgOutcome,
    pub r: f64,
}

impl PipelineState {
    fn reading(&self, which: Reading) -> f64 {
        match which {
            Reading::BetaTilde => self.outcome.beta_tilde,
            Reading::BMeasured => self.outcome.b_measured,
        }
    }
}

/// Runs scattering and the gradient stage at field `bx`; negative values
/// are allowed (the pipeline is even in the field).
pub fn evaluate_at(params: &ModelParams, bx: f64) -> Result<PipelineState> {
    let spinor = scatter_spinor_at(params, bx)?;
    let outcome = sg_evolve(&spinor, params.f, params.t2(), params)?;
    let r = spinor.up_coeff.norm_sqr() * half_line_mass(&outcome.packet_up, Side::Positive)
        + spinor.down_coeff.norm_sqr() * half_line_mass(&outcome.packet_down, Side::Negative);
    Ok(PipelineState { spinor, outcome, r })
}

/// Default central-difference step, `max(1e-6, 1e-6 Bx)`.
pub fn default_step(bx: f64) -> f64 {
    (1e-6 * bx).max(1e-6)
}

fn check_step(h: f64, bx: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) || h < 1e3 * f64::EPSILON * bx.abs() {
        return Err(Error::StepUnderflow { h, field: bx });
    }
    Ok(())
}

pub fn measurement_pipeline(params: &ModelParams) -> Result<ReliabilityReport> {
    measurement_pipeline_with(params, Reading::default(), default_step(params.bx))
}

pub fn measurement_pipeline_with(
    params: &ModelParams,
    reading: Reading,
    h: f64,
) -> Result<ReliabilityReport> {
    params.validate()?;
    let state = evaluate_at(params, params.bx)?;
    let s = sensitivity(params, h, reading)?;
    Ok(ReliabilityReport {
        r: state.r,
        alpha_tilde: state.outcome.alpha_tilde,
        beta_tilde: state.outcome.beta_tilde,
        b_measured: state.outcome.b_measured,
        delta_b: state.outcome.b_measured - params.bx,
        sensitivity: s,
        degenerate_sensitivity: params.bx == 0.0 || s == 0.0,
        transmitted: state.spinor.norm_sq(),
        k0: params.k0,
        b: params.b,
        bx: params.bx,
    })
}

/// Central difference of the chosen reading with respect to the field.
///
/// For `Bx < h` the lower point sits at a negative field; the pipeline is
/// even in `Bx`, so this is the mirror image and the zero-field derivative
/// comes out exactly zero.
pub fn sensitivity(params: &ModelParams, h: f64, reading: Reading) -> Result<f64> {
    check_step(h, params.bx)?;
    let hi = evaluate_at(params, params.bx + h)?;
    let lo = evaluate_at(params, params.bx - h)?;
    Ok((hi.reading(reading) - lo.reading(reading)) / (2.0 * h))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorDerivative {
    Value(f64),
    /// `beta_tilde` vanished; the expression has no finite value.
    Degenerate,
}

/// `d(delta B)/dBx` from the readout populations and their derivatives:
///
/// ```text
/// (hbar/t1) sqrt(b/a) (a b' - b a') / (2 b (a + b)) - 1
/// ```
pub fn error_derivative(params: &ModelParams, h: f64) -> Result<ErrorDerivative> {
    check_step(h, params.bx)?;
    let mid = evaluate_at(params, params.bx)?.outcome;
    let hi = evaluate_at(params, params.bx + h)?.outcome;
    let lo = evaluate_at(params, params.bx - h)?.outcome;
    let (a, b) = (mid.alpha_tilde, mid.beta_tilde);
    if b <= 1e-12 * (a + b) {
        return Ok(ErrorDerivative::Degenerate);
    }
    let da = (hi.alpha_tilde - lo.alpha_tilde) / (2.0 * h);
    let db = (hi.beta_tilde - lo.beta_tilde) / (2.0 * h);
    let value =
        params.field_per_radian() * (b / a).sqrt() * (a * db - b * da) / (2.0 * b * (a + b)) - 1.0;
    Ok(ErrorDerivative::Value(value))
}

/// Which error function enters the applicability threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MinFieldForm {
    /// `sqrt(erfc(b / b0))`: decreases to zero for long gradients.
    #[default]
    Complementary,
    /// `sqrt(erf(b / b0))`, literal transcription; grows with `b`.
    Literal,
}

/// `b0 = sqrt(2) hbar k0 / (f m w1)` with `w1 = |s1| / sigma` the real
/// spread of the z packet entering the gradient.
pub fn characteristic_length(params: &ModelParams) -> f64 {
    let w1 = params.entry_width_sq().norm() / params.sigma;
    std::f64::consts::SQRT_2 * params.hbar * params.k0 / (params.f * params.m * w1)
}

/// Smallest field for which the first-order relation applies.
pub fn applicability_min_field(params: &ModelParams) -> f64 {
    applicability_min_field_with(params, MinFieldForm::Complementary)
}

pub fn applicability_min_field_with(params: &ModelParams, form: MinFieldForm) -> f64 {
    let x = params.b / characteristic_length(params);
    match form {
        MinFieldForm::Complementary => erfc(x).sqrt(),
        MinFieldForm::Literal => erf(x).sqrt(),
    }
}

/// Reports inside the near-ideal window `R > 0.95`, `|dB|/Bx < 0.1`.
pub fn is_near_ideal(rep: &ReliabilityReport) -> bool {
    rep.bx > 0.0 && rep.r > 0.95 && (rep.delta_b.abs() / rep.bx) < 0.1
}

/// `(S |dB|, 1 - R)` for one report.
pub fn relation_point(rep: &ReliabilityReport) -> (f64, f64) {
    (rep.sensitivity * rep.delta_b.abs(), 1.0 - rep.r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationFit {
    pub fit: FitResult,
    pub excluded: usize,
    /// Spread of `1 - R` over the points used.
    pub y_range: f64,
}

/// Least-squares fit of `1 - R` against `S |dB|` over the near-ideal reports.
pub fn relation_fit(reports: &[ReliabilityReport]) -> Result<RelationFit> {
    const MIN_POINTS: usize = 10;
    let (xs, ys): (Vec<f64>, Vec<f64>) = reports
        .iter()
        .filter(|r| is_near_ideal(r))
        .map(relation_point)
        .unzip();
    if xs.len() < MIN_POINTS {
        return Err(Error::InsufficientData {
            got: xs.len(),
            need: MIN_POINTS,
        });
    }
    let fit = linear_fit(&xs, &ys)?;
    let (lo, hi) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &y| {
            (l.min(y), h.max(y))
        });
    Ok(RelationFit {
        fit,
        excluded: reports.len() - xs.len(),
        y_range: hi - lo,
    })
}

/// Scaling regime of `|dB|` against `1 - R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    FirstOrder,
    SecondOrder,
}

impl Regime {
    pub fn target_slope(self) -> f64 {
        match self {
            Regime::FirstOrder => 1.0,
            Regime::SecondOrder => 0.5,
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first_order" => Ok(Regime::FirstOrder),
            "second_order" => Ok(Regime::SecondOrder),
            other => Err(Error::Config(format!(
                "unknown regime `{other}` (expected first_order or second_order)"
            ))),
        }
    }
}

/// Log-log fit of `|dB|` against `1 - R`. The regime only names the
/// expected slope; the fit itself is the same.
pub fn scaling_fit(reports: &[ReliabilityReport], _regime: Regime) -> Result<FitResult> {
    let mut pts: Vec<(f64, f64)> = reports
        .iter()
        .map(|r| (1.0 - r.r, r.delta_b.abs()))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    power_law_fit(&xs, &ys)
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Evaluates the pipeline on the `k0 x b x Bx` grid in parallel. The output
/// order is fixed: `k0` outermost, then `b`, then `Bx`.
pub fn sweep(
    base: &ModelParams,
    k0s: &[f64],
    bs: &[f64],
    bxs: &[f64],
    reading: Reading,
) -> Result<Vec<ReliabilityReport>> {
    let points: Vec<ModelParams> = k0s
        .iter()
        .flat_map(|&k0| {
            bs.iter().flat_map(move |&b| {
                bxs.iter()
                    .map(move |&bx| base.with_k0_b(k0, b).with_field(bx))
            })
        })
        .collect();
    points
        .par_iter()
        .map(|p| measurement_pipeline_with(p, reading, default_step(p.bx)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_limit_is_fully_reliable() {
        let p = ModelParams {
            bx: 0.0,
            b: 2000.0,
            ..Default::default()
        };
        let rep = measurement_pipeline(&p).unwrap();
        assert!((rep.r - 1.0).abs() < 1e-6);
        assert_eq!(rep.delta_b, 0.0);
        assert_eq!(rep.sensitivity, 0.0);
        assert!(rep.degenerate_sensitivity);
    }

    #[test]
    fn reliability_bounded_by_transmission() {
        let p = ModelParams::default();
        let rep = measurement_pipeline(&p).unwrap();
        assert!(rep.r > 0.0 && rep.r <= rep.transmitted + 1e-12);
        assert!((rep.alpha_tilde + rep.beta_tilde - rep.transmitted).abs() < 1e-12);
    }

    #[test]
    fn sensitivity_peaks_at_symmetric_point_for_near_ideal_apparatus() {
        // large k0 and long gradient: scattering and overlap negligible
        let base = ModelParams {
            k0: 400.0,
            b: 400_000.0,
            a: 3.0,
            ..Default::default()
        };
        let sym = std::f64::consts::PI * base.field_per_radian() / 4.0;
        let s = |bx: f64| sensitivity(&base.with_field(bx), 1e-4, Reading::BetaTilde).unwrap();
        let at = s(sym);
        assert!(at > s(0.9 * sym) && at > s(1.1 * sym));
        assert_eq!(s(0.0), 0.0);
        let theta = base.precession_angle(sym);
        let analytic = (2.0 * theta).sin() / base.field_per_radian();
        assert!((at - analytic).abs() < 1e-6 * analytic);
    }

    #[test]
    fn step_underflow() {
        let p = ModelParams::default().with_field(1e3);
        assert!(matches!(
            sensitivity(&p, 1e-14, Reading::BetaTilde),
            Err(Error::StepUnderflow { .. })
        ));
        assert!(sensitivity(&p, 0.0, Reading::BetaTilde).is_err());
    }

    #[test]
    fn min_field_limits() {
        let p = ModelParams::default();
        let b0 = characteristic_length(&p);
        assert_eq!(applicability_min_field(&p.with_k0_b(p.k0, 1e-300)), 1.0);
        let at_b0 = applicability_min_field(&ModelParams { b: b0, ..p });
        assert!((at_b0 - erfc(1.0).sqrt()).abs() < 1e-15);
        assert!((at_b0 - 0.397).abs() < 1e-3);
        assert!(applicability_min_field(&ModelParams { b: 40.0 * b0, ..p }) < 1e-100);
        let lit = applicability_min_field_with(&ModelParams { b: b0, ..p }, MinFieldForm::Literal);
        assert!((lit - erf(1.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn degenerate_error_derivative() {
        let p = ModelParams {
            bx: 0.0,
            b: 2000.0,
            ..Default::default()
        };
        assert_eq!(
            error_derivative(&p, 1e-6).unwrap(),
            ErrorDerivative::Degenerate
        );
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(2.0, 15.0, 50);
        assert_eq!(v.len(), 50);
        assert_eq!(v[0], 2.0);
        assert_eq!(v[49], 15.0);
    }

    #[test]
    fn sweep_order_is_k0_major() {
        let base = ModelParams::default();
        let reps = sweep(
            &base,
            &[5.0, 6.0],
            &[30.0, 40.0],
            &[2.0],
            Reading::BetaTilde,
        )
        .unwrap();
        let order: Vec<(f64, f64)> = reps.iter().map(|r| (r.k0, r.b)).collect();
        assert_eq!(
            order,
            vec![(5.0, 30.0), (5.0, 40.0), (6.0, 30.0), (6.0, 40.0)]
        );
    }
}
