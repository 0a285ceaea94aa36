use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use super::config::{FamilyChoice, RunConfig};
use super::{Command, EXIT_CHECK_FAILED, EXIT_OK};
use crate::error::{Error, Result};
use crate::histories::{
    check_consistency, CMatrix, CVector, History, HistoryFamily, Operator, Schedule,
    DEFAULT_CONSISTENCY_TOL,
};
use crate::oracle::{discretize_pipeline, sg_run, transmission_run, GridResolution};
use crate::reliability::{
    default_step, is_near_ideal, measurement_pipeline_with, relation_fit, relation_point,
    scaling_fit, sweep, Regime, ReliabilityReport,
};
use crate::scattering::{momentum_averaged_transmission, Channel};

pub const SWEEP_HEADER: &str = "k0,b,Bx,R,alpha_tilde,beta_tilde,B_measured,delta_B,sensitivity";

const RELATION_MIN_R2: f64 = 0.98;
const SCALING_SLOPE_TOL: f64 = 0.1;

pub(super) fn regime_field(regime: Regime) -> f64 {
    match regime {
        Regime::FirstOrder => 2.0,
        Regime::SecondOrder => 1e-3,
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(r: &ReliabilityReport) -> String {
    [
        r.k0,
        r.b,
        r.bx,
        r.r,
        r.alpha_tilde,
        r.beta_tilde,
        r.b_measured,
        r.delta_b,
        r.sensitivity,
    ]
    .iter()
    .map(|&x| num(x))
    .collect::<Vec<_>>()
    .join(",")
}

/// Writes CSV text to the configured file, or to `stdout`.
fn emit(cfg: &RunConfig, stdout: &mut dyn Write, body: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("cannot write output: {e}"));
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).map_err(io)?);
            w.write_all(body.as_bytes()).map_err(io)?;
            w.flush().map_err(io)
        }
        None => stdout.write_all(body.as_bytes()).map_err(io),
    }
}

fn say(stdout: &mut dyn Write, line: String) -> Result<()> {
    writeln!(stdout, "{line}").map_err(|e| Error::Config(format!("cannot write output: {e}")))
}

pub(super) fn dispatch(cmd: Command, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::RunPoint => run_point(cfg, stdout),
        Command::SweepGrid => sweep_grid(cfg, stdout),
        Command::SweepField => sweep_field(cfg, stdout),
        Command::FitRelation => fit_relation(cfg, stdout),
        Command::FitScaling => fit_scaling(cfg, stdout),
        Command::CheckConsistency => check(cfg, stdout),
        Command::OracleCompare => oracle_compare(cfg, stdout),
    }
}

fn run_point(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    if cfg.k0_range.is_some() || cfg.b_range.is_some() || cfg.bx_range.is_some() {
        return Err(Error::Config("run-point takes no sweep ranges".into()));
    }
    let p = &cfg.params;
    let rep = measurement_pipeline_with(p, cfg.reading, default_step(p.bx))?;
    emit(cfg, stdout, &format!("{SWEEP_HEADER}\n{}\n", row(&rep)))?;
    say(
        stdout,
        format!(
            "run-point: R={:.6} delta_B={:.6e} sensitivity={:.6e} reading={} degenerate_sensitivity={}",
            rep.r,
            rep.delta_b,
            rep.sensitivity,
            cfg.reading.name(),
            rep.degenerate_sensitivity
        ),
    )?;
    Ok(EXIT_OK)
}

fn axis(range: Option<super::config::Range>, fixed: f64) -> Vec<f64> {
    range.map_or_else(|| vec![fixed], |r| r.values())
}

fn grid_reports(cfg: &RunConfig, bx: f64) -> Result<Vec<ReliabilityReport>> {
    let p = &cfg.params;
    sweep(
        p,
        &axis(cfg.k0_range, p.k0),
        &axis(cfg.b_range, p.b),
        &axis(cfg.bx_range, bx),
        cfg.reading,
    )
}

fn sweep_grid(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    if cfg.k0_range.is_none() || cfg.b_range.is_none() {
        return Err(Error::Config(
            "sweep-grid needs k0_range and b_range".into(),
        ));
    }
    let reports = grid_reports(cfg, cfg.params.bx)?;
    let mut body = format!("{SWEEP_HEADER}\n");
    for r in &reports {
        body.push_str(&row(r));
        body.push('\n');
    }
    emit(cfg, stdout, &body)?;
    let (lo, hi) = reports
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| {
            (l.min(r.r), h.max(r.r))
        });
    say(
        stdout,
        format!(
            "sweep-grid: {} rows, k0 {}, b {}, R in [{lo:.6}, {hi:.6}]",
            reports.len(),
            cfg.k0_range.expect("checked").describe(),
            cfg.b_range.expect("checked").describe()
        ),
    )?;
    Ok(EXIT_OK)
}

fn sweep_field(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let range = cfg
        .bx_range
        .ok_or_else(|| Error::Config("sweep-field needs Bx_range".into()))?;
    let p = &cfg.params;
    let reports = sweep(p, &[p.k0], &[p.b], &range.values(), cfg.reading)?;
    let mut body = format!("{SWEEP_HEADER},one_minus_R\n");
    for r in &reports {
        body.push_str(&format!("{},{}\n", row(r), num(1.0 - r.r)));
    }
    emit(cfg, stdout, &body)?;
    say(
        stdout,
        format!(
            "sweep-field: {} rows at k0={}, b={}, Bx {}",
            reports.len(),
            p.k0,
            p.b,
            range.describe()
        ),
    )?;
    Ok(EXIT_OK)
}

/// Reads reports back from a sweep CSV; columns are located by name.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<ReliabilityReport>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Config(format!("{} is empty", path.display())))?
        .split(',')
        .map(str::trim)
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| Error::Config(format!("{} lacks column `{name}`", path.display())))
    };
    let idx: Vec<usize> = SWEEP_HEADER.split(',').map(col).collect::<Result<_>>()?;
    lines
        .enumerate()
        .map(|(i, line)| {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            let get = |j: usize| -> Result<f64> {
                cells
                    .get(idx[j])
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| {
                        Error::Config(format!("{} row {}: bad value", path.display(), i + 2))
                    })
            };
            let sensitivity = get(8)?;
            Ok(ReliabilityReport {
                k0: get(0)?,
                b: get(1)?,
                bx: get(2)?,
                r: get(3)?,
                alpha_tilde: get(4)?,
                beta_tilde: get(5)?,
                b_measured: get(6)?,
                delta_b: get(7)?,
                sensitivity,
                degenerate_sensitivity: sensitivity == 0.0,
                transmitted: f64::NAN,
            })
        })
        .collect()
}

fn reports_for(cfg: &RunConfig, bx: f64) -> Result<Vec<ReliabilityReport>> {
    match &cfg.input {
        Some(path) => read_sweep_csv(path),
        None => grid_reports(cfg, bx),
    }
}

fn fit_relation(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let reports = reports_for(cfg, cfg.params.bx)?;
    let rf = relation_fit(&reports)?;
    let mut body = format!("{SWEEP_HEADER},S_abs_delta_B,one_minus_R,near_ideal\n");
    for r in &reports {
        let (x, y) = relation_point(r);
        body.push_str(&format!(
            "{},{},{},{}\n",
            row(r),
            num(x),
            num(y),
            u8::from(is_near_ideal(r))
        ));
    }
    emit(cfg, stdout, &body)?;
    let f = rf.fit;
    let pass = f.r_squared >= RELATION_MIN_R2;
    say(
        stdout,
        format!(
            "fit-relation: n={} excluded={} slope={:.6e} intercept={:.6e} intercept/range={:.4} r_squared={:.6} -> {}",
            f.n_points,
            rf.excluded,
            f.slope,
            f.intercept,
            f.intercept.abs() / rf.y_range,
            f.r_squared,
            if pass { "pass" } else { "fail" }
        ),
    )?;
    if let (Some(bx2), None) = (cfg.bx_compare, &cfg.input) {
        let other = relation_fit(&reports_for(cfg, bx2)?)?.fit;
        say(
            stdout,
            format!(
                "fit-relation: Bx={} slope={:.6e}; relative slope difference {:.4}",
                bx2,
                other.slope,
                (other.slope - f.slope).abs() / f.slope.abs()
            ),
        )?;
    }
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn fit_scaling(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    const MIN_POINTS: usize = 10;
    let reports = reports_for(cfg, cfg.params.bx)?;
    if reports.len() < MIN_POINTS {
        return Err(Error::InsufficientData {
            got: reports.len(),
            need: MIN_POINTS,
        });
    }
    let f = scaling_fit(&reports, cfg.regime)?;
    let mut body = format!("{SWEEP_HEADER},one_minus_R,abs_delta_B\n");
    for r in &reports {
        body.push_str(&format!(
            "{},{},{}\n",
            row(r),
            num(1.0 - r.r),
            num(r.delta_b.abs())
        ));
    }
    emit(cfg, stdout, &body)?;
    let target = cfg.regime.target_slope();
    let pass = (f.slope - target).abs() <= SCALING_SLOPE_TOL;
    say(
        stdout,
        format!(
            "fit-scaling: regime={:?} Bx={} n={} slope={:.4} (target {target} +- {SCALING_SLOPE_TOL}) r_squared={:.4} -> {}",
            cfg.regime,
            cfg.params.bx,
            f.n_points,
            f.slope,
            f.r_squared,
            if pass { "pass" } else { "fail" }
        ),
    )?;
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn qubit(re: [f64; 4]) -> Operator {
    Operator::Dense(CMatrix::from_row_slice(
        2,
        2,
        &re.map(|x| Complex64::new(x, 0.0)),
    ))
}

/// Qubit families used by `check-consistency` besides the pipeline.
pub fn toy_family(choice: FamilyChoice) -> Result<HistoryFamily> {
    let ket0 = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let p0 = Arc::new(Operator::indicator([true, false]));
    let p1 = Arc::new(p0.complement());
    match choice {
        FamilyChoice::Identity => {
            let s = Arc::new(Schedule::pure(ket0, vec![Operator::Identity(2)])?);
            let id = Arc::new(Operator::Identity(2));
            let zero = Arc::new(id.complement());
            HistoryFamily::new(vec![
                History::new(s.clone(), vec![id])?,
                History::new(s, vec![zero])?,
            ])
        }
        _ => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let hadamard = qubit([h, h, h, -h]);
            let s = Arc::new(Schedule::pure(ket0, vec![hadamard.clone(), hadamard])?);
            HistoryFamily::new(vec![
                History::new(s.clone(), vec![p0.clone(), p0.clone()])?,
                History::new(s, vec![p1, p0])?,
            ])
        }
    }
}

fn check(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let tol = DEFAULT_CONSISTENCY_TOL;
    let (family, extra) = match cfg.family {
        FamilyChoice::Pipeline => {
            let d = discretize_pipeline(&cfg.params, cfg.dim)?;
            let w = d.family.weights();
            let closed =
                measurement_pipeline_with(&cfg.params, cfg.reading, default_step(cfg.params.bx))?.r;
            let extra = format!(
                "weights={:?} sum={:.12} W(R)={:.9} closed_form_R={:.9} |diff|={:.3e}",
                w,
                w.iter().sum::<f64>(),
                w[w.len() - 1],
                closed,
                (w[w.len() - 1] - closed).abs()
            );
            (d.family, Some(extra))
        }
        other => (toy_family(other)?, None),
    };
    let rep = check_consistency(&family, tol)?;
    say(
        stdout,
        format!(
            "check-consistency: family={:?} histories={} max_violation={:.3e} tol={tol:e} -> {}",
            cfg.family,
            family.histories().len(),
            rep.max_violation,
            if rep.consistent {
                "consistent"
            } else {
                "inconsistent"
            }
        ),
    )?;
    if let Some(e) = extra {
        say(stdout, format!("check-consistency: {e}"))?;
    }
    Ok(if rep.consistent {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

struct Comparison {
    name: &'static str,
    closed: f64,
    oracle: f64,
    tol: f64,
}

impl Comparison {
    fn pass(&self) -> bool {
        (self.closed - self.oracle).abs() <= self.tol
    }
}

fn oracle_compare(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let p = &cfg.params;
    let tr_res = GridResolution {
        dz: cfg.oracle_dz,
        dt: cfg.oracle_dt,
    };
    let sg_res = GridResolution {
        dz: cfg.sg_dz,
        dt: cfg.sg_dt,
    };
    let (runs, sg) = rayon::join(
        || {
            [Channel::Plus, Channel::Minus]
                .map(|ch| transmission_run(p, ch, tr_res, None).map(|r| (ch, r.probability)))
        },
        || sg_run(p, sg_res),
    );
    let sg = sg?;
    let closed = measurement_pipeline_with(p, cfg.reading, default_step(p.bx))?;
    let mut rows = Vec::new();
    for run in runs {
        let (ch, prob) = run?;
        rows.push(Comparison {
            name: match ch {
                Channel::Plus => "transmitted_plus",
                Channel::Minus => "transmitted_minus",
            },
            closed: momentum_averaged_transmission(p, ch)?,
            oracle: prob,
            tol: 1e-4,
        });
    }
    rows.push(Comparison {
        name: "alpha_tilde",
        closed: closed.alpha_tilde,
        oracle: sg.alpha_tilde,
        tol: 1e-6,
    });
    rows.push(Comparison {
        name: "beta_tilde",
        closed: closed.beta_tilde,
        oracle: sg.beta_tilde,
        tol: 1e-6,
    });
    rows.push(Comparison {
        name: "R",
        closed: closed.r,
        oracle: sg.r,
        tol: 1e-6,
    });
    let mut body = String::from("quantity,closed_form,oracle,abs_diff,tolerance,pass\n");
    for c in &rows {
        body.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.name,
            num(c.closed),
            num(c.oracle),
            num((c.closed - c.oracle).abs()),
            num(c.tol),
            c.pass()
        ));
    }
    emit(cfg, stdout, &body)?;
    let all = rows.iter().all(Comparison::pass);
    say(
        stdout,
        format!(
            "oracle-compare: {}/{} quantities within tolerance -> {}",
            rows.iter().filter(|c| c.pass()).count(),
            rows.len(),
            if all { "pass" } else { "fail" }
        ),
    )?;
    Ok(if all { EXIT_OK } else { EXIT_CHECK_FAILED })
}
