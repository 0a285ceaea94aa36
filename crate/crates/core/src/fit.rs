//! Ordinary least squares on `(x, y)` pairs.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

/// Least-squares line `y = slope x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::InsufficientData { got: n, need: 2 });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= f64::EPSILON * f64::EPSILON * (1.0 + mx * mx) * nf {
        return Err(Error::DegenerateFit);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        n_points: n,
    })
}

/// Fits `log y = p log x + c`; every value must be positive.
pub fn power_law_fit(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if let Some(bad) = xs.iter().chain(ys).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Domain(format!(
            "log-log fit needs positive values, got {bad}"
        )));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs: Vec<f64> = (0..12).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14);
        assert!(f.intercept.abs() < 1e-14);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
        assert_eq!(f.n_points, 12);
    }

    #[test]
    fn square_root_law() {
        let xs: Vec<f64> = (1..20).map(|i| i as f64 * 1e-3).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.sqrt()).collect();
        let f = power_law_fit(&xs, &ys).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-13);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_and_domain_errors() {
        assert_eq!(
            linear_fit(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]),
            Err(Error::DegenerateFit)
        );
        assert!(matches!(
            power_law_fit(&[1.0, 0.0], &[1.0, 2.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            linear_fit(&[1.0], &[1.0]),
            Err(Error::InsufficientData { .. })
        ));
    }
}
