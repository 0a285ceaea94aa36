//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `(T, R, M1, M2)` from the four continuity conditions at `x = 0` and
/// `x = a`, solved by LU.
///
/// Unknowns are `R, M1, P2 = M2 e^{-iqa}, T' = T e^{ika}` so that no entry
/// grows like `e^{|Im q| a}`:
///
/// ```text
/// x = 0:  1 + R = M1 + P2 e^{iqa}
///         k (1 - R) = q (M1 - P2 e^{iqa})
/// x = a:  M1 e^{iqa} + P2 = T'
///         q (M1 e^{iqa} - P2) = k T'
/// ```
pub fn matching_system(
    k: f64,
    v: f64,
    a: f64,
    m: f64,
    hbar: f64,
) -> (Complex64, Complex64, Complex64, Complex64) {
    let q2 = Complex64::new(k * k - 2.0 * m * v / (hbar * hbar), 0.0);
    let mut q = q2.sqrt();
    if q.im < 0.0 {
        q = -q;
    }
    let e = (I * q * a).exp();
    let kc = Complex64::new(k, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    #[rustfmt::skip]
    let mat = Matrix4::new(
        -one, one,  e,      zero,
        kc,   q,    -q * e, zero,
        zero, e,    one,    -one,
        zero, q * e, -q,    -kc,
    );
    let rhs = Vector4::new(one, kc, zero, zero);
    let x = mat.lu().solve(&rhs).expect("matching system is regular");
    let (r, m1, p2, tp) = (x[0], x[1], x[2], x[3]);
    let t = tp * (-I * k * a).exp();
    let m2 = p2 * e;
    (t, r, m1, m2)
}

/// Bisection for `f(x) = 0` on a bracketing interval.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "interval does not bracket a root");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Double-exponential quadrature over a finite interval, applied on 64
/// equal pieces so that narrow peaks in a wide window are resolved.
pub fn de_integral(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    const PIECES: usize = 64;
    let h = (hi - lo) / PIECES as f64;
    (0..PIECES)
        .map(|i| {
            let a = lo + i as f64 * h;
            quadrature::integrate(&f, a, a + h, 1e-15).integral
        })
        .sum()
}

/// `|psi|^2` of a Gaussian packet written out directly from its width,
/// center, and wavenumber (normalized to `|A|^2`).
pub fn gaussian_density(center: f64, width_sq: Complex64, norm_sq: f64, z: f64) -> f64 {
    let var = width_sq.norm_sqr() / width_sq.re;
    norm_sq * (-(z - center).powi(2) / (2.0 * var)).exp()
        / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// Matrix exponential of a small complex matrix by scaled Taylor series.
pub fn expm(a: &nalgebra::DMatrix<Complex64>) -> nalgebra::DMatrix<Complex64> {
    let n = a.nrows();
    let norm = a.iter().map(|x| x.norm()).sum::<f64>();
    let squarings = norm.log2().ceil().max(0.0) as i32 + 4;
    let scaled = a.unscale(2f64.powi(squarings));
    let mut term = nalgebra::DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for j in 1..30 {
        term = &term * &scaled / Complex64::new(j as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}
