//! Integer-order Bessel functions of real argument and the Laplace–Bessel
//! closed forms used to extract the slowly decaying parts of the spectral
//! integrals.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest Bessel order any caller is allowed to request.
pub const MAX_BESSEL_ORDER: usize = 64;

/// `∫₁^∞ J₀²(u)/u du`, evaluated to double precision with mpmath.
pub const J0_SQUARED_TAIL: f64 = 0.343_883_108_485_190_97;

/// The same constant as printed (ten digits) in the literature.
pub const J0_SQUARED_TAIL_PRINTED: f64 = 0.343_883_108_2;

const RESCALE_ABOVE: f64 = 1e250;

/// Orders `0..=max_order` of the Bessel functions, validated against [`MAX_BESSEL_ORDER`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BesselOrderRange {
    max_order: usize,
}

impl BesselOrderRange {
    pub fn new(max_order: usize) -> Result<Self> {
        if max_order > MAX_BESSEL_ORDER {
            return Err(Error::InvalidArgument(format!(
                "Bessel order {max_order} exceeds the supported maximum {MAX_BESSEL_ORDER}"
            )));
        }
        Ok(Self { max_order })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn len(&self) -> usize {
        self.max_order + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `J_n(x)` for `n <= 64`.
pub fn bessel_j(n: usize, x: f64) -> f64 {
    let mut buf = [0.0; MAX_BESSEL_ORDER + 1];
    let n = n.min(MAX_BESSEL_ORDER);
    bessel_j_into(x, &mut buf[..=n]);
    buf[n]
}

/// `[J_0(x), ..., J_max(x)]`.
pub fn bessel_j_batch(range: BesselOrderRange, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; range.len()];
    bessel_j_into(x, &mut out);
    out
}

/// Fills `out[n] = J_n(x)` for `n < out.len()` without allocating.
pub fn bessel_j_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let n_max = out.len() - 1;
    let ax = x.abs();
    if ax == 0.0 {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[0] = 1.0;
        return;
    }
    if ax > 30.0_f64.max(2.0 * n_max as f64) {
        let (j0, j1) = hankel_j0_j1(ax);
        out[0] = j0;
        if n_max >= 1 {
            out[1] = j1;
        }
        for n in 1..n_max {
            out[n + 1] = (2.0 * n as f64 / ax) * out[n] - out[n - 1];
        }
    } else {
        miller(ax, out);
    }
    if x < 0.0 {
        out.iter_mut().skip(1).step_by(2).for_each(|v| *v = -*v);
    }
}

fn miller(x: f64, out: &mut [f64]) {
    let n_max = out.len() - 1;
    let reach = (n_max as f64).max(x);
    let mut start = (reach + 20.0 + (40.0 * reach).sqrt()).ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        if k <= n_max {
            out[k] = cur;
        }
        let prev = (2.0 * k as f64 / x) * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            cur *= s;
            next *= s;
            norm *= s;
            for v in out.iter_mut().skip(k.min(n_max + 1)) {
                *v *= s;
            }
        }
    }
    out[0] = cur;
    norm += cur;
    let inv = 1.0 / norm;
    out.iter_mut().for_each(|v| *v *= inv);
}

/// Hankel asymptotic expansions for `J_0` and `J_1`, accurate to roundoff for `x >= 30`.
fn hankel_j0_j1(x: f64) -> (f64, f64) {
    let eval = |nu: f64| {
        let mu = 4.0 * nu * nu;
        let (mut p, mut q) = (1.0, 0.0);
        let mut term = 1.0;
        let mut last = f64::INFINITY;
        for k in 1..60 {
            let odd = (2 * k - 1) as f64;
            term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
            if term.abs() >= last {
                break;
            }
            last = term.abs();
            match k % 4 {
                1 => q += term,
                2 => p -= term,
                3 => q -= term,
                _ => p += term,
            }
            if term.abs() < 1e-18 {
                break;
            }
        }
        let chi = x - (0.5 * nu + 0.25) * PI;
        (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
    };
    (eval(0.0), eval(1.0))
}

fn check_laplace(b: Complex64, h: f64) -> Result<()> {
    if !(b.re > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Laplace–Bessel integral diverges for Re(b) = {} <= 0",
            b.re
        )));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("h = {h} must be > 0")));
    }
    Ok(())
}

/// `h / (√(b²+h²) + b)`, the cancellation-free form of `(√(b²+h²) − b)/h`.
fn laplace_ratio(b: Complex64, h: f64) -> (Complex64, Complex64) {
    let r = (b * b + h * h).sqrt();
    (h / (r + b), r)
}

/// `∫₀^∞ e^{−b t} J_m(h t) dt`.
pub fn laplace_bessel_0(b: Complex64, h: f64, m: usize) -> Result<Complex64> {
    check_laplace(b, h)?;
    let (ratio, r) = laplace_ratio(b, h);
    Ok(ratio.powi(m as i32) / r)
}

/// `∫₀^∞ e^{−b t} J_m(h t) / t dt` for `m >= 1`.
pub fn laplace_bessel_over_k(b: Complex64, h: f64, m: usize) -> Result<Complex64> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "order 0 diverges logarithmically with the 1/t weight".into(),
        ));
    }
    check_laplace(b, h)?;
    let (ratio, _) = laplace_ratio(b, h);
    Ok(ratio.powi(m as i32) / m as f64)
}

/// `∫₀^∞ (e^{−b t} J_0(h t) − e^{−c t}) / t dt` with `Re(c) > 0`.
pub fn laplace_bessel_0_over_k_regularized(b: Complex64, h: f64, c: Complex64) -> Result<Complex64> {
    check_laplace(b, h)?;
    if !(c.re > 0.0) {
        return Err(Error::InvalidArgument("regularizing exponent needs Re(c) > 0".into()));
    }
    let (_, r) = laplace_ratio(b, h);
    Ok((2.0 * c / (b + r)).ln())
}

/// Truncated Gauss series `₂F₁(a, b; c; z)` for `|z| < 1`.
pub fn hypergeometric_2f1_series(a: f64, b: f64, c: f64, z: Complex64, terms: usize) -> Complex64 {
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for n in 0..terms {
        let n = n as f64;
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// `∫₀^∞ e^{−b t} J_m(h t)/t dt` through its hypergeometric representation; valid for `|h/b| < 1`.
pub fn laplace_bessel_over_k_series(b: Complex64, h: f64, m: usize) -> Result<Complex64> {
    if m == 0 {
        return Err(Error::InvalidArgument("order 0 diverges".into()));
    }
    let z = -(h / b) * (h / b);
    if z.norm() >= 1.0 {
        return Err(Error::InvalidArgument(format!("|h/b|² = {} outside the series disk", z.norm())));
    }
    let m_f = m as f64;
    let f = hypergeometric_2f1_series(0.5 * m_f, 0.5 * (m_f + 1.0), m_f + 1.0, z, 4000);
    Ok((h / (2.0 * b)).powi(m as i32) / m_f * f)
}

/// Stored value of `∫₁^∞ J₀²(u)/u du`.
pub fn j0_squared_tail_constant() -> f64 {
    J0_SQUARED_TAIL
}

#[cfg(test)]
mod tests {
    use super::*;

    // Power series oracle, independent of the recurrence.
    fn series_j(n: usize, x: f64) -> f64 {
        let half = x / 2.0;
        let mut term = half.powi(n as i32);
        for k in 1..=n {
            term /= k as f64;
        }
        let mut sum = term;
        for k in 1..40 {
            term *= -half * half / (k as f64 * (k + n) as f64);
            sum += term;
        }
        sum
    }

    // Bessel's integral with the trapezoid rule, spectrally accurate for the periodic integrand.
    fn integral_j(n: usize, x: f64) -> f64 {
        let m = 4000.max(2 * x as usize + 400);
        let mut s = 0.0;
        for i in 0..m {
            let t = PI * (i as f64 + 0.5) / m as f64;
            s += (n as f64 * t - x * t.sin()).cos();
        }
        s / m as f64
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        for n in 1..10 {
            assert_eq!(bessel_j(n, 0.0), 0.0);
        }
    }

    #[test]
    fn first_zero_of_j0() {
        let x = 2.404_825_557_695_773;
        assert!(bessel_j(0, x).abs() < 1e-10);
        assert!(series_j(0, x).abs() < 1e-10);
    }

    #[test]
    fn against_power_series() {
        assert!((bessel_j(3, 5.0) - series_j(3, 5.0)).abs() < 1e-12);
        for n in [0, 1, 2, 5, 8, 13] {
            for x in [0.01, 0.3, 1.0, 4.5, 9.0] {
                let e = (bessel_j(n, x) - series_j(n, x)).abs();
                assert!(e < 1e-13, "n={n} x={x} err={e}");
            }
        }
    }

    #[test]
    fn against_bessel_integral() {
        for n in [0, 1, 2, 7, 20, 40, 64] {
            for x in [0.5, 12.0, 29.9, 30.1, 55.0, 128.0, 129.0, 700.0, 9999.0] {
                let e = (bessel_j(n, x) - integral_j(n, x)).abs();
                assert!(e < 1e-12, "n={n} x={x} err={e}");
            }
        }
    }

    #[test]
    fn crossover_overlap() {
        // Both branches evaluated on either side of the switch point.
        for &x in &[30.0, 35.0, 60.0] {
            let mut a = [0.0; 9];
            miller(x, &mut a);
            let (j0, j1) = hankel_j0_j1(x);
            assert!((a[0] - j0).abs() < 1e-11);
            assert!((a[1] - j1).abs() < 1e-11);
        }
    }

    #[test]
    fn parity_is_exact() {
        for n in 0..12 {
            for x in [0.7, 3.3, 41.0] {
                let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(bessel_j(n, -x), s * bessel_j(n, x));
            }
        }
    }

    #[test]
    fn batch_matches_single_calls() {
        let range = BesselOrderRange::new(20).unwrap();
        for x in [0.0, 0.2, 6.0, 31.0, 200.0] {
            let b = bessel_j_batch(range, x);
            for n in 0..=20 {
                assert!((b[n] - bessel_j(n, x)).abs() < 1e-12);
            }
        }
        let b0 = bessel_j_batch(range, 0.0);
        assert_eq!(b0[0], 1.0);
        assert!(b0[1..].iter().all(|&v| v == 0.0));
        assert!(BesselOrderRange::new(65).is_err());
    }

    #[test]
    fn three_term_recurrence() {
        let range = BesselOrderRange::new(40).unwrap();
        for i in 0..200 {
            let x = 0.1 + i as f64 * 0.5;
            let b = bessel_j_batch(range, x);
            for n in 1..40 {
                let r = b[n - 1] + b[n + 1] - 2.0 * n as f64 / x * b[n];
                assert!(r.abs() < 1e-10, "x={x} n={n} r={r}");
            }
        }
    }

    #[test]
    fn laplace_closed_forms() {
        let v = laplace_bessel_0(Complex64::new(1.0, 0.0), 1.0, 0).unwrap();
        assert!((v.re - 0.5f64.sqrt()).abs() < 1e-15 && v.im == 0.0);
        let b = Complex64::new(2.0, 0.0);
        let v = laplace_bessel_0(b, 0.7, 0).unwrap();
        assert!((v.re - 1.0 / (4.0f64 + 0.49).sqrt()).abs() < 1e-15);
        assert!(laplace_bessel_0(Complex64::new(0.0, 1.0), 1.0, 0).is_err());
        assert!(laplace_bessel_over_k(b, 0.5, 0).is_err());
    }

    #[test]
    fn over_k_small_argument_limits() {
        let b = Complex64::new(50.0, 0.0);
        let h = 0.1;
        let v = laplace_bessel_over_k(b, h, 1).unwrap();
        assert!(((v.re - h / (2.0 * 50.0)) / v.re).abs() < 1e-5);
        let tiny = laplace_bessel_over_k(Complex64::new(1.0, 0.3), 1e-12, 1).unwrap();
        assert!(tiny.norm() < 1e-11);
    }

    #[test]
    fn algebraic_reduction_matches_hypergeometric_series() {
        for &(br, bi, h) in &[(1.0, 0.0, 0.5), (0.9, 0.4, 0.3), (2.0, -1.5, 1.2), (0.5, 0.0, 0.45)] {
            let b = Complex64::new(br, bi);
            for m in 1..9 {
                let closed = laplace_bessel_over_k(b, h, m).unwrap();
                let series = laplace_bessel_over_k_series(b, h, m).unwrap();
                assert!((closed - series).norm() < 1e-10 * closed.norm().max(1e-300), "b={b} m={m}");
            }
        }
    }

    #[test]
    fn regularized_order_zero_reduces_to_frullani() {
        let b = Complex64::new(0.8, 0.2);
        let c = Complex64::new(3.0, 0.0);
        let v = laplace_bessel_0_over_k_regularized(b, 1e-14, c).unwrap();
        assert!((v - (c / b).ln()).norm() < 1e-12);
    }

    #[test]
    fn tail_constant_agrees_with_printed_digits() {
        assert!((j0_squared_tail_constant() - J0_SQUARED_TAIL_PRINTED).abs() < 1e-9);
    }
}
