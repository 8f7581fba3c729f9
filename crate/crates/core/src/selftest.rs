//! Identity suites run by the `selftest` subcommand.

use num_complex::Complex64;

use crate::em::{longitudinal_wavenumber, Medium};
use crate::quadrature::{bessel_product_over_k, bessel_product_over_k_numeric, integrate_scalar, j0_squared_tail_numeric};
use crate::specfun::{self, bessel_j, J0_SQUARED_TAIL};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub error: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error.is_finite() && self.error <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "{} {:<40} error {:.3e} tolerance {:.1e}\n",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.error,
                c.tolerance
            ));
        }
        s
    }
}

/// Knobs for fault injection.
#[derive(Debug, Clone, PartialEq)]
pub struct SelftestOptions {
    /// Value the tail-constant check compares against.
    pub tail_constant: f64,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            tail_constant: J0_SQUARED_TAIL,
        }
    }
}

fn check(name: impl Into<String>, error: f64, tolerance: f64) -> Check {
    Check {
        name: name.into(),
        error,
        tolerance,
    }
}

fn bessel_series(n: usize, x: f64) -> f64 {
    let mut term = (0.5 * x).powi(n as i32) / (1..=n).map(|v| v as f64).product::<f64>();
    let mut sum = term;
    for k in 1..60 {
        term *= -(0.25 * x * x) / (k as f64 * (k + n) as f64);
        sum += term;
    }
    sum
}

pub fn run_selftest(opts: &SelftestOptions) -> SelftestReport {
    let mut checks = Vec::new();

    let mut worst = (0.0_f64, String::new());
    for odd in [false, true] {
        for m in 0..=6usize {
            for n in 0..=(6 - m) {
                let (mu, nu) = if odd { (2 * m + 1, 2 * n + 1) } else { (2 * m, 2 * n) };
                if mu + nu == 0 {
                    continue;
                }
                let err = match bessel_product_over_k_numeric(mu, nu, 2000.0) {
                    Ok((v, _)) => (v - bessel_product_over_k(mu, nu)).abs(),
                    Err(_) => f64::INFINITY,
                };
                if !(err <= worst.0) {
                    worst = (err, format!("({mu},{nu})"));
                }
            }
        }
    }
    checks.push(check(format!("bessel product identities, worst {}", worst.1), worst.0, 1e-7));

    let tail = j0_squared_tail_numeric(150.0).map(|v| v.0).unwrap_or(f64::NAN);
    checks.push(check("J0^2/u tail constant", (tail - opts.tail_constant).abs(), 1e-8));

    let mut err: f64 = 0.0;
    for &x in &[0.1, 1.0, 3.7, 8.0] {
        for n in 0..8 {
            err = err.max((bessel_j(n, x) - bessel_series(n, x)).abs());
        }
    }
    checks.push(check("bessel J_n against power series", err, 1e-12));

    let mut err: f64 = 0.0;
    for &x in &[30.0, 31.0, 200.0] {
        // recurrence-consistency J_{n-1} + J_{n+1} = 2n/x J_n
        for n in 1..20 {
            let l = bessel_j(n - 1, x) + bessel_j(n + 1, x);
            let r = 2.0 * n as f64 / x * bessel_j(n, x);
            err = err.max((l - r).abs());
        }
    }
    checks.push(check("bessel three-term recurrence", err, 1e-13));

    let medium = Medium::lossy_vacuum(300e6, 1e-5).expect("reference medium");
    let k = medium.k();
    let mut worst_im: f64 = 0.0;
    let mut err: f64 = 0.0;
    for &kx in &[0.0, 3.0, 6.0, 6.3, 10.0] {
        for &ky in &[0.0, 1.0, 6.3, 50.0] {
            let kz = longitudinal_wavenumber(k, Complex64::new(kx, 0.0), ky);
            worst_im = worst_im.max(kz.im);
            err = err.max(((kz * kz) - (k * k - kx * kx - ky * ky)).norm() / k.norm_sqr());
        }
    }
    checks.push(check("k_z decaying branch (max Im k_z)", worst_im.max(0.0), 0.0));
    checks.push(check("k_z squares to k^2 - k_t^2", err, 1e-13));
    let normal = (longitudinal_wavenumber(k, Complex64::new(0.0, 0.0), 0.0) - k).norm() / k.norm();
    checks.push(check("k_z at normal incidence equals k", normal, 1e-15));

    let mut err: f64 = 0.0;
    for &(b, h, m) in &[(Complex64::new(2.0, 0.5), 0.5, 1usize), (Complex64::new(1.0, -0.3), 0.3, 2), (Complex64::new(3.0, 1.0), 1.0, 5)] {
        let closed = specfun::laplace_bessel_over_k(b, h, m).unwrap_or(Complex64::new(f64::NAN, 0.0));
        let series = specfun::laplace_bessel_over_k_series(b, h, m).unwrap_or(Complex64::new(f64::NAN, 0.0));
        err = err.max((closed - series).norm() / series.norm());
    }
    checks.push(check("Laplace-Bessel closed form vs series", err, 1e-10));

    let b = Complex64::new(0.3, 0.5);
    let (h, m) = (0.1, 2usize);
    let closed = specfun::laplace_bessel_0(b, h, m).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let numeric = integrate_scalar(|t| (-b * t).exp() * bessel_j(m, h * t), &[0.0, 10.0, 40.0, 120.0], 1e-15, 1e-13, 2000)
        .map(|v| v.0)
        .unwrap_or(Complex64::new(f64::NAN, 0.0));
    checks.push(check("Laplace-Bessel closed form vs quadrature", (closed - numeric).norm() / closed.norm(), 1e-8));

    SelftestReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_suite_passes() {
        let r = run_selftest(&SelftestOptions::default());
        assert!(r.passed(), "{}", r.render());
    }

    #[test]
    fn tampered_constant_is_named() {
        let r = run_selftest(&SelftestOptions { tail_constant: 0.3439 });
        assert!(!r.passed());
        let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed()).collect();
        assert_eq!(failed.len(), 1);
        assert!(failed[0].name.contains("tail constant"));
    }
}
