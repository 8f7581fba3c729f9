//! Narrow-strip model: only the longitudinal current `I(x) = πh c₀(x)` with the
//! `1/√(1 − y²/h²)` edge profile, tested with `J₀` alone.

use num_complex::Complex64;

use crate::em::{Medium, Scenario};
use crate::error::{Error, Result};
use crate::fullwave::{kernel_integrals, narrow_rhs_integral, Parity, RhsMode};
use crate::quadrature::QuadratureConfig;

/// Relative floor on `|kernel|` below which a sample is treated as sitting on the TEM pole.
pub const POLE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct NarrowSpectralCurrent {
    pub samples: Vec<(Complex64, Complex64)>,
}

/// `(k² − k_x²)/k · ∫₀^∞ (1 − e^{−j2k_z a})/k_z · J₀²(k_y h) dk_y`.
pub fn narrow_kernel(medium: &Medium, h: f64, a: f64, k_x: Complex64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let k = medium.k();
    let t = kernel_integrals(medium, h, a, k_x, 0, &[Parity::Even], cfg)?;
    Ok((k * k - k_x * k_x) / k * t.w1(0, 0))
}

/// Orientation-dependent right-hand side of the scalar equation.
pub fn narrow_rhs(medium: &Medium, scenario: &Scenario, k_x: Complex64, cfg: &QuadratureConfig) -> Result<Complex64> {
    narrow_rhs_integral(medium, scenario, k_x, cfg, RhsMode::Auto)
}

pub fn narrow_rhs_with(
    medium: &Medium,
    scenario: &Scenario,
    k_x: Complex64,
    cfg: &QuadratureConfig,
    mode: RhsMode,
) -> Result<Complex64> {
    narrow_rhs_integral(medium, scenario, k_x, cfg, mode)
}

/// Spectral total current `I(k_x) = rhs/kernel`.
pub fn solve_narrow(medium: &Medium, scenario: &Scenario, k_x: Complex64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let kernel = narrow_kernel(medium, scenario.h, scenario.a, k_x, cfg)?;
    let rhs = narrow_rhs(medium, scenario, k_x, cfg)?;
    // Scale of the kernel away from the pole: |k|·|W₀₀| with W₀₀ = kernel·k/(k² − k_x²).
    let k = medium.k();
    let reference = k.norm() * (kernel * k / (k * k - k_x * k_x)).norm();
    if kernel.norm() < POLE_FLOOR * reference || kernel.norm() == 0.0 {
        if rhs.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(Error::PoleProximity {
            magnitude: kernel.norm(),
            k_x_re: k_x.re,
            k_x_im: k_x.im,
        });
    }
    Ok(rhs / kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::DipoleAxis;

    fn medium() -> Medium {
        Medium::lossy_vacuum(300e6, 1e-5).unwrap()
    }

    #[test]
    fn kernel_vanishes_for_shorted_strip_and_at_k() {
        let m = medium();
        let kx = Complex64::new(2.0, 0.01);
        let at = |a: f64| {
            let cfg = QuadratureConfig::for_geometry(0.02, a, 1e-8).unwrap();
            narrow_kernel(&m, 0.02, a, kx, &cfg).unwrap().norm()
        };
        let (far, near, nearer) = (at(1.0), at(1e-3), at(1e-4));
        assert!(nearer < near && near < far);
        assert!(nearer < 0.05 * far, "{nearer} vs {far}");
        let cfg = QuadratureConfig::for_geometry(0.02, 1.0, 1e-8).unwrap();
        let v = narrow_kernel(&m, 0.02, 1.0, m.k(), &cfg).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn y_dipole_on_axis_gives_zero() {
        let m = medium();
        let s = Scenario::new(0.02, 1.0, [0.0, 0.0, 0.5], DipoleAxis::Y, 1.0).unwrap();
        let cfg = QuadratureConfig::for_geometry(0.02, 1.0, 1e-8).unwrap();
        assert_eq!(narrow_rhs(&m, &s, Complex64::new(1.0, 0.006), &cfg).unwrap().norm(), 0.0);
    }

    #[test]
    fn linear_in_moment() {
        let m = medium();
        let cfg = QuadratureConfig::for_geometry(0.02, 1.0, 1e-8).unwrap();
        let s1 = Scenario::new(0.02, 1.0, [0.0, 0.3, 0.5], DipoleAxis::Z, 1.0).unwrap();
        let s2 = Scenario { moment: 2.0, ..s1 };
        let kx = Complex64::new(4.0, 0.006);
        let i1 = solve_narrow(&m, &s1, kx, &cfg).unwrap();
        let i2 = solve_narrow(&m, &s2, kx, &cfg).unwrap();
        assert!((i2 - 2.0 * i1).norm() <= 1e-14 * i2.norm());
    }
}
