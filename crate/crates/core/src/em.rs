//! Medium, geometry and source descriptions together with the spectral
//! building blocks shared by every solver: the decaying branch of the
//! longitudinal wavenumber, the TM/TE mode vectors and the spectral
//! amplitudes radiated by an elemental electric dipole.
//!
//! Conventions: time dependence `exp(jωt)`, spatial transform kernel
//! `exp(+j k_t·ρ)` forward and `exp(-j k_t·ρ)/(4π²)` inverse.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::vec3::{self, C3};

pub const EPS0: f64 = 8.854_187_812_8e-12;
pub const MU0: f64 = 1.256_637_062_12e-6;

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative floor on `|k_t|²` below which the mode vectors are undefined.
pub const KT_FLOOR: f64 = 1e-30;
/// Relative floor on `|k_z|` for the `1/k_z` factors.
pub const KZ_FLOOR: f64 = 1e-14;

/// Homogeneous, isotropic and passive medium filling `z > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    epsilon: Complex64,
    mu: Complex64,
    omega: f64,
    k: Complex64,
    eta: Complex64,
}

impl Medium {
    pub fn new(epsilon: Complex64, mu: Complex64, omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidMedium(format!("angular frequency {omega} must be > 0")));
        }
        if !(epsilon.im < 0.0) || !(mu.im < 0.0) {
            return Err(Error::InvalidMedium(format!(
                "passivity requires Im(eps) < 0 and Im(mu) < 0, got eps = {epsilon}, mu = {mu}"
            )));
        }
        // Each principal root has argument in (-π/2, 0), so the product keeps Im(k) < 0.
        let (se, sm) = (epsilon.sqrt(), mu.sqrt());
        let k = omega * se * sm;
        let eta = sm / se;
        Ok(Self {
            epsilon,
            mu,
            omega,
            k,
            eta,
        })
    }

    /// Medium from frequency in Hz and relative constitutive parameters.
    pub fn from_relative(frequency_hz: f64, eps_r: Complex64, mu_r: Complex64) -> Result<Self> {
        Self::new(eps_r * EPS0, mu_r * MU0, 2.0 * PI * frequency_hz)
    }

    /// Vacuum-like medium with equal loss tangents on ε and μ.
    pub fn lossy_vacuum(frequency_hz: f64, loss: f64) -> Result<Self> {
        let f = Complex64::new(1.0, -loss);
        Self::from_relative(frequency_hz, f, f)
    }

    pub fn epsilon(&self) -> Complex64 {
        self.epsilon
    }
    pub fn mu(&self) -> Complex64 {
        self.mu
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    /// Wavenumber `ω√(εμ)`, `Im(k) < 0`.
    pub fn k(&self) -> Complex64 {
        self.k
    }
    /// Wave impedance `√(μ/ε)`, `Re(η) > 0`.
    pub fn eta(&self) -> Complex64 {
        self.eta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DipoleAxis {
    X,
    Y,
    Z,
}

impl DipoleAxis {
    pub const ALL: [DipoleAxis; 3] = [DipoleAxis::X, DipoleAxis::Y, DipoleAxis::Z];

    pub fn unit(self) -> [f64; 3] {
        match self {
            DipoleAxis::X => [1.0, 0.0, 0.0],
            DipoleAxis::Y => [0.0, 1.0, 0.0],
            DipoleAxis::Z => [0.0, 0.0, 1.0],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DipoleAxis::X => "x",
            DipoleAxis::Y => "y",
            DipoleAxis::Z => "z",
        }
    }
}

impl std::str::FromStr for DipoleAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(DipoleAxis::X),
            "y" => Ok(DipoleAxis::Y),
            "z" => Ok(DipoleAxis::Z),
            other => Err(Error::Config(format!("unknown dipole axis '{other}'"))),
        }
    }
}

/// Strip of half-width `h` at height `a`, excited by a dipole `p` along `axis` at `(x0, y0, z0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub h: f64,
    pub a: f64,
    pub x0: f64,
    pub y0: f64,
    pub z0: f64,
    pub axis: DipoleAxis,
    /// Dipole moment magnitude in C·m.
    pub moment: f64,
}

impl Scenario {
    pub fn new(h: f64, a: f64, position: [f64; 3], axis: DipoleAxis, moment: f64) -> Result<Self> {
        let s = Self {
            h,
            a,
            x0: position[0],
            y0: position[1],
            z0: position[2],
            axis,
            moment,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.h, self.a, self.x0, self.y0, self.z0, self.moment]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidScenario("non-finite geometry or moment".into()));
        }
        if self.h <= 0.0 {
            return Err(Error::InvalidScenario(format!("strip half-width h = {} must be > 0", self.h)));
        }
        if self.a <= 0.0 {
            return Err(Error::InvalidScenario(format!("strip height a = {} must be > 0", self.a)));
        }
        if self.z0 <= 0.0 {
            return Err(Error::InvalidScenario(format!("dipole height z0 = {} must be > 0", self.z0)));
        }
        if self.z0 == self.a {
            return Err(Error::InvalidScenario(
                "dipole lies in the strip plane (z0 = a)".into(),
            ));
        }
        Ok(())
    }

    pub fn with_axis(mut self, axis: DipoleAxis) -> Self {
        self.axis = axis;
        self
    }

    pub fn dipole_vector(&self) -> [f64; 3] {
        let u = self.axis.unit();
        [u[0] * self.moment, u[1] * self.moment, u[2] * self.moment]
    }
}

/// Principal square root of `k² - k_x² - k_y²` moved onto the decaying branch.
///
/// The returned value has `Im(k_z) <= 0`; on the real axis (exactly zero
/// imaginary part) the root with non-negative real part is taken.
pub fn longitudinal_wavenumber(k: Complex64, k_x: Complex64, k_y: f64) -> Complex64 {
    let radicand = k * k - k_x * k_x - k_y * k_y;
    let mut kz = radicand.sqrt();
    if kz.im > 0.0 || (kz.im == 0.0 && kz.re < 0.0) {
        kz = -kz;
    }
    kz
}

/// Sample of the transverse wave vector together with its longitudinal wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub k_x: Complex64,
    pub k_y: f64,
    pub k_z: Complex64,
}

impl SpectralPoint {
    pub fn new(k: Complex64, k_x: Complex64, k_y: f64) -> Self {
        Self {
            k_x,
            k_y,
            k_z: longitudinal_wavenumber(k, k_x, k_y),
        }
    }

    pub fn kt2(&self) -> Complex64 {
        self.k_x * self.k_x + self.k_y * self.k_y
    }

    pub fn kt_vec(&self) -> C3 {
        [self.k_x, Complex64::new(self.k_y, 0.0), Complex64::new(0.0, 0.0)]
    }
}

/// Dimensionless TM/TE mode vectors at one spectral point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeVectors {
    pub f: C3,
    pub f_plus: C3,
    pub f_minus: C3,
    pub g: C3,
}

pub fn mode_vectors(k: Complex64, point: &SpectralPoint) -> Result<ModeVectors> {
    let kt2 = point.kt2();
    if kt2.norm() < KT_FLOOR * k.norm_sqr() {
        return Err(Error::DegenerateTransverse {
            magnitude: kt2.norm(),
        });
    }
    let kt = point.kt_vec();
    let f = vec3::scale(point.k_z / kt2, &kt);
    let zhat = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    let g = vec3::scale(k / kt2, &vec3::cross(&zhat, &kt));
    Ok(ModeVectors {
        f,
        f_plus: vec3::sub(&f, &zhat),
        f_minus: vec3::add(&f, &zhat),
        g,
    })
}

fn check_kz(k: Complex64, kz: Complex64) -> Result<()> {
    if kz.norm() < KZ_FLOOR * k.norm() {
        Err(Error::DegenerateLongitudinal { magnitude: kz.norm() })
    } else {
        Ok(())
    }
}

/// Dipole field amplitudes `(A₁(k_t, z), B₁(k_t, z))` for one of the principal orientations.
pub fn dipole_coefficients(
    medium: &Medium,
    scenario: &Scenario,
    point: &SpectralPoint,
    z: f64,
) -> Result<(Complex64, Complex64)> {
    if z == scenario.z0 {
        return Err(Error::InvalidArgument("dipole coefficients are undefined at z = z0".into()));
    }
    let k = medium.k();
    let eps = medium.epsilon();
    let p = scenario.moment;
    let kz = point.k_z;
    let phase = (J * (point.k_x * scenario.x0 + point.k_y * scenario.y0)).exp()
        * (-J * kz * (z - scenario.z0).abs()).exp();
    let c = J * p / (2.0 * eps) * phase;
    let (a1, b1) = match scenario.axis {
        DipoleAxis::X => {
            check_kz(k, kz)?;
            (-c * point.k_x, c * k * point.k_y / kz)
        }
        DipoleAxis::Y => {
            check_kz(k, kz)?;
            (-c * point.k_y, -c * k * point.k_x / kz)
        }
        DipoleAxis::Z => {
            check_kz(k, kz)?;
            let sgn = (z - scenario.z0).signum();
            (sgn * c * point.kt2() / kz, Complex64::new(0.0, 0.0))
        }
    };
    Ok((a1, b1))
}

/// Upward (`+`) and downward (`-`) mode amplitudes radiated by a point current
/// element `jωp δ(r - r₀)` with arbitrary complex moment, evaluated from the
/// reciprocity projections onto the TM and TE modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceAmplitudes {
    pub a_plus: Complex64,
    pub a_minus: Complex64,
    pub b_plus: Complex64,
    pub b_minus: Complex64,
}

pub fn point_source_amplitudes(
    medium: &Medium,
    point: &SpectralPoint,
    position: [f64; 3],
    moment: C3,
) -> Result<SourceAmplitudes> {
    let k = medium.k();
    let kz = point.k_z;
    check_kz(k, kz)?;
    let eta = medium.eta();
    let w = medium.omega();
    let transverse_phase = (J * (point.k_x * position[0] + point.k_y * position[1])).exp();
    let up = transverse_phase * (J * kz * position[2]).exp();
    let down = transverse_phase * (-J * kz * position[2]).exp();
    let current = vec3::scale(J * w, &moment);
    let kt = point.kt_vec();
    let kt2 = point.kt2();
    let zhat = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    // The longitudinal part enters as k_z k_t ∓ k_t² ẑ; with the opposite sign a
    // vertical dipole would radiate E_z antiparallel to its moment in the near field.
    let tm_plus = vec3::sub(&vec3::scale(kz, &kt), &vec3::scale(kt2, &zhat));
    let tm_minus = vec3::add(&vec3::scale(kz, &kt), &vec3::scale(kt2, &zhat));
    let te = vec3::cross(&zhat, &kt);
    let a_scale = -eta / (2.0 * kz * k);
    let b_scale = -eta / (2.0 * kz);
    Ok(SourceAmplitudes {
        a_plus: a_scale * vec3::dot(&tm_plus, &current) * up,
        a_minus: a_scale * vec3::dot(&tm_minus, &current) * down,
        b_plus: b_scale * vec3::dot(&te, &current) * up,
        b_minus: b_scale * vec3::dot(&te, &current) * down,
    })
}

impl SourceAmplitudes {
    /// `(A₁(z), B₁(z))`: the amplitudes referred to height `z` on the side of the source it lies on.
    pub fn at_height(&self, kz: Complex64, z0: f64, z: f64) -> (Complex64, Complex64) {
        if z > z0 {
            let e = (-J * kz * z).exp();
            (self.a_plus * e, self.b_plus * e)
        } else {
            let e = (J * kz * z).exp();
            (self.a_minus * e, self.b_minus * e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn medium() -> Medium {
        Medium::lossy_vacuum(300e6, 1e-5).unwrap()
    }

    #[test]
    fn medium_rejects_active_material() {
        let e = Medium::new(Complex64::new(EPS0, 1e-15), Complex64::new(MU0, -1e-12), 1e9);
        assert!(matches!(e, Err(Error::InvalidMedium(_))));
    }

    #[test]
    fn medium_derived_quantities_are_passive() {
        let m = medium();
        assert!(m.k().im < 0.0);
        assert!(m.eta().re > 0.0);
        // λ ≈ 1 m at 300 MHz
        assert!((m.k().re - 2.0 * PI * 300e6 / 299_792_458.0).abs() < 1e-6);
    }

    #[test]
    fn kz_reduces_to_k_at_normal_incidence() {
        let k = medium().k();
        let kz = longitudinal_wavenumber(k, Complex64::new(0.0, 0.0), 0.0);
        assert!((kz - k).norm() < 1e-15 * k.norm());
    }

    #[test]
    fn kz_is_evanescent_for_large_ky() {
        // |k_z + j k_y|/k_y = |k² − k_x²|/(2 k_y²) to leading order.
        let k = medium().k();
        for &ky in &[100.0 * k.norm() + 1.0, 1e3 * k.norm(), 1e5] {
            let kz = longitudinal_wavenumber(k, Complex64::new(0.0, 0.0), ky);
            let rel = (kz + J * ky).norm() / ky;
            let lead = k.norm_sqr() / (2.0 * ky * ky);
            assert!((rel - lead).abs() < 1e-3 * lead, "rel {rel} lead {lead}");
            assert!(rel < 1e-6 || ky < 1e3 * k.norm());
        }
    }

    #[test]
    fn kz_real_tie_break() {
        let k = Complex64::new(1.0, 0.0);
        let kz = longitudinal_wavenumber(k, Complex64::new(0.0, 0.0), 0.5);
        assert!(kz.re > 0.0 && kz.im == 0.0);
    }

    #[test]
    fn axis_aligned_mode_vectors() {
        let m = medium();
        let kt = 3.7;
        let pt = SpectralPoint::new(m.k(), Complex64::new(kt, 0.0), 0.0);
        let mv = mode_vectors(m.k(), &pt).unwrap();
        let g_expect = m.k() / kt;
        assert!((mv.g[1] - g_expect).norm() < 1e-14 * g_expect.norm());
        assert!(mv.g[0].norm() < 1e-16 && mv.g[2].norm() < 1e-16);
        assert!((mv.f[0] - pt.k_z / kt).norm() < 1e-14);
        assert_eq!(mv.f_plus[2], Complex64::new(-1.0, 0.0));
        assert_eq!(mv.f_minus[2], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn swapped_wavevector_rotates_g() {
        // g ∝ ẑ × k_t: (k_x, k_y) -> (-k_y, k_x) rotates g by +90° about ẑ.
        let m = medium();
        let (kx, ky) = (1.3, 2.1);
        let p1 = SpectralPoint::new(m.k(), Complex64::new(kx, 0.0), ky);
        let p2 = SpectralPoint::new(m.k(), Complex64::new(-ky, 0.0), kx);
        let g1 = mode_vectors(m.k(), &p1).unwrap().g;
        let g2 = mode_vectors(m.k(), &p2).unwrap().g;
        // direct evaluation of the cross-product definition
        let kt2 = kx * kx + ky * ky;
        let expect1 = [-ky * m.k() / kt2, kx * m.k() / kt2];
        let expect2 = [-kx * m.k() / kt2, -ky * m.k() / kt2];
        assert!((g1[0] - expect1[0]).norm() < 1e-14 && (g1[1] - expect1[1]).norm() < 1e-14);
        assert!((g2[0] - expect2[0]).norm() < 1e-14 && (g2[1] - expect2[1]).norm() < 1e-14);
        assert!((g2[0] + g1[1]).norm() < 1e-14 && (g2[1] - g1[0]).norm() < 1e-14);
    }

    #[test]
    fn degenerate_transverse_point_is_rejected() {
        let m = medium();
        let pt = SpectralPoint::new(m.k(), Complex64::new(0.0, 0.0), 0.0);
        assert!(matches!(mode_vectors(m.k(), &pt), Err(Error::DegenerateTransverse { .. })));
    }

    fn scenario(axis: DipoleAxis) -> Scenario {
        Scenario::new(0.1, 6.0, [0.3, 0.5, 5.5], axis, 1.0).unwrap()
    }

    #[test]
    fn z_dipole_has_no_te_part() {
        let m = medium();
        let s = scenario(DipoleAxis::Z);
        for &(kx, ky, z) in &[(0.4, 2.0, 1.0), (7.0, -3.0, 6.0), (0.1, 0.2, 5.6)] {
            let pt = SpectralPoint::new(m.k(), Complex64::new(kx, 0.05), ky);
            let (_, b1) = dipole_coefficients(&m, &s, &pt, z).unwrap();
            assert_eq!(b1, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn x_dipole_tm_part_vanishes_at_zero_kx() {
        let m = medium();
        let s = scenario(DipoleAxis::X);
        let pt = SpectralPoint::new(m.k(), Complex64::new(0.0, 0.0), 1.7);
        let (a1, _) = dipole_coefficients(&m, &s, &pt, 2.0).unwrap();
        assert_eq!(a1.norm(), 0.0);
    }

    #[test]
    fn y_dipole_tm_amplitude_matches_direct_arithmetic() {
        let m = medium();
        let s = scenario(DipoleAxis::Y);
        let kx = Complex64::new(2.5, 0.1);
        let ky = -1.25;
        let z = 3.0;
        let pt = SpectralPoint::new(m.k(), kx, ky);
        let (a1, _) = dipole_coefficients(&m, &s, &pt, z).unwrap();
        // independent arithmetic
        let k = m.k();
        let kz = (k * k - kx * kx - ky * ky).sqrt();
        let kz = if kz.im > 0.0 { -kz } else { kz };
        let phase = Complex64::new(0.0, kx.re * 0.3 - kx.im * 0.0 + ky * 0.5).exp()
            * Complex64::new(-kx.im * 0.3, 0.0).exp();
        let decay = (Complex64::new(0.0, -1.0) * kz * (5.5 - z)).exp();
        let expect = -Complex64::new(0.0, 1.0) * ky / (2.0 * m.epsilon()) * phase * decay;
        assert!((a1 - expect).norm() < 1e-12 * expect.norm(), "{a1} vs {expect}");
    }

    #[test]
    fn reciprocity_amplitudes_reproduce_principal_cases() {
        let m = medium();
        for axis in DipoleAxis::ALL {
            let s = scenario(axis);
            for &(kx, ky) in &[(0.7, 1.1), (9.0, -4.0), (6.0, 0.3)] {
                let pt = SpectralPoint::new(m.k(), Complex64::new(kx, -0.02), ky);
                let u = s.dipole_vector();
                let moment = [
                    Complex64::new(u[0], 0.0),
                    Complex64::new(u[1], 0.0),
                    Complex64::new(u[2], 0.0),
                ];
                let amp = point_source_amplitudes(&m, &pt, [s.x0, s.y0, s.z0], moment).unwrap();
                for &z in &[0.0, 2.0, 5.9, 6.0] {
                    let (a1, b1) = dipole_coefficients(&m, &s, &pt, z).unwrap();
                    let (a, b) = amp.at_height(pt.k_z, s.z0, z);
                    let scale = a1.norm().max(b1.norm()).max(1e-300);
                    assert!((a - a1).norm() < 1e-12 * scale, "{axis:?} A {a} vs {a1}");
                    assert!((b - b1).norm() < 1e-12 * scale, "{axis:?} B {b} vs {b1}");
                }
            }
        }
    }

    #[test]
    fn scenario_validation() {
        assert!(Scenario::new(0.1, 1.0, [0.0, 0.0, 1.0], DipoleAxis::X, 1.0).is_err());
        assert!(Scenario::new(-0.1, 1.0, [0.0, 0.0, 0.5], DipoleAxis::X, 1.0).is_err());
        assert!(Scenario::new(0.1, 1.0, [0.0, 0.0, -0.5], DipoleAxis::X, 1.0).is_err());
        assert!(Scenario::new(0.1, 1.0, [0.0, 0.0, 0.5], DipoleAxis::X, 1.0).is_ok());
    }
}
