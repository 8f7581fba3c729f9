//! Mode coefficients of the ground-plane and strip responses, total spectral
//! fields, and spatial fields by nested `k_y` quadrature and `k_x` contour sum.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::em::{dipole_coefficients, mode_vectors, Medium, Scenario, SpectralPoint, KZ_FLOOR};
use crate::error::{Error, Result};
use crate::fullwave::SpectralCoefficients;
use crate::quadrature::{integrate_vector, spectral_breakpoints, QuadratureConfig};
use crate::specfun::bessel_j_into;
use crate::transform::{inverse_transform_many, KxContour};
use crate::vec3::{self, C3, ZERO3};

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Probes closer than this to `z = z₀` or `z = a` are rejected.
pub const PLANE_OFFSET: f64 = 1e-9;

/// `(A₂, B₂)` radiated by the spectral surface current on the strip.
pub fn strip_mode_coefficients(
    k_x_current: Complex64,
    k_y_current: Complex64,
    point: &SpectralPoint,
    medium: &Medium,
) -> Result<(Complex64, Complex64)> {
    let k = medium.k();
    let eta = medium.eta();
    let a2 = -eta * (point.k_x * k_x_current + point.k_y * k_y_current) / (2.0 * k);
    let num = point.k_x * k_y_current - point.k_y * k_x_current;
    if num == ZERO {
        return Ok((a2, ZERO));
    }
    if point.k_z.norm() < KZ_FLOOR * k.norm() {
        return Err(Error::DegenerateLongitudinal { magnitude: point.k_z.norm() });
    }
    Ok((a2, -eta * num / (2.0 * point.k_z)))
}

/// `(A₀, B₀)` that cancel the tangential electric field on the ground plane.
pub fn ground_mode_coefficients(
    a1_0: Complex64,
    b1_0: Complex64,
    a2: Complex64,
    b2: Complex64,
    k_z: Complex64,
    a: f64,
) -> (Complex64, Complex64) {
    let e = (-J * k_z * a).exp();
    (-a1_0 - a2 * e, -b1_0 - b2 * e)
}

/// Source-free mode amplitudes at one spectral point. The dipole amplitudes
/// depend on height and are evaluated on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub a0: Complex64,
    pub b0: Complex64,
    pub a2: Complex64,
    pub b2: Complex64,
    pub a1_0: Complex64,
    pub b1_0: Complex64,
}

impl ModeCoefficients {
    pub fn new(
        medium: &Medium,
        scenario: &Scenario,
        point: &SpectralPoint,
        k_x_current: Complex64,
        k_y_current: Complex64,
    ) -> Result<Self> {
        let (a2, b2) = strip_mode_coefficients(k_x_current, k_y_current, point, medium)?;
        let (a1_0, b1_0) = dipole_coefficients(medium, scenario, point, 0.0)?;
        let (a0, b0) = ground_mode_coefficients(a1_0, b1_0, a2, b2, point.k_z, scenario.a);
        Ok(Self { a0, b0, a2, b2, a1_0, b1_0 })
    }
}

fn check_height(scenario: &Scenario, z: f64) -> Result<()> {
    if z < 0.0 || (z - scenario.z0).abs() < PLANE_OFFSET || (z - scenario.a).abs() < PLANE_OFFSET {
        return Err(Error::ProbeOnPlane { z });
    }
    Ok(())
}

/// Total spectral `(E, H)` at height `z`: dipole, ground-plane and strip families.
pub fn spectral_field(
    medium: &Medium,
    scenario: &Scenario,
    coeffs: &ModeCoefficients,
    point: &SpectralPoint,
    z: f64,
) -> Result<(C3, C3)> {
    check_height(scenario, z)?;
    let k = medium.k();
    let eta = medium.eta();
    let kz = point.k_z;
    let mv = mode_vectors(k, point)?;
    let mut e = ZERO3;
    let mut eh = ZERO3;

    let (a1, b1) = dipole_coefficients(medium, scenario, point, z)?;
    let (fd, sd) = if z > scenario.z0 { (&mv.f_plus, 1.0) } else { (&mv.f_minus, -1.0) };
    vec3::axpy(&mut e, a1, fd);
    vec3::axpy(&mut e, b1, &mv.g);
    vec3::axpy(&mut eh, sd * a1, &mv.g);
    vec3::axpy(&mut eh, -sd * b1, fd);

    let e0 = (-J * kz * z).exp();
    vec3::axpy(&mut e, coeffs.a0 * e0, &mv.f_plus);
    vec3::axpy(&mut e, coeffs.b0 * e0, &mv.g);
    vec3::axpy(&mut eh, coeffs.a0 * e0, &mv.g);
    vec3::axpy(&mut eh, -coeffs.b0 * e0, &mv.f_plus);

    let es = (-J * kz * (z - scenario.a).abs()).exp();
    let (fs, ss) = if z > scenario.a { (&mv.f_plus, 1.0) } else { (&mv.f_minus, -1.0) };
    vec3::axpy(&mut e, coeffs.a2 * es, fs);
    vec3::axpy(&mut e, coeffs.b2 * es, &mv.g);
    vec3::axpy(&mut eh, ss * coeffs.a2 * es, &mv.g);
    vec3::axpy(&mut eh, -ss * coeffs.b2 * es, fs);

    Ok((e, vec3::scale(1.0 / eta, &eh)))
}

/// Tangential spectral E in the strip plane, written out in Cartesian components.
pub fn strip_plane_tangential(
    medium: &Medium,
    scenario: &Scenario,
    point: &SpectralPoint,
    k_x_current: Complex64,
    k_y_current: Complex64,
) -> Result<[Complex64; 2]> {
    let k = medium.k();
    let eta = medium.eta();
    let (kx, ky, kz) = (point.k_x, point.k_y, point.k_z);
    let a = scenario.a;
    let (a1a, b1a) = dipole_coefficients(medium, scenario, point, a)?;
    let (a10, b10) = dipole_coefficients(medium, scenario, point, 0.0)?;
    let ea = (-J * kz * a).exp();
    let w = eta * (1.0 - ea * ea) / (2.0 * k * kz);
    let kt2 = point.kt2();
    let da = a1a - a10 * ea;
    let db = b1a - b10 * ea;
    let ex = w * (kx * ky * k_y_current - (k * k - kx * kx) * k_x_current) + (kx * kz * da - k * ky * db) / kt2;
    let ey = w * (kx * ky * k_x_current - (k * k - ky * ky) * k_y_current) + (ky * kz * da + k * kx * db) / kt2;
    Ok([ex, ey])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub position: [f64; 3],
    pub e: C3,
    pub h: C3,
}

/// Currents `(K_x, K_y)` at `(k_x, k_y)` from the Chebyshev coefficients.
fn spectral_currents(sc: &SpectralCoefficients, h: f64, k_y: f64, bessel: &mut [f64]) -> (Complex64, Complex64) {
    bessel_j_into(k_y * h, bessel);
    (sc.kx_spectral(h, bessel), sc.ky_spectral(h, k_y, bessel))
}

fn bessel_len(sc: &SpectralCoefficients) -> usize {
    sc.c.len().max(sc.d.len() + 1) + 2
}

/// Narrow-strip spectral current as a one-term coefficient set.
pub fn narrow_as_coefficients(h: f64, k_x: Complex64, current: Complex64) -> SpectralCoefficients {
    SpectralCoefficients {
        k_x,
        c: vec![current / (PI * h)],
        d: vec![],
        condition: 1.0,
        residual: 0.0,
    }
}

/// `(1/2π)∫ F(k_x, k_y) e^{−jk_y y} dk_y` for all probes at one contour node.
fn probe_ky_integrals(
    medium: &Medium,
    scenario: &Scenario,
    sc: &SpectralCoefficients,
    probes: &[[f64; 3]],
    cfg: &QuadratureConfig,
) -> Result<Vec<Complex64>> {
    let k = medium.k();
    let h = scenario.h;
    let kx = sc.k_x;
    let dmin = probes
        .iter()
        .flat_map(|p| [(p[2] - scenario.a).abs(), (p[2] - scenario.z0).abs(), p[2] + scenario.z0, p[2] + scenario.a])
        .fold(f64::INFINITY, f64::min);
    let k_top = cfg.k_y_max.min(40.0 / dmin).max(4.0 * k.norm());
    let local = QuadratureConfig { k_y_max: k_top, ..cfg.clone() };
    let singular = (k * k - kx * kx).sqrt().re.abs();
    let bps = spectral_breakpoints(&local, h, Some(singular));
    let dim = 6 * probes.len();
    let mut bessel = vec![0.0; bessel_len(sc)];
    let mut failure: Option<Error> = None;
    let integral = integrate_vector(
        |t, out: &mut [Complex64]| {
            out.iter_mut().for_each(|v| *v = ZERO);
            if failure.is_some() {
                return;
            }
            for s in [1.0, -1.0] {
                let ky = s * t;
                let point = SpectralPoint::new(k, kx, ky);
                let (cx, cy) = spectral_currents(sc, h, ky, &mut bessel);
                let coeffs = match ModeCoefficients::new(medium, scenario, &point, cx, cy) {
                    Ok(c) => c,
                    Err(e) => {
                        failure = Some(e);
                        return;
                    }
                };
                for (i, p) in probes.iter().enumerate() {
                    let (e, hf) = match spectral_field(medium, scenario, &coeffs, &point, p[2]) {
                        Ok(v) => v,
                        Err(e) => {
                            failure = Some(e);
                            return;
                        }
                    };
                    let ph = (-J * ky * p[1]).exp();
                    for c in 0..3 {
                        out[6 * i + c] += e[c] * ph;
                        out[6 * i + 3 + c] += hf[c] * ph;
                    }
                }
            }
        },
        dim,
        &bps,
        cfg.abs_tol,
        cfg.rel_tol,
        cfg.max_subdivisions,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(integral?.value.into_iter().map(|v| v / (2.0 * PI)).collect())
}

/// Spatial fields at the probes from per-node coefficients on `contour`.
pub fn spatial_field(
    medium: &Medium,
    scenario: &Scenario,
    contour: &KxContour,
    spectral: &[SpectralCoefficients],
    probes: &[[f64; 3]],
    cfg: &QuadratureConfig,
) -> Result<Vec<FieldSample>> {
    for p in probes {
        check_height(scenario, p[2])?;
    }
    let per_node: Vec<Vec<Complex64>> = spectral
        .par_iter()
        .map(|sc| probe_ky_integrals(medium, scenario, sc, probes, cfg))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(probes.len());
    // each probe has its own x; transform the whole vector per distinct x
    for (i, p) in probes.iter().enumerate() {
        let v = inverse_transform_many(contour, &per_node, p[0])?;
        let e = [v[6 * i], v[6 * i + 1], v[6 * i + 2]];
        let hf = [v[6 * i + 3], v[6 * i + 4], v[6 * i + 5]];
        out.push(FieldSample { position: *p, e, h: hf });
    }
    Ok(out)
}

/// Tangential E on the strip surface, split into the incident part
/// (dipole plus its ground-plane image) and the total.
#[derive(Debug, Clone, PartialEq)]
pub struct StripSurfaceField {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `[ix][iy] = [E_x, E_y]`
    pub incident: Vec<Vec<[Complex64; 2]>>,
    pub total: Vec<Vec<[Complex64; 2]>>,
}

impl StripSurfaceField {
    /// Largest `|E_t,total|` over `y` divided by the largest `|E_t,incident|` over `y`, per `x`.
    pub fn relative_residual(&self) -> Vec<f64> {
        self.total
            .iter()
            .zip(&self.incident)
            .map(|(t, i)| {
                let n = |v: &[Complex64; 2]| (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
                let rt = t.iter().map(n).fold(0.0, f64::max);
                let ri = i.iter().map(n).fold(0.0, f64::max);
                rt / ri
            })
            .collect()
    }
}

/// `∫_{−∞}^{∞} J_ν(k_y h)/|k_y| e^{−jk_y y} dk_y` with `J₀` damped by `(1 − e^{−c|k_y|})`.
fn closed_over_abs(nu: usize, h: f64, y: f64, c: f64) -> Complex64 {
    let theta = (y / h).asin();
    if nu == 0 {
        let arg = Complex64::new(c, y) / h;
        return Complex64::new(2.0 * arg.asinh().re, 0.0);
    }
    let n = nu as f64;
    if nu % 2 == 0 {
        Complex64::new(2.0 * (n * theta).cos() / n, 0.0)
    } else {
        -2.0 * J * (n * theta).sin() / n
    }
}

/// `∫_{−∞}^{∞} sgn(k_y) J_ν(k_y h) e^{−jk_y y} dk_y`.
fn closed_signed(nu: usize, h: f64, y: f64) -> Complex64 {
    let theta = (y / h).asin();
    let r = ((h - y) * (h + y)).sqrt();
    let n = nu as f64;
    if nu % 2 == 1 {
        Complex64::new(2.0 * (n * theta).cos() / r, 0.0)
    } else {
        -2.0 * J * (n * theta).sin() / r
    }
}

/// Tangential-E pieces at one node: `[incident_x, incident_y, total_x, total_y]` per y.
fn strip_surface_node(
    medium: &Medium,
    scenario: &Scenario,
    sc: &SpectralCoefficients,
    y: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<Complex64>> {
    let k = medium.k();
    let eta = medium.eta();
    let h = scenario.h;
    let a = scenario.a;
    let kx = sc.k_x;
    let reg = 1.0 / h;
    let nb = bessel_len(sc);
    let mut bessel = vec![0.0; nb];
    let pref = eta * PI * J / (2.0 * k);
    let kk = k * k - kx * kx;
    let jn: Vec<Complex64> = (0..nb).map(|n| J.powu(n as u32)).collect();
    let singular = kk.sqrt().re.abs();
    let bps = spectral_breakpoints(cfg, h, Some(singular));
    let mut failure: Option<Error> = None;
    let dim = 4 * y.len();
    let integral = integrate_vector(
        |t, out: &mut [Complex64]| {
            out.iter_mut().for_each(|v| *v = ZERO);
            if failure.is_some() || t == 0.0 {
                return;
            }
            for s in [1.0, -1.0] {
                let ky = s * t;
                let point = SpectralPoint::new(k, kx, ky);
                let kz = point.k_z;
                let (cx, cy) = spectral_currents(sc, h, ky, &mut bessel);
                // incident part: dipole and ground image of the dipole
                let inc = (|| -> Result<[Complex64; 2]> {
                    let (a1a, b1a) = dipole_coefficients(medium, scenario, &point, a)?;
                    let (a10, b10) = dipole_coefficients(medium, scenario, &point, 0.0)?;
                    let ea = (-J * kz * a).exp();
                    let mv = mode_vectors(k, &point)?;
                    let da = a1a - a10 * ea;
                    let db = b1a - b10 * ea;
                    Ok([da * mv.f[0] + db * mv.g[0], da * mv.f[1] + db * mv.g[1]])
                })();
                let inc = match inc {
                    Ok(v) => v,
                    Err(e) => {
                        failure = Some(e);
                        return;
                    }
                };
                let ea = (-J * kz * a).exp();
                let w = eta * (1.0 - ea * ea) / (2.0 * k * kz);
                let sx = w * (kx * ky * cy - kk * cx);
                let sy = w * (kx * ky * cx - (k * k - ky * ky) * cy);
                // large-|k_y| asymptote with closed-form transforms
                let mut sum_c = ZERO;
                let mut sum_c0 = ZERO;
                let mut sum_d = ZERO;
                let jb: Vec<f64> = bessel.to_vec();
                for (n, c) in sc.c.iter().enumerate() {
                    let term = jn[n] * c * jb[n];
                    if n == 0 {
                        sum_c0 += term;
                    } else {
                        sum_c += term;
                    }
                }
                for (n, d) in sc.d.iter().enumerate() {
                    sum_d += jn[n] * d * (n as f64 + 1.0) * jb[n + 1];
                }
                let damp = 1.0 - (-reg * t).exp();
                let ax = pref / t * (kx * sum_d - kk * h * (sum_c + sum_c0 * damp));
                let ay = pref * s * (kx * h * (sum_c + sum_c0) + sum_d);
                for (i, &yv) in y.iter().enumerate() {
                    let ph = (-J * ky * yv).exp();
                    out[4 * i] += inc[0] * ph;
                    out[4 * i + 1] += inc[1] * ph;
                    out[4 * i + 2] += (inc[0] + sx - ax) * ph;
                    out[4 * i + 3] += (inc[1] + sy - ay) * ph;
                }
            }
        },
        dim,
        &bps,
        cfg.abs_tol,
        cfg.rel_tol,
        cfg.max_subdivisions,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let mut v = integral?.value;
    for (i, &yv) in y.iter().enumerate() {
        let mut cx = ZERO;
        let mut cy = ZERO;
        for (n, c) in sc.c.iter().enumerate() {
            cx -= kk * h * jn[n] * c * closed_over_abs(n, h, yv, reg);
            cy += kx * h * jn[n] * c * closed_signed(n, h, yv);
        }
        for (n, d) in sc.d.iter().enumerate() {
            let w = jn[n] * d * (n as f64 + 1.0);
            cx += kx * w * closed_over_abs(n + 1, h, yv, reg);
            cy += w * closed_signed(n + 1, h, yv);
        }
        v[4 * i + 2] += pref * cx;
        v[4 * i + 3] += pref * cy;
    }
    Ok(v.into_iter().map(|x| x / (2.0 * PI)).collect())
}

/// Tangential E on the strip at `z = a` for `|y| < h`.
pub fn strip_surface_field(
    medium: &Medium,
    scenario: &Scenario,
    contour: &KxContour,
    spectral: &[SpectralCoefficients],
    x: &[f64],
    y: &[f64],
    cfg: &QuadratureConfig,
) -> Result<StripSurfaceField> {
    if let Some(bad) = y.iter().find(|v| v.abs() >= scenario.h) {
        return Err(Error::InvalidArgument(format!("y = {bad} is not on the strip")));
    }
    let per_node: Vec<Vec<Complex64>> = spectral
        .par_iter()
        .map(|sc| strip_surface_node(medium, scenario, sc, y, cfg))
        .collect::<Result<_>>()?;
    let mut out = StripSurfaceField {
        x: x.to_vec(),
        y: y.to_vec(),
        incident: Vec::new(),
        total: Vec::new(),
    };
    for &xv in x {
        let v = inverse_transform_many(contour, &per_node, xv)?;
        out.incident.push((0..y.len()).map(|i| [v[4 * i], v[4 * i + 1]]).collect());
        out.total.push((0..y.len()).map(|i| [v[4 * i + 2], v[4 * i + 3]]).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::DipoleAxis;

    fn medium() -> Medium {
        Medium::lossy_vacuum(300e6, 1e-5).unwrap()
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    #[test]
    fn zero_current_gives_zero_strip_modes() {
        let m = medium();
        let p = SpectralPoint::new(m.k(), Complex64::new(1.0, 0.01), 2.0);
        assert_eq!(strip_mode_coefficients(ZERO, ZERO, &p, &m).unwrap(), (ZERO, ZERO));
        let p0 = SpectralPoint::new(m.k(), Complex64::new(1.0, 0.01), 0.0);
        let (a2, b2) = strip_mode_coefficients(Complex64::new(0.3, 0.1), ZERO, &p0, &m).unwrap();
        assert_eq!(b2, ZERO);
        let expect = -m.eta() * p0.k_x * Complex64::new(0.3, 0.1) / (2.0 * m.k());
        assert!((a2 - expect).norm() < 1e-14 * expect.norm());
        assert_eq!(ground_mode_coefficients(ZERO, ZERO, ZERO, ZERO, p.k_z, 1.0), (ZERO, ZERO));
    }

    #[test]
    fn h_jump_equals_surface_current() {
        let m = medium();
        let mut seed = 7;
        for axis in DipoleAxis::ALL {
            let s = Scenario::new(0.1, 1.0, [0.2, 0.1, 0.4], axis, 1e-9).unwrap();
            for _ in 0..10 {
                let kx = Complex64::new(4.0 * lcg(&mut seed), 0.01 * lcg(&mut seed));
                let ky = 5.0 * lcg(&mut seed);
                let p = SpectralPoint::new(m.k(), kx, ky);
                let cur = [Complex64::new(lcg(&mut seed), lcg(&mut seed)), Complex64::new(lcg(&mut seed), lcg(&mut seed))];
                let co = ModeCoefficients::new(&m, &s, &p, cur[0], cur[1]).unwrap();
                let (_, hu) = spectral_field(&m, &s, &co, &p, s.a + 2e-9).unwrap();
                let (_, hd) = spectral_field(&m, &s, &co, &p, s.a - 2e-9).unwrap();
                // H(a⁺) − H(a⁻) = K × ẑ = (K_y, −K_x)
                let jx = hu[0] - hd[0] - cur[1];
                let jy = hu[1] - hd[1] + cur[0];
                let scale = cur[0].norm() + cur[1].norm();
                assert!(jx.norm() < 1e-6 * scale && jy.norm() < 1e-6 * scale, "{jx} {jy}");
            }
        }
    }

    #[test]
    fn tangential_e_vanishes_on_ground() {
        let m = medium();
        let mut seed = 11;
        for axis in DipoleAxis::ALL {
            let s = Scenario::new(0.1, 1.0, [0.0, -0.2, 0.6], axis, 1.0).unwrap();
            for _ in 0..10 {
                let p = SpectralPoint::new(m.k(), Complex64::new(8.0 * lcg(&mut seed), 0.006), 8.0 * lcg(&mut seed));
                let cur = [Complex64::new(lcg(&mut seed), lcg(&mut seed)), Complex64::new(lcg(&mut seed), lcg(&mut seed))];
                let co = ModeCoefficients::new(&m, &s, &p, cur[0], cur[1]).unwrap();
                let (e, h) = spectral_field(&m, &s, &co, &p, 0.0).unwrap();
                let scale = vec3::norm(&e) + m.eta().norm() * vec3::norm(&h);
                assert!(e[0].norm() < 1e-12 * scale && e[1].norm() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn strip_plane_formula_matches_families() {
        let m = medium();
        let mut seed = 3;
        for axis in DipoleAxis::ALL {
            let s = Scenario::new(0.1, 1.0, [0.3, 0.2, 0.5], axis, 1.0).unwrap();
            for _ in 0..10 {
                let p = SpectralPoint::new(m.k(), Complex64::new(6.0 * lcg(&mut seed), -0.006), 6.0 * lcg(&mut seed));
                let cur = [Complex64::new(lcg(&mut seed), lcg(&mut seed)), Complex64::new(lcg(&mut seed), lcg(&mut seed))];
                let co = ModeCoefficients::new(&m, &s, &p, cur[0], cur[1]).unwrap();
                let (e, _) = spectral_field(&m, &s, &co, &p, s.a + 2e-9).unwrap();
                let closed = strip_plane_tangential(&m, &s, &p, cur[0], cur[1]).unwrap();
                let scale = vec3::norm(&e);
                assert!((e[0] - closed[0]).norm() < 1e-6 * scale);
                assert!((e[1] - closed[1]).norm() < 1e-6 * scale);
            }
        }
    }

    #[test]
    fn tm_family_structure() {
        // only A₂: E ∥ f⁺ above the strip, ηH ∥ g
        let m = medium();
        let s = Scenario::new(0.1, 1.0, [0.0, 0.0, 0.5], DipoleAxis::Z, 0.0).unwrap();
        let p = SpectralPoint::new(m.k(), Complex64::new(1.5, 0.0), 0.0);
        let co = ModeCoefficients::new(&m, &s, &p, Complex64::new(1.0, 0.0), ZERO).unwrap();
        let (e, h) = spectral_field(&m, &s, &co, &p, 1.7).unwrap();
        let mv = mode_vectors(m.k(), &p).unwrap();
        assert!(vec3::dot(&vec3::cross(&e, &mv.f_plus), &vec3::cross(&e, &mv.f_plus)).norm() < 1e-20);
        assert!(vec3::dot(&h, &mv.f).norm() < 1e-14 * vec3::norm(&h));
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let h = 0.3;
        let y = 0.1;
        let reg = 1.0 / h;
        for nu in 0..4 {
            let f = |t: f64| {
                let mut b = vec![0.0; nu + 1];
                bessel_j_into(t * h, &mut b);
                let w = if nu == 0 { 1.0 - (-reg * t).exp() } else { 1.0 };
                b[nu] * w / t
            };
            // ∫_0^T + analytic estimate of the oscillating tail is small for large T
            let n = 400_000;
            let top = 4000.0;
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let t = (i as f64 + 0.5) * top / n as f64;
                let ph = if nu % 2 == 0 {
                    Complex64::new(2.0 * (t * y).cos(), 0.0)
                } else {
                    -2.0 * J * (t * y).sin()
                };
                s += f(t) * ph * (top / n as f64);
            }
            let c = closed_over_abs(nu, h, y, reg);
            assert!((s - c).norm() < 2e-3, "nu={nu}: {s} vs {c}");
        }
    }
}
