//! TEM transmission-line mode of a thin circular wire above the ground plane,
//! used as a physical reference for the narrow-strip current.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::em::{DipoleAxis, Medium, Scenario};
use crate::error::{Error, Result};

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Round wire of radius `s` whose axis sits at height `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WireGeometry {
    pub s: f64,
    pub a: f64,
}

impl WireGeometry {
    pub fn new(s: f64, a: f64) -> Result<Self> {
        if !(s > 0.0 && s < a && a.is_finite()) {
            return Err(Error::InvalidArgument(format!("wire needs 0 < s < a, got s={s}, a={a}")));
        }
        Ok(Self { s, a })
    }

    /// Wire with the same per-length inductance and capacitance as a strip of half-width `h`.
    pub fn equivalent_to_strip(h: f64, a: f64) -> Result<Self> {
        Self::new(0.5 * h, a)
    }

    /// Distance of the line-charge images from the ground plane.
    pub fn image_offset(&self) -> f64 {
        ((self.a - self.s) * (self.a + self.s)).sqrt()
    }

    pub fn arccosh_ratio(&self) -> f64 {
        arccosh(self.a / self.s)
    }

    fn check_outside(&self, y: f64, z: f64) -> Result<()> {
        if !(z > 0.0) || y * y + (z - self.a).powi(2) < self.s * self.s * (1.0 - 1e-12) {
            return Err(Error::InsideWire { y, z });
        }
        Ok(())
    }
}

/// `ln(u + √(u² − 1))` for `u ≥ 1`.
pub fn arccosh(u: f64) -> f64 {
    (u + ((u - 1.0) * (u + 1.0)).sqrt()).ln()
}

/// Potential of the wire and its image, `λ/(2πε) · ½ ln(N/D)`; `lambda_over_eps` is `λ/ε`.
pub fn image_potential(y: f64, z: f64, wire: &WireGeometry, lambda_over_eps: f64) -> Result<f64> {
    if z < 0.0 || (z > 0.0 && y * y + (z - wire.a).powi(2) < wire.s * wire.s * (1.0 - 1e-12)) {
        return Err(Error::InsideWire { y, z });
    }
    let c = wire.image_offset();
    let num = y * y + (z + c).powi(2);
    let den = y * y + (z - c).powi(2);
    Ok(lambda_over_eps / (2.0 * PI) * 0.5 * (num / den).ln())
}

/// Normalised transverse field `e(y, z)` with `E_t = λ/(2πε) e`, as `[e_y, e_z]`.
pub fn tem_field_pattern(y: f64, z: f64, wire: &WireGeometry) -> Result<[f64; 2]> {
    wire.check_outside(y, z)?;
    let c = wire.image_offset();
    let d1 = y * y + (z - c).powi(2);
    let d2 = y * y + (z + c).powi(2);
    Ok([y / d1 - y / d2, (z - c) / d1 - (z + c) / d2])
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemCurrent {
    pub x: Vec<f64>,
    pub current: Vec<Complex64>,
}

/// Ideal TEM current excited on the wire by the scenario's dipole.
pub fn tem_current(medium: &Medium, scenario: &Scenario, wire: &WireGeometry, x: &[f64]) -> Result<TemCurrent> {
    let k = medium.k();
    let amp = match scenario.axis {
        DipoleAxis::X => 0.0,
        axis => {
            let e = tem_field_pattern(scenario.y0, scenario.z0, wire)?;
            let proj = if axis == DipoleAxis::Y { e[0] } else { e[1] };
            proj * scenario.moment / (2.0 * wire.arccosh_ratio())
        }
    };
    let jw = J * medium.omega();
    let current = x
        .iter()
        .map(|&xv| {
            let dx = xv - scenario.x0;
            if amp == 0.0 || dx == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            -dx.signum() * jw * amp * (-J * k * dx.abs()).exp()
        })
        .collect();
    Ok(TemCurrent { x: x.to_vec(), current })
}
