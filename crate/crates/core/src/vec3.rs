//! Minimal complex 3-vector algebra. Dot products are bilinear (no conjugation).

use num_complex::Complex64;

pub type C3 = [Complex64; 3];

pub const ZERO3: C3 = [Complex64::new(0.0, 0.0); 3];

pub fn dot(a: &C3, b: &C3) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &C3, b: &C3) -> C3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn scale(s: Complex64, a: &C3) -> C3 {
    [s * a[0], s * a[1], s * a[2]]
}

pub fn add(a: &C3, b: &C3) -> C3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: &C3, b: &C3) -> C3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn norm(a: &C3) -> f64 {
    (a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()).sqrt()
}

/// Accumulates `s * a` into `acc`.
pub fn axpy(acc: &mut C3, s: Complex64, a: &C3) {
    for i in 0..3 {
        acc[i] += s * a[i];
    }
}
