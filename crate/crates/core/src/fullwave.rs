//! Per-`k_x` Galerkin systems for the Chebyshev coefficients of the strip
//! current: the even system couples `{c_{2n}, d_{2n+1}}`, the odd one
//! `{c_{2n+1}, d_{2n}}`.
//!
//! Unknown layout within each parity: the `c` block (`n = 0..=m_max`) followed by the
//! `d` block. Rows: `E_x` tests (`m = 0..=m_max`) followed by `E_y` tests.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::em::{longitudinal_wavenumber, DipoleAxis, Medium, Scenario};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::quadrature::{integrate_vector, spectral_breakpoints, QuadratureConfig};
use crate::specfun::{self, J0_SQUARED_TAIL, MAX_BESSEL_ORDER};

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationOrder {
    pub m_max: usize,
}

impl TruncationOrder {
    pub fn new(m_max: usize) -> Result<Self> {
        // Highest Bessel order used is 2·m_max + 2.
        if 2 * m_max + 2 > MAX_BESSEL_ORDER {
            return Err(Error::InvalidArgument(format!("m_max = {m_max} is too large")));
        }
        Ok(Self { m_max })
    }

    /// Dimension of each parity system.
    pub fn dim(&self) -> usize {
        2 * (self.m_max + 1)
    }

    /// Length of the full `c` and `d` vectors.
    pub fn n_coeffs(&self) -> usize {
        2 * self.m_max + 2
    }

    pub fn max_bessel_order(&self) -> usize {
        2 * self.m_max + 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// How the right-hand-side integrals treat their slowly decaying part when
/// the dipole is close to the strip plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RhsMode {
    /// Extract the closed-form leading behaviour only when `k_y_max·|a − z₀|` is small.
    #[default]
    Auto,
    Direct,
    Extracted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSystem {
    pub matrix: Matrix,
    pub rhs: Vec<Complex64>,
    pub parity: Parity,
    pub k_x: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    pub k_x: Complex64,
    pub c: Vec<Complex64>,
    pub d: Vec<Complex64>,
    /// Largest condition estimate of the two parity solves.
    pub condition: f64,
    /// Largest relative residual of the two parity solves.
    pub residual: f64,
}

impl SpectralCoefficients {
    /// `K_x(k_x, k_y)` from the first-kind expansion.
    pub fn kx_spectral(&self, h: f64, bessel: &[f64]) -> Complex64 {
        let mut s = ZERO;
        let mut jn = Complex64::new(1.0, 0.0);
        for (n, c) in self.c.iter().enumerate() {
            s += jn * c * bessel[n];
            jn *= J;
        }
        PI * h * s
    }

    /// `K_y(k_x, k_y)` from the second-kind expansion.
    pub fn ky_spectral(&self, h: f64, k_y: f64, bessel: &[f64]) -> Complex64 {
        let x = k_y * h;
        let mut s = ZERO;
        let mut jn = Complex64::new(1.0, 0.0);
        for (n, d) in self.d.iter().enumerate() {
            let ratio = if x == 0.0 {
                if n == 0 {
                    0.5
                } else {
                    0.0
                }
            } else {
                bessel[n + 1] / x
            };
            s += jn * d * (n as f64 + 1.0) * ratio;
            jn *= J;
        }
        PI * h * s
    }
}

/// Symmetric tables `∫₀^∞ w(k_y) J_μ(k_y h) J_ν(k_y h) dk_y` for the two weights
/// `w₁ = (1 − e^{−j2k_z a})/k_z` and `w₂ = w₁ (k² − k_y²)/k_y²`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelIntegrals {
    pub max_order: usize,
    w1: Vec<Complex64>,
    w2: Vec<Complex64>,
    pub evaluations: usize,
}

impl KernelIntegrals {
    fn idx(&self, a: usize, b: usize) -> usize {
        a * (self.max_order + 1) + b
    }

    pub fn w1(&self, a: usize, b: usize) -> Complex64 {
        self.w1[self.idx(a, b)]
    }

    pub fn w2(&self, a: usize, b: usize) -> Complex64 {
        self.w2[self.idx(a, b)]
    }
}

#[derive(Debug, Clone, Copy)]
enum Weight {
    W1,
    W2,
}

/// Location of the near-singularity of `1/k_z` on the `k_y` axis.
fn kz_branch_point(k: Complex64, k_x: Complex64) -> Option<f64> {
    let s = (k * k - k_x * k_x).sqrt();
    (s.re > 0.0).then_some(s.re)
}

/// Computes the `w₁`/`w₂` Bessel-product tables for orders up to `max_order`,
/// restricted to the parities in `parities`.
pub fn kernel_integrals(
    medium: &Medium,
    h: f64,
    a: f64,
    k_x: Complex64,
    max_order: usize,
    parities: &[Parity],
    cfg: &QuadratureConfig,
) -> Result<KernelIntegrals> {
    cfg.validate()?;
    if max_order > MAX_BESSEL_ORDER {
        return Err(Error::InvalidArgument(format!("Bessel order {max_order} too large")));
    }
    let k = medium.k();
    let mut comps: Vec<(Weight, usize, usize)> = Vec::new();
    for &p in parities {
        let start = if p == Parity::Even { 0 } else { 1 };
        for a_ord in (start..=max_order).step_by(2) {
            for b_ord in (a_ord..=max_order).step_by(2) {
                comps.push((Weight::W1, a_ord, b_ord));
                if a_ord > 0 {
                    comps.push((Weight::W2, a_ord, b_ord));
                }
            }
        }
    }
    let inv_h = 1.0 / h;
    let dim = comps.len();
    let integrand = |ky: f64, out: &mut [Complex64]| {
        let mut bj = [0.0; MAX_BESSEL_ORDER + 1];
        specfun::bessel_j_into(ky * h, &mut bj[..=max_order]);
        let kz = longitudinal_wavenumber(k, k_x, ky);
        let w1 = (1.0 - (-2.0 * J * kz * a).exp()) / kz;
        let w2 = w1 * (k * k - ky * ky) / (ky * ky);
        let lead = J / ky;
        for (slot, &(w, ma, mb)) in out.iter_mut().zip(comps.iter()) {
            let prod = bj[ma] * bj[mb];
            *slot = match w {
                Weight::W1 => {
                    if ma == 0 && mb == 0 && ky <= inv_h {
                        w1 * prod
                    } else {
                        (w1 - lead) * prod
                    }
                }
                Weight::W2 => (w2 + lead) * prod,
            };
        }
    };
    let bp = spectral_breakpoints(cfg, h, kz_branch_point(k, k_x));
    let r = integrate_vector(integrand, dim, &bp, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions)?;
    let n = max_order + 1;
    let mut w1 = vec![ZERO; n * n];
    let mut w2 = vec![ZERO; n * n];
    for (v, &(w, ma, mb)) in r.value.iter().zip(comps.iter()) {
        let diag = if ma == mb { 1.0 / (2.0 * ma.max(1) as f64) } else { 0.0 };
        let (table, add) = match w {
            Weight::W1 if ma == 0 && mb == 0 => (&mut w1, J * J0_SQUARED_TAIL),
            Weight::W1 => (&mut w1, J * diag),
            Weight::W2 => (&mut w2, -J * diag),
        };
        table[ma * n + mb] = v + add;
        table[mb * n + ma] = v + add;
    }
    Ok(KernelIntegrals {
        max_order,
        w1,
        w2,
        evaluations: r.evaluations,
    })
}

/// One right-hand-side row: Bessel order, test equation and trigonometric factor.
#[derive(Debug, Clone, Copy, PartialEq)]
struct RhsRow {
    order: usize,
    /// `false`: `E_x` test; `true`: `E_y` test.
    ey: bool,
    /// `true`: `cos(k_y y₀)`; `false`: `j sin(k_y y₀)`.
    cosine: bool,
}

fn rhs_rows(parity: Parity, axis: DipoleAxis, m_max: usize) -> Vec<RhsRow> {
    let y_like = axis == DipoleAxis::Y;
    // even system: cos for x̂, ẑ; j·sin for ŷ. Odd system swaps.
    let cosine = (parity == Parity::Even) != y_like;
    let mut rows = Vec::with_capacity(2 * (m_max + 1));
    for m in 0..=m_max {
        let order = if parity == Parity::Even { 2 * m } else { 2 * m + 1 };
        rows.push(RhsRow { order, ey: false, cosine });
    }
    for m in 0..=m_max {
        let order = if parity == Parity::Even { 2 * m + 2 } else { 2 * m + 1 };
        rows.push(RhsRow { order, ey: true, cosine });
    }
    rows
}

/// Orientation-dependent prefactor of the right-hand integrand, excluding the Bessel and trig factors.
fn rhs_prefactor(axis: DipoleAxis, ey: bool, k: Complex64, k_x: Complex64, ky: f64, kz: Complex64, h: f64) -> Complex64 {
    match (axis, ey) {
        (DipoleAxis::X, false) => -(k * k - k_x * k_x) / kz,
        (DipoleAxis::Y, false) => k_x * ky / kz,
        (DipoleAxis::Z, false) => k_x,
        (DipoleAxis::X, true) => k_x / (kz * h),
        (DipoleAxis::Y, true) => -(k * k - ky * ky) / (ky * kz * h),
        (DipoleAxis::Z, true) => Complex64::new(1.0 / h, 0.0),
    }
}

/// Large-`k_y` form of [`rhs_prefactor`]: `(coefficient, has 1/k_y)`.
fn rhs_prefactor_asymptote(axis: DipoleAxis, ey: bool, k: Complex64, k_x: Complex64, h: f64) -> (Complex64, bool) {
    match (axis, ey) {
        (DipoleAxis::X, false) => (-(k * k - k_x * k_x) * J, true),
        (DipoleAxis::Y, false) => (J * k_x, false),
        (DipoleAxis::Z, false) => (k_x, false),
        (DipoleAxis::X, true) => (J * k_x / h, true),
        (DipoleAxis::Y, true) => (J / h, false),
        (DipoleAxis::Z, true) => (Complex64::new(1.0 / h, 0.0), false),
    }
}

/// Exponential bracket: the difference form for horizontal dipoles, the signed
/// sum for the vertical one.
fn rhs_bracket(axis: DipoleAxis, kz: Complex64, a: f64, z0: f64) -> Complex64 {
    let near = (-J * kz * (a - z0).abs()).exp();
    let far = (-J * kz * (a + z0)).exp();
    match axis {
        DipoleAxis::Z => (a - z0).signum() * near + far,
        _ => near - far,
    }
}

fn rhs_bracket_sign(axis: DipoleAxis, a: f64, z0: f64) -> f64 {
    match axis {
        DipoleAxis::Z => (a - z0).signum(),
        _ => 1.0,
    }
}

/// Right-hand-side integrals for the requested parities, concatenated in row order,
/// including the common factor `j p/(ε η) e^{j k_x x₀}`.
pub fn rhs_integrals(
    medium: &Medium,
    scenario: &Scenario,
    k_x: Complex64,
    order: TruncationOrder,
    parities: &[Parity],
    cfg: &QuadratureConfig,
    mode: RhsMode,
) -> Result<Vec<Complex64>> {
    let rows: Vec<RhsRow> = parities
        .iter()
        .flat_map(|&p| rhs_rows(p, scenario.axis, order.m_max))
        .collect();
    rhs_for_rows(medium, scenario, k_x, &rows, order.max_bessel_order(), cfg, mode)
}

fn rhs_for_rows(
    medium: &Medium,
    s: &Scenario,
    k_x: Complex64,
    rows: &[RhsRow],
    max_order: usize,
    cfg: &QuadratureConfig,
    mode: RhsMode,
) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    let k = medium.k();
    let h = s.h;
    let d = (s.a - s.z0).abs();
    let extract = match mode {
        RhsMode::Direct => false,
        RhsMode::Extracted => true,
        RhsMode::Auto => cfg.k_y_max * d < 40.0,
    };
    let sigma = rhs_bracket_sign(s.axis, s.a, s.z0);
    // Asymptotic pieces: for each row, two exponentials e^{-b± k_y}, b± = d ∓ j y₀.
    let b_plus = Complex64::new(d, -s.y0);
    let b_minus = Complex64::new(d, s.y0);
    let c_reg = d + 1.0 / h;
    let mut closed = vec![ZERO; rows.len()];
    if extract {
        for (i, r) in rows.iter().enumerate() {
            let (coef, over_k) = rhs_prefactor_asymptote(s.axis, r.ey, k, k_x, h);
            let s_minus = if r.cosine { 1.0 } else { -1.0 };
            let f = |b: Complex64| -> Result<Complex64> {
                if over_k {
                    if r.order == 0 {
                        specfun::laplace_bessel_0_over_k_regularized(b, h, Complex64::new(c_reg, 0.0))
                    } else {
                        specfun::laplace_bessel_over_k(b, h, r.order)
                    }
                } else {
                    specfun::laplace_bessel_0(b, h, r.order)
                }
            };
            closed[i] = coef * sigma * 0.5 * (f(b_plus)? + s_minus * f(b_minus)?);
        }
    }
    let integrand = |ky: f64, out: &mut [Complex64]| {
        let mut bj = [0.0; MAX_BESSEL_ORDER + 1];
        specfun::bessel_j_into(ky * h, &mut bj[..=max_order]);
        let kz = longitudinal_wavenumber(k, k_x, ky);
        let bracket = rhs_bracket(s.axis, kz, s.a, s.z0);
        let (sn, cs) = (ky * s.y0).sin_cos();
        let (e_plus, e_minus) = if extract {
            ((-b_plus * ky).exp(), (-b_minus * ky).exp())
        } else {
            (ZERO, ZERO)
        };
        for (slot, r) in out.iter_mut().zip(rows.iter()) {
            let trig = if r.cosine { Complex64::new(cs, 0.0) } else { J * sn };
            let pre = rhs_prefactor(s.axis, r.ey, k, k_x, ky, kz, h);
            let mut v = pre * bracket * trig * bj[r.order];
            if extract {
                let (coef, over_k) = rhs_prefactor_asymptote(s.axis, r.ey, k, k_x, h);
                let s_minus = if r.cosine { 1.0 } else { -1.0 };
                let mut asym = 0.5 * (e_plus + s_minus * e_minus) * bj[r.order];
                if over_k && r.order == 0 {
                    asym -= 0.5 * (1.0 + s_minus) * (-c_reg * ky).exp();
                }
                let asym = if over_k { asym / ky } else { asym };
                v -= coef * sigma * asym;
            }
            *slot = v;
        }
    };
    let scale = closed.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let abs_tol = cfg.abs_tol.max(cfg.rel_tol * scale);
    let bp = spectral_breakpoints(cfg, h, kz_branch_point(k, k_x));
    let r = integrate_vector(integrand, rows.len(), &bp, abs_tol, cfg.rel_tol, cfg.max_subdivisions)?;
    let common = J * s.moment / (medium.epsilon() * medium.eta()) * (J * k_x * s.x0).exp();
    Ok(r.value
        .iter()
        .zip(closed.iter())
        .map(|(v, c)| common * (v + c))
        .collect())
}

/// Right-hand side of the scalar narrow-strip equation (the `J₀` row of the even system).
pub fn narrow_rhs_integral(
    medium: &Medium,
    scenario: &Scenario,
    k_x: Complex64,
    cfg: &QuadratureConfig,
    mode: RhsMode,
) -> Result<Complex64> {
    let cosine = scenario.axis != DipoleAxis::Y;
    let row = RhsRow { order: 0, ey: false, cosine };
    Ok(rhs_for_rows(medium, scenario, k_x, &[row], 0, cfg, mode)?[0])
}

fn fill_matrix(
    medium: &Medium,
    h: f64,
    k_x: Complex64,
    order: TruncationOrder,
    parity: Parity,
    ints: &KernelIntegrals,
) -> Matrix {
    let k = medium.k();
    let m1 = order.m_max + 1;
    let mut mat = Matrix::zeros(order.dim());
    let pref = PI * h / k;
    let kk = k * k - k_x * k_x;
    for m in 0..m1 {
        for n in 0..m1 {
            let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
            let p = pref * sgn;
            match parity {
                Parity::Even => {
                    let (nn, mm) = (2 * n, 2 * m);
                    mat[(m, n)] = p * kk * ints.w1(mm, nn);
                    mat[(m, m1 + n)] = p * (-J * k_x / h) * (nn as f64 + 2.0) * ints.w1(mm, nn + 2);
                    mat[(m1 + m, n)] = p * (-k_x / h) * ints.w1(mm + 2, nn);
                    mat[(m1 + m, m1 + n)] = p * J * (nn as f64 + 2.0) / (h * h) * ints.w2(mm + 2, nn + 2);
                }
                Parity::Odd => {
                    let (nn, mm) = (2 * n + 1, 2 * m + 1);
                    let w = ints.w1(mm, nn);
                    mat[(m, n)] = p * J * kk * w;
                    mat[(m, m1 + n)] = p * (-k_x / h) * (nn as f64) * w;
                    mat[(m1 + m, n)] = p * (-J * k_x / h) * w;
                    mat[(m1 + m, m1 + n)] = p * (nn as f64) / (h * h) * ints.w2(mm, nn);
                }
            }
        }
    }
    mat
}

fn assemble(
    medium: &Medium,
    scenario: &Scenario,
    k_x: Complex64,
    order: TruncationOrder,
    parity: Parity,
    cfg: &QuadratureConfig,
    mode: RhsMode,
) -> Result<SpectralSystem> {
    let ints = kernel_integrals(
        medium,
        scenario.h,
        scenario.a,
        k_x,
        order.max_bessel_order(),
        &[parity],
        cfg,
    )
    .map_err(|e| assembly_error(k_x, 0, 0, e))?;
    let rhs = rhs_integrals(medium, scenario, k_x, order, &[parity], cfg, mode)
        .map_err(|e| assembly_error(k_x, 0, order.dim(), e))?;
    Ok(SpectralSystem {
        matrix: fill_matrix(medium, scenario.h, k_x, order, parity, &ints),
        rhs,
        parity,
        k_x,
    })
}

fn assembly_error(k_x: Complex64, row: usize, col: usize, e: Error) -> Error {
    Error::Assembly {
        k_x_re: k_x.re,
        k_x_im: k_x.im,
        row,
        col,
        source: Box::new(e),
    }
}

pub fn assemble_even(
    medium: &Medium,
    scenario: &Scenario,
    k_x: Complex64,
    order: TruncationOrder,
    cfg: &QuadratureConfig,
) -> Result<SpectralSystem> {
    assemble(medium, scenario, k_x, order, Parity::Even, cfg, RhsMode::Auto)
}

pub fn assemble_odd(
    medium: &Medium,
    scenario: &Scenario,
    k_x: Complex64,
    order: TruncationOrder,
    cfg: &QuadratureConfig,
) -> Result<SpectralSystem> {
    assemble(medium, scenario, k_x, order, Parity::Odd, cfg, RhsMode::Auto)
}

/// Solution of one parity system; `x` holds the `c` block then the `d` block.
pub fn solve_system(sys: &SpectralSystem) -> Result<linalg::Solution> {
    if sys.rhs.iter().all(|v| *v == ZERO) {
        return Ok(linalg::Solution {
            x: vec![ZERO; sys.rhs.len()],
            condition: 1.0,
            residual: 0.0,
        });
    }
    linalg::solve(&sys.matrix, &sys.rhs)
}

fn scatter(parity: Parity, m_max: usize, x: &[Complex64], c: &mut [Complex64], d: &mut [Complex64]) {
    let m1 = m_max + 1;
    for n in 0..m1 {
        match parity {
            Parity::Even => {
                c[2 * n] = x[n];
                d[2 * n + 1] = x[m1 + n];
            }
            Parity::Odd => {
                c[2 * n + 1] = x[n];
                d[2 * n] = x[m1 + n];
            }
        }
    }
}

/// Assembles and solves both parities, sharing one quadrature pass for the matrices
/// and one for the right-hand sides.
pub fn solve_all(
    medium: &Medium,
    scenario: &Scenario,
    k_x: Complex64,
    order: TruncationOrder,
    cfg: &QuadratureConfig,
) -> Result<SpectralCoefficients> {
    solve_all_with(medium, scenario, k_x, order, cfg, RhsMode::Auto)
}

pub fn solve_all_with(
    medium: &Medium,
    scenario: &Scenario,
    k_x: Complex64,
    order: TruncationOrder,
    cfg: &QuadratureConfig,
    mode: RhsMode,
) -> Result<SpectralCoefficients> {
    let both = [Parity::Even, Parity::Odd];
    let ints = kernel_integrals(medium, scenario.h, scenario.a, k_x, order.max_bessel_order(), &both, cfg)
        .map_err(|e| assembly_error(k_x, 0, 0, e))?;
    let rhs = rhs_integrals(medium, scenario, k_x, order, &both, cfg, mode)
        .map_err(|e| assembly_error(k_x, 0, order.dim(), e))?;
    let n = order.n_coeffs();
    let mut c = vec![ZERO; n];
    let mut d = vec![ZERO; n];
    let mut condition: f64 = 1.0;
    let mut residual: f64 = 0.0;
    let dim = order.dim();
    for (i, &parity) in both.iter().enumerate() {
        let sys = SpectralSystem {
            matrix: fill_matrix(medium, scenario.h, k_x, order, parity, &ints),
            rhs: rhs[i * dim..(i + 1) * dim].to_vec(),
            parity,
            k_x,
        };
        let sol = solve_system(&sys)?;
        condition = condition.max(sol.condition);
        residual = residual.max(sol.residual);
        scatter(parity, order.m_max, &sol.x, &mut c, &mut d);
    }
    Ok(SpectralCoefficients {
        k_x,
        c,
        d,
        condition,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn medium() -> Medium {
        Medium::lossy_vacuum(300e6, 1e-5).unwrap()
    }

    fn quad(h: f64, a: f64) -> QuadratureConfig {
        QuadratureConfig::for_geometry(h, a, 1e-8).unwrap()
    }

    #[test]
    fn rhs_row_layout() {
        let rows = rhs_rows(Parity::Even, DipoleAxis::X, 1);
        assert_eq!(rows.iter().map(|r| r.order).collect::<Vec<_>>(), vec![0, 2, 2, 4]);
        assert!(rows.iter().all(|r| r.cosine));
        let rows = rhs_rows(Parity::Odd, DipoleAxis::Y, 1);
        assert_eq!(rows.iter().map(|r| r.order).collect::<Vec<_>>(), vec![1, 3, 1, 3]);
        assert!(rows.iter().all(|r| r.cosine));
        assert!(rhs_rows(Parity::Even, DipoleAxis::Y, 0).iter().all(|r| !r.cosine));
    }

    #[test]
    fn z_dipole_on_axis_has_no_odd_drive() {
        let m = medium();
        let s = Scenario::new(0.1, 1.0, [0.0, 0.0, 0.5], DipoleAxis::Z, 1.0).unwrap();
        let sys = assemble_odd(&m, &s, Complex64::new(2.0, 0.01), TruncationOrder::new(1).unwrap(), &quad(0.1, 1.0)).unwrap();
        assert!(sys.rhs.iter().all(|v| v.norm() == 0.0));
        let sol = solve_system(&sys).unwrap();
        assert!(sol.x.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn rhs_extraction_matches_direct_quadrature() {
        let m = medium();
        for axis in DipoleAxis::ALL {
            let s = Scenario::new(0.1, 1.0, [0.2, 0.05, 0.5], axis, 1.0).unwrap();
            let order = TruncationOrder::new(1).unwrap();
            let cfg = quad(0.1, 1.0);
            let kx = Complex64::new(3.0, 0.006);
            let both = [Parity::Even, Parity::Odd];
            let direct = rhs_integrals(&m, &s, kx, order, &both, &cfg, RhsMode::Direct).unwrap();
            let extracted = rhs_integrals(&m, &s, kx, order, &both, &cfg, RhsMode::Extracted).unwrap();
            let scale = direct.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (p, q) in direct.iter().zip(&extracted) {
                assert!((p - q).norm() < 1e-7 * scale, "{axis:?}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn kernel_table_is_symmetric_and_parity_split() {
        let m = medium();
        let cfg = quad(0.5, 1.0);
        let t = kernel_integrals(&m, 0.5, 1.0, Complex64::new(1.0, 0.1), 4, &[Parity::Even], &cfg).unwrap();
        assert_eq!(t.w1(0, 2), t.w1(2, 0));
        assert_eq!(t.w1(1, 3), ZERO);
        assert!(t.w1(0, 0).norm() > 0.0);
    }
}
