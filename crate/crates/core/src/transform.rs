//! Inverse Fourier transform in `k_x` along a deformed contour, and the
//! reconstruction of spatial Chebyshev coefficients, surface currents and
//! total current from spectral samples.
//!
//! The path leaves the real axis at `±k_b`, runs at height `∓Δ` past the TEM
//! poles at `±k`, and crosses the origin on a straight diagonal. The poles and
//! branch cuts attached to `+k` lie just below the real axis and those of
//! `−k` just above, so the region swept by the deformation holds no
//! singularities.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::em::{Medium, Scenario};
use crate::error::{Error, Result};
use crate::fullwave::{self, SpectralCoefficients, TruncationOrder};
use crate::narrowstrip;
use crate::quadrature::QuadratureConfig;

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Gauss–Legendre points per contour panel.
pub const PANEL_ORDER: usize = 16;

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

/// Inputs of the contour policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    /// Largest `|x|` the contour must serve (m).
    pub x_max: f64,
    /// Node density. Panels are `PANEL_ORDER·(2π/x_max)/samples_per_period` wide,
    /// capped at `2 Re(k)/samples_per_period`; the refinement near `±Re(k)` scales the same way.
    pub samples_per_period: f64,
    /// Distance `|a − z₀|` controlling the spectral decay; sets the default `k_x_max`.
    pub source_gap: f64,
    pub k_x_max: Option<f64>,
    pub delta_k_x: Option<f64>,
    /// Bound on `e^{Δ x_max}`.
    pub guard: f64,
}

impl ContourSpec {
    pub fn new(x_max: f64, source_gap: f64) -> Self {
        Self {
            x_max,
            samples_per_period: 8.0,
            source_gap,
            k_x_max: None,
            delta_k_x: None,
            guard: 1e10,
        }
    }

    pub fn for_scenario(x_max: f64, scenario: &Scenario) -> Self {
        Self::new(x_max, (scenario.a - scenario.z0).abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KxContour {
    pub k_x_max: f64,
    pub delta_k_x: f64,
    pub x_max: f64,
    pub nodes: Vec<Complex64>,
    /// `dk_x` weights including the path direction.
    pub weights: Vec<Complex64>,
}

impl KxContour {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn push_panel(nodes: &mut Vec<Complex64>, weights: &mut Vec<Complex64>, a: Complex64, b: Complex64) {
    let (x, w) = panel_rule();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    for (xi, wi) in x.iter().zip(w.iter()) {
        nodes.push(mid + half * *xi);
        weights.push(half * *wi);
    }
}

/// Splits the straight segment `a → b` into panels no longer than `width`,
/// graded geometrically towards the parameter values in `focus` (fractions of the segment).
fn segment_edges(len: f64, width: f64, focus: &[(f64, f64)]) -> Vec<f64> {
    // focus: (position along segment in length units, finest panel size)
    let mut edges = vec![0.0, len];
    for &(p, fine) in focus {
        if p <= 0.0 || p >= len {
            continue;
        }
        edges.push(p);
        let mut s = fine;
        let mut off = fine;
        while off < len && s < width {
            if p + off < len {
                edges.push(p + off);
            }
            if p - off > 0.0 {
                edges.push(p - off);
            }
            s *= 2.0;
            off += s;
        }
    }
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|x, y| (*x - *y).abs() < 1e-14 * len.max(1.0));
    let mut out = vec![edges[0]];
    for w in edges.windows(2) {
        let gap = w[1] - w[0];
        let pieces = (gap / width).ceil().max(1.0) as usize;
        for i in 1..=pieces {
            out.push(w[0] + gap * i as f64 / pieces as f64);
        }
    }
    out
}

fn add_segment(
    nodes: &mut Vec<Complex64>,
    weights: &mut Vec<Complex64>,
    a: Complex64,
    b: Complex64,
    width: f64,
    focus_re: &[f64],
    fine: f64,
) {
    let len = (b - a).norm();
    if len == 0.0 {
        return;
    }
    let dir = (b - a) / len;
    // map real-part focus points to arclength positions
    let focus: Vec<(f64, f64)> = focus_re
        .iter()
        .filter_map(|&re| {
            if dir.re.abs() < 1e-15 {
                return None;
            }
            let t = (re - a.re) / dir.re;
            (t > 0.0 && t < len).then_some((t, fine))
        })
        .collect();
    let edges = segment_edges(len, width, &focus);
    for w in edges.windows(2) {
        push_panel(nodes, weights, a + dir * w[0], a + dir * w[1]);
    }
}

/// Deformed inversion contour for the given medium and policy.
pub fn build_contour(medium: &Medium, spec: &ContourSpec) -> Result<KxContour> {
    if !(spec.x_max > 0.0) {
        return Err(Error::InvalidArgument(format!("x_max = {} must be > 0", spec.x_max)));
    }
    if !(spec.samples_per_period > 0.0) {
        return Err(Error::InvalidArgument("samples_per_period must be > 0".into()));
    }
    let k = medium.k();
    let kr = k.re;
    let delta = spec.delta_k_x.unwrap_or(100.0 * (-k.im));
    let cap = spec.guard.ln() / spec.x_max;
    if delta < 0.0 {
        return Err(Error::InvalidArgument("delta_k_x must be >= 0".into()));
    }
    if delta > cap {
        return Err(Error::ContourInfeasible(format!(
            "Δk_x = {delta:e} exceeds ln(guard)/x_max = {cap:e}; reduce x_max or the medium loss"
        )));
    }
    let default_kmax = if spec.source_gap > 0.0 {
        (8.0 * k.norm()).max(30.0 / spec.source_gap)
    } else {
        8.0 * k.norm()
    };
    let k_x_max = spec.k_x_max.unwrap_or(default_kmax);
    let k_b = 1.5 * kr;
    let k_a = 0.5 * kr;
    if k_x_max <= k_b {
        return Err(Error::InvalidArgument(format!("k_x_max = {k_x_max} must exceed 1.5·Re(k)")));
    }
    let width = PANEL_ORDER as f64 * (2.0 * PI / spec.x_max) / spec.samples_per_period;
    let width = width.min(2.0 * kr / spec.samples_per_period);
    let density = 8.0 / spec.samples_per_period;
    let fine = density * if delta > 0.0 { 0.5 * delta } else { 0.5 * (-k.im).max(1e-6 * kr) };
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let c = |re: f64, im: f64| Complex64::new(re, im);
    if delta == 0.0 {
        add_segment(&mut nodes, &mut weights, c(-k_x_max, 0.0), c(k_x_max, 0.0), width, &[-kr, kr], fine);
    } else {
        let path = [
            (c(-k_x_max, 0.0), c(-k_b, 0.0)),
            (c(-k_b, 0.0), c(-k_b, -delta)),
            (c(-k_b, -delta), c(-k_a, -delta)),
            (c(-k_a, -delta), c(k_a, delta)),
            (c(k_a, delta), c(k_b, delta)),
            (c(k_b, delta), c(k_b, 0.0)),
            (c(k_b, 0.0), c(k_x_max, 0.0)),
        ];
        for (a, b) in path {
            add_segment(&mut nodes, &mut weights, a, b, width, &[-kr, kr], fine);
        }
    }
    Ok(KxContour {
        k_x_max,
        delta_k_x: delta,
        x_max: spec.x_max,
        nodes,
        weights,
    })
}

fn check_guard(contour: &KxContour, x: f64) -> Result<()> {
    if x.abs() > contour.x_max * (1.0 + 1e-12) {
        return Err(Error::OutsideGuardRange { x, x_max: contour.x_max });
    }
    Ok(())
}

/// `(1/2π) ∫ f(k_x) e^{−j k_x x} dk_x` along the contour.
pub fn inverse_transform(contour: &KxContour, samples: &[Complex64], x: f64) -> Result<Complex64> {
    if samples.len() != contour.len() {
        return Err(Error::InvalidArgument(format!(
            "{} samples for {} contour nodes",
            samples.len(),
            contour.len()
        )));
    }
    check_guard(contour, x)?;
    let mut s = ZERO;
    for ((kx, w), f) in contour.nodes.iter().zip(&contour.weights).zip(samples) {
        s += w * f * (-J * kx * x).exp();
    }
    Ok(s / (2.0 * PI))
}

/// Same as [`inverse_transform`] for many spectral functions sharing the
/// exponential factors: `samples[node][component]`.
pub fn inverse_transform_many(contour: &KxContour, samples: &[Vec<Complex64>], x: f64) -> Result<Vec<Complex64>> {
    check_guard(contour, x)?;
    let dim = samples.first().map_or(0, |v| v.len());
    let mut out = vec![ZERO; dim];
    for ((kx, w), f) in contour.nodes.iter().zip(&contour.weights).zip(samples) {
        let e = w * (-J * kx * x).exp();
        for (o, v) in out.iter_mut().zip(f) {
            *o += e * v;
        }
    }
    Ok(out.into_iter().map(|v| v / (2.0 * PI)).collect())
}

/// Solves the full-wave systems at every contour node; parallel over nodes.
pub fn sample_fullwave(
    medium: &Medium,
    scenario: &Scenario,
    contour: &KxContour,
    order: TruncationOrder,
    cfg: &QuadratureConfig,
) -> Result<Vec<SpectralCoefficients>> {
    contour
        .nodes
        .par_iter()
        .map(|&kx| fullwave::solve_all(medium, scenario, kx, order, cfg))
        .collect()
}

/// Narrow-strip spectral current at every contour node; parallel over nodes.
pub fn sample_narrow(
    medium: &Medium,
    scenario: &Scenario,
    contour: &KxContour,
    cfg: &QuadratureConfig,
) -> Result<narrowstrip::NarrowSpectralCurrent> {
    let samples: Result<Vec<_>> = contour
        .nodes
        .par_iter()
        .map(|&kx| narrowstrip::solve_narrow(medium, scenario, kx, cfg).map(|i| (kx, i)))
        .collect();
    Ok(narrowstrip::NarrowSpectralCurrent { samples: samples? })
}

/// Spatial surface currents on an `x × y` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentMap {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `k_x_current[ix][iy]` in A/m.
    pub k_x_current: Vec<Vec<Complex64>>,
    pub k_y_current: Vec<Vec<Complex64>>,
    /// Total current `πh c₀(x)` in A.
    pub total: Vec<Complex64>,
    /// `c_n(x)` and `d_n(x)` per grid point.
    pub c: Vec<Vec<Complex64>>,
    pub d: Vec<Vec<Complex64>>,
}

/// Chebyshev polynomials `T_0..T_{n-1}` and `U_0..U_{n-1}` at `u`.
fn chebyshev(u: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut t = vec![0.0; n.max(2)];
    let mut v = vec![0.0; n.max(2)];
    t[0] = 1.0;
    t[1] = u;
    v[0] = 1.0;
    v[1] = 2.0 * u;
    for i in 2..n {
        t[i] = 2.0 * u * t[i - 1] - t[i - 2];
        v[i] = 2.0 * u * v[i - 1] - v[i - 2];
    }
    t.truncate(n);
    v.truncate(n);
    (t, v)
}

fn check_y(y: &[f64], h: f64) -> Result<()> {
    if let Some(bad) = y.iter().find(|v| v.abs() >= h) {
        return Err(Error::InvalidArgument(format!(
            "y = {bad} is not inside the strip interior |y| < h = {h}"
        )));
    }
    Ok(())
}

/// `K_x` and `K_y` at `y` from coefficient values.
pub fn currents_at(c: &[Complex64], d: &[Complex64], h: f64, y: f64) -> (Complex64, Complex64) {
    let u = y / h;
    let root = (1.0 - u * u).sqrt();
    let n = c.len().max(d.len());
    let (t, v) = chebyshev(u, n);
    let kx: Complex64 = c.iter().zip(&t).map(|(a, b)| a * b).sum::<Complex64>() / root;
    let ky: Complex64 = d.iter().zip(&v).map(|(a, b)| a * b).sum::<Complex64>() * root;
    (kx, ky)
}

/// Full-wave reconstruction from per-node coefficients.
pub fn reconstruct_currents(
    contour: &KxContour,
    spectral: &[SpectralCoefficients],
    x: &[f64],
    y: &[f64],
    h: f64,
) -> Result<CurrentMap> {
    check_y(y, h)?;
    if spectral.len() != contour.len() {
        return Err(Error::InvalidArgument("spectral samples do not match the contour".into()));
    }
    let nc = spectral.first().map_or(0, |s| s.c.len());
    let stacked: Vec<Vec<Complex64>> = spectral
        .iter()
        .map(|s| s.c.iter().chain(s.d.iter()).cloned().collect())
        .collect();
    let mut map = CurrentMap {
        x: x.to_vec(),
        y: y.to_vec(),
        k_x_current: Vec::with_capacity(x.len()),
        k_y_current: Vec::with_capacity(x.len()),
        total: Vec::with_capacity(x.len()),
        c: Vec::with_capacity(x.len()),
        d: Vec::with_capacity(x.len()),
    };
    for &xv in x {
        let v = inverse_transform_many(contour, &stacked, xv)?;
        let (c, d) = v.split_at(nc);
        let mut kx_row = Vec::with_capacity(y.len());
        let mut ky_row = Vec::with_capacity(y.len());
        for &yv in y {
            let (a, b) = currents_at(c, d, h, yv);
            kx_row.push(a);
            ky_row.push(b);
        }
        map.k_x_current.push(kx_row);
        map.k_y_current.push(ky_row);
        map.total.push(PI * h * c[0]);
        map.c.push(c.to_vec());
        map.d.push(d.to_vec());
    }
    Ok(map)
}

/// Narrow-strip reconstruction: `K_x = I(x)/(πh)/√(1 − y²/h²)`, `K_y = 0`.
pub fn reconstruct_narrow(
    contour: &KxContour,
    spectral: &narrowstrip::NarrowSpectralCurrent,
    x: &[f64],
    y: &[f64],
    h: f64,
) -> Result<CurrentMap> {
    check_y(y, h)?;
    let values: Vec<Complex64> = spectral.samples.iter().map(|s| s.1).collect();
    let mut map = CurrentMap {
        x: x.to_vec(),
        y: y.to_vec(),
        k_x_current: Vec::new(),
        k_y_current: Vec::new(),
        total: Vec::new(),
        c: Vec::new(),
        d: Vec::new(),
    };
    for &xv in x {
        let i = inverse_transform(contour, &values, xv)?;
        let c0 = i / (PI * h);
        map.k_x_current
            .push(y.iter().map(|&yv| c0 / (1.0 - (yv / h).powi(2)).sqrt()).collect());
        map.k_y_current.push(vec![ZERO; y.len()]);
        map.total.push(i);
        map.c.push(vec![c0]);
        map.d.push(vec![]);
    }
    Ok(map)
}

/// Total current only, from full-wave samples.
pub fn total_current(contour: &KxContour, spectral: &[SpectralCoefficients], x: &[f64], h: f64) -> Result<Vec<Complex64>> {
    let c0: Vec<Complex64> = spectral.iter().map(|s| s.c[0]).collect();
    x.iter()
        .map(|&xv| inverse_transform(contour, &c0, xv).map(|v| PI * h * v))
        .collect()
}

/// Total current only, from narrow-strip samples.
pub fn total_current_narrow(
    contour: &KxContour,
    spectral: &narrowstrip::NarrowSpectralCurrent,
    x: &[f64],
) -> Result<Vec<Complex64>> {
    let values: Vec<Complex64> = spectral.samples.iter().map(|s| s.1).collect();
    x.iter().map(|&xv| inverse_transform(contour, &values, xv)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn medium() -> Medium {
        Medium::lossy_vacuum(300e6, 1e-5).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn contour_policy_for_long_range() {
        let m = medium();
        let c = build_contour(&m, &ContourSpec::new(40.0, 0.5)).unwrap();
        assert!(c.delta_k_x >= 100.0 * -m.k().im * (1.0 - 1e-12));
        assert!((c.delta_k_x * 40.0).exp() < 1e10);
        assert!(c.k_x_max >= 8.0 * m.k().norm());
        // point symmetry of the node set
        let n = c.len();
        for i in 0..n {
            assert!((c.nodes[i] + c.nodes[n - 1 - i]).norm() < 1e-12);
        }
    }

    #[test]
    fn infeasible_guard_is_reported() {
        let m = Medium::lossy_vacuum(300e6, 0.05).unwrap();
        let e = build_contour(&m, &ContourSpec::new(1e3, 0.5));
        assert!(matches!(e, Err(Error::ContourInfeasible(_))));
    }

    #[test]
    fn forced_real_axis() {
        let m = medium();
        let mut spec = ContourSpec::new(10.0, 0.5);
        spec.delta_k_x = Some(0.0);
        let c = build_contour(&m, &spec).unwrap();
        assert!(c.nodes.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn gaussian_pair() {
        let m = medium();
        let sigma = 0.7;
        let mut spec = ContourSpec::new(10.0, 0.5);
        spec.k_x_max = Some(12.0 / sigma);
        let c = build_contour(&m, &spec).unwrap();
        let f: Vec<Complex64> = c.nodes.iter().map(|k| (-k * k * sigma * sigma / 2.0).exp()).collect();
        for &x in &[0.0, 0.3, -1.1, 2.5, 9.0] {
            let v = inverse_transform(&c, &f, x).unwrap();
            let exact = (-x * x / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt());
            assert!((v - exact).norm() < 1e-8, "x={x}: {v} vs {exact}");
        }
    }

    #[test]
    fn pole_pair() {
        // Σ α_i e^{−j k_i |x|} with α chosen so the spectrum decays as k_x^{-6}.
        let m = medium();
        let k = m.k();
        let ks = [k, Complex64::new(0.0, -2.0), Complex64::new(0.0, -3.0)];
        // Σα k = 0, Σα k³ = 0, α₀ = 1
        let (k1, k2) = (ks[1], ks[2]);
        let det = k1 * k2 * k2 * k2 - k2 * k1 * k1 * k1;
        let a1 = (-k * k2 * k2 * k2 + k2 * k * k * k) / det;
        let a2 = (-k1 * k * k * k + k * k1 * k1 * k1) / det;
        let alpha = [Complex64::new(1.0, 0.0), a1, a2];
        let spec = ContourSpec::new(40.0, 0.5);
        let c = build_contour(&m, &spec).unwrap();
        let f: Vec<Complex64> = c
            .nodes
            .iter()
            .map(|kx| {
                alpha
                    .iter()
                    .zip(&ks)
                    .map(|(a, ki)| a * 2.0 * J * ki / (kx * kx - ki * ki))
                    .sum()
            })
            .collect();
        for &x in &[0.5, 3.0, -7.0, 20.0, 39.0] {
            let v = inverse_transform(&c, &f, x).unwrap();
            let exact: Complex64 = alpha.iter().zip(&ks).map(|(a, ki)| a * (-J * ki * x.abs()).exp()).sum();
            assert!((v - exact).norm() < 1e-6, "x={x}: {v} vs {exact}");
        }
    }

    #[test]
    fn odd_spectrum_transforms_to_zero_at_origin() {
        let m = medium();
        let c = build_contour(&m, &ContourSpec::new(10.0, 0.5)).unwrap();
        let f: Vec<Complex64> = c.nodes.iter().map(|k| k * (-k * k).exp()).collect();
        assert!(inverse_transform(&c, &f, 0.0).unwrap().norm() < 1e-14);
        assert!(matches!(inverse_transform(&c, &f, 11.0), Err(Error::OutsideGuardRange { .. })));
    }

    #[test]
    fn chebyshev_total_current_by_gauss_chebyshev() {
        let h = 0.3;
        let c = [Complex64::new(1.0, 0.5), Complex64::new(-0.3, 0.1), Complex64::new(0.2, 0.0), Complex64::new(0.0, 0.7)];
        let d = [ZERO; 4];
        let n = 32;
        let mut sum = ZERO;
        for i in 0..n {
            let theta = PI * (i as f64 + 0.5) / n as f64;
            let y = h * theta.cos();
            let (kx, _) = currents_at(&c, &d, h, y);
            // ∫ K dy = h·∫ g(u)/√(1−u²) du with g = K·√(1−u²)
            sum += kx * (1.0 - (y / h).powi(2)).sqrt() * (PI / n as f64) * h;
        }
        assert!((sum - PI * h * c[0]).norm() < 1e-13);
        let (a, _) = currents_at(&c[..1], &d[..1], h, 0.2);
        let (b, _) = currents_at(&c[..1], &d[..1], h, -0.1);
        assert!((a * (1.0 - (0.2f64 / h).powi(2)).sqrt() - b * (1.0 - (0.1f64 / h).powi(2)).sqrt()).norm() < 1e-14);
    }
}
