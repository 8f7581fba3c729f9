//! Experiment drivers behind the CLI subcommands and the CSV/manifest writer.

use num_complex::Complex64;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::fields::{spatial_field, FieldSample};
use crate::fullwave::SpectralCoefficients;
use crate::temwire::{tem_current, WireGeometry};
use crate::transform::{
    build_contour, reconstruct_currents, sample_fullwave, sample_narrow, total_current, total_current_narrow, KxContour,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    /// Field tables carry a `z` column.
    pub with_z: bool,
    pub rows: Vec<Row>,
}

impl Table {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            with_z: false,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, x: f64, y: f64, value: Complex64) {
        self.rows.push(Row { x, y, z: 0.0, value });
    }

    pub fn to_csv(&self, hash: &str) -> String {
        let mut s = format!("# config_sha256={hash}\n");
        s.push_str(if self.with_z { "x,y,z,re,im,abs,arg\n" } else { "x,y,re,im,abs,arg\n" });
        for r in &self.rows {
            let v = r.value;
            if self.with_z {
                let _ = write!(s, "{:e},{:e},{:e},", r.x, r.y, r.z);
            } else {
                let _ = write!(s, "{:e},{:e},", r.x, r.y);
            }
            let _ = writeln!(s, "{:e},{:e},{:e},{:e}", v.re, v.im, v.norm(), v.arg());
        }
        s
    }
}

/// Tables plus `key = value` diagnostics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultBundle {
    pub kind: String,
    pub tables: Vec<Table>,
    pub diagnostics: Vec<(String, String)>,
}

impl ResultBundle {
    fn new(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            tables: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.diagnostics.push((key.into(), value.to_string()));
    }

    pub fn diagnostic(&self, key: &str) -> Option<&str> {
        self.diagnostics.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn manifest(&self, cfg: &RunConfig) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "run = {}", self.kind);
        let _ = writeln!(s, "version = {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "config_sha256 = {}", cfg.hash());
        for (k, v) in &self.diagnostics {
            let _ = writeln!(s, "{k} = {v}");
        }
        for t in &self.tables {
            let _ = writeln!(s, "file = {}.csv ({} rows)", t.name, t.rows.len());
        }
        s.push_str("\n[config]\n");
        s.push_str(&cfg.canonical_json());
        s.push('\n');
        s
    }

    /// Writes one CSV per table and `manifest.txt` into `dir`.
    pub fn write(&self, dir: &Path, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let hash = cfg.hash();
        let mut written = Vec::new();
        for t in &self.tables {
            let p = dir.join(format!("{}.csv", t.name));
            fs::write(&p, t.to_csv(&hash))?;
            written.push(p);
        }
        let p = dir.join("manifest.txt");
        fs::write(&p, self.manifest(cfg))?;
        written.push(p);
        Ok(written)
    }
}

fn contour_notes(bundle: &mut ResultBundle, contour: &KxContour, k_y_max: f64) {
    bundle.note("contour_nodes", contour.len());
    bundle.note("contour_delta_k_x", format!("{:e}", contour.delta_k_x));
    bundle.note("contour_k_x_max", format!("{:e}", contour.k_x_max));
    bundle.note("contour_x_max", format!("{:e}", contour.x_max));
    bundle.note("k_y_max", format!("{k_y_max:e}"));
}

fn solve_notes(bundle: &mut ResultBundle, spectral: &[SpectralCoefficients], tag: &str) {
    let cond = spectral.iter().map(|s| s.condition).fold(0.0, f64::max);
    let res = spectral.iter().map(|s| s.residual).fold(0.0, f64::max);
    bundle.note(format!("max_condition{tag}"), format!("{cond:e}"));
    bundle.note(format!("max_residual{tag}"), format!("{res:e}"));
}

/// Full-wave currents `K_x`, `K_y` and `I` on the configured grids.
pub fn run_fullwave(cfg: &RunConfig) -> Result<ResultBundle> {
    let medium = cfg.medium.build()?;
    let scenario = cfg.scenario;
    let quad = cfg.quadrature()?;
    let contour = build_contour(&medium, &cfg.contour_spec(&[]))?;
    let spectral = sample_fullwave(&medium, &scenario, &contour, cfg.truncation()?, &quad)?;
    let x = cfg.x_points();
    let y = cfg.y_points();
    let map = reconstruct_currents(&contour, &spectral, &x, &y, scenario.h)?;

    let mut bundle = ResultBundle::new("fullwave");
    contour_notes(&mut bundle, &contour, quad.k_y_max);
    solve_notes(&mut bundle, &spectral, "");
    let mut kx = Table::new("K_x");
    let mut ky = Table::new("K_y");
    let mut it = Table::new("I");
    let (mut max_kx, mut max_ky) = (0.0_f64, 0.0_f64);
    for (ix, &xv) in x.iter().enumerate() {
        for (iy, &yv) in y.iter().enumerate() {
            kx.push(xv, yv, map.k_x_current[ix][iy]);
            ky.push(xv, yv, map.k_y_current[ix][iy]);
            max_kx = max_kx.max(map.k_x_current[ix][iy].norm());
            max_ky = max_ky.max(map.k_y_current[ix][iy].norm());
        }
        it.push(xv, 0.0, map.total[ix]);
    }
    bundle.note("max_abs_K_x", format!("{max_kx:e}"));
    bundle.note("max_abs_K_y", format!("{max_ky:e}"));
    bundle.note("ratio_K_y_over_K_x", format!("{:e}", max_ky / max_kx));
    bundle.tables = vec![kx, ky, it];
    Ok(bundle)
}

/// Largest `d(x) = |I_app − I_gen|/|I_gen|` over points where `|I_gen|`
/// exceeds `threshold·max|I_gen|`; masked points are `NaN`.
pub fn relative_difference(approx: &[Complex64], general: &[Complex64], threshold: f64) -> (Vec<f64>, f64) {
    let peak = general.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let d: Vec<f64> = approx
        .iter()
        .zip(general)
        .map(|(a, g)| {
            if g.norm() > threshold * peak {
                (a - g).norm() / g.norm()
            } else {
                f64::NAN
            }
        })
        .collect();
    let max = d.iter().filter(|v| v.is_finite()).fold(0.0, |m: f64, v| m.max(*v));
    (d, max)
}

/// Narrow-strip against full-wave total current for each configured orientation.
pub fn run_narrow_compare(cfg: &RunConfig) -> Result<ResultBundle> {
    let medium = cfg.medium.build()?;
    let quad = cfg.quadrature()?;
    let contour = build_contour(&medium, &cfg.contour_spec(&[]))?;
    let x = cfg.x_points();
    let mut bundle = ResultBundle::new("narrow-compare");
    contour_notes(&mut bundle, &contour, quad.k_y_max);
    for &axis in &cfg.output.axes {
        let scenario = cfg.scenario.with_axis(axis);
        let tag = axis.label();
        let narrow = sample_narrow(&medium, &scenario, &contour, &quad)?;
        let full = sample_fullwave(&medium, &scenario, &contour, cfg.truncation()?, &quad)?;
        solve_notes(&mut bundle, &full, &format!("_{tag}"));
        let i_app = total_current_narrow(&contour, &narrow, &x)?;
        let i_gen = total_current(&contour, &full, &x, scenario.h)?;
        let (d, max_d) = relative_difference(&i_app, &i_gen, cfg.output.d_threshold);
        let mut ta = Table::new(format!("I_narrow_{tag}"));
        let mut tg = Table::new(format!("I_fullwave_{tag}"));
        let mut td = Table::new(format!("d_{tag}"));
        for (i, &xv) in x.iter().enumerate() {
            ta.push(xv, 0.0, i_app[i]);
            tg.push(xv, 0.0, i_gen[i]);
            td.push(xv, 0.0, Complex64::new(d[i], 0.0));
        }
        bundle.note(format!("max_d_{tag}"), format!("{max_d:e}"));
        bundle.tables.extend([ta, tg, td]);
    }
    Ok(bundle)
}

/// `RMS(a − b)/RMS(a)` over samples with `x` inside `window`.
pub fn rms_ratio(x: &[f64], strip: &[Complex64], reference: &[Complex64], window: [f64; 2]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for ((xv, a), b) in x.iter().zip(strip).zip(reference) {
        if *xv >= window[0] && *xv <= window[1] {
            num += (a - b).norm_sqr();
            den += a.norm_sqr();
        }
    }
    (num / den).sqrt()
}

/// Narrow-strip current against the TEM current of the equivalent wire.
pub fn run_tem_compare(cfg: &RunConfig) -> Result<ResultBundle> {
    let medium = cfg.medium.build()?;
    let quad = cfg.quadrature()?;
    let contour = build_contour(&medium, &cfg.contour_spec(&[]))?;
    let wire = WireGeometry::equivalent_to_strip(cfg.scenario.h, cfg.scenario.a)?;
    let x = cfg.x_points();
    let mut bundle = ResultBundle::new("tem-compare");
    contour_notes(&mut bundle, &contour, quad.k_y_max);
    bundle.note("wire_radius", format!("{:e}", wire.s));
    for &axis in &cfg.output.axes {
        let scenario = cfg.scenario.with_axis(axis);
        let tag = axis.label();
        let narrow = sample_narrow(&medium, &scenario, &contour, &quad)?;
        let strip = total_current_narrow(&contour, &narrow, &x)?;
        let tem = tem_current(&medium, &scenario, &wire, &x)?.current;
        let mut ts = Table::new(format!("I_strip_{tag}"));
        let mut tt = Table::new(format!("I_tem_{tag}"));
        let mut td = Table::new(format!("I_diff_{tag}"));
        for (i, &xv) in x.iter().enumerate() {
            ts.push(xv, 0.0, strip[i]);
            tt.push(xv, 0.0, tem[i]);
            td.push(xv, 0.0, strip[i] - tem[i]);
        }
        let ratio = rms_ratio(&x, &strip, &tem, cfg.output.compare_window);
        bundle.note(format!("rms_ratio_{tag}"), format!("{ratio:e}"));
        bundle.tables.extend([ts, tt, td]);
    }
    Ok(bundle)
}

/// Spatial E and H at the configured probes from the full-wave currents.
pub fn run_fields(cfg: &RunConfig) -> Result<ResultBundle> {
    if cfg.output.probes.is_empty() {
        return Err(Error::Config("output.probes is empty".into()));
    }
    let medium = cfg.medium.build()?;
    let scenario = cfg.scenario;
    let quad = cfg.quadrature()?;
    let px: Vec<f64> = cfg.output.probes.iter().map(|p| p[0]).collect();
    let mut spec = cfg.contour_spec(&px);
    let gap = cfg
        .output
        .probes
        .iter()
        .flat_map(|p| [(p[2] - scenario.a).abs(), (p[2] - scenario.z0).abs()])
        .fold(spec.source_gap, f64::min);
    spec.source_gap = gap;
    let contour = build_contour(&medium, &spec)?;
    let spectral = sample_fullwave(&medium, &scenario, &contour, cfg.truncation()?, &quad)?;
    let samples: Vec<FieldSample> = spatial_field(&medium, &scenario, &contour, &spectral, &cfg.output.probes, &quad)?;
    let mut bundle = ResultBundle::new("fields");
    contour_notes(&mut bundle, &contour, quad.k_y_max);
    solve_notes(&mut bundle, &spectral, "");
    let names = ["E_x", "E_y", "E_z", "H_x", "H_y", "H_z"];
    for (c, name) in names.iter().enumerate() {
        let mut t = Table::new(*name);
        t.with_z = true;
        for s in &samples {
            let v = if c < 3 { s.e[c] } else { s.h[c - 3] };
            t.rows.push(Row {
                x: s.position[0],
                y: s.position[1],
                z: s.position[2],
                value: v,
            });
        }
        bundle.tables.push(t);
    }
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_threshold_masks_nulls() {
        let g = [Complex64::new(1e-9, 0.0), Complex64::new(2.0, 0.0), Complex64::new(-1.0, 1.0)];
        let a = [Complex64::new(5e-9, 0.0), Complex64::new(2.1, 0.0), Complex64::new(-1.0, 1.0)];
        let (d, max) = relative_difference(&a, &g, 1e-6);
        assert!(d[0].is_nan());
        assert!((max - 0.05).abs() < 1e-12);
    }

    #[test]
    fn rms_ratio_window() {
        let x = [0.0, 5.0, 10.0, 30.0];
        let s = [Complex64::new(9.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(9.0, 0.0)];
        let r = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!((rms_ratio(&x, &s, &r, [5.0, 20.0]) - (0.5f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("I");
        t.push(1.0, 0.0, Complex64::new(0.0, 2.0));
        let s = t.to_csv("abc");
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# config_sha256=abc");
        assert_eq!(lines[1], "x,y,re,im,abs,arg");
        assert_eq!(lines[2], "1e0,0e0,0e0,2e0,2e0,1.5707963267948966e0");
    }
}
