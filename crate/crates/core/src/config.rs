//! JSON run configuration, dotted-path overrides and the config hash.
//!
//! Every optional field has a default; see `README.md` for the schema.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::em::{DipoleAxis, Medium, Scenario};
use crate::error::{Error, Result};
use crate::fullwave::TruncationOrder;
use crate::quadrature::{select_kymax, QuadratureConfig};
use crate::transform::ContourSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MediumConfig {
    pub frequency_hz: f64,
    pub eps_r: f64,
    /// Loss tangent: `ε = ε₀ ε_r (1 − j·eps_loss)`.
    pub eps_loss: f64,
    pub mu_r: f64,
    pub mu_loss: f64,
}

impl Default for MediumConfig {
    fn default() -> Self {
        Self {
            frequency_hz: 300e6,
            eps_r: 1.0,
            eps_loss: 1e-5,
            mu_r: 1.0,
            mu_loss: 1e-5,
        }
    }
}

impl MediumConfig {
    pub fn build(&self) -> Result<Medium> {
        Medium::from_relative(
            self.frequency_hz,
            Complex64::new(self.eps_r, -self.eps_r * self.eps_loss),
            Complex64::new(self.mu_r, -self.mu_r * self.mu_loss),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub m_max: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Defaults to the `select_kymax` policy.
    pub k_y_max: Option<f64>,
    pub max_subdivisions: usize,
    pub delta_k_x: Option<f64>,
    pub k_x_max: Option<f64>,
    pub samples_per_period: f64,
    pub guard: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            m_max: 3,
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            k_y_max: None,
            max_subdivisions: 4000,
            delta_k_x: None,
            k_x_max: None,
            samples_per_period: 8.0,
            guard: 1e10,
        }
    }
}

/// Uniform grid `start..=stop` with `count` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self.count {
            0 => vec![],
            1 => vec![self.start],
            n => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub x: Grid,
    /// Midpoint samples across the strip width, `y_i = −h + (i + ½)·2h/y_count`.
    pub y_count: usize,
    /// Field probes `[x, y, z]` for the `fields` run.
    pub probes: Vec<[f64; 3]>,
    /// Dipole orientations used by the comparison runs.
    pub axes: Vec<DipoleAxis>,
    /// `x` window of the RMS comparison against the TEM current.
    pub compare_window: [f64; 2],
    /// `|I_gen|` below this fraction of its maximum is excluded from `d(x)`.
    pub d_threshold: f64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            x: Grid {
                start: -3.0,
                stop: 3.0,
                count: 61,
            },
            y_count: 20,
            probes: Vec::new(),
            axes: DipoleAxis::ALL.to_vec(),
            compare_window: [5.0, 20.0],
            d_threshold: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub medium: MediumConfig,
    pub scenario: Scenario,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Applies `key=value` overrides with dotted keys, e.g. `solver.m_max=2`.
    /// Values are parsed as JSON and fall back to plain strings.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        let mut tree = serde_json::to_value(self).map_err(|e| Error::Config(e.to_string()))?;
        for item in overrides {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override '{item}' is not key=value")))?;
            let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            let mut node = &mut tree;
            let parts: Vec<&str> = key.split('.').collect();
            for (i, part) in parts.iter().enumerate() {
                let obj = node
                    .as_object_mut()
                    .ok_or_else(|| Error::Config(format!("override key '{key}' does not name a field")))?;
                if i + 1 == parts.len() {
                    if !obj.contains_key(*part) {
                        return Err(Error::Config(format!("unknown override key '{key}'")));
                    }
                    obj.insert(part.to_string(), value.clone());
                    break;
                }
                node = obj
                    .get_mut(*part)
                    .ok_or_else(|| Error::Config(format!("unknown override key '{key}'")))?;
            }
        }
        let cfg: Self = serde_json::from_value(tree).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |e: Error| Error::Config(e.to_string());
        self.medium.build().map_err(bad)?;
        self.scenario.validate().map_err(bad)?;
        TruncationOrder::new(self.solver.m_max).map_err(bad)?;
        self.quadrature().map_err(bad)?;
        if !(self.solver.samples_per_period > 0.0) || !(self.solver.guard > 1.0) {
            return Err(Error::Config("samples_per_period must be > 0 and guard > 1".into()));
        }
        if self.output.x.count == 0 {
            return Err(Error::Config("output.x.count must be >= 1".into()));
        }
        if self.output.x.points().iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("output.x grid is not finite".into()));
        }
        if self.output.axes.is_empty() {
            return Err(Error::Config("output.axes must list at least one orientation".into()));
        }
        if !(self.output.compare_window[0] < self.output.compare_window[1]) {
            return Err(Error::Config("output.compare_window must be increasing".into()));
        }
        Ok(())
    }

    pub fn truncation(&self) -> Result<TruncationOrder> {
        TruncationOrder::new(self.solver.m_max)
    }

    pub fn quadrature(&self) -> Result<QuadratureConfig> {
        let s = &self.solver;
        let k_y_max = s
            .k_y_max
            .unwrap_or_else(|| select_kymax(self.scenario.h, self.scenario.a, s.rel_tol));
        let mut q = QuadratureConfig::new(k_y_max, s.abs_tol, s.rel_tol)?;
        q.max_subdivisions = s.max_subdivisions;
        q.validate()?;
        Ok(q)
    }

    pub fn x_points(&self) -> Vec<f64> {
        self.output.x.points()
    }

    pub fn y_points(&self) -> Vec<f64> {
        let h = self.scenario.h;
        let n = self.output.y_count;
        (0..n).map(|i| -h + (i as f64 + 0.5) * 2.0 * h / n as f64).collect()
    }

    /// Contour serving every requested `x` (and the probes, for field runs).
    pub fn contour_spec(&self, extra_x: &[f64]) -> ContourSpec {
        let x_max = self
            .x_points()
            .iter()
            .chain(extra_x)
            .map(|v| (v - self.scenario.x0).abs().max(v.abs()))
            .fold(1.0_f64, f64::max);
        let mut spec = ContourSpec::for_scenario(x_max, &self.scenario);
        spec.samples_per_period = self.solver.samples_per_period;
        spec.k_x_max = self.solver.k_x_max;
        spec.delta_k_x = self.solver.delta_k_x;
        spec.guard = self.solver.guard;
        spec
    }

    /// Canonical JSON of the effective configuration.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of [`canonical_json`](Self::canonical_json), hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}
