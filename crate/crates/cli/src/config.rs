//! Run configuration: flat `section.key = value` lines (a TOML subset) plus
//! command-line overrides.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tlfdeco_core::pipeline::PipelineOptions;
use tlfdeco_core::spectral::SpectralDensityParams;
use tlfdeco_core::{SystemParams, Temperature};
use toml::{Table, Value};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSection {
    #[serde(rename = "delta_A")]
    pub delta_a: f64,
    #[serde(rename = "delta_B")]
    pub delta_b: f64,
    pub g0: f64,
    #[serde(rename = "T")]
    pub temperature: f64,
    /// Place `Δ_A` on the renormalized fluctuator frequency `ω_B(T)`.
    pub resonance: bool,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self {
            delta_a: 0.1,
            delta_b: 0.1,
            g0: 0.01,
            temperature: 0.0,
            resonance: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BathSection {
    pub alpha_pz: f64,
    pub omega_d: f64,
}

impl Default for BathSection {
    fn default() -> Self {
        Self {
            alpha_pz: 0.3,
            omega_d: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// One of `T`, `alpha_pz`, `g0`, `detuning`.
    pub variable: String,
    /// Values of `variable`; an empty list with `variable = "T"` means
    /// `temperatures`.
    pub values: Vec<f64>,
    pub temperatures: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            variable: "T".to_string(),
            values: Vec::new(),
            temperatures: vec![0.02, 0.05, 0.1, 0.2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub omega_max: f64,
    pub coarse_points: usize,
    pub density: usize,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmax: Option<f64>,
    pub tmax_cap: f64,
    pub spectrum_points: usize,
    pub require_decay: bool,
    pub max_refinements: usize,
    pub drift_tol: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        let p = PipelineOptions::default();
        Self {
            omega_max: p.green.quadrature.omega_max,
            coarse_points: p.green.coarse_points,
            density: p.green.density,
            samples: p.time.samples,
            tmax: p.time.tmax,
            tmax_cap: p.time.tmax_cap,
            spectrum_points: p.spectrum_points,
            require_decay: p.require_decay,
            max_refinements: p.max_refinements,
            drift_tol: p.drift_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub modes: usize,
    pub n_max: usize,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self { modes: 3, n_max: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub system: SystemSection,
    pub bath: BathSection,
    pub sweep: SweepSection,
    pub grid: GridSection,
    pub oracle: OracleSection,
}

impl FromStr for RunConfig {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        text.parse::<Self>().map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Apply `KEY=VALUE` overrides. Keys are dotted (`bath.alpha_pz`) or a
    /// bare field name that is unique across sections (`alpha_pz`).
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self, CliError> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut table = self.to_table()?;
        for o in overrides {
            let o = o.as_ref();
            let (key, raw) = o
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("override `{o}` is not KEY=VALUE")))?;
            let (section, field) = resolve_key(&table, key.trim())?;
            let value = parse_value(raw.trim());
            let sec = table
                .get_mut(&section)
                .and_then(Value::as_table_mut)
                .ok_or_else(|| CliError::Config(format!("unknown section `{section}`")))?;
            sec.insert(field, value);
        }
        let cfg: RunConfig = Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(format!("in overrides: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn to_table(&self) -> Result<Table, CliError> {
        Table::try_from(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Every setting as a `section.key = value` line.
    pub fn flat_lines(&self) -> Vec<String> {
        let table = self.to_table().expect("config serializes");
        let mut out = Vec::new();
        for (section, v) in &table {
            if let Some(t) = v.as_table() {
                for (k, v) in t {
                    out.push(format!("{section}.{k} = {v}"));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        self.system_params()?;
        self.bath_params()?;
        if self.sweep.temperatures.is_empty() {
            return bad("sweep.temperatures must not be empty");
        }
        if self.sweep.temperatures.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return bad("sweep.temperatures must be finite and non-negative");
        }
        if !matches!(self.sweep.variable.as_str(), "T" | "alpha_pz" | "g0" | "detuning") {
            return bad("sweep.variable must be one of T, alpha_pz, g0, detuning");
        }
        if self.sweep.variable != "T" && self.sweep.values.is_empty() {
            return bad("sweep.values must not be empty unless sweeping T");
        }
        let g = &self.grid;
        if !(g.omega_max > 0.0) || g.coarse_points < 2 || g.density == 0 || g.samples < 2 || g.spectrum_points < 3 {
            return bad("grid settings must be positive (coarse_points ≥ 2, samples ≥ 2, spectrum_points ≥ 3)");
        }
        if matches!(g.tmax, Some(t) if !(t > 0.0)) || !(g.tmax_cap > 0.0) || !(g.drift_tol > 0.0) {
            return bad("grid.tmax, grid.tmax_cap and grid.drift_tol must be positive");
        }
        if self.oracle.modes == 0 {
            return bad("oracle.modes must be at least 1");
        }
        Ok(())
    }

    pub fn system_params(&self) -> Result<SystemParams, CliError> {
        let s = &self.system;
        let t = Temperature::new(s.temperature).map_err(|e| CliError::Config(format!("system.T: {e}")))?;
        SystemParams::new(s.delta_a, s.delta_b, s.g0, t).map_err(|e| CliError::Config(format!("system: {e}")))
    }

    pub fn bath_params(&self) -> Result<SpectralDensityParams, CliError> {
        SpectralDensityParams::new(self.bath.alpha_pz, self.bath.omega_d)
            .map_err(|e| CliError::Config(format!("bath: {e}")))
    }

    pub fn pipeline_options(&self) -> PipelineOptions {
        let mut p = PipelineOptions::default();
        let g = &self.grid;
        p.green.quadrature.omega_max = g.omega_max;
        p.renorm.quadrature.omega_max = g.omega_max;
        p.green.coarse_points = g.coarse_points;
        p.green.density = g.density;
        p.time.samples = g.samples;
        p.time.tmax = g.tmax;
        p.time.tmax_cap = g.tmax_cap;
        p.spectrum_points = g.spectrum_points;
        p.require_decay = g.require_decay;
        p.max_refinements = g.max_refinements;
        p.drift_tol = g.drift_tol;
        p
    }
}

fn resolve_key(table: &Table, key: &str) -> Result<(String, String), CliError> {
    if let Some((section, field)) = key.split_once('.') {
        let known = table
            .get(section)
            .and_then(Value::as_table)
            .is_some_and(|t| t.contains_key(field) || (section == "grid" && field == "tmax"));
        if !known {
            return Err(CliError::Config(format!("unknown key `{key}`")));
        }
        return Ok((section.to_string(), field.to_string()));
    }
    let hits: Vec<&String> = table
        .iter()
        .filter(|(s, v)| v.as_table().is_some_and(|t| t.contains_key(key)) || (*s == "grid" && key == "tmax"))
        .map(|(s, _)| s)
        .collect();
    match hits.as_slice() {
        [s] => Ok(((*s).clone(), key.to_string())),
        [] => Err(CliError::Config(format!("unknown key `{key}`"))),
        _ => Err(CliError::Config(format!("ambiguous key `{key}`, use section.key"))),
    }
}

fn parse_value(raw: &str) -> Value {
    toml::from_str::<Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}
