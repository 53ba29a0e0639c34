//! Run configuration: a flat TOML table plus `key=value` overrides.
//!
//! Every key is optional; see [`RunConfig::default`] for the defaults.
//! Scan axes are `[name, start, stop, points]` arrays:
//!
//! ```toml
//! g = 3.0
//! gamma = 0.05
//! axes = [["g", 0.0, 3.0, 20], ["epsilon", 0.0, 3.5, 20]]
//! ```

use std::fmt;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use usc_relax_core::dipole::WellParams;
use usc_relax_core::edm::EdmParams;
use usc_relax_core::master::BathSpec;
use usc_relax_core::operators::{default_n_fock, ModelParams};

/// Parameters a scan axis may run over.
pub const AXIS_NAMES: [&str; 4] = ["g", "epsilon", "omega", "T"];

/// Photon truncation never drops below this, so that 24 levels certify.
pub const MIN_N_FOCK: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DipoleLaw {
    #[default]
    Radiative,
    Ohmic,
}

/// `[name, start, stop, points]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis(pub String, pub f64, pub f64, pub usize);

impl Axis {
    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn values(&self) -> Vec<f64> {
        let Axis(_, start, stop, n) = *self;
        if n == 1 {
            return vec![start];
        }
        (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub omega_c: f64,
    pub omega_d: f64,
    pub g: f64,
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_fock: Option<usize>,
    /// Retained dressed levels.
    pub levels: usize,

    /// Cavity rate `γ`.
    pub gamma: f64,
    /// Dipole rate; `4γ` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    pub dipole_law: DipoleLaw,
    #[serde(rename = "T")]
    pub temperature: f64,

    pub axes: Vec<Axis>,

    pub q_factor: f64,
    /// Lorentzian half-width; `ω_c/Q` for the cavity, `0.05ω_c` for the dipole.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,

    /// Resonance index; sets `ε = kω_c` for `evolve`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    pub t_points: usize,

    /// Levels listed by `spectrum`.
    pub spectrum_levels: usize,
    pub k_max: usize,
    pub n_max: usize,

    /// `N` of the multi-well dipole.
    pub wells: usize,
    pub n_boson: usize,
    pub m0: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum_cutoff: Option<usize>,

    pub mu2: f64,
    pub mu4: f64,
    pub qe: f64,
    pub mass: f64,
    pub grid_points: usize,
    pub x_max: f64,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub format: Format,
    /// Reserved; nothing is random.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let well = WellParams::default();
        RunConfig {
            omega_c: 1.0,
            omega_d: 1.0,
            g: 0.0,
            epsilon: 0.0,
            n_fock: None,
            levels: 24,
            gamma: 0.05,
            kappa: None,
            dipole_law: DipoleLaw::Radiative,
            temperature: 0.0,
            axes: Vec::new(),
            q_factor: 100.0,
            eta: None,
            k: None,
            t_end: None,
            t_points: 2001,
            spectrum_levels: 6,
            k_max: 4,
            n_max: 8,
            wells: 1,
            n_boson: 40,
            m0: 1,
            sum_cutoff: None,
            mu2: well.mu2,
            mu4: well.mu4,
            qe: well.qe,
            mass: well.mass,
            grid_points: well.grid_points,
            x_max: well.x_max,
            output: None,
            format: Format::Csv,
            seed: 0,
        }
    }
}

fn field_error(field: &str, accepted: &str, got: impl fmt::Display) -> anyhow::Error {
    anyhow!("invalid `{field}` = {got}: accepted range is {accepted}")
}

impl RunConfig {
    /// Reads `path` (if any), applies `key=value` overrides and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                text.parse::<toml::Table>()
                    .with_context(|| format!("parsing {}", p.display()))?
            }
            None => toml::Table::new(),
        };
        for item in overrides {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| anyhow!("override `{item}` is not of the form key=value"))?;
            let key = key.trim();
            let parsed = format!("v = {}", value.trim()).parse::<toml::Table>();
            let value = match parsed {
                Ok(mut t) => t.remove("v").expect("parsed table holds the key"),
                // bare words are strings
                Err(_) => toml::Value::String(value.trim().to_string()),
            };
            table.insert(key.to_string(), value);
        }
        Self::from_table(table)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_table(text.parse::<toml::Table>()?)
    }

    fn from_table(mut table: toml::Table) -> Result<Self> {
        let defaults = toml::Table::try_from(RunConfig::default())?;
        // integers written for real-valued keys are promoted
        for (key, value) in table.iter_mut() {
            if let (Some(toml::Value::Float(_)), toml::Value::Integer(i)) = (defaults.get(key), &*value) {
                *value = toml::Value::Float(*i as f64);
            }
        }
        for key in ["kappa", "eta", "t_end"] {
            if let Some(toml::Value::Integer(i)) = table.get(key) {
                let f = *i as f64;
                table.insert(key.to_string(), toml::Value::Float(f));
            }
        }
        let config: RunConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| anyhow!("{}", e.message()))?;
        config.validate()?;
        Ok(config)
    }

    /// Flat TOML accepted back by [`RunConfig::parse`].
    pub fn emit(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_c", self.omega_c),
            ("omega_d", self.omega_d),
            ("gamma", self.gamma),
            ("q_factor", self.q_factor),
            ("mu2", self.mu2),
            ("mu4", self.mu4),
            ("mass", self.mass),
            ("x_max", self.x_max),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(field_error(name, "finite and > 0", v));
            }
        }
        for (name, v) in [("kappa", self.kappa), ("eta", self.eta), ("t_end", self.t_end)] {
            if let Some(v) = v {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(field_error(name, "finite and > 0", v));
                }
            }
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(field_error("g", "finite and ≥ 0", self.g));
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(field_error("T", "finite and ≥ 0", self.temperature));
        }
        if !self.epsilon.is_finite() || !self.qe.is_finite() {
            return Err(field_error("epsilon", "finite", self.epsilon));
        }
        if let Some(n) = self.n_fock {
            if !(2..=1024).contains(&n) {
                return Err(field_error("n_fock", "2..=1024", n));
            }
        }
        if !(2..=40).contains(&self.levels) {
            return Err(field_error("levels", "2..=40", self.levels));
        }
        let counts = [
            ("t_points", self.t_points, 2),
            ("spectrum_levels", self.spectrum_levels, 1),
            ("k_max", self.k_max, 1),
            ("n_max", self.n_max, 1),
            ("wells", self.wells, 1),
            ("n_boson", self.n_boson, 2),
            ("grid_points", self.grid_points, 200),
        ];
        for (name, v, min) in counts {
            if v < min {
                return Err(field_error(name, &format!("≥ {min}"), v));
            }
        }
        if self.m0 >= self.n_boson {
            return Err(field_error("m0", &format!("0..{}", self.n_boson), self.m0));
        }
        if self.k == Some(0) {
            return Err(field_error("k", "≥ 1", 0));
        }
        if self.axes.len() > 3 {
            bail!("invalid `axes`: at most two scan axes plus an `omega` grid are accepted");
        }
        for axis in &self.axes {
            if !AXIS_NAMES.contains(&axis.name()) {
                return Err(field_error(
                    "axes",
                    "names among g, epsilon, omega, T",
                    format!("`{}`", axis.name()),
                ));
            }
            if axis.3 == 0 || !axis.1.is_finite() || !axis.2.is_finite() {
                return Err(field_error(
                    "axes",
                    "finite bounds and ≥ 1 point",
                    format!("`{}`", axis.name()),
                ));
            }
            if self.axes.iter().filter(|a| a.name() == axis.name()).count() > 1 {
                return Err(field_error(
                    "axes",
                    "each name at most once",
                    format!("`{}`", axis.name()),
                ));
            }
        }
        if self.axes.iter().filter(|a| a.name() != "omega").count() > 2 {
            bail!("invalid `axes`: at most two parameter axes besides `omega`");
        }
        Ok(())
    }

    pub fn axis(&self, name: &str) -> Option<&Axis> {
        self.axes.iter().find(|a| a.name() == name)
    }

    /// Axes other than `omega`, in declaration order.
    pub fn outer_axes(&self) -> Vec<&Axis> {
        self.axes.iter().filter(|a| a.name() != "omega").collect()
    }

    /// Largest coupling reached by the scan.
    pub fn max_g(&self) -> f64 {
        match self.axis("g") {
            Some(a) => a.1.max(a.2),
            None => self.g,
        }
    }

    /// Explicit `n_fock`, or `max(80, 4x² + 40)` at the largest coupling.
    pub fn n_fock(&self) -> usize {
        self.n_fock
            .unwrap_or_else(|| default_n_fock(self.max_g(), self.omega_c).max(MIN_N_FOCK))
    }

    pub fn model(&self, g: f64, epsilon: f64) -> ModelParams {
        ModelParams {
            omega_c: self.omega_c,
            omega_d: self.omega_d,
            g,
            epsilon,
            n_fock: self.n_fock(),
            spin_n: 1,
        }
    }

    pub fn baths(&self, params: &ModelParams) -> [BathSpec; 2] {
        let kappa = self.kappa.unwrap_or(4.0 * self.gamma);
        let dipole = match self.dipole_law {
            DipoleLaw::Radiative => BathSpec::dipole_radiative(kappa, params.omega_d),
            DipoleLaw::Ohmic => BathSpec::dipole_ohmic(kappa, params.omega_d),
        };
        [BathSpec::cavity_ohmic(self.gamma, params.omega_c), dipole]
    }

    pub fn edm(&self, g: f64, epsilon: f64, temperature: f64) -> EdmParams {
        EdmParams {
            omega_c: self.omega_c,
            omega_d: self.omega_d,
            g,
            epsilon,
            n: self.wells,
            gamma: self.gamma,
            temperature,
            sum_cutoff: self.sum_cutoff,
            n_boson: self.n_boson,
        }
    }

    pub fn well(&self) -> WellParams {
        WellParams {
            mu2: self.mu2,
            mu4: self.mu4,
            qe: self.qe,
            mass: self.mass,
            grid_points: self.grid_points,
            x_max: self.x_max,
        }
    }
}
