//! Run configuration. Every frequency and rate is given in units of `t_c`
//! and every time in units of `1 / t_c`; `params.t_c` sets the absolute scale.

use std::path::{Path, PathBuf};

use chaingf::model::{ChainParams, ChainParamsFile};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Convergence,
    Gf,
    Xi,
    Dos,
    DosBulk,
    Winding,
    Phases,
    Transient,
    Gain,
    Noise,
    Bench,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Convergence => "convergence",
            Quantity::Gf => "gf",
            Quantity::Xi => "xi",
            Quantity::Dos => "dos",
            Quantity::DosBulk => "dos-bulk",
            Quantity::Winding => "winding",
            Quantity::Phases => "phases",
            Quantity::Transient => "transient",
            Quantity::Gain => "gain",
            Quantity::Noise => "noise",
            Quantity::Bench => "bench",
        }
    }

    fn uses_omega_grid(self) -> bool {
        matches!(
            self,
            Quantity::Gf
                | Quantity::Xi
                | Quantity::Dos
                | Quantity::DosBulk
                | Quantity::Winding
                | Quantity::Gain
                | Quantity::Noise
        )
    }

    fn uses_sites(self) -> bool {
        matches!(self, Quantity::Gf | Quantity::Dos | Quantity::Gain | Quantity::Noise | Quantity::Transient)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Evenly spaced values `min..=max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|k| self.min + step * k as f64).collect()
    }

    fn check(&self, what: &str, min_points: usize) -> Result<(), CliError> {
        if self.points < min_points {
            return Err(usage(format!("{what} needs at least {min_points} points, got {}", self.points)));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || (self.points > 1 && !(self.max > self.min)) {
            return Err(usage(format!("{what} must satisfy min < max, got [{}, {}]", self.min, self.max)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Option<Quantity>,
    /// Stem of the output files; defaults to the subcommand name.
    pub name: Option<String>,
    pub params: ChainParams,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_points: usize,
    pub eta: f64,
    /// Single frequency for `convergence`, `phases` and `bench`.
    pub omega: f64,
    /// Chain length for the finite-chain paths: decimation steps for
    /// `convergence`, the dense comparison for `gf`, the propagated chain
    /// for `transient` and the stability check for `phases`.
    pub n_sites: Option<usize>,
    pub sites: Vec<usize>,
    /// Column index `l` of `G_{j,l}` in `gf`.
    pub source: usize,
    pub t_max: f64,
    pub dt: f64,
    pub gamma_grid: Grid,
    pub pump_grid: Grid,
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    pub output_path: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            subcommand: None,
            name: None,
            params: ChainParams::coupled_cavity(0.0, 1.0, 0.2, 0.0),
            omega_min: -4.0,
            omega_max: 4.0,
            omega_points: 401,
            eta: 0.0,
            omega: 0.0,
            n_sites: None,
            sites: vec![0],
            source: 0,
            t_max: 20.0,
            dt: 0.05,
            gamma_grid: Grid::new(0.1, 4.0, 40),
            pump_grid: Grid::new(0.0, 4.0, 41),
            sizes: vec![50, 100, 200, 400],
            repetitions: 7,
            output_path: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::ConfigParse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn omega_grid(&self) -> Vec<f64> {
        Grid::new(self.omega_min, self.omega_max, self.omega_points).values()
    }

    /// `0, dt, 2 dt, ...` up to `t_max`.
    pub fn time_grid(&self) -> Vec<f64> {
        let steps = (self.t_max / self.dt + 1e-9).floor() as usize;
        (0..=steps).map(|k| k as f64 * self.dt).collect()
    }

    pub fn file_stem(&self, quantity: Quantity) -> String {
        self.name.clone().unwrap_or_else(|| quantity.name().to_string())
    }

    /// Parameters in absolute units.
    pub fn absolute_params(&self) -> Result<ChainParams, CliError> {
        ChainParamsFile {
            params: self.params,
            units: Some("t_c".into()),
        }
        .into_params()
        .map_err(|e| usage(format!("params: {e}")))
    }

    pub fn validate(&self, quantity: Quantity) -> Result<(), CliError> {
        self.absolute_params()?;
        if let Some(name) = &self.name {
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(usage(format!("name {name:?} must be nonempty and use only [A-Za-z0-9_-]")));
            }
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(usage(format!("eta must be finite and >= 0, got {}", self.eta)));
        }
        if !self.omega.is_finite() {
            return Err(usage("omega must be finite"));
        }
        if quantity.uses_omega_grid() {
            Grid::new(self.omega_min, self.omega_max, self.omega_points).check("omega grid", 2)?;
        }
        if quantity.uses_sites() && self.sites.is_empty() {
            return Err(usage(format!("{} needs at least one site", quantity.name())));
        }
        if self.n_sites == Some(0) {
            return Err(usage("n_sites must be positive"));
        }
        match quantity {
            Quantity::Gf => {
                if let Some(n) = self.n_sites {
                    if self.sites.iter().chain([&self.source]).any(|&j| j >= n) {
                        return Err(usage(format!("sites and source must be below n_sites = {n}")));
                    }
                }
            }
            Quantity::Transient => {
                if !(self.dt > 0.0 && self.dt.is_finite() && self.t_max >= self.dt && self.t_max.is_finite()) {
                    return Err(usage(format!("need 0 < dt <= t_max, got dt = {}, t_max = {}", self.dt, self.t_max)));
                }
                if self.t_max / self.dt > 1e6 {
                    return Err(usage("time grid exceeds 1e6 points"));
                }
                if let Some(n) = self.n_sites {
                    if self.sites.iter().any(|&j| j >= n) {
                        return Err(usage(format!("sites must be below n_sites = {n}")));
                    }
                }
            }
            Quantity::Phases => {
                self.gamma_grid.check("gamma grid", 1)?;
                self.pump_grid.check("pump grid", 1)?;
            }
            Quantity::Bench => {
                if self.repetitions == 0 {
                    return Err(usage("repetitions must be positive"));
                }
                if self.sizes.len() < 2 || self.sizes.contains(&0) {
                    return Err(usage("bench needs at least two positive sizes"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}
