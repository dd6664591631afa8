//! Command-line front end for `chaingf`: writes each computed quantity as a
//! CSV (or JSON) data file next to a JSON sidecar holding the configuration.

pub mod compute;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

pub use config::{Format, Grid, Quantity, RunConfig};
pub use error::CliError;

use crate::config::usage;

/// One computation: what to evaluate, its configuration and the preset it came from.
pub type Job = (Quantity, RunConfig, Option<&'static str>);

#[derive(Debug, Parser)]
#[command(name = "chaingf", version, about = "Green's functions of driven-dissipative bosonic chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Imaginary part added to every frequency, in units of t_c
    #[arg(long, global = true)]
    pub eta: Option<f64>,

    /// Worker threads for grid evaluation
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Edge energy after n decimation steps against its semi-infinite limit
    Convergence,
    /// Two-point Green's function G_{j,l} of the semi-infinite chain
    Gf,
    /// Directional decay exponents xi+ and xi-
    Xi,
    /// Local density of states at chosen sites
    Dos,
    /// Bulk density of states of the infinite chain
    DosBulk,
    /// Winding number of the Bloch symbol
    Winding,
    /// Stability and topology over a (gamma, P) grid
    Phases,
    /// Coherent evolution of an excitation seeded at the edge
    Transient,
    /// Power gain from the edge
    Gain,
    /// Added noise of the edge-driven amplifier
    Noise,
    /// Decimation against dense inversion timings
    Bench,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
}

impl Command {
    fn quantity(self) -> Option<Quantity> {
        Some(match self {
            Command::Convergence => Quantity::Convergence,
            Command::Gf => Quantity::Gf,
            Command::Xi => Quantity::Xi,
            Command::Dos => Quantity::Dos,
            Command::DosBulk => Quantity::DosBulk,
            Command::Winding => Quantity::Winding,
            Command::Phases => Quantity::Phases,
            Command::Transient => Quantity::Transient,
            Command::Gain => Quantity::Gain,
            Command::Noise => Quantity::Noise,
            Command::Bench => Quantity::Bench,
            _ => return None,
        })
    }

    fn preset_name(self) -> Option<&'static str> {
        Some(match self {
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Fig4 => "fig4",
            Command::Fig5 => "fig5",
            Command::Fig6 => "fig6",
            Command::Fig7 => "fig7",
            Command::Fig8 => "fig8",
            Command::Fig9 => "fig9",
            Command::Fig10 => "fig10",
            _ => return None,
        })
    }
}

impl Cli {
    /// Flag overrides shared by plain runs and presets.
    fn apply_flags(&self, cfg: &mut RunConfig) {
        if let Some(out) = &self.out {
            cfg.output_path = out.clone();
        }
        if let Some(format) = self.format {
            cfg.format = format;
        }
        if let Some(eta) = self.eta {
            cfg.eta = eta;
        }
    }

    /// The jobs this invocation runs, validated.
    pub fn jobs(&self) -> Result<Vec<Job>, CliError> {
        let jobs = if let Some(q) = self.command.quantity() {
            let mut cfg = match &self.config {
                Some(path) => RunConfig::load(path)?,
                None => RunConfig::default(),
            };
            match cfg.subcommand {
                Some(s) if s != q => {
                    return Err(usage(format!(
                        "config is for {:?} but the subcommand is {:?}",
                        s.name(),
                        q.name()
                    )))
                }
                _ => cfg.subcommand = Some(q),
            }
            self.apply_flags(&mut cfg);
            vec![(q, cfg, None)]
        } else {
            let name = self.command.preset_name().expect("every command is a quantity or a preset");
            if self.config.is_some() {
                return Err(usage(format!("{name} is a preset and takes no --config")));
            }
            presets::preset(name)
                .expect("preset table covers every preset command")
                .into_iter()
                .map(|j| {
                    let mut cfg = j.config;
                    self.apply_flags(&mut cfg);
                    (j.quantity, cfg, Some(name))
                })
                .collect()
        };
        for (q, cfg, _) in &jobs {
            cfg.validate(*q)?;
        }
        Ok(jobs)
    }
}

fn header(quantity: Quantity, cfg: &RunConfig, preset: Option<&str>) -> Result<Map<String, Value>, CliError> {
    let mut m = Map::new();
    m.insert("quantity".into(), json!(quantity.name()));
    m.insert("preset".into(), json!(preset));
    m.insert("config".into(), serde_json::to_value(cfg).expect("config serialises"));
    m.insert("params_absolute".into(), serde_json::to_value(cfg.absolute_params()?).expect("params serialise"));
    m.insert(
        "units".into(),
        json!("frequencies and rates in t_c, times in 1/t_c, Green's functions and densities of states in 1/t_c"),
    );
    Ok(m)
}

/// Runs every job and returns the paths written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("cannot set up {n} threads: {e}")))?;
    }
    let jobs = cli.jobs()?;
    let mut written = vec![];
    for (quantity, cfg, preset) in &jobs {
        let out = compute::evaluate(*quantity, cfg)?;
        let files = output::write_output(
            &cfg.output_path,
            &cfg.file_stem(*quantity),
            cfg.format,
            &out,
            header(*quantity, cfg, *preset)?,
        )?;
        written.extend(files);
    }
    Ok(written)
}
