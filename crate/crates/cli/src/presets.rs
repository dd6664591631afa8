//! Figure presets. Each job carries the parameter values it was built from,
//! in units of `t_c`, so a table-driven test can hold them against the captions.

use std::f64::consts::FRAC_PI_2;

use chaingf::model::ChainParams;

use crate::config::{Grid, Quantity, RunConfig};

pub const PRESET_NAMES: [&str; 9] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"];

#[derive(Debug, Clone)]
pub struct PresetJob {
    pub quantity: Quantity,
    pub config: RunConfig,
    pub caption: Vec<(&'static str, f64)>,
}

impl PresetJob {
    /// Value of a caption key as the job actually uses it.
    pub fn embedded(&self, key: &str) -> Option<f64> {
        let (p, c) = (&self.config.params, &self.config);
        Some(match key {
            "epsilon" => p.epsilon,
            "t_c" => p.t_c,
            "phi" => p.phi,
            "gamma" => p.gamma,
            "pump" => p.pump,
            "omega" => c.omega,
            "n_sites" => c.n_sites? as f64,
            _ => return None,
        })
    }
}

fn job(quantity: Quantity, name: &str, config: RunConfig, caption: &[(&'static str, f64)]) -> PresetJob {
    PresetJob {
        quantity,
        config: RunConfig {
            subcommand: Some(quantity),
            name: Some(name.to_string()),
            ..config
        },
        caption: caption.to_vec(),
    }
}

fn omega_grid(min: f64, max: f64, points: usize) -> RunConfig {
    RunConfig {
        omega_min: min,
        omega_max: max,
        omega_points: points,
        ..RunConfig::default()
    }
}

fn hn(epsilon: f64, phi: f64, gamma: f64, pump: f64) -> ChainParams {
    ChainParams::hatano_nelson(epsilon, 1.0, phi, gamma, pump)
}

pub fn preset(name: &str) -> Option<Vec<PresetJob>> {
    let lossless = ChainParams::coupled_cavity(0.0, 1.0, 0.0, 0.0);
    Some(match name {
        "fig2" => {
            let cfg = RunConfig {
                params: ChainParams::coupled_cavity(-0.2, 1.0, 0.1, 0.05),
                omega: 0.0,
                n_sites: Some(400),
                ..RunConfig::default()
            };
            let caption = [("gamma", 0.1), ("pump", 0.05), ("epsilon", -0.2), ("omega", 0.0)];
            vec![job(Quantity::Convergence, "fig2_convergence", cfg, &caption)]
        }
        "fig3" => {
            let cfg = RunConfig {
                params: lossless,
                eta: 1e-3,
                sites: vec![0, 1, 2, 10, 50],
                ..omega_grid(-3.0, 3.0, 601)
            };
            vec![
                job(Quantity::Dos, "fig3_dos", cfg.clone(), &[]),
                job(Quantity::DosBulk, "fig3_dos_bulk", cfg, &[]),
            ]
        }
        "fig4" => {
            let base = RunConfig {
                eta: 1e-3,
                sites: vec![0],
                ..omega_grid(-3.0, 3.0, 601)
            };
            let lossy = RunConfig {
                params: ChainParams::coupled_cavity(0.0, 1.0, 0.5, 0.0),
                ..base.clone()
            };
            let lossless = RunConfig { params: lossless, ..base };
            vec![
                job(Quantity::Dos, "fig4_dos_lossless", lossless.clone(), &[]),
                job(Quantity::DosBulk, "fig4_dos_bulk_lossless", lossless, &[]),
                job(Quantity::Dos, "fig4_dos_dissipative", lossy.clone(), &[]),
                job(Quantity::DosBulk, "fig4_dos_bulk_dissipative", lossy, &[]),
            ]
        }
        "fig5" => {
            let cfg = RunConfig {
                params: hn(0.1, 0.9 * FRAC_PI_2, 3.0, 3.0),
                n_sites: Some(45),
                sites: vec![5],
                source: 4,
                ..omega_grid(-4.0, 4.0, 400)
            };
            let caption = [
                ("n_sites", 45.0),
                ("gamma", 3.0),
                ("pump", 3.0),
                ("epsilon", 0.1),
                ("phi", 0.9 * FRAC_PI_2),
            ];
            vec![job(Quantity::Gf, "fig5_gf", cfg, &caption)]
        }
        "fig6" => {
            let cfg = RunConfig {
                params: hn(0.0, FRAC_PI_2, 2.0, 4.0),
                ..omega_grid(-4.0, 4.0, 2000)
            };
            let caption = [("phi", FRAC_PI_2), ("gamma", 2.0), ("pump", 4.0), ("epsilon", 0.0)];
            vec![
                job(Quantity::Xi, "fig6_xi", cfg.clone(), &caption),
                job(Quantity::Winding, "fig6_winding", cfg, &caption),
            ]
        }
        "fig7" => {
            let cfg = RunConfig {
                params: ChainParams::coupled_cavity(0.1, 1.0, 0.5, 0.0),
                n_sites: Some(15),
                sites: (0..15).collect(),
                t_max: 40.0,
                dt: 0.05,
                ..RunConfig::default()
            };
            let caption = [("n_sites", 15.0), ("phi", 0.0), ("pump", 0.0), ("gamma", 0.5), ("epsilon", 0.1)];
            vec![job(Quantity::Transient, "fig7_transient", cfg, &caption)]
        }
        "fig8" => {
            let cfg = |gamma: f64| RunConfig {
                params: hn(0.0, FRAC_PI_2, gamma, 1.4),
                sites: (0..=20).step_by(2).collect(),
                t_max: 20.0,
                dt: 0.02,
                ..RunConfig::default()
            };
            let top = [("gamma", 2.0), ("phi", FRAC_PI_2), ("pump", 1.4), ("epsilon", 0.0)];
            let bottom = [("gamma", 1.0), ("phi", FRAC_PI_2), ("pump", 1.4), ("epsilon", 0.0)];
            vec![
                job(Quantity::Transient, "fig8_top_transient", cfg(2.0), &top),
                job(Quantity::Transient, "fig8_bottom_transient", cfg(1.0), &bottom),
            ]
        }
        "fig9" => {
            let cfg = RunConfig {
                params: hn(0.0, FRAC_PI_2, 1.0, 1.0),
                omega: 0.0,
                n_sites: Some(20),
                gamma_grid: Grid::new(0.05, 4.0, 80),
                pump_grid: Grid::new(0.0, 4.0, 81),
                ..RunConfig::default()
            };
            vec![job(Quantity::Phases, "fig9_phases", cfg, &[("phi", FRAC_PI_2), ("epsilon", 0.0)])]
        }
        "fig10" => {
            let cfg = RunConfig {
                params: hn(0.0, FRAC_PI_2, 4.0, 3.6),
                sites: vec![1, 5, 10, 20],
                ..omega_grid(-4.0, 4.0, 801)
            };
            let caption = [("epsilon", 0.0), ("phi", FRAC_PI_2), ("gamma", 4.0), ("pump", 3.6)];
            vec![
                job(Quantity::Gain, "fig10_gain", cfg.clone(), &caption),
                job(Quantity::Noise, "fig10_noise", cfg, &caption),
            ]
        }
        _ => return None,
    })
}
