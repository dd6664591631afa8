//! Evaluation of each quantity on its grid. Inputs arrive in units of `t_c`
//! and are converted to absolute units here; outputs are converted back.

use chaingf::bench::run_bench;
use chaingf::decim1::{eps1_semi_infinite, eps1_series};
use chaingf::decim2::{bulk_gf, correlation_data, gf_pair, solve_surface_gf, unwrap_phase, BranchTag};
use chaingf::model::{build_dynamical_matrix, effective_couplings, ChainParams, EffectiveCouplings};
use chaingf::observables::{
    gain, local_dos, noise_report, phase_diagram, topo_indicator_from_xi, winding_number, PhaseClass, TopoIndicator,
};
use chaingf::oracle::{dense_gf, dense_gf_balanced, propagate, ExpmMethod};
use chaingf::transient::{
    amplification_time, coherent_amplitude, growth_abscissa, steady_state_final_value, FinalValue, TransientParams,
};
use chaingf::{Complex64, Error};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{Quantity, RunConfig};
use crate::error::{CliError, Context};
use crate::output::{Cell, Output, Table};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn branch_name(tag: BranchTag) -> &'static str {
    match tag {
        BranchTag::Physical => "physical",
        BranchTag::Alternate => "alternate",
        BranchTag::Ambiguous => "ambiguous",
    }
}

fn topo_name(t: TopoIndicator) -> &'static str {
    match t {
        TopoIndicator::Trivial => "trivial",
        TopoIndicator::Topological => "topological",
        TopoIndicator::Boundary => "boundary",
    }
}

fn phase_name(p: PhaseClass) -> &'static str {
    match p {
        PhaseClass::TrivialStable => "trivial_stable",
        PhaseClass::TrivialUnstable => "trivial_unstable",
        PhaseClass::TopologicalStable => "topological_stable",
        PhaseClass::TopologicalUnstable => "topological_unstable",
        PhaseClass::Boundary => "boundary",
    }
}

fn branch_counts(tags: impl Iterator<Item = BranchTag>) -> Value {
    let mut counts = [0usize; 3];
    for t in tags {
        counts[t as usize] += 1;
    }
    json!({ "physical": counts[0], "alternate": counts[1], "ambiguous": counts[2] })
}

/// Setup shared by every quantity.
struct Ctx<'a> {
    cfg: &'a RunConfig,
    params: ChainParams,
    couplings: EffectiveCouplings,
    t_c: f64,
}

impl Ctx<'_> {
    /// Complex frequency `omega + i eta` in absolute units.
    fn freq(&self, w: f64) -> Complex64 {
        c(w * self.t_c, self.cfg.eta * self.t_c)
    }
}

pub fn evaluate(quantity: Quantity, cfg: &RunConfig) -> Result<Output, CliError> {
    let params = cfg.absolute_params()?;
    let ctx = Ctx {
        cfg,
        params,
        couplings: effective_couplings(&params),
        t_c: params.t_c,
    };
    match quantity {
        Quantity::Convergence => convergence(&ctx),
        Quantity::Gf => gf(&ctx),
        Quantity::Xi => xi(&ctx),
        Quantity::Dos => dos(&ctx),
        Quantity::DosBulk => dos_bulk(&ctx),
        Quantity::Winding => winding(&ctx),
        Quantity::Phases => phases(&ctx),
        Quantity::Transient => transient(&ctx),
        Quantity::Gain => gain_table(&ctx),
        Quantity::Noise => noise(&ctx),
        Quantity::Bench => bench(&ctx),
    }
}

fn convergence(ctx: &Ctx) -> Result<Output, CliError> {
    let omega = ctx.freq(ctx.cfg.omega);
    let steps = ctx.cfg.n_sites.unwrap_or(200);
    let series = eps1_series(&ctx.couplings, omega, steps).context(|| format!("decimation at omega = {omega}"))?;
    let limit = eps1_semi_infinite(&ctx.couplings, omega);
    let mut table = Table::new(vec!["steps", "re_eps1", "im_eps1", "abs_error"]);
    for (n, e) in series.iter().enumerate() {
        table.rows.push(vec![
            n.into(),
            (e.re / ctx.t_c).into(),
            (e.im / ctx.t_c).into(),
            ((e - limit).norm() / ctx.t_c).into(),
        ]);
    }
    let surface = solve_surface_gf(&ctx.couplings, omega);
    let corr = correlation_data(&surface, &ctx.couplings);
    let mut metadata = Map::new();
    metadata.insert("limit".into(), json!([limit.re / ctx.t_c, limit.im / ctx.t_c]));
    metadata.insert("re_xi".into(), json!(corr.xi_plus.re));
    metadata.insert("correlation_length".into(), json!(1.0 / corr.xi_plus.re.abs()));
    metadata.insert("branch".into(), json!(branch_name(surface.branch_tag)));
    Ok(Output { table, metadata })
}

/// Dense resolvent, balanced when plain LU gives up on a non-reciprocal chain.
fn dense_reference(ctx: &Ctx, n: usize, omega: Complex64) -> Result<DMatrix<Complex64>, CliError> {
    let d = build_dynamical_matrix(&ctx.params, n).context(|| "building the dense chain".into())?;
    match dense_gf(&d, omega) {
        Err(Error::Singular { .. }) if n > 1 => dense_gf_balanced(&d, omega),
        other => other,
    }
    .context(|| format!("dense resolvent at omega = {omega}"))
}

fn gf(ctx: &Ctx) -> Result<Output, CliError> {
    let cfg = ctx.cfg;
    let mut columns = vec!["omega", "site", "source", "re_g", "im_g", "abs_g", "abs_ratio_g00", "branch"];
    if cfg.n_sites.is_some() {
        columns.extend(["re_dense", "im_dense"]);
    }
    let blocks: Vec<(BranchTag, Vec<Vec<Cell>>)> = cfg
        .omega_grid()
        .par_iter()
        .map(|&w| {
            let omega = ctx.freq(w);
            let s = solve_surface_gf(&ctx.couplings, omega);
            let dense = cfg.n_sites.map(|n| dense_reference(ctx, n, omega)).transpose()?;
            let rows = cfg
                .sites
                .iter()
                .map(|&j| {
                    let g = gf_pair(&s, &ctx.couplings, j, cfg.source) * ctx.t_c;
                    let mut row = vec![
                        w.into(),
                        j.into(),
                        cfg.source.into(),
                        g.re.into(),
                        g.im.into(),
                        g.norm().into(),
                        (g.norm() / (s.value.norm() * ctx.t_c)).into(),
                        Cell::S(branch_name(s.branch_tag)),
                    ];
                    if let Some(m) = &dense {
                        let e = m[(j, cfg.source)] * ctx.t_c;
                        row.extend([e.re.into(), e.im.into()]);
                    }
                    row
                })
                .collect();
            Ok((s.branch_tag, rows))
        })
        .collect::<Result<_, CliError>>()?;
    let mut metadata = Map::new();
    metadata.insert("branch_tags".into(), branch_counts(blocks.iter().map(|b| b.0)));
    let table = Table {
        columns,
        rows: blocks.into_iter().flat_map(|b| b.1).collect(),
    };
    Ok(Output { table, metadata })
}

fn xi(ctx: &Ctx) -> Result<Output, CliError> {
    let grid = ctx.cfg.omega_grid();
    let data: Vec<_> = grid
        .par_iter()
        .map(|&w| {
            let s = solve_surface_gf(&ctx.couplings, ctx.freq(w));
            (s.branch_tag, correlation_data(&s, &ctx.couplings))
        })
        .collect();
    let im_plus = unwrap_phase(&data.iter().map(|d| d.1.xi_plus.im).collect::<Vec<_>>());
    let im_minus = unwrap_phase(&data.iter().map(|d| d.1.xi_minus.im).collect::<Vec<_>>());
    let mut table = Table::new(vec![
        "omega", "re_xi_plus", "im_xi_plus", "re_xi_minus", "im_xi_minus", "abs_rho", "topology", "branch",
    ]);
    for (k, (tag, corr)) in data.iter().enumerate() {
        table.rows.push(vec![
            grid[k].into(),
            corr.xi_plus.re.into(),
            im_plus[k].into(),
            corr.xi_minus.re.into(),
            im_minus[k].into(),
            corr.rho.norm().into(),
            Cell::S(topo_name(topo_indicator_from_xi(corr))),
            Cell::S(branch_name(*tag)),
        ]);
    }
    let mut metadata = Map::new();
    metadata.insert("branch_tags".into(), branch_counts(data.iter().map(|d| d.0)));
    metadata.insert("im_xi".into(), json!("unwrapped along the grid"));
    Ok(Output { table, metadata })
}

fn dos(ctx: &Ctx) -> Result<Output, CliError> {
    let cfg = ctx.cfg;
    let blocks: Vec<(BranchTag, Vec<Vec<Cell>>)> = cfg
        .omega_grid()
        .par_iter()
        .map(|&w| {
            let omega = ctx.freq(w);
            let s = solve_surface_gf(&ctx.couplings, omega);
            let rows = cfg
                .sites
                .iter()
                .map(|&j| {
                    let d = local_dos(gf_pair(&s, &ctx.couplings, j, j))
                        .context(|| format!("dos at site {j}, omega = {w}"))?;
                    Ok(vec![w.into(), j.into(), (d * ctx.t_c).into(), Cell::S(branch_name(s.branch_tag))])
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok((s.branch_tag, rows))
        })
        .collect::<Result<_, CliError>>()?;
    let mut metadata = Map::new();
    metadata.insert("branch_tags".into(), branch_counts(blocks.iter().map(|b| b.0)));
    let table = Table {
        columns: vec!["omega", "site", "dos", "branch"],
        rows: blocks.into_iter().flat_map(|b| b.1).collect(),
    };
    Ok(Output { table, metadata })
}

fn dos_bulk(ctx: &Ctx) -> Result<Output, CliError> {
    let rows = ctx
        .cfg
        .omega_grid()
        .par_iter()
        .map(|&w| {
            let b = bulk_gf(&ctx.couplings, ctx.freq(w));
            let d = local_dos(b.g00).context(|| format!("bulk dos at omega = {w}"))?;
            Ok(vec![w.into(), (d * ctx.t_c).into()])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let table = Table {
        columns: vec!["omega", "dos_bulk"],
        rows,
    };
    Ok(Output { table, metadata: Map::new() })
}

fn winding(ctx: &Ctx) -> Result<Output, CliError> {
    let rows: Vec<Vec<Cell>> = ctx
        .cfg
        .omega_grid()
        .par_iter()
        .map(|&w| {
            let omega = w * ctx.t_c;
            let corr = correlation_data(&solve_surface_gf(&ctx.couplings, c(omega, 0.0)), &ctx.couplings);
            let wn = match winding_number(&ctx.couplings, omega) {
                Ok(n) => Cell::I(n as i64),
                Err(_) => Cell::Empty,
            };
            vec![
                w.into(),
                wn,
                corr.max_re_xi().into(),
                Cell::S(topo_name(topo_indicator_from_xi(&corr))),
            ]
        })
        .collect();
    let gaps = rows.iter().filter(|r| r[1] == Cell::Empty).count();
    let mut metadata = Map::new();
    metadata.insert("gap_closing_points".into(), json!(gaps));
    metadata.insert("eta".into(), json!("ignored; the winding number is evaluated on the real axis"));
    let table = Table {
        columns: vec!["omega", "winding", "max_re_xi", "topology"],
        rows,
    };
    Ok(Output { table, metadata })
}

fn phases(ctx: &Ctx) -> Result<Output, CliError> {
    let cfg = ctx.cfg;
    let n = cfg.n_sites.unwrap_or(20);
    let gammas = cfg.gamma_grid.values();
    let pumps = cfg.pump_grid.values();
    let scale = |v: &[f64]| v.iter().map(|x| x * ctx.t_c).collect::<Vec<_>>();
    let diagram = phase_diagram(&ctx.params, &scale(&gammas), &scale(&pumps), cfg.omega * ctx.t_c, n)
        .context(|| "phase diagram".into())?;
    let mut table = Table::new(vec!["gamma", "pump", "class"]);
    for (g, row) in diagram.classification.iter().enumerate() {
        for (p, class) in row.iter().enumerate() {
            table.rows.push(vec![gammas[g].into(), pumps[p].into(), Cell::S(phase_name(*class))]);
        }
    }
    let mut metadata = Map::new();
    metadata.insert("n_sites".into(), json!(n));
    metadata.insert("chain".into(), json!("hatano-nelson: gamma_nn = 0, pump_nn = pump / 2"));
    Ok(Output { table, metadata })
}

fn final_value_json(v: FinalValue) -> Value {
    match v {
        FinalValue::Converged(z) => json!({ "kind": "converged", "value": [z.re, z.im] }),
        FinalValue::Divergent { abscissa } => json!({ "kind": "divergent", "abscissa": abscissa }),
        FinalValue::Inconclusive { last } => json!({ "kind": "inconclusive", "last": [last.re, last.im] }),
    }
}

fn transient(ctx: &Ctx) -> Result<Output, CliError> {
    let cfg = ctx.cfg;
    let ts = cfg.time_grid();
    let ts_abs: Vec<f64> = ts.iter().map(|t| t / ctx.t_c).collect();
    let tp = TransientParams::new(&ctx.couplings, c(1.0, 0.0));

    // closed form, truncated at the first time it leaves the Bessel domain or overflows
    let per_site: Vec<Vec<Option<Complex64>>> = cfg
        .sites
        .par_iter()
        .map(|&j| {
            let mut out = Vec::with_capacity(ts.len());
            for &t in &ts_abs {
                match coherent_amplitude(&tp, j, t) {
                    Ok(a) if a.is_finite() => out.push(Some(a)),
                    Ok(_) | Err(Error::BesselDomain { .. }) => break,
                    Err(e) => return Err(e),
                }
            }
            out.resize(ts.len(), None);
            Ok(out)
        })
        .collect::<chaingf::Result<_>>()
        .context(|| "closed-form evolution".into())?;
    let truncated_at = per_site
        .iter()
        .filter_map(|s| s.iter().position(Option::is_none))
        .min()
        .map(|k| ts[k]);

    let oracle = match cfg.n_sites {
        Some(n) => {
            let d = build_dynamical_matrix(&ctx.params, n).context(|| "building the propagated chain".into())?;
            let mut seed = vec![c(0.0, 0.0); n];
            seed[0] = c(1.0, 0.0);
            Some(propagate(&d, &seed, &ts_abs, ExpmMethod::Auto).context(|| "matrix exponential".into())?)
        }
        None => None,
    };

    let mut columns = vec!["t", "site", "re_a", "im_a", "abs_a"];
    if oracle.is_some() {
        columns.extend(["re_oracle", "im_oracle"]);
    }
    let mut table = Table::new(columns);
    for (k, &t) in ts.iter().enumerate() {
        for (s, &j) in cfg.sites.iter().enumerate() {
            let a = per_site[s][k];
            let mut row = vec![
                t.into(),
                j.into(),
                a.map(|z| z.re).into(),
                a.map(|z| z.im).into(),
                a.map(|z| z.norm()).into(),
            ];
            if let Some(tr) = &oracle {
                let z = tr.amplitudes.get(k).map(|v| v[j]);
                row.extend([z.map(|z| z.re).into(), z.map(|z| z.im).into()]);
            }
            table.rows.push(row);
        }
    }
    let mut metadata = Map::new();
    metadata.insert("tau_amp".into(), json!(amplification_time(&tp) * ctx.t_c));
    metadata.insert("growth_abscissa".into(), json!(growth_abscissa(&tp) / ctx.t_c));
    metadata.insert("closed_form_truncated_at".into(), json!(truncated_at));
    if let Some(tr) = &oracle {
        metadata.insert("oracle_overflow_at".into(), json!(tr.overflow_at.map(|t| t * ctx.t_c)));
    }
    let finals: Map<String, Value> = cfg
        .sites
        .iter()
        .map(|&j| (j.to_string(), final_value_json(steady_state_final_value(&tp, j))))
        .collect();
    metadata.insert("final_value".into(), Value::Object(finals));
    metadata.insert("seed".into(), json!("unit amplitude on site 0"));
    Ok(Output { table, metadata })
}

fn gain_table(ctx: &Ctx) -> Result<Output, CliError> {
    let cfg = ctx.cfg;
    let blocks: Vec<(BranchTag, Vec<Vec<Cell>>)> = cfg
        .omega_grid()
        .par_iter()
        .map(|&w| {
            let s = solve_surface_gf(&ctx.couplings, ctx.freq(w));
            let corr = correlation_data(&s, &ctx.couplings);
            let rows = cfg
                .sites
                .iter()
                .map(|&j| {
                    let g = gain(&s, &corr, ctx.params.gamma, j);
                    vec![w.into(), j.into(), g.into(), g.log10().into()]
                })
                .collect();
            (s.branch_tag, rows)
        })
        .collect();
    let mut metadata = Map::new();
    metadata.insert("branch_tags".into(), branch_counts(blocks.iter().map(|b| b.0)));
    let table = Table {
        columns: vec!["omega", "site", "gain", "log10_gain"],
        rows: blocks.into_iter().flat_map(|b| b.1).collect(),
    };
    Ok(Output { table, metadata })
}

fn noise(ctx: &Ctx) -> Result<Output, CliError> {
    let cfg = ctx.cfg;
    let blocks: Vec<Vec<Vec<Cell>>> = cfg
        .omega_grid()
        .par_iter()
        .map(|&w| {
            cfg.sites
                .iter()
                .map(|&j| match noise_report(&ctx.params, w * ctx.t_c, j) {
                    Ok(r) => Ok(vec![
                        w.into(),
                        j.into(),
                        r.gain.into(),
                        r.n_amp.into(),
                        r.n_add.into(),
                        r.terms.into(),
                    ]),
                    Err(Error::NoiseSumDiverges { .. }) => {
                        Ok(vec![w.into(), j.into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty])
                    }
                    Err(e) => Err(CliError::Numerical {
                        context: format!("noise at site {j}, omega = {w}"),
                        source: e,
                    }),
                })
                .collect()
        })
        .collect::<Result<_, CliError>>()?;
    let rows: Vec<Vec<Cell>> = blocks.into_iter().flatten().collect();
    let diverging = rows.iter().filter(|r| r[2] == Cell::Empty).count();
    let mut metadata = Map::new();
    metadata.insert("diverging_points".into(), json!(diverging));
    metadata.insert(
        "truncation".into(),
        json!("row summed to ceil(8 / |Re xi+|) sites beyond j; empty where Re xi+ >= 0"),
    );
    let table = Table {
        columns: vec!["omega", "site", "gain", "n_amp", "n_add", "terms"],
        rows,
    };
    Ok(Output { table, metadata })
}

fn bench(ctx: &Ctx) -> Result<Output, CliError> {
    let cfg = ctx.cfg;
    let report = run_bench(&ctx.params, &cfg.sizes, cfg.repetitions, ctx.freq(cfg.omega))
        .context(|| "benchmark".into())?;
    let mut table = Table::new(vec!["n_sites", "decimation_seconds", "dense_seconds", "max_rel_error"]);
    for p in &report.points {
        table.rows.push(vec![
            p.n_sites.into(),
            p.decimation_seconds.into(),
            p.dense_seconds.into(),
            p.max_rel_error.into(),
        ]);
    }
    let mut metadata = Map::new();
    metadata.insert("decimation_exponent".into(), json!(report.decimation_exponent));
    metadata.insert("dense_exponent".into(), json!(report.dense_exponent));
    metadata.insert("repetitions".into(), json!(cfg.repetitions));
    Ok(Output { table, metadata })
}
