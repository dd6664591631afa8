//! Densities of states, topology, stability diagrams, gain and added noise.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::decim2::{correlation_data, gf_pair, solve_surface_gf, CorrelationData, SurfaceGF};
use crate::error::{Error, Result};
use crate::model::{build_dynamical_matrix, effective_couplings, stability_report, ChainParams, EffectiveCouplings};

/// `-Im G_jj / pi`. Values below `-1e-8` mean the wrong root was taken.
pub fn local_dos(g_jj: Complex64) -> Result<f64> {
    let value = -g_jj.im / std::f64::consts::PI;
    if value < -1e-8 {
        return Err(Error::NegativeDos { value });
    }
    Ok(value.max(0.0))
}

/// Lattice Green's function `G(d)` of an infinite lossless chain with
/// hopping `t_c` and on-site frequency `omega_a`. On the real axis the
/// retarded branch is returned.
pub fn bulk_gf_pbc(omega: Complex64, t_c: f64, omega_a: f64, d: i64) -> Result<Complex64> {
    let x = omega - omega_a;
    let m = d.unsigned_abs() as u32;
    if t_c == 0.0 {
        if x.norm() == 0.0 {
            return Err(Error::Singular { omega });
        }
        return Ok(if m == 0 { 1.0 / x } else { Complex64::new(0.0, 0.0) });
    }
    if x.im == 0.0 {
        let u = x.re / (2.0 * t_c);
        if u.abs() == 1.0 {
            return Err(Error::Singular { omega });
        }
        return Ok(if u.abs() < 1.0 {
            let s = (1.0 - u * u).sqrt();
            Complex64::new(0.0, -1.0) / (2.0 * t_c * s) * Complex64::new(u, -s).powu(m)
        } else {
            let sg = u.signum();
            let s = (u * u - 1.0).sqrt();
            Complex64::new(sg / (2.0 * t_c * s) * (u - sg * s).powi(m as i32), 0.0)
        });
    }
    let disc = (x * x - 4.0 * t_c * t_c).sqrt();
    let (za, zb) = ((x + disc) / (2.0 * t_c), (x - disc) / (2.0 * t_c));
    let (z_in, z_out) = if za.norm() < zb.norm() { (za, zb) } else { (zb, za) };
    Ok(z_in.powu(m) / (t_c * (z_out - z_in)))
}

/// Exclusion band around the unit circle for the winding number.
pub const GAP_CLOSING_TOL: f64 = 1e-6;

/// Zeros of `t+ z^2 - mu z + t-`, handling vanishing leading coefficients.
fn symbol_zeros(couplings: &EffectiveCouplings, mu: Complex64) -> Vec<Complex64> {
    let (a, b, c) = (couplings.t_plus, -mu, couplings.t_minus);
    let scale = a.norm() + b.norm() + c.norm();
    let tiny = 1e-14 * scale.max(f64::MIN_POSITIVE);
    if a.norm() <= tiny {
        if b.norm() <= tiny {
            return vec![];
        }
        return vec![-c / b];
    }
    let disc = (b * b - 4.0 * a * c).sqrt();
    let q = if (b + disc).norm() >= (b - disc).norm() {
        -(b + disc) / 2.0
    } else {
        -(b - disc) / 2.0
    };
    if q.norm() <= tiny {
        return vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
    }
    vec![q / a, c / q]
}

/// Winding of `omega - D(k)` around the origin over the Brillouin zone,
/// counted as the zeros of `t+ z^2 - mu z + t-` inside the unit circle minus
/// the pole at `z = 0`.
pub fn winding_number(couplings: &EffectiveCouplings, omega: f64) -> Result<i32> {
    let mu = Complex64::new(omega, 0.0) - couplings.eps_tilde;
    let zeros = symbol_zeros(couplings, mu);
    if zeros.iter().any(|z| (z.norm() - 1.0).abs() < GAP_CLOSING_TOL) {
        return Err(Error::GapClosing { omega });
    }
    let inside = zeros.iter().filter(|z| z.norm() < 1.0).count() as i32;
    Ok(inside - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TopoIndicator {
    Trivial,
    Topological,
    /// `|Re xi|` within `1e-8` of zero.
    Boundary,
}

impl TopoIndicator {
    pub fn value(self) -> Option<u8> {
        match self {
            TopoIndicator::Trivial => Some(0),
            TopoIndicator::Topological => Some(1),
            TopoIndicator::Boundary => None,
        }
    }
}

/// `Theta(Re xi)` for the amplifying direction, the larger of the two real parts.
pub fn topo_indicator_from_xi(corr: &CorrelationData) -> TopoIndicator {
    let re = corr.max_re_xi();
    if re.abs() < 1e-8 {
        TopoIndicator::Boundary
    } else if re > 0.0 {
        TopoIndicator::Topological
    } else {
        TopoIndicator::Trivial
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseClass {
    TrivialStable,
    TrivialUnstable,
    TopologicalStable,
    TopologicalUnstable,
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseDiagram {
    pub gamma_grid: Vec<f64>,
    pub pump_grid: Vec<f64>,
    /// `classification[g][p]` for `gamma_grid[g]`, `pump_grid[p]`.
    pub classification: Vec<Vec<PhaseClass>>,
}

/// Topology of one parameter point at `omega`, from the surface Green's function.
pub fn topology_at(couplings: &EffectiveCouplings, omega: f64) -> TopoIndicator {
    let s = solve_surface_gf(couplings, Complex64::new(omega, 0.0));
    topo_indicator_from_xi(&correlation_data(&s, couplings))
}

pub fn classify_point(params: &ChainParams, omega: f64, n_sites: usize) -> Result<PhaseClass> {
    let couplings = effective_couplings(params);
    let topo = topology_at(&couplings, omega);
    let winding = winding_number(&couplings, omega);
    if topo == TopoIndicator::Boundary || matches!(winding, Err(Error::GapClosing { .. })) {
        return Ok(PhaseClass::Boundary);
    }
    let stable = stability_report(&build_dynamical_matrix(params, n_sites)?)?.stable;
    Ok(match (topo, stable) {
        (TopoIndicator::Topological, true) => PhaseClass::TopologicalStable,
        (TopoIndicator::Topological, false) => PhaseClass::TopologicalUnstable,
        (_, true) => PhaseClass::TrivialStable,
        (_, false) => PhaseClass::TrivialUnstable,
    })
}

/// Stability and topology over a `(gamma, P)` grid of Hatano-Nelson chains
/// sharing `epsilon`, `t_c` and `phi` with `template`.
pub fn phase_diagram(
    template: &ChainParams,
    gamma_grid: &[f64],
    pump_grid: &[f64],
    omega: f64,
    n_sites: usize,
) -> Result<PhaseDiagram> {
    if gamma_grid.is_empty() || pump_grid.is_empty() {
        return Err(Error::InvalidParameter("phase diagram grids must be nonempty".into()));
    }
    let classification = gamma_grid
        .par_iter()
        .map(|&gamma| {
            pump_grid
                .iter()
                .map(|&pump| {
                    let p = ChainParams::hatano_nelson(template.epsilon, template.t_c, template.phi, gamma, pump);
                    classify_point(&p, omega, n_sites)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseDiagram {
        gamma_grid: gamma_grid.to_vec(),
        pump_grid: pump_grid.to_vec(),
        classification,
    })
}

/// Power gain from site 0 to site `j`, `gamma^2 |G00|^2 e^{2 j Re xi-}`.
pub fn gain(surface: &SurfaceGF, corr: &CorrelationData, gamma: f64, j: usize) -> f64 {
    gamma * gamma * surface.value.norm_sqr() * (2.0 * j as f64 * corr.xi_minus.re).exp()
}

/// Tridiagonal pump matrix: `P` on the diagonal, `P_nn` next to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PumpKernel {
    pub diagonal: f64,
    pub off_diagonal: f64,
}

impl PumpKernel {
    pub fn from_params(params: &ChainParams) -> Self {
        Self {
            diagonal: params.pump,
            off_diagonal: params.pump_nn,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseReport {
    pub omega: f64,
    pub site: usize,
    pub gain: f64,
    pub n_amp: f64,
    /// `None` when the gain vanishes.
    pub n_add: Option<f64>,
    /// Number of row entries summed.
    pub terms: usize,
}

/// Added noise of the output at site `j` from its resolvent row `G_{j,l}`, `l = 0..`.
pub fn added_noise(
    omega: f64,
    site: usize,
    gf_row: &[Complex64],
    kernel: &PumpKernel,
    gamma: f64,
) -> Result<NoiseReport> {
    if gf_row.is_empty() {
        return Err(Error::InvalidParameter("empty Green's function row".into()));
    }
    let mut diag = 0.0;
    let mut cross = 0.0;
    for l in 0..gf_row.len() {
        diag += gf_row[l].norm_sqr();
        if l + 1 < gf_row.len() {
            cross += 2.0 * (gf_row[l].conj() * gf_row[l + 1]).re;
        }
    }
    let quad = kernel.diagonal * diag + kernel.off_diagonal * cross;
    let scale = (kernel.diagonal.abs() + 2.0 * kernel.off_diagonal.abs()) * diag;
    if quad < -1e-12 * scale {
        return Err(Error::InvalidParameter(format!(
            "pump kernel is not positive semidefinite (quadratic form {quad})"
        )));
    }
    let n_amp = 0.5 * gamma * quad.max(0.0);
    let g = gamma * gamma * gf_row[0].norm_sqr();
    Ok(NoiseReport {
        omega,
        site,
        gain: g,
        n_amp,
        n_add: (g > 0.0).then(|| n_amp / g),
        terms: gf_row.len(),
    })
}

/// Added noise at site `j` of a semi-infinite chain. The row is truncated
/// `ceil(8 / |Re xi+|)` sites beyond `j`, where the remaining terms are
/// below `e^-8` of the diagonal one.
pub fn noise_report(params: &ChainParams, omega: f64, j: usize) -> Result<NoiseReport> {
    let couplings = effective_couplings(params);
    let surface = solve_surface_gf(&couplings, Complex64::new(omega, 0.0));
    let corr = correlation_data(&surface, &couplings);
    if corr.xi_plus.re >= 0.0 {
        return Err(Error::NoiseSumDiverges { re_xi: corr.xi_plus.re });
    }
    let tail = (8.0 / corr.xi_plus.re.abs()).ceil() as usize;
    let row: Vec<Complex64> = (0..=j + tail).map(|l| gf_pair(&surface, &couplings, j, l)).collect();
    added_noise(omega, j, &row, &PumpKernel::from_params(params), params.gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lorentzian_for_single_site() {
        let (eps, gamma, pump) = (0.3, 0.8, 0.2);
        let half = (gamma - pump) / 2.0;
        for w in [0.3, 0.6, -1.0] {
            let g = 1.0 / (c(w, 0.0) - c(eps, -half));
            let expected = half / PI / ((w - eps) * (w - eps) + half * half);
            assert!((local_dos(g).unwrap() - expected).abs() < 1e-14);
        }
        assert!(matches!(local_dos(c(0.0, 1.0)), Err(Error::NegativeDos { .. })));
    }

    #[test]
    fn bulk_pbc_piecewise() {
        let g = bulk_gf_pbc(c(3.0, 0.0), 1.0, 0.0, 0).unwrap();
        assert!((g - c(1.0 / 5f64.sqrt(), 0.0)).norm() < 1e-15);
        let g = bulk_gf_pbc(c(-3.0, 0.0), 1.0, 0.0, 0).unwrap();
        assert!((g - c(-1.0 / 5f64.sqrt(), 0.0)).norm() < 1e-15);
        let g = bulk_gf_pbc(c(1.0, 0.0), 1.0, 0.0, 0).unwrap();
        assert!((g - c(0.0, -1.0 / 3f64.sqrt())).norm() < 1e-15);
        let near = bulk_gf_pbc(c(1.0, 1e-12), 1.0, 0.0, 5).unwrap();
        let on = bulk_gf_pbc(c(1.0, 0.0), 1.0, 0.0, 5).unwrap();
        assert!((near - on).norm() < 1e-9);
        assert!(bulk_gf_pbc(c(2.0, 0.0), 1.0, 0.0, 0).is_err());
    }

    #[test]
    fn winding_examples() {
        let hn = effective_couplings(&ChainParams::hatano_nelson(0.0, 1.0, PI / 2.0, 2.0, 4.0));
        assert_ne!(winding_number(&hn, 0.0).unwrap(), 0);
        assert_eq!(winding_number(&hn, 20.0).unwrap(), 0);
        assert_eq!(winding_number(&hn, -20.0).unwrap(), 0);
        let lossy = effective_couplings(&ChainParams::coupled_cavity(0.0, 1.0, 0.5, 0.0));
        assert_eq!(winding_number(&lossy, 0.3).unwrap(), 0);
        let hermitian = effective_couplings(&ChainParams::coupled_cavity(0.0, 1.0, 0.0, 0.0));
        assert!(matches!(winding_number(&hermitian, 0.5), Err(Error::GapClosing { .. })));
    }

    #[test]
    fn indicator_examples() {
        let lossy = effective_couplings(&ChainParams::coupled_cavity(0.0, 1.0, 0.5, 0.1));
        for w in [-3.0, 0.0, 1.0] {
            assert_eq!(topology_at(&lossy, w), TopoIndicator::Trivial);
        }
        let lossless = effective_couplings(&ChainParams::coupled_cavity(0.0, 1.0, 0.2, 0.2));
        assert_eq!(topology_at(&lossless, 0.5), TopoIndicator::Boundary);
        let hn = effective_couplings(&ChainParams::hatano_nelson(0.0, 1.0, PI / 2.0, 2.0, 4.0));
        assert_eq!(topology_at(&hn, 0.0), TopoIndicator::Topological);
    }

    #[test]
    fn phase_points_from_the_transient_study() {
        let t = ChainParams::hatano_nelson(0.0, 1.0, PI / 2.0, 1.0, 1.0);
        let pd = phase_diagram(&t, &[2.0, 1.0, 5.0], &[1.4, 0.0], 0.0, 15).unwrap();
        assert_eq!(pd.classification[0][0], PhaseClass::TopologicalStable);
        assert_eq!(pd.classification[1][0], PhaseClass::TopologicalUnstable);
        assert_eq!(pd.classification[2][1], PhaseClass::TrivialStable);
        assert!(phase_diagram(&t, &[], &[1.0], 0.0, 10).is_err());
    }

    #[test]
    fn single_site_noise() {
        let (gamma, pump) = (2.0, 0.5);
        let g00 = c(0.3, -0.4);
        let r = added_noise(0.0, 0, &[g00], &PumpKernel { diagonal: pump, off_diagonal: pump / 2.0 }, gamma).unwrap();
        assert!((r.n_amp - gamma * pump * g00.norm_sqr() / 2.0).abs() < 1e-15);
        assert!((r.n_add.unwrap() - pump / (2.0 * gamma)).abs() < 1e-15);
        let r = added_noise(0.0, 0, &[c(0.0, 0.0)], &PumpKernel { diagonal: pump, off_diagonal: 0.0 }, gamma).unwrap();
        assert_eq!(r.n_add, None);
    }

    #[test]
    fn gain_at_edge_and_trivial_decay() {
        let p = ChainParams::coupled_cavity(0.0, 1.0, 0.6, 0.1);
        let cp = effective_couplings(&p);
        let s = solve_surface_gf(&cp, c(0.2, 0.0));
        let corr = correlation_data(&s, &cp);
        assert!((gain(&s, &corr, 0.6, 0) - 0.36 * s.value.norm_sqr()).abs() < 1e-15);
        assert!(gain(&s, &corr, 0.6, 5) < gain(&s, &corr, 0.6, 4));
    }

    #[test]
    fn noise_sum_needs_decay() {
        let p = ChainParams::hatano_nelson(0.0, 1.0, -PI / 2.0, 2.0, 4.0);
        assert!(matches!(noise_report(&p, 0.0, 2), Err(Error::NoiseSumDiverges { .. })));
    }
}
