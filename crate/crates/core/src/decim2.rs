//! Semi-infinite chains through the Dyson fixed point of the surface
//! Green's function.
//!
//! `G00 = g00 + g00 t+ G00 t- G00` has two roots whose values of
//! `rho = alpha G00^2` multiply to one. The physical root has `|rho| < 1`:
//! it is the attracting fixed point of the continued fraction, the large-N
//! limit of finite chains, and it vanishes as `|omega|` grows.

use num_complex::Complex64;

use crate::model::EffectiveCouplings;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchTag {
    /// `|rho| < 1` with margin.
    Physical,
    /// The other root, `|rho| > 1`.
    Alternate,
    /// `|rho|` within the ambiguity tolerance of 1, e.g. inside the band of
    /// a lossless chain on the real axis.
    Ambiguous,
}

/// Surface Green's function `G00` at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceGF {
    pub omega: Complex64,
    pub value: Complex64,
    pub residual: f64,
    pub branch_tag: BranchTag,
}

/// Default distance of `|rho|` from 1 below which a root is tagged ambiguous.
pub const BRANCH_TOL: f64 = 1e-9;

/// Backward error of the fixed point `G = g00 (1 + alpha G^2)`, written as
/// `|w G - 1 - alpha G^2| / (|w G| + 1 + |alpha G^2|)` with `w = omega - eps~`.
/// Multiplying through by `w` keeps it meaningful where `g00` diverges.
fn residual(couplings: &EffectiveCouplings, omega: Complex64, g: Complex64) -> f64 {
    let w = omega - couplings.eps_tilde;
    let rho = couplings.alpha() * g * g;
    let wg = w * g;
    (wg - 1.0 - rho).norm() / (wg.norm() + 1.0 + rho.norm())
}

/// Both roots of `alpha G^2 - w G + 1 = 0`, the one with smaller `|G|` first.
pub fn surface_roots(couplings: &EffectiveCouplings, omega: Complex64) -> (Complex64, Complex64) {
    let w = omega - couplings.eps_tilde;
    let alpha = couplings.alpha();
    let disc = (w * w - 4.0 * alpha).sqrt();
    let (qa, qb) = (w + disc, w - disc);
    let q = if qa.norm() >= qb.norm() { qa } else { qb };
    let polish = |g: Complex64| {
        let f = alpha * g * g - w * g + 1.0;
        let df = 2.0 * alpha * g - w;
        if df.norm() > 0.0 && f.is_finite() {
            let step = f / df;
            if step.is_finite() {
                return g - step;
            }
        }
        g
    };
    let small = polish(2.0 / q);
    let large = if alpha == zero() {
        Complex64::new(f64::INFINITY, 0.0)
    } else {
        polish(q / (2.0 * alpha))
    };
    (small, large)
}

fn tag_for(rho: Complex64, tol: f64) -> BranchTag {
    let r = rho.norm();
    if (r - 1.0).abs() <= tol {
        BranchTag::Ambiguous
    } else if r < 1.0 {
        BranchTag::Physical
    } else {
        BranchTag::Alternate
    }
}

pub fn solve_surface_gf_with_tol(
    couplings: &EffectiveCouplings,
    omega: Complex64,
    tol: f64,
) -> SurfaceGF {
    let alpha = couplings.alpha();
    if alpha == zero() {
        let g = 1.0 / (omega - couplings.eps_tilde);
        return SurfaceGF {
            omega,
            value: g,
            residual: 0.0,
            branch_tag: BranchTag::Physical,
        };
    }
    let (g, _) = surface_roots(couplings, omega);
    SurfaceGF {
        omega,
        value: g,
        residual: residual(couplings, omega, g),
        branch_tag: tag_for(alpha * g * g, tol),
    }
}

/// Physical root of the surface fixed point.
pub fn solve_surface_gf(couplings: &EffectiveCouplings, omega: Complex64) -> SurfaceGF {
    solve_surface_gf_with_tol(couplings, omega, BRANCH_TOL)
}

/// The non-physical root, for diagnostics.
pub fn alternate_surface_gf(couplings: &EffectiveCouplings, omega: Complex64) -> SurfaceGF {
    let (_, g) = surface_roots(couplings, omega);
    let alpha = couplings.alpha();
    SurfaceGF {
        omega,
        value: g,
        residual: residual(couplings, omega, g),
        branch_tag: tag_for(alpha * g * g, BRANCH_TOL).max_alternate(),
    }
}

impl BranchTag {
    fn max_alternate(self) -> Self {
        match self {
            BranchTag::Physical => BranchTag::Alternate,
            other => other,
        }
    }
}

/// Surface Green's function along a frequency sweep. Points whose root is
/// ambiguous take the root closest to the previous grid point.
pub fn solve_surface_gf_sweep(couplings: &EffectiveCouplings, omegas: &[Complex64]) -> Vec<SurfaceGF> {
    let mut out: Vec<SurfaceGF> = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        let mut s = solve_surface_gf(couplings, omega);
        if s.branch_tag == BranchTag::Ambiguous {
            if let Some(prev) = out.last() {
                let (a, b) = surface_roots(couplings, omega);
                let pick = if (b - prev.value).norm() < (a - prev.value).norm() { b } else { a };
                s.value = pick;
                s.residual = residual(couplings, omega, pick);
            }
        }
        out.push(s);
    }
    out
}

/// `Xi_j = rho (rho^j - 1) / (rho - 1)`, the boundary correction.
pub fn surface_amplitude(rho: Complex64, j: usize) -> Complex64 {
    if (rho - 1.0).norm() < 1e-8 {
        return rho * j as f64;
    }
    rho * (rho.powu(j as u32) - 1.0) / (rho - 1.0)
}

/// `G_{j,l}` of the semi-infinite chain in factored form.
pub fn gf_pair(surface: &SurfaceGF, couplings: &EffectiveCouplings, j: usize, l: usize) -> Complex64 {
    let g = surface.value;
    let rho = couplings.alpha() * g * g;
    let (near, dist, hop) = if l >= j {
        (j, l - j, couplings.t_plus)
    } else {
        (l, j - l, couplings.t_minus)
    };
    (1.0 + surface_amplitude(rho, near)) * (g * hop).powu(dist as u32) * g
}

/// `G_{j,l}` as the explicit sum over reflections off the boundary.
pub fn gf_pair_sum(surface: &SurfaceGF, couplings: &EffectiveCouplings, j: usize, l: usize) -> Complex64 {
    let g = surface.value;
    let gm = g * couplings.t_minus;
    let gp = g * couplings.t_plus;
    let direct = if l >= j {
        gp.powu((l - j) as u32)
    } else {
        gm.powu((j - l) as u32)
    };
    let mut total = direct * g;
    for a in 0..j.min(l) {
        total += gm.powu((j - a) as u32) * gp.powu((l - a) as u32) * g;
    }
    total
}

/// Directional inverse correlation lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationData {
    /// `log(G00 t+)`, governing `G_{j,l}` for `l > j`.
    pub xi_plus: Complex64,
    /// `log(G00 t-)`, governing `G_{j,l}` for `j > l`.
    pub xi_minus: Complex64,
    pub rho: Complex64,
}

impl CorrelationData {
    /// The larger of the two real parts; positive means amplification in some direction.
    pub fn max_re_xi(&self) -> f64 {
        self.xi_plus.re.max(self.xi_minus.re)
    }
}

pub fn correlation_data(surface: &SurfaceGF, couplings: &EffectiveCouplings) -> CorrelationData {
    let g = surface.value;
    CorrelationData {
        xi_plus: (g * couplings.t_plus).ln(),
        xi_minus: (g * couplings.t_minus).ln(),
        rho: couplings.alpha() * g * g,
    }
}

/// Removes `2 pi` jumps from a sequence of phases.
pub fn unwrap_phase(phases: &[f64]) -> Vec<f64> {
    use std::f64::consts::PI;
    let mut out = Vec::with_capacity(phases.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for &p in phases {
        if let Some(q) = prev {
            let jump = p - q;
            offset -= (2.0 * PI) * (jump / (2.0 * PI)).round();
        }
        out.push(p + offset);
        prev = Some(p);
    }
    out
}

/// `xi_plus` from the closed form in `a = (omega - eps~) / (2 sqrt(alpha))`:
/// `xi = h + log(a - sqrt(a^2 - 1))` with `h = log(t+/t-) / 2`, taking the
/// root of smaller modulus. `None` when `alpha = 0`.
pub fn xi_decay_formula(couplings: &EffectiveCouplings, omega: f64) -> Option<Complex64> {
    let alpha = couplings.alpha();
    if alpha == zero() {
        return None;
    }
    let h = 0.5 * (couplings.t_plus / couplings.t_minus).ln();
    let sqrt_alpha = couplings.t_plus * (-h).exp();
    let a = (Complex64::new(omega, 0.0) - couplings.eps_tilde) / (2.0 * sqrt_alpha);
    let s = (a * a - 1.0).sqrt();
    let (u1, u2) = (a - s, a + s);
    let u = if u1.norm() <= u2.norm() { u1 } else { u2 };
    Some(h + u.ln())
}

/// Two semi-infinite chains joined through one central site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkGF {
    pub g00: Complex64,
    /// `G_right t-`: ratio per site for `j > l`.
    pub forward: Complex64,
    /// `G_left t+`: ratio per site for `j < l`.
    pub backward: Complex64,
}

impl BulkGF {
    /// `G_{j,l}` with `d = j - l`.
    pub fn at(&self, d: i64) -> Complex64 {
        if d >= 0 {
            self.g00 * self.forward.powu(d as u32)
        } else {
            self.g00 * self.backward.powu((-d) as u32)
        }
    }
}

/// Bulk Green's function of an infinite chain. `surface_left` is the
/// surface Green's function of the chain extending to the left, which has
/// the mirrored couplings.
pub fn glue_chains(
    surface_left: &SurfaceGF,
    surface_right: &SurfaceGF,
    couplings: &EffectiveCouplings,
) -> BulkGF {
    let w = surface_right.omega - couplings.eps_tilde;
    let alpha = couplings.alpha();
    let g00 = 1.0 / (w - alpha * (surface_left.value + surface_right.value));
    BulkGF {
        g00,
        forward: surface_right.value * couplings.t_minus,
        backward: surface_left.value * couplings.t_plus,
    }
}

/// Bulk Green's function at `omega` built from the two physical surfaces.
pub fn bulk_gf(couplings: &EffectiveCouplings, omega: Complex64) -> BulkGF {
    let right = solve_surface_gf(couplings, omega);
    let left = solve_surface_gf(&couplings.mirrored(), omega);
    glue_chains(&left, &right, couplings)
}
