//! Time-domain dynamics of a semi-infinite chain seeded at its boundary.
//!
//! In the Laplace domain `G_{j,0}(is) = (G00(is) t-)^j G00(is)`, and powers
//! of the surface Green's function invert in closed form:
//!
//! ```text
//! [G00^m](t) = e^{-i eps~ t} (-i)^m m J_m(2 t sqrt(alpha)) / (t alpha^{m/2})
//! ```
//!
//! so a coherent seed `alpha0` on site 0 evolves as
//! `<a_j(t)> = i alpha0 t-^j [G00^{j+1}](t)`.

pub mod bessel;

pub use bessel::bessel_j_complex;

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::decim2::solve_surface_gf;
use crate::error::{Error, Result};
use crate::model::EffectiveCouplings;
use crate::oracle::{check_increasing, Trajectory};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientParams {
    pub alpha: Complex64,
    pub eps_tilde: Complex64,
    pub seed_amplitude: Complex64,
    pub t_plus: Complex64,
    pub t_minus: Complex64,
}

impl TransientParams {
    pub fn new(couplings: &EffectiveCouplings, seed_amplitude: Complex64) -> Self {
        Self {
            alpha: couplings.alpha(),
            eps_tilde: couplings.eps_tilde,
            seed_amplitude,
            t_plus: couplings.t_plus,
            t_minus: couplings.t_minus,
        }
    }

    /// `t- / t+`.
    pub fn ratio(&self) -> Complex64 {
        self.t_minus / self.t_plus
    }

    /// Principal square root of `alpha`.
    pub fn sqrt_alpha(&self) -> Complex64 {
        self.alpha.sqrt()
    }

    pub fn couplings(&self) -> EffectiveCouplings {
        EffectiveCouplings::new(self.eps_tilde, self.t_plus, self.t_minus)
    }
}

/// Below this `|2 t sqrt(alpha)|` the entire series in `alpha` is summed directly.
const SERIES_LIMIT: f64 = bessel::SERIES_RADIUS;

/// `J_m(2 t sqrt(alpha)) / (t alpha^{m/2})` summed as a power series in `alpha`.
fn reduced_series(alpha: Complex64, m: usize, t: f64) -> Complex64 {
    let mut lead = Complex64::new(1.0, 0.0);
    for k in 1..=m {
        lead /= k as f64;
    }
    lead *= t.powi(m as i32 - 1);
    let q = -alpha * t * t;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + m) as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    lead * sum
}

/// `weight^j J_m(2 t sqrt(alpha)) / (t alpha^{m/2})`, `m = j + 1`.
fn weighted_reduced(p: &TransientParams, weight: Complex64, j: usize, t: f64) -> Result<Complex64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be finite and nonnegative, got {t}")));
    }
    let m = j + 1;
    let sa = p.sqrt_alpha();
    let z = 2.0 * t * sa;
    if z.norm() <= SERIES_LIMIT {
        return Ok(weight.powu(j as u32) * reduced_series(p.alpha, m, t));
    }
    let jm = bessel_j_complex(m, z)?;
    let direct = (weight / sa).powu(j as u32) * jm / (t * sa);
    if direct.is_finite() && (direct.norm() > 0.0 || jm.norm() == 0.0) {
        return Ok(direct);
    }
    let log = j as f64 * (weight / sa).ln() + jm.ln() - (t * sa).ln();
    Ok(log.exp())
}

/// `[G00^{j+1}](t)`, the inverse Laplace transform of `G00(is)^{j+1}`.
pub fn surface_gf_power_time(p: &TransientParams, j: usize, t: f64) -> Result<Complex64> {
    let m = j + 1;
    let reduced = weighted_reduced(p, Complex64::new(1.0, 0.0), j, t)?;
    Ok((-I * p.eps_tilde * t).exp() * (-I).powu(m as u32) * m as f64 * reduced)
}

/// `<a_j(t)>` for a coherent seed on site 0.
pub fn coherent_amplitude(p: &TransientParams, j: usize, t: f64) -> Result<Complex64> {
    let m = j + 1;
    let reduced = weighted_reduced(p, p.t_minus, j, t)?;
    Ok(I * p.seed_amplitude
        * (-I * p.eps_tilde * t).exp()
        * (-I).powu(m as u32)
        * m as f64
        * reduced)
}

pub fn coherent_evolution(p: &TransientParams, j: usize, t_grid: &[f64]) -> Result<Vec<Complex64>> {
    t_grid.iter().map(|&t| coherent_amplitude(p, j, t)).collect()
}

/// Amplitudes on sites `0..n_sites` over `t_grid`.
pub fn coherent_trajectory(p: &TransientParams, n_sites: usize, t_grid: &[f64]) -> Result<Trajectory> {
    check_increasing(t_grid, "time grid")?;
    let amplitudes = t_grid
        .iter()
        .map(|&t| (0..n_sites).map(|j| coherent_amplitude(p, j, t)).collect())
        .collect::<Result<Vec<Vec<Complex64>>>>()?;
    Ok(Trajectory {
        t_grid: t_grid.to_vec(),
        amplitudes,
        overflow_at: None,
    })
}

/// Large-time envelope of `<a_j(t)>`, replacing the Bessel function by its
/// amplitude `(pi t sqrt(alpha))^{-1/2}`.
pub fn long_time_asymptote(p: &TransientParams, j: usize, t: f64) -> Complex64 {
    let m = j + 1;
    let sa = p.sqrt_alpha();
    I * p.seed_amplitude
        * (-I * p.eps_tilde * t).exp()
        * (-I).powu(m as u32)
        * m as f64
        * (p.t_minus / sa).powu(j as u32)
        / (PI.sqrt() * (sa * t).powf(1.5))
}

/// Root-mean-square of `|exact / asymptote|` over one oscillation period
/// centred on `t`, scaled so that a pure cosine gives 1.
pub fn period_averaged_ratio(p: &TransientParams, j: usize, t: f64) -> Result<f64> {
    let period = PI / (2.0 * p.sqrt_alpha().norm());
    let samples = 512;
    let mut acc = 0.0;
    for k in 0..samples {
        let tk = t - period / 2.0 + period * (k as f64 + 0.5) / samples as f64;
        let r = coherent_amplitude(p, j, tk)?.norm() / long_time_asymptote(p, j, tk).norm();
        acc += r * r;
    }
    Ok((2.0 * acc / samples as f64).sqrt())
}

/// `tau_amp = pi / |4 sqrt(alpha)|`.
pub fn amplification_time(p: &TransientParams) -> f64 {
    PI / (4.0 * p.sqrt_alpha().norm())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplificationMeasurement {
    pub tau_amp: f64,
    /// Mean time between successive maxima of `|<a_j(t)>|` at a fixed site,
    /// after the front has passed.
    pub peak_period: Option<f64>,
    /// Mean spacing per site between arrival times of the maximum of `|<a_j>|`.
    pub front_spacing: Option<f64>,
    /// Mean late-time delay between zero crossings of consecutive sites'
    /// oscillations, after removing the known phase and envelope factors.
    pub phase_delay: Option<f64>,
}

fn first_crossing(ts: &[f64], ys: &[f64], after: f64) -> Option<f64> {
    (1..ts.len()).find_map(|k| {
        if ts[k - 1] < after {
            return None;
        }
        let (a, b) = (ys[k - 1], ys[k]);
        if a == 0.0 {
            return Some(ts[k - 1]);
        }
        if a * b < 0.0 {
            Some(ts[k - 1] + (ts[k] - ts[k - 1]) * a / (a - b))
        } else {
            None
        }
    })
}

fn refine_peak(ts: &[f64], ys: &[f64], k: usize) -> f64 {
    if k == 0 || k + 1 >= ys.len() {
        return ts[k];
    }
    let (a, b, c) = (ys[k - 1], ys[k], ys[k + 1]);
    let den = a - 2.0 * b + c;
    if den == 0.0 {
        return ts[k];
    }
    ts[k] + 0.5 * (a - c) / den * (ts[k + 1] - ts[k])
}

/// Compares `tau_amp` with the wavefront on the listed sites over `[0, t_max]`.
pub fn measure_amplification(
    p: &TransientParams,
    sites: &[usize],
    t_max: f64,
    dt: f64,
) -> Result<AmplificationMeasurement> {
    if !(dt > 0.0) || !(t_max > dt) {
        return Err(Error::InvalidParameter("need 0 < dt < t_max".into()));
    }
    let steps = (t_max / dt).round() as usize;
    let ts: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let sa = p.sqrt_alpha();

    let mut peaks = Vec::new();
    let mut periods = Vec::new();
    let mut oscillation = Vec::new();
    for &j in sites {
        let amps = coherent_evolution(p, j, &ts)?;
        let mags: Vec<f64> = amps.iter().map(|a| a.norm()).collect();
        let k = mags
            .iter()
            .enumerate()
            .fold(0, |best, (k, &v)| if v > mags[best] { k } else { best });
        peaks.push((j, refine_peak(&ts, &mags, k)));
        let maxima: Vec<f64> = (k.max(1)..mags.len() - 1)
            .filter(|&i| mags[i] > mags[i - 1] && mags[i] >= mags[i + 1])
            .map(|i| refine_peak(&ts, &mags, i))
            .collect();
        periods.extend(maxima.windows(2).map(|w| w[1] - w[0]));

        let m = j + 1;
        let known = |t: f64| {
            I * p.seed_amplitude
                * (-I * p.eps_tilde * t).exp()
                * (-I).powu(m as u32)
                * m as f64
                * (p.t_minus / sa).powu(j as u32)
                / (t * sa)
        };
        let osc: Vec<f64> = ts
            .iter()
            .zip(&amps)
            .map(|(&t, &a)| if t > 0.0 { (a / known(t)).re } else { 0.0 })
            .collect();
        oscillation.push((j, osc));
    }

    let spacings: Vec<f64> = peaks
        .windows(2)
        .filter(|w| w[1].0 > w[0].0)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0) as f64)
        .collect();
    let front_spacing = (!spacings.is_empty()).then(|| spacings.iter().sum::<f64>() / spacings.len() as f64);

    let late = t_max / 2.0;
    let mut delays = Vec::new();
    for w in oscillation.windows(2) {
        if w[1].0 != w[0].0 + 1 {
            continue;
        }
        if let Some(t0) = first_crossing(&ts, &w[0].1, late) {
            if let Some(t1) = first_crossing(&ts, &w[1].1, t0) {
                delays.push(t1 - t0);
            }
        }
    }
    let phase_delay = (!delays.is_empty()).then(|| delays.iter().sum::<f64>() / delays.len() as f64);

    let peak_period = (!periods.is_empty()).then(|| periods.iter().sum::<f64>() / periods.len() as f64);

    Ok(AmplificationMeasurement {
        tau_amp: amplification_time(p),
        peak_period,
        front_spacing,
        phase_delay,
    })
}

/// Outcome of the final-value limit `s <a_j>(s)` as `s -> 0+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FinalValue {
    Converged(Complex64),
    /// The continuum reaches into the upper half plane; the amplitude grows
    /// and the final-value limit does not apply.
    Divergent { abscissa: f64 },
    Inconclusive { last: Complex64 },
}

impl FinalValue {
    pub fn is_divergent(&self) -> bool {
        matches!(self, FinalValue::Divergent { .. })
    }
}

/// Largest growth rate of the open-chain continuum `eps~ + 2 sqrt(alpha) cos k`.
pub fn growth_abscissa(p: &TransientParams) -> f64 {
    p.eps_tilde.im + 2.0 * p.sqrt_alpha().im.abs()
}

/// Final value of `<a_j(t)>` from the Laplace domain.
pub fn steady_state_final_value(p: &TransientParams, j: usize) -> FinalValue {
    let abscissa = growth_abscissa(p);
    let scale = p.eps_tilde.norm() + p.t_plus.norm() + p.t_minus.norm();
    if abscissa > crate::model::STABILITY_RTOL * scale {
        return FinalValue::Divergent { abscissa };
    }
    let couplings = p.couplings();
    let values: Vec<Complex64> = (0..=40)
        .map(|k| {
            let s = 0.1 * 0.5f64.powi(k);
            let g = solve_surface_gf(&couplings, Complex64::new(0.0, s)).value;
            s * I * p.seed_amplitude * (g * p.t_minus).powu(j as u32) * g
        })
        .collect();
    let last3 = &values[values.len() - 3..];
    let spread = last3
        .iter()
        .flat_map(|a| last3.iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max);
    let last = values[values.len() - 1];
    if spread <= 1e-8 && last.is_finite() {
        FinalValue::Converged(last)
    } else {
        FinalValue::Inconclusive { last }
    }
}
