//! Decimation from the site next to the boundary.
//!
//! Site 1 is repeatedly eliminated from the equations of motion for row 0 of
//! the resolvent. After `n` steps the boundary site sees a renormalised
//! energy `eps0`, a long-range hopping `tp`/`tm` to the current site 1, and
//! the current site 1 carries the renormalised energy `eps1`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{DynamicalMatrix, EffectiveCouplings};

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Coefficients of the partially decimated row-0 equations.
#[derive(Debug, Clone, PartialEq)]
pub struct DecimationState {
    pub eps1: Complex64,
    pub eps0: Complex64,
    pub tp: Complex64,
    pub tm: Complex64,
    /// Source coefficients of the row-0 equation, indexed by column.
    pub delta0: Vec<Complex64>,
    /// Source coefficients of the current site-1 equation.
    pub delta1: Vec<Complex64>,
    pub n: usize,
}

/// Couplings of the next site to be pulled in by a decimation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NextSite {
    pub eps: Complex64,
    /// Hopping from the current site 1 to the next site (upper diagonal).
    pub t_plus: Complex64,
    /// Hopping from the next site back to the current site 1 (lower diagonal).
    pub t_minus: Complex64,
}

impl From<&EffectiveCouplings> for NextSite {
    fn from(c: &EffectiveCouplings) -> Self {
        Self {
            eps: c.eps_tilde,
            t_plus: c.t_plus,
            t_minus: c.t_minus,
        }
    }
}

impl DecimationState {
    /// Undecimated state for a homogeneous chain. The source vectors are
    /// sized for `columns` columns (at least 2).
    pub fn homogeneous(couplings: &EffectiveCouplings, columns: usize) -> Self {
        let columns = columns.max(2);
        let mut delta0 = vec![zero(); columns];
        let mut delta1 = vec![zero(); columns];
        delta0[0] = one();
        delta1[1] = one();
        Self {
            eps1: couplings.eps_tilde,
            eps0: couplings.eps_tilde,
            tp: couplings.t_plus,
            tm: couplings.t_minus,
            delta0,
            delta1,
            n: 0,
        }
    }

    /// Undecimated state of a finite chain with at least two sites.
    pub fn from_matrix(d: &DynamicalMatrix) -> Result<Self> {
        let n = d.n_sites();
        if n < 2 {
            return Err(Error::InvalidParameter(
                "decimation needs at least two sites".into(),
            ));
        }
        let mut delta0 = vec![zero(); n];
        let mut delta1 = vec![zero(); n];
        delta0[0] = one();
        delta1[1] = one();
        Ok(Self {
            eps1: d.diagonal()[1],
            eps0: d.diagonal()[0],
            tp: d.upper()[0],
            tm: d.lower()[0],
            delta0,
            delta1,
            n: 0,
        })
    }

    /// Row 0 of the resolvent once no sites remain beyond site 0.
    pub fn surface_row(&self, omega: Complex64) -> Result<Vec<Complex64>> {
        let den = omega - self.eps0;
        if is_pole(den, omega) {
            return Err(Error::DecimationPole {
                step: self.n,
                omega,
            });
        }
        Ok(self.delta0.iter().map(|&x| x / den).collect())
    }
}

fn is_pole(den: Complex64, omega: Complex64) -> bool {
    !den.is_finite() || den.norm() <= 1e-15 * omega.norm().max(1.0)
}

fn pole_factor(state: &DecimationState, omega: Complex64) -> Result<Complex64> {
    let den = omega - state.eps1;
    if is_pole(den, omega) {
        return Err(Error::DecimationPole {
            step: state.n,
            omega,
        });
    }
    Ok(1.0 / den)
}

/// Eliminates the current site 1 and pulls in `next` as the new site 1.
pub fn decimate_step(
    state: &DecimationState,
    omega: Complex64,
    next: NextSite,
) -> Result<DecimationState> {
    let inv = pole_factor(state, omega)?;
    let a = state.tp * inv;
    let c = next.t_minus * inv;
    let support = (state.n + 3).min(state.delta0.len());
    let mut delta0 = state.delta0.clone();
    let mut delta1 = state.delta1.clone();
    for k in 0..support {
        delta0[k] += a * state.delta1[k];
        delta1[k] = c * state.delta1[k];
    }
    if state.n + 2 < delta1.len() {
        delta1[state.n + 2] += one();
    }
    Ok(DecimationState {
        eps1: next.eps + next.t_minus * next.t_plus * inv,
        eps0: state.eps0 + state.tp * state.tm * inv,
        tp: state.tp * next.t_plus * inv,
        tm: state.tm * next.t_minus * inv,
        delta0,
        delta1,
        n: state.n + 1,
    })
}

/// Eliminates the last remaining site 1, leaving only the boundary site.
pub fn decimate_last(state: &DecimationState, omega: Complex64) -> Result<DecimationState> {
    let inv = pole_factor(state, omega)?;
    let a = state.tp * inv;
    let mut delta0 = state.delta0.clone();
    for (d0, d1) in delta0.iter_mut().zip(&state.delta1) {
        *d0 += a * d1;
    }
    Ok(DecimationState {
        eps1: Complex64::new(f64::NAN, f64::NAN),
        eps0: state.eps0 + state.tp * state.tm * inv,
        tp: zero(),
        tm: zero(),
        delta0,
        delta1: vec![zero(); state.delta1.len()],
        n: state.n + 1,
    })
}

/// Fully decimates a finite chain, keeping the explicit source vectors.
/// Costs `O(N^2)`; [`surface_gf_finite`] gives the same row in `O(N)`.
pub fn decimate_chain(d: &DynamicalMatrix, omega: Complex64) -> Result<DecimationState> {
    let n = d.n_sites();
    let mut state = DecimationState::from_matrix(d)?;
    for m in 0..n - 2 {
        let next = NextSite {
            eps: d.diagonal()[m + 2],
            t_plus: d.upper()[m + 1],
            t_minus: d.lower()[m + 1],
        };
        state = decimate_step(&state, omega, next)?;
    }
    decimate_last(&state, omega)
}

/// Renormalised `eps1` after each of `n_max` steps on a semi-infinite homogeneous chain.
/// Element `n` of the result is `eps1` after `n` steps.
pub fn eps1_series(
    couplings: &EffectiveCouplings,
    omega: Complex64,
    n_max: usize,
) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut eps1 = couplings.eps_tilde;
    let alpha = couplings.alpha();
    out.push(eps1);
    for step in 0..n_max {
        let den = omega - eps1;
        if is_pole(den, omega) {
            return Err(Error::DecimationPole { step, omega });
        }
        eps1 = couplings.eps_tilde + alpha / den;
        out.push(eps1);
    }
    Ok(out)
}

/// Roots `lambda_pm = (w +- sqrt(w^2 - 4 alpha)) / alpha` with `w = omega - eps~`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaPair {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
}

impl LambdaPair {
    /// `None` when `alpha = 0`.
    pub fn new(couplings: &EffectiveCouplings, omega: Complex64) -> Option<Self> {
        let alpha = couplings.alpha();
        if alpha == zero() {
            return None;
        }
        let w = omega - couplings.eps_tilde;
        let disc = (w * w - 4.0 * alpha).sqrt();
        Some(Self {
            lambda_plus: (w + disc) / alpha,
            lambda_minus: (w - disc) / alpha,
        })
    }
}

/// Relative root separation below which the degenerate limit is used.
pub const LAMBDA_DEGENERACY: f64 = 1e-8;

/// Closed-form `eps1` after `n` decimation steps of a homogeneous chain.
pub fn eps1_closed_form(couplings: &EffectiveCouplings, omega: Complex64, n: usize) -> Complex64 {
    let eps = couplings.eps_tilde;
    let Some(pair) = LambdaPair::new(couplings, omega) else {
        return eps;
    };
    let alpha = couplings.alpha();
    let w = omega - eps;
    let (big, small) = if pair.lambda_plus.norm() >= pair.lambda_minus.norm() {
        (pair.lambda_plus, pair.lambda_minus)
    } else {
        (pair.lambda_minus, pair.lambda_plus)
    };
    if (big - small).norm() < LAMBDA_DEGENERACY * big.norm() {
        let n = n as f64;
        return eps + 2.0 * n * alpha / ((n + 1.0) * w);
    }
    let r = small / big;
    let rn = r.powu(n as u32);
    ((eps * big + 2.0) - (eps * small + 2.0) * rn) / (big * (1.0 - rn * r))
}

/// Semi-infinite limit of `eps1`: the root of `(x - eps~)(omega - x) = alpha`
/// with `|alpha / (omega - x)^2| < 1`, which is the attracting fixed point
/// of the recurrence and tends to `eps~` as `|omega|` grows.
pub fn eps1_semi_infinite(couplings: &EffectiveCouplings, omega: Complex64) -> Complex64 {
    let g = crate::decim2::solve_surface_gf(couplings, omega).value;
    couplings.eps_tilde + couplings.alpha() * g
}

/// Row 0 of the resolvent of a finite chain, `G_{0,j}` for `j in 0..N`, in `O(N)`.
pub fn surface_gf_finite(d: &DynamicalMatrix, omega: Complex64) -> Result<Vec<Complex64>> {
    let n = d.n_sites();
    if n == 1 {
        let den = omega - d.diagonal()[0];
        if is_pole(den, omega) {
            return Err(Error::DecimationPole { step: 0, omega });
        }
        return Ok(vec![1.0 / den]);
    }
    let diag = d.diagonal();
    let up = d.upper();
    let lo = d.lower();
    let steps = n - 1;
    let mut a = Vec::with_capacity(steps);
    let mut c = Vec::with_capacity(steps);
    let mut eps0 = diag[0];
    let mut eps1 = diag[1];
    let mut tp = up[0];
    let mut tm = lo[0];
    for m in 0..steps {
        let den = omega - eps1;
        if is_pole(den, omega) {
            return Err(Error::DecimationPole { step: m, omega });
        }
        let inv = 1.0 / den;
        a.push(tp * inv);
        eps0 += tp * tm * inv;
        if m + 2 < n {
            c.push(lo[m + 1] * inv);
            eps1 = diag[m + 2] + lo[m + 1] * up[m + 1] * inv;
            tp *= up[m + 1] * inv;
            tm *= lo[m + 1] * inv;
        }
    }
    let den = omega - eps0;
    if is_pole(den, omega) {
        return Err(Error::DecimationPole { step: steps, omega });
    }
    let g00 = 1.0 / den;
    let mut row = vec![zero(); n];
    row[0] = g00;
    let mut s = zero();
    for m in (0..steps).rev() {
        s = if m + 1 < steps { a[m] + c[m] * s } else { a[m] };
        row[m + 1] = s * g00;
    }
    Ok(row)
}

/// Whole resolvent from its first row, by solving each row equation for the next row.
/// Needs every upper-diagonal hopping to be nonzero.
pub fn recover_rows(
    g0: &[Complex64],
    d: &DynamicalMatrix,
    omega: Complex64,
) -> Result<Vec<Vec<Complex64>>> {
    let n = d.n_sites();
    if g0.len() != n {
        return Err(Error::InvalidParameter(format!(
            "row has length {} but the chain has {n} sites",
            g0.len()
        )));
    }
    let floor = 1e-12 * d.inf_norm();
    if d.upper().iter().any(|t| t.norm() <= floor) {
        return Err(Error::UnidirectionalRecovery);
    }
    let mut rows = vec![g0.to_vec()];
    for i in 0..n - 1 {
        let w = omega - d.diagonal()[i];
        let next = (0..n)
            .map(|j| {
                let mut v = w * rows[i][j];
                if i == j {
                    v -= one();
                }
                if i > 0 {
                    v -= d.lower()[i - 1] * rows[i - 1][j];
                }
                v / d.upper()[i]
            })
            .collect();
        rows.push(next);
    }
    Ok(rows)
}

/// The chain read from its far end.
pub fn mirror(d: &DynamicalMatrix) -> DynamicalMatrix {
    let rev = |v: &[Complex64]| v.iter().rev().copied().collect::<Vec<_>>();
    DynamicalMatrix::new(rev(d.diagonal()), rev(d.lower()), rev(d.upper()))
        .expect("mirroring preserves shape")
}

/// Whole resolvent by decimating from the far end and recovering rows towards site 0.
/// This is the direction to use when the upper hoppings vanish.
pub fn recover_rows_backward(d: &DynamicalMatrix, omega: Complex64) -> Result<Vec<Vec<Complex64>>> {
    let n = d.n_sites();
    let m = mirror(d);
    let row = surface_gf_finite(&m, omega)?;
    let mirrored = recover_rows(&row, &m, omega)?;
    Ok((0..n)
        .map(|i| (0..n).map(|j| mirrored[n - 1 - i][n - 1 - j]).collect())
        .collect())
}
