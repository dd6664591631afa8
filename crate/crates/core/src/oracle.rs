//! Dense reference computations: full resolvent inversion and matrix
//! exponential propagation.
//!
//! Nothing here looks at the tridiagonal structure of `D`, so these results
//! are independent of the decimation code paths they are used to check.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::DynamicalMatrix;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Full `N x N` resolvent `(omega - D)^-1` by LU with partial pivoting.
pub fn dense_gf(d: &DynamicalMatrix, omega: Complex64) -> Result<DMatrix<Complex64>> {
    let n = d.n_sites();
    let a = DMatrix::from_diagonal_element(n, n, omega) - d.to_dense();
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let lu = a.lu();
    let u = lu.u();
    let min_pivot = (0..n).map(|k| u[(k, k)].norm()).fold(f64::INFINITY, f64::min);
    if min_pivot <= n as f64 * f64::EPSILON * scale {
        return Err(Error::Singular { omega });
    }
    let inv = lu.try_inverse().ok_or(Error::Singular { omega })?;
    if inv.iter().any(|z| !z.is_finite()) {
        return Err(Error::Singular { omega });
    }
    Ok(inv)
}

/// Resolvent of a strongly non-reciprocal chain. A diagonal similarity
/// `S D S^-1` makes the hoppings symmetric, which removes the exponential
/// spread in the entries of `D` that defeats plain LU. Needs every
/// `upper[j] * lower[j]` to be nonzero.
pub fn dense_gf_balanced(d: &DynamicalMatrix, omega: Complex64) -> Result<DMatrix<Complex64>> {
    let n = d.n_sites();
    let (upper, lower) = (d.upper(), d.lower());
    if upper.iter().chain(lower).any(|z| z.norm() == 0.0) {
        return Err(Error::InvalidParameter("balancing needs nonzero hoppings in both directions".into()));
    }
    // log-scale keeps s finite on long chains
    let mut log_s = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n - 1 {
        log_s[j + 1] = log_s[j] + 0.5 * (upper[j] / lower[j]).ln();
    }
    let mut sym = vec![Complex64::new(0.0, 0.0); n - 1];
    for j in 0..n - 1 {
        sym[j] = upper[j] * (log_s[j] - log_s[j + 1]).exp();
    }
    let balanced = DynamicalMatrix::new(d.diagonal().to_vec(), sym.clone(), sym)?;
    let g = dense_gf(&balanced, omega)?;
    let out = DMatrix::from_fn(n, n, |i, j| g[(i, j)] * (log_s[j] - log_s[i]).exp());
    if out.iter().any(|z| !z.is_finite()) {
        return Err(Error::Singular { omega });
    }
    Ok(out)
}

/// Two-point Green's function values on a real frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GfGrid {
    pub omega_grid: Vec<f64>,
    pub site_pairs: Vec<(usize, usize)>,
    /// `values[k][p]` is `G_{j,l}(omega_k + i eta)` for `site_pairs[p] = (j, l)`.
    pub values: Vec<Vec<Complex64>>,
}

pub(crate) fn check_increasing(grid: &[f64], what: &str) -> Result<()> {
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(format!("{what} contains non-finite values")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!("{what} must be strictly increasing")));
    }
    Ok(())
}

/// Evaluates `dense_gf` at `omega + i eta` for every grid point.
pub fn dense_gf_grid(
    d: &DynamicalMatrix,
    omega_grid: &[f64],
    eta: f64,
    site_pairs: &[(usize, usize)],
) -> Result<GfGrid> {
    check_increasing(omega_grid, "omega grid")?;
    let n = d.n_sites();
    if let Some(&(j, l)) = site_pairs.iter().find(|(j, l)| *j >= n || *l >= n) {
        return Err(Error::InvalidParameter(format!(
            "site pair ({j}, {l}) outside a chain of {n} sites"
        )));
    }
    let values = omega_grid
        .par_iter()
        .map(|&w| {
            let g = dense_gf(d, Complex64::new(w, eta))?;
            Ok(site_pairs.iter().map(|&(j, l)| g[(j, l)]).collect())
        })
        .collect::<Result<Vec<Vec<Complex64>>>>()?;
    Ok(GfGrid {
        omega_grid: omega_grid.to_vec(),
        site_pairs: site_pairs.to_vec(),
        values,
    })
}

/// Field amplitudes `<a_j(t)>` on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t_grid: Vec<f64>,
    /// `amplitudes[k][j]` is `<a_j(t_k)>`.
    pub amplitudes: Vec<Vec<Complex64>>,
    /// Time of the first non-finite amplitude, if propagation overflowed.
    /// The trajectory then holds only the times before it.
    pub overflow_at: Option<f64>,
}

impl Trajectory {
    pub fn site_series(&self, j: usize) -> Vec<Complex64> {
        self.amplitudes.iter().map(|row| row[j]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpmMethod {
    /// Eigendecomposition, falling back to scaling and squaring when the
    /// eigenvector matrix is badly conditioned.
    #[default]
    Auto,
    Eigen,
    ScalingSquaring,
}

/// Eigenvector condition number above which `Auto` switches method.
pub const EIGEN_COND_LIMIT: f64 = 1e8;

struct EigenSystem {
    values: Vec<Complex64>,
    vectors: DMatrix<Complex64>,
    inverse: DMatrix<Complex64>,
    cond: f64,
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn eigen_system(a: &DMatrix<Complex64>) -> Result<EigenSystem> {
    let n = a.nrows();
    let schur = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, 10_000 * n.max(1))
        .ok_or(Error::EigenNonConvergence { size: n })?;
    let (q, t) = schur.unpack();
    let tiny = f64::EPSILON * one_norm(&t).max(f64::MIN_POSITIVE);
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for m in i + 1..=k {
                s += t[(i, m)] * y[(m, k)];
            }
            let mut den = t[(i, i)] - lambda;
            if den.norm() < tiny {
                den = Complex64::new(tiny, 0.0);
            }
            y[(i, k)] = -s / den;
        }
    }
    let mut vectors = q * y;
    for mut col in vectors.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= Complex64::new(norm, 0.0);
        }
    }
    let inverse = vectors
        .clone()
        .try_inverse()
        .ok_or(Error::EigenNonConvergence { size: n })?;
    let cond = one_norm(&vectors) * one_norm(&inverse);
    Ok(EigenSystem {
        values: (0..n).map(|k| t[(k, k)]).collect(),
        vectors,
        inverse,
        cond: if cond.is_finite() { cond } else { f64::INFINITY },
    })
}

/// `exp(-i D t) seed` on every point of `t_grid`.
///
/// Unstable systems can overflow; propagation stops at the first non-finite
/// amplitude and the valid prefix is returned with `overflow_at` set.
pub fn propagate(
    d: &DynamicalMatrix,
    seed: &[Complex64],
    t_grid: &[f64],
    method: ExpmMethod,
) -> Result<Trajectory> {
    let n = d.n_sites();
    if seed.len() != n {
        return Err(Error::InvalidParameter(format!(
            "seed has length {} but the chain has {n} sites",
            seed.len()
        )));
    }
    check_increasing(t_grid, "time grid")?;
    if t_grid.first().is_some_and(|&t| t != 0.0) {
        return Err(Error::InvalidParameter("time grid must start at 0".into()));
    }
    let a = d.to_dense();
    let x0 = DVector::from_column_slice(seed);

    let eigen = match method {
        ExpmMethod::ScalingSquaring => None,
        ExpmMethod::Eigen => Some(eigen_system(&a)?),
        ExpmMethod::Auto => match eigen_system(&a) {
            Ok(sys) if sys.cond <= EIGEN_COND_LIMIT => Some(sys),
            _ => None,
        },
    };
    let coeffs = eigen.as_ref().map(|sys| &sys.inverse * &x0);

    let mut out = Trajectory {
        t_grid: Vec::with_capacity(t_grid.len()),
        amplitudes: Vec::with_capacity(t_grid.len()),
        overflow_at: None,
    };
    for &t in t_grid {
        let x = match (&eigen, &coeffs) {
            (Some(sys), Some(c)) => {
                let phased = DVector::from_iterator(
                    n,
                    sys.values
                        .iter()
                        .zip(c.iter())
                        .map(|(&lambda, &ck)| (-I * lambda * t).exp() * ck),
                );
                &sys.vectors * phased
            }
            _ => (a.map(|z| -I * z * t)).exp() * &x0,
        };
        if x.iter().any(|z| !z.is_finite()) {
            out.overflow_at = Some(t);
            break;
        }
        out.t_grid.push(t);
        out.amplitudes.push(x.iter().copied().collect());
    }
    Ok(out)
}
