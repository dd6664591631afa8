//! Chain parameters, effective couplings and the tridiagonal dynamical matrix.
//!
//! The first moments of a quadratic bosonic chain obey `d<a>/dt = -i D <a>`.
//! For nearest-neighbour hopping, loss and gain `D` is tridiagonal with
//!
//! ```text
//! D[j][j]   = eps~ = epsilon - i (gamma - P) / 2
//! D[j][j+1] = t+   = t_c e^{-i phi} - i (gamma_nn - P_nn) / 2
//! D[j+1][j] = t-   = t_c e^{+i phi} - i (gamma_nn - P_nn) / 2
//! ```
//!
//! The hopping phases follow from `H = sum t_{i,j} a_i^dag a_j` with
//! `t_{j+1,j} = t_c e^{i phi}`. The Bloch symbol of this matrix is
//! `eps~ + t+ e^{ik} + t- e^{-ik}`, which for the Hatano-Nelson choice
//! `P_nn = P/2` equals `epsilon - i gamma/2 + i P cos^2(k/2) + 2 t_c cos(k - phi)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Physical parameters of one homogeneous chain, in absolute units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub epsilon: f64,
    pub t_c: f64,
    pub phi: f64,
    pub gamma: f64,
    pub pump: f64,
    #[serde(default)]
    pub gamma_nn: f64,
    #[serde(default)]
    pub pump_nn: f64,
}

impl ChainParams {
    /// Coupled-cavity array with local loss and gain only.
    pub fn coupled_cavity(epsilon: f64, t_c: f64, gamma: f64, pump: f64) -> Self {
        Self {
            epsilon,
            t_c,
            phi: 0.0,
            gamma,
            pump,
            gamma_nn: 0.0,
            pump_nn: 0.0,
        }
    }

    /// Standard Hatano-Nelson chain: `gamma_nn = 0`, `P_nn = P / 2`.
    pub fn hatano_nelson(epsilon: f64, t_c: f64, phi: f64, gamma: f64, pump: f64) -> Self {
        Self {
            epsilon,
            t_c,
            phi,
            gamma,
            pump,
            gamma_nn: 0.0,
            pump_nn: pump / 2.0,
        }
    }

    /// Net local loss rate `Gamma = gamma - P`.
    pub fn net_loss(&self) -> f64 {
        self.gamma - self.pump
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("epsilon", self.epsilon),
            ("t_c", self.t_c),
            ("phi", self.phi),
            ("gamma", self.gamma),
            ("pump", self.pump),
            ("gamma_nn", self.gamma_nn),
            ("pump_nn", self.pump_nn),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} is not finite")));
        }
        let rates = [
            ("t_c", self.t_c),
            ("gamma", self.gamma),
            ("pump", self.pump),
            ("gamma_nn", self.gamma_nn),
            ("pump_nn", self.pump_nn),
        ];
        if let Some((name, v)) = rates.iter().find(|(_, v)| *v < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be nonnegative, got {v}"
            )));
        }
        Ok(())
    }

    /// Multiplies every energy and rate by `scale` (used to convert from units of `t_c`).
    pub fn scaled(&self, scale: f64) -> Self {
        Self {
            epsilon: self.epsilon * scale,
            t_c: self.t_c * scale,
            phi: self.phi,
            gamma: self.gamma * scale,
            pump: self.pump * scale,
            gamma_nn: self.gamma_nn * scale,
            pump_nn: self.pump_nn * scale,
        }
    }
}

/// JSON form of [`ChainParams`]. With `"units": "t_c"` every energy and rate
/// is read as a multiple of `t_c`, and `t_c` itself sets the absolute scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainParamsFile {
    #[serde(flatten)]
    pub params: ChainParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
}

impl ChainParamsFile {
    pub fn into_params(self) -> Result<ChainParams> {
        let params = match self.units.as_deref() {
            None | Some("absolute") => self.params,
            Some("t_c") => {
                let t_c = self.params.t_c;
                let mut p = self.params.scaled(t_c);
                p.t_c = t_c;
                p
            }
            Some(other) => {
                return Err(Error::InvalidParameter(format!("unknown units {other:?}")))
            }
        };
        params.validate()?;
        Ok(params)
    }
}

/// Effective on-site energy and directional hoppings of a homogeneous chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCouplings {
    pub eps_tilde: Complex64,
    /// `D[j][j+1]`
    pub t_plus: Complex64,
    /// `D[j+1][j]`
    pub t_minus: Complex64,
}

impl EffectiveCouplings {
    pub fn new(eps_tilde: Complex64, t_plus: Complex64, t_minus: Complex64) -> Self {
        Self {
            eps_tilde,
            t_plus,
            t_minus,
        }
    }

    /// `alpha = t+ t-`.
    pub fn alpha(&self) -> Complex64 {
        self.t_plus * self.t_minus
    }

    /// Green's function of an isolated site, `1 / (omega - eps~)`.
    pub fn bare_gf(&self, omega: Complex64) -> Complex64 {
        1.0 / (omega - self.eps_tilde)
    }

    /// Bloch symbol `eps~ + t+ e^{ik} + t- e^{-ik}` of the infinite chain.
    pub fn bloch_symbol(&self, k: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, k);
        self.eps_tilde + self.t_plus * z + self.t_minus / z
    }

    /// Couplings of the chain read from the opposite end.
    pub fn mirrored(&self) -> Self {
        Self {
            eps_tilde: self.eps_tilde,
            t_plus: self.t_minus,
            t_minus: self.t_plus,
        }
    }
}

pub fn effective_couplings(params: &ChainParams) -> EffectiveCouplings {
    let eps_tilde = params.epsilon - I * (params.gamma - params.pump) / 2.0;
    let nn = -I * (params.gamma_nn - params.pump_nn) / 2.0;
    EffectiveCouplings {
        eps_tilde,
        t_plus: Complex64::from_polar(params.t_c, -params.phi) + nn,
        t_minus: Complex64::from_polar(params.t_c, params.phi) + nn,
    }
}

/// Complex tridiagonal dynamical matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalMatrix {
    diagonal: Vec<Complex64>,
    upper: Vec<Complex64>,
    lower: Vec<Complex64>,
}

impl DynamicalMatrix {
    pub fn new(diagonal: Vec<Complex64>, upper: Vec<Complex64>, lower: Vec<Complex64>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(Error::EmptyChain);
        }
        let n = diagonal.len();
        if upper.len() != n - 1 || lower.len() != n - 1 {
            return Err(Error::InvalidParameter(format!(
                "off-diagonals must have length {} (got {} and {})",
                n - 1,
                upper.len(),
                lower.len()
            )));
        }
        Ok(Self {
            diagonal,
            upper,
            lower,
        })
    }

    pub fn homogeneous(couplings: &EffectiveCouplings, n_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::EmptyChain);
        }
        Ok(Self {
            diagonal: vec![couplings.eps_tilde; n_sites],
            upper: vec![couplings.t_plus; n_sites - 1],
            lower: vec![couplings.t_minus; n_sites - 1],
        })
    }

    pub fn n_sites(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[Complex64] {
        &self.diagonal
    }

    pub fn upper(&self) -> &[Complex64] {
        &self.upper
    }

    pub fn lower(&self) -> &[Complex64] {
        &self.lower
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.n_sites();
        let mut m = DMatrix::zeros(n, n);
        for (j, &d) in self.diagonal.iter().enumerate() {
            m[(j, j)] = d;
        }
        for j in 0..n - 1 {
            m[(j, j + 1)] = self.upper[j];
            m[(j + 1, j)] = self.lower[j];
        }
        m
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n_sites())
            .map(|j| {
                let mut s = self.diagonal[j].norm();
                if j > 0 {
                    s += self.lower[j - 1].norm();
                }
                if j + 1 < self.n_sites() {
                    s += self.upper[j].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// Gershgorin discs `(center, radius)`, one per row.
    pub fn gershgorin_discs(&self) -> Vec<(Complex64, f64)> {
        let n = self.n_sites();
        (0..n)
            .map(|j| {
                let mut r = 0.0;
                if j > 0 {
                    r += self.lower[j - 1].norm();
                }
                if j + 1 < n {
                    r += self.upper[j].norm();
                }
                (self.diagonal[j], r)
            })
            .collect()
    }
}

pub fn build_dynamical_matrix(params: &ChainParams, n_sites: usize) -> Result<DynamicalMatrix> {
    params.validate()?;
    DynamicalMatrix::homogeneous(&effective_couplings(params), n_sites)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub eigenvalues: Vec<Complex64>,
    pub max_imag_eigenvalue: f64,
    pub tolerance: f64,
    pub stable: bool,
}

/// Relative tolerance on `max Im(lambda) <= 0`, scaled by `||D||_inf`.
pub const STABILITY_RTOL: f64 = 1e-9;

pub fn eigenvalues(d: &DynamicalMatrix) -> Result<Vec<Complex64>> {
    let n = d.n_sites();
    if n == 1 {
        return Ok(vec![d.diagonal[0]]);
    }
    // The spectrum depends only on the diagonal and the products of paired
    // hoppings, so solve the complex-symmetric twin. The open chain can be
    // exponentially non-normal, which ruins eigenvalues of the raw matrix.
    let mut m = DMatrix::from_diagonal(&DVector::from_column_slice(&d.diagonal));
    for j in 0..n - 1 {
        let s = (d.upper[j] * d.lower[j]).sqrt();
        m[(j, j + 1)] = s;
        m[(j + 1, j)] = s;
    }
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000 * n)
        .ok_or(Error::EigenNonConvergence { size: n })?;
    let ev = schur
        .eigenvalues()
        .ok_or(Error::EigenNonConvergence { size: n })?;
    Ok(ev.iter().copied().collect())
}

pub fn stability_report(d: &DynamicalMatrix) -> Result<StabilityReport> {
    let eigenvalues = eigenvalues(d)?;
    let max_imag_eigenvalue = eigenvalues
        .iter()
        .map(|z| z.im)
        .fold(f64::NEG_INFINITY, f64::max);
    let tolerance = STABILITY_RTOL * d.inf_norm();
    Ok(StabilityReport {
        stable: max_imag_eigenvalue <= tolerance,
        eigenvalues,
        max_imag_eigenvalue,
        tolerance,
    })
}
