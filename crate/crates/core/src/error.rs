use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("a chain needs at least one site")]
    EmptyChain,

    #[error("omega - D is singular at omega = {omega}")]
    Singular { omega: Complex64 },

    #[error("decimation step {step} hit a pole at omega = {omega}")]
    DecimationPole { step: usize, omega: Complex64 },

    #[error("eigenvalue solver did not converge for an {size}x{size} matrix")]
    EigenNonConvergence { size: usize },

    #[error("forward row recovery needs t+ != 0; the chain is unidirectional")]
    UnidirectionalRecovery,

    #[error("bessel J_{order}({z}) is outside the supported domain")]
    BesselDomain { order: usize, z: Complex64 },

    #[error("gap closing at omega = {omega}: a pole sits on the unit circle")]
    GapClosing { omega: f64 },

    #[error("negative density of states {value} (branch selection error)")]
    NegativeDos { value: f64 },

    #[error("added-noise sum does not converge: Re xi+ = {re_xi} >= 0")]
    NoiseSumDiverges { re_xi: f64 },
}
