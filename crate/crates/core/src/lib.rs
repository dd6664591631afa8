//! Lattice Green's functions of driven-dissipative bosonic chains.
//!
//! Steady-state resolvents are computed by real-space decimation, either
//! for a finite chain ([`decim1`]) or directly in the semi-infinite limit
//! through the Dyson fixed point of the surface Green's function
//! ([`decim2`]). Time-domain dynamics follow from the exact inverse Laplace
//! transform of powers of the surface Green's function ([`transient`]).
//! Everything is validated against dense linear algebra in [`oracle`].

pub mod bench;
pub mod decim1;
pub mod decim2;
pub mod error;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod transient;

pub use error::{Error, Result};
pub use model::{
    build_dynamical_matrix, effective_couplings, stability_report, ChainParams, DynamicalMatrix,
    EffectiveCouplings, StabilityReport,
};

pub use num_complex::Complex64;
