//! Diffusive dynamics of an impurity in a coherently coupled two-component
//! 1D Bose-Einstein condensate.
//!
//! The crate models the impurity as a quantum Brownian particle coupled to
//! one of the two Bogoliubov branches of the condensate: the gapless density
//! mode, or the gapped spin mode. From the branch spectral density it builds
//! the memory (damping) and noise kernels of the generalized Langevin
//! equation, inverts the Laplace-domain Green functions numerically, and
//! integrates the mean-square displacement, exposing the local anomalous
//! exponent and the ballistic/subdiffusive regime structure.
//!
//! All dynamics run in dimensionless units (`hbar = m_I = 1`, frequencies in
//! units of `OMEGA_BAR = 1000*pi rad/s`); SI conversion lives entirely in
//! [`params`].

pub mod exec;
pub mod interp;
pub mod kernels;
pub mod laplace;
pub mod msd;
pub mod params;
pub mod quad;
pub mod sdensity;
pub mod specfun;
pub mod spectrum;
pub mod stability;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),
    #[error("validation: {0}")]
    Validation(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("dynamically unstable parameter set: {0}")]
    Unstable(String),
    #[error("special function failure in {context}: terms={terms}, est_error={est_error:.3e}")]
    SpecFun {
        context: String,
        terms: usize,
        est_error: f64,
    },
    #[error("quadrature failure in {context}: residual={residual:.3e}")]
    Quadrature { context: String, residual: f64 },
    #[error("convergence gate failed: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
