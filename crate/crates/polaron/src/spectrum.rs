//! Bogoliubov dispersions of the two-component condensate: the general
//! two-branch formula, the symmetric simplified forms used for dynamics,
//! their closed-form inverses, the Bogoliubov amplitudes, and ground-state
//! classification.
//!
//! Wavenumbers are dimensionless with boson kinetic energy `eps_k = k^2`
//! (see [`crate::params`]); all energies are returned as dimensionless
//! angular frequencies.

use crate::params::{PhysicalConfig, Scales, HBAR};
use crate::{Error, Result};
use serde::Serialize;

/// The two Bogoliubov branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// Gapless total-density branch (-).
    Density,
    /// Gapped relative-density (spin) branch (+).
    Spin,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::Density => write!(f, "density"),
            Branch::Spin => write!(f, "spin"),
        }
    }
}

/// Inputs to the general two-branch dispersion, already reduced to the
/// combinations that enter the +/- formula. All entries dimensionless.
///
/// `omega_j^2 = e_j^2 + 2*(Lambda_j n_j)*e_j` per component j in {1, 2}.
#[derive(Debug, Clone)]
pub struct GeneralSpectrumInput {
    /// Single-particle energies e_{1,k}, e_{2,k}.
    pub e_1k: f64,
    pub e_2k: f64,
    /// Interaction combinations Lambda_1 n_1, Lambda_2 n_2.
    pub lambda1_n1: f64,
    pub lambda2_n2: f64,
    /// Cross term Lambda_12 sqrt(n_1 n_2).
    pub lambda12_sqrt: f64,
    /// Component densities (n_1 + n_2 = n).
    pub n1: f64,
    pub n2: f64,
    /// Mixing angle from the energy minimization.
    pub theta: f64,
}

impl GeneralSpectrumInput {
    /// Build the input for the symmetric pi-state configuration
    /// (g1 = g2, theta12 = pi, balanced densities, theta = pi/4), which is
    /// the regime the closed-form spectra cover. In this limit the cross
    /// term vanishes and e_{1,k} picks up the Rabi shift 2*Omega.
    pub fn symmetric(k: f64, scales: &Scales) -> Self {
        let eps = k * k;
        GeneralSpectrumInput {
            e_1k: eps + 2.0 * scales.omega,
            e_2k: eps,
            lambda1_n1: scales.lambda_plus,
            lambda2_n2: scales.lambda_minus,
            lambda12_sqrt: 0.0,
            n1: 0.5,
            n2: 0.5,
            theta: std::f64::consts::FRAC_PI_4,
        }
    }
}

/// General two-branch dispersion:
/// `E_pm^2 = [omega_1^2 + omega_2^2 +/- sqrt((omega_1^2-omega_2^2)^2 +
/// 16 (Lambda_12 sqrt(n1 n2))^2 e_1 e_2)] / 2`.
/// Returns `(e_plus, e_minus)`.
pub fn dispersion_general(inp: &GeneralSpectrumInput) -> Result<(f64, f64)> {
    let w1_sq = inp.e_1k * inp.e_1k + 2.0 * inp.lambda1_n1 * inp.e_1k;
    let w2_sq = inp.e_2k * inp.e_2k + 2.0 * inp.lambda2_n2 * inp.e_2k;
    if w1_sq < 0.0 || w2_sq < 0.0 {
        return Err(Error::Unstable(format!(
            "negative single-branch radicand: omega1^2={w1_sq:.3e}, omega2^2={w2_sq:.3e}"
        )));
    }
    let cross = 16.0 * inp.lambda12_sqrt.powi(2) * inp.e_1k * inp.e_2k;
    // with no cross coupling the components do not hybridize, so each mode
    // keeps its component identity even where the curves cross
    if cross == 0.0 {
        return Ok((w1_sq.sqrt(), w2_sq.sqrt()));
    }
    let disc = (w1_sq - w2_sq).powi(2) + cross;
    if disc < 0.0 {
        return Err(Error::Unstable(format!(
            "negative discriminant {disc:.3e}"
        )));
    }
    let root = disc.sqrt();
    let plus_sq = 0.5 * (w1_sq + w2_sq + root);
    let minus_sq = 0.5 * (w1_sq + w2_sq - root);
    if minus_sq < -1e-12 * plus_sq.max(1.0) {
        return Err(Error::Unstable(format!(
            "E_minus^2 = {minus_sq:.3e} < 0"
        )));
    }
    Ok((plus_sq.sqrt(), minus_sq.max(0.0).sqrt()))
}

/// Simplified symmetric dispersions:
/// density `E- = sqrt(eps (eps + 2 Lambda_minus))`,
/// spin    `E+ = sqrt(eps (eps + 2 Lambda_plus + 4 Omega) + E_gap^2)`.
pub fn dispersion_symmetric(k: f64, branch: Branch, scales: &Scales) -> f64 {
    let eps = k * k;
    match branch {
        Branch::Density => (eps * (eps + 2.0 * scales.lambda_minus)).sqrt(),
        Branch::Spin => {
            (eps * (eps + 2.0 * scales.lambda_plus + 4.0 * scales.omega)
                + scales.e_gap * scales.e_gap)
                .sqrt()
        }
    }
}

/// Closed-form inverses of the symmetric dispersions.
pub fn inverse_dispersion(omega: f64, branch: Branch, scales: &Scales) -> Result<f64> {
    match branch {
        Branch::Density => {
            if omega < 0.0 {
                return Err(Error::Domain(format!("omega = {omega} < 0")));
            }
            let lm = scales.lambda_minus;
            let eps = -lm + (lm * lm + omega * omega).sqrt();
            Ok(eps.max(0.0).sqrt())
        }
        Branch::Spin => {
            if omega < scales.e_gap {
                return Err(Error::Domain(format!(
                    "omega = {omega} inside the gap (E_gap = {})",
                    scales.e_gap
                )));
            }
            let b = scales.lambda_plus + 2.0 * scales.omega;
            let eps = -b + (b * b + omega * omega - scales.e_gap * scales.e_gap).sqrt();
            Ok(eps.max(0.0).sqrt())
        }
    }
}

/// Bogoliubov wave functions (f, f_tilde) for k != 0.
pub fn bogoliubov_amplitudes(k: f64, branch: Branch, scales: &Scales) -> Result<(f64, f64)> {
    if k == 0.0 {
        return Err(Error::Domain(
            "k = 0 excluded (condensate mode)".into(),
        ));
    }
    let eps = k * k;
    let e = dispersion_symmetric(k, branch, scales);
    match branch {
        Branch::Density => Ok(((eps / (2.0 * e)).sqrt(), (e / (2.0 * eps)).sqrt())),
        Branch::Spin => {
            let shifted = eps + scales.omega;
            Ok(((shifted / (2.0 * e)).sqrt(), (e / (2.0 * shifted)).sqrt()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GroundState {
    /// Balanced, neutral state (n1 = n2); the only state with supported
    /// dynamics.
    Gs1,
    /// Polarized state; classification only.
    Gs2,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroundStateReport {
    pub state: GroundState,
    pub n1: f64,
    pub n2: f64,
    pub tan_theta: f64,
    /// n1 - n2 (1/m).
    pub imbalance: f64,
    pub supported_for_dynamics: bool,
}

/// Classify the condensate ground state: GS1 (balanced) when |A| < 1 or the
/// polarized imbalance root is imaginary, GS2 otherwise.
pub fn ground_state(cfg: &PhysicalConfig) -> GroundStateReport {
    let g = 0.5 * (cfg.g1 + cfg.g2);
    let denom = (g - cfg.g12) * cfg.n;
    // GS2 imbalance: n1 - n2 = +/- n sqrt(1 - (2 hbar Omega / ((g-g12) n))^2)
    let ratio = if denom != 0.0 {
        2.0 * HBAR * cfg.omega / denom
    } else {
        f64::INFINITY
    };
    let radicand = 1.0 - ratio * ratio;
    let miscible = cfg.omega > 0.0
        && ((cfg.g1 + cfg.g2 - 2.0 * cfg.g12) * cfg.n / (4.0 * HBAR * cfg.omega)).abs() < 1.0;
    if miscible || radicand <= 0.0 {
        let n1 = 0.5 * cfg.n;
        GroundStateReport {
            state: GroundState::Gs1,
            n1,
            n2: n1,
            tan_theta: 1.0,
            imbalance: 0.0,
            supported_for_dynamics: true,
        }
    } else {
        let imbalance = cfg.n * radicand.sqrt();
        let n1 = 0.5 * (cfg.n + imbalance);
        let n2 = 0.5 * (cfg.n - imbalance);
        GroundStateReport {
            state: GroundState::Gs2,
            n1,
            n2,
            tan_theta: (n1 / n2).sqrt(),
            imbalance,
            supported_for_dynamics: false,
        }
    }
}
