//! Spectral densities of the two effective baths: full closed forms (used
//! for validation and plotting) and the simplified limits that drive the
//! dynamics. All quantities dimensionless; see [`crate::params`].

use crate::params::Scales;
use crate::spectrum::Branch;
use serde::Serialize;

/// Full density-branch spectral density
/// `J_- = tau_tilde_minus * G^{3/2} / sqrt(F)` with
/// `F = 1 + (omega/Lambda_minus)^2`, `G = -1 + sqrt(F)`.
pub fn j_density_full(omega: f64, scales: &Scales) -> f64 {
    debug_assert!(omega >= 0.0);
    density_form(omega, scales.tau_tilde_minus, scales.lambda_minus)
}

/// The density functional form with explicit prefactor and cutoff scale;
/// shared by the spin branch in the Omega = 0 limit.
pub fn density_form(omega: f64, tau_tilde: f64, lambda: f64) -> f64 {
    let f = 1.0 + (omega / lambda).powi(2);
    let g = -1.0 + f.sqrt();
    tau_tilde * g.powf(1.5) / f.sqrt()
}

/// Low-frequency (omega << Lambda_minus) cubic density form
/// `J_- = tau_minus * omega^3`.
pub fn j_density_cubic(omega: f64, scales: &Scales) -> f64 {
    scales.tau_minus * omega.powi(3)
}

/// Full spin-branch spectral density `J_+ = tau_tilde_plus * G_+ / sqrt(F_+)`
/// with
/// `F_+ = 1 + (omega/Lambda_plus)^2`,
/// `s   = sqrt(1 + (E_gap/Lambda_plus)^2)`,
/// `W   = -1/2 + sqrt(F_+) - s/2`,
/// `G_+ = W [W + 1/2 - s/2]^{1/2}`.
///
/// Below the gap the bracket turns negative; the physical reading is zero
/// weight, so 0 is returned rather than an error. At `Lambda_plus = 0`
/// (g = g12) the printed form is 0/0; the analytic limit
/// `tau_tilde_minus/sqrt(Lambda_minus) * (2 omega - E) sqrt(omega - E) / (2 omega)`
/// is used instead.
pub fn j_spin_full(omega: f64, scales: &Scales) -> f64 {
    let e = scales.e_gap;
    if omega <= e {
        return 0.0;
    }
    let lp = scales.lambda_plus;
    if lp <= 0.0 {
        // Lambda_plus -> 0 limit of the closed form.
        let c = scales.tau_tilde_minus / scales.lambda_minus.sqrt();
        return c * (2.0 * omega - e) * (omega - e).sqrt() / (2.0 * omega);
    }
    let tau = scales
        .tau_tilde_plus
        .expect("lambda_plus > 0 implies tau_tilde_plus is real");
    let f = 1.0 + (omega / lp).powi(2);
    let s = (1.0 + (e / lp).powi(2)).sqrt();
    let w = -0.5 + f.sqrt() - 0.5 * s;
    let bracket = w + 0.5 - 0.5 * s;
    if bracket <= 0.0 {
        return 0.0;
    }
    tau * w * bracket.sqrt() / f.sqrt()
}

/// Near-gap expansion coefficient of [`j_spin_full`]:
/// `J_+(E_gap + eps) ~ coeff * sqrt(eps)` for eps -> 0.
pub fn near_gap_coefficient(scales: &Scales) -> f64 {
    let e = scales.e_gap;
    let lp = scales.lambda_plus;
    if lp <= 0.0 {
        return 0.5 * scales.tau_tilde_minus / scales.lambda_minus.sqrt();
    }
    let s = (1.0 + (e / lp).powi(2)).sqrt();
    let tau = scales.tau_tilde_plus.unwrap();
    tau * (s - 1.0) * e.sqrt() / (2.0 * s.powf(1.5) * lp)
}

/// Simplified gapped sub-ohmic spin bath:
/// `J_+ = Theta(omega - E_gap) tau_plus sqrt(omega - E_gap)
///        Theta(Lambda + E_gap - omega)`.
/// Total function: zero outside the band [E_gap, E_gap + Lambda].
pub fn j_spin_gapped(omega: f64, scales: &Scales) -> f64 {
    let e = scales.e_gap;
    if omega < e || omega > e + scales.lambda_cut {
        return 0.0;
    }
    scales.tau_plus * (omega - e).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Form {
    Full,
    Simplified,
}

/// A branch bath: its spectral density and band support.
#[derive(Debug, Clone)]
pub struct BathSpec {
    pub branch: Branch,
    pub form: Form,
    /// [omega_lo, omega_hi]; the upper edge is the integration cutoff
    /// (Lambda_minus for the density branch, E_gap + Lambda for the spin
    /// branch).
    pub support: (f64, f64),
    pub scales: Scales,
}

impl BathSpec {
    pub fn new(branch: Branch, form: Form, scales: &Scales) -> Self {
        let support = match branch {
            Branch::Density => (0.0, scales.lambda_minus),
            Branch::Spin => (scales.e_gap, scales.e_gap + scales.lambda_cut),
        };
        BathSpec {
            branch,
            form,
            support,
            scales: scales.clone(),
        }
    }

    pub fn j(&self, omega: f64) -> f64 {
        match (self.branch, self.form) {
            (Branch::Density, Form::Full) => j_density_full(omega, &self.scales),
            (Branch::Density, Form::Simplified) => j_density_cubic(omega, &self.scales),
            (Branch::Spin, Form::Full) => j_spin_full(omega, &self.scales),
            (Branch::Spin, Form::Simplified) => j_spin_gapped(omega, &self.scales),
        }
    }
}
