//! In-gap pole search for the spin-branch Green function.
//!
//! A purely imaginary Green-function pole at a frequency inside the gap
//! would produce long-lived oscillations instead of diffusion. Such a pole
//! exists iff `omega^2 + Gamma(0) - Delta(omega) = 0` for some
//! `omega in (0, E_gap)`, where `Delta` is the bath self-energy. Below the
//! band the self-energy integral has no singularity, no principal value is
//! needed, and `Delta <= 0`, so the condition is expected to have no root;
//! the scan verifies rather than assumes this.


use crate::params::Scales;
use crate::spectrum::Branch;
use crate::{Error, Result};

/// Bath self-energy below the band,
/// `Delta(omega) = int J_+(w) / (omega - w) dw`
/// `= -2 tau_+ Lambda^{3/2} 2F1(1, 3/2; 5/2; -Lambda/(E_gap - omega))
///    / (3 (E_gap - omega))`.
///
/// That Gauss function reduces to elementary terms,
/// `Delta = -2 tau [sqrt(Lambda) - sqrt(d) atan(sqrt(Lambda/d))]` with
/// `d = E_gap - omega`, which is what gets evaluated here: the series form
/// loses its argument domain as `omega` approaches the gap edge
/// (`-Lambda/d -> -inf`) while the elementary form stays exact.
pub fn self_energy(omega: f64, scales: &Scales) -> Result<f64> {
    let e = scales.e_gap;
    let lam = scales.lambda_cut;
    let tau = scales.tau_plus;
    if tau == 0.0 {
        return Ok(0.0);
    }
    if !(omega > 0.0 && omega < e) {
        return Err(Error::Domain(format!(
            "self-energy closed form needs 0 < omega < E_gap = {e}, got {omega}"
        )));
    }
    let d = e - omega;
    Ok(-2.0 * tau * (lam.sqrt() - d.sqrt() * (lam / d).sqrt().atan()))
}

/// Direct quadrature of the same integral (oracle): with `w = E + u^2`,
/// `Delta(omega) = -2 tau int_0^sqrt(L) u^2/(u^2 + d) du
///              = -2 tau [sqrt(L) - sqrt(d) atan(sqrt(L/d))]`, `d = E - omega`.
pub fn self_energy_quad(omega: f64, scales: &Scales) -> Result<f64> {
    let e = scales.e_gap;
    let tau = scales.tau_plus;
    if tau == 0.0 {
        return Ok(0.0);
    }
    if !(omega > 0.0 && omega < e) {
        return Err(Error::Domain(format!(
            "self-energy quadrature needs 0 < omega < E_gap = {e}, got {omega}"
        )));
    }
    let d = e - omega;
    let (v, _) = crate::quad::integrate(
        |u| -2.0 * tau * u * u / (u * u + d),
        0.0,
        scales.lambda_cut.sqrt(),
        1e-12,
    )?;
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NoPole,
    PoleFound,
}

/// Result of scanning `omega^2 + Gamma(0) - Delta(omega)` across the gap.
#[derive(Debug, Clone)]
pub struct PoleScan {
    pub omega_grid: Vec<f64>,
    pub condition_values: Vec<f64>,
    /// Roots refined by bisection to 1e-8 relative.
    pub sign_changes: Vec<f64>,
    pub verdict: Verdict,
}

/// Scan with the physical condition: `Gamma(0)` from band quadrature (the
/// same convention as the self-energy band) and the closed-form `Delta`.
pub fn pole_scan(scales: &Scales, grid_size: usize) -> Result<PoleScan> {
    let gamma0 = crate::kernels::gamma0(Branch::Spin, scales)?.quadrature;
    let cond = |omega: f64| -> Result<f64> {
        Ok(omega * omega + gamma0 - self_energy(omega, scales)?)
    };
    pole_scan_with(scales, grid_size, &cond)
}

/// Scan an arbitrary condition function over (0, E_gap); exposed so tests
/// can inject a condition with a constructed root.
pub fn pole_scan_with(
    scales: &Scales,
    grid_size: usize,
    condition: &dyn Fn(f64) -> Result<f64>,
) -> Result<PoleScan> {
    let e = scales.e_gap;
    if !(e > 0.0) {
        return Err(Error::Validation(format!(
            "pole scan needs E_gap > 0, got {e}"
        )));
    }
    if grid_size < 2 {
        return Err(Error::Validation("pole scan needs grid_size >= 2".into()));
    }
    // strictly inside (0, E_gap)
    let n = grid_size;
    let omega_grid: Vec<f64> = (1..=n).map(|i| e * i as f64 / (n + 1) as f64).collect();
    let mut condition_values = Vec::with_capacity(n);
    for &w in &omega_grid {
        let v = condition(w)?;
        if !v.is_finite() {
            return Err(Error::Convergence(format!(
                "pole condition not finite at omega = {w}"
            )));
        }
        condition_values.push(v);
    }
    let mut sign_changes = Vec::new();
    for i in 0..n - 1 {
        let (a, b) = (omega_grid[i], omega_grid[i + 1]);
        let (fa, fb) = (condition_values[i], condition_values[i + 1]);
        if fa == 0.0 {
            sign_changes.push(a);
            continue;
        }
        if fa * fb < 0.0 {
            sign_changes.push(bisect(condition, a, b, fa)?);
        }
    }
    let verdict = if sign_changes.is_empty() {
        Verdict::NoPole
    } else {
        Verdict::PoleFound
    };
    Ok(PoleScan {
        omega_grid,
        condition_values,
        sign_changes,
        verdict,
    })
}

fn bisect(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a) <= 1e-8 * m.abs().max(1e-300) {
            return Ok(m);
        }
        let fm = f(m)?;
        if fa * fm <= 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}
