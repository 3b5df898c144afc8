//! Physical inputs, validation gates, derived scales, and the dimensionless
//! unit system used by every downstream module.
//!
//! Internal units: `hbar = m_I = 1`, frequency unit [`OMEGA_BAR`] = 1000*pi
//! rad/s, length unit `l = sqrt(hbar/(m_I*OMEGA_BAR))`. Wavenumbers are
//! expressed so that the boson kinetic energy is `eps_k = k^2` (i.e. `k` in
//! units of `sqrt(2 m_B OMEGA_BAR / hbar)`).

use crate::{Error, Result};
use serde::Serialize;

/// Reduced Planck constant, J*s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const KB: f64 = 1.380_649e-23;
/// Rb-87 atomic mass, kg (default bath species; standard table value, not
/// fitted data).
pub const M_RB87: f64 = 1.4432e-25;
/// K-41 atomic mass, kg (default impurity species).
pub const M_K41: f64 = 6.8014e-26;
/// Frequency unit of the dimensionless system, rad/s.
pub const OMEGA_BAR: f64 = 1000.0 * std::f64::consts::PI;

/// Sign relation between the impurity couplings to the two condensate
/// components. `SameSign` couples the impurity to the density (-) branch,
/// `OppositeSign` to the spin (+) branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CouplingScenario {
    SameSign,
    OppositeSign,
}

/// All microscopic inputs in SI units.
#[derive(Debug, Clone, Serialize)]
pub struct PhysicalConfig {
    /// Bath boson mass, kg.
    pub m_b: f64,
    /// Impurity mass, kg.
    pub m_i: f64,
    /// Intra-species couplings, J*m (1D). The symmetric case g1 = g2 is
    /// required; asymmetric inputs fail validation.
    pub g1: f64,
    pub g2: f64,
    /// Inter-species coupling, J*m; repulsive (> 0) only.
    pub g12: f64,
    /// Impurity-boson coupling magnitude, J*m.
    pub g_ib: f64,
    pub coupling_scenario: CouplingScenario,
    /// Linear density, 1/m.
    pub n: f64,
    /// Rabi frequency, rad/s, >= 0.
    pub omega: f64,
    /// Temperature, K, >= 0.
    pub temperature: f64,
    /// Relative condensate phase, rad; fixed to pi.
    pub theta12: f64,
    /// Detuning; fixed to 0.
    pub delta: f64,
    /// Hard cutoff frequency, rad/s (band width of the spin bath).
    pub lambda_cut: f64,
    /// Initial velocity variance <xdot^2(0)>, m^2/s^2.
    pub v0_sq: f64,
    /// Optional dimensionless tau_plus replacing the microscopic formula.
    pub tau_plus_override: Option<f64>,
}

impl Default for PhysicalConfig {
    /// Reference parameter set: g = g12 = 2.15e-37 J*m, n = 7e6 1/m,
    /// g_IB = 0.5e-37 J*m, Omega = 100*pi rad/s, Lambda = 10*OMEGA_BAR,
    /// spin-branch coupling, tau_plus pinned to 1, zero temperature.
    fn default() -> Self {
        PhysicalConfig {
            m_b: M_RB87,
            m_i: M_K41,
            g1: 2.15e-37,
            g2: 2.15e-37,
            g12: 2.15e-37,
            g_ib: 0.5e-37,
            coupling_scenario: CouplingScenario::OppositeSign,
            n: 7e6,
            omega: 100.0 * std::f64::consts::PI,
            temperature: 0.0,
            theta12: std::f64::consts::PI,
            delta: 0.0,
            lambda_cut: 10.0 * OMEGA_BAR,
            v0_sq: 0.0,
            tau_plus_override: Some(1.0),
        }
    }
}

impl PhysicalConfig {
    /// Parse a flat `key = value` UTF-8 config. Lines starting with `#` and
    /// blank lines are ignored. Unknown or duplicate keys are hard errors,
    /// as are non-finite numbers.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut cfg = PhysicalConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got {raw:?}", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("duplicate key {key:?}")));
            }
            let num = |v: &str| -> Result<f64> {
                let x: f64 = v
                    .parse()
                    .map_err(|_| Error::Config(format!("key {key:?}: bad number {v:?}")))?;
                if !x.is_finite() {
                    return Err(Error::Config(format!("key {key:?}: non-finite value")));
                }
                Ok(x)
            };
            match key {
                "m_B" => cfg.m_b = num(value)?,
                "m_I" => cfg.m_i = num(value)?,
                "g1" => cfg.g1 = num(value)?,
                "g2" => cfg.g2 = num(value)?,
                "g12" => cfg.g12 = num(value)?,
                "g_IB" => cfg.g_ib = num(value)?,
                "coupling_scenario" => {
                    cfg.coupling_scenario = match value {
                        "same_sign" => CouplingScenario::SameSign,
                        "opposite_sign" => CouplingScenario::OppositeSign,
                        other => {
                            return Err(Error::Config(format!(
                                "coupling_scenario: expected same_sign|opposite_sign, got {other:?}"
                            )))
                        }
                    }
                }
                "n" => cfg.n = num(value)?,
                "Omega" => cfg.omega = num(value)?,
                "T" => cfg.temperature = num(value)?,
                "theta12" => cfg.theta12 = num(value)?,
                "delta" => cfg.delta = num(value)?,
                "Lambda_cut" => cfg.lambda_cut = num(value)?,
                "v0_sq" => cfg.v0_sq = num(value)?,
                "tau_plus_override" => {
                    cfg.tau_plus_override = if value == "none" {
                        None
                    } else {
                        Some(num(value)?)
                    }
                }
                other => return Err(Error::Config(format!("unknown key {other:?}"))),
            }
        }
        cfg.check_finite()?;
        Ok(cfg)
    }

    fn check_finite(&self) -> Result<()> {
        let fields = [
            ("m_B", self.m_b),
            ("m_I", self.m_i),
            ("g1", self.g1),
            ("g2", self.g2),
            ("g12", self.g12),
            ("g_IB", self.g_ib),
            ("n", self.n),
            ("Omega", self.omega),
            ("T", self.temperature),
            ("theta12", self.theta12),
            ("delta", self.delta),
            ("Lambda_cut", self.lambda_cut),
            ("v0_sq", self.v0_sq),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::Config(format!("non-finite field {name}")));
            }
        }
        if let Some(t) = self.tau_plus_override {
            if !t.is_finite() {
                return Err(Error::Config("non-finite tau_plus_override".into()));
            }
        }
        if self.omega < 0.0 {
            return Err(Error::Config("Omega must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GateStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct Gate {
    pub name: &'static str,
    pub status: GateStatus,
    pub detail: String,
}

/// Outcome of [`validate`]: one entry per gate. A failed gate marks the
/// config unusable for the affected branch(es) but is not itself an error;
/// malformed inputs (non-finite, Omega < 0) error out instead.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub gates: Vec<Gate>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.gates.iter().all(|g| g.status != GateStatus::Fail)
    }

    /// Whether the config can drive dynamics on the given branch.
    pub fn usable_for(&self, branch: crate::spectrum::Branch) -> bool {
        use crate::spectrum::Branch;
        self.gates.iter().all(|g| {
            g.status != GateStatus::Fail
                || match branch {
                    // The density branch survives a broken miscibility or
                    // spin-coupling gate; everything else is fatal for both.
                    Branch::Density => g.name == "miscibility" || g.name == "spin_coupling_real",
                    Branch::Spin => false,
                }
        })
    }
}

/// Run the validity gates: miscibility |A| < 1 (A = (g1+g2-2*g12)n/(4*hbar*Omega)),
/// positivity of masses/density/cutoff, repulsive g12, the symmetric-case
/// requirement g1 = g2, the pi-state requirement (theta12 = pi, delta = 0),
/// and reality of the spin relaxation scale (g >= g12 for opposite-sign
/// coupling).
pub fn validate(cfg: &PhysicalConfig) -> Result<ValidationReport> {
    cfg.check_finite()?;
    let mut gates = Vec::new();
    fn gate(name: &'static str, ok: bool, detail: String) -> Gate {
        Gate {
            name,
            status: if ok { GateStatus::Pass } else { GateStatus::Fail },
            detail,
        }
    }

    gates.push(gate(
        "positivity",
        cfg.m_b > 0.0 && cfg.m_i > 0.0 && cfg.n > 0.0 && cfg.lambda_cut > 0.0,
        format!(
            "m_B={:.3e}, m_I={:.3e}, n={:.3e}, Lambda_cut={:.3e}",
            cfg.m_b, cfg.m_i, cfg.n, cfg.lambda_cut
        ),
    ));
    gates.push(gate(
        "repulsive_g12",
        cfg.g12 > 0.0,
        format!("g12={:.3e}", cfg.g12),
    ));
    gates.push(gate(
        "symmetric_couplings",
        (cfg.g1 - cfg.g2).abs() <= 1e-12 * cfg.g1.abs().max(cfg.g2.abs()),
        format!("g1={:.6e}, g2={:.6e}", cfg.g1, cfg.g2),
    ));
    gates.push(gate(
        "pi_state",
        (cfg.theta12 - std::f64::consts::PI).abs() < 1e-9 && cfg.delta == 0.0,
        format!("theta12={}, delta={}", cfg.theta12, cfg.delta),
    ));
    gates.push(gate(
        "non_negative_t_v0",
        cfg.temperature >= 0.0 && cfg.v0_sq >= 0.0,
        format!("T={}, v0_sq={}", cfg.temperature, cfg.v0_sq),
    ));
    // Miscibility |A| < 1 selects the balanced ground state GS1.
    if cfg.omega > 0.0 {
        let a = (cfg.g1 + cfg.g2 - 2.0 * cfg.g12) * cfg.n / (4.0 * HBAR * cfg.omega);
        gates.push(gate("miscibility", a.abs() < 1.0, format!("A={a:.6e}")));
    } else {
        gates.push(Gate {
            name: "miscibility",
            status: GateStatus::NotApplicable,
            detail: "Omega = 0: A undefined; density branch still usable".into(),
        });
    }
    let g = 0.5 * (cfg.g1 + cfg.g2);
    let spin_real = g >= cfg.g12;
    gates.push(gate(
        "spin_coupling_real",
        match cfg.coupling_scenario {
            CouplingScenario::OppositeSign => spin_real,
            CouplingScenario::SameSign => true,
        },
        format!("g={g:.6e}, g12={:.6e}", cfg.g12),
    ));

    Ok(ValidationReport { gates })
}

/// Every derived scale and prefactor, SI units unless noted.
#[derive(Debug, Clone, Serialize)]
pub struct DerivedScales {
    /// Reduced mass, kg.
    pub m_r: f64,
    /// Lambda_minus = n(g+g12)/(2*hbar), rad/s.
    pub lambda_minus: f64,
    /// Lambda_plus = n(g-g12)/(2*hbar), rad/s (sign preserved).
    pub lambda_plus: f64,
    /// Gap of the spin branch as an angular frequency, rad/s.
    pub e_gap: f64,
    /// Density-branch relaxation time, s.
    pub tau_minus: f64,
    /// Full-form density prefactor 2^{3/2} Lambda_minus^3 tau_minus, 1/s^2.
    pub tau_tilde_minus: f64,
    /// Spin-branch prefactor, s^{-3/2} (override applied if present).
    pub tau_plus: f64,
    /// Full-form spin prefactor tau_tilde_minus*sqrt(Lambda_plus/Lambda_minus);
    /// `None` when Lambda_plus < 0 (complex-valued, spin branch unusable).
    pub tau_tilde_plus: Option<f64>,
    /// Sound speed of the density branch, m/s.
    pub c_d: f64,
    /// Mutual interaction (miscibility) parameter; `None` for Omega = 0.
    pub a_misc: Option<f64>,
    /// Effective detuning (0 in the pi-state configuration).
    pub delta_detuning: f64,
}

/// Compute all derived scales.
///
/// `tau_minus` uses eta = g_IB/(g+g12) (the impurity-bath coupling measured
/// against the density-branch interaction). `tau_plus` follows the
/// near-symmetric (g ~ g12) microscopic form
/// (2 g_IB)^2 n m_B^{3/2} / (2^{1/2} pi m_I hbar^{5/2}),
/// which carries units of s^{-3/2}; the `tau_plus_override` knob replaces its
/// dimensionless value directly.
pub fn derive_scales(cfg: &PhysicalConfig) -> Result<DerivedScales> {
    cfg.check_finite()?;
    let g = 0.5 * (cfg.g1 + cfg.g2);
    let lambda_minus = cfg.n * (g + cfg.g12) / (2.0 * HBAR);
    let lambda_plus = cfg.n * (g - cfg.g12) / (2.0 * HBAR);
    if lambda_minus <= 0.0 {
        return Err(Error::Validation(format!(
            "Lambda_minus = {lambda_minus:.3e} must be positive"
        )));
    }
    // E_gap = sqrt(2 hbar Omega [(g-g12) n + 2 hbar Omega]) / hbar.
    let gap_sq = 2.0 * HBAR * cfg.omega * ((g - cfg.g12) * cfg.n + 2.0 * HBAR * cfg.omega);
    if gap_sq < 0.0 {
        return Err(Error::Unstable(format!(
            "negative gap radicand {gap_sq:.3e} (immiscible regime)"
        )));
    }
    let e_gap = gap_sq.sqrt() / HBAR;

    let eta = cfg.g_ib / (g + cfg.g12);
    let tau_minus = (2.0 * eta).powi(2) / (2.0 * std::f64::consts::PI * cfg.m_i)
        * cfg.m_b.powf(1.5)
        / (cfg.n.powf(1.5) * (g + cfg.g12).sqrt());
    let tau_tilde_minus = 2.0_f64.powf(1.5) * lambda_minus.powi(3) * tau_minus;

    let tau_plus_micro = (2.0 * cfg.g_ib).powi(2) * cfg.n * cfg.m_b.powf(1.5)
        / (2.0_f64.sqrt() * std::f64::consts::PI * cfg.m_i * HBAR.powf(2.5));
    let tau_plus = match cfg.tau_plus_override {
        Some(t) => t * OMEGA_BAR.powf(1.5),
        None => tau_plus_micro,
    };

    let tau_tilde_plus = if lambda_plus >= 0.0 {
        Some(tau_tilde_minus * (lambda_plus / lambda_minus).sqrt())
    } else {
        if cfg.coupling_scenario == CouplingScenario::OppositeSign {
            return Err(Error::Validation(
                "g < g12: tau_tilde_plus is imaginary (no real spin relaxation scale)".into(),
            ));
        }
        None
    };

    let c_d = (cfg.n * (g + cfg.g12) / (2.0 * cfg.m_b)).sqrt();
    let a_misc = if cfg.omega > 0.0 {
        Some((cfg.g1 + cfg.g2 - 2.0 * cfg.g12) * cfg.n / (4.0 * HBAR * cfg.omega))
    } else {
        None
    };

    Ok(DerivedScales {
        m_r: cfg.m_b * cfg.m_i / (cfg.m_b + cfg.m_i),
        lambda_minus,
        lambda_plus,
        e_gap,
        tau_minus,
        tau_tilde_minus,
        tau_plus,
        tau_tilde_plus,
        c_d,
        a_misc,
        delta_detuning: cfg.delta,
    })
}

/// The full config mapped into internal units; invertible to 1e-12 relative.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionlessConfig {
    /// m_B / m_I.
    pub m_b: f64,
    /// m_I / m_I = 1.
    pub m_i: f64,
    pub g1: f64,
    pub g2: f64,
    pub g12: f64,
    pub g_ib: f64,
    pub coupling_scenario: CouplingScenario,
    pub n: f64,
    pub omega: f64,
    pub temperature: f64,
    pub theta12: f64,
    pub delta: f64,
    pub lambda_cut: f64,
    pub v0_sq: f64,
    pub tau_plus_override: Option<f64>,
}

/// Length unit of the internal system, m.
fn length_unit(m_i: f64) -> f64 {
    (HBAR / (m_i * OMEGA_BAR)).sqrt()
}

/// Map SI inputs to internal units (hbar = m_I = 1, frequency OMEGA_BAR).
pub fn nondimensionalize(cfg: &PhysicalConfig) -> DimensionlessConfig {
    let l = length_unit(cfg.m_i);
    let e0 = HBAR * OMEGA_BAR; // energy unit
    let gu = e0 * l; // coupling unit, J*m
    DimensionlessConfig {
        m_b: cfg.m_b / cfg.m_i,
        m_i: 1.0,
        g1: cfg.g1 / gu,
        g2: cfg.g2 / gu,
        g12: cfg.g12 / gu,
        g_ib: cfg.g_ib / gu,
        coupling_scenario: cfg.coupling_scenario,
        n: cfg.n * l,
        omega: cfg.omega / OMEGA_BAR,
        temperature: KB * cfg.temperature / e0,
        theta12: cfg.theta12,
        delta: cfg.delta,
        lambda_cut: cfg.lambda_cut / OMEGA_BAR,
        v0_sq: cfg.v0_sq / (l * OMEGA_BAR).powi(2),
        tau_plus_override: cfg.tau_plus_override,
    }
}

/// Inverse of [`nondimensionalize`] given the impurity mass in kg.
pub fn redimensionalize(dim: &DimensionlessConfig, m_i: f64) -> PhysicalConfig {
    let l = length_unit(m_i);
    let e0 = HBAR * OMEGA_BAR;
    let gu = e0 * l;
    PhysicalConfig {
        m_b: dim.m_b * m_i,
        m_i,
        g1: dim.g1 * gu,
        g2: dim.g2 * gu,
        g12: dim.g12 * gu,
        g_ib: dim.g_ib * gu,
        coupling_scenario: dim.coupling_scenario,
        n: dim.n / l,
        omega: dim.omega * OMEGA_BAR,
        temperature: dim.temperature * e0 / KB,
        theta12: dim.theta12,
        delta: dim.delta,
        lambda_cut: dim.lambda_cut * OMEGA_BAR,
        v0_sq: dim.v0_sq * (l * OMEGA_BAR).powi(2),
        tau_plus_override: dim.tau_plus_override,
    }
}

/// The dimensionless working set consumed by spectra, kernels, and dynamics.
///
/// Frequencies in units of OMEGA_BAR, times in 1/OMEGA_BAR; `tau_minus` and
/// `tau_plus` are the dimensionless branch prefactors.
#[derive(Debug, Clone, Serialize)]
pub struct Scales {
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub e_gap: f64,
    /// Spin-bath band width Lambda (band support [e_gap, e_gap + lambda_cut]).
    pub lambda_cut: f64,
    pub omega: f64,
    pub tau_minus: f64,
    pub tau_tilde_minus: f64,
    pub tau_plus: f64,
    pub tau_tilde_plus: Option<f64>,
    /// k_B T / (hbar OMEGA_BAR).
    pub temperature: f64,
    /// <xdot^2(0)> in internal units.
    pub v0_sq: f64,
}

impl Scales {
    /// Validate (hard errors only), derive, and nondimensionalize in one step.
    pub fn from_config(cfg: &PhysicalConfig) -> Result<Scales> {
        let s = derive_scales(cfg)?;
        let dim = nondimensionalize(cfg);
        Ok(Scales {
            lambda_minus: s.lambda_minus / OMEGA_BAR,
            lambda_plus: s.lambda_plus / OMEGA_BAR,
            e_gap: s.e_gap / OMEGA_BAR,
            lambda_cut: cfg.lambda_cut / OMEGA_BAR,
            omega: cfg.omega / OMEGA_BAR,
            tau_minus: s.tau_minus * OMEGA_BAR,
            tau_tilde_minus: s.tau_tilde_minus / OMEGA_BAR.powi(2),
            tau_plus: s.tau_plus / OMEGA_BAR.powf(1.5),
            tau_tilde_plus: s.tau_tilde_plus.map(|t| t / OMEGA_BAR.powi(2)),
            temperature: dim.temperature,
            v0_sq: dim.v0_sq,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_scales() {
        let cfg = PhysicalConfig::default();
        let s = Scales::from_config(&cfg).unwrap();
        assert_relative_eq!(s.lambda_minus, 4.542662443506253, max_relative = 1e-12);
        assert_relative_eq!(s.tau_minus, 1.794912444349966e-3, max_relative = 1e-12);
        assert_relative_eq!(s.e_gap, 0.2, max_relative = 1e-12);
        assert_relative_eq!(s.omega, 0.1, max_relative = 1e-12);
        assert_relative_eq!(s.lambda_cut, 10.0, max_relative = 1e-12);
        // override pins tau_plus
        assert_relative_eq!(s.tau_plus, 1.0, max_relative = 1e-12);
        assert_relative_eq!(s.lambda_plus, 0.0);
    }

    #[test]
    fn tau_plus_microscopic() {
        let cfg = PhysicalConfig {
            tau_plus_override: None,
            ..PhysicalConfig::default()
        };
        let s = Scales::from_config(&cfg).unwrap();
        assert_relative_eq!(s.tau_plus, 0.6315524462197214, max_relative = 1e-10);
    }

    #[test]
    fn tau_plus_independent_of_omega() {
        let base = PhysicalConfig {
            tau_plus_override: None,
            ..PhysicalConfig::default()
        };
        let lo = derive_scales(&base).unwrap();
        let hi = derive_scales(&PhysicalConfig {
            omega: 4.0 * base.omega,
            ..base.clone()
        })
        .unwrap();
        assert_relative_eq!(lo.tau_plus, hi.tau_plus, max_relative = 1e-14);
    }

    #[test]
    fn gap_limits() {
        // g = g12 -> E_gap = 2 Omega
        let cfg = PhysicalConfig::default();
        let s = derive_scales(&cfg).unwrap();
        assert_relative_eq!(s.e_gap, 2.0 * cfg.omega, max_relative = 1e-14);
        // Omega = 0 -> E_gap = 0
        let s0 = derive_scales(&PhysicalConfig {
            omega: 0.0,
            ..cfg
        })
        .unwrap();
        assert_eq!(s0.e_gap, 0.0);
    }

    #[test]
    fn gap_monotone_in_omega() {
        let cfg = PhysicalConfig::default();
        let mut prev = 0.0;
        for i in 1..20 {
            let s = derive_scales(&PhysicalConfig {
                omega: 20.0 * i as f64,
                ..cfg.clone()
            })
            .unwrap();
            assert!(s.e_gap > prev);
            prev = s.e_gap;
        }
    }

    #[test]
    fn miscibility_gates() {
        // g1 = g2 = g12 -> A = 0, pass
        let r = validate(&PhysicalConfig::default()).unwrap();
        assert!(r.all_passed());
        let a = r.gates.iter().find(|g| g.name == "miscibility").unwrap();
        assert_eq!(a.status, GateStatus::Pass);
        // Omega = 0 with unbalanced couplings -> NOT_APPLICABLE, density usable
        let r0 = validate(&PhysicalConfig {
            omega: 0.0,
            g12: 1.0e-37,
            coupling_scenario: CouplingScenario::SameSign,
            ..PhysicalConfig::default()
        })
        .unwrap();
        let a0 = r0.gates.iter().find(|g| g.name == "miscibility").unwrap();
        assert_eq!(a0.status, GateStatus::NotApplicable);
        assert!(r0.usable_for(crate::spectrum::Branch::Density));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(validate(&PhysicalConfig {
            omega: -1.0,
            ..PhysicalConfig::default()
        })
        .is_err());
        assert!(validate(&PhysicalConfig {
            n: f64::NAN,
            ..PhysicalConfig::default()
        })
        .is_err());
        // asymmetric couplings fail the gate (not an error)
        let r = validate(&PhysicalConfig {
            g1: 2.0e-37,
            g2: 3.0e-37,
            ..PhysicalConfig::default()
        })
        .unwrap();
        assert!(!r.all_passed());
    }

    #[test]
    fn spin_scale_imaginary_errors() {
        // omega = 0 keeps the gap real so the g < g12 check is what fires
        let cfg = PhysicalConfig {
            g1: 1.0e-37,
            g2: 1.0e-37,
            omega: 0.0,
            ..PhysicalConfig::default()
        };
        assert!(matches!(derive_scales(&cfg), Err(Error::Validation(_))));
        // with a Rabi drive the same couplings hit the immiscibility gate
        let cfg2 = PhysicalConfig {
            g1: 1.0e-37,
            g2: 1.0e-37,
            ..PhysicalConfig::default()
        };
        assert!(matches!(derive_scales(&cfg2), Err(Error::Unstable(_))));
    }

    #[test]
    fn config_parse_roundtrip_and_unknown_key() {
        let text = "# comment\nOmega = 314.1592653589793\nn = 7e6\ntau_plus_override = none\n";
        let cfg = PhysicalConfig::from_key_values(text).unwrap();
        assert_relative_eq!(cfg.omega, 314.1592653589793);
        assert_eq!(cfg.tau_plus_override, None);
        assert!(PhysicalConfig::from_key_values("bogus = 1\n").is_err());
        assert!(PhysicalConfig::from_key_values("n = 1\nn = 2\n").is_err());
        assert!(PhysicalConfig::from_key_values("n = inf\n").is_err());
    }

    #[test]
    fn nondim_roundtrip_identity() {
        let cfg = PhysicalConfig::default();
        let dim = nondimensionalize(&cfg);
        assert_relative_eq!(dim.omega, 0.1, max_relative = 1e-14);
        assert_relative_eq!(dim.lambda_cut, 10.0, max_relative = 1e-14);
        let back = redimensionalize(&dim, cfg.m_i);
        assert_relative_eq!(back.m_b, cfg.m_b, max_relative = 1e-12);
        assert_relative_eq!(back.g1, cfg.g1, max_relative = 1e-12);
        assert_relative_eq!(back.g12, cfg.g12, max_relative = 1e-12);
        assert_relative_eq!(back.g_ib, cfg.g_ib, max_relative = 1e-12);
        assert_relative_eq!(back.n, cfg.n, max_relative = 1e-12);
        assert_relative_eq!(back.omega, cfg.omega, max_relative = 1e-12);
        assert_relative_eq!(back.lambda_cut, cfg.lambda_cut, max_relative = 1e-12);
    }
}
