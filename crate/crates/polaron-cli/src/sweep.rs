//! Sweep-axis parsing and application to the base config.

use crate::Failure;
use polaron::params::PhysicalConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Omega,
    Gib,
    TauPlus,
    Temperature,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Omega => "OMEGA",
            Axis::Gib => "GIB",
            Axis::TauPlus => "TAU_PLUS",
            Axis::Temperature => "TEMPERATURE",
        }
    }

    pub fn apply(&self, cfg: &PhysicalConfig, value: f64) -> PhysicalConfig {
        let mut c = cfg.clone();
        match self {
            Axis::Omega => c.omega = value,
            Axis::Gib => c.g_ib = value,
            Axis::TauPlus => c.tau_plus_override = Some(value),
            Axis::Temperature => c.temperature = value,
        }
        c
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
}

impl SweepSpec {
    /// Single-point sweep: the base config itself.
    pub fn single() -> SweepSpec {
        SweepSpec {
            axis: Axis::Omega,
            values: Vec::new(),
        }
    }

    pub fn is_single(&self) -> bool {
        self.values.is_empty()
    }

    pub fn configs(&self, base: &PhysicalConfig) -> Vec<(Option<f64>, PhysicalConfig)> {
        if self.is_single() {
            vec![(None, base.clone())]
        } else {
            self.values
                .iter()
                .map(|&v| (Some(v), self.axis.apply(base, v)))
                .collect()
        }
    }
}

/// Parse `AXIS=lo:hi:count:log|lin`.
pub fn parse_sweep(spec: &str) -> Result<SweepSpec, Failure> {
    let parse_err = |msg: String| Failure { code: 2, message: msg };
    let (axis_str, rest) = spec.split_once('=').ok_or_else(|| {
        parse_err(format!("sweep '{spec}' must look like AXIS=lo:hi:count:log|lin"))
    })?;
    let axis = match axis_str {
        "OMEGA" => Axis::Omega,
        "GIB" => Axis::Gib,
        "TAU_PLUS" => Axis::TauPlus,
        "TEMPERATURE" => Axis::Temperature,
        other => {
            return Err(parse_err(format!(
                "unknown sweep axis '{other}' (expected OMEGA, GIB, TAU_PLUS, or TEMPERATURE)"
            )))
        }
    };
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 4 {
        return Err(parse_err(format!(
            "sweep range '{rest}' must be lo:hi:count:log|lin"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| parse_err(format!("sweep lo '{}' is not a number", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| parse_err(format!("sweep hi '{}' is not a number", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| parse_err(format!("sweep count '{}' is not an integer", parts[2])))?;
    if count == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(parse_err(format!(
            "sweep needs finite lo <= hi and count >= 1, got {lo}:{hi}:{count}"
        )));
    }
    let values = match parts[3] {
        "lin" => (0..count)
            .map(|i| {
                if count == 1 {
                    lo
                } else {
                    lo + (hi - lo) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
        "log" => {
            if lo <= 0.0 {
                return Err(parse_err(format!(
                    "log spacing needs lo > 0, got {lo}"
                )));
            }
            (0..count)
                .map(|i| {
                    if count == 1 {
                        lo
                    } else {
                        lo * (hi / lo).powf(i as f64 / (count - 1) as f64)
                    }
                })
                .collect()
        }
        other => {
            return Err(parse_err(format!(
                "sweep spacing '{other}' must be log or lin"
            )))
        }
    };
    Ok(SweepSpec { axis, values })
}
