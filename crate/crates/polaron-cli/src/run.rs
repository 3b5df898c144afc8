//! Subcommand implementations.

use crate::output::{csv_text, emit, fmt, write_file};
use crate::sweep::{parse_sweep, SweepSpec};
use crate::{Cli, Cmd, Failure};
use num_complex::Complex64;
use polaron::laplace::{invert, KnownPair, Method};
use polaron::msd::{linearity_check, log_grid, msd_numeric, plateau_stats, MsdSeries};
use polaron::params::{validate, PhysicalConfig, Scales};
use polaron::spectrum::{dispersion_symmetric, Branch};
use polaron::stability::{pole_scan, Verdict};
use std::path::Path;

fn load_config(path: Option<&Path>) -> Result<PhysicalConfig, Failure> {
    match path {
        None => Ok(PhysicalConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure {
                code: 2,
                message: format!("cannot read config {}: {e}", p.display()),
            })?;
            Ok(PhysicalConfig::from_key_values(&text)?)
        }
    }
}

pub fn dispatch(cli: Cli) -> Result<(), Failure> {
    let cfg = load_config(cli.config.as_deref())?;
    let out = cli.out.as_deref();
    match cli.cmd {
        Cmd::Spectrum { points, kmax } => spectrum(&cfg, points, kmax, out),
        Cmd::Sdensity { points } => sdensity(&cfg, points, out),
        Cmd::Kernels {
            branch,
            tmax,
            points,
            low_temp,
        } => kernels(&cfg, branch.into(), tmax, points, low_temp, out),
        Cmd::Invert {
            method,
            pair,
            tmax,
            points,
        } => invert_diag(&method, &pair, tmax, points, out),
        Cmd::Stability { points } => stability(&cfg, points, out),
        Cmd::Msd {
            branch,
            sweep,
            tmax,
            points,
            soft_fail,
            low_temp,
        } => {
            let spec = match sweep {
                Some(s) => parse_sweep(&s)?,
                None => SweepSpec::single(),
            };
            msd(&cfg, branch.into(), &spec, tmax, points, soft_fail, low_temp, out)
        }
    }
}

fn positive_grid(hi: f64, points: usize, what: &str) -> Result<Vec<f64>, Failure> {
    if !(hi > 0.0) || points == 0 {
        return Err(Failure {
            code: 3,
            message: format!("{what} needs a positive range and at least one point"),
        });
    }
    Ok((1..=points)
        .map(|i| hi * i as f64 / points as f64)
        .collect())
}

fn spectrum(
    cfg: &PhysicalConfig,
    points: usize,
    kmax: f64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let scales = Scales::from_config(cfg)?;
    let mut rows = Vec::with_capacity(points);
    if !(kmax > 0.0) || points == 0 {
        return Err(Failure {
            code: 3,
            message: "spectrum needs kmax > 0 and points >= 1".into(),
        });
    }
    for i in 0..points {
        let k = kmax * i as f64 / (points - 1).max(1) as f64;
        rows.push(vec![
            fmt(k),
            fmt(dispersion_symmetric(k, Branch::Density, &scales)),
            fmt(dispersion_symmetric(k, Branch::Spin, &scales)),
        ]);
    }
    emit(out, &csv_text(&["k", "E_minus", "E_plus"], &rows))
}

fn sdensity(cfg: &PhysicalConfig, points: usize, out: Option<&Path>) -> Result<(), Failure> {
    use polaron::sdensity::{j_density_cubic, j_density_full, j_spin_full, j_spin_gapped};
    let s = Scales::from_config(cfg)?;
    let top = s.e_gap + s.lambda_cut;
    let grid = positive_grid(top, points, "sdensity")?;
    let rows: Vec<Vec<String>> = grid
        .iter()
        .map(|&w| {
            vec![
                fmt(w),
                fmt(j_density_full(w, &s)),
                fmt(j_density_cubic(w, &s)),
                fmt(j_spin_full(w, &s)),
                fmt(j_spin_gapped(w, &s)),
            ]
        })
        .collect();
    emit(
        out,
        &csv_text(
            &["omega", "J_minus_full", "J_minus_cubic", "J_plus_full", "J_plus_gapped"],
            &rows,
        ),
    )
}

fn kernels(
    cfg: &PhysicalConfig,
    branch: Branch,
    tmax: f64,
    points: usize,
    low_temp: bool,
    out: Option<&Path>,
) -> Result<(), Failure> {
    use polaron::kernels::{
        g2_numeric, g2_slope_analytic, gamma_density, gamma_spin, noise_density_lowt,
        noise_general, noise_spin_lowt,
    };
    let s = Scales::from_config(cfg)?;
    let grid = positive_grid(tmax, points, "kernels")?;
    let slope = g2_slope_analytic(branch, &s)?;
    let temperature = if low_temp { 0.0 } else { s.temperature };
    let rows: Result<Vec<Vec<String>>, polaron::Error> = polaron::exec::pmap(&grid, |&t| {
        let gamma = match branch {
            Branch::Density => gamma_density(t, &s),
            Branch::Spin => gamma_spin(t, &s)?,
        };
        let nu = if temperature == 0.0 {
            match branch {
                Branch::Density => noise_density_lowt(t, &s),
                Branch::Spin => noise_spin_lowt(t, &s),
            }
        } else {
            noise_general(t, temperature, branch, &s)?
        };
        Ok(vec![
            fmt(t),
            fmt(gamma),
            fmt(nu),
            fmt(g2_numeric(t, branch, &s)?),
            fmt(slope * t),
        ])
    })
    .into_iter()
    .collect();
    emit(
        out,
        &csv_text(&["t", "gamma", "nu", "g2_numeric", "g2_analytic"], &rows?),
    )
}

fn invert_diag(
    method: &str,
    pair: &str,
    tmax: f64,
    points: usize,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let method: Method = method.parse().map_err(Failure::from)?;
    let pair: KnownPair = pair.parse().map_err(Failure::from)?;
    let grid = positive_grid(tmax, points, "invert")?;
    let rows: Result<Vec<Vec<String>>, polaron::Error> = polaron::exec::pmap(&grid, |&t| {
        let num = invert(method, &|z: Complex64| pair.transform(z), t, tmax)?;
        let exact = pair.time_domain(t);
        Ok(vec![fmt(t), fmt(num), fmt(exact), fmt((num - exact).abs())])
    })
    .into_iter()
    .collect();
    emit(
        out,
        &csv_text(&["t", "f_numeric", "f_analytic", "abs_err"], &rows?),
    )
}

fn stability(cfg: &PhysicalConfig, points: usize, out: Option<&Path>) -> Result<(), Failure> {
    let s = Scales::from_config(cfg)?;
    let scan = pole_scan(&s, points)?;
    let rows: Vec<Vec<String>> = scan
        .omega_grid
        .iter()
        .zip(&scan.condition_values)
        .map(|(&w, &c)| vec![fmt(w), fmt(c)])
        .collect();
    let csv = csv_text(&["omega", "condition"], &rows);
    let verdict = serde_json::json!({
        "verdict": match scan.verdict {
            Verdict::NoPole => "NO_POLE",
            Verdict::PoleFound => "POLE_FOUND",
        },
        "sign_changes": scan.sign_changes,
        "grid_size": scan.omega_grid.len(),
        "scales": s,
    });
    let json = format!("{:#}\n", verdict);
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            write_file(&dir.join("stability.csv"), &csv)?;
            write_file(&dir.join("stability.json"), &json)?;
            Ok(())
        }
        None => {
            emit(None, &csv)?;
            emit(None, &json)
        }
    }
}

/// One fully processed sweep point, ready for serialization.
struct PointOutcome {
    axis_value: Option<f64>,
    series: MsdSeries,
    summary: serde_json::Value,
}

#[allow(clippy::too_many_arguments)]
fn msd(
    base: &PhysicalConfig,
    branch: Branch,
    spec: &SweepSpec,
    tmax: f64,
    points: usize,
    soft_fail: bool,
    low_temp: bool,
    out: Option<&Path>,
) -> Result<(), Failure> {
    use polaron::kernels::KernelSet;
    let out_dir = out.unwrap_or_else(|| Path::new("polaron_out"));
    if !(tmax > 0.0) || points < 5 {
        return Err(Failure {
            code: 3,
            message: "msd needs tmax > 0 and at least 5 points".into(),
        });
    }
    let configs = spec.configs(base);

    // evaluate points concurrently, join in deterministic order
    type PointResult = Result<PointOutcome, polaron::Error>;
    let results: Vec<PointResult> = polaron::exec::pmap(&configs, |(axis_value, cfg)| {
        let report = validate(cfg)?;
        if !report.usable_for(branch) && !soft_fail {
            let failed: Vec<&str> = report
                .gates
                .iter()
                .filter(|g| g.status == polaron::params::GateStatus::Fail)
                .map(|g| g.name)
                .collect();
            return Err(polaron::Error::Validation(format!(
                "validity gates failed for the {branch} branch: {}",
                failed.join(", ")
            )));
        }
        let mut cfg_run = cfg.clone();
        if low_temp {
            cfg_run.temperature = 0.0;
        }
        if cfg_run.temperature > 0.0 {
            return Err(polaron::Error::Validation(
                "the dynamics pipeline treats the bath at zero temperature; \
                 pass --low-temp to accept the T = 0 kernels"
                    .into(),
            ));
        }
        let scales = Scales::from_config(&cfg_run)?;
        let kset = KernelSet::build(branch, &scales, tmax)?;
        let grid = log_grid(tmax * 1e-3, tmax, points);
        let series = msd_numeric(&grid, branch, &kset, scales.v0_sq)?;
        let plateau = plateau_stats(&series);
        let linearity = linearity_check(&series, branch, &scales)?;
        let scan = pole_scan(&scales, 2048)?;
        let summary = serde_json::json!({
            "axis_value": axis_value,
            "branch": branch.to_string(),
            "scales": scales,
            "gates": report.gates,
            "gates_passed": report.usable_for(branch),
            "refinement_error": series.refinement_error,
            "regimes": series.regimes.iter().map(|r| serde_json::json!({
                "label": r.label.to_string(),
                "t_start": r.t_start,
                "t_end": r.t_end,
                "alpha_mean": r.alpha_mean,
            })).collect::<Vec<_>>(),
            "plateau": {
                "duration_ratio": plateau.duration_ratio,
                "alpha_mean": plateau.alpha_mean,
            },
            "linearity": {
                "k_typ": linearity.k_typ,
                "max_kx": linearity.max_kx,
                "t_valid": linearity.t_valid,
            },
            "stability_verdict": match scan.verdict {
                Verdict::NoPole => "NO_POLE",
                Verdict::PoleFound => "POLE_FOUND",
            },
        });
        Ok(PointOutcome {
            axis_value: *axis_value,
            series,
            summary,
        })
    });

    std::fs::create_dir_all(out_dir)?;
    let mut manifest_points = Vec::new();
    let mut warnings = Vec::new();
    let mut first_hard_error: Option<polaron::Error> = None;
    for (idx, res) in results.into_iter().enumerate() {
        match res {
            Ok(outcome) => {
                let file = format!("msd_{idx:03}.csv");
                let path = out_dir.join(&file);
                write_file(&path, &point_csv(&outcome.series))?;
                let mut summary = outcome.summary;
                summary["file"] = serde_json::json!(file);
                if !summary["gates_passed"].as_bool().unwrap_or(true) {
                    warnings.push(format!(
                        "point {idx}: validity gates failed (soft-fail), results indicative only"
                    ));
                }
                manifest_points.push(summary);
                let _ = outcome.axis_value;
            }
            Err(e) => {
                if soft_fail {
                    warnings.push(format!("point {idx}: {e}"));
                    manifest_points.push(serde_json::json!({
                        "axis_value": configs[idx].0,
                        "failed": e.to_string(),
                    }));
                } else if first_hard_error.is_none() {
                    first_hard_error = Some(e);
                }
            }
        }
    }
    if let Some(e) = first_hard_error {
        return Err(e.into());
    }

    let manifest = serde_json::json!({
        "tool": "polaron",
        "version": env!("CARGO_PKG_VERSION"),
        "branch": branch.to_string(),
        "config": base,
        "sweep": if spec.is_single() { serde_json::Value::Null } else {
            serde_json::json!({ "axis": spec.axis.name(), "values": spec.values })
        },
        "tmax": tmax,
        "points": points,
        "outputs": manifest_points,
        "warnings": warnings,
    });
    write_file(&out_dir.join("summary.json"), &format!("{:#}\n", manifest))?;
    Ok(())
}

fn point_csv(series: &MsdSeries) -> String {
    let rows: Vec<Vec<String>> = series
        .t
        .iter()
        .zip(series.msd.iter().zip(&series.alpha))
        .map(|(&t, (&m, &a))| {
            let label = series
                .regimes
                .iter()
                .find(|r| t >= r.t_start && t <= r.t_end)
                .map(|r| r.label.to_string())
                .unwrap_or_else(|| "UNCLASSIFIED".to_string());
            vec![fmt(t), fmt(m), fmt(a), label]
        })
        .collect();
    csv_text(&["t", "msd", "alpha", "regime_label"], &rows)
}
