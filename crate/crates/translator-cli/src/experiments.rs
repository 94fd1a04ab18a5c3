//! Named experiments and the single-operation subcommands.
//!
//! Every entry point consumes a validated [`ExperimentConfig`], runs pure
//! core operations in a fixed order, and produces an [`ExperimentReport`]
//! plus plot-ready artifacts. Nothing here reads clocks or host state, so a
//! report re-run from its embedded config echo is bitwise reproducible in
//! single-threaded mode.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use translator_core::density::{entropy_estimate, gaussian_density, Surface};
use translator_core::field::{CylGrid, CylindricalGraphField, PolarGrid, VerticalGraphField};
use translator_core::geometry::{revolve_profile, AxisOffset};
use translator_core::ode::{
    asymptotic_diagnostics, integrate_phi, integrate_profile_arclength, profile_from_phi,
    ArclengthStart, PerturbationEnvelope,
};
use translator_core::residual::{
    bowl_asymptotics_fit, cylindrical_translator_residual, fourier_split,
    vertical_translator_residual,
};
use translator_core::symmetry::{
    axis_drift_sum, decay_exponent_fit, fit_axis, neck_decay_schedule, parabolic_rescale,
    vertical_cylindricality_check, vertical_symmetry_check, SliceFamily,
};
use translator_core::Result as CoreResult;

use crate::config::ExperimentConfig;
use crate::report::{CheckRecord, ExperimentReport};

/// In-memory artifact: file name plus UTF-8 contents.
pub type Artifact = (String, String);

/// Checks, summary and data files produced by one experiment body.
pub struct Outcome {
    pub checks: Vec<CheckRecord>,
    pub summary: serde_json::Value,
    pub artifacts: Vec<Artifact>,
}

/// Run a named experiment or single operation. Pure except for the RNG
/// stream, which is seeded from the config. Returns the report plus the
/// artifacts for the caller to write.
pub fn run(cfg: &ExperimentConfig) -> CoreResult<(ExperimentReport, Vec<Artifact>)> {
    let out = match cfg.experiment.as_str() {
        "growth-lemma" | "ode-asymptotics" => growth_lemma(cfg)?,
        "perturbation-robustness" => perturbation_robustness(cfg)?,
        "comparison-bounds" => comparison_bounds(cfg)?,
        "residual-convergence" => residual_convergence(cfg)?,
        "residual" => residual_single(cfg)?,
        "bowl-end" => bowl_end(cfg)?,
        "axis-machinery" => axis_machinery(cfg)?,
        "axis-fit" => axis_fit_op(cfg)?,
        "decay-schedule" => decay_schedule(cfg)?,
        "entropy-gap" | "density" => entropy_gap(cfg)?,
        "entropy" => entropy_sweep(cfg)?,
        "catenoid-multiplicity" => catenoid_multiplicity(cfg)?,
        "bowl-profile" => bowl_profile_op(cfg)?,
        "fourier-split" => fourier_split_op(cfg)?,
        "decay-fit" => decay_fit_op(cfg)?,
        "symmetry-check" => symmetry_check_op(cfg)?,
        "cylindricality-check" => cylindricality_check_op(cfg)?,
        "rescale" => rescale_op(cfg)?,
        other => {
            return Err(translator_core::Error::InvalidArgument(format!(
                "unknown experiment \"{other}\""
            )))
        }
    };
    let mut manifest: Vec<String> = out.artifacts.iter().map(|(n, _)| n.clone()).collect();
    manifest.push("report.json".to_string());
    manifest.sort();
    let report = ExperimentReport::new(cfg, out.checks, out.summary, manifest);
    Ok((report, out.artifacts))
}

fn want_csv(cfg: &ExperimentConfig) -> bool {
    cfg.format == "csv"
}

fn envelope_from(cfg: &ExperimentConfig) -> CoreResult<PerturbationEnvelope> {
    PerturbationEnvelope::new(
        cfg.param("gamma_amp"),
        cfg.param("gamma_exp"),
        cfg.param("delta_amp"),
        cfg.param("delta_exp"),
        cfg.param("osc_freq"),
    )
}

fn csv_artifact(
    name: &str,
    write: impl FnOnce(&mut Vec<u8>) -> CoreResult<()>,
) -> CoreResult<Artifact> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok((name.to_string(), String::from_utf8(buf).expect("CSV is UTF-8")))
}

/// The standard bowl field: revolve the unperturbed ODE profile onto a grid.
fn bowl_field(z_lo: f64, z_hi: f64, n_z: usize, n_theta: usize) -> CoreResult<CylindricalGraphField> {
    let s_end = ((2.0 * z_hi).sqrt() * 1.5 + 10.0).max(30.0);
    let traj = integrate_phi(&PerturbationEnvelope::ZERO, 5.0, 4.8, s_end, 1e-12)?;
    let prof = profile_from_phi(&traj, 12.0)?;
    revolve_profile(&prof, z_lo, z_hi, n_z, n_theta)
}

/// Circle of radius `radius` centered at `(x0, y0)`, as a polar graph about
/// the origin, extruded in z.
fn offset_cylinder(
    radius: f64,
    x0: f64,
    y0: f64,
    n_theta: usize,
) -> CoreResult<CylindricalGraphField> {
    let grid = CylGrid::new(0.0, 4.0, 9, n_theta)?;
    CylindricalGraphField::from_fn(grid, |_, th| {
        let b = x0 * th.cos() + y0 * th.sin();
        let c = x0 * th.sin() - y0 * th.cos();
        b + (radius * radius - c * c).sqrt()
    })
}

// ---------------------------------------------------------------------------
// ODE chain
// ---------------------------------------------------------------------------

fn asymptotics_checks(
    prefix: &str,
    cfg: &ExperimentConfig,
    env: &PerturbationEnvelope,
) -> CoreResult<(Vec<CheckRecord>, serde_json::Value, Artifact)> {
    let traj = integrate_phi(
        env,
        cfg.param("s0"),
        cfg.param("phi0"),
        cfg.param("s_end"),
        cfg.param("tol"),
    )?;
    let diag = asymptotic_diagnostics(&traj)?;
    let mut checks = vec![
        CheckRecord::le(
            &format!("{prefix}lambda_end_dev"),
            (diag.lambda_end + 1.0).abs(),
            cfg.param("lambda_tol"),
        ),
        CheckRecord::le(
            &format!("{prefix}mu_end_dev"),
            (diag.mu_end + 2.0).abs(),
            cfg.param("mu_tol"),
        ),
    ];
    match diag.remainder_exponent {
        Some(p) => checks.push(CheckRecord::le(
            &format!("{prefix}remainder_exponent"),
            p,
            cfg.param("remainder_exp_max"),
        )),
        // a remainder below rounding decays faster than any required rate
        None => checks.push(CheckRecord::flag(
            &format!("{prefix}remainder_below_rounding"),
            diag.degenerate_remainder,
        )),
    }
    let name = format!("trajectory_{}.csv", prefix.trim_end_matches('_'));
    let name = name.replace("trajectory_.csv", "trajectory.csv");
    let art = csv_artifact(&name, |w| traj.write_csv(w))?;
    Ok((checks, diag.json_summary(&traj), art))
}

fn growth_lemma(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let env = envelope_from(cfg)?;
    let (checks, summary, art) = asymptotics_checks("", cfg, &env)?;
    let artifacts = if want_csv(cfg) { vec![art] } else { vec![] };
    Ok(Outcome { checks, summary, artifacts })
}

fn perturbation_robustness(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let mut checks = Vec::new();
    let mut artifacts = Vec::new();
    let mut summary = serde_json::Map::new();
    let cases = [
        ("high_", cfg.param("amp_high"), cfg.param("exp_high")),
        ("low_", cfg.param("amp_low"), cfg.param("exp_low")),
    ];
    for (prefix, amp, exp) in cases {
        let env = PerturbationEnvelope::new(amp, exp, amp, exp, cfg.param("osc_freq"))?;
        let (c, s, art) = asymptotics_checks(prefix, cfg, &env)?;
        checks.extend(c);
        summary.insert(prefix.trim_end_matches('_').to_string(), s);
        if want_csv(cfg) {
            artifacts.push(art);
        }
    }
    Ok(Outcome {
        checks,
        summary: serde_json::Value::Object(summary),
        artifacts,
    })
}

fn comparison_bounds(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let s0 = cfg.param("s0");
    let s_end = cfg.param("s_end");
    let tol = cfg.param("tol");
    let margin = cfg.param("margin");
    let spread = cfg.param("spread");
    let launches = cfg.param("launches") as usize;
    let slack = 1e-9;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut max_upper_violation = 0.0f64;
    let mut max_lower_violation = 0.0f64;
    let mut worst_lower_onset = f64::NEG_INFINITY;
    let mut all_completed = true;
    let mut all_established = true;
    let mut rows =
        String::from("launch,phi0,upper_onset_s,lower_onset_s,upper_violation,lower_violation\n");

    for launch in 0..launches {
        // attractor-basin launch window around the slow manifold
        let phi0 = s0 * (1.0 - spread) + rng.random::<f64>() * 2.0 * spread * s0;
        let traj = integrate_phi(&PerturbationEnvelope::ZERO, s0, phi0, s_end, tol)?;
        if traj.blew_up() {
            all_completed = false;
            continue;
        }
        // upper barrier s + s^-9: once below, stay below (with slack)
        let upper = |s: f64| s + s.powi(-9);
        let mut upper_onset = f64::NAN;
        let mut upper_viol = 0.0f64;
        // lower barrier (1 - margin) s: once above, stay above
        let lower = |s: f64| (1.0 - margin) * s;
        let mut lower_onset = f64::NAN;
        let mut lower_viol = 0.0f64;
        for (&s, &phi) in traj.s.iter().zip(traj.phi.iter()) {
            if upper_onset.is_nan() {
                if phi <= upper(s) {
                    upper_onset = s;
                }
            } else {
                upper_viol = upper_viol.max(phi - upper(s) - slack);
            }
            if lower_onset.is_nan() {
                if phi >= lower(s) {
                    lower_onset = s;
                }
            } else {
                lower_viol = lower_viol.max(lower(s) - phi - slack);
            }
        }
        if upper_onset.is_nan() || lower_onset.is_nan() {
            all_established = false;
        } else {
            worst_lower_onset = worst_lower_onset.max(lower_onset);
        }
        max_upper_violation = max_upper_violation.max(upper_viol);
        max_lower_violation = max_lower_violation.max(lower_viol);
        let _ = writeln!(
            rows,
            "{launch},{phi0},{upper_onset},{lower_onset},{upper_viol},{lower_viol}"
        );
    }

    let checks = vec![
        CheckRecord::flag("all_launches_completed", all_completed),
        CheckRecord::flag("both_bounds_established", all_established),
        CheckRecord::le("upper_bound_violation", max_upper_violation, 0.0),
        CheckRecord::le("lower_bound_violation", max_lower_violation, 0.0),
    ];
    let summary = json!({
        "launches": launches,
        "phi0_window": [s0 * (1.0 - spread), s0 * (1.0 + spread)],
        "margin": margin,
        "worst_lower_onset_s": worst_lower_onset,
        "max_upper_violation": max_upper_violation,
        "max_lower_violation": max_lower_violation,
    });
    let artifacts = if want_csv(cfg) {
        vec![("launches.csv".to_string(), rows)]
    } else {
        vec![]
    };
    Ok(Outcome { checks, summary, artifacts })
}

// ---------------------------------------------------------------------------
// Residual chain
// ---------------------------------------------------------------------------

fn residual_convergence(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let z_lo = cfg.param("z_lo");
    let z_hi = cfg.param("z_hi");
    let n0 = cfg.param("n_z") as usize;
    let n_theta = cfg.param("n_theta") as usize;
    let order_min = cfg.param("order_min");

    let grids = [n0, 2 * n0 - 1, 4 * n0 - 3];
    let mut errs = Vec::new();
    for &n in &grids {
        let f = bowl_field(z_lo, z_hi, n, n_theta)?;
        errs.push(cylindrical_translator_residual(&f)?.max_interior_abs());
    }
    let o1 = (errs[0] / errs[1]).log2();
    let o2 = (errs[1] / errs[2]).log2();

    // paraboloid vertical residual is 1/(1 + rho^2) up to discretization
    let grid = PolarGrid::new(cfg.param("rho_in"), cfg.param("rho_out"), cfg.param("n_s") as usize, 16)?;
    let parab = VerticalGraphField::from_fn(grid, |s, _| 0.5 * s * s)?;
    let res = vertical_translator_residual(&parab)?;
    let h = grid.ds();
    let mut parab_dev = 0.0f64;
    for (i, _, v) in res.interior() {
        let rho = grid.s(i);
        parab_dev = parab_dev.max((v - 1.0 / (1.0 + rho * rho)).abs());
    }

    let checks = vec![
        CheckRecord::ge("refinement_order_h_h2", o1, order_min),
        CheckRecord::ge("refinement_order_h2_h4", o2, order_min),
        CheckRecord::le("finest_max_residual", errs[2], cfg.param("max_residual")),
        CheckRecord::le(
            "paraboloid_vertical_dev",
            parab_dev,
            cfg.param("vert_tol_factor") * h * h,
        ),
    ];
    let summary = json!({
        "grids": grids,
        "max_residuals": errs,
        "orders": [o1, o2],
        "paraboloid_dev": parab_dev,
        "paraboloid_h": h,
    });
    Ok(Outcome { checks, summary, artifacts: vec![] })
}

fn residual_single(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let f = bowl_field(
        cfg.param("z_lo"),
        cfg.param("z_hi"),
        cfg.param("n_z") as usize,
        cfg.param("n_theta") as usize,
    )?;
    let res = cylindrical_translator_residual(&f)?;
    let checks = vec![CheckRecord::le(
        "max_interior_residual",
        res.max_interior_abs(),
        cfg.param("max_residual"),
    )];
    let artifacts = if want_csv(cfg) {
        vec![csv_artifact("residual.csv", |w| res.write_csv(w))?]
    } else {
        vec![]
    };
    Ok(Outcome {
        checks,
        summary: res.json_summary(),
        artifacts,
    })
}

fn bowl_end(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let s_min = cfg.param("s_min");
    let s_max = cfg.param("s_max");
    let traj = integrate_phi(&PerturbationEnvelope::ZERO, 5.0, 4.8, s_max * 1.1, cfg.param("tol"))?;
    let prof = profile_from_phi(&traj, 12.0)?;
    // the vertical height graph: radius r = s along the profile, height z
    let samples: Vec<(f64, f64)> = prof
        .zr_samples()
        .into_iter()
        .filter(|&(_, r)| r >= s_min && r <= s_max)
        .map(|(z, r)| (r, z))
        .collect();
    let fit = bowl_asymptotics_fit(&samples)?;
    let checks = vec![
        CheckRecord::flag("c_finite", fit.c.is_finite()),
        CheckRecord::le("tail_remainder_bound", fit.remainder_bound, cfg.param("remainder_max")),
        CheckRecord::flag("not_diverging", !fit.diverging),
    ];
    let artifacts = if want_csv(cfg) {
        let mut rows = String::from("s,f\n");
        for &(s, f) in &samples {
            let _ = writeln!(rows, "{s},{f}");
        }
        vec![("height_graph.csv".to_string(), rows)]
    } else {
        vec![]
    };
    Ok(Outcome {
        checks,
        summary: fit.json_summary(),
        artifacts,
    })
}

// ---------------------------------------------------------------------------
// Axis and decay machinery
// ---------------------------------------------------------------------------

fn axis_recovery(cfg: &ExperimentConfig) -> CoreResult<(CheckRecord, serde_json::Value)> {
    let (x0, y0) = (cfg.param("x0"), cfg.param("y0"));
    let f = offset_cylinder(cfg.param("radius"), x0, y0, cfg.param("n_theta") as usize)?;
    let est = fit_axis(&f, 0.5, 3.5)?;
    let err = ((est.offset.x0 - x0).powi(2) + (est.offset.y0 - y0).powi(2)).sqrt();
    let check = CheckRecord::le("axis_recovery_error", err, cfg.param("recover_tol"));
    let summary = json!({
        "planted_axis": [x0, y0],
        "fitted_axis": [est.offset.x0, est.offset.y0],
        "sup_u_at_fit": est.sup_u,
    });
    Ok((check, summary))
}

fn axis_machinery(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let (recovery_check, recovery_summary) = axis_recovery(cfg)?;

    // planted power-law decay samples over complete dyadic bands
    let (c0, p0) = (cfg.param("decay_c"), cfg.param("decay_p"));
    let n = 500usize;
    let samples: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let z = 8.0 * 16f64.powf(k as f64 / (n - 1) as f64);
            (z, c0 * z.powf(-p0))
        })
        .collect();
    let fit = decay_exponent_fit(&samples)?;
    let p_fit = fit.p.unwrap_or(f64::NAN);
    let decay_check = CheckRecord::le(
        "decay_exponent_rel_error",
        (p_fit - p0).abs() / p0,
        cfg.param("fit_rel_tol"),
    );

    // planted axis drift x0(z) = z^-3 (rate ~ 3 z^-4) against its integral bound
    let axes: Vec<(f64, AxisOffset)> = (0..200)
        .map(|k| {
            let z = 10.0 * 100f64.powf(k as f64 / 199.0);
            Ok((z, AxisOffset::new(z.powi(-3), 0.0)?))
        })
        .collect::<CoreResult<_>>()?;
    let drift = axis_drift_sum(&axes)?;
    let factor = cfg.param("drift_factor");
    let ratio = drift.tail_drift / drift.integral_bound;
    let drift_checks = vec![
        CheckRecord::flag("drift_summable", drift.summable),
        CheckRecord::le("drift_ratio_upper", ratio, factor),
        CheckRecord::ge("drift_ratio_lower", ratio, 1.0 / factor),
    ];

    let mut checks = vec![recovery_check, decay_check];
    checks.extend(drift_checks);
    let summary = json!({
        "recovery": recovery_summary,
        "decay_fit": { "planted_p": p0, "fitted_p": p_fit, "fitted_c": fit.c },
        "drift": {
            "tail_drift": drift.tail_drift,
            "integral_bound": drift.integral_bound,
            "fitted_c": drift.fitted_c,
            "fitted_p": drift.fitted_p,
            "summable": drift.summable,
        },
    });
    Ok(Outcome { checks, summary, artifacts: vec![] })
}

fn axis_fit_op(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let (check, summary) = axis_recovery(cfg)?;
    Ok(Outcome {
        checks: vec![check],
        summary,
        artifacts: vec![],
    })
}

fn decay_schedule(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let q = cfg.param("q") as u32;
    let schedule = neck_decay_schedule(
        cfg.param("L"),
        cfg.param("eps1"),
        cfg.param("Lambda"),
        q,
        cfg.param("j_max") as u32,
    )?;
    // sweep the contraction constant over all admissible q
    let q_max = cfg.param("q_sweep_max") as u32;
    let mut sweep_max = 0.0f64;
    for qi in 2..=q_max.max(2) {
        let half = 2f64.powf(-1.0 / qi as f64);
        sweep_max = sweep_max.max((1.0 - half) / 2.0 + half);
    }
    let half400 = 2f64.powf(-1.0 / 400.0);
    let c400 = (1.0 - half400) / 2.0 + half400;
    let checks = vec![
        CheckRecord::le("contraction", schedule.contraction, 1.0 - 1e-12),
        CheckRecord::le("contraction_sweep_max", sweep_max, 1.0 - 1e-12),
        CheckRecord::le("q400_value_dev", (c400 - 0.99913).abs(), 1e-5),
    ];
    let artifacts = if want_csv(cfg) {
        let mut rows = String::from("j,height,bound\n");
        for (j, &(height, bound)) in schedule.rows.iter().enumerate() {
            let _ = writeln!(rows, "{j},{height},{bound}");
        }
        vec![("schedule.csv".to_string(), rows)]
    } else {
        vec![]
    };
    Ok(Outcome {
        checks,
        summary: schedule.json_summary(),
        artifacts,
    })
}

// ---------------------------------------------------------------------------
// Density and entropy
// ---------------------------------------------------------------------------

fn entropy_gap(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let rho = cfg.param("rho");
    let sphere_r = cfg.param("sphere_radius");
    let cyl_r = cfg.param("cyl_radius");

    let plane = gaussian_density(
        &Surface::Plane { point: [0.0, 0.0, 0.0], normal: [0.0, 0.0, 1.0] },
        [0.0, 0.0, 0.0],
        rho,
    )?;
    let sphere = gaussian_density(
        &Surface::Sphere { center: [0.0, 0.0, 0.0], radius: sphere_r },
        [0.0, 0.0, 0.0],
        sphere_r / 2.0,
    )?;
    let cylinder = gaussian_density(
        &Surface::VerticalCylinder { axis_point: [0.0, 0.0, 0.0], radius: cyl_r },
        [0.0, 0.0, 0.0],
        cyl_r / 2f64.sqrt(),
    )?;

    let sphere_target = 4.0 / std::f64::consts::E;
    let cyl_target = (2.0 * PI / std::f64::consts::E).sqrt();
    let checks = vec![
        CheckRecord::le("plane_density_dev", (plane.value - 1.0).abs(), cfg.param("tol_plane")),
        CheckRecord::le(
            "sphere_density_dev",
            (sphere.value - sphere_target).abs(),
            cfg.param("tol_curved"),
        ),
        CheckRecord::le(
            "cylinder_density_dev",
            (cylinder.value - cyl_target).abs(),
            cfg.param("tol_curved"),
        ),
        CheckRecord::flag(
            "ordering_plane_sphere_cylinder",
            plane.value < sphere.value && sphere.value < cylinder.value,
        ),
    ];
    let summary = json!({
        "plane": plane.value,
        "sphere": sphere.value,
        "cylinder": cylinder.value,
        "sphere_target": sphere_target,
        "cylinder_target": cyl_target,
    });
    Ok(Outcome { checks, summary, artifacts: vec![] })
}

fn entropy_sweep(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let cyl_r = cfg.param("cyl_radius");
    let n_scales = cfg.param("n_scales") as usize;
    let (lo, hi) = (cfg.param("scale_min"), cfg.param("scale_max"));
    let scales: Vec<f64> = (0..n_scales.max(2))
        .map(|k| lo * (hi / lo).powf(k as f64 / (n_scales.max(2) - 1) as f64))
        .collect();
    let surface = Surface::VerticalCylinder { axis_point: [0.0, 0.0, 0.0], radius: cyl_r };
    let est = entropy_estimate(&surface, &[[0.0, 0.0, 0.0]], &scales)?;
    let cyl_target = (2.0 * PI / std::f64::consts::E).sqrt();
    let checks = vec![
        CheckRecord::le(
            "entropy_lower_bound_dev",
            (est.sup_density - cyl_target).abs(),
            cfg.param("tol_curved"),
        ),
        CheckRecord::le(
            "argmax_scale_dev",
            (est.argmax_scale - cyl_r / 2f64.sqrt()).abs(),
            0.25 * cyl_r,
        ),
    ];
    let artifacts = if want_csv(cfg) {
        vec![csv_artifact("entropy_sweep.csv", |w| est.write_csv(w))?]
    } else {
        vec![]
    };
    Ok(Outcome {
        checks,
        summary: est.json_summary(),
        artifacts,
    })
}

// ---------------------------------------------------------------------------
// Arclength multiplicity
// ---------------------------------------------------------------------------

fn catenoid_multiplicity(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let tol = cfg.param("tol");

    let neck = integrate_profile_arclength(
        ArclengthStart { r: cfg.param("neck_r"), z: 0.0, angle: PI / 2.0 },
        cfg.param("length"),
        tol,
    )?;
    let (_, neck_hi) = neck.z_range();
    let neck_sheets = neck.sheets_at_height(neck_hi * 0.8);

    let r0 = 1e-3;
    let bowl = integrate_profile_arclength(
        ArclengthStart {
            r: r0,
            z: r0 * r0 / 4.0,
            angle: (r0 / 2.0 - r0 * r0 * r0 / 96.0).atan(),
        },
        cfg.param("bowl_length"),
        tol,
    )?;
    let (_, bowl_hi) = bowl.z_range();
    let bowl_sheets = bowl.sheets_at_height(bowl_hi * 0.8);

    let checks = vec![
        CheckRecord::flag("neck_two_sheets", neck_sheets == 2),
        CheckRecord::ge("neck_height", neck_hi, 100.0),
        CheckRecord::flag("bowl_single_sheet", bowl_sheets == 1),
    ];
    let summary = json!({
        "neck_sheets": neck_sheets,
        "neck_top": neck_hi,
        "bowl_sheets": bowl_sheets,
        "bowl_top": bowl_hi,
    });
    let artifacts = if want_csv(cfg) {
        vec![
            csv_artifact("neck_profile.csv", |w| neck.write_csv(w))?,
            csv_artifact("bowl_profile.csv", |w| bowl.write_csv(w))?,
        ]
    } else {
        vec![]
    };
    Ok(Outcome { checks, summary, artifacts })
}

// ---------------------------------------------------------------------------
// Remaining single operations
// ---------------------------------------------------------------------------

fn bowl_profile_op(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let traj = integrate_phi(
        &PerturbationEnvelope::ZERO,
        cfg.param("s0"),
        cfg.param("phi0"),
        cfg.param("s_end"),
        cfg.param("tol"),
    )?;
    let prof = profile_from_phi(&traj, cfg.param("z_at_s0"))?;
    let (z_lo, z_hi) = prof.z_range();
    let checks = vec![CheckRecord::flag("graphical", prof.is_graph())];
    let summary = json!({
        "z_range": [z_lo, z_hi],
        "samples": prof.zr_samples().len(),
        "blowup": traj.blew_up(),
    });
    let artifacts = if want_csv(cfg) {
        vec![csv_artifact("profile.csv", |w| prof.write_csv(w))?]
    } else {
        vec![]
    };
    Ok(Outcome { checks, summary, artifacts })
}

fn fourier_split_op(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let grid = CylGrid::new(
        cfg.param("z_lo"),
        cfg.param("z_hi"),
        cfg.param("n_z") as usize,
        cfg.param("n_theta") as usize,
    )?;
    let amp = cfg.param("planted_amp");
    let mode = cfg.param("planted_mode") as usize;
    let p = cfg.param("planted_exp");
    let f = CylindricalGraphField::from_fn(grid, |z, th| {
        (2.0 * z).sqrt() + amp * z.powf(-p) * (mode as f64 * th).cos()
    })?;
    let split = fourier_split(&f)?;
    // planted-mode amplitude recovery at the first grid line
    let z0 = grid.z(0);
    let got = split.mode_norms[0].get(mode - 1).copied().unwrap_or(f64::NAN);
    let expect = amp * z0.powf(-p);
    // exact reconstruction: profile + remainder reproduces the field
    let mut recon_err = 0.0f64;
    for i in 0..grid.n_z {
        let f_mean = split.profile.zr_samples()[i].1;
        for j in 0..grid.n_theta {
            recon_err = recon_err.max((f_mean + split.remainder.v(i, j) - f.r(i, j)).abs());
        }
    }
    let checks = vec![
        CheckRecord::le("planted_mode_amplitude_dev", (got - expect).abs(), 1e-10),
        CheckRecord::le("reconstruction_error", recon_err, 1e-12),
    ];
    let summary = json!({
        "planted_mode": mode,
        "amplitude_at_z0": got,
        "expected_at_z0": expect,
        "reconstruction_error": recon_err,
    });
    let artifacts = if want_csv(cfg) {
        vec![csv_artifact("remainder.csv", |w| split.remainder.write_csv(w))?]
    } else {
        vec![]
    };
    Ok(Outcome { checks, summary, artifacts })
}

fn decay_fit_op(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let (c0, p0) = (cfg.param("c"), cfg.param("p"));
    let modulation = cfg.param("modulation");
    let n = cfg.param("n") as usize;
    let (z_lo, z_hi) = (cfg.param("z_lo"), cfg.param("z_hi"));
    let samples: Vec<(f64, f64)> = (0..n.max(2))
        .map(|k| {
            let z = z_lo * (z_hi / z_lo).powf(k as f64 / (n.max(2) - 1) as f64);
            (z, c0 * z.powf(-p0) * (1.0 + modulation * (3.0 * z).sin()).abs())
        })
        .collect();
    let fit = decay_exponent_fit(&samples)?;
    let p_fit = fit.p.unwrap_or(f64::NAN);
    let checks = vec![CheckRecord::le(
        "exponent_rel_error",
        (p_fit - p0).abs() / p0,
        cfg.param("fit_rel_tol"),
    )];
    let summary = json!({
        "planted": { "c": c0, "p": p0 },
        "fitted": { "c": fit.c, "p": fit.p },
        "exact_zero": fit.exact_zero,
    });
    Ok(Outcome { checks, summary, artifacts: vec![] })
}

fn symmetry_check_op(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let radius = cfg.param("radius");
    let amp = cfg.param("amp");
    let grid = CylGrid::new(
        cfg.param("z_lo"),
        cfg.param("z_hi"),
        cfg.param("n_z") as usize,
        cfg.param("n_theta") as usize,
    )?;
    let f = CylindricalGraphField::from_fn(grid, |z, th| {
        radius + amp * (-0.5 * (z - 8.0).powi(2)).exp() * th.cos()
    })?;
    let result = vertical_symmetry_check(&f, cfg.param("z_center"), cfg.param("eps"))?;
    let checks = vec![CheckRecord::flag("vertically_symmetric", result.pass)];
    Ok(Outcome {
        checks,
        summary: result.json_summary(),
        artifacts: vec![],
    })
}

fn cylindricality_check_op(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let result = vertical_cylindricality_check(
        SliceFamily::ShrinkingCylinders,
        cfg.param("z_center"),
        cfg.param("eps"),
    )?;
    let checks = vec![CheckRecord::flag("vertically_cylindrical", result.pass)];
    Ok(Outcome {
        checks,
        summary: result.json_summary(),
        artifacts: vec![],
    })
}

fn rescale_op(cfg: &ExperimentConfig) -> CoreResult<Outcome> {
    let radius = cfg.param("radius");
    let lambda = cfg.param("lambda");
    let grid = CylGrid::new(
        cfg.param("z_lo"),
        cfg.param("z_hi"),
        cfg.param("n_z") as usize,
        cfg.param("n_theta") as usize,
    )?;
    let f = CylindricalGraphField::from_fn(grid, |_, _| radius)?;
    let z_mid = 0.5 * (grid.z_min + grid.z_max);
    let scaled = parabolic_rescale(&f, [0.0, 0.0, z_mid], lambda, [0.0, 0.0, 0.0], None)?;
    let target = lambda * radius;
    let mut dev = 0.0f64;
    for &v in scaled.values() {
        dev = dev.max((v - target).abs());
    }
    let checks = vec![CheckRecord::le("cylinder_rescale_dev", dev, 1e-9)];
    let summary = json!({
        "lambda": lambda,
        "target_radius": target,
        "max_dev": dev,
        "out_grid": scaled.json_descriptor(),
    });
    let artifacts = if want_csv(cfg) {
        vec![csv_artifact("rescaled.csv", |w| scaled.write_csv(w))?]
    } else {
        vec![]
    };
    Ok(Outcome { checks, summary, artifacts })
}
