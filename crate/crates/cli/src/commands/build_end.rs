use crate::config::RunConfig;
use crate::error::CliError;
use crate::inputs::load_datum;
use crate::output::{num, ArtifactWriter};
use cone_ends::family::{
    build_family, curvature_field, eigenvalues_at, leaf_report, leaf_rows, FamilyOptions, LeafReport,
};
use cone_ends::infinity::{condition_star_report, StarReport};
use serde::Serialize;

/// Default parameter grid: the threshold, 0 and four Δr steps.
const DEFAULT_DELTA_R: f64 = 0.5;
const DEFAULT_STEPS: usize = 4;

#[derive(Serialize)]
struct StarDocument<'a> {
    source: &'a str,
    pass: bool,
    star: &'a StarReport,
}

#[derive(Serialize)]
struct FamilyDocument<'a> {
    source: &'a str,
    side: cone_ends::family::Side,
    start: f64,
    r_max: f64,
    params: &'a [f64],
    leaves: &'a [LeafReport],
    pass: bool,
}

fn parameter_grid(cfg: &RunConfig, start: f64, r_max: f64) -> Result<Vec<f64>, CliError> {
    let params = match &cfg.params {
        Some(p) => {
            if let Some(bad) = p.iter().find(|p| !(**p >= start && **p <= r_max)) {
                return Err(CliError::validation(
                    "family/out-of-range",
                    format!("parameter {bad} outside the convex range [{start}, {r_max}]"),
                ));
            }
            p.clone()
        }
        None => {
            let dr = cfg.resolution.delta_r.unwrap_or(DEFAULT_DELTA_R);
            let mut p = vec![start, 0.0];
            p.extend((1..=DEFAULT_STEPS).map(|k| k as f64 * dr));
            p.retain(|v| *v >= start && *v <= r_max);
            p
        }
    };
    let mut p = params;
    p.sort_by(f64::total_cmp);
    p.dedup();
    Ok(p)
}

pub fn run(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let tol = &cfg.tolerances.core;
    let loaded = load_datum(cfg)?;
    let star = condition_star_report(&loaded.datum, tol)?;
    out.json("star_report.json", &StarDocument { source: &loaded.source, pass: star.all_pass(), star: &star })?;
    if !star.all_pass() {
        return Err(CliError::validation(
            "infinity/rejected-datum",
            format!("Condition (★) failed: {}", star.summary()),
        ));
    }
    let opts = FamilyOptions { search_floor: cfg.search_floor, r_max: None };
    let family = build_family(&loaded.datum, cfg.side, tol, &opts)?;
    let params = parameter_grid(cfg, family.start, family.r_max)?;

    let mut summary = Vec::with_capacity(params.len());
    let mut residuals = Vec::with_capacity(params.len());
    let mut dump = Vec::new();
    let mut reports = Vec::with_capacity(params.len());
    for &p in &params {
        let (lam, mu) = eigenvalues_at(&family, p)?;
        let k = curvature_field(&family, p);
        let convex = mu.min() > 0.0;
        summary.push(vec![
            num(p),
            num(k.min()),
            num(k.max()),
            num(lam.min()),
            num(lam.max()),
            num(mu.min()),
            num(mu.max()),
            convex.to_string(),
        ]);
        let report = leaf_report(&family, p, tol)?;
        residuals.push(vec![
            num(p),
            num(report.self_adjoint),
            num(report.gauss_closed_form),
            num(report.gauss_fd.fine_max),
            num(report.gauss_fd.coarse_max),
            num(report.gauss_fd.observed_order),
            num(report.codazzi.fine_max),
            num(report.codazzi.coarse_max),
            num(report.codazzi.observed_order),
            report.pass.to_string(),
        ]);
        reports.push(report);
        for row in leaf_rows(&family, p)? {
            dump.push(vec![
                row.chart_id,
                row.i.to_string(),
                row.j.to_string(),
                num(row.param),
                num(row.k),
                num(row.lambda),
                num(row.mu),
                num(row.det_b),
                num(row.gauss_residual),
            ]);
        }
    }
    out.csv(
        "family.csv",
        &["param", "K_min", "K_max", "lambda_min", "lambda_max", "mu_min", "mu_max", "convex"],
        &summary,
    )?;
    out.csv(
        "residuals.csv",
        &[
            "param",
            "self_adjoint",
            "gauss_closed_form",
            "gauss_fd_fine",
            "gauss_fd_coarse",
            "gauss_fd_order",
            "codazzi_fine",
            "codazzi_coarse",
            "codazzi_order",
            "pass",
        ],
        &residuals,
    )?;
    out.csv("leaf_dump.csv", &["chart_id", "i", "j", "param", "K", "lambda", "mu", "det_B", "gauss_residual"], &dump)?;
    let pass = reports.iter().all(|r| r.pass);
    out.json(
        "family_report.json",
        &FamilyDocument {
            source: &loaded.source,
            side: family.side,
            start: family.start,
            r_max: family.r_max,
            params: &params,
            leaves: &reports,
            pass,
        },
    )?;
    if !pass {
        let failed: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| r.param.to_string()).collect();
        return Err(CliError::invariant(
            "family/gauss-codazzi",
            format!("leaf audit failed at parameters {}", failed.join(", ")),
        ));
    }
    Ok(())
}
