use crate::config::RunConfig;
use crate::error::CliError;
use crate::inputs::load_datum;
use crate::output::{line_plot_svg, num, ArtifactWriter};
use cone_ends::family::{build_family, EndFamily, FamilyOptions};
use cone_ends::fields::area;
use cone_ends::foliation::{
    attainable_range, dualize_surface, foliation_sweep, SolverOptions, SweepReport, AREA_TOLERANCE,
};
use serde::Serialize;

/// Number of leaves in the default curvature grid.
pub const DEFAULT_LEAVES: usize = 16;
/// The default grid spans these fractions of the lower end of the attainable range.
const GRID_FRACTIONS: (f64, f64) = (0.95, 0.05);

/// Log-spaced curvatures between 0.95·lo and 0.05·lo, increasing.
pub fn default_curvatures(f: &EndFamily) -> Vec<f64> {
    let (lo, _) = attainable_range(f);
    let (a, b) = (GRID_FRACTIONS.0.ln(), GRID_FRACTIONS.1.ln());
    (0..DEFAULT_LEAVES).map(|i| lo * (a + (b - a) * i as f64 / (DEFAULT_LEAVES - 1) as f64).exp()).collect()
}

#[derive(Serialize)]
struct DualRow {
    #[serde(rename = "K_dual")]
    k_dual: f64,
    /// max |K from the dual shape operator − K_dual|.
    residual: f64,
    area: Option<f64>,
    gauss_fd: f64,
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    source: &'a str,
    attainable: (f64, f64),
    sweep: &'a SweepReport,
    dual: Option<&'a [DualRow]>,
    area_tolerance: f64,
    pass: bool,
}

pub fn run(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let tol = &cfg.tolerances.core;
    let loaded = load_datum(cfg)?;
    let opts = FamilyOptions { search_floor: cfg.search_floor, r_max: None };
    let family = build_family(&loaded.datum, cfg.side, tol, &opts)?;
    let ks = cfg.curvatures.clone().unwrap_or_else(|| default_curvatures(&family));
    if ks.is_empty() || ks.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(CliError::validation(
            "foliation/curvature-grid",
            format!("curvature grid {ks:?} must be non-empty and strictly increasing"),
        ));
    }
    let (leaves, sweep) = foliation_sweep(
        &family,
        &ks,
        tol,
        &SolverOptions::default(),
        loaded.weights.as_ref(),
        loaded.signature.as_ref(),
    )?;

    let dual: Option<Vec<DualRow>> = if cfg.dualize {
        let mut rows = Vec::with_capacity(leaves.len());
        for (leaf, row) in leaves.iter().zip(&sweep.rows) {
            let d = dualize_surface(&leaf.embedding()).map_err(super::dual_rejected)?;
            let residual =
                d.gauss_curvature_from_shape().iter().map(|(_, _, k)| (k - row.k_dual).abs()).fold(0.0f64, f64::max);
            let dual_area = match &loaded.weights {
                Some(w) => Some(area(&d.metric, Some(w))?),
                None => None,
            };
            let gauss_fd = d.audit(tol)?.gauss.fine_max;
            rows.push(DualRow { k_dual: row.k_dual, residual, area: dual_area, gauss_fd });
        }
        Some(rows)
    } else {
        None
    };

    let mut columns = vec!["K", "K_dual", "r_mean", "r_min", "r_max", "area", "area_gb", "residual"];
    if dual.is_some() {
        columns.extend(["dual_residual", "dual_area", "dual_gauss_fd"]);
    }
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let rows: Vec<Vec<String>> = sweep
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = vec![
                num(r.k),
                num(r.k_dual),
                num(r.r_mean),
                num(r.r_min),
                num(r.r_max),
                num(r.area),
                opt(r.area_gb),
                num(r.residual),
            ];
            if let Some(d) = &dual {
                row.extend([num(d[i].residual), opt(d[i].area), num(d[i].gauss_fd)]);
            }
            row
        })
        .collect();
    out.csv("leaves.csv", &columns, &rows)?;

    let points: Vec<(f64, f64)> = sweep.rows.iter().map(|r| (r.r_mean, r.k.abs().ln())).collect();
    let svg = line_plot_svg(out.header(), "Constant curvature leaves", "mean parameter r", "log |K|", &points);
    out.text("profile.svg", &svg)?;

    let pass = sweep.pass();
    out.json(
        "sweep_report.json",
        &SweepDocument {
            source: &loaded.source,
            attainable: attainable_range(&family),
            sweep: &sweep,
            dual: dual.as_deref(),
            area_tolerance: AREA_TOLERANCE,
            pass,
        },
    )?;
    if !sweep.nested {
        return Err(CliError::invariant("foliation/not-nested", "leaves are not strictly nested in K"));
    }
    if let Some(e) = sweep.max_area_error.filter(|e| *e > AREA_TOLERANCE) {
        return Err(CliError::invariant(
            "foliation/area",
            format!("leaf area differs from Gauss-Bonnet by {:.3}% (> {:.0}%)", 100.0 * e, 100.0 * AREA_TOLERANCE),
        ));
    }
    Ok(())
}
