use crate::config::RunConfig;
use crate::error::CliError;
use crate::inputs::load_datum;
use crate::output::ArtifactWriter;
use cone_ends::family::{build_family, FamilyOptions, Side};
use cone_ends::fields::io::FieldFile;
use cone_ends::foliation::{
    dual_curvature, dual_curvature_inverse, dualize_surface, solve_leaf, EmbeddingData, EmbeddingReport, SolveMethod,
    SolverOptions,
};
use serde::Serialize;

pub const DEFAULT_CURVATURE: f64 = -0.5;
/// Bound on the double-dualization round trip, relative to the sup norm.
const ROUND_TRIP_TOL: f64 = 1e-10;

#[derive(Serialize)]
struct DualizeDocument<'a> {
    source: &'a str,
    side: Side,
    #[serde(rename = "K")]
    k: f64,
    #[serde(rename = "K_dual")]
    k_dual: f64,
    method: SolveMethod,
    iterations: usize,
    leaf_residual: f64,
    /// max |K from the dual shape operator − dual of the leaf's shape curvature|.
    dual_identity: f64,
    round_trip: f64,
    leaf: &'a EmbeddingReport,
    dual: &'a EmbeddingReport,
    pass: bool,
}

fn round_trip_gap(e: &EmbeddingData, twice: &EmbeddingData) -> f64 {
    let metric_scale = e.metric.iter().map(|(_, _, m)| m.max_abs()).fold(0.0f64, f64::max).max(1e-300);
    let shape_scale = e.shape.iter().map(|(_, _, m)| m.max_abs()).fold(0.0f64, f64::max).max(1e-300);
    let metric = twice
        .metric
        .iter()
        .map(|(k, i, m)| (*m - e.metric.values[k][i]).max_abs() / metric_scale)
        .fold(0.0f64, f64::max);
    let shape =
        twice.shape.iter().map(|(k, i, m)| (*m - e.shape.values[k][i]).max_abs() / shape_scale).fold(0.0f64, f64::max);
    metric.max(shape)
}

pub fn run(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let tol = &cfg.tolerances.core;
    let loaded = load_datum(cfg)?;
    let opts = FamilyOptions { search_floor: cfg.search_floor, r_max: None };
    let family = build_family(&loaded.datum, cfg.side, tol, &opts)?;
    let k = cfg.curvatures.as_ref().and_then(|c| c.first().copied()).unwrap_or(DEFAULT_CURVATURE);
    let leaf = solve_leaf(&family, k, tol, &SolverOptions::default())?;
    let e = leaf.embedding();
    let d = dualize_surface(&e).map_err(super::dual_rejected)?;
    let k_dual = match cfg.side {
        Side::Hyperbolic => dual_curvature(k)?,
        Side::DeSitter => dual_curvature_inverse(k)?,
    };
    let to_dual = |kk: f64| match cfg.side {
        Side::Hyperbolic => dual_curvature(kk),
        Side::DeSitter => dual_curvature_inverse(kk),
    };
    let leaf_k = e.gauss_curvature_from_shape();
    let mut dual_identity = 0.0f64;
    for (c, i, kd) in d.gauss_curvature_from_shape().iter() {
        dual_identity = dual_identity.max((kd - to_dual(leaf_k.values[c][i])?).abs());
    }
    let round_trip = round_trip_gap(&e, &dualize_surface(&d).map_err(super::dual_rejected)?);
    let leaf_report = e.audit(tol)?;
    let dual_report = d.audit(tol)?;
    let pass = leaf_report.pass && dual_report.pass && dual_identity <= tol.closed_form && round_trip <= ROUND_TRIP_TOL;
    out.json(
        "dualize_report.json",
        &DualizeDocument {
            source: &loaded.source,
            side: cfg.side,
            k,
            k_dual,
            method: leaf.method,
            iterations: leaf.iterations(),
            leaf_residual: leaf.residual,
            dual_identity,
            round_trip,
            leaf: &leaf_report,
            dual: &dual_report,
            pass,
        },
    )?;
    let mut file = FieldFile::new(&d.metric.atlas);
    file.push(&d.metric.clone().with_role("I"));
    file.push(&d.shape.clone().with_role("B"));
    file.signature = loaded.signature.clone();
    out.fields("dual_surface.json", file)?;
    if !pass {
        return Err(CliError::invariant(
            "foliation/duality",
            format!(
                "dual surface audit failed (leaf {}, dual {}, identity {dual_identity:.2e}, round trip {round_trip:.2e})",
                leaf_report.pass, dual_report.pass
            ),
        ));
    }
    Ok(())
}
