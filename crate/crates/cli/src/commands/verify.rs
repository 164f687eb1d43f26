use crate::config::RunConfig;
use crate::error::CliError;
use crate::inputs::load_pair;
use crate::output::ArtifactWriter;
use cone_ends::fields::{verify_normalized_pair, CheckItem, NormalizedPairReport};
use cone_ends::foliation::{
    dual_curvature, dual_curvature_inverse, phi_k_data, psi_kd_data, push_principal, EmbeddingReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const DEFAULT_CURVATURE: f64 = -0.5;
const SPOT_SAMPLES: usize = 200;
const INVOLUTION_TOL: f64 = 1e-14;
const PUSH_TOL: f64 = 1e-12;

#[derive(Serialize)]
struct VerifyDocument<'a> {
    source: &'a str,
    pair: &'a NormalizedPairReport,
    #[serde(rename = "K")]
    k: Option<f64>,
    #[serde(rename = "K_dual")]
    k_dual: Option<f64>,
    phi: Option<EmbeddingReport>,
    psi: Option<EmbeddingReport>,
    spot_checks: &'a [CheckItem],
    pass: bool,
}

/// Seeded spot checks of the duality involution and the pushing law.
fn spot_checks(seed: u64) -> Result<Vec<CheckItem>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut involution = 0.0f64;
    let mut push = 0.0f64;
    for _ in 0..SPOT_SAMPLES {
        let k: f64 = -rng.gen_range(f64::EPSILON..1.0);
        involution = involution.max((dual_curvature_inverse(dual_curvature(k)?)? - k).abs());
        let lambda: f64 = rng.gen_range(-0.99..0.99);
        let t: f64 = rng.gen_range(0.0..5.0);
        push = push.max((push_principal(lambda, t)? - (lambda.atanh() + t).tanh()).abs());
    }
    Ok(vec![
        CheckItem::new(
            "duality involution",
            involution <= INVOLUTION_TOL,
            involution,
            format!("{SPOT_SAMPLES} random K"),
        ),
        CheckItem::new("pushing law", push <= PUSH_TOL, push, format!("{SPOT_SAMPLES} random (lambda, t)")),
    ])
}

pub fn run(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let tol = &cfg.tolerances.core;
    let loaded = load_pair(cfg)?;
    let pair = verify_normalized_pair(&loaded.h, &loaded.h_prime, &loaded.b, tol)?;
    let spots = spot_checks(cfg.seed)?;
    let (k, k_dual, phi, psi) = if pair.all_pass() {
        let k = cfg.curvatures.as_ref().and_then(|c| c.first().copied()).unwrap_or(DEFAULT_CURVATURE);
        let kd = dual_curvature(k)?;
        let phi = phi_k_data(&loaded.h, &loaded.h_prime, &loaded.b, k, tol)?.audit(tol)?;
        let psi = psi_kd_data(&loaded.h, &loaded.h_prime, &loaded.b, kd, tol)?.audit(tol)?;
        (Some(k), Some(kd), Some(phi), Some(psi))
    } else {
        (None, None, None, None)
    };
    let audits_pass = phi.as_ref().is_some_and(|r| r.pass) && psi.as_ref().is_some_and(|r| r.pass);
    let spots_pass = spots.iter().all(|c| c.pass);
    let pass = pair.all_pass() && audits_pass && spots_pass;
    out.json(
        "verify_report.json",
        &VerifyDocument { source: &loaded.source, pair: &pair, k, k_dual, phi, psi, spot_checks: &spots, pass },
    )?;
    if !pair.all_pass() {
        let failed: Vec<&str> = pair.items.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        return Err(CliError::validation(
            "fields/normalized-pair",
            format!("normalized pair check failed: {}", failed.join(", ")),
        ));
    }
    if !pass {
        return Err(CliError::invariant("verify/invariant", "embedding audits or spot checks failed"));
    }
    Ok(())
}
