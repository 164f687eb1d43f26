use crate::config::RunConfig;
use crate::error::CliError;
use crate::inputs::load_representation;
use crate::output::ArtifactWriter;
use cone_ends::grafting::{
    graft_holonomy, BendingCocycle, HolonomyReport, Letter, MeasuredMulticurve, RepresentationFile, RotationSense, Word,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Random word triples for the cocycle and equivariance checks.
const WORD_SAMPLES: usize = 20;
const MAX_WORD_LEN: usize = 5;

#[derive(Serialize)]
struct GraftDocument<'a> {
    source: &'a str,
    sense: RotationSense,
    weight_scale: f64,
    multicurve: &'a MeasuredMulticurve,
    input: &'a HolonomyReport,
    grafted: &'a HolonomyReport,
    word_samples: usize,
    cocycle_residual: f64,
    equivariance_residual: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct RepresentationDocument<'a> {
    header: &'a crate::output::Header,
    #[serde(flatten)]
    file: RepresentationFile,
}

fn random_word(rng: &mut ChaCha8Rng, generators: usize) -> Word {
    let len = rng.gen_range(1..=MAX_WORD_LEN);
    Word { letters: (0..len).map(|_| Letter { generator: rng.gen_range(0..generators), inverse: rng.gen() }).collect() }
}

pub fn run(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let tol = cfg.tolerances.holonomy;
    let loaded = load_representation(cfg)?;
    let input = loaded.rep.report(tol);
    if !input.pass {
        return Err(CliError::validation(
            "grafting/invalid-representation",
            format!(
                "input representation fails its invariants (relation {:.2e}, cone {:?}, fuchsian {})",
                input.relation_residual, input.cone_residuals, input.fuchsian
            ),
        ));
    }
    let cocycle = BendingCocycle::new(&loaded.rep, &loaded.multicurve, cfg.sense)?;
    let grafted_rep = graft_holonomy(&loaded.rep, &loaded.multicurve, cfg.sense)?;
    let grafted = grafted_rep.report(tol);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = loaded.rep.group.names.len();
    let (mut cocycle_residual, mut equivariance_residual) = (0.0f64, 0.0f64);
    for _ in 0..WORD_SAMPLES {
        let (u, v, w) = (random_word(&mut rng, n), random_word(&mut rng, n), random_word(&mut rng, n));
        cocycle_residual = cocycle_residual.max(cocycle.cocycle_residual(&u, &v, &w));
        equivariance_residual = equivariance_residual.max(cocycle.equivariance_residual(&w, &u, &v));
    }
    let pass = grafted.pass && cocycle_residual <= tol && equivariance_residual <= tol;
    out.json(
        "graft_report.json",
        &GraftDocument {
            source: &loaded.source,
            sense: cfg.sense,
            weight_scale: cfg.weight_scale,
            multicurve: &loaded.multicurve,
            input: &input,
            grafted: &grafted,
            word_samples: WORD_SAMPLES,
            cocycle_residual,
            equivariance_residual,
            tolerance: tol,
            pass,
        },
    )?;
    let doc = RepresentationDocument { header: out.header(), file: grafted_rep.to_file() };
    let text = cone_ends::fields::io::to_json_string(&doc)?;
    out.text("grafted_representation.json", &text)?;
    if !pass {
        return Err(CliError::invariant(
            "grafting/invariant",
            format!(
                "grafted holonomy fails (relation {:.2e}, cone {:?}, cocycle {cocycle_residual:.2e}, equivariance {equivariance_residual:.2e})",
                grafted.relation_residual, grafted.cone_residuals
            ),
        ));
    }
    Ok(())
}
