use crate::config::{GermSpec, RunConfig};
use crate::error::CliError;
use crate::inputs::{build_germ, load_germ_spec, Germ};
use crate::output::ArtifactWriter;
use cone_ends::schwarzian::{cocycle_check, cone_schwarzian_expansion, schwarzian, ConeExpansionReport, Polynomial};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Samples on the circle |z − centre| = radius.
const SAMPLE_CENTER: C = C::new(0.5, 0.0);
const SAMPLE_RADIUS: f64 = 0.25;
const SAMPLE_COUNT: usize = 16;
const COCYCLE_SAMPLES: usize = 20;
pub const DEFAULT_THETAS: [f64; 3] = [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0];

#[derive(Serialize)]
struct Sample {
    z: [f64; 2],
    s: [f64; 2],
}

#[derive(Serialize)]
struct ConeEntry {
    theta: f64,
    report: Option<ConeExpansionReport>,
    error: Option<String>,
}

#[derive(Serialize)]
struct SchwarzianDocument<'a> {
    source: &'a str,
    germ: &'a GermSpec,
    samples: Vec<Sample>,
    max_abs: f64,
    /// Set for Möbius germs, whose Schwarzian vanishes identically.
    kernel_tolerance: Option<f64>,
    cocycle_samples: usize,
    cocycle_residual: f64,
    cone: Vec<ConeEntry>,
    pass: bool,
}

fn pair(z: C) -> [f64; 2] {
    [z.re, z.im]
}

fn rc(rng: &mut ChaCha8Rng, s: f64) -> C {
    C::new(rng.gen_range(-s..s), rng.gen_range(-s..s))
}

pub fn run(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let (spec, source) = load_germ_spec(cfg)?;
    let germ = build_germ(&spec)?;
    let f = germ.sample();
    let mut samples = Vec::with_capacity(SAMPLE_COUNT);
    let mut max_abs = 0.0f64;
    for j in 0..SAMPLE_COUNT {
        let z = SAMPLE_CENTER + C::from_polar(SAMPLE_RADIUS, 2.0 * PI * j as f64 / SAMPLE_COUNT as f64);
        let s = schwarzian(f, z)?;
        max_abs = max_abs.max(s.norm());
        samples.push(Sample { z: pair(z), s: pair(s) });
    }

    // inner maps stay near the sample centre, away from critical points of the germ
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cocycle_residual = 0.0f64;
    for _ in 0..COCYCLE_SAMPLES {
        let inner = Polynomial(vec![
            SAMPLE_CENTER + rc(&mut rng, 0.05),
            C::new(1.0, 0.0) + rc(&mut rng, 0.3),
            rc(&mut rng, 0.3),
        ]);
        let z = rc(&mut rng, 0.1);
        cocycle_residual = cocycle_residual.max(cocycle_check(f, &inner, z)?);
    }

    let thetas = cfg.thetas.clone().unwrap_or_else(|| DEFAULT_THETAS.to_vec());
    let cone = thetas
        .iter()
        .map(|&theta| match cone_schwarzian_expansion(f, theta) {
            Ok(r) => ConeEntry { theta, report: Some(r), error: None },
            Err(e) => ConeEntry { theta, report: None, error: Some(e.to_string()) },
        })
        .collect();

    let kernel_tolerance = matches!(germ, Germ::Moebius(_)).then_some(cfg.tolerances.schwarzian);
    let pass = kernel_tolerance.is_none_or(|t| max_abs <= t);
    out.json(
        "schwarzian_report.json",
        &SchwarzianDocument {
            source: &source,
            germ: &spec,
            samples,
            max_abs,
            kernel_tolerance,
            cocycle_samples: COCYCLE_SAMPLES,
            cocycle_residual,
            cone,
            pass,
        },
    )?;
    if !pass {
        return Err(CliError::invariant(
            "schwarzian/moebius-kernel",
            format!("Möbius germ has max |S| = {max_abs:.3e} above {:.1e}", cfg.tolerances.schwarzian),
        ));
    }
    Ok(())
}
