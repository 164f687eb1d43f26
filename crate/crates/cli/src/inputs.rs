use crate::config::{GermSpec, RunConfig};
use crate::error::CliError;
use cone_ends::fields::io::{from_json_str, FieldFile};
use cone_ends::fields::{ConeSignature, MetricField, OperatorField, ScalarField};
use cone_ends::fixtures::{genus_two_octagon_rep, one_holed_torus_rep, OctagonSurface, Perturbation};
use cone_ends::geom::Moebius;
use cone_ends::grafting::{HolonomyRep, MeasuredMulticurve, RepresentationFile};
use cone_ends::infinity::{data_from_qd, InfinityData, QuadDiff, DECLARED_CURVATURE_ROLE};
use cone_ends::linalg::{Mat2, Sym2};
use cone_ends::schwarzian::{Analytic, HolomorphicSample, Jet3, Polynomial};
use cone_ends::tol::Tolerances;
use num_complex::Complex64 as C;
use serde::de::DeserializeOwned;
use std::f64::consts::PI;
use std::path::Path;

pub const DATUM_FIXTURES: [&str; 3] = ["octagon-fuchsian", "octagon-perturbed", "pole-order-two"];
pub const REPRESENTATION_FIXTURES: [&str; 2] = ["one-holed-torus", "genus-two-octagon"];
pub const GERM_FIXTURES: [&str; 2] = ["moebius", "cone-germ"];
pub const PAIR_FIXTURES: [&str; 1] = ["normalized-pair"];

/// Perturbation size of the "octagon-perturbed" fixture.
const PERTURBED_EPS: f64 = 0.5;
/// Strength of the double pole in the "pole-order-two" fixture.
const DOUBLE_POLE: f64 = 0.05;

/// Weights role of a datum file, used for leaf areas.
pub const WEIGHTS_ROLE: &str = "w";

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io("io/read", format!("{}: {e}", path.display())))
}

/// Parses a JSON input; diagnostics carry the path, line and column.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_text(path)?;
    from_json_str(&text).map_err(|e| CliError::io("parse", format!("{}: {e}", path.display())))
}

fn unknown_fixture(kind: &str, name: &str, known: &[&str]) -> CliError {
    CliError::validation(
        "config/unknown-fixture",
        format!("unknown {kind} fixture {name:?}; known: {}", known.join(", ")),
    )
}

fn octagon(cfg: &RunConfig) -> Result<OctagonSurface, CliError> {
    let r = &cfg.resolution;
    Ok(OctagonSurface::with_cone_resolution(r.samples(), r.radial(), r.angular())?)
}

/// A built-in datum as the field file a user would supply.
pub fn datum_fixture(name: &str, cfg: &RunConfig) -> Result<FieldFile, CliError> {
    let surface = octagon(cfg)?;
    let q = match name {
        "octagon-fuchsian" => surface.quad_diff(&Perturbation::zero()),
        "octagon-perturbed" => surface.quad_diff(&Perturbation::default().scaled(PERTURBED_EPS)),
        "pole-order-two" => {
            let cones = surface.atlas.cone_charts();
            QuadDiff::from_fn(&surface.atlas, vec![1], |k, z| {
                if cones.contains(&k) {
                    C::new(DOUBLE_POLE, 0.0) / (z * z)
                } else {
                    C::new(0.0, 0.0)
                }
            })
        }
        _ => return Err(unknown_fixture("datum", name, &DATUM_FIXTURES)),
    };
    let mut file = FieldFile::new(&surface.atlas);
    file.push(&surface.hyperbolic_metric());
    q.write(&mut file);
    file.push(&ScalarField::constant(&surface.atlas, DECLARED_CURVATURE_ROLE, -1.0));
    file.push(&surface.weights.clone().with_role(WEIGHTS_ROLE));
    file.signature = Some(surface.signature.clone());
    Ok(file)
}

/// Data at infinity with optional quadrature weights and cone signature.
pub struct LoadedDatum {
    pub source: String,
    pub datum: InfinityData,
    pub weights: Option<ScalarField>,
    pub signature: Option<ConeSignature>,
}

/// Reads "I*" and either "q" (with declared poles) or "II*"; "K_I*" and "w" are optional.
pub fn datum_from_file(file: &FieldFile, tol: &Tolerances) -> Result<(InfinityData, Option<ScalarField>), CliError> {
    let atlas = file.atlas_arc()?;
    let istar: MetricField = file.get::<Sym2>(&atlas, "I*")?;
    let d = if file.has_role("q") {
        data_from_qd(&istar, &QuadDiff::read(file, &atlas, "q")?, tol)?
    } else if file.has_role("II*") {
        InfinityData::assemble(istar, file.get::<Sym2>(&atlas, "II*")?, None)?
    } else {
        return Err(CliError::io("parse", "datum file needs a \"q\" or an \"II*\" field"));
    };
    let declared = if file.has_role(DECLARED_CURVATURE_ROLE) {
        Some(file.get::<f64>(&atlas, DECLARED_CURVATURE_ROLE)?)
    } else {
        None
    };
    let weights = if file.has_role(WEIGHTS_ROLE) { Some(file.get::<f64>(&atlas, WEIGHTS_ROLE)?) } else { None };
    Ok((InfinityData { declared_curvature: declared, ..d }, weights))
}

pub fn load_datum(cfg: &RunConfig) -> Result<LoadedDatum, CliError> {
    let (file, source) = match &cfg.inputs.datum {
        Some(path) => (read_json::<FieldFile>(path)?, path.display().to_string()),
        None => {
            let name = cfg.inputs.fixture.as_deref().unwrap_or(DATUM_FIXTURES[0]);
            (datum_fixture(name, cfg)?, format!("fixture:{name}"))
        }
    };
    if let Some(sig) = &file.signature {
        sig.validate()?;
    }
    let (datum, weights) = datum_from_file(&file, &cfg.tolerances.core)?;
    Ok(LoadedDatum { source, datum, weights, signature: file.signature })
}

pub struct LoadedRepresentation {
    pub source: String,
    pub rep: HolonomyRep,
    pub multicurve: MeasuredMulticurve,
}

pub fn load_representation(cfg: &RunConfig) -> Result<LoadedRepresentation, CliError> {
    let (rep, fixture_curve, source) = match &cfg.inputs.representation {
        Some(path) => {
            let file: RepresentationFile = read_json(path)?;
            (HolonomyRep::from_file(&file)?, None, path.display().to_string())
        }
        None => {
            let name = cfg.inputs.fixture.as_deref().unwrap_or(REPRESENTATION_FIXTURES[0]);
            let (rep, curve) = match name {
                "one-holed-torus" => one_holed_torus_rep(PI / 2.0),
                "genus-two-octagon" => genus_two_octagon_rep(),
                _ => return Err(unknown_fixture("representation", name, &REPRESENTATION_FIXTURES)),
            };
            (rep, Some(curve), format!("fixture:{name}"))
        }
    };
    let multicurve = match (&cfg.inputs.multicurve, fixture_curve) {
        (Some(path), _) => read_json::<MeasuredMulticurve>(path)?,
        (None, Some(c)) => c,
        (None, None) => {
            return Err(CliError::validation("config/missing-input", "a representation file needs a multicurve file"))
        }
    };
    Ok(LoadedRepresentation { source, rep, multicurve: multicurve.scaled(cfg.weight_scale) })
}

pub fn germ_fixture(name: &str) -> Result<GermSpec, CliError> {
    match name {
        // z ↦ (1 + 0.5i)z / ((−0.3 + 0.2i)z + 1)
        "moebius" => Ok(GermSpec::Moebius { entries: [[1.0, 0.5], [0.0, 0.0], [-0.3, 0.2], [1.0, 0.0]] }),
        // z + z²
        "cone-germ" => Ok(GermSpec::Polynomial { coefficients: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.0]] }),
        _ => Err(unknown_fixture("germ", name, &GERM_FIXTURES)),
    }
}

pub fn load_germ_spec(cfg: &RunConfig) -> Result<(GermSpec, String), CliError> {
    if let Some(g) = &cfg.germ {
        return Ok((g.clone(), "config".into()));
    }
    if let Some(path) = &cfg.inputs.germ {
        return Ok((read_json(path)?, path.display().to_string()));
    }
    let name = cfg.inputs.fixture.as_deref().unwrap_or(GERM_FIXTURES[0]);
    Ok((germ_fixture(name)?, format!("fixture:{name}")))
}

/// A loaded germ; Möbius germs are flagged since their Schwarzian must vanish.
pub enum Germ {
    Moebius(Moebius),
    Polynomial(Polynomial),
    Power(Analytic<Box<dyn Fn(Jet3) -> Jet3>>),
}

impl Germ {
    pub fn sample(&self) -> &dyn HolomorphicSample {
        match self {
            Germ::Moebius(m) => m,
            Germ::Polynomial(p) => p,
            Germ::Power(a) => a,
        }
    }
}

pub fn build_germ(spec: &GermSpec) -> Result<Germ, CliError> {
    let c = |p: &[f64; 2]| C::new(p[0], p[1]);
    match spec {
        GermSpec::Moebius { entries } => {
            let [a, b, cc, d] = entries;
            Ok(Germ::Moebius(Moebius::new(c(a), c(b), c(cc), c(d))?))
        }
        GermSpec::Polynomial { coefficients } => {
            if coefficients.is_empty() {
                return Err(CliError::validation("schwarzian/invalid-germ", "polynomial needs coefficients"));
            }
            Ok(Germ::Polynomial(Polynomial(coefficients.iter().map(c).collect())))
        }
        GermSpec::Power { exponent } => {
            let k = *exponent;
            if !k.is_finite() || k == 0.0 {
                return Err(CliError::validation(
                    "schwarzian/invalid-germ",
                    format!("exponent {k} must be finite and non-zero"),
                ));
            }
            Ok(Germ::Power(Analytic::new(Box::new(move |x: Jet3| x.powf(k)))))
        }
    }
}

/// Metric pair and morphism of the verifier.
pub struct LoadedPair {
    pub source: String,
    pub h: MetricField,
    pub h_prime: MetricField,
    pub b: OperatorField,
}

pub fn pair_fixture(name: &str, cfg: &RunConfig) -> Result<FieldFile, CliError> {
    if name != PAIR_FIXTURES[0] {
        return Err(unknown_fixture("pair", name, &PAIR_FIXTURES));
    }
    let surface = octagon(cfg)?;
    let h = surface.hyperbolic_metric();
    let mut file = FieldFile::new(&surface.atlas);
    file.push(&h.clone().with_role("h"));
    file.push(&h.with_role("h'"));
    file.push(&OperatorField::constant(&surface.atlas, "b", Mat2::scalar(1.0)));
    file.signature = Some(surface.signature.clone());
    Ok(file)
}

pub fn load_pair(cfg: &RunConfig) -> Result<LoadedPair, CliError> {
    let (file, source) = match &cfg.inputs.pair {
        Some(path) => (read_json::<FieldFile>(path)?, path.display().to_string()),
        None => {
            let name = cfg.inputs.fixture.as_deref().unwrap_or(PAIR_FIXTURES[0]);
            (pair_fixture(name, cfg)?, format!("fixture:{name}"))
        }
    };
    let atlas = file.atlas_arc()?;
    Ok(LoadedPair {
        source,
        h: file.get::<Sym2>(&atlas, "h")?,
        h_prime: file.get::<Sym2>(&atlas, "h'")?,
        b: file.get::<Mat2>(&atlas, "b")?,
    })
}
