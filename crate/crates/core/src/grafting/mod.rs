//! Grafting along weighted multicurves at the level of holonomy.
//!
//! A multicurve carries, for every generator, the ordered list of lifts its
//! path from x₀ to g·x₀ crosses. Each crossing inserts a rotation about the
//! crossed lift's axis, and the bend of a generator is the ordered product.

mod rep;
mod word;

pub use rep::{
    ConeLoopEntry, GeneratorEntry, HolonomyRep, HolonomyReport, RepKind, RepresentationFile, SurfaceGroupPresentation,
    HOLONOMY_TOL,
};
pub use word::{Letter, Word};

use crate::geom::{classify, elliptic_about_axis, Classification, IdealPoint, Moebius};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// One crossing of a generator path with a lift of a curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Generator whose path from x₀ to g·x₀ crosses the lift.
    pub generator: String,
    /// Order along that path; position 0 is nearest x₀.
    pub position: u32,
    /// +1 or −1 according to the side from which the path crosses.
    pub sign: i32,
    /// Word h with the crossed lift equal to h applied to the curve's axis;
    /// absent for the axis of ρ(curve) itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedCurve {
    /// Free-homotopy class as a word in the generators.
    pub word: String,
    pub weight: f64,
    #[serde(default)]
    pub crossings: Vec<Crossing>,
}

/// Disjoint simple closed curves with positive weights. Disjointness and the
/// crossing record are declared input, not checked geometrically.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasuredMulticurve {
    pub curves: Vec<WeightedCurve>,
}

impl MeasuredMulticurve {
    pub fn empty() -> Self {
        MeasuredMulticurve { curves: Vec::new() }
    }

    /// The same curves with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let curves = self.curves.iter().map(|c| WeightedCurve { weight: c.weight * factor, ..c.clone() }).collect();
        MeasuredMulticurve { curves }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("multicurve serializes")
    }
}

/// Which way the inserted rotations turn about the oriented axis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationSense {
    /// Rotation by +t about the axis oriented from repelling to attracting fixed point.
    #[default]
    Positive,
    Negative,
}

impl RotationSense {
    fn sign(self) -> f64 {
        match self {
            RotationSense::Positive => 1.0,
            RotationSense::Negative => -1.0,
        }
    }
}

/// Oriented axis of a hyperbolic element, from repelling to attracting fixed point.
pub fn hyperbolic_axis(m: &Moebius) -> Option<(IdealPoint, IdealPoint)> {
    match classify(m) {
        Classification::Hyperbolic { length } if length.re > HOLONOMY_TOL => Some(m.fixed_points()),
        _ => None,
    }
}

/// The bending cocycle β of a multicurve over a base representation, with
/// β(x₀, g·x₀) computed eagerly for every generator.
///
/// Conventions: β(x, y)·β(y, z) = β(x, z) and β(γx, γy) = ρ(γ)β(x, y)ρ(γ)⁻¹.
/// For a path crossing lifts L₁, …, L_m in order from x₀, β(x₀, g·x₀) = R₁⋯R_m.
#[derive(Clone, Debug)]
pub struct BendingCocycle {
    base: HolonomyRep,
    bends: Vec<Moebius>,
}

impl BendingCocycle {
    pub fn new(base: &HolonomyRep, lambda: &MeasuredMulticurve, sense: RotationSense) -> Result<Self> {
        let group = &base.group;
        let mut per_generator: Vec<Vec<(u32, Moebius)>> = vec![Vec::new(); group.names.len()];
        for (i, curve) in lambda.curves.iter().enumerate() {
            if !(curve.weight > 0.0) || !curve.weight.is_finite() {
                return Err(Error::InvalidMulticurve(format!("curve {i} has weight {}", curve.weight)));
            }
            let word =
                group.parse_word(&curve.word).map_err(|e| Error::InvalidMulticurve(format!("curve {i}: {e}")))?;
            let core = word.cyclically_reduced();
            if core.letters.iter().all(|l| group.cone_indices().contains(&l.generator)) {
                return Err(Error::InvalidMulticurve(format!("curve {i} is peripheral about a cone point")));
            }
            let (p, q) = hyperbolic_axis(&base.eval(&word)).ok_or_else(|| {
                Error::InvalidMulticurve(format!("curve {i} ({}) has non-hyperbolic image", curve.word))
            })?;
            for x in &curve.crossings {
                let g = group.index_of(&x.generator).ok_or_else(|| {
                    Error::InvalidMulticurve(format!("curve {i}: unknown generator {:?}", x.generator))
                })?;
                if x.sign != 1 && x.sign != -1 {
                    return Err(Error::InvalidMulticurve(format!("curve {i}: crossing sign {} not ±1", x.sign)));
                }
                let h = match &x.conjugator {
                    Some(text) => base.eval(
                        &group.parse_word(text).map_err(|e| Error::InvalidMulticurve(format!("curve {i}: {e}")))?,
                    ),
                    None => Moebius::identity(),
                };
                let angle = sense.sign() * f64::from(x.sign) * curve.weight;
                let rotation = elliptic_about_axis(h.apply(p), h.apply(q), angle)
                    .map_err(|e| Error::InvalidMulticurve(format!("curve {i}: {e}")))?;
                per_generator[g].push((x.position, rotation));
            }
        }
        let mut bends = Vec::with_capacity(per_generator.len());
        for (g, mut list) in per_generator.into_iter().enumerate() {
            list.sort_by_key(|(pos, _)| *pos);
            if list.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidMulticurve(format!(
                    "generator {:?} has two crossings at the same position",
                    group.names[g]
                )));
            }
            let bend = list.iter().fold(Moebius::identity(), |acc, (_, r)| acc * *r);
            bends.push(bend.renormalized());
        }
        Ok(BendingCocycle { base: base.clone(), bends })
    }

    pub fn base(&self) -> &HolonomyRep {
        &self.base
    }

    /// β(x₀, g·x₀) for generator index `g`.
    pub fn generator_bend(&self, g: usize) -> Moebius {
        self.bends[g]
    }

    /// β(x₀, w·x₀) = ρ_λ(w)·ρ(w)⁻¹, where ρ_λ(g) = β(x₀, g·x₀)·ρ(g) on generators.
    pub fn at_base(&self, w: &Word) -> Moebius {
        let mut bent = Moebius::identity();
        for l in &w.letters {
            let g = self.bends[l.generator] * self.base.images[l.generator];
            bent = bent * if l.inverse { g.inverse() } else { g };
        }
        bent * self.base.eval(w).inverse()
    }

    /// β(u·x₀, v·x₀) = ρ(u) β(x₀, u⁻¹v·x₀) ρ(u)⁻¹.
    pub fn between(&self, u: &Word, v: &Word) -> Moebius {
        let rel = u.inverse().concat(v).reduced();
        self.at_base(&rel).conjugate_by(&self.base.eval(u))
    }

    /// Roundoff scale of evaluations at the orbit points of `words`: the squared
    /// largest entry of ρ over the words and the words leading between them.
    fn orbit_scale(&self, words: &[&Word]) -> f64 {
        let mut m = 1.0f64;
        for (i, u) in words.iter().enumerate() {
            m = m.max(max_entry(&self.base.eval(u)));
            for v in &words[i + 1..] {
                m = m.max(max_entry(&self.base.eval(&u.inverse().concat(v).reduced())));
            }
        }
        m * m
    }

    /// |β(x, y)β(y, z) − β(x, z)| for the orbit points x = u·x₀, y = v·x₀, z = w·x₀,
    /// relative to the size of the factors and the roundoff scale of the orbit.
    pub fn cocycle_residual(&self, u: &Word, v: &Word, w: &Word) -> f64 {
        let (xy, yz, xz) = (self.between(u, v), self.between(v, w), self.between(u, w));
        let size = (max_entry(&xy) * max_entry(&yz)).max(max_entry(&xz)).max(1.0);
        (xy * yz).proj_distance(&xz) / (size * self.orbit_scale(&[u, v, w]))
    }

    /// |β(γx, γy) − ρ(γ)β(x, y)ρ(γ)⁻¹| for x = u·x₀, y = v·x₀, relative to the size
    /// of the factors and the roundoff scale of the orbit.
    pub fn equivariance_residual(&self, gamma: &Word, u: &Word, v: &Word) -> f64 {
        let (gu, gv) = (gamma.concat(u), gamma.concat(v));
        let lhs = self.between(&gu, &gv);
        let inner = self.between(u, v);
        let rhs = inner.conjugate_by(&self.base.eval(gamma));
        let size = max_entry(&inner).max(max_entry(&lhs)).max(1.0);
        lhs.proj_distance(&rhs) / (size * self.orbit_scale(&[&Word::empty(), gamma, u, v, &gu, &gv]))
    }

    /// The bent representation g ↦ β(x₀, g·x₀)·ρ(g).
    pub fn bent(&self) -> HolonomyRep {
        let images = self.bends.iter().zip(&self.base.images).map(|(b, m)| (*b * *m).renormalized()).collect();
        HolonomyRep { images, kind: RepKind::Complex, ..self.base.clone() }
    }
}

fn max_entry(m: &Moebius) -> f64 {
    m.entries().iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

/// Grafted holonomy ρ_λ of a Fuchsian representation along a measured multicurve.
pub fn graft_holonomy(rho: &HolonomyRep, lambda: &MeasuredMulticurve, sense: RotationSense) -> Result<HolonomyRep> {
    if !rho.is_fuchsian(HOLONOMY_TOL) {
        return Err(Error::InvalidRepresentation(format!(
            "grafting needs a Fuchsian input; traces deviate from real by {:e}",
            rho.trace_imaginary()
        )));
    }
    Ok(BendingCocycle::new(rho, lambda, sense)?.bent())
}

/// Module ℓ/α of the flat grafting annulus γ × [0, α].
pub fn annulus_module(length: f64, weight: f64) -> Result<f64> {
    if !(length > 0.0) || !(weight > 0.0) || !length.is_finite() || !weight.is_finite() {
        return Err(Error::Domain(format!("annulus module needs positive length and weight, got {length}, {weight}")));
    }
    Ok(length / weight)
}

/// Ratio a_r / b_r = coth(r)·ℓ/α of the boundary lengths cosh(r)·ℓ and sinh(r)·α
/// of the annulus at distance r.
pub fn equidistant_annulus_ratio(length: f64, weight: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("equidistant annulus needs r > 0, got {r}")));
    }
    Ok(annulus_module(length, weight)? / r.tanh())
}
