use super::word::Word;
use crate::geom::Moebius;
use crate::{Error, Result};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

/// Tolerance for the relation, cone-loop and real-trace checks.
pub const HOLONOMY_TOL: f64 = 1e-8;

/// Surface group of a closed surface with cone points: generators
/// a₁, b₁, …, a_g, b_g followed by the cone loops c₁, …, c_n, subject to
/// ∏[a_i, b_i]·∏c_j = 1. Words are based at a fixed base point x₀.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceGroupPresentation {
    /// All generator names, surface generators first.
    pub names: Vec<String>,
    pub genus: usize,
    pub relation: Word,
}

impl SurfaceGroupPresentation {
    /// Presentation with the names a1, b1, …, c1, … and the standard relation.
    pub fn standard(genus: usize, cones: usize) -> Self {
        let mut names = Vec::new();
        for i in 1..=genus {
            names.push(format!("a{i}"));
            names.push(format!("b{i}"));
        }
        for j in 1..=cones {
            names.push(format!("c{j}"));
        }
        let relation = standard_relation(genus, cones);
        SurfaceGroupPresentation { names, genus, relation }
    }

    /// Presentation with custom names; the first `2·genus` names pair up as (a_i, b_i).
    pub fn with_names(names: Vec<String>, genus: usize, relation: &str) -> Result<Self> {
        if names.len() < 2 * genus {
            return Err(Error::InvalidWord(format!("{} names cannot hold genus {genus}", names.len())));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.contains(|c: char| c.is_whitespace() || c == '^' || c == '*') {
                return Err(Error::InvalidWord(format!("bad generator name {n:?}")));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidWord(format!("duplicate generator name {n:?}")));
            }
        }
        let relation = Word::parse(relation, &names)?;
        let p = SurfaceGroupPresentation { names, genus, relation };
        p.check_relation()?;
        Ok(p)
    }

    pub fn cone_count(&self) -> usize {
        self.names.len() - 2 * self.genus
    }

    /// Indices of the cone-loop generators.
    pub fn cone_indices(&self) -> std::ops::Range<usize> {
        2 * self.genus..self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        Word::parse(text, &self.names)
    }

    /// Word-level check: the relation is ∏[a_i, b_i]·∏c_j up to free reduction and cyclic rotation.
    pub fn check_relation(&self) -> Result<()> {
        let expected = standard_relation(self.genus, self.cone_count());
        if self.relation.cyclically_equal(&expected) {
            Ok(())
        } else {
            Err(Error::InvalidWord(format!(
                "relation {:?} is not {:?}",
                self.relation.display(&self.names),
                expected.display(&self.names)
            )))
        }
    }
}

fn standard_relation(genus: usize, cones: usize) -> Word {
    let mut w = Word::empty();
    for i in 0..genus {
        let (a, b) = (2 * i, 2 * i + 1);
        for (g, inv) in [(a, false), (b, false), (a, true), (b, true)] {
            w = w.concat(&Word::letter(g, inv));
        }
    }
    for j in 0..cones {
        w = w.concat(&Word::letter(2 * genus + j, false));
    }
    w
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepKind {
    Fuchsian,
    Complex,
}

/// A representation of the surface group in PSL₂(ℂ), given on generators.
#[derive(Clone, Debug)]
pub struct HolonomyRep {
    pub group: SurfaceGroupPresentation,
    /// Image of each generator, indexed like `group.names`.
    pub images: Vec<Moebius>,
    /// Cone angle of each cone loop, indexed from the first cone generator.
    pub cone_angles: Vec<f64>,
    pub kind: RepKind,
}

/// Residuals of the representation invariants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolonomyReport {
    /// PSL₂ distance of the relation image from the identity.
    pub relation_residual: f64,
    /// | |tr ρ(c_j)| − 2|cos(θ_j/2)| | per cone loop.
    pub cone_residuals: Vec<f64>,
    /// Largest imaginary part of the sampled traces; zero for real groups.
    pub trace_imaginary: f64,
    pub fuchsian: bool,
    pub pass: bool,
}

impl HolonomyRep {
    pub fn new(
        group: SurfaceGroupPresentation,
        images: Vec<Moebius>,
        cone_angles: Vec<f64>,
        kind: RepKind,
    ) -> Result<Self> {
        if images.len() != group.names.len() {
            return Err(Error::InvalidRepresentation(format!(
                "{} images for {} generators",
                images.len(),
                group.names.len()
            )));
        }
        if cone_angles.len() != group.cone_count() {
            return Err(Error::InvalidRepresentation(format!(
                "{} cone angles for {} cone loops",
                cone_angles.len(),
                group.cone_count()
            )));
        }
        if let Some(a) = cone_angles.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidRepresentation(format!("cone angle {a} must be positive")));
        }
        Ok(HolonomyRep { group, images, cone_angles, kind })
    }

    /// ρ(w) as the ordered product of generator images. No renormalization:
    /// for large entries the computed determinant is less accurate than the product.
    pub fn eval(&self, w: &Word) -> Moebius {
        let mut m = Moebius::identity();
        for l in &w.letters {
            let g = self.images[l.generator];
            m = m * if l.inverse { g.inverse() } else { g };
        }
        m
    }

    pub fn eval_str(&self, text: &str) -> Result<Moebius> {
        Ok(self.eval(&self.group.parse_word(text)?))
    }

    /// The representation A ρ A⁻¹.
    pub fn conjugate(&self, a: &Moebius) -> HolonomyRep {
        HolonomyRep { images: self.images.iter().map(|m| m.conjugate_by(a).renormalized()).collect(), ..self.clone() }
    }

    pub fn relation_residual(&self) -> f64 {
        self.eval(&self.group.relation).proj_distance(&Moebius::identity())
    }

    pub fn cone_residuals(&self) -> Vec<f64> {
        self.group
            .cone_indices()
            .zip(&self.cone_angles)
            .map(|(g, angle)| (self.images[g].trace().norm() - 2.0 * (0.5 * angle).cos().abs()).abs())
            .collect()
    }

    /// Largest |Im tr| over generators, their pairwise products and ordered triples,
    /// relative to 1 + |tr|. All of these traces are real for a group conjugate into PSL₂(ℝ).
    pub fn trace_imaginary(&self) -> f64 {
        let n = self.images.len();
        let mut worst = 0.0f64;
        let mut note = |m: &Moebius| {
            let t = m.trace();
            worst = worst.max(t.im.abs() / (1.0 + t.norm()));
        };
        for i in 0..n {
            note(&self.images[i]);
            for j in 0..n {
                if j != i {
                    note(&(self.images[i] * self.images[j]));
                    for k in 0..n {
                        if k != i && k != j {
                            note(&(self.images[i] * self.images[j] * self.images[k]));
                        }
                    }
                }
            }
        }
        worst
    }

    /// Conjugate into PSL₂(ℝ) within `tol`: all sampled traces real and some
    /// generator hyperbolic, which rules out the compact real-trace groups.
    pub fn is_fuchsian(&self, tol: f64) -> bool {
        let hyperbolic = self.images.iter().any(|m| m.trace().norm() > 2.0 + tol);
        hyperbolic && self.trace_imaginary() <= tol
    }

    pub fn report(&self, tol: f64) -> HolonomyReport {
        let relation_residual = self.relation_residual();
        let cone_residuals = self.cone_residuals();
        let trace_imaginary = self.trace_imaginary();
        let fuchsian = self.is_fuchsian(tol);
        let pass = relation_residual <= tol
            && cone_residuals.iter().all(|r| *r <= tol)
            && (self.kind == RepKind::Complex || fuchsian);
        HolonomyReport { relation_residual, cone_residuals, trace_imaginary, fuchsian, pass }
    }

    pub fn to_file(&self) -> RepresentationFile {
        let generators = self
            .group
            .names
            .iter()
            .zip(&self.images)
            .map(|(name, m)| GeneratorEntry { name: name.clone(), matrix: m.entries().map(|z| [z.re, z.im]) })
            .collect();
        let cone_loops = self
            .group
            .cone_indices()
            .zip(&self.cone_angles)
            .map(|(g, angle)| ConeLoopEntry { name: self.group.names[g].clone(), angle: *angle })
            .collect();
        RepresentationFile {
            generators,
            relation: self.group.relation.display(&self.group.names),
            cone_loops,
            kind: Some(self.kind),
        }
    }

    /// Builds from the file form. Cone loops must be listed after the surface
    /// generators; the kind is inferred when absent.
    pub fn from_file(file: &RepresentationFile) -> Result<Self> {
        let names: Vec<String> = file.generators.iter().map(|g| g.name.clone()).collect();
        let n_cones = file.cone_loops.len();
        if names.len() < n_cones || !(names.len() - n_cones).is_multiple_of(2) {
            return Err(Error::InvalidRepresentation(format!(
                "{} generators with {n_cones} cone loops leave an odd surface part",
                names.len()
            )));
        }
        let genus = (names.len() - n_cones) / 2;
        for (j, c) in file.cone_loops.iter().enumerate() {
            if names[2 * genus + j] != c.name {
                return Err(Error::InvalidRepresentation(format!(
                    "cone loop {:?} must be generator {} in the listing",
                    c.name,
                    2 * genus + j
                )));
            }
        }
        let group = SurfaceGroupPresentation::with_names(names, genus, &file.relation)?;
        let mut images = Vec::with_capacity(file.generators.len());
        for g in &file.generators {
            let [a, b, c, d] = g.matrix.map(|[re, im]| C::new(re, im));
            images.push(
                Moebius::new(a, b, c, d)
                    .map_err(|e| Error::InvalidRepresentation(format!("generator {:?}: {e}", g.name)))?,
            );
        }
        let angles = file.cone_loops.iter().map(|c| c.angle).collect();
        let provisional = HolonomyRep::new(group, images, angles, RepKind::Complex)?;
        let kind = match file.kind {
            Some(k) => k,
            None if provisional.is_fuchsian(HOLONOMY_TOL) => RepKind::Fuchsian,
            None => RepKind::Complex,
        };
        Ok(HolonomyRep { kind, ..provisional })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RepresentationFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        HolonomyRep::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("representation serializes")
    }

    /// Largest projective distance between corresponding generator images.
    pub fn distance(&self, other: &HolonomyRep) -> f64 {
        self.images.iter().zip(&other.images).fold(0.0f64, |m, (a, b)| m.max(a.proj_distance(b)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub name: String,
    /// Entries a, b, c, d as [re, im] pairs.
    pub matrix: [[f64; 2]; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeLoopEntry {
    pub name: String,
    pub angle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationFile {
    pub generators: Vec<GeneratorEntry>,
    pub relation: String,
    pub cone_loops: Vec<ConeLoopEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<RepKind>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_presentation() {
        let p = SurfaceGroupPresentation::standard(2, 1);
        assert_eq!(p.names, ["a1", "b1", "a2", "b2", "c1"]);
        assert_eq!(p.relation.display(&p.names), "a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1 c1");
        assert!(p.check_relation().is_ok());
        assert_eq!(p.cone_indices(), 4..5);
    }

    #[test]
    fn relation_checked_up_to_rotation() {
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        assert!(SurfaceGroupPresentation::with_names(names.clone(), 1, "c a b a^-1 b^-1").is_ok());
        assert!(SurfaceGroupPresentation::with_names(names.clone(), 1, "a b a^-1 c b^-1").is_err());
        assert!(SurfaceGroupPresentation::with_names(names, 1, "a b b^-1 b a^-1 b^-1 c").is_ok());
        let dup: Vec<String> = ["a", "a", "c"].iter().map(|s| s.to_string()).collect();
        assert!(SurfaceGroupPresentation::with_names(dup, 1, "a a a^-1 a^-1 c").is_err());
    }

    #[test]
    fn eval_multiplies_left_to_right() {
        let p = SurfaceGroupPresentation::standard(1, 0);
        let a = Moebius::from_real(2.0, 0.0, 0.0, 0.5).unwrap();
        let b = Moebius::from_real(1.0, 1.0, 0.0, 1.0).unwrap();
        let rep = HolonomyRep::new(p, vec![a, b], vec![], RepKind::Complex).unwrap();
        assert!(rep.eval_str("a1 b1").unwrap().proj_eq(&(a * b), 1e-14));
        assert!(rep.eval_str("a1^-1 a1").unwrap().proj_eq(&Moebius::identity(), 1e-14));
        assert!(rep.eval_str("b1^2").unwrap().proj_eq(&(b * b), 1e-14));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let p = SurfaceGroupPresentation::standard(1, 1);
        assert!(HolonomyRep::new(p.clone(), vec![Moebius::identity(); 2], vec![1.0], RepKind::Complex).is_err());
        assert!(HolonomyRep::new(p, vec![Moebius::identity(); 3], vec![-1.0], RepKind::Complex).is_err());
    }
}
