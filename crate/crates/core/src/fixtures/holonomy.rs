use crate::geom::Moebius;
use crate::grafting::{Crossing, HolonomyRep, MeasuredMulticurve, RepKind, SurfaceGroupPresentation, WeightedCurve};
use num_complex::Complex64 as C;
use std::f64::consts::PI;

/// Interior angle of the regular octagon whose side pairing yields genus 2 with one cone angle π/2.
pub const OCTAGON_INTERIOR_ANGLE: f64 = PI / 16.0;

fn crossing(generator: &str, position: u32, sign: i32, conjugator: Option<&str>) -> Crossing {
    Crossing { generator: generator.into(), position, sign, conjugator: conjugator.map(String::from) }
}

/// Fuchsian one-holed torus with the boundary loop c elliptic of angle `theta`
/// and traces tr a = tr b = tr ab = x, where x > 2 solves x³ − 3x² + 2 − 2cos(θ/2) = 0.
///
/// The multicurve is the curve a with weight 1. The path of b crosses its axis
/// once; the path of c crosses the axis and then its c-translate backwards.
pub fn one_holed_torus_rep(theta: f64) -> (HolonomyRep, MeasuredMulticurve) {
    let target = 2.0 * (0.5 * theta).cos();
    let cubic = |x: f64| x * x * x - 3.0 * x * x + 2.0 - target;
    let (mut lo, mut hi) = (2.0, 4.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cubic(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let s = 0.5 * (x + (x * x - 4.0).sqrt());
    let a = Moebius::from_real(x, -1.0, 1.0, 0.0).expect("unit determinant");
    let b = Moebius::from_real(0.0, s, -1.0 / s, x).expect("unit determinant");
    // relation a b a⁻¹ b⁻¹ c = 1
    let c = (a * b * a.inverse() * b.inverse()).inverse();
    let names = ["a", "b", "c"].iter().map(|n| n.to_string()).collect();
    let group = SurfaceGroupPresentation::with_names(names, 1, "a b a^-1 b^-1 c").expect("standard relation");
    let rep = HolonomyRep::new(group, vec![a, b, c], vec![theta], RepKind::Fuchsian).expect("consistent shapes");
    let lambda = MeasuredMulticurve {
        curves: vec![WeightedCurve {
            word: "a".into(),
            weight: 1.0,
            crossings: vec![crossing("b", 0, 1, None), crossing("c", 0, 1, None), crossing("c", 1, -1, Some("c"))],
        }],
    };
    (rep, lambda)
}

fn disk_rotation(angle: f64) -> Moebius {
    Moebius::diag(C::from_polar(1.0, 0.5 * angle))
}

/// Side pairings of the regular octagon centred at 0 in the disk with interior angle π/16.
/// Vertex j sits at angle jπ/4 and T_k maps side k onto side k + 2 with reversed orientation.
fn octagon_pairing(k: u32) -> Moebius {
    let half = 0.5 * OCTAGON_INTERIOR_ANGLE;
    let cosh_inradius = half.cos() / (PI / 8.0).sin();
    let euclid = (0.5 * cosh_inradius.acosh()).tanh();
    let mid = C::from_polar(euclid, PI / 8.0);
    let one = C::new(1.0, 0.0);
    let to_mid = Moebius::new(one, mid, mid.conj(), one).expect("inside the disk");
    let half_turn = disk_rotation(PI).conjugate_by(&to_mid);
    let base = disk_rotation(PI / 2.0) * half_turn;
    base.conjugate_by(&disk_rotation(f64::from(k) * PI / 4.0))
}

/// Fuchsian genus-2 representation with one cone point of angle π/2 from the
/// regular octagon, carried to the upper half-plane. The generators are
/// a1 = T₀⁻¹, b1 = T₁, a2 = T₄⁻¹, b2 = T₅ and c1 = ([a1, b1][a2, b2])⁻¹.
///
/// The multicurve holds a1 with weight 1 and a2 with weight ½. The path of b_i
/// crosses the b_i-translate of the a_i axis, so each commutator is unchanged
/// by grafting and the cone loop keeps its image.
pub fn genus_two_octagon_rep() -> (HolonomyRep, MeasuredMulticurve) {
    let i = C::new(0.0, 1.0);
    let one = C::new(1.0, 0.0);
    let cayley = Moebius::new(one, -i, one, i).expect("Cayley map");
    let to_half_plane = |m: Moebius| m.conjugate_by(&cayley.inverse()).renormalized();
    let a1 = to_half_plane(octagon_pairing(0).inverse());
    let b1 = to_half_plane(octagon_pairing(1));
    let a2 = to_half_plane(octagon_pairing(4).inverse());
    let b2 = to_half_plane(octagon_pairing(5));
    let comm = |x: Moebius, y: Moebius| x * y * x.inverse() * y.inverse();
    let c1 = (comm(a1, b1) * comm(a2, b2)).inverse().renormalized();
    let group = SurfaceGroupPresentation::standard(2, 1);
    let rep = HolonomyRep::new(group, vec![a1, b1, a2, b2, c1], vec![PI / 2.0], RepKind::Fuchsian)
        .expect("consistent shapes");
    let lambda = MeasuredMulticurve {
        curves: vec![
            WeightedCurve { word: "a1".into(), weight: 1.0, crossings: vec![crossing("b1", 0, 1, Some("b1"))] },
            WeightedCurve { word: "a2".into(), weight: 0.5, crossings: vec![crossing("b2", 0, 1, Some("b2"))] },
        ],
    };
    (rep, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{classify, Classification};

    #[test]
    fn torus_traces() {
        let (rep, _) = one_holed_torus_rep(PI / 2.0);
        let x = rep.images[0].trace().re;
        assert!(x > 2.0);
        assert!((rep.images[1].trace().re - x).abs() < 1e-12);
        assert!(((rep.images[0] * rep.images[1]).trace().re - x).abs() < 1e-12);
        assert!((rep.images[2].trace().norm() - 2.0 * (PI / 4.0).cos()).abs() < 1e-12);
    }

    #[test]
    fn octagon_generators_are_real_and_hyperbolic() {
        let (rep, _) = genus_two_octagon_rep();
        for m in &rep.images[..4] {
            assert!(m.entries().iter().all(|z| z.im.abs() < 1e-12));
            assert!(matches!(classify(m), Classification::Hyperbolic { .. }));
        }
        match classify(&rep.images[4]) {
            Classification::Elliptic { angle } => assert!((angle - PI / 2.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }
}
