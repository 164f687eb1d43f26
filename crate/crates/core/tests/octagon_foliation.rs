use cone_ends::family::Side;
use cone_ends::fixtures::{OctagonSurface, DEFAULT_RESOLUTION};
use cone_ends::foliation::{foliation_sweep, solve_leaf, SolveMethod, SolverOptions};
use cone_ends::tol::Tolerances;
use std::f64::consts::PI;

fn sixteen_curvatures() -> Vec<f64> {
    (0..16).map(|i| -0.85 + 0.05 * i as f64).collect()
}

#[test]
fn fuchsian_sweep_is_nested_with_gauss_bonnet_areas() {
    let s = OctagonSurface::new(DEFAULT_RESOLUTION).unwrap();
    let f = s.family(0.0, Side::Hyperbolic).unwrap();
    let tol = Tolerances::default();
    let opts = SolverOptions::default();
    let half = solve_leaf(&f, -0.5, &tol, &opts).unwrap();
    let expect = (1.0 + 0.5f64.sqrt()).ln();
    assert!(half.graph.iter().all(|(_, _, r)| (r - expect).abs() <= 1e-8));
    let ks = sixteen_curvatures();
    let (_, report) = foliation_sweep(&f, &ks, &tol, &opts, Some(&s.weights), Some(&s.signature)).unwrap();
    assert!(report.nested);
    for row in &report.rows {
        let gb = 2.0 * PI / row.k.abs() * 2.75;
        assert!((row.area - gb).abs() / gb <= 0.01, "K = {}: {} vs {}", row.k, row.area, gb);
    }
    assert!(report.pass());
}

#[test]
fn perturbed_newton_converges() {
    let s = OctagonSurface::new(DEFAULT_RESOLUTION).unwrap();
    let f = s.family(0.5, Side::Hyperbolic).unwrap();
    let leaf = solve_leaf(&f, -0.5, &Tolerances::default(), &SolverOptions::default()).unwrap();
    assert_eq!(leaf.method, SolveMethod::Newton);
    assert!(leaf.iterations() <= 15, "{} iterations", leaf.iterations());
    assert!(leaf.residual <= 1e-6, "residual {}", leaf.residual);
}
