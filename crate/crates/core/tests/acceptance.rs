//! Acceptance run: one PASS/FAIL line per criterion, each at its stated
//! tolerance and runtime budget. Exits non-zero when any criterion fails.

use cone_ends::family::{leaf_report, recover_infinity_data, Side};
use cone_ends::fields::{Chart, ChartAtlas, Grid, MetricField, ScalarField};
use cone_ends::fixtures::{
    family_of, genus_two_octagon_rep, one_holed_torus_rep, OctagonSurface, Perturbation, DEFAULT_RESOLUTION,
};
use cone_ends::foliation::{
    dual_curvature, dual_curvature_inverse, dualize_surface, foliation_sweep, push_principal, push_product_increasing,
    solve_leaf, EmbeddingData, SolveMethod, SolverOptions,
};
use cone_ends::geom::Moebius;
use cone_ends::grafting::{
    equidistant_annulus_ratio, graft_holonomy, BendingCocycle, HolonomyRep, MeasuredMulticurve, RotationSense,
    HOLONOMY_TOL,
};
use cone_ends::infinity::{condition_star_report, data_from_qd, gauge_transform, QuadDiff};
use cone_ends::linalg::Sym2;
use cone_ends::schwarzian::{
    cocycle_check, cone_schwarzian_expansion, schwarzian, Analytic, Jet3, Polynomial, SLOPE_BAND,
};
use cone_ends::tol::Tolerances;
use cone_ends_cli::config::CommandName;
use cone_ends_cli::{execute, resolve_config, Flags};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
/// Name, time budget and check of one criterion.
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lib<T>(r: cone_ends::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn random_c(rng: &mut ChaCha8Rng, s: f64) -> C {
    C::new(rng.gen_range(-s..s), rng.gen_range(-s..s))
}

fn random_perturbation(rng: &mut ChaCha8Rng) -> Perturbation {
    Perturbation {
        amplitude: random_c(rng, 0.15),
        rate: random_c(rng, 1.0),
        residue: random_c(rng, 0.06),
        constant: random_c(rng, 0.1),
    }
}

/// Relative sup-norm distance between two metric fields.
fn metric_gap(a: &MetricField, b: &MetricField) -> f64 {
    let scale = b.iter().map(|(_, _, m)| m.max_abs()).fold(0.0f64, f64::max);
    a.iter().map(|(k, i, m)| (*m - b.values[k][i]).max_abs()).fold(0.0f64, f64::max) / scale
}

fn gauss_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let surface = lib(OctagonSurface::new(DEFAULT_RESOLUTION))?;
    let tol = Tolerances::default();
    let mut worst_pointwise = 0.0f64;
    let mut worst_order = f64::INFINITY;
    for n in 0..10 {
        let pert = if n == 0 { Perturbation::zero() } else { random_perturbation(&mut rng) };
        let f = lib(family_of(&lib(surface.datum_with(&pert))?, Side::Hyperbolic))?;
        for offset in [0.1, 0.3, 0.6, 1.0, 1.5, 2.0, 3.0, 4.0] {
            let r = f.start + offset;
            let leaf = lib(f.leaf(r))?;
            for (k, i, b) in leaf.shape.iter() {
                let det_star = f.datum.bstar.values[k][i].det();
                let closed = -2.0 / ((2.0 * r).exp() + 1.0 + (-2.0 * r).exp() * det_star);
                worst_pointwise = worst_pointwise.max(((-1.0 + b.det()) - closed).abs());
            }
            let rep = lib(leaf_report(&f, r, &tol))?;
            worst_order = worst_order.min(rep.gauss_fd.observed_order);
        }
    }
    check(
        worst_pointwise <= 1e-10 && worst_order >= 1.8,
        format!("max Gauss gap {worst_pointwise:.2e} (≤ 1e-10), min FD order {worst_order:.2} (≥ 1.8)"),
    )
}

fn r_independence() -> Outcome {
    let surface = lib(OctagonSurface::new(DEFAULT_RESOLUTION))?;
    let mut worst = 0.0f64;
    for eps in [0.0, 0.5] {
        for side in [Side::Hyperbolic, Side::DeSitter] {
            let f = lib(surface.family(eps, side))?;
            for r in [0.5, 1.0, 2.0, 4.0] {
                let d = lib(recover_infinity_data(&f, r))?;
                worst = worst.max(metric_gap(&d.istar, &f.datum.istar)).max(metric_gap(&d.iistar, &f.datum.iistar));
            }
        }
    }
    check(worst <= 1e-9, format!("max relative deviation {worst:.2e} (≤ 1e-9)"))
}

fn duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut involution = 0.0f64;
    for _ in 0..1000 {
        let k: f64 = -rng.gen_range(f64::EPSILON..1.0);
        let back = lib(dual_curvature_inverse(lib(dual_curvature(k))?))?;
        involution = involution.max((back - k).abs());
    }
    let mut leaf_gap = 0.0f64;
    for i in 0..=490 {
        let r = 0.1 + 0.01 * i as f64;
        let k = -1.0 / r.cosh().powi(2);
        let kd = -1.0 / r.sinh().powi(2);
        leaf_gap = leaf_gap.max((lib(dual_curvature(k))? - kd).abs() / kd.abs());
    }
    let surface = lib(OctagonSurface::new(DEFAULT_RESOLUTION))?;
    let f = lib(surface.family(0.5, Side::Hyperbolic))?;
    let leaf = lib(f.leaf(f.start + 0.5))?;
    let e = EmbeddingData { metric: leaf.metric.clone(), shape: leaf.shape.clone(), side: Side::Hyperbolic };
    let twice = lib(dualize_surface(&lib(dualize_surface(&e))?))?;
    let shape_gap = twice.shape.iter().map(|(k, i, m)| (*m - e.shape.values[k][i]).max_abs()).fold(0.0f64, f64::max);
    let round_trip = metric_gap(&twice.metric, &e.metric).max(shape_gap);
    check(
        involution <= 1e-14 && leaf_gap <= 1e-12 && round_trip <= 1e-10 && twice.side == Side::Hyperbolic,
        format!("involution {involution:.1e} (≤ 1e-14), leaf duality {leaf_gap:.1e} (≤ 1e-12), round trip {round_trip:.1e} (≤ 1e-10)"),
    )
}

fn foliation() -> Outcome {
    let surface = lib(OctagonSurface::new(DEFAULT_RESOLUTION))?;
    let tol = Tolerances::default();
    let opts = SolverOptions::default();
    let f = lib(surface.family(0.0, Side::Hyperbolic))?;
    let half = lib(solve_leaf(&f, -0.5, &tol, &opts))?;
    let expect = (1.0 + 0.5f64.sqrt()).ln();
    let graph_gap = half.graph.iter().map(|(_, _, r)| (r - expect).abs()).fold(0.0f64, f64::max);
    let ks: Vec<f64> =
        (0..16).map(|i| -(0.95f64.ln() + (0.05f64.ln() - 0.95f64.ln()) * i as f64 / 15.0).exp()).collect();
    let (_, sweep) = lib(foliation_sweep(&f, &ks, &tol, &opts, Some(&surface.weights), Some(&surface.signature)))?;
    let area_error = sweep
        .rows
        .iter()
        .map(|row| {
            let expected = 2.0 * PI / row.k.abs() * 2.75;
            (row.area - expected).abs() / expected
        })
        .fold(0.0f64, f64::max);
    let perturbed = lib(surface.family(0.5, Side::Hyperbolic))?;
    let newton = lib(solve_leaf(&perturbed, -0.5, &tol, &opts))?;
    let ok = graph_gap <= 1e-8
        && sweep.nested
        && sweep.rows.len() == 16
        && area_error <= 0.01
        && newton.method == SolveMethod::Newton
        && newton.iterations() <= 15
        && newton.residual <= 1e-6;
    check(
        ok,
        format!(
            "K=-1/2 graph gap {graph_gap:.1e}, nested {}, max area error {:.3}%, Newton {} iterations residual {:.1e}",
            sweep.nested,
            100.0 * area_error,
            newton.iterations(),
            newton.residual
        ),
    )
}

fn pushing_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut identity = 0.0f64;
    for _ in 0..10_000 {
        let lambda: f64 = rng.gen_range(-0.99..0.99);
        let t: f64 = rng.gen_range(0.0..5.0);
        let s: f64 = rng.gen_range(0.0..5.0);
        let p = lib(push_principal(lambda, t))?;
        identity = identity.max((p - (lambda.atanh() + t).tanh()).abs());
        let mu: f64 = rng.gen_range(0.0..5.0);
        let stacked = lib(push_principal(lib(push_principal(mu, s))?, t))?;
        identity = identity.max((stacked - lib(push_principal(mu, s + t))?).abs() / (1.0 + mu));
    }
    let ts: Vec<f64> = (0..=500).map(|i| 0.01 * i as f64).collect();
    let mut monotone = true;
    for _ in 0..100 {
        let lambda: f64 = rng.gen_range(0.01..3.0);
        let mu: f64 = rng.gen_range(0.0..1.0) / lambda;
        if mu <= 0.0 {
            continue;
        }
        monotone &= lib(push_product_increasing(lambda, mu, &ts))?;
    }
    let mut fixed = true;
    for &t in &ts {
        fixed &= lib(push_principal(1.0, t))? == 1.0;
    }
    check(
        identity <= 1e-12 && monotone && fixed,
        format!("identity gap {identity:.1e} (≤ 1e-12), monotone {monotone}, fixed point exact {fixed}"),
    )
}

fn random_moebius(rng: &mut ChaCha8Rng) -> Result<Moebius, String> {
    let one = C::new(1.5, 0.0);
    lib(Moebius::new(random_c(rng, 1.0) + one, random_c(rng, 1.0), random_c(rng, 1.0), random_c(rng, 1.0) + one))
}

/// Generators crossing a single lift, where bends compose as rotations about one axis.
fn single_crossing_generators(rho: &HolonomyRep, lambda: &MeasuredMulticurve) -> Vec<usize> {
    (0..rho.group.names.len())
        .filter(|&g| {
            let name = &rho.group.names[g];
            lambda.curves.iter().map(|c| c.crossings.iter().filter(|x| &x.generator == name).count()).sum::<usize>()
                == 1
        })
        .collect()
}

fn grafting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut residual = 0.0f64;
    let mut equivariance = 0.0f64;
    let mut additivity = 0.0f64;
    let sense = RotationSense::Positive;
    for (rho, lambda) in [one_holed_torus_rep(PI / 2.0), genus_two_octagon_rep()] {
        for t in [0.3, 1.0, 2.5] {
            let report = lib(graft_holonomy(&rho, &lambda.scaled(t), sense))?.report(HOLONOMY_TOL);
            residual = report.cone_residuals.iter().fold(residual.max(report.relation_residual), |m, r| m.max(*r));
        }
        let grafted = lib(graft_holonomy(&rho, &lambda, sense))?;
        for _ in 0..50 {
            let a = random_moebius(&mut rng)?;
            let lhs = lib(graft_holonomy(&rho.conjugate(&a), &lambda, sense))?;
            equivariance = equivariance.max(lhs.distance(&grafted.conjugate(&a)));
        }
        let (t1, t2) = (0.4, 1.1);
        let g1 = lib(graft_holonomy(&rho, &lambda.scaled(t1), sense))?;
        let g12 = lib(graft_holonomy(&rho, &lambda.scaled(t1 + t2), sense))?;
        let c2 = lib(BendingCocycle::new(&rho, &lambda.scaled(t2), sense))?;
        for g in single_crossing_generators(&rho, &lambda) {
            additivity = additivity.max((c2.generator_bend(g) * g1.images[g]).proj_distance(&g12.images[g]));
        }
    }
    let ratio_gap = (lib(equidistant_annulus_ratio(1.0, 1.0, 10.0))? - 1.0).abs();
    check(
        residual <= 1e-8 && equivariance <= 1e-8 && additivity <= 1e-10 && ratio_gap <= 5e-9,
        format!(
            "relation/cone residual {residual:.1e} (≤ 1e-8), conjugation {equivariance:.1e} (≤ 1e-8), additivity {additivity:.1e}, annulus ratio gap {ratio_gap:.1e} (≤ 5e-9)"
        ),
    )
}

fn schwarzian_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut kernel = 0.0f64;
    for _ in 0..20 {
        let m = random_moebius(&mut rng)?;
        let z = random_c(&mut rng, 0.3);
        kernel = kernel.max(lib(schwarzian(&m, z))?.norm());
    }
    let mut cocycle = 0.0f64;
    for _ in 0..100 {
        let f = Polynomial(vec![
            random_c(&mut rng, 0.5),
            C::new(1.0, 0.0) + random_c(&mut rng, 0.3),
            random_c(&mut rng, 0.3),
            random_c(&mut rng, 0.2),
        ]);
        let (a, b) = (random_c(&mut rng, 0.7), random_c(&mut rng, 0.2));
        let g = Analytic::new(move |x: Jet3| (x * a).exp() + x * x * b);
        let z = random_c(&mut rng, 0.4);
        cocycle = cocycle.max(lib(cocycle_check(&f, &g, z))?).max(lib(cocycle_check(&g, &f, z))?);
    }
    let mut power = 0.0f64;
    for k in [2.0, 3.0, 5.0] {
        let f = Analytic::new(move |x: Jet3| x.powf(k));
        for z in [C::new(1.0, 0.0), C::new(0.4, 0.9), C::new(-0.8, 0.3)] {
            let expected = (1.0 - k * k) / (2.0 * z * z);
            power = power.max((lib(schwarzian(&f, z))? - expected).norm() / (1.0 + expected.norm()));
        }
    }
    let quadratic = Polynomial(vec![C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0)]);
    let mut slopes = Vec::new();
    let mut slopes_ok = true;
    for theta in [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
        let rep = lib(cone_schwarzian_expansion(&quadratic, theta))?;
        slopes_ok &= (rep.slope + 1.0).abs() <= SLOPE_BAND;
        slopes.push(rep.slope);
        for a in [C::new(1.0, 0.0), C::new(0.7, -1.2)] {
            let linear = Polynomial(vec![C::new(0.0, 0.0), a]);
            slopes_ok &= lib(cone_schwarzian_expansion(&linear, theta))?.slope == 0.0;
        }
    }
    check(
        kernel <= 1e-9 && cocycle <= 1e-8 && power <= 1e-8 && slopes_ok,
        format!(
            "Möbius kernel {kernel:.1e} (≤ 1e-9), cocycle {cocycle:.1e} (≤ 1e-8), powers {power:.1e} (≤ 1e-8), slopes {slopes:.3?} for z+z², linear germs slope 0: {slopes_ok}"
        ),
    )
}

fn gauge_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let n = 101;
    let h = 1.0 / (n - 1) as f64;
    let chart = Chart { id: "disk".into(), grid: Grid::rect([-0.5, -0.5], [h, h], [n, n]) };
    let atlas = Arc::new(lib(ChartAtlas::new(vec![chart], vec![]))?);
    let istar =
        MetricField::from_fn(&atlas, "I*", |_, _, p| Sym2::scalar(4.0 / (1.0 - p[0] * p[0] - p[1] * p[1]).powi(2)));
    let q = QuadDiff::from_fn(&atlas, vec![], |_, z| C::new(0.2, 0.1) * (C::new(0.8, 0.6) * z).exp());
    let tol = Tolerances::default();
    let d = lib(data_from_qd(&istar, &q, &tol))?;
    let before = lib(condition_star_report(&d, &tol))?;
    let mut worst_ratio = 0.0f64;
    let mut all_pass = before.all_pass();
    for _ in 0..5 {
        let amp = rng.gen_range(0.02..0.1);
        let (kx, ky, phase) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0 * PI));
        let u = ScalarField::from_fn(&atlas, "u", |_, _, p| amp * (kx * p[0] + ky * p[1] + phase).sin());
        let after = lib(condition_star_report(&lib(gauge_transform(&d, &u))?, &tol))?;
        all_pass &= after.all_pass();
        worst_ratio = worst_ratio
            .max(after.trace_residual / before.trace_residual)
            .max(after.codazzi.fine_max / before.codazzi.fine_max);
    }
    let c = ScalarField::constant(&atlas, "u", 0.37);
    let back = lib(gauge_transform(&lib(gauge_transform(&d, &c))?, &c.map("-u", |v| -v)))?;
    let recovery = metric_gap(&back.istar, &d.istar).max(metric_gap(&back.iistar, &d.iistar));
    check(
        all_pass && worst_ratio <= 10.0 && recovery <= 1e-12,
        format!("all reports pass {all_pass}, worst residual ratio {worst_ratio:.2} (≤ 10), constant-gauge recovery {recovery:.1e}"),
    )
}

/// Output files of one run as (name, bytes), sorted by name.
fn artifacts(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
        files.push((path.file_name().unwrap_or_default().to_string_lossy().into_owned(), bytes));
    }
    files.sort();
    Ok(files)
}

fn cli_determinism() -> Outcome {
    let root = std::env::temp_dir().join(format!("cone-ends-acceptance-{}", std::process::id()));
    let runs: [(CommandName, Option<&str>, bool); 10] = [
        (CommandName::BuildEnd, Some("octagon-fuchsian"), false),
        (CommandName::BuildEnd, Some("octagon-perturbed"), false),
        (CommandName::Foliate, Some("octagon-fuchsian"), true),
        (CommandName::Foliate, Some("octagon-perturbed"), false),
        (CommandName::Dualize, Some("octagon-fuchsian"), false),
        (CommandName::Graft, Some("one-holed-torus"), false),
        (CommandName::Graft, Some("genus-two-octagon"), false),
        (CommandName::Schwarzian, Some("moebius"), false),
        (CommandName::Schwarzian, Some("cone-germ"), false),
        (CommandName::Verify, Some("normalized-pair"), false),
    ];
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for (n, (name, fixture, dualize)) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for copy in ["a", "b"] {
            let dir = root.join(format!("{n}{copy}"));
            let flags = Flags {
                out: Some(dir.clone()),
                seed: Some(9),
                dualize: *dualize,
                fixture: fixture.map(String::from),
                ..Flags::default()
            };
            let cfg = resolve_config(*name, &flags).map_err(|e| e.to_string())?;
            execute(&cfg).map_err(|e| format!("{} {fixture:?}: {e}", name.as_str()))?;
            outputs.push(artifacts(&dir)?);
        }
        if outputs[0].is_empty() || outputs[0] != outputs[1] {
            mismatches.push(format!("{} {fixture:?}", name.as_str()));
        }
        compared += outputs[0].len();
    }
    let _ = std::fs::remove_dir_all(&root);
    check(
        mismatches.is_empty(),
        format!("{} runs twice, {compared} artifacts compared, mismatches: {mismatches:?}", runs.len()),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("Gauss identity", Duration::from_secs(60), gauss_identity),
        ("r-independence of data at infinity", Duration::from_secs(10), r_independence),
        ("duality", Duration::from_secs(5), duality),
        ("foliation", Duration::from_secs(300), foliation),
        ("pushing law", Duration::from_secs(1), pushing_law),
        ("grafting", Duration::from_secs(5), grafting),
        ("Schwarzian", Duration::from_secs(30), schwarzian_suite),
        ("gauge invariance", Duration::from_secs(30), gauge_invariance),
        ("CLI determinism", Duration::from_secs(600), cli_determinism),
    ];
    let mut failures = 0;
    for (n, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let (pass, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {} {}: {} ({}; {:.2} s of {} s)",
            n + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
