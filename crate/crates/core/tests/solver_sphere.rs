use critlab::functional::{constraint_value, ProblemSpec};
use critlab::manifold::{build_radial_sphere, ScalarField};
use critlab::sobolev::{sphere_volume, threshold};
use critlab::solver::{continuation_in_q, minimize, ContinuationConfig, InitStrategy, SolverConfig};

#[test]
fn s6_critical_constant_potential_keeps_constant_minimizer() {
    let m = build_radial_sphere(6, 4096, 2.0).unwrap();
    let s = ProblemSpec::critical(ScalarField::constant(&m, 6.0), ScalarField::constant(&m, 1.0)).unwrap();
    let r = minimize(&s, &SolverConfig::default()).unwrap();
    assert!((r.lambda - 19.2594).abs() <= 0.1, "lambda {}", r.lambda);
    assert!(r.u.max() / r.u.min() <= 1.01);
}

#[test]
fn s6_subcritical_constant_potential() {
    let m = build_radial_sphere(6, 4096, 2.0).unwrap();
    let s = ProblemSpec::critical(ScalarField::constant(&m, 4.0), ScalarField::constant(&m, 1.0)).unwrap();
    let cfg = SolverConfig { init: InitStrategy::Multistart(2), ..Default::default() };
    let r = minimize(&s, &cfg).unwrap();
    let candidate = 4.0 * sphere_volume(6).powf(1.0 / 3.0);
    assert!(r.lambda <= candidate * (1.0 + 1e-3), "lambda {}", r.lambda);
    assert!(r.residual <= 1e-8 && r.converged);
}

#[test]
fn continuation_towards_critical_exponent_concentrates() {
    let m = build_radial_sphere(6, 4096, 1.5).unwrap();
    let f = ScalarField::from_radial_fn(&m, |r| 0.5 + 0.5 * r.cos()).unwrap();
    let s = ProblemSpec::new(ScalarField::constant(&m, 6.5), f, 2.8).unwrap();
    let cfg = SolverConfig { max_iter: 3000, ..Default::default() };
    let out = continuation_in_q(&s, &[2.8, 2.9, 2.95, 2.99], &cfg, &ContinuationConfig::default()).unwrap();
    let thr = threshold(6, 1.0).unwrap();
    for w in out.windows(2) {
        assert!(w[1].sup_u() > w[0].sup_u());
    }
    for r in &out {
        assert_eq!(r.peak(), 0);
        assert!(r.u.min() > 0.0);
        assert!(r.residual < 1e-7, "q {} residual {}", r.q, r.residual);
        let spec_q = s.with_q(r.q).unwrap();
        assert!((constraint_value(&spec_q, &r.u).unwrap() - 1.0).abs() < 1e-10);
    }
    let last = out.last().unwrap();
    assert!(last.converged);
    // the subcritical energies approach the threshold from above as q → 2*
    assert!(last.lambda > thr && last.lambda < out[0].lambda);
}
