use critlab::criticality::{
    aubin_slope, aubin_test_function, classify, estimate_b0_sphere, find_critical_offset, Classification,
    CriticalOffset, DEFAULT_TOL_CLASS,
};
use critlab::functional::{constraint_value, ProblemSpec};
use critlab::manifold::{build_radial_sphere, Point, ScalarField};
use critlab::sobolev::sphere_volume;
use critlab::solver::SolverConfig;
use proptest::prelude::*;

fn k_list() -> Vec<u32> {
    (6..=12).map(|e| 1u32 << e).collect()
}

// J(ψ_k)·K² − 1 on the round S⁶ with δ = 0.5, from adaptive quadrature of
// the continuum integrals (independent of the grid).
const Y_H72: [f64; 7] = [
    2.605408809623e-02, 9.716375440354e-03, 3.623530910885e-03, 1.426797746666e-03,
    6.051738585726e-04, 2.738679868897e-04, 1.295470899401e-04,
];
const Y_H6: [f64; 7] = [
    2.085096336671e-02, 6.622651149473e-03, 1.906545011122e-03, 5.158013356847e-04,
    1.345974369853e-04, 3.443035324868e-05, 8.714015144573e-06,
];
const Y_LAPF: [f64; 7] = [
    3.447147573764e-02, 1.396839335480e-02, 5.716225376879e-03, 2.450398041708e-03,
    1.107717645318e-03, 5.220682627072e-04, 2.527300303936e-04,
];

fn assert_monotone_predicate(o: &CriticalOffset) {
    let mut probes = o.probes.clone();
    probes.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    let first_sub = probes
        .iter()
        .position(|p| p.classification == Classification::Subcritical)
        .unwrap();
    assert!(probes[first_sub..]
        .iter()
        .all(|p| p.classification == Classification::Subcritical));
    for (lo, hi) in &o.brackets {
        assert!(lo < hi);
    }
}

#[test]
fn aubin_expansion_slopes_on_s6() {
    let m = build_radial_sphere(6, 4096, 2.0).unwrap();
    let pole = Point::Radius(0.0);
    let one = ScalarField::constant(&m, 1.0);
    let cases: [(f64, ScalarField, &[f64; 7], f64, f64); 3] = [
        (7.2, one.clone(), &Y_H72, 0.5, 0.08),
        (6.0, one.clone(), &Y_H6, 0.0, 0.05),
        (6.0, ScalarField::from_radial_fn(&m, |r| 2.0 * r.cos() - 1.0).unwrap(), &Y_LAPF, 1.0, 0.15),
    ];
    for (h, f, oracle, slope, tol) in cases {
        let a = aubin_slope(&m, &ScalarField::constant(&m, h), &f, &pole, &k_list(), 0.5).unwrap();
        for (y, o) in a.y_values.iter().zip(oracle) {
            assert!((y - o).abs() < 5e-5, "y {y} oracle {o}");
        }
        assert!(a.j_values.iter().all(|j| *j >= 0.0));
        assert!((a.fitted_slope - slope).abs() <= tol, "slope {} vs {slope}", a.fitted_slope);
        assert!((a.predicted_slope - slope).abs() < 1e-2);
    }
}

#[test]
fn aubin_fit_residual_shrinks_when_small_k_dropped() {
    let m = build_radial_sphere(6, 4096, 2.0).unwrap();
    let h = ScalarField::constant(&m, 7.2);
    let f = ScalarField::constant(&m, 1.0);
    let ks = k_list();
    let full = aubin_slope(&m, &h, &f, &Point::Radius(0.0), &ks[..5], 0.5).unwrap();
    let doubled = aubin_slope(&m, &h, &f, &Point::Radius(0.0), &ks[1..6], 0.5).unwrap();
    assert!(doubled.fit_residual < full.fit_residual);
}

#[test]
fn critical_offset_from_supercritical_constant() {
    let m = build_radial_sphere(6, 4096, 2.0).unwrap();
    let one = ScalarField::constant(&m, 1.0);
    let spec = ProblemSpec::critical(ScalarField::constant(&m, 7.2), one).unwrap();
    let cfg = SolverConfig::default();
    let report = classify(&spec, &cfg, DEFAULT_TOL_CLASS).unwrap();
    assert_eq!(report.classification, Classification::WeaklyCritical);
    assert!(report.min_max_point_gap().unwrap() >= -0.1);
    assert!(report.lambda <= report.threshold * (1.0 + 1e-3));

    let o = find_critical_offset(&spec, 4.0, 0.01, DEFAULT_TOL_CLASS, &cfg).unwrap();
    assert!((o.t0 - 1.2).abs() <= 0.05, "t0 {}", o.t0);
    assert!((o.t_threshold - 1.2).abs() <= 0.01);
    assert!(o.brackets.last().map(|(a, b)| b - a).unwrap() <= 0.01);
    assert_monotone_predicate(&o);
}

#[test]
fn already_critical_constant_has_zero_offset() {
    let m = build_radial_sphere(6, 1024, 2.0).unwrap();
    let spec = ProblemSpec::critical(ScalarField::constant(&m, 6.0), ScalarField::constant(&m, 1.0)).unwrap();
    let tol_t = 0.01;
    let o = find_critical_offset(&spec, 2.0, tol_t, DEFAULT_TOL_CLASS, &SolverConfig::default()).unwrap();
    assert!(o.t_threshold.abs() <= tol_t, "{}", o.t_threshold);
    // the bracket midpoint carries the classification bias tol_class/∫u²
    let bias = DEFAULT_TOL_CLASS / sphere_volume(6).powf(1.0 / 3.0);
    assert!((o.t0 - bias).abs() <= tol_t);
    assert_monotone_predicate(&o);
}

#[test]
fn second_best_constant_on_spheres() {
    let cfg = SolverConfig::default();
    for (n, exact) in [(6usize, sphere_volume(6).powf(-1.0 / 3.0)), (4, sphere_volume(4).powf(-0.5))] {
        let m = build_radial_sphere(n, 4096, 2.0).unwrap();
        let b = estimate_b0_sphere(&m, 0.01, DEFAULT_TOL_CLASS, &cfg).unwrap();
        assert!((b.b0 / exact - 1.0).abs() <= 0.01, "n {n}: {} vs {exact}", b.b0);
        assert_monotone_predicate(&b.offset);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn aubin_test_functions_are_admissible(k in 1u32..5000, delta in 0.05f64..3.0, c in 0.0f64..0.9) {
        let m = build_radial_sphere(5, 256, 2.0).unwrap();
        // f > 0 everywhere, maximal at the pole
        let f = ScalarField::from_radial_fn(&m, |r| 1.0 - c * (1.0 - r.cos()) / 2.0).unwrap();
        let spec = ProblemSpec::critical(ScalarField::constant(&m, 1.0), f).unwrap();
        let psi = aubin_test_function(&m, &Point::Radius(0.0), k, delta).unwrap();
        prop_assert!(constraint_value(&spec, &psi).unwrap() > 0.0);
        prop_assert!(psi.values().iter().all(|v| *v >= 0.0));
    }
}
