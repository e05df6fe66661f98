use critlab::conformal::{
    conformal_constraint, conformal_energy, conformal_f, conformal_h, conformal_quotient, covariance_refinement,
    covariance_residual, ConformalFactor,
};
use critlab::functional::{coercivity_margin, quotient_j, ProblemSpec};
use critlab::manifold::{build_radial_sphere, ScalarField};
use critlab::solver::{minimize, SolverConfig};
use proptest::prelude::*;

const LADDER: [usize; 4] = [512, 1024, 2048, 4096];

#[test]
fn covariance_converges_at_second_order_on_s3() {
    let steps = covariance_refinement(
        3,
        2.0,
        &LADDER,
        |_| 1.0,
        |_| 1.0,
        |r| 1.0 + 0.3 * r.cos(),
        |r| 1.0 + 0.2 * (2.0 * r).cos(),
    )
    .unwrap();
    for w in steps.windows(2) {
        let ratio = w[0].residual / w[1].residual;
        assert!((3.0..=5.0).contains(&ratio), "{ratio}");
    }
    assert!(steps.last().unwrap().residual <= 1e-4);
}

#[test]
fn constant_factor_is_exact() {
    let m = build_radial_sphere(3, 1024, 2.0).unwrap();
    let h = ScalarField::from_radial_fn(&m, |r| 1.0 + 0.5 * r.cos()).unwrap();
    let f = ScalarField::from_radial_fn(&m, |r| 2.0 + r.cos()).unwrap();
    let w = ScalarField::from_radial_fn(&m, |r| 1.0 + 0.2 * (2.0 * r).cos()).unwrap();
    for c in [1.0, 0.3, 2.5] {
        let factor = ConformalFactor::new(ScalarField::constant(&m, c)).unwrap();
        let res = covariance_residual(&m, &h, &f, &factor, &w).unwrap();
        assert!(res <= 1e-10, "c = {c}: {res}");
    }
}

#[test]
fn transformation_law_round_trips() {
    let m = build_radial_sphere(3, 2048, 2.0).unwrap();
    let h = ScalarField::from_radial_fn(&m, |r| 0.75 + 0.2 * r.cos()).unwrap();
    let factor = ConformalFactor::new(ScalarField::from_radial_fn(&m, |r| 1.0 + 0.3 * r.cos()).unwrap()).unwrap();
    let hp = conformal_h(&m, &h, &factor).unwrap();
    let back = conformal_f(&m, &hp, &factor).unwrap();
    for (a, b) in back.values().iter().zip(h.values()) {
        assert!((a - b).abs() <= 1e-8);
    }
}

#[test]
fn transformed_form_stays_coercive() {
    let m = build_radial_sphere(3, 1024, 2.0).unwrap();
    let h = ScalarField::constant(&m, 0.5);
    let margin = coercivity_margin(&m, &h).unwrap();
    assert!(margin > 0.0);
    let factor = ConformalFactor::new(ScalarField::from_radial_fn(&m, |r| 1.0 + 0.3 * r.cos()).unwrap()).unwrap();
    for k in 0..6 {
        let w = ScalarField::from_radial_fn(&m, |r| (k as f64 * r).cos()).unwrap();
        let energy = conformal_energy(&m, &h, &factor, &w).unwrap();
        // I′(w) ≥ I(uw) ≥ margin·∫(uw)²
        let uw2 = w.zip_with(factor.u(), |a, b| (a * b).powi(2)).unwrap();
        let l2 = m.integrate(&uw2).unwrap();
        assert!(energy >= margin * l2 * (1.0 - 1e-9), "k = {k}: {energy} vs {}", margin * l2);
    }
}

#[test]
fn argmin_is_transported() {
    let m = build_radial_sphere(3, 1024, 2.0).unwrap();
    let h = ScalarField::from_radial_fn(&m, |r| 0.6 + 0.1 * r.cos()).unwrap();
    let f = ScalarField::constant(&m, 1.0);
    let spec = ProblemSpec::critical(h.clone(), f.clone()).unwrap();
    let best = minimize(&spec, &SolverConfig { init: critlab::solver::InitStrategy::Multistart(0), ..Default::default() })
        .unwrap();
    let factor = ConformalFactor::new(ScalarField::from_radial_fn(&m, |r| 1.0 + 0.3 * r.cos()).unwrap()).unwrap();
    let w_star = best.u.zip_with(factor.u(), |a, b| a / b).unwrap();
    let at_star = conformal_quotient(&m, &h, &f, &factor, &w_star).unwrap();
    let at_const = conformal_quotient(&m, &h, &f, &factor, &ScalarField::constant(&m, 1.0)).unwrap();
    assert!(at_star <= at_const + 1e-3);
    assert!((at_star - best.lambda).abs() <= 1e-3);
    assert!(quotient_j(&spec, &best.u).unwrap() <= at_const + 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn denominator_is_pure_algebra(a in 0.0f64..0.8, b in -0.5f64..0.5, k in 1u32..6) {
        let m = build_radial_sphere(3, 256, 2.0).unwrap();
        let f = ScalarField::from_radial_fn(&m, |r| 1.5 + r.cos()).unwrap();
        let u = ScalarField::from_radial_fn(&m, |r| 1.0 + a * r.cos()).unwrap();
        let w = ScalarField::from_radial_fn(&m, |r| 1.0 + b * (k as f64 * r).cos()).unwrap();
        let factor = ConformalFactor::new(u.clone()).unwrap();
        let lhs = conformal_constraint(&m, &f, &factor, &w).unwrap();
        let uw = w.zip_with(&u, |x, y| (x * y).abs().powi(6)).unwrap();
        let rhs = m.integrate(&uw.zip_with(&f, |x, y| x * y).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn weights_match_the_factor(a in 0.0f64..0.9) {
        let m = build_radial_sphere(4, 128, 2.0).unwrap();
        let u = ScalarField::from_radial_fn(&m, |r| 1.0 + a * r.cos()).unwrap();
        let factor = ConformalFactor::new(u.clone()).unwrap();
        for (i, v) in u.values().iter().enumerate() {
            prop_assert!((factor.volume_weight()[i] - v.powi(4)).abs() <= 1e-12 * v.powi(4));
            prop_assert!((factor.energy_weight()[i] - v * v).abs() <= 1e-12 * v * v);
        }
    }
}
