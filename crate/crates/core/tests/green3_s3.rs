use std::f64::consts::PI;

use critlab::green3::{find_mass_zero_offset, green_mass, green_radial, SINGULAR_COEFFICIENT};
use critlab::Error;
use proptest::prelude::*;

// Shooting oracle: RK4 for w″ = (h − 1)w from the pole, combining the two
// fundamental solutions so that w(0) = 1/(4π) and w(π) = 0.
fn shooting_mass(h: impl Fn(f64) -> f64, steps: usize) -> f64 {
    let d = PI / steps as f64;
    let rhs = |r: f64, y: [f64; 2]| [y[1], (h(r) - 1.0) * y[0]];
    let end = |mut y: [f64; 2]| {
        for k in 0..steps {
            let r = k as f64 * d;
            let k1 = rhs(r, y);
            let k2 = rhs(r + 0.5 * d, [y[0] + 0.5 * d * k1[0], y[1] + 0.5 * d * k1[1]]);
            let k3 = rhs(r + 0.5 * d, [y[0] + 0.5 * d * k2[0], y[1] + 0.5 * d * k2[1]]);
            let k4 = rhs(r + d, [y[0] + d * k3[0], y[1] + d * k3[1]]);
            y[0] += d / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            y[1] += d / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        }
        y[0]
    };
    let a = end([1.0, 0.0]);
    let b = end([0.0, 1.0]);
    -SINGULAR_COEFFICIENT * a / b
}

#[test]
fn closed_form_masses() {
    let m34 = green_mass(&green_radial(|_| 0.75, 4096).unwrap());
    assert!(m34.abs() <= 1e-5, "{m34}");
    let m1 = green_mass(&green_radial(|_| 1.0, 4096).unwrap());
    assert!((m1 + 1.0 / (4.0 * PI * PI)).abs() <= 1e-5, "{m1}");
    let half = green_mass(&green_radial(|_| 0.5, 4096).unwrap());
    let s = 0.5f64.sqrt();
    let exact = -(PI * s).cos() / (PI * s).sin() * s / (4.0 * PI);
    assert!((exact - 0.04283).abs() < 1e-5);
    assert!((half - exact).abs() <= 2e-4, "{half} vs {exact}");
    assert!((half - exact).abs() <= 1e-7);
}

#[test]
fn h_one_profile_is_linear() {
    let p = green_radial(|_| 1.0, 1025).unwrap();
    for (r, w) in p.r.iter().zip(&p.w) {
        assert!((w - SINGULAR_COEFFICIENT * (1.0 - r / PI)).abs() < 1e-12);
    }
}

#[test]
fn variable_potential_against_shooting() {
    let h = |r: f64| 0.5 + 0.5 * r.cos();
    let m = green_mass(&green_radial(h, 4096).unwrap());
    let oracle = shooting_mass(h, 20_000);
    assert!((m - oracle).abs() <= 1e-6, "{m} vs {oracle}");
}

#[test]
fn mass_decreases_in_h_and_is_nonpositive_past_three_quarters() {
    let hs = [0.25, 0.5, 0.75, 1.0, 1.25];
    let masses: Vec<f64> = hs.iter().map(|&h| green_radial(|_| h, 4096).unwrap().mass).collect();
    assert!(masses.windows(2).all(|w| w[1] < w[0]), "{masses:?}");
    for (h, m) in hs.iter().zip(&masses) {
        if *h >= 0.75 {
            assert!(*m <= 1e-5);
        }
    }
}

#[test]
fn second_order_refinement() {
    let m: Vec<f64> = [513, 1025, 2049, 4097]
        .iter()
        .map(|&n| green_radial(|_| 0.5, n).unwrap().mass)
        .collect();
    let d: Vec<f64> = m.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
    for w in d.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }
}

#[test]
fn singular_part_and_sandwich() {
    let p = green_radial(|r| 1.0 + 0.3 * r.cos(), 4096).unwrap();
    assert!((p.singular_coefficient() - SINGULAR_COEFFICIENT).abs() <= 1e-6);
    assert!(p.g[1..].iter().all(|g| *g > 0.0));
    // c/d ≤ G ≤ 1/(c d) near the pole, c from the expansion 1/(4π) + M r
    let near: Vec<usize> = (1..p.nodes()).filter(|&i| p.r[i] <= 0.5).collect();
    let c = near
        .iter()
        .map(|&i| SINGULAR_COEFFICIENT + p.mass.min(0.0) * p.r[i] - 0.01)
        .fold(f64::INFINITY, f64::min);
    assert!(c > 0.0);
    for &i in &near {
        let gd = p.g[i] * p.r[i];
        assert!(c <= gd && gd <= 1.0 / c);
    }
}

#[test]
fn mass_zero_offsets() {
    let z = find_mass_zero_offset(|_| 0.0, (0.3, 2.0), 1e-8, 4096).unwrap();
    assert!((z.b - 0.75).abs() <= 1e-3, "{}", z.b);
    assert!(z.mass.abs() <= 1e-8);
    let z = find_mass_zero_offset(|_| 0.75, (-0.4, 1.0), 1e-8, 4096).unwrap();
    assert!(z.b.abs() <= 1e-3, "{}", z.b);
    assert!(matches!(
        find_mass_zero_offset(|_| 1.0, (0.0, 1.0), 1e-8, 4096),
        Err(Error::NoCrossing(_))
    ));
    assert!(matches!(
        find_mass_zero_offset(|_| 0.0, (-0.5, 1.0), 1e-8, 512),
        Err(Error::PreconditionFailure(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mass_is_monotone_under_positive_shifts(a in 0.3f64..2.0, c in -0.25f64..0.25, s in 0.01f64..0.5) {
        let h = move |r: f64| a + c * r.cos();
        let m0 = green_radial(h, 513).unwrap().mass;
        let m1 = green_radial(move |r| h(r) + s, 513).unwrap().mass;
        prop_assert!(m1 < m0);
    }
}
