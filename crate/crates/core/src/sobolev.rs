//! Closed-form sharp constants of the critical Sobolev embedding.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Volume of the unit sphere `Sⁿ ⊂ ℝⁿ⁺¹`: `2π^{(n+1)/2} / Γ((n+1)/2)`.
pub fn sphere_volume(n: usize) -> f64 {
    let a = (n as f64 + 1.0) / 2.0;
    2.0 * PI.powf(a) / gamma(a)
}

/// `K(n,2)² = 4 / (n(n−2) ω_n^{2/n})`, the best constant in front of the
/// Dirichlet energy.
pub fn best_sobolev_k2(n: usize) -> f64 {
    let nf = n as f64;
    4.0 / (nf * (nf - 2.0) * sphere_volume(n).powf(2.0 / nf))
}

/// Upper bound on the minimal energy: `1 / (K(n,2)² (sup f)^{(n−2)/n})`.
pub fn threshold(n: usize, sup_f: f64) -> Result<f64> {
    if !(sup_f > 0.0) {
        return Err(Error::InvalidInput(format!(
            "the threshold needs sup f > 0, got {sup_f}"
        )));
    }
    let nf = n as f64;
    Ok(1.0 / (best_sobolev_k2(n) * sup_f.powf((nf - 2.0) / nf)))
}

/// Critical exponent `2* = 2n/(n−2)`.
pub fn critical_exponent(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * nf / (nf - 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpConstants {
    pub n: usize,
    pub omega_n: f64,
    pub k2: f64,
    pub two_star: f64,
}

impl SharpConstants {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::UnsupportedDimension {
                dim: n,
                reason: "the critical exponent needs n ≥ 3".into(),
            });
        }
        Ok(Self {
            n,
            omega_n: sphere_volume(n),
            k2: best_sobolev_k2(n),
            two_star: critical_exponent(n),
        })
    }

    /// The threshold for `sup f = 1`.
    pub fn threshold_unit(&self) -> f64 {
        1.0 / self.k2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-12 * 4.0 * PI);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-12 * 20.0);
        assert!((sphere_volume(4) - 8.0 * PI * PI / 3.0).abs() < 1e-12 * 27.0);
        assert!((sphere_volume(4) - 26.318_945_0).abs() < 1e-7);
    }

    #[test]
    fn k2_values() {
        // closed form evaluated independently (extended precision)
        let expected = [
            (3, 1.825_515_714_871_810e-1),
            (4, 9.746_210_015_420_952e-2),
            (6, 5.192_254_472_021_109e-2),
        ];
        for (n, v) in expected {
            assert!((best_sobolev_k2(n) / v - 1.0).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn thresholds() {
        assert!((threshold(6, 1.0).unwrap() - 19.259_456_665_473_2).abs() < 1e-9);
        assert_eq!(threshold(5, 1.0).unwrap(), 1.0 / best_sobolev_k2(5));
        let t = threshold(4, 16.0).unwrap();
        assert!((t - 1.0 / best_sobolev_k2(4) / 4.0).abs() < 1e-12);
        assert!((t - 2.565_1).abs() < 1e-4);
        assert!(matches!(threshold(4, 0.0), Err(Error::InvalidInput(_))));
        assert!(matches!(threshold(4, -1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn k2_decreasing_in_dimension() {
        for n in 3..10 {
            assert!(best_sobolev_k2(n + 1) < best_sobolev_k2(n));
        }
    }

    #[test]
    fn constants_struct() {
        let c = SharpConstants::new(6).unwrap();
        assert_eq!(c.two_star, 3.0);
        assert!(c.two_star > 2.0);
        let direct = 4.0 / (6.0 * 4.0 * c.omega_n.powf(1.0 / 3.0));
        assert!((c.k2 / direct - 1.0).abs() < 1e-12);
        assert!(SharpConstants::new(2).is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn threshold_homogeneity(n in 3usize..11, s in 0.01f64..100.0, c in 0.01f64..100.0) {
                let nf = n as f64;
                let lhs = threshold(n, c * s).unwrap();
                let rhs = threshold(n, s).unwrap() / c.powf((nf - 2.0) / nf);
                prop_assert!((lhs / rhs - 1.0).abs() < 1e-12);
            }
        }
    }
}
