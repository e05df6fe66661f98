//! Conformal change `g′ = u^{4/(n−2)} g`: the transformation law of `h` and
//! the covariance `J_{h′,f,g′}(w) = J_{h,f,g}(u·w)`.
//!
//! `g′` is never built as a metric. Integrals against `g′` are written as
//! weighted integrals against `g`:
//!
//! ```text
//! ∫_{g′} |∇w|² + h′w²  =  ∫ u²|∇w|² + ∫ (Δu + hu)·u·w²
//! ∫_{g′} f|w|^{2*}      =  ∫ f|w|^{2*} u^{2*}
//! ```

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functional::{quotient_j, ProblemSpec};
use crate::manifold::{build_radial_sphere, DiscreteManifold, ScalarField};

/// A positive conformal factor with its integral weights.
#[derive(Debug, Clone)]
pub struct ConformalFactor {
    u: ScalarField,
    volume_weight: Vec<f64>,
    energy_weight: Vec<f64>,
}

impl ConformalFactor {
    pub fn new(u: ScalarField) -> Result<Self> {
        let n = u.manifold().dim();
        if n < 3 {
            return Err(Error::UnsupportedDimension {
                dim: n,
                reason: "conformal changes need n ≥ 3".into(),
            });
        }
        if !(u.min() > 0.0) || u.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "conformal factor must be positive, min u = {}",
                u.min()
            )));
        }
        let two_star = u.manifold().critical_exponent();
        let volume_weight = u.values().iter().map(|v| v.powf(two_star)).collect();
        let energy_weight = u.values().iter().map(|v| v * v).collect();
        Ok(Self {
            u,
            volume_weight,
            energy_weight,
        })
    }

    pub fn u(&self) -> &ScalarField {
        &self.u
    }

    /// `u^{2*}`, the density of `dv_{g′}`.
    pub fn volume_weight(&self) -> &[f64] {
        &self.volume_weight
    }

    /// `u²`, the density of the Dirichlet term.
    pub fn energy_weight(&self) -> &[f64] {
        &self.energy_weight
    }

    pub fn manifold(&self) -> &Arc<DiscreteManifold> {
        self.u.manifold()
    }
}

/// `h′ = (Δu + hu)/u^{(n+2)/(n−2)}` node by node.
pub fn conformal_h(
    manifold: &Arc<DiscreteManifold>,
    h: &ScalarField,
    factor: &ConformalFactor,
) -> Result<ScalarField> {
    manifold.check(h)?;
    manifold.check(factor.u())?;
    let n = manifold.dim() as f64;
    let p = (n + 2.0) / (n - 2.0);
    let u = factor.u().values();
    let lap = manifold.laplacian_values(u);
    let values = (0..u.len())
        .map(|i| (lap[i] + h.values()[i] * u[i]) / u[i].powf(p))
        .collect();
    ScalarField::new(manifold.clone(), values)
}

/// `F_{h′}(u) = h′·u^{4/(n−2)} − Δu/u`, the inverse of [`conformal_h`].
pub fn conformal_f(
    manifold: &Arc<DiscreteManifold>,
    h_prime: &ScalarField,
    factor: &ConformalFactor,
) -> Result<ScalarField> {
    manifold.check(h_prime)?;
    manifold.check(factor.u())?;
    let n = manifold.dim() as f64;
    let e = 4.0 / (n - 2.0);
    let u = factor.u().values();
    let lap = manifold.laplacian_values(u);
    let values = (0..u.len())
        .map(|i| h_prime.values()[i] * u[i].powf(e) - lap[i] / u[i])
        .collect();
    ScalarField::new(manifold.clone(), values)
}

/// Energy of `w` for `(h′, g′)`: `∫u²|∇w|² + ∫(Δu + hu)u w²`.
///
/// The Dirichlet term uses the squared face mean of `u` on each edge, so
/// `I′(w) − I(uw) = ¼ Σ c (δu)²(δw)²` exactly.
pub fn conformal_energy(
    manifold: &Arc<DiscreteManifold>,
    h: &ScalarField,
    factor: &ConformalFactor,
    w: &ScalarField,
) -> Result<f64> {
    manifold.check(h)?;
    manifold.check(factor.u())?;
    manifold.check(w)?;
    let u = factor.u().values();
    let wv = w.values();
    let dirichlet: f64 = manifold
        .edges()
        .iter()
        .map(|&(i, j, c)| {
            let um = 0.5 * (u[i] + u[j]);
            let d = wv[j] - wv[i];
            c * um * um * d * d
        })
        .sum();
    let lap = manifold.laplacian_values(u);
    let zero_order: f64 = (0..u.len())
        .map(|i| manifold.weights()[i] * (lap[i] + h.values()[i] * u[i]) * u[i] * wv[i] * wv[i])
        .sum();
    Ok(dirichlet + zero_order)
}

/// `∫_{g′} f|w|^{2*}`.
pub fn conformal_constraint(
    manifold: &Arc<DiscreteManifold>,
    f: &ScalarField,
    factor: &ConformalFactor,
    w: &ScalarField,
) -> Result<f64> {
    manifold.check(f)?;
    manifold.check(factor.u())?;
    manifold.check(w)?;
    let two_star = manifold.critical_exponent();
    Ok((0..w.len())
        .map(|i| {
            manifold.weights()[i] * f.values()[i] * w.values()[i].abs().powf(two_star) * factor.volume_weight()[i]
        })
        .sum())
}

/// `J_{h′,f,g′}(w)`.
pub fn conformal_quotient(
    manifold: &Arc<DiscreteManifold>,
    h: &ScalarField,
    f: &ScalarField,
    factor: &ConformalFactor,
    w: &ScalarField,
) -> Result<f64> {
    let c = conformal_constraint(manifold, f, factor, w)?;
    if !(c > 0.0) {
        return Err(Error::NotAdmissible(c));
    }
    let two_star = manifold.critical_exponent();
    Ok(conformal_energy(manifold, h, factor, w)? / c.powf(2.0 / two_star))
}

/// `|J_{h′,f,g′}(w) − J_{h,f,g}(u·w)|`.
pub fn covariance_residual(
    manifold: &Arc<DiscreteManifold>,
    h: &ScalarField,
    f: &ScalarField,
    factor: &ConformalFactor,
    w: &ScalarField,
) -> Result<f64> {
    let transformed = conformal_quotient(manifold, h, f, factor, w)?;
    let uw = w.zip_with(factor.u(), |a, b| a * b)?;
    let spec = ProblemSpec::critical(h.clone(), f.clone())?;
    let direct = quotient_j(&spec, &uw)?;
    Ok((transformed - direct).abs())
}

/// One rung of a refinement study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementStep {
    pub nodes: usize,
    pub residual: f64,
}

/// Covariance residual on radial spheres of increasing resolution, with all
/// data given as functions of the distance to the pole.
#[allow(clippy::too_many_arguments)]
pub fn covariance_refinement(
    dim: usize,
    clustering: f64,
    ladder: &[usize],
    h: impl Fn(f64) -> f64,
    f: impl Fn(f64) -> f64,
    u: impl Fn(f64) -> f64,
    w: impl Fn(f64) -> f64,
) -> Result<Vec<RefinementStep>> {
    ladder
        .iter()
        .map(|&nodes| {
            let m = build_radial_sphere(dim, nodes, clustering)?;
            let hf = ScalarField::from_radial_fn(&m, &h)?;
            let ff = ScalarField::from_radial_fn(&m, &f)?;
            let factor = ConformalFactor::new(ScalarField::from_radial_fn(&m, &u)?)?;
            let wf = ScalarField::from_radial_fn(&m, &w)?;
            let residual = covariance_residual(&m, &hf, &ff, &factor, &wf)?;
            Ok(RefinementStep { nodes, residual })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::build_periodic_torus;

    #[test]
    fn unit_factor_is_the_identity() {
        let m = build_radial_sphere(4, 128, 2.0).unwrap();
        let h = ScalarField::from_radial_fn(&m, |r| 2.0 + r.cos()).unwrap();
        let factor = ConformalFactor::new(ScalarField::constant(&m, 1.0)).unwrap();
        let hp = conformal_h(&m, &h, &factor).unwrap();
        assert!(hp.values().iter().zip(h.values()).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn constant_factor_scales_h() {
        let m = build_radial_sphere(5, 64, 1.0).unwrap();
        let h = ScalarField::constant(&m, 3.0);
        let c: f64 = 1.7;
        let factor = ConformalFactor::new(ScalarField::constant(&m, c)).unwrap();
        let hp = conformal_h(&m, &h, &factor).unwrap();
        let expected = 3.0 * c.powf(-4.0 / 3.0);
        assert!(hp.values().iter().all(|v| (v - expected).abs() < 1e-12));
    }

    #[test]
    fn nonpositive_factor_is_rejected() {
        let m = build_radial_sphere(3, 32, 1.0).unwrap();
        let u = ScalarField::from_radial_fn(&m, |r| r.cos()).unwrap();
        assert!(matches!(ConformalFactor::new(u), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn torus_covariance_for_constant_factor() {
        let m = build_periodic_torus(3, 1.0, 8).unwrap();
        let h = ScalarField::constant(&m, 1.0);
        let f = ScalarField::constant(&m, 1.0);
        let factor = ConformalFactor::new(ScalarField::constant(&m, 2.0)).unwrap();
        let w = ScalarField::from_point_fn(&m, |p| match p {
            crate::manifold::Point::Coords(x) => 1.0 + 0.1 * x[0].sin(),
            _ => 1.0,
        })
        .unwrap();
        assert!(covariance_residual(&m, &h, &f, &factor, &w).unwrap() < 1e-10);
    }
}
