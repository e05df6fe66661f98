//! Energy `I_h(u) = ∫|∇u|² + ∫h u²`, the constraint `∫f|u|^q`, the quotient
//! `J = I / (∫f|u|^q)^{2/q}` and the coercivity margin of `Δ + h`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::manifold::{DiscreteManifold, ScalarField};

/// Data of one variational problem: manifold, potential `h`, weight `f` and
/// exponent `q ∈ (2, 2*]`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    manifold: Arc<DiscreteManifold>,
    h: ScalarField,
    f: ScalarField,
    q: f64,
}

/// Relative slack when comparing an exponent with `2*`.
const EXPONENT_SLACK: f64 = 1e-12;

impl ProblemSpec {
    pub fn new(h: ScalarField, f: ScalarField, q: f64) -> Result<Self> {
        let manifold = h.manifold().clone();
        manifold.check(&f)?;
        let two_star = manifold.critical_exponent();
        if !(q > 2.0) || q > two_star * (1.0 + EXPONENT_SLACK) {
            return Err(Error::PreconditionFailure(format!(
                "exponent q = {q} must lie in (2, {two_star}]"
            )));
        }
        if !(f.max() > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sup f must be positive, got {}",
                f.max()
            )));
        }
        Ok(Self { manifold, h, f, q })
    }

    /// Same problem at the critical exponent `2*`.
    pub fn critical(h: ScalarField, f: ScalarField) -> Result<Self> {
        let q = h.manifold().critical_exponent();
        Self::new(h, f, q)
    }

    pub fn manifold(&self) -> &Arc<DiscreteManifold> {
        &self.manifold
    }

    pub fn h(&self) -> &ScalarField {
        &self.h
    }

    pub fn f(&self) -> &ScalarField {
        &self.f
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn is_critical(&self) -> bool {
        (self.q / self.manifold.critical_exponent() - 1.0).abs() <= EXPONENT_SLACK
    }

    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::new(self.h.clone(), self.f.clone(), q)
    }

    /// The same problem with `h` replaced by `h − t`.
    pub fn shifted_h(&self, t: f64) -> Result<Self> {
        Self::new(self.h.add_scalar(-t), self.f.clone(), self.q)
    }

    pub(crate) fn energy_values(&self, u: &[f64]) -> f64 {
        energy_values(&self.manifold, self.h.values(), u)
    }

    pub(crate) fn constraint_values(&self, u: &[f64]) -> f64 {
        let q = self.q;
        self.manifold
            .weights()
            .iter()
            .zip(self.f.values().iter().zip(u))
            .map(|(w, (f, u))| w * f * u.abs().powf(q))
            .sum()
    }
}

pub(crate) fn energy_values(manifold: &DiscreteManifold, h: &[f64], u: &[f64]) -> f64 {
    let zero_order: f64 = manifold
        .weights()
        .iter()
        .zip(h.iter().zip(u))
        .map(|(w, (h, u))| w * h * u * u)
        .sum();
    manifold.dirichlet_energy(u) + zero_order
}

/// `I_h(u) = ⟨Δu, u⟩ + ∫ h u²`.
pub fn energy_i(spec: &ProblemSpec, u: &ScalarField) -> Result<f64> {
    spec.manifold.check(u)?;
    Ok(spec.energy_values(u.values()))
}

/// `∫ f |u|^q`.
pub fn constraint_value(spec: &ProblemSpec, u: &ScalarField) -> Result<f64> {
    spec.manifold.check(u)?;
    Ok(spec.constraint_values(u.values()))
}

/// `J(u) = I(u) / (∫ f|u|^q)^{2/q}`; fails with [`Error::NotAdmissible`] when
/// the constraint integral is not positive.
pub fn quotient_j(spec: &ProblemSpec, u: &ScalarField) -> Result<f64> {
    let c = constraint_value(spec, u)?;
    if !(c > 0.0) {
        return Err(Error::NotAdmissible(c));
    }
    Ok(spec.energy_values(u.values()) / c.powf(2.0 / spec.q))
}

const COERCIVITY_MAX_ITER: usize = 20_000;

/// Smallest eigenvalue of the discrete `Δ + h`, by inverse iteration shifted
/// below `min h` (the spectrum of `Δ + h` lies above `min h`).
pub fn coercivity_margin(manifold: &Arc<DiscreteManifold>, h: &ScalarField) -> Result<f64> {
    manifold.check(h)?;
    let hv = h.values();
    let shift = h.min() - 1.0;
    let diag: Vec<f64> = hv.iter().map(|v| v - shift).collect();
    let n = manifold.len();
    let mut x = vec![1.0; n];
    let norm = |x: &[f64]| manifold.inner(x, x).sqrt();
    let mut rho_prev = f64::INFINITY;
    let scale = manifold.laplacian_norm_bound() + hv.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for _ in 0..COERCIVITY_MAX_ITER {
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        let rho = energy_values(manifold, hv, &x);
        // eigen-residual ‖(Δ + h − ρ) x‖ in the weighted norm
        let lap = manifold.laplacian_values(&x);
        let res: Vec<f64> = (0..n).map(|i| lap[i] + (hv[i] - rho) * x[i]).collect();
        let r = norm(&res);
        if r <= 1e-11 * scale.max(1.0) || (rho - rho_prev).abs() <= 1e-15 * scale.max(1.0) {
            return Ok(rho);
        }
        rho_prev = rho;
        x = manifold.solve_shifted(1.0, &diag, &x)?;
    }
    Err(Error::NumericFailure(format!(
        "inverse iteration for the coercivity margin did not converge in {COERCIVITY_MAX_ITER} steps"
    )))
}
