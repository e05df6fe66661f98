//! Green function of `Δ + h` on the round `S³` for radial `h`.
//!
//! With `w = G·sin r` the radial equation `(Δ + h)G = δ_P` becomes the
//! two-point problem
//!
//! ```text
//! −w″ + (h − 1)w = 0 on (0, π),   w(0) = 1/(4π),   w(π) = 0,
//! ```
//!
//! so `G = 1/(4πr) + M + O(r)` with the mass `M = w′(0)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::solve_sym_tridiagonal;

/// Normalization of the singular part, `1/((n − 2)ω_{n−1})` with `n = 3`.
pub const SINGULAR_COEFFICIENT: f64 = 1.0 / (4.0 * PI);

/// Header of the profile CSV.
pub const GREEN_CSV_HEADER: &str = "r,w,G";

#[derive(Debug, Clone)]
pub struct GreenProfile {
    /// Uniform grid on `[0, π]`, endpoints included.
    pub r: Vec<f64>,
    pub h: Vec<f64>,
    pub w: Vec<f64>,
    /// `w / sin r`; `+∞` at the pole, the limit `−w′(π)` at the antipode.
    pub g: Vec<f64>,
    pub mass: f64,
    /// Lowest eigenvalue of the discrete `Δ + h` on radial functions.
    pub coercivity: f64,
}

impl GreenProfile {
    pub fn nodes(&self) -> usize {
        self.r.len()
    }

    pub fn spacing(&self) -> f64 {
        self.r[1] - self.r[0]
    }

    /// `lim G·r` at the pole, by linear extrapolation from the first two
    /// interior nodes.
    pub fn singular_coefficient(&self) -> f64 {
        let c = |i: usize| self.g[i] * self.r[i];
        2.0 * c(1) - c(2)
    }

    /// Rows `r, w, G` for every node except the pole.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(GREEN_CSV_HEADER);
        out.push('\n');
        for i in 1..self.nodes() {
            out.push_str(&format!(
                "{:.11e},{:.11e},{:.11e}\n",
                self.r[i], self.w[i], self.g[i]
            ));
        }
        out
    }
}

/// Grid radii `r_i = iπ/(nodes − 1)`.
pub fn green_grid(nodes: usize) -> Result<Vec<f64>> {
    if nodes < 5 {
        return Err(Error::InvalidInput(format!(
            "the Green profile needs at least 5 nodes, got {nodes}"
        )));
    }
    let d = PI / (nodes - 1) as f64;
    Ok((0..nodes).map(|i| i as f64 * d).collect())
}

/// Solves for the Green profile of a radial potential given in closed form.
pub fn green_radial(h: impl Fn(f64) -> f64, nodes: usize) -> Result<GreenProfile> {
    let r = green_grid(nodes)?;
    let hv: Vec<f64> = r.iter().map(|&x| h(x)).collect();
    green_from_values(hv)
}

/// Solves for the Green profile of a potential sampled on [`green_grid`].
pub fn green_from_values(h: Vec<f64>) -> Result<GreenProfile> {
    let r = green_grid(h.len())?;
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("potential has non-finite values".into()));
    }
    let n = r.len();
    let d = r[1];
    let d2 = d * d;
    let m = n - 2;
    let diag: Vec<f64> = (1..=m).map(|i| 2.0 / d2 + h[i] - 1.0).collect();
    let off = vec![-1.0 / d2; m - 1];

    let coercivity = lowest_eigenvalue(&diag, -1.0 / d2);
    if !(coercivity > 0.0) {
        return Err(Error::PreconditionFailure(format!(
            "Δ + h is not coercive on S³ (lowest eigenvalue {coercivity:.6e})"
        )));
    }

    let mut rhs = vec![0.0; m];
    rhs[0] = SINGULAR_COEFFICIENT / d2;
    let inner = solve_sym_tridiagonal(&diag, &off, &rhs)?;
    let mut w = Vec::with_capacity(n);
    w.push(SINGULAR_COEFFICIENT);
    w.extend(inner);
    w.push(0.0);
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericFailure("Green profile is not finite".into()));
    }

    let mass = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * d);
    let slope_pi = (3.0 * w[n - 1] - 4.0 * w[n - 2] + w[n - 3]) / (2.0 * d);
    let g = (0..n)
        .map(|i| {
            if i == 0 {
                f64::INFINITY
            } else if i == n - 1 {
                -slope_pi
            } else {
                w[i] / r[i].sin()
            }
        })
        .collect();
    Ok(GreenProfile {
        r,
        h,
        w,
        g,
        mass,
        coercivity,
    })
}

pub fn green_mass(profile: &GreenProfile) -> f64 {
    profile.mass
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with
/// diagonal `diag` and constant off-diagonal `off` (Sturm sequence).
fn eigen_count_below(diag: &[f64], off: f64, x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (i, a) in diag.iter().enumerate() {
        q = a - x - if i == 0 { 0.0 } else { off * off / q };
        if q == 0.0 {
            q = f64::EPSILON * (a.abs() + x.abs()).max(1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn lowest_eigenvalue(diag: &[f64], off: f64) -> f64 {
    // Gershgorin interval
    let mut lo = diag.iter().fold(f64::INFINITY, |a, v| a.min(*v)) - 2.0 * off.abs();
    let mut hi = diag.iter().fold(f64::NEG_INFINITY, |a, v| a.max(*v)) + 2.0 * off.abs();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eigen_count_below(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Outcome of the bisection for the mass-zero shift.
#[derive(Debug, Clone)]
pub struct MassZero {
    pub b: f64,
    pub mass: f64,
    /// `(B, M_{h+B})` in evaluation order.
    pub evaluations: Vec<(f64, f64)>,
}

/// Finds `B` with `M_{h+B} = 0` by bisection on `[b_lo, b_hi]`, stopping once
/// `|M| ≤ tol`.
pub fn find_mass_zero_offset(
    h: impl Fn(f64) -> f64,
    b_range: (f64, f64),
    tol: f64,
    nodes: usize,
) -> Result<MassZero> {
    let (mut lo, mut hi) = b_range;
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need b_lo < b_hi and tol > 0, got [{lo}, {hi}], tol {tol}"
        )));
    }
    let r = green_grid(nodes)?;
    let base: Vec<f64> = r.iter().map(|&x| h(x)).collect();
    let mass_at = |b: f64| -> Result<f64> {
        green_from_values(base.iter().map(|v| v + b).collect()).map(|p| p.mass)
    };
    let mut evaluations = Vec::new();
    let m_lo = mass_at(lo)?;
    evaluations.push((lo, m_lo));
    let m_hi = mass_at(hi)?;
    evaluations.push((hi, m_hi));
    for (b, m) in [(lo, m_lo), (hi, m_hi)] {
        if m.abs() <= tol {
            return Ok(MassZero { b, mass: m, evaluations });
        }
    }
    if !(m_lo > 0.0 && m_hi < 0.0) {
        return Err(Error::NoCrossing(format!(
            "mass does not change sign on [{lo}, {hi}]: M = {m_lo:.6e} and {m_hi:.6e}"
        )));
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let m = mass_at(mid)?;
        evaluations.push((mid, m));
        if m.abs() <= tol || mid <= lo || mid >= hi {
            return Ok(MassZero { b: mid, mass: m, evaluations });
        }
        if m > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conformal_constant_has_cosine_profile() {
        let p = green_radial(|_| 0.75, 1025).unwrap();
        for (r, w) in p.r.iter().zip(&p.w) {
            assert!((w - SINGULAR_COEFFICIENT * (0.5 * r).cos()).abs() < 1e-7);
        }
        assert!(p.mass.abs() < 1e-6);
        assert!((p.coercivity - 0.75).abs() < 1e-5);
    }

    #[test]
    fn sturm_count_matches_known_spectrum() {
        // −w″ on (0, π), Dirichlet: eigenvalues 4/d²·sin²(kd/2)
        let n = 101;
        let d = PI / (n - 1) as f64;
        let diag = vec![2.0 / (d * d); n - 2];
        let exact = 4.0 / (d * d) * (0.5 * d).sin().powi(2);
        assert!((lowest_eigenvalue(&diag, -1.0 / (d * d)) - exact).abs() < 1e-10);
        assert_eq!(eigen_count_below(&diag, -1.0 / (d * d), 4.5), 2);
    }

    #[test]
    fn zero_potential_is_rejected() {
        assert!(matches!(
            green_radial(|_| 0.0, 257),
            Err(Error::PreconditionFailure(_))
        ));
        assert!(green_grid(4).is_err());
    }

    #[test]
    fn csv_skips_the_pole() {
        let p = green_radial(|_| 1.0, 9).unwrap();
        let csv = p.to_csv();
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.starts_with("r,w,G\n"));
    }
}
