//! Position of the minimal energy relative to the Sobolev threshold:
//! classification, the necessary condition at maximum points of `f`,
//! bisection for critical potentials, Aubin's test-function expansion and
//! the second best constant on the round sphere.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functional::{coercivity_margin, quotient_j, ProblemSpec};
use crate::linalg::weighted_least_squares;
use crate::manifold::{DiscreteManifold, Point, ScalarField};
use crate::sobolev::{best_sobolev_k2, threshold};
use crate::solver::{minimize, InitStrategy, SolverConfig};

/// Default classification tolerance on `threshold − λ`.
pub const DEFAULT_TOL_CLASS: f64 = 0.05;

/// Tolerance used to collect the maximum points of `f`.
const MAX_POINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Subcritical,
    WeaklyCritical,
    Indeterminate,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Subcritical => "subcritical",
            Classification::WeaklyCritical => "weakly_critical",
            Classification::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CriticalityReport {
    pub lambda: f64,
    pub threshold: f64,
    /// `threshold − lambda`.
    pub margin: f64,
    pub classification: Classification,
    pub max_point_gaps: Vec<(Point, f64)>,
    pub coercive: bool,
    pub converged: bool,
    pub tol_class: f64,
}

impl CriticalityReport {
    pub fn min_max_point_gap(&self) -> Option<f64> {
        self.max_point_gaps.iter().map(|(_, g)| *g).reduce(f64::min)
    }
}

fn classify_margin(margin: f64, tol_class: f64) -> Classification {
    if margin > tol_class {
        Classification::Subcritical
    } else if margin.abs() <= tol_class {
        Classification::WeaklyCritical
    } else {
        // λ above the threshold contradicts the Aubin bound: the run has
        // not found the competing bubbles yet
        Classification::Indeterminate
    }
}

/// Compares the minimal energy with `threshold(n, sup f)`.
///
/// The computed `λ` is the energy of an admissible function, hence an upper
/// bound for the infimum: a margin above `tol_class` certifies
/// subcriticality even when the flow has not converged. An unconverged run
/// whose energy still sits above the threshold decides nothing.
pub fn classify(spec: &ProblemSpec, cfg: &SolverConfig, tol_class: f64) -> Result<CriticalityReport> {
    if !spec.is_critical() {
        return Err(Error::PreconditionFailure(format!(
            "classification needs q = 2*, got {}",
            spec.q()
        )));
    }
    if !(tol_class >= 0.0) {
        return Err(Error::InvalidInput(format!("tol_class must be nonnegative, got {tol_class}")));
    }
    let m = spec.manifold();
    let thr = threshold(m.dim(), spec.f().max())?;
    let mut run_cfg = cfg.clone();
    if matches!(run_cfg.init, InitStrategy::Constant) {
        run_cfg.init = InitStrategy::Multistart(0);
    }
    let res = minimize(spec, &run_cfg)?;
    let margin = thr - res.lambda;
    let classification = classify_margin(margin, tol_class);
    let max_point_gaps = match max_point_gap(m, spec.h(), spec.f()) {
        Ok(g) => g,
        Err(Error::UnsupportedDimension { .. }) => Vec::new(),
        Err(e) => return Err(e),
    };
    Ok(CriticalityReport {
        lambda: res.lambda,
        threshold: thr,
        margin,
        classification,
        max_point_gaps,
        coercive: true,
        converged: res.converged,
        tol_class,
    })
}

/// `(4(n−1)/(n−2))·h(P) − S(P) + ((n−4)/2)·Δf(P)/f(P)` at every maximum point
/// `P` of `f`. Weakly critical potentials have a nonnegative gap.
pub fn max_point_gap(manifold: &Arc<DiscreteManifold>, h: &ScalarField, f: &ScalarField) -> Result<Vec<(Point, f64)>> {
    manifold.check(h)?;
    manifold.check(f)?;
    let n = manifold.dim();
    if n < 4 {
        return Err(Error::UnsupportedDimension {
            dim: n,
            reason: "the necessary condition at maximum points needs n ≥ 4".into(),
        });
    }
    let nf = n as f64;
    let s = manifold.scalar_curvature_value();
    let lap_f = manifold.laplacian_values(f.values());
    f.max_points(MAX_POINT_TOL)
        .into_iter()
        .map(|i| {
            let fp = f.values()[i];
            if !(fp > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "f is not positive at its maximum point (value {fp})"
                )));
            }
            let mut gap = 4.0 * (nf - 1.0) / (nf - 2.0) * h.values()[i] - s;
            if n > 4 {
                gap += (nf - 4.0) / 2.0 * lap_f[i] / fp;
            }
            Ok((manifold.node_point(i), gap))
        })
        .collect()
}

/// One evaluation of the bisection predicate.
#[derive(Debug, Clone)]
pub struct OffsetProbe {
    pub t: f64,
    pub lambda: f64,
    pub classification: Classification,
    /// `∫u²` of the minimizer, i.e. `−dλ/dt`.
    pub l2_mass: f64,
}

#[derive(Debug, Clone)]
pub struct CriticalOffset {
    /// Midpoint of the final bracket.
    pub t0: f64,
    /// Brackets `(t_lo, t_hi)` after each bisection step; `h − t_hi` is
    /// subcritical, `h − t_lo` is not.
    pub brackets: Vec<(f64, f64)>,
    pub probes: Vec<OffsetProbe>,
    /// Tangent-line estimate of the offset where `λ(h − t)` reaches the
    /// threshold, from the subcritical end of the final bracket. Removes the
    /// bias of order `tol_class / ∫u²` carried by `t0`.
    pub t_threshold: f64,
}

fn probe(spec: &ProblemSpec, t: f64, cfg: &SolverConfig, tol_class: f64) -> Result<OffsetProbe> {
    let shifted = spec.shifted_h(t)?;
    let thr = threshold(spec.manifold().dim(), spec.f().max())?;
    let mut run_cfg = cfg.clone();
    if matches!(run_cfg.init, InitStrategy::Constant) {
        run_cfg.init = InitStrategy::Multistart(0);
    }
    // the predicate only asks whether some admissible function certifies
    // subcriticality
    run_cfg.stop_below = Some(thr - tol_class);
    let res = minimize(&shifted, &run_cfg)?;
    let margin = thr - res.lambda;
    let classification = classify_margin(margin, tol_class);
    let m = spec.manifold();
    let l2_mass = m.inner(res.u.values(), res.u.values());
    Ok(OffsetProbe { t, lambda: res.lambda, classification, l2_mass })
}

/// Bisection on `t ∈ [0, t_max]` for the smallest offset making `h − t`
/// subcritical.
pub fn find_critical_offset(
    spec: &ProblemSpec,
    t_max: f64,
    tol_t: f64,
    tol_class: f64,
    cfg: &SolverConfig,
) -> Result<CriticalOffset> {
    if !spec.is_critical() {
        return Err(Error::PreconditionFailure(format!(
            "bisection needs q = 2*, got {}",
            spec.q()
        )));
    }
    if !(t_max > 0.0) || !(tol_t > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need t_max > 0 and tol_t > 0 (t_max = {t_max}, tol_t = {tol_t})"
        )));
    }
    let lo_probe = probe(spec, 0.0, cfg, tol_class)?;
    if lo_probe.classification == Classification::Subcritical {
        return Err(Error::NoCrossing(format!(
            "h is already subcritical (λ = {:.6})",
            lo_probe.lambda
        )));
    }
    let hi_probe = probe(spec, t_max, cfg, tol_class)?;
    if hi_probe.classification != Classification::Subcritical {
        return Err(Error::NoCrossing(format!(
            "h − {t_max} is not subcritical (λ = {:.6})",
            hi_probe.lambda
        )));
    }
    let mut probes = vec![lo_probe, hi_probe];
    let (mut lo, mut hi) = (0.0, t_max);
    let mut hi_index = 1;
    let mut brackets = vec![(lo, hi)];
    while hi - lo > tol_t {
        let mid = 0.5 * (lo + hi);
        let p = probe(spec, mid, cfg, tol_class)?;
        if p.classification == Classification::Subcritical {
            hi = mid;
            hi_index = probes.len();
        } else {
            lo = mid;
        }
        probes.push(p);
        brackets.push((lo, hi));
    }
    let sub = &probes[hi_index];
    let thr = threshold(spec.manifold().dim(), spec.f().max())?;
    let t_threshold = if sub.l2_mass > 0.0 {
        sub.t - (thr - sub.lambda) / sub.l2_mass
    } else {
        0.5 * (lo + hi)
    };
    Ok(CriticalOffset {
        t0: 0.5 * (lo + hi),
        brackets,
        probes,
        t_threshold,
    })
}

fn check_center(manifold: &DiscreteManifold, p: &Point) -> Result<()> {
    manifold.check_point(p)?;
    if manifold.is_sphere() {
        let Point::Radius(r) = p else { unreachable!() };
        if *r != 0.0 {
            return Err(Error::UnsupportedGeometry(
                "radial fields can only be centred at the pole".into(),
            ));
        }
    }
    Ok(())
}

/// Aubin's test function `(1/k + r²)^{−(n−2)/2} − (1/k + δ²)^{−(n−2)/2}` on
/// `B(P, δ)`, zero outside.
pub fn aubin_test_function(manifold: &Arc<DiscreteManifold>, p: &Point, k: u32, delta: f64) -> Result<ScalarField> {
    check_center(manifold, p)?;
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let limit = if manifold.is_sphere() {
        std::f64::consts::PI
    } else {
        match manifold.kind() {
            crate::manifold::ManifoldKind::PeriodicTorus { side, .. } => side / 2.0,
            _ => unreachable!(),
        }
    };
    if !(delta > 0.0 && delta < limit) {
        return Err(Error::InvalidInput(format!("delta = {delta} must lie in (0, {limit})")));
    }
    let e = -(manifold.dim() as f64 - 2.0) / 2.0;
    let eps = 1.0 / k as f64;
    let cut = (eps + delta * delta).powf(e);
    let values = manifold
        .distances_from(p)
        .into_iter()
        .map(|r| if r < delta { (eps + r * r).powf(e) - cut } else { 0.0 })
        .collect();
    ScalarField::new(manifold.clone(), values)
}

#[derive(Debug, Clone)]
pub struct AubinSeries {
    pub k_list: Vec<u32>,
    pub j_values: Vec<f64>,
    /// `J(ψ_k)·K²·(sup f)^{(n−2)/n} − 1`.
    pub y_values: Vec<f64>,
    pub fitted_slope: f64,
    /// Weighted root-mean-square misfit of the expansion model.
    pub fit_residual: f64,
    pub predicted_slope: f64,
    pub delta: f64,
}

/// Fits `y_k ≈ c₁/k + c₂/k² + c₃/k^{5/2}` with weights `k` and returns `c₁`.
/// Shorter lists drop the higher terms.
pub(crate) fn fit_slope(k_list: &[u32], y: &[f64]) -> Result<(f64, f64)> {
    let powers: &[f64] = match k_list.len() {
        0 => return Err(Error::InvalidInput("empty k list".into())),
        1 | 2 => &[1.0],
        3 => &[1.0, 2.0],
        _ => &[1.0, 2.0, 2.5],
    };
    let design: Vec<Vec<f64>> = k_list
        .iter()
        .map(|&k| powers.iter().map(|p| (k as f64).powf(-p)).collect())
        .collect();
    let weights: Vec<f64> = k_list.iter().map(|&k| k as f64).collect();
    let coef = weighted_least_squares(&design, y, &weights)?;
    let wsum: f64 = weights.iter().sum();
    let sse: f64 = design
        .iter()
        .zip(y)
        .zip(&weights)
        .map(|((row, yk), w)| {
            let fit: f64 = row.iter().zip(&coef).map(|(a, c)| a * c).sum();
            w * (yk - fit).powi(2)
        })
        .sum();
    Ok((coef[0], (sse / wsum).sqrt()))
}

/// Evaluates `J` on Aubin's test functions centred at a maximum point of `f`
/// and extracts the `1/k` coefficient of `J·K²·(sup f)^{(n−2)/n} − 1`.
pub fn aubin_slope(
    manifold: &Arc<DiscreteManifold>,
    h: &ScalarField,
    f: &ScalarField,
    p: &Point,
    k_list: &[u32],
    delta: f64,
) -> Result<AubinSeries> {
    let n = manifold.dim();
    if n <= 4 {
        return Err(Error::UnsupportedDimension {
            dim: n,
            reason: "the 1/k expansion needs n ≥ 5".into(),
        });
    }
    if k_list.is_empty() || k_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("k list must be nonempty and strictly increasing".into()));
    }
    check_center(manifold, p)?;
    let node = manifold.nearest_node(p);
    let sup_f = f.max();
    if f.values()[node] < sup_f - MAX_POINT_TOL {
        return Err(Error::PreconditionFailure(format!(
            "f is not maximal at the centre (f = {}, sup f = {sup_f})",
            f.values()[node]
        )));
    }
    let spec = ProblemSpec::critical(h.clone(), f.clone())?;
    let nf = n as f64;
    let scale = best_sobolev_k2(n) * sup_f.powf((nf - 2.0) / nf);
    let mut j_values = Vec::with_capacity(k_list.len());
    let mut y_values = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let psi = aubin_test_function(manifold, p, k, delta)?;
        let j = quotient_j(&spec, &psi)?;
        j_values.push(j);
        y_values.push(j * scale - 1.0);
    }
    let (fitted_slope, fit_residual) = fit_slope(k_list, &y_values)?;
    let lap_f = manifold.laplacian_values(f.values());
    let predicted_slope = (4.0 * (nf - 1.0) / (nf - 2.0) * h.values()[node] - manifold.scalar_curvature_value()
        + (nf - 4.0) / 2.0 * lap_f[node] / f.values()[node])
        / (nf * (nf - 4.0));
    Ok(AubinSeries {
        k_list: k_list.to_vec(),
        j_values,
        y_values,
        fitted_slope,
        fit_residual,
        predicted_slope,
        delta,
    })
}

/// Result of the second-best-constant estimate on the round sphere.
#[derive(Debug, Clone)]
pub struct B0Estimate {
    pub b0: f64,
    /// The critical constant potential `h_start − t0`.
    pub critical_constant: f64,
    pub h_start: f64,
    pub offset: CriticalOffset,
}

/// `B₀ = K²·c₀` with `c₀` the critical constant potential for `f ≡ 1`, found
/// by bisecting down from twice the constant whose energy equals the
/// threshold.
pub fn estimate_b0_sphere(
    manifold: &Arc<DiscreteManifold>,
    tol_t: f64,
    tol_class: f64,
    cfg: &SolverConfig,
) -> Result<B0Estimate> {
    if !manifold.is_sphere() {
        return Err(Error::UnsupportedGeometry(
            "the second best constant is estimated on the round sphere only".into(),
        ));
    }
    let n = manifold.dim();
    let nf = n as f64;
    let thr = threshold(n, 1.0)?;
    let h_start = 2.0 * thr * manifold.volume().powf(-2.0 / nf);
    let spec = ProblemSpec::critical(
        ScalarField::constant(manifold, h_start),
        ScalarField::constant(manifold, 1.0),
    )?;
    let offset = find_critical_offset(&spec, 0.95 * h_start, tol_t, tol_class, cfg)?;
    let critical_constant = h_start - offset.t0;
    Ok(B0Estimate {
        b0: best_sobolev_k2(n) * critical_constant,
        critical_constant,
        h_start,
        offset,
    })
}

/// Whether `Δ + h` is coercive, with its margin.
pub fn coercivity(manifold: &Arc<DiscreteManifold>, h: &ScalarField) -> Result<(bool, f64)> {
    let m = coercivity_margin(manifold, h)?;
    Ok((m > 0.0, m))
}
