//! Diagnostics for concentrating families: peak scale, mass localization,
//! `L²` concentration, weak and strong pointwise estimates, comparison with
//! the standard bubble, and the speed of the peak towards the concentration
//! point.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::manifold::{DiscreteManifold, ManifoldKind, Point, ScalarField};
use crate::solver::{abs_powers, SolveResult};
use crate::sobolev::threshold;

pub const DEFAULT_NU: f64 = 0.1;

/// Where and how a sample is measured.
#[derive(Debug, Clone)]
pub struct AnalysisParams {
    /// Designated concentration point.
    pub x0: Point,
    /// Ball radius for the mass and `L²` ratios.
    pub delta: f64,
    /// Bubble comparison window, in units of `mu`.
    pub window: f64,
    /// Exponent of the strong estimate, in `(0, n−2)`.
    pub nu: f64,
}

#[derive(Debug, Clone)]
pub struct ConcentrationSample {
    pub param: f64,
    pub sup_u: f64,
    /// `sup_u^{−2/(n−2)}`.
    pub mu: f64,
    pub peak: usize,
    /// Distance of the peak from the base point.
    pub peak_r: f64,
    /// `∫_{B(x₀,δ)} f u^q` for the sample's exponent `q`.
    pub mass_in_ball: f64,
    pub l2_ratio: f64,
    pub weak_sup: f64,
    pub strong_sup: f64,
    pub bubble_err: f64,
    pub speed_ratio: f64,
    /// `sup u` outside `B(x₀, δ)`.
    pub outer_sup: f64,
}

/// Measures one nonnegative field `u` that satisfies the Euler equation with
/// multiplier `lambda` (used for the bubble comparison).
pub fn analyze_field(
    u: &ScalarField,
    f: &ScalarField,
    q: f64,
    lambda: f64,
    param: f64,
    p: &AnalysisParams,
) -> Result<ConcentrationSample> {
    let m = u.manifold();
    m.check(f)?;
    m.check_point(&p.x0)?;
    let n = m.dim() as f64;
    if !(p.nu > 0.0 && p.nu < n - 2.0) {
        return Err(Error::InvalidInput(format!("nu = {} must lie in (0, {})", p.nu, n - 2.0)));
    }
    if !(p.window > 0.0) {
        return Err(Error::InvalidInput(format!("window must be positive, got {}", p.window)));
    }
    let x0_node = m.nearest_node(&p.x0);
    if !(p.delta > m.cell_width(x0_node)) {
        return Err(Error::Resolution(format!(
            "delta = {} does not exceed the local grid spacing {:.3e}",
            p.delta,
            m.cell_width(x0_node)
        )));
    }
    let values = u.values();
    if values.iter().any(|v| *v < 0.0) {
        return Err(Error::InvalidInput("concentration diagnostics need u ≥ 0".into()));
    }
    let sup_u = u.max();
    if !(sup_u > 0.0) {
        return Err(Error::InvalidInput("u vanishes identically".into()));
    }
    let mu = sup_u.powf(-2.0 / (n - 2.0));
    let peak = u.argmax();
    let peak_point = cell_center(m, peak);
    let w = m.weights();

    let frac = m.ball_fractions(&p.x0, p.delta);
    let uq = abs_powers(values, q);
    let mut mass = 0.0;
    let mut l2_in = 0.0;
    let mut l2 = 0.0;
    let mut outer_sup = 0.0f64;
    for i in 0..values.len() {
        mass += w[i] * frac[i] * f.values()[i] * uq[i];
        let s = w[i] * values[i] * values[i];
        l2 += s;
        l2_in += frac[i] * s;
        if frac[i] < 1.0 {
            outer_sup = outer_sup.max(values[i]);
        }
    }

    let d = m.distances_from(&peak_point);
    let weak_e = (n - 2.0) / 2.0;
    let strong_e = n - 2.0 - p.nu;
    let strong_scale = mu.powf(-(n - 2.0) / 2.0 + p.nu);
    let mut weak_sup = 0.0f64;
    let mut strong_sup = 0.0f64;
    for (di, ui) in d.iter().zip(values) {
        weak_sup = weak_sup.max(di.powf(weak_e) * ui);
        strong_sup = strong_sup.max(di.powf(strong_e) * strong_scale * ui);
    }

    let f0 = f.values()[x0_node];
    let bubble_err = if lambda * f0 > 0.0 {
        let b = standard_bubble(m, &peak_point, mu, lambda, f0)?;
        let radius = (p.window * mu).min(max_window(m));
        bubble_fit_error(u, &b, &peak_point, radius)?
    } else {
        f64::NAN
    };

    Ok(ConcentrationSample {
        param,
        sup_u,
        mu,
        peak,
        peak_r: m.geodesic_distance(&m.base_point(), &peak_point),
        mass_in_ball: mass,
        l2_ratio: if l2 > 0.0 { l2_in / l2 } else { 0.0 },
        weak_sup,
        strong_sup,
        bubble_err,
        speed_ratio: m.geodesic_distance(&peak_point, &p.x0) / mu,
        outer_sup,
    })
}

/// [`analyze_field`] for a solver result; the sample parameter is its exponent.
pub fn analyze(result: &SolveResult, f: &ScalarField, p: &AnalysisParams) -> Result<ConcentrationSample> {
    analyze_field(&result.u, f, result.q, result.lambda, result.q, p)
}

/// Geometric centre of a node's cell. The end cells of the radial sphere
/// are balls around the pole and the antipode.
pub fn cell_center(m: &DiscreteManifold, i: usize) -> Point {
    if m.is_sphere() {
        if i == 0 {
            return Point::Radius(0.0);
        }
        if i + 1 == m.len() {
            return Point::Radius(std::f64::consts::PI);
        }
    }
    m.node_point(i)
}

fn max_window(m: &DiscreteManifold) -> f64 {
    match m.kind() {
        ManifoldKind::RadialSphere { .. } => std::f64::consts::PI,
        ManifoldKind::PeriodicTorus { side, .. } => side / 2.0,
    }
}

/// `mu^{−(n−2)/2}·(1 + (λ f0/(n(n−2)))·d²/mu²)^{−(n−2)/2}` around `center`.
pub fn standard_bubble(
    manifold: &Arc<DiscreteManifold>,
    center: &Point,
    mu: f64,
    lambda: f64,
    f0: f64,
) -> Result<ScalarField> {
    manifold.check_point(center)?;
    if !(mu > 0.0) || !(lambda * f0 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "standard bubble needs mu > 0 and lambda·f0 > 0 (mu = {mu}, lambda·f0 = {})",
            lambda * f0
        )));
    }
    let n = manifold.dim() as f64;
    let e = -(n - 2.0) / 2.0;
    let c = lambda * f0 / (n * (n - 2.0)) / (mu * mu);
    let peak = mu.powf(e);
    let values = manifold
        .distances_from(center)
        .into_iter()
        .map(|d| peak * (1.0 + c * d * d).powf(e))
        .collect();
    ScalarField::new(manifold.clone(), values)
}

/// `sup |u − B| / B` over the nodes within `window_radius` of `center`.
pub fn bubble_fit_error(u: &ScalarField, b: &ScalarField, center: &Point, window_radius: f64) -> Result<f64> {
    let m = u.manifold();
    m.check(b)?;
    m.check_point(center)?;
    if !(window_radius > 0.0) || window_radius > max_window(m) {
        return Err(Error::InvalidInput(format!(
            "window radius {window_radius} must lie in (0, {}]",
            max_window(m)
        )));
    }
    let d = m.distances_from(center);
    let mut err: Option<f64> = None;
    for ((di, ui), bi) in d.iter().zip(u.values()).zip(b.values()) {
        if *di <= window_radius {
            let e = ((ui - bi) / bi).abs();
            err = Some(err.map_or(e, |x: f64| x.max(e)));
        }
    }
    err.ok_or_else(|| Error::EmptyWindow(format!("no node within {window_radius} of the centre")))
}

/// Blow-up `ũ(x) = mu^{(n−2)/2}·u(mu·x)` of a radial field around the
/// centre of the peak cell, sampled at `samples` equispaced points of `[0, r_max]` outward
/// along the meridian. Returns `(x, ũ(x))` pairs.
pub fn blow_up_rescale(
    u: &ScalarField,
    peak: usize,
    mu: f64,
    r_max: f64,
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    let m = u.manifold();
    let radii = m.radii().ok_or_else(|| {
        Error::UnsupportedGeometry("blow-up profiles are sampled on the radial sphere".into())
    })?;
    if peak >= radii.len() {
        return Err(Error::InvalidInput(format!("peak node {peak} out of range")));
    }
    if !(mu > 0.0) || !(r_max > 0.0) || samples < 2 {
        return Err(Error::InvalidInput("need mu > 0, R > 0 and at least two samples".into()));
    }
    let Point::Radius(r_peak) = cell_center(m, peak) else { unreachable!() };
    if r_peak + r_max * mu > std::f64::consts::PI {
        return Err(Error::InvalidInput(format!(
            "R·mu = {} runs past the antipode",
            r_max * mu
        )));
    }
    let n = m.dim() as f64;
    let scale = mu.powf((n - 2.0) / 2.0);
    (0..samples)
        .map(|i| {
            let x = r_max * i as f64 / (samples - 1) as f64;
            let v = if i == 0 {
                u.values()[peak]
            } else {
                m.interpolate_radial(u.values(), r_peak + mu * x)?
            };
            Ok((x, scale * v))
        })
        .collect()
}

/// A member of the exact extremal family on the round sphere.
#[derive(Debug, Clone)]
pub struct SyntheticMember {
    /// `a·(b − cos r)^{−(n−2)/2}` with `∫u^{2*} = 1` on the grid.
    pub u: ScalarField,
    pub a: f64,
    pub b: f64,
    /// Measured `sup_u^{−2/(n−2)}`.
    pub mu: f64,
    pub offset: f64,
    /// Concentration point at distance `offset` from the peak.
    pub x0: Point,
}

fn family_member(m: &Arc<DiscreteManifold>, radii: &[f64], b: f64) -> (Vec<f64>, f64, f64) {
    let n = m.dim() as f64;
    let e = -(n - 2.0) / 2.0;
    let q = m.critical_exponent();
    // b − cos r evaluated as (b − 1) + 2 sin²(r/2) to keep digits near the pole
    let base: Vec<f64> = radii
        .iter()
        .map(|r| {
            let s = (0.5 * r).sin();
            (b - 1.0) + 2.0 * s * s
        })
        .collect();
    let shape: Vec<f64> = base.iter().map(|x| x.powf(e)).collect();
    let c = m.integrate_values(&abs_powers(&shape, q));
    let a = c.powf(-1.0 / q);
    let sup = a * shape.iter().copied().fold(0.0, f64::max);
    let mu = sup.powf(-2.0 / (n - 2.0));
    (shape.into_iter().map(|v| a * v).collect(), a, mu)
}

/// The exact extremals `a·(b − cos r)^{−(n−2)/2}` normalized on the grid, with
/// `b` tuned so that the measured scale equals each requested `mu`, and
/// concentration points placed at the requested offsets from the peak.
pub fn synthetic_family(
    manifold: &Arc<DiscreteManifold>,
    mu_list: &[f64],
    offsets: &[f64],
) -> Result<Vec<SyntheticMember>> {
    let radii = manifold.radii().ok_or_else(|| {
        Error::UnsupportedGeometry("the extremal family lives on the round sphere".into())
    })?;
    if mu_list.len() != offsets.len() {
        return Err(Error::InvalidInput(format!(
            "{} scales but {} offsets",
            mu_list.len(),
            offsets.len()
        )));
    }
    let mut out = Vec::with_capacity(mu_list.len());
    for (&mu, &offset) in mu_list.iter().zip(offsets) {
        if !(mu > 0.0) {
            return Err(Error::InvalidInput(format!("scale must be positive, got {mu}")));
        }
        if !(0.0..std::f64::consts::PI).contains(&offset) {
            return Err(Error::InvalidInput(format!("offset {offset} is not realizable on the sphere")));
        }
        let inside = radii.iter().filter(|r| **r < mu).count();
        if inside < 10 {
            return Err(Error::Resolution(format!(
                "only {inside} nodes inside radius {mu}; at least 10 are needed"
            )));
        }
        // measured scale grows with b; bisect on log(b − 1)
        let (mut lo, mut hi) = ((1e-14f64).ln(), (1e3f64).ln());
        let at = |t: f64| family_member(manifold, radii, 1.0 + t.exp()).2;
        if !(at(lo) < mu && at(hi) > mu) {
            return Err(Error::Resolution(format!("scale {mu} is outside the family's range")));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if at(mid) < mu {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let b = 1.0 + (0.5 * (lo + hi)).exp();
        let (values, a, measured) = family_member(manifold, radii, b);
        out.push(SyntheticMember {
            u: ScalarField::new(manifold.clone(), values)?,
            a,
            b,
            mu: measured,
            offset,
            x0: Point::Radius(offset),
        });
    }
    Ok(out)
}

/// Analyzes a synthetic family with `λ = threshold(n, 1)` and `f ≡ 1`; the
/// sample parameter is the requested scale.
pub fn analyze_synthetic(
    members: &[SyntheticMember],
    delta: f64,
    window: f64,
    nu: f64,
) -> Result<ConcentrationTrace> {
    let first = members
        .first()
        .ok_or_else(|| Error::InvalidInput("empty family".into()))?;
    let m = first.u.manifold();
    let one = ScalarField::constant(m, 1.0);
    let lambda = threshold(m.dim(), 1.0)?;
    let q = m.critical_exponent();
    let samples = members
        .iter()
        .map(|s| {
            let p = AnalysisParams { x0: s.x0.clone(), delta, window, nu };
            analyze_field(&s.u, &one, q, lambda, s.mu, &p)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut samples = samples;
    samples.sort_by(|a, b| a.param.total_cmp(&b.param));
    Ok(ConcentrationTrace {
        samples,
        x0: first.x0.clone(),
        delta,
        window,
    })
}

#[derive(Debug, Clone)]
pub struct ConcentrationTrace {
    pub samples: Vec<ConcentrationSample>,
    pub x0: Point,
    pub delta: f64,
    pub window: f64,
}

pub const TRACE_CSV_HEADER: &str =
    "param,sup_u,mu,peak_r,mass_in_ball,l2_ratio,weak_sup,strong_sup,bubble_err,speed_ratio";

impl ConcentrationTrace {
    /// Builds a trace from solver results along a continuation.
    pub fn from_results(results: &[SolveResult], f: &ScalarField, p: &AnalysisParams) -> Result<Self> {
        let mut samples = Vec::with_capacity(results.len());
        for r in results {
            // continuation may have moved to a refined grid
            let f_here = if Arc::ptr_eq(r.u.manifold(), f.manifold()) {
                f.clone()
            } else {
                f.manifold().resample_to(f, r.u.manifold())?
            };
            samples.push(analyze(r, &f_here, p)?);
        }
        samples.sort_by(|a, b| a.param.total_cmp(&b.param));
        Ok(Self {
            samples,
            x0: p.x0.clone(),
            delta: p.delta,
            window: p.window,
        })
    }

    /// `max/min` of a sample quantity over the trace.
    pub fn spread(&self, field: impl Fn(&ConcentrationSample) -> f64) -> f64 {
        let v: Vec<f64> = self.samples.iter().map(field).collect();
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(TRACE_CSV_HEADER);
        s.push('\n');
        for x in &self.samples {
            let row = [
                x.param,
                x.sup_u,
                x.mu,
                x.peak_r,
                x.mass_in_ball,
                x.l2_ratio,
                x.weak_sup,
                x.strong_sup,
                x.bubble_err,
                x.speed_ratio,
            ];
            let cells: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }
}

/// Twelve significant digits in scientific notation.
pub fn format_float(v: f64) -> String {
    format!("{v:.11e}")
}
