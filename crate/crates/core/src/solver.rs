//! Minimization of `J_{h,f}` over `{∫f|u|^q > 0}` by a normalized
//! semi-implicit gradient flow.
//!
//! One step freezes `λ(u) = I(u)` on the constraint surface and solves
//!
//! ```text
//! (Id + τ(Δ + h₊)) v = u + τ(λ f u^{q−1} + h₋ u),   u ← |v| / (∫f|v|^q)^{1/q}
//! ```
//!
//! with `h = h₊ − h₋`. Steps that would raise the energy are rejected and
//! retried with half the step.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::functional::{coercivity_margin, ProblemSpec};
use crate::manifold::{build_radial_sphere, DiscreteManifold, ManifoldKind, Point, ScalarField};

#[derive(Debug, Clone)]
pub enum InitStrategy {
    Constant,
    Bubble { center: Point, mu: f64 },
    Field(ScalarField),
    /// Constant start, bubble seeds at the maximum points of `f` with fixed
    /// scales, plus this many bubble seeds with random scales.
    Multistart(usize),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub tau: f64,
    pub max_iter: usize,
    pub tol_residual: f64,
    pub init: InitStrategy,
    pub rng_seed: u64,
    /// Stop as soon as the energy drops below this value; multistart then
    /// skips the remaining starts. Used when only an upper bound matters.
    pub stop_below: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tau: 0.5,
            max_iter: 5000,
            tol_residual: 1e-8,
            init: InitStrategy::Constant,
            rng_seed: 0,
            stop_below: None,
        }
    }
}

impl SolverConfig {
    /// Defaults tuned per geometry: the torus stencil is cruder, so its
    /// residual tolerance is looser.
    pub fn for_manifold(m: &DiscreteManifold) -> Self {
        let mut cfg = Self::default();
        if !m.is_sphere() {
            cfg.tol_residual = 1e-6;
        }
        cfg
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !(self.tol_residual > 0.0) {
            return Err(Error::InvalidConfiguration(format!(
                "solver needs tau > 0 and tol_residual > 0 (tau = {}, tol = {})",
                self.tau, self.tol_residual
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Nonnegative minimizer with `∫f u^q = 1`.
    pub u: ScalarField,
    pub lambda: f64,
    /// `sup|Δu + hu − λfu^{q−1}| / sup|λfu^{q−1}|`.
    pub residual: f64,
    pub iters: usize,
    pub q: f64,
    pub converged: bool,
    /// Energy after every accepted step, starting with the initial iterate.
    pub history: Vec<f64>,
    /// Which start produced this result.
    pub start: String,
}

impl SolveResult {
    pub fn sup_u(&self) -> f64 {
        self.u.max()
    }

    pub fn peak(&self) -> usize {
        self.u.argmax()
    }
}

/// Nodewise `Δu + hu − λ f u^{q−1}`.
pub fn euler_residual(spec: &ProblemSpec, u: &ScalarField, lambda: f64) -> Result<ScalarField> {
    spec.manifold().check(u)?;
    let values = residual_values(spec, u.values(), lambda);
    ScalarField::new(spec.manifold().clone(), values)
}

fn residual_values(spec: &ProblemSpec, u: &[f64], lambda: f64) -> Vec<f64> {
    let lap = spec.manifold().laplacian_values(u);
    let q = spec.q();
    let h = spec.h().values();
    let f = spec.f().values();
    (0..u.len())
        .map(|i| lap[i] + h[i] * u[i] - lambda * f[i] * u[i].abs().powf(q - 1.0) * u[i].signum())
        .collect()
}

/// `|x|^e` for every entry, with a fast path for integer exponents.
pub(crate) fn abs_powers(x: &[f64], e: f64) -> Vec<f64> {
    if e.fract() == 0.0 && e.abs() < 64.0 {
        let k = e as i32;
        x.iter().map(|v| v.abs().powi(k)).collect()
    } else {
        x.iter().map(|v| v.abs().powf(e)).collect()
    }
}

fn relative_residual(spec: &ProblemSpec, u: &[f64], lambda: f64) -> f64 {
    let p = abs_powers(u, spec.q() - 1.0);
    relative_residual_with(spec, u, &p, lambda)
}

/// Relative residual of a nonnegative iterate given `p = u^{q−1}`.
fn relative_residual_with(spec: &ProblemSpec, u: &[f64], p: &[f64], lambda: f64) -> f64 {
    let lap = spec.manifold().laplacian_values(u);
    let h = spec.h().values();
    let f = spec.f().values();
    let mut sup = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..u.len() {
        let source = lambda * f[i] * p[i];
        sup = sup.max((lap[i] + h[i] * u[i] - source).abs());
        scale = scale.max(source.abs());
    }
    if scale > 0.0 {
        sup / scale
    } else {
        sup
    }
}

/// Rescales a nonnegative `v` onto the constraint surface and returns
/// `v^{q−1}` for the rescaled values.
fn normalize_nonneg(spec: &ProblemSpec, v: &mut [f64]) -> Result<Vec<f64>> {
    let q = spec.q();
    let mut p = abs_powers(v, q - 1.0);
    let c: f64 = spec
        .manifold()
        .weights()
        .iter()
        .zip(spec.f().values())
        .zip(v.iter().zip(&p))
        .map(|((w, f), (v, p))| w * f * v * p)
        .sum();
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::NotAdmissible(c));
    }
    let s = c.powf(-1.0 / q);
    let sp = s.powf(q - 1.0);
    v.iter_mut().for_each(|x| *x *= s);
    p.iter_mut().for_each(|x| *x *= sp);
    Ok(p)
}

fn normalize(spec: &ProblemSpec, v: &mut [f64]) -> Result<()> {
    let c = spec.constraint_values(v);
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::NotAdmissible(c));
    }
    let s = c.powf(-1.0 / spec.q());
    v.iter_mut().for_each(|x| *x *= s);
    Ok(())
}

/// Unnormalized bubble `(μ² + d(center, x)²)^{−(n−2)/2}`.
pub(crate) fn bubble_seed(m: &Arc<DiscreteManifold>, center: &Point, mu: f64) -> Vec<f64> {
    let e = -(m.dim() as f64 - 2.0) / 2.0;
    m.distances_from(center)
        .into_iter()
        .map(|d| (mu * mu + d * d).powf(e))
        .collect()
}

/// Centres at which bubble seeds are placed: maximum points of `f` that can
/// carry a bubble on this geometry.
fn seed_centers(spec: &ProblemSpec) -> Vec<Point> {
    let m = spec.manifold();
    let f = spec.f();
    let maxima = f.max_points(1e-9);
    if m.is_sphere() {
        let last = m.len() - 1;
        let mut c = Vec::new();
        if maxima.contains(&0) || !maxima.contains(&last) {
            c.push(Point::Radius(0.0));
        }
        if maxima.contains(&last) && maxima.len() < m.len() {
            c.push(Point::Radius(std::f64::consts::PI));
        }
        c
    } else if maxima.len() == m.len() {
        vec![m.base_point()]
    } else {
        maxima.iter().take(4).map(|&i| m.node_point(i)).collect()
    }
}

const STAGNATION_WINDOW: usize = 200;

const SEED_SCALES: [f64; 4] = [0.3, 0.1, 0.03, 0.01];

fn starts(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<Vec<(String, Vec<f64>)>> {
    let m = spec.manifold();
    let constant = ("constant".to_string(), vec![1.0; m.len()]);
    Ok(match &cfg.init {
        InitStrategy::Constant => vec![constant],
        InitStrategy::Bubble { center, mu } => {
            m.check_point(center)?;
            if !(*mu > 0.0) {
                return Err(Error::InvalidInput(format!("bubble scale must be positive, got {mu}")));
            }
            vec![(format!("bubble(mu={mu})"), bubble_seed(m, center, *mu))]
        }
        InitStrategy::Field(u) => {
            m.check(u)?;
            vec![("field".to_string(), u.values().iter().map(|v| v.abs()).collect())]
        }
        InitStrategy::Multistart(k) => {
            let mut out = vec![constant];
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
            let mut scales: Vec<f64> = SEED_SCALES.to_vec();
            for _ in 0..*k {
                let t: f64 = rng.gen();
                scales.push((0.02f64.ln() + t * (0.5f64.ln() - 0.02f64.ln())).exp());
            }
            for center in seed_centers(spec) {
                let node = m.nearest_node(&center);
                // seeds narrower than a few cells are pure grid artefacts
                let floor = 3.0 * m.cell_width(node);
                for &mu in &scales {
                    if mu >= floor {
                        out.push((format!("bubble({center:?}, mu={mu:.4})"), bubble_seed(m, &center, mu)));
                    }
                }
            }
            out
        }
    })
}

fn run_flow(spec: &ProblemSpec, cfg: &SolverConfig, label: String, init: Vec<f64>) -> Result<SolveResult> {
    let m = spec.manifold();
    let q = spec.q();
    let h = spec.h().values();
    let f = spec.f().values();
    let h_minus: Vec<f64> = h.iter().map(|v| (-v).max(0.0)).collect();
    let diag_for = |tau: f64| -> Vec<f64> { h.iter().map(|v| 1.0 + tau * v.max(0.0)).collect() };

    let mut u: Vec<f64> = init.into_iter().map(f64::abs).collect();
    let mut p = normalize_nonneg(spec, &mut u)?;
    let mut lambda = spec.energy_values(&u);
    let mut history = vec![lambda];
    let mut tau = cfg.tau;
    let mut diag = diag_for(tau);
    let mut residual = relative_residual_with(spec, &u, &p, lambda);
    let mut iters = 0;
    let mut converged = residual <= cfg.tol_residual;
    let below_target = |l: f64| cfg.stop_below.is_some_and(|t| l < t);

    while !converged && iters < cfg.max_iter && !below_target(lambda) {
        iters += 1;
        let rhs: Vec<f64> = (0..u.len())
            .map(|i| u[i] + tau * (lambda * f[i] * p[i] + h_minus[i] * u[i]))
            .collect();
        let mut v = m.solve_shifted(tau, &diag, &rhs)?;
        v.iter_mut().for_each(|x| *x = x.abs());
        let pv = normalize_nonneg(spec, &mut v)?;
        let lambda_new = spec.energy_values(&v);
        if !lambda_new.is_finite() {
            return Err(Error::NumericFailure("energy became non-finite".into()));
        }
        if lambda_new > lambda + 1e-12 * lambda.abs() {
            tau *= 0.5;
            if tau < 1e-10 * cfg.tau {
                break;
            }
            diag = diag_for(tau);
            continue;
        }
        u = v;
        p = pv;
        lambda = lambda_new;
        history.push(lambda);
        if tau < cfg.tau {
            tau = (2.0 * tau).min(cfg.tau);
            diag = diag_for(tau);
        }
        residual = relative_residual_with(spec, &u, &p, lambda);
        converged = residual <= cfg.tol_residual;
        // the energy has stopped moving: further steps only stir roundoff
        let len = history.len();
        if len > STAGNATION_WINDOW
            && history[len - 1 - STAGNATION_WINDOW] - lambda <= 1e-15 * lambda.abs()
        {
            break;
        }
    }
    if !converged && !below_target(lambda) && m.is_sphere() {
        if let Some((v, lv, rv)) = newton_polish(spec, &u, lambda) {
            if rv < residual && lv <= lambda + 1e-6 * lambda.abs() {
                u = v;
                lambda = lv;
                residual = rv;
                history.push(lambda);
                converged = residual <= cfg.tol_residual;
            }
        }
    }
    Ok(SolveResult {
        u: ScalarField::new(m.clone(), u)?,
        lambda,
        residual,
        iters,
        q,
        converged,
        history,
        start: label,
    })
}

/// Damped Newton iteration on `Δv + hv = f v^{q−1}` started from the
/// rescaled flow iterate `v = λ^{1/(q−2)} u`. Returns the renormalized
/// solution with its energy and relative residual, or `None` if the
/// iteration leaves the positive cone or stops improving.
fn newton_polish(spec: &ProblemSpec, u: &[f64], lambda: f64) -> Option<(Vec<f64>, f64, f64)> {
    let m = spec.manifold();
    let q = spec.q();
    let h = spec.h().values();
    let f = spec.f().values();
    if !(lambda > 0.0) || u.iter().any(|x| !(*x > 0.0)) {
        return None;
    }
    let sup = |r: &[f64]| r.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let eq = |v: &[f64]| -> Vec<f64> {
        let lap = m.laplacian_values(v);
        (0..v.len()).map(|i| lap[i] + h[i] * v[i] - f[i] * v[i].powf(q - 1.0)).collect()
    };
    let mut v: Vec<f64> = u.iter().map(|x| x * lambda.powf(1.0 / (q - 2.0))).collect();
    let mut res = eq(&v);
    let mut norm = sup(&res);
    for _ in 0..40 {
        let diag: Vec<f64> = (0..v.len())
            .map(|i| h[i] - (q - 1.0) * f[i] * v[i].powf(q - 2.0))
            .collect();
        let step = m.solve_radial_schrodinger(&diag, &res).ok()?;
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha > 1e-4 {
            let trial: Vec<f64> = v.iter().zip(&step).map(|(a, d)| a - alpha * d).collect();
            if trial.iter().all(|x| *x > 0.0) {
                let r = eq(&trial);
                let n = sup(&r);
                if n < norm {
                    v = trial;
                    res = r;
                    norm = n;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
        let scale = (0..v.len())
            .map(|i| (f[i] * v[i].powf(q - 1.0)).abs())
            .fold(0.0, f64::max);
        if norm <= 1e-13 * scale {
            break;
        }
    }
    normalize(spec, &mut v).ok()?;
    let lv = spec.energy_values(&v);
    let rv = relative_residual(spec, &v, lv);
    Some((v, lv, rv))
}

fn check_preconditions(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    let margin = coercivity_margin(spec.manifold(), spec.h())?;
    if !(margin > 0.0) {
        return Err(Error::PreconditionFailure(format!(
            "Δ + h is not coercive (smallest eigenvalue {margin:.6e})"
        )));
    }
    Ok(())
}

/// Runs the flow from every configured start and returns all results in
/// start order.
pub fn minimize_all(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<Vec<SolveResult>> {
    check_preconditions(spec, cfg)?;
    let mut out = Vec::new();
    for (label, init) in starts(spec, cfg)? {
        let r = run_flow(spec, cfg, label, init)?;
        let done = cfg.stop_below.is_some_and(|t| r.lambda < t);
        out.push(r);
        if done {
            break;
        }
    }
    Ok(out)
}

/// Best of [`minimize_all`]: smallest energy, ties (10⁻⁹ relative) broken by
/// the smaller peak radius.
pub fn minimize(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<SolveResult> {
    let all = minimize_all(spec, cfg)?;
    Ok(select_best(spec.manifold(), all))
}

fn select_best(m: &DiscreteManifold, all: Vec<SolveResult>) -> SolveResult {
    let base = m.base_point();
    let peak_dist = |r: &SolveResult| m.geodesic_distance(&base, &m.node_point(r.peak()));
    all.into_iter()
        .reduce(|best, r| {
            let tie = (r.lambda - best.lambda).abs() <= 1e-9 * best.lambda.abs();
            if (!tie && r.lambda < best.lambda) || (tie && peak_dist(&r) < peak_dist(&best)) {
                r
            } else {
                best
            }
        })
        .expect("at least one start")
}

/// Re-clustering policy for [`continuation_in_q`].
#[derive(Debug, Clone)]
pub struct ContinuationConfig {
    /// Refine the radial grid once `sup u` exceeds this value.
    pub recluster_trigger: f64,
    /// Increment of the clustering exponent per refinement.
    pub clustering_step: f64,
    pub max_clustering: f64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            recluster_trigger: 1e3,
            clustering_step: 0.5,
            max_clustering: 4.0,
        }
    }
}

/// Solves along an ascending list of exponents, warm-starting each solve from
/// the previous minimizer.
pub fn continuation_in_q(
    spec: &ProblemSpec,
    q_list: &[f64],
    cfg: &SolverConfig,
    ccfg: &ContinuationConfig,
) -> Result<Vec<SolveResult>> {
    if q_list.is_empty() {
        return Err(Error::InvalidInput("empty exponent list".into()));
    }
    if q_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::PreconditionFailure(
            "exponent list must be strictly ascending".into(),
        ));
    }
    let mut current = spec.with_q(q_list[0])?;
    let mut out: Vec<SolveResult> = Vec::with_capacity(q_list.len());
    for (k, &q) in q_list.iter().enumerate() {
        let mut step_cfg = cfg.clone();
        if let Some(prev) = out.last() {
            let mut warm = prev.u.clone();
            if prev.sup_u() > ccfg.recluster_trigger {
                if let Some((refined, u)) = recluster(&current, &prev.u, ccfg)? {
                    current = refined;
                    warm = u;
                }
            }
            current = current.with_q(q)?;
            step_cfg.init = InitStrategy::Field(warm);
        } else if k == 0 {
            current = current.with_q(q)?;
        }
        out.push(minimize(&current, &step_cfg)?);
    }
    Ok(out)
}

fn recluster(
    spec: &ProblemSpec,
    u: &ScalarField,
    ccfg: &ContinuationConfig,
) -> Result<Option<(ProblemSpec, ScalarField)>> {
    let m = spec.manifold();
    let ManifoldKind::RadialSphere { dim, nodes, clustering } = *m.kind() else {
        return Ok(None);
    };
    let next = (clustering + ccfg.clustering_step).min(ccfg.max_clustering);
    if next <= clustering {
        return Ok(None);
    }
    let refined = build_radial_sphere(dim, nodes, next)?;
    let h = m.resample_to(spec.h(), &refined)?;
    let f = m.resample_to(spec.f(), &refined)?;
    let u = m.resample_to(u, &refined)?;
    Ok(Some((ProblemSpec::new(h, f, spec.q())?, u)))
}
