//! Dispatch from a validated config to the library.

use std::sync::Arc;

use critlab::concentration::{
    analyze_synthetic, format_float, synthetic_family, AnalysisParams, ConcentrationTrace, DEFAULT_NU,
};
use critlab::conformal::covariance_refinement;
use critlab::criticality::{
    aubin_slope, classify, estimate_b0_sphere, find_critical_offset, CriticalOffset, DEFAULT_TOL_CLASS,
};
use critlab::functional::ProblemSpec;
use critlab::green3::{find_mass_zero_offset, green_from_values, green_grid};
use critlab::manifold::{
    build_periodic_torus, build_radial_sphere, make_profile, DiscreteManifold, Point, ProfileSpec,
};
use critlab::sobolev::{threshold, SharpConstants};
use critlab::solver::{continuation_in_q, minimize, ContinuationConfig, InitStrategy, SolverConfig};

use crate::config::{parse_init, ExperimentConfig, InitChoice, ManifoldConfig, ParseError, TaskKind};
use crate::CliError;

/// Everything a task produces, before it is written to disk.
#[derive(Debug, Clone, Default)]
pub struct TaskOutput {
    pub report: Vec<String>,
    /// `(file name, contents)`.
    pub csvs: Vec<(String, String)>,
    /// Scalar results for sweep summaries, in [`metric_names`] order.
    pub metrics: Vec<String>,
}

/// Summary columns per task.
pub fn metric_names(kind: TaskKind) -> &'static [&'static str] {
    match kind {
        TaskKind::Constants => &["k2", "threshold", "two_star"],
        TaskKind::Solve => &["lambda", "residual", "iters", "converged", "sup_u"],
        TaskKind::Classify => &["lambda", "threshold", "margin", "classification", "min_max_point_gap"],
        TaskKind::FindCritical => &["t0", "t_threshold", "b0"],
        TaskKind::Aubin => &["fitted_slope", "predicted_slope", "fit_residual"],
        TaskKind::Concentrate => &["last_param", "last_sup_u", "last_mass_in_ball", "last_bubble_err"],
        TaskKind::GreenMass => &["mass", "shift"],
        TaskKind::ConformalCheck => &["last_residual", "min_ratio", "max_ratio"],
    }
}

/// Twelve significant digits, in the same notation as the CSV files.
pub fn num(v: f64) -> String {
    format_float(v)
}

/// Twelve significant digits in positional notation where that is readable.
pub fn num_plain(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format_float(v)
    }
}

fn missing(cfg: &ExperimentConfig, key: &str) -> CliError {
    CliError::Config(ParseError {
        line: cfg.task_line,
        column: 1,
        message: format!("task `{}` needs `{key}`", cfg.task.name()),
    })
}

fn f64_param(cfg: &ExperimentConfig, key: &str, default: f64) -> Result<f64, CliError> {
    Ok(cfg.param(key).map(|v| v.as_f64()).transpose()?.unwrap_or(default))
}

fn required_f64_list(cfg: &ExperimentConfig, key: &str) -> Result<Vec<f64>, CliError> {
    match cfg.param(key) {
        Some(v) => Ok(v.as_f64_list()?),
        None => Err(missing(cfg, key)),
    }
}

pub fn build_manifold(m: &ManifoldConfig) -> Result<Arc<DiscreteManifold>, CliError> {
    Ok(match m {
        ManifoldConfig::Sphere { n, nodes, clustering } => build_radial_sphere(*n, *nodes, *clustering)?,
        ManifoldConfig::Torus { n, per_axis, side } => build_periodic_torus(*n, *side, *per_axis)?,
    })
}

/// Solver settings from the task section; `seed` overrides the config seed.
pub fn solver_config(cfg: &ExperimentConfig, m: &DiscreteManifold, seed: Option<u64>) -> Result<SolverConfig, CliError> {
    let mut s = SolverConfig::for_manifold(m);
    s.tau = f64_param(cfg, "tau", s.tau)?;
    s.tol_residual = f64_param(cfg, "tol_residual", s.tol_residual)?;
    if let Some(v) = cfg.param("max_iter") {
        s.max_iter = v.as_usize()?;
    }
    s.rng_seed = match seed {
        Some(seed) => seed,
        None => cfg.param("seed").map(|v| v.as_u64()).transpose()?.unwrap_or(0),
    };
    if let Some(v) = cfg.param("init") {
        s.init = match parse_init(v)? {
            InitChoice::Constant => InitStrategy::Constant,
            InitChoice::Multistart(k) => InitStrategy::Multistart(k),
            InitChoice::Bubble { r, mu } => {
                let center = if m.is_sphere() {
                    Point::Radius(r)
                } else {
                    Point::Coords(vec![r; m.dim()])
                };
                InitStrategy::Bubble { center, mu }
            }
        };
    }
    Ok(s)
}

fn seed_of(cfg: &ExperimentConfig, seed: Option<u64>) -> Result<u64, CliError> {
    Ok(match seed {
        Some(s) => s,
        None => cfg.param("seed").map(|v| v.as_u64()).transpose()?.unwrap_or(0),
    })
}

fn radial_closed_form(spec: &ProfileSpec, what: &str) -> Result<impl Fn(f64) -> f64 + Clone, CliError> {
    if spec.eval_radial(0.0).is_none() {
        return Err(CliError::Core(critlab::Error::InvalidInput(format!(
            "{what} must be a closed-form profile here, got {spec}"
        ))));
    }
    let spec = spec.clone();
    Ok(move |r: f64| spec.eval_radial(r).unwrap_or(f64::NAN))
}

/// Runs the configured task. `seed` is the command-line override.
pub fn run_task(cfg: &ExperimentConfig, seed: Option<u64>) -> Result<TaskOutput, CliError> {
    let mut out = TaskOutput::default();
    let n = cfg.manifold.dim();
    out.report.push(format!("task: {}", cfg.task.name()));
    out.report.push(format!("seed: {}", seed_of(cfg, seed)?));
    match &cfg.manifold {
        ManifoldConfig::Sphere { n, nodes, clustering } => out.report.push(format!(
            "grid: sphere n = {n}, N = {nodes}, clustering = {}",
            num_plain(*clustering)
        )),
        ManifoldConfig::Torus { n, per_axis, side } => out.report.push(format!(
            "grid: torus n = {n}, m = {per_axis}, L = {}",
            num_plain(*side)
        )),
    }
    out.report.push(format!("h: {}", cfg.h));
    out.report.push(format!("f: {}", cfg.f));

    match cfg.task {
        TaskKind::GreenMass => return green_task(cfg, out),
        TaskKind::ConformalCheck => return conformal_task(cfg, out),
        _ => {}
    }

    let m = build_manifold(&cfg.manifold)?;
    let h = make_profile(&m, &cfg.h)?;
    let f = make_profile(&m, &cfg.f)?;
    match cfg.task {
        TaskKind::Constants => {
            let c = SharpConstants::new(n)?;
            let thr = threshold(n, f.max())?;
            out.report.push(format!("omega_n = {}", num_plain(c.omega_n)));
            out.report.push(format!("K2 = {}", num_plain(c.k2)));
            out.report.push(format!("two_star = {}", num_plain(c.two_star)));
            out.report.push(format!("sup f = {}", num_plain(f.max())));
            out.report.push(format!("threshold = {}", num_plain(thr)));
            out.csvs.push((
                "constants.csv".into(),
                format!(
                    "n,omega_n,k2,two_star,threshold\n{n},{},{},{},{}\n",
                    num(c.omega_n),
                    num(c.k2),
                    num(c.two_star),
                    num(thr)
                ),
            ));
            out.metrics = vec![num(c.k2), num(thr), num(c.two_star)];
        }
        TaskKind::Solve => {
            let q = f64_param(cfg, "q", m.critical_exponent())?;
            let spec = ProblemSpec::new(h, f, q)?;
            let scfg = solver_config(cfg, &m, seed)?;
            let r = minimize(&spec, &scfg)?;
            out.report.push(format!("q = {}", num_plain(q)));
            out.report.push(format!("lambda = {}", num_plain(r.lambda)));
            out.report.push(format!("residual = {}", num(r.residual)));
            out.report.push(format!("iters = {}", r.iters));
            out.report.push(format!("converged = {}", r.converged));
            out.report.push(format!("sup_u = {}", num_plain(r.sup_u())));
            out.report.push(format!("start = {}", r.start));
            out.csvs.push(("solution.csv".into(), solution_csv(&m, r.u.values())));
            let mut hist = String::from("step,lambda\n");
            for (i, l) in r.history.iter().enumerate() {
                hist.push_str(&format!("{i},{}\n", num(*l)));
            }
            out.csvs.push(("history.csv".into(), hist));
            out.metrics = vec![
                num(r.lambda),
                num(r.residual),
                r.iters.to_string(),
                r.converged.to_string(),
                num(r.sup_u()),
            ];
        }
        TaskKind::Classify => {
            let tol = f64_param(cfg, "tol_class", DEFAULT_TOL_CLASS)?;
            let spec = ProblemSpec::critical(h, f)?;
            let rep = classify(&spec, &solver_config(cfg, &m, seed)?, tol)?;
            out.report.push(format!("lambda = {}", num_plain(rep.lambda)));
            out.report.push(format!("threshold = {}", num_plain(rep.threshold)));
            out.report.push(format!("tol_class = {}", num_plain(rep.tol_class)));
            out.report.push(format!("coercive = {}", rep.coercive));
            out.report.push(format!("converged = {}", rep.converged));
            out.report.push(format!(
                "classification: {}, margin ≈ {}",
                rep.classification,
                num_plain(rep.margin)
            ));
            let mut gaps = String::from("r,gap\n");
            for (p, g) in &rep.max_point_gaps {
                let d = m.geodesic_distance(&m.base_point(), p);
                gaps.push_str(&format!("{},{}\n", num(d), num(*g)));
            }
            let min_gap = rep.min_max_point_gap();
            match min_gap {
                Some(g) => out.report.push(format!("min max-point gap = {}", num_plain(g))),
                None => out.report.push("min max-point gap = n/a".into()),
            }
            out.csvs.push(("max_point_gap.csv".into(), gaps));
            out.metrics = vec![
                num(rep.lambda),
                num(rep.threshold),
                num(rep.margin),
                rep.classification.to_string(),
                min_gap.map(num).unwrap_or_default(),
            ];
        }
        TaskKind::FindCritical => {
            let tol_t = f64_param(cfg, "tol_t", 0.01)?;
            let tol_class = f64_param(cfg, "tol_class", DEFAULT_TOL_CLASS)?;
            let scfg = solver_config(cfg, &m, seed)?;
            let b0_mode = cfg.param("estimate_b0").map(|v| v.as_bool()).transpose()?.unwrap_or(false);
            let (offset, b0) = if b0_mode {
                let b = estimate_b0_sphere(&m, tol_t, tol_class, &scfg)?;
                out.report.push(format!("h_start = {}", num_plain(b.h_start)));
                out.report.push(format!("critical constant = {}", num_plain(b.critical_constant)));
                out.report.push(format!("B0 = {}", num_plain(b.b0)));
                (b.offset, Some(b.b0))
            } else {
                let t_max = match cfg.param("t_max") {
                    Some(v) => v.as_f64()?,
                    None => return Err(missing(cfg, "t_max")),
                };
                let spec = ProblemSpec::critical(h, f)?;
                (find_critical_offset(&spec, t_max, tol_t, tol_class, &scfg)?, None)
            };
            out.report.push(format!("t0 = {}", num_plain(offset.t0)));
            out.report.push(format!("t_threshold = {}", num_plain(offset.t_threshold)));
            if let Some((lo, hi)) = offset.brackets.last() {
                out.report.push(format!("final bracket = [{}, {}]", num_plain(*lo), num_plain(*hi)));
            }
            push_offset_csvs(&mut out, &offset);
            out.metrics = vec![num(offset.t0), num(offset.t_threshold), b0.map(num).unwrap_or_default()];
        }
        TaskKind::Aubin => {
            let k_list: Vec<u32> = match cfg.param("k_list") {
                Some(v) => {
                    let ks = v.as_usize_list()?;
                    if ks.iter().any(|&k| k == 0 || k > u32::MAX as usize) {
                        return Err(v.error("k must lie in 1..=4294967295").into());
                    }
                    ks.into_iter().map(|k| k as u32).collect()
                }
                None => (6..=12).map(|e| 1u32 << e).collect(),
            };
            let delta = f64_param(cfg, "delta", 0.5)?;
            let p = Point::Radius(f64_param(cfg, "point", 0.0)?);
            let a = aubin_slope(&m, &h, &f, &p, &k_list, delta)?;
            out.report.push(format!("delta = {}", num_plain(delta)));
            out.report.push(format!("fitted slope = {}", num_plain(a.fitted_slope)));
            out.report.push(format!("predicted slope = {}", num_plain(a.predicted_slope)));
            out.report.push(format!("fit residual = {}", num(a.fit_residual)));
            let mut csv = String::from("k,j,y\n");
            for i in 0..a.k_list.len() {
                csv.push_str(&format!("{},{},{}\n", a.k_list[i], num(a.j_values[i]), num(a.y_values[i])));
            }
            out.csvs.push(("aubin.csv".into(), csv));
            out.metrics = vec![num(a.fitted_slope), num(a.predicted_slope), num(a.fit_residual)];
        }
        TaskKind::Concentrate => {
            let mode = cfg.param("mode").map(|v| v.text.as_str()).unwrap_or("continuation");
            let window = f64_param(cfg, "R", 5.0)?;
            let nu = f64_param(cfg, "nu", DEFAULT_NU)?;
            let trace = if mode == "synthetic" {
                let mu_list = required_f64_list(cfg, "mu_list")?;
                let offsets = match cfg.param("offsets") {
                    Some(v) => v.as_f64_list()?,
                    None => vec![0.0; mu_list.len()],
                };
                let delta = f64_param(cfg, "delta", 0.5)?;
                let fam = synthetic_family(&m, &mu_list, &offsets)?;
                analyze_synthetic(&fam, delta, window, nu)?
            } else {
                let q_list = required_f64_list(cfg, "q_list")?;
                let delta = f64_param(cfg, "delta", 0.3)?;
                let x0 = Point::Radius(f64_param(cfg, "x0", 0.0)?);
                let spec = ProblemSpec::new(h, f.clone(), q_list[0])?;
                let results = continuation_in_q(
                    &spec,
                    &q_list,
                    &solver_config(cfg, &m, seed)?,
                    &ContinuationConfig::default(),
                )?;
                for r in &results {
                    out.report.push(format!(
                        "q = {}: lambda = {}, residual = {}, converged = {}, N = {}",
                        num_plain(r.q),
                        num_plain(r.lambda),
                        num(r.residual),
                        r.converged,
                        r.u.len()
                    ));
                }
                let params = AnalysisParams { x0, delta, window, nu };
                ConcentrationTrace::from_results(&results, &f, &params)?
            };
            out.report.push(format!("mode = {mode}"));
            out.report.push(format!("samples = {}", trace.samples.len()));
            if let Some(last) = trace.samples.last() {
                out.report.push(format!(
                    "last: param = {}, sup_u = {}, mass_in_ball = {}, bubble_err = {}",
                    num_plain(last.param),
                    num_plain(last.sup_u),
                    num_plain(last.mass_in_ball),
                    num_plain(last.bubble_err)
                ));
                out.metrics = vec![num(last.param), num(last.sup_u), num(last.mass_in_ball), num(last.bubble_err)];
            }
            out.csvs.push(("trace.csv".into(), trace.to_csv()));
        }
        TaskKind::GreenMass | TaskKind::ConformalCheck => unreachable!(),
    }
    Ok(out)
}

fn solution_csv(m: &Arc<DiscreteManifold>, u: &[f64]) -> String {
    let base = m.base_point();
    let mut csv = String::from("node,dist,u\n");
    for (i, v) in u.iter().enumerate() {
        let d = m.geodesic_distance(&base, &m.node_point(i));
        csv.push_str(&format!("{i},{},{}\n", num(d), num(*v)));
    }
    csv
}

fn push_offset_csvs(out: &mut TaskOutput, o: &CriticalOffset) {
    let mut probes = String::from("t,lambda,classification,l2_mass\n");
    for p in &o.probes {
        probes.push_str(&format!(
            "{},{},{},{}\n",
            num(p.t),
            num(p.lambda),
            p.classification,
            num(p.l2_mass)
        ));
    }
    let mut brackets = String::from("step,lo,hi\n");
    for (i, (lo, hi)) in o.brackets.iter().enumerate() {
        brackets.push_str(&format!("{i},{},{}\n", num(*lo), num(*hi)));
    }
    out.csvs.push(("probes.csv".into(), probes));
    out.csvs.push(("brackets.csv".into(), brackets));
}

fn sphere_of_dim(cfg: &ExperimentConfig, dim: Option<usize>) -> Result<(usize, usize, f64), CliError> {
    match cfg.manifold {
        ManifoldConfig::Sphere { n, nodes, clustering } => {
            if let Some(d) = dim {
                if n != d {
                    return Err(critlab::Error::UnsupportedDimension {
                        dim: n,
                        reason: format!("task `{}` runs on S^{d}", cfg.task.name()),
                    }
                    .into());
                }
            }
            Ok((n, nodes, clustering))
        }
        ManifoldConfig::Torus { .. } => Err(critlab::Error::UnsupportedGeometry(format!(
            "task `{}` needs the radial sphere",
            cfg.task.name()
        ))
        .into()),
    }
}

fn green_task(cfg: &ExperimentConfig, mut out: TaskOutput) -> Result<TaskOutput, CliError> {
    let (_, nodes, _) = sphere_of_dim(cfg, Some(3))?;
    let base: Vec<f64> = match &cfg.h {
        ProfileSpec::FromFile(_) => {
            // the file holds h on the Green grid
            let grid = green_grid(nodes)?;
            let m = build_radial_sphere(3, nodes, 1.0)?;
            let field = make_profile(&m, &cfg.h)?;
            debug_assert_eq!(grid.len(), field.len());
            field.into_values()
        }
        spec => {
            let h = radial_closed_form(spec, "h")?;
            green_grid(nodes)?.iter().map(|&r| h(r)).collect()
        }
    };
    let profile = green_from_values(base.clone())?;
    out.report.push(format!("nodes = {nodes}"));
    out.report.push(format!("coercivity = {}", num_plain(profile.coercivity)));
    out.report.push(format!("mass = {}", num_plain(profile.mass)));
    out.csvs.push(("green.csv".into(), profile.to_csv()));
    let mut shift = String::new();
    let find = cfg
        .param("find_critical_shift")
        .map(|v| v.as_bool())
        .transpose()?
        .unwrap_or(false);
    if find {
        let lo = cfg.param("b_lo").ok_or_else(|| missing(cfg, "b_lo"))?.as_f64()?;
        let hi = cfg.param("b_hi").ok_or_else(|| missing(cfg, "b_hi"))?.as_f64()?;
        let tol = f64_param(cfg, "tol", 1e-8)?;
        let grid = green_grid(nodes)?;
        let lookup = move |r: f64| {
            let i = ((r / std::f64::consts::PI) * (grid.len() - 1) as f64).round() as usize;
            base[i.min(base.len() - 1)]
        };
        let z = find_mass_zero_offset(lookup, (lo, hi), tol, nodes)?;
        out.report.push(format!("mass-zero shift B = {}", num_plain(z.b)));
        out.report.push(format!("mass at B = {}", num(z.mass)));
        let mut csv = String::from("b,mass\n");
        for (b, mm) in &z.evaluations {
            csv.push_str(&format!("{},{}\n", num(*b), num(*mm)));
        }
        out.csvs.push(("mass_shift.csv".into(), csv));
        shift = num(z.b);
    }
    out.metrics = vec![num(profile.mass), shift];
    Ok(out)
}

fn conformal_task(cfg: &ExperimentConfig, mut out: TaskOutput) -> Result<TaskOutput, CliError> {
    let (n, _, clustering) = sphere_of_dim(cfg, None)?;
    let profile = |key: &str| -> Result<ProfileSpec, CliError> {
        match cfg.param(key) {
            Some(v) => Ok(v.as_profile(&cfg.base_dir)?),
            None => Err(missing(cfg, key)),
        }
    };
    let u = radial_closed_form(&profile("u")?, "u")?;
    let w = radial_closed_form(&profile("w")?, "w")?;
    let h = radial_closed_form(&cfg.h, "h")?;
    let f = radial_closed_form(&cfg.f, "f")?;
    let ladder = match cfg.param("ladder") {
        Some(v) => v.as_usize_list()?,
        None => vec![512, 1024, 2048, 4096],
    };
    let steps = covariance_refinement(n, clustering, &ladder, h, f, u, w)?;
    let mut csv = String::from("N,residual,ratio\n");
    let mut ratios = Vec::new();
    for (i, s) in steps.iter().enumerate() {
        let mut line = format!("N = {}: residual = {}", s.nodes, num(s.residual));
        let ratio = if i == 0 {
            String::new()
        } else {
            let r = steps[i - 1].residual / s.residual;
            ratios.push(r);
            line.push_str(&format!(", ratio = {}", num_plain(r)));
            num(r)
        };
        out.report.push(line);
        csv.push_str(&format!("{},{},{}\n", s.nodes, num(s.residual), ratio));
    }
    out.csvs.push(("refinement.csv".into(), csv));
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    out.metrics = vec![
        steps.last().map(|s| num(s.residual)).unwrap_or_default(),
        if ratios.is_empty() { String::new() } else { num(lo) },
        if ratios.is_empty() { String::new() } else { num(hi) },
    ];
    Ok(out)
}
