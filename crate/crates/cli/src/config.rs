//! Experiment configuration: a flat, sectioned `key = value` text format.
//!
//! ```text
//! file     := line*
//! line     := blank | comment | header | entry
//! comment  := '#' any*
//! header   := '[' name ']'                        name ∈ manifold fields task output sweep
//! entry    := key '=' value [comment]
//! key      := [A-Za-z_][A-Za-z0-9_]*
//! value    := any text up to '#' or end of line, trimmed, non-empty
//! list     := item (',' item)*                    commas inside parentheses do not split
//! ```
//!
//! Keys are case-sensitive and may appear at most once per section. Every
//! entry must follow a section header.
//!
//! | section    | key          | type / default                                       |
//! |------------|--------------|------------------------------------------------------|
//! | manifold   | kind         | `sphere` or `torus`                                  |
//! |            | n            | dimension, 3..=10                                    |
//! |            | N            | sphere nodes (default 4096)                          |
//! |            | clustering   | sphere grading, ≥ 1 (default 2)                      |
//! |            | m            | torus nodes per axis (default 16)                    |
//! |            | L            | torus side length (default 2π)                       |
//! | fields     | h            | profile descriptor (default `const(n(n−2)/4)`)       |
//! |            | f            | profile descriptor (default `const(1)`)              |
//! | task       | kind         | constants, solve, classify, find-critical, aubin,    |
//! |            |              | concentrate, green-mass, conformal-check             |
//! |            | *            | task parameters, see [`TaskKind::allowed_keys`]      |
//! | output     | directory    | path (default `out`)                                 |
//! |            | csv          | `on` / `off` (default `on`)                          |
//! | sweep      | key          | `task.<param>` or `fields.<h|f>`                     |
//! |            | values       | list; one run per item                               |
//!
//! Profile descriptors: `const(c)`, `cos_poly(c0, …, ck)`, `bump(t)`,
//! `file(path)` with `path` relative to the config file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use critlab::manifold::ProfileSpec;

/// A located parse or validation error.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        column,
        message: message.into(),
    })
}

/// A value with the position of its first character.
#[derive(Debug, Clone, PartialEq)]
pub struct Located {
    pub text: String,
    pub line: usize,
    pub column: usize,
}

impl Located {
    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    pub fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(self.error(message))
    }

    pub fn as_f64(&self) -> Result<f64, ParseError> {
        match self.text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => self.fail(format!("expected a number, found `{}`", self.text)),
        }
    }

    pub fn as_usize(&self) -> Result<usize, ParseError> {
        self.text
            .parse::<usize>()
            .or_else(|_| self.fail(format!("expected a nonnegative integer, found `{}`", self.text)))
    }

    pub fn as_u64(&self) -> Result<u64, ParseError> {
        self.text
            .parse::<u64>()
            .or_else(|_| self.fail(format!("expected a nonnegative integer, found `{}`", self.text)))
    }

    pub fn as_bool(&self) -> Result<bool, ParseError> {
        match self.text.as_str() {
            "on" | "true" | "yes" => Ok(true),
            "off" | "false" | "no" => Ok(false),
            _ => self.fail(format!("expected on/off, found `{}`", self.text)),
        }
    }

    /// Splits a list at top-level commas.
    pub fn items(&self) -> Vec<Located> {
        let mut out = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        let chars: Vec<(usize, char)> = self.text.char_indices().collect();
        let mut push = |from: usize, to: usize| {
            let raw = &self.text[from..to];
            let lead = raw.len() - raw.trim_start().len();
            out.push(Located {
                text: raw.trim().to_string(),
                line: self.line,
                column: self.column + self.text[..from + lead].chars().count(),
            });
        };
        for &(i, c) in &chars {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    push(start, i);
                    start = i + 1;
                }
                _ => {}
            }
        }
        push(start, self.text.len());
        out
    }

    pub fn as_f64_list(&self) -> Result<Vec<f64>, ParseError> {
        self.items().iter().map(Located::as_f64).collect()
    }

    pub fn as_usize_list(&self) -> Result<Vec<usize>, ParseError> {
        self.items().iter().map(Located::as_usize).collect()
    }

    pub fn as_profile(&self, base: &Path) -> Result<ProfileSpec, ParseError> {
        match self.text.parse::<ProfileSpec>() {
            Ok(ProfileSpec::FromFile(p)) => {
                let path = if p.is_absolute() { p } else { base.join(p) };
                if !path.is_file() {
                    return self.fail(format!("file `{}` does not exist", path.display()));
                }
                Ok(ProfileSpec::FromFile(path))
            }
            Ok(spec) => Ok(spec),
            Err(e) => self.fail(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: BTreeMap<String, (Located, usize)>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Located> {
        self.entries.get(key).map(|(v, _)| v)
    }

    /// Rejects keys outside `allowed`.
    fn only(&self, allowed: &[&str]) -> Result<(), ParseError> {
        for (key, (_, key_col)) in &self.entries {
            if !allowed.contains(&key.as_str()) {
                let line = self.entries[key].0.line;
                return err(
                    line,
                    *key_col,
                    format!("unknown key `{key}` in [{}]; expected one of {}", self.name, allowed.join(", ")),
                );
            }
        }
        Ok(())
    }
}

const SECTIONS: [&str; 5] = ["manifold", "fields", "task", "output", "sweep"];

/// Parses the raw sectioned text.
pub fn parse_sections(text: &str) -> Result<BTreeMap<String, Section>, ParseError> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        };
        let indent = content.len() - content.trim_start().len();
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = |byte: usize| raw_line[..byte].chars().count() + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return err(line, col(indent + trimmed.len()), "expected `]` to close the section header");
            };
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return err(
                    line,
                    col(indent + 1),
                    format!("unknown section `{name}`; expected one of {}", SECTIONS.join(", ")),
                );
            }
            if sections.contains_key(name) {
                return err(line, col(indent + 1), format!("section [{name}] appears twice"));
            }
            sections.insert(
                name.to_string(),
                Section {
                    name: name.to_string(),
                    line,
                    entries: BTreeMap::new(),
                },
            );
            current = Some(name.to_string());
            continue;
        }
        let Some(eq) = trimmed.find('=') else {
            return err(line, col(indent), "expected `key = value` or a `[section]` header");
        };
        let key = trimmed[..eq].trim();
        let valid_key = key
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid_key {
            return err(line, col(indent), format!("invalid key `{key}`"));
        }
        let after = &trimmed[eq + 1..];
        let value = after.trim();
        let value_byte = indent + eq + 1 + (after.len() - after.trim_start().len());
        if value.is_empty() {
            return err(line, col(indent + eq + 1), format!("missing value for `{key}`"));
        }
        let Some(section) = current.as_ref().and_then(|s| sections.get_mut(s)) else {
            return err(line, col(indent), format!("`{key}` appears before any section header"));
        };
        if section.entries.contains_key(key) {
            return err(line, col(indent), format!("duplicate key `{key}` in [{}]", section.name));
        }
        section.entries.insert(
            key.to_string(),
            (
                Located {
                    text: value.to_string(),
                    line,
                    column: col(value_byte),
                },
                col(indent),
            ),
        );
    }
    Ok(sections)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Constants,
    Solve,
    Classify,
    FindCritical,
    Aubin,
    Concentrate,
    GreenMass,
    ConformalCheck,
}

const SOLVER_KEYS: [&str; 5] = ["tau", "max_iter", "tol_residual", "init", "seed"];

impl TaskKind {
    pub const ALL: [TaskKind; 8] = [
        TaskKind::Constants,
        TaskKind::Solve,
        TaskKind::Classify,
        TaskKind::FindCritical,
        TaskKind::Aubin,
        TaskKind::Concentrate,
        TaskKind::GreenMass,
        TaskKind::ConformalCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Constants => "constants",
            TaskKind::Solve => "solve",
            TaskKind::Classify => "classify",
            TaskKind::FindCritical => "find-critical",
            TaskKind::Aubin => "aubin",
            TaskKind::Concentrate => "concentrate",
            TaskKind::GreenMass => "green-mass",
            TaskKind::ConformalCheck => "conformal-check",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Task parameters accepted in `[task]` besides `kind`.
    pub fn allowed_keys(self) -> Vec<&'static str> {
        let own: &[&str] = match self {
            TaskKind::Constants => &[],
            TaskKind::Solve => &["q"],
            TaskKind::Classify => &["tol_class"],
            TaskKind::FindCritical => &["t_max", "tol_t", "tol_class", "estimate_b0"],
            TaskKind::Aubin => &["k_list", "delta", "point"],
            TaskKind::Concentrate => &["mode", "q_list", "mu_list", "offsets", "delta", "R", "nu", "x0"],
            TaskKind::GreenMass => &["find_critical_shift", "b_lo", "b_hi", "tol"],
            TaskKind::ConformalCheck => &["u", "w", "ladder"],
        };
        let mut keys = vec!["kind"];
        keys.extend_from_slice(own);
        if matches!(
            self,
            TaskKind::Solve | TaskKind::Classify | TaskKind::FindCritical | TaskKind::Concentrate
        ) {
            keys.extend_from_slice(&SOLVER_KEYS);
        } else {
            keys.push("seed");
        }
        keys
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldConfig {
    Sphere { n: usize, nodes: usize, clustering: f64 },
    Torus { n: usize, per_axis: usize, side: f64 },
}

impl ManifoldConfig {
    pub fn dim(&self) -> usize {
        match self {
            ManifoldConfig::Sphere { n, .. } | ManifoldConfig::Torus { n, .. } => *n,
        }
    }
}

/// A list-valued override producing one run per item.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub section: String,
    pub key: String,
    pub values: Vec<Located>,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub manifold: ManifoldConfig,
    pub h: ProfileSpec,
    pub f: ProfileSpec,
    pub task: TaskKind,
    /// Line of the `[task]` header, for errors about missing parameters.
    pub task_line: usize,
    /// Raw task parameters, validated against [`TaskKind::allowed_keys`].
    pub params: BTreeMap<String, Located>,
    pub output_dir: PathBuf,
    pub csv: bool,
    pub sweep: Option<SweepConfig>,
    /// Directory used to resolve relative paths.
    pub base_dir: PathBuf,
    /// The config text as read.
    pub source: String,
}

impl ExperimentConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ParseError> {
        let sections = parse_sections(text)?;
        let end = text.lines().count().max(1);
        let empty = Section::default();

        let Some(manifold) = sections.get("manifold") else {
            return err(end, 1, "missing [manifold] section");
        };
        manifold.only(&["kind", "n", "N", "clustering", "m", "L"])?;
        let kind = manifold
            .get("kind")
            .map(|v| v.text.as_str())
            .unwrap_or("sphere");
        let n_val = match manifold.get("n") {
            Some(v) => v,
            None => return err(manifold.line, 1, "[manifold] needs the dimension `n`"),
        };
        let n = n_val.as_usize()?;
        if !(3..=10).contains(&n) {
            return n_val.fail(format!("dimension must lie in 3..=10, got {n}"));
        }
        let manifold_cfg = match kind {
            "sphere" => {
                for k in ["m", "L"] {
                    if let Some(v) = manifold.get(k) {
                        return v.fail(format!("`{k}` applies to the torus only"));
                    }
                }
                let nodes = manifold.get("N").map(Located::as_usize).transpose()?.unwrap_or(4096);
                if nodes < 16 {
                    return manifold.get("N").unwrap().fail("need at least 16 nodes");
                }
                let clustering = manifold.get("clustering").map(Located::as_f64).transpose()?.unwrap_or(2.0);
                if clustering < 1.0 {
                    return manifold.get("clustering").unwrap().fail("clustering must be ≥ 1");
                }
                ManifoldConfig::Sphere { n, nodes, clustering }
            }
            "torus" => {
                for k in ["N", "clustering"] {
                    if let Some(v) = manifold.get(k) {
                        return v.fail(format!("`{k}` applies to the sphere only"));
                    }
                }
                let per_axis = manifold.get("m").map(Located::as_usize).transpose()?.unwrap_or(16);
                if per_axis < 3 {
                    return manifold.get("m").unwrap().fail("need at least 3 nodes per axis");
                }
                let side = manifold
                    .get("L")
                    .map(Located::as_f64)
                    .transpose()?
                    .unwrap_or(2.0 * std::f64::consts::PI);
                if !(side > 0.0) {
                    return manifold.get("L").unwrap().fail("side length must be positive");
                }
                ManifoldConfig::Torus { n, per_axis, side }
            }
            other => {
                return manifold
                    .get("kind")
                    .unwrap()
                    .fail(format!("unknown manifold kind `{other}`; expected sphere or torus"))
            }
        };

        let fields = sections.get("fields").unwrap_or(&empty);
        fields.only(&["h", "f"])?;
        let h = match fields.get("h") {
            Some(v) => v.as_profile(base_dir)?,
            None => ProfileSpec::Const((n * (n - 2)) as f64 / 4.0),
        };
        let f = match fields.get("f") {
            Some(v) => v.as_profile(base_dir)?,
            None => ProfileSpec::Const(1.0),
        };

        let Some(task) = sections.get("task") else {
            return err(end, 1, "missing [task] section");
        };
        let Some(kind_val) = task.get("kind") else {
            return err(task.line, 1, "[task] needs `kind`");
        };
        let Some(kind) = TaskKind::from_name(&kind_val.text) else {
            let names: Vec<&str> = TaskKind::ALL.iter().map(|k| k.name()).collect();
            return kind_val.fail(format!("unknown task `{}`; expected one of {}", kind_val.text, names.join(", ")));
        };
        task.only(&kind.allowed_keys())?;
        let params: BTreeMap<String, Located> = task
            .entries
            .iter()
            .filter(|(k, _)| k.as_str() != "kind")
            .map(|(k, (v, _))| (k.clone(), v.clone()))
            .collect();

        let output = sections.get("output").unwrap_or(&empty);
        output.only(&["directory", "csv"])?;
        let output_dir = output
            .get("directory")
            .map(|v| {
                let p = PathBuf::from(&v.text);
                if p.is_absolute() {
                    p
                } else {
                    base_dir.join(p)
                }
            })
            .unwrap_or_else(|| base_dir.join("out"));
        let csv = output.get("csv").map(Located::as_bool).transpose()?.unwrap_or(true);

        let sweep = match sections.get("sweep") {
            None => None,
            Some(s) => {
                s.only(&["key", "values"])?;
                let Some(key) = s.get("key") else {
                    return err(s.line, 1, "[sweep] needs `key`");
                };
                let Some(values) = s.get("values") else {
                    return err(s.line, 1, "[sweep] needs `values`");
                };
                let (section, name) = match key.text.split_once('.') {
                    Some(("task", p)) if p != "kind" && kind.allowed_keys().contains(&p) => ("task", p),
                    Some(("fields", p @ ("h" | "f"))) => ("fields", p),
                    _ => {
                        return key.fail(format!(
                            "cannot sweep `{}`; use task.<parameter> or fields.<h|f>",
                            key.text
                        ))
                    }
                };
                let items: Vec<Located> = values.items();
                if items.iter().any(|v| v.text.is_empty()) {
                    return values.fail("empty item in the sweep list");
                }
                Some(SweepConfig {
                    section: section.to_string(),
                    key: name.to_string(),
                    values: items,
                })
            }
        };

        let cfg = Self {
            manifold: manifold_cfg,
            h,
            f,
            task: kind,
            task_line: task.line,
            params,
            output_dir,
            csv,
            sweep,
            base_dir: base_dir.to_path_buf(),
            source: text.to_string(),
        };
        cfg.validate_params()?;
        Ok(cfg)
    }

    pub fn param(&self, key: &str) -> Option<&Located> {
        self.params.get(key)
    }

    /// Type-checks every task parameter once, so errors surface before any
    /// work starts.
    pub fn validate_params(&self) -> Result<(), ParseError> {
        for (key, v) in &self.params {
            match key.as_str() {
                "tau" | "tol_residual" | "tol_class" | "t_max" | "tol_t" | "delta" | "R" | "nu" | "tol" => {
                    let x = v.as_f64()?;
                    if !(x > 0.0) {
                        return v.fail(format!("`{key}` must be positive"));
                    }
                }
                "q" | "point" | "x0" | "b_lo" | "b_hi" => {
                    v.as_f64()?;
                }
                "max_iter" => {
                    v.as_usize()?;
                }
                "seed" => {
                    v.as_u64()?;
                }
                "estimate_b0" | "find_critical_shift" => {
                    v.as_bool()?;
                }
                "q_list" | "mu_list" | "offsets" => {
                    v.as_f64_list()?;
                }
                "k_list" | "ladder" => {
                    v.as_usize_list()?;
                }
                "u" | "w" => {
                    v.as_profile(&self.base_dir)?;
                }
                "init" => {
                    parse_init(v)?;
                }
                "mode" => {
                    if !matches!(v.text.as_str(), "continuation" | "synthetic") {
                        return v.fail("mode must be `continuation` or `synthetic`");
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// The configuration with one sweep item substituted.
    pub fn with_override(&self, section: &str, key: &str, value: &Located) -> Result<Self, ParseError> {
        let mut cfg = self.clone();
        cfg.sweep = None;
        match section {
            "fields" => {
                let spec = value.as_profile(&self.base_dir)?;
                if key == "h" {
                    cfg.h = spec;
                } else {
                    cfg.f = spec;
                }
            }
            _ => {
                cfg.params.insert(key.to_string(), value.clone());
            }
        }
        cfg.validate_params()?;
        Ok(cfg)
    }
}

/// Solver start from a config value: `constant`, `multistart(k)` or
/// `bubble(r, mu)`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitChoice {
    Constant,
    Multistart(usize),
    Bubble { r: f64, mu: f64 },
}

pub fn parse_init(v: &Located) -> Result<InitChoice, ParseError> {
    let t = v.text.replace(' ', "");
    if t == "constant" {
        return Ok(InitChoice::Constant);
    }
    let inner = |name: &str| -> Option<&str> { t.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')') };
    if let Some(k) = inner("multistart") {
        if let Ok(k) = k.parse::<usize>() {
            return Ok(InitChoice::Multistart(k));
        }
    }
    if let Some(args) = inner("bubble") {
        let parts: Vec<&str> = args.split(',').collect();
        if let [r, mu] = parts.as_slice() {
            if let (Ok(r), Ok(mu)) = (r.parse::<f64>(), mu.parse::<f64>()) {
                if mu > 0.0 && r >= 0.0 {
                    return Ok(InitChoice::Bubble { r, mu });
                }
            }
        }
    }
    v.fail(format!(
        "unknown init `{}`; expected constant, multistart(k) or bubble(r, mu)",
        v.text
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CLASSIFY: &str = "\
# S⁶ with a subcritical constant
[manifold]
kind = sphere
n = 6
N = 1024

[fields]
h = const(4)   # below the conformal constant
f = const(1)

[task]
kind = classify
tol_class = 0.05
";

    #[test]
    fn parses_a_complete_config() {
        let c = ExperimentConfig::parse(CLASSIFY, Path::new(".")).unwrap();
        assert_eq!(c.task, TaskKind::Classify);
        assert_eq!(c.h, ProfileSpec::Const(4.0));
        assert_eq!(
            c.manifold,
            ManifoldConfig::Sphere {
                n: 6,
                nodes: 1024,
                clustering: 2.0
            }
        );
        assert_eq!(c.param("tol_class").unwrap().as_f64().unwrap(), 0.05);
        assert!(c.csv);
    }

    #[test]
    fn missing_task_is_located() {
        let text = "[manifold]\nn = 6\n";
        let e = ExperimentConfig::parse(text, Path::new(".")).unwrap_err();
        assert!(e.message.contains("[task]"));
        assert_eq!(e.line, 2);
    }

    #[test]
    fn bad_number_reports_value_column() {
        let text = "[manifold]\nn = 6\n[task]\nkind = solve\nq =  2.x\n";
        let e = ExperimentConfig::parse(text, Path::new(".")).unwrap_err();
        assert_eq!((e.line, e.column), (5, 6));
    }

    #[test]
    fn unknown_key_and_section() {
        let e = ExperimentConfig::parse("[manifold]\nn = 6\nfoo = 1\n[task]\nkind = constants\n", Path::new("."))
            .unwrap_err();
        assert_eq!((e.line, e.column), (3, 1));
        let e = parse_sections("[nope]\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 2));
        let e = parse_sections("x = 1\n").unwrap_err();
        assert!(e.message.contains("before any section"));
        let e = parse_sections("[task]\nkind = a\n  kind = b\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 3));
    }

    #[test]
    fn lists_split_at_top_level_only() {
        let v = Located {
            text: "cos_poly(1, 2), const(3)".into(),
            line: 1,
            column: 10,
        };
        let items = v.items();
        assert_eq!(items.len(), 2);
        assert_eq!(items[0].text, "cos_poly(1, 2)");
        assert_eq!(items[1].text, "const(3)");
        assert_eq!(items[1].column, 26);
    }

    #[test]
    fn init_choices() {
        let loc = |t: &str| Located {
            text: t.into(),
            line: 1,
            column: 1,
        };
        assert_eq!(parse_init(&loc("multistart(3)")).unwrap(), InitChoice::Multistart(3));
        assert_eq!(
            parse_init(&loc("bubble(0, 0.1)")).unwrap(),
            InitChoice::Bubble { r: 0.0, mu: 0.1 }
        );
        assert!(parse_init(&loc("bubble(0)")).is_err());
    }

    #[test]
    fn sweep_key_must_name_a_parameter() {
        let text = "[manifold]\nn = 6\n[task]\nkind = solve\n[sweep]\nkey = task.foo\nvalues = 1, 2\n";
        let e = ExperimentConfig::parse(text, Path::new(".")).unwrap_err();
        assert_eq!(e.line, 6);
        let text = "[manifold]\nn = 6\n[task]\nkind = solve\n[sweep]\nkey = task.q\nvalues = 2.8, 2.9\n";
        let c = ExperimentConfig::parse(text, Path::new(".")).unwrap();
        assert_eq!(c.sweep.unwrap().values.len(), 2);
    }
}
