//! Profile descriptors used to build `h` and `f` fields from text.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! const(c)
//! cos_poly(c0, c1, ..., ck)     Σ c_j cos^j r
//! bump(t)                       (1 − r²/t²)³ for r < t, else 0
//! file(path)                    one value per line, node order
//! ```
//!
//! `r` is the geodesic distance to the pole of the sphere (or the origin of
//! the torus). Sphere nodes are ordered by increasing radius, torus nodes
//! row-major with the first axis varying slowest.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use super::{DiscreteManifold, ScalarField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Const(f64),
    CosPoly(Vec<f64>),
    Bump(f64),
    FromFile(PathBuf),
}

impl ProfileSpec {
    /// Value at geodesic distance `r` from the base point, when the profile is
    /// given in closed form.
    pub fn eval_radial(&self, r: f64) -> Option<f64> {
        match self {
            ProfileSpec::Const(c) => Some(*c),
            ProfileSpec::CosPoly(c) => {
                let x = r.cos();
                Some(c.iter().rev().fold(0.0, |acc, cj| acc * x + cj))
            }
            ProfileSpec::Bump(t) => {
                let s = r / t;
                Some(if s < 1.0 { (1.0 - s * s).powi(3) } else { 0.0 })
            }
            ProfileSpec::FromFile(_) => None,
        }
    }
}

impl fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileSpec::Const(c) => write!(f, "const({c})"),
            ProfileSpec::CosPoly(c) => {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "cos_poly({})", parts.join(", "))
            }
            ProfileSpec::Bump(t) => write!(f, "bump({t})"),
            ProfileSpec::FromFile(p) => write!(f, "file({})", p.display()),
        }
    }
}

impl FromStr for ProfileSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let unknown = || Error::UnknownDescriptor(s.to_string());
        let open = s.find('(').ok_or_else(unknown)?;
        if !s.ends_with(')') {
            return Err(unknown());
        }
        let name = s[..open].trim();
        let inner = s[open + 1..s.len() - 1].trim();
        let numbers = || -> Result<Vec<f64>> {
            inner
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| unknown()))
                .collect()
        };
        let single = || -> Result<f64> {
            match numbers()?.as_slice() {
                [v] => Ok(*v),
                _ => Err(unknown()),
            }
        };
        match name {
            "const" => Ok(ProfileSpec::Const(single()?)),
            "cos_poly" => Ok(ProfileSpec::CosPoly(numbers()?)),
            "bump" => {
                let t = single()?;
                if !(t > 0.0) {
                    return Err(Error::InvalidInput(format!("bump radius must be positive, got {t}")));
                }
                Ok(ProfileSpec::Bump(t))
            }
            "file" | "from_file" if !inner.is_empty() => Ok(ProfileSpec::FromFile(PathBuf::from(inner))),
            _ => Err(unknown()),
        }
    }
}

/// Samples a profile at the nodes of `manifold`.
pub fn make_profile(manifold: &Arc<DiscreteManifold>, spec: &ProfileSpec) -> Result<ScalarField> {
    match spec {
        ProfileSpec::FromFile(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            let values = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .enumerate()
                .map(|(i, l)| {
                    l.parse::<f64>().map_err(|_| {
                        Error::InvalidInput(format!("{}: line {}: not a number", path.display(), i + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if values.len() != manifold.len() {
                return Err(Error::InvalidInput(format!(
                    "{}: {} values for {} nodes",
                    path.display(),
                    values.len(),
                    manifold.len()
                )));
            }
            ScalarField::new(manifold.clone(), values)
        }
        other => ScalarField::from_radial_fn(manifold, |r| {
            other.eval_radial(r).expect("closed-form profile")
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::build_radial_sphere;
    use std::io::Write;

    #[test]
    fn parse_and_display() {
        for s in ["const(1)", "cos_poly(0.5, 0.5)", "bump(0.25)", "file(/tmp/x.txt)"] {
            let p: ProfileSpec = s.parse().unwrap();
            assert_eq!(p.to_string().parse::<ProfileSpec>().unwrap(), p);
        }
        assert!(matches!("gauss(1)".parse::<ProfileSpec>(), Err(Error::UnknownDescriptor(_))));
        assert!(matches!("const(1".parse::<ProfileSpec>(), Err(Error::UnknownDescriptor(_))));
    }

    #[test]
    fn sampled_profiles() {
        let m = build_radial_sphere(3, 256, 1.0).unwrap();
        let one = make_profile(&m, &ProfileSpec::Const(1.0)).unwrap();
        assert!(one.values().iter().all(|v| *v == 1.0));

        let f = make_profile(&m, &ProfileSpec::CosPoly(vec![0.5, 0.5])).unwrap();
        assert_eq!(f.argmax(), 0);
        assert!((f.max() - 1.0).abs() < 1e-4);

        let t = 0.4;
        let b = make_profile(&m, &ProfileSpec::Bump(t)).unwrap();
        let r = m.radii().unwrap();
        for (v, r) in b.values().iter().zip(r) {
            if *r >= t {
                assert_eq!(*v, 0.0);
            }
        }
        assert!((ProfileSpec::Bump(t).eval_radial(0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bump_is_c2_at_support_boundary() {
        let t = 0.3;
        let p = ProfileSpec::Bump(t);
        let e = 1e-6;
        let g = |r: f64| p.eval_radial(r).unwrap();
        let second = (g(t + e) - 2.0 * g(t) + g(t - e)) / (e * e);
        let first = (g(t + e) - g(t - e)) / (2.0 * e);
        assert!(first.abs() < 1e-6 && second.abs() < 1e-3);
    }

    #[test]
    fn file_profiles() {
        let m = build_radial_sphere(3, 16, 1.0).unwrap();
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        for i in 0..16 {
            writeln!(tmp, "{}", i as f64 * 0.5).unwrap();
        }
        let spec = ProfileSpec::FromFile(tmp.path().to_path_buf());
        let f = make_profile(&m, &spec).unwrap();
        assert_eq!(f.values()[3], 1.5);

        let short = build_radial_sphere(3, 17, 1.0).unwrap();
        assert!(matches!(make_profile(&short, &spec), Err(Error::InvalidInput(_))));
    }
}
