//! Discrete model manifolds: the radially symmetric round sphere Sⁿ and the
//! flat periodic torus Tⁿ.
//!
//! Both carry a quadrature (positive node weights), a Laplacian
//! `Δ = −∇ⁱ∇ᵢ` that is self-adjoint and positive semidefinite with respect to
//! the quadrature inner product, a geodesic distance and the scalar
//! curvature of the underlying metric.
//!
//! The Laplacian is stored as a stiffness form `K` with `Δ = W⁻¹K`, where
//! `W` is the diagonal weight matrix. The Dirichlet energy of a field is
//! `⟨Δu, u⟩ = uᵀKu`.

mod field;
mod interp;
mod profile;

pub use field::ScalarField;
pub use profile::{make_profile, ProfileSpec};

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg;
use crate::sobolev::sphere_volume;

/// Largest node count a torus may allocate unless the caller raises the cap.
pub const DEFAULT_MAX_TORUS_NODES: usize = 4_000_000;

/// Parameters a manifold was built from.
#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldKind {
    /// Radial functions on the unit round sphere, parametrized by the
    /// geodesic distance from a distinguished pole.
    RadialSphere {
        dim: usize,
        nodes: usize,
        clustering: f64,
    },
    /// Flat torus `[0, L)ⁿ` with `mⁿ` nodes.
    PeriodicTorus {
        dim: usize,
        side: f64,
        per_axis: usize,
    },
}

/// A point of the model manifold.
///
/// On the radial sphere only points of one meridian are representable; they
/// are identified by their geodesic distance to the pole.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Radius(f64),
    Coords(Vec<f64>),
}

#[derive(Debug)]
enum Geometry {
    Radial {
        radii: Vec<f64>,
        faces: Vec<f64>,
        /// `ω_{n−1} sin^{n−1}(face) / (r_{i+1} − r_i)` for each interior face.
        conductance: Vec<f64>,
    },
    Torus {
        spacing: f64,
        per_axis: usize,
        /// Row-major strides, first axis slowest.
        strides: Vec<usize>,
    },
}

#[derive(Debug)]
pub struct DiscreteManifold {
    kind: ManifoldKind,
    dim: usize,
    weights: Vec<f64>,
    volume: f64,
    geometry: Geometry,
}

/// Maps the unit interval onto `[0, π]`, clustering nodes near the pole.
///
/// The map is `r(s) = π (e^{βs} − 1)/(e^β − 1)` with `β = 10 (c − 1)`, so the
/// local spacing is proportional to `r + π/(e^β − 1)`: uniform for `c = 1`,
/// geometric near the pole for `c > 1`.
fn radial_map(s: f64, clustering: f64) -> f64 {
    let beta = 10.0 * (clustering - 1.0);
    if beta < 1e-12 {
        PI * s
    } else {
        PI * (beta * s).exp_m1() / beta.exp_m1()
    }
}

// 6-point Gauss–Legendre nodes and weights on [-1, 1].
const GL6: [(f64, f64); 6] = [
    (-0.932_469_514_203_152, 0.171_324_492_379_170),
    (-0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (-0.238_619_186_083_196_9, 0.467_913_934_572_691),
    (0.238_619_186_083_196_9, 0.467_913_934_572_691),
    (0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (0.932_469_514_203_152, 0.171_324_492_379_170),
];

/// Builds the radial model of the unit sphere `Sⁿ`.
///
/// Nodes are cell centres of `nodes` cells covering `[0, π]`; weights are the
/// exact volumes of the spherical shells bounded by the cell faces. The
/// Laplacian is the finite-volume form of `−u'' − (n−1) cot(r) u'` with zero
/// flux through the pole and the antipode.
pub fn build_radial_sphere(dim: usize, nodes: usize, clustering: f64) -> Result<Arc<DiscreteManifold>> {
    if dim < 3 {
        return Err(Error::InvalidConfiguration(format!(
            "sphere dimension must be at least 3, got {dim}"
        )));
    }
    if nodes < 16 {
        return Err(Error::InvalidConfiguration(format!(
            "radial sphere needs at least 16 nodes, got {nodes}"
        )));
    }
    if !(clustering >= 1.0) || !clustering.is_finite() || clustering > 4.0 {
        return Err(Error::InvalidConfiguration(format!(
            "clustering exponent must lie in [1, 4], got {clustering}"
        )));
    }
    let n_f = nodes as f64;
    let faces: Vec<f64> = (0..=nodes)
        .map(|j| radial_map(j as f64 / n_f, clustering))
        .collect();
    let radii: Vec<f64> = (0..nodes)
        .map(|j| radial_map((j as f64 + 0.5) / n_f, clustering))
        .collect();
    let shell_area = sphere_volume(dim - 1);
    let power = (dim - 1) as i32;
    let weights: Vec<f64> = faces
        .windows(2)
        .map(|f| {
            let mid = 0.5 * (f[0] + f[1]);
            let half = 0.5 * (f[1] - f[0]);
            let s: f64 = GL6
                .iter()
                .map(|(x, w)| w * (mid + half * x).sin().powi(power))
                .sum();
            shell_area * s * half
        })
        .collect();
    let conductance: Vec<f64> = (1..nodes)
        .map(|j| shell_area * faces[j].sin().powi(power) / (radii[j] - radii[j - 1]))
        .collect();
    if weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidConfiguration(
            "radial grid too fine for double precision near the pole".into(),
        ));
    }
    Ok(Arc::new(DiscreteManifold {
        kind: ManifoldKind::RadialSphere {
            dim,
            nodes,
            clustering,
        },
        dim,
        weights,
        volume: sphere_volume(dim),
        geometry: Geometry::Radial {
            radii,
            faces,
            conductance,
        },
    }))
}

/// Builds the flat torus `[0, L)ⁿ` with `m` nodes per axis and the
/// `2n+1`-point Laplacian.
pub fn build_periodic_torus(dim: usize, side: f64, per_axis: usize) -> Result<Arc<DiscreteManifold>> {
    build_periodic_torus_with_cap(dim, side, per_axis, DEFAULT_MAX_TORUS_NODES)
}

pub fn build_periodic_torus_with_cap(
    dim: usize,
    side: f64,
    per_axis: usize,
    max_nodes: usize,
) -> Result<Arc<DiscreteManifold>> {
    if dim < 3 {
        return Err(Error::InvalidConfiguration(format!(
            "torus dimension must be at least 3, got {dim}"
        )));
    }
    if !(side > 0.0) || !side.is_finite() {
        return Err(Error::InvalidConfiguration(format!(
            "torus side length must be positive, got {side}"
        )));
    }
    if per_axis < 8 {
        return Err(Error::InvalidConfiguration(format!(
            "torus needs at least 8 nodes per axis, got {per_axis}"
        )));
    }
    let total = (0..dim).try_fold(1usize, |acc, _| acc.checked_mul(per_axis));
    let total = match total {
        Some(t) if t <= max_nodes => t,
        _ => {
            return Err(Error::ResourceLimit(format!(
                "{per_axis}^{dim} nodes exceeds the cap of {max_nodes}"
            )))
        }
    };
    let spacing = side / per_axis as f64;
    let mut strides = vec![1usize; dim];
    for k in (0..dim - 1).rev() {
        strides[k] = strides[k + 1] * per_axis;
    }
    Ok(Arc::new(DiscreteManifold {
        kind: ManifoldKind::PeriodicTorus {
            dim,
            side,
            per_axis,
        },
        dim,
        weights: vec![spacing.powi(dim as i32); total],
        volume: side.powi(dim as i32),
        geometry: Geometry::Torus {
            spacing,
            per_axis,
            strides,
        },
    }))
}

impl DiscreteManifold {
    pub fn kind(&self) -> &ManifoldKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Volume of the continuous manifold.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self.geometry, Geometry::Radial { .. })
    }

    /// Critical Sobolev exponent `2n/(n−2)`.
    pub fn critical_exponent(&self) -> f64 {
        let n = self.dim as f64;
        2.0 * n / (n - 2.0)
    }

    /// Geodesic radii of the nodes (sphere only).
    pub fn radii(&self) -> Option<&[f64]> {
        match &self.geometry {
            Geometry::Radial { radii, .. } => Some(radii),
            Geometry::Torus { .. } => None,
        }
    }

    /// The distinguished point: the pole of the sphere, the origin of the torus.
    pub fn base_point(&self) -> Point {
        match &self.geometry {
            Geometry::Radial { .. } => Point::Radius(0.0),
            Geometry::Torus { .. } => Point::Coords(vec![0.0; self.dim]),
        }
    }

    pub fn node_point(&self, i: usize) -> Point {
        match &self.geometry {
            Geometry::Radial { radii, .. } => Point::Radius(radii[i]),
            Geometry::Torus {
                spacing,
                per_axis,
                strides,
            } => Point::Coords(
                strides
                    .iter()
                    .map(|s| ((i / s) % per_axis) as f64 * spacing)
                    .collect(),
            ),
        }
    }

    /// Width of the cell owning node `i`.
    pub fn cell_width(&self, i: usize) -> f64 {
        match &self.geometry {
            Geometry::Radial { faces, .. } => faces[i + 1] - faces[i],
            Geometry::Torus { spacing, .. } => *spacing,
        }
    }

    /// Scalar curvature of the model metric: `n(n−1)` on the unit sphere,
    /// zero on the flat torus.
    pub fn scalar_curvature_value(&self) -> f64 {
        match self.geometry {
            Geometry::Radial { .. } => (self.dim * (self.dim - 1)) as f64,
            Geometry::Torus { .. } => 0.0,
        }
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        match (&self.geometry, p) {
            (Geometry::Radial { .. }, Point::Radius(r)) if (0.0..=PI).contains(r) => Ok(()),
            (Geometry::Torus { .. }, Point::Coords(c)) if c.len() == self.dim => Ok(()),
            _ => Err(Error::InvalidInput(format!(
                "point {p:?} is not a point of this manifold"
            ))),
        }
    }

    /// Geodesic distance. On the radial sphere both points lie on the
    /// distinguished meridian; on the torus the minimum-image distance is used.
    pub fn geodesic_distance(&self, x: &Point, y: &Point) -> f64 {
        match (&self.geometry, x, y) {
            (Geometry::Radial { .. }, Point::Radius(a), Point::Radius(b)) => (a - b).abs(),
            (Geometry::Torus { .. }, Point::Coords(a), Point::Coords(b)) => {
                let side = self.torus_side();
                a.iter()
                    .zip(b)
                    .map(|(p, q)| {
                        let d = (p - q).rem_euclid(side);
                        let d = d.min(side - d);
                        d * d
                    })
                    .sum::<f64>()
                    .sqrt()
            }
            _ => f64::NAN,
        }
    }

    /// Distances from `p` to every node.
    pub fn distances_from(&self, p: &Point) -> Vec<f64> {
        match (&self.geometry, p) {
            (Geometry::Radial { radii, .. }, Point::Radius(r0)) => {
                radii.iter().map(|r| (r - r0).abs()).collect()
            }
            _ => (0..self.len())
                .map(|i| self.geodesic_distance(p, &self.node_point(i)))
                .collect(),
        }
    }

    pub fn nearest_node(&self, p: &Point) -> usize {
        let d = self.distances_from(p);
        let mut best = 0;
        for (i, v) in d.iter().enumerate() {
            if *v < d[best] {
                best = i;
            }
        }
        best
    }

    fn torus_side(&self) -> f64 {
        match self.kind {
            ManifoldKind::PeriodicTorus { side, .. } => side,
            ManifoldKind::RadialSphere { .. } => PI,
        }
    }

    /// `Σ wᵢ φᵢ`.
    pub fn integrate(&self, field: &ScalarField) -> Result<f64> {
        self.check(field)?;
        Ok(self.integrate_values(field.values()))
    }

    pub(crate) fn integrate_values(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub(crate) fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(a.iter().zip(b))
            .map(|(w, (x, y))| w * x * y)
            .sum()
    }

    pub(crate) fn check(&self, field: &ScalarField) -> Result<()> {
        if std::ptr::eq(self, field.manifold().as_ref()) {
            Ok(())
        } else {
            Err(Error::ManifoldMismatch)
        }
    }

    /// Applies the stiffness form: `out = K u`, so that `Δu = W⁻¹ K u`.
    pub(crate) fn stiffness_apply(&self, u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        match &self.geometry {
            Geometry::Radial { conductance, .. } => {
                for (j, c) in conductance.iter().enumerate() {
                    let flux = c * (u[j + 1] - u[j]);
                    out[j] -= flux;
                    out[j + 1] += flux;
                }
            }
            Geometry::Torus {
                spacing,
                per_axis,
                strides,
            } => {
                let coef = self.weights[0] / (spacing * spacing);
                let m = *per_axis;
                for i in 0..u.len() {
                    let mut acc = 2.0 * self.dim as f64 * u[i];
                    for s in strides {
                        let coord = (i / s) % m;
                        let up = if coord + 1 == m { i + s - m * s } else { i + s };
                        let down = if coord == 0 { i + (m - 1) * s } else { i - s };
                        acc -= u[up] + u[down];
                    }
                    out[i] = coef * acc;
                }
            }
        }
    }

    /// `Δu` node by node.
    pub(crate) fn laplacian_values(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        self.stiffness_apply(u, &mut out);
        out.iter_mut()
            .zip(&self.weights)
            .for_each(|(o, w)| *o /= w);
        out
    }

    pub fn laplacian_apply(self: &Arc<Self>, field: &ScalarField) -> Result<ScalarField> {
        self.check(field)?;
        Ok(ScalarField::from_values_unchecked(
            self.clone(),
            self.laplacian_values(field.values()),
        ))
    }

    /// Dirichlet energy `⟨Δu, u⟩`, assembled edge by edge so it is
    /// nonnegative to rounding.
    pub(crate) fn dirichlet_energy(&self, u: &[f64]) -> f64 {
        match &self.geometry {
            Geometry::Radial { conductance, .. } => conductance
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let d = u[j + 1] - u[j];
                    c * d * d
                })
                .sum(),
            Geometry::Torus {
                spacing,
                per_axis,
                strides,
            } => {
                let coef = self.weights[0] / (spacing * spacing);
                let m = *per_axis;
                let mut acc = 0.0;
                for i in 0..u.len() {
                    for s in strides {
                        let coord = (i / s) % m;
                        let up = if coord + 1 == m { i + s - m * s } else { i + s };
                        let d = u[up] - u[i];
                        acc += d * d;
                    }
                }
                coef * acc
            }
        }
    }

    /// Edge list `(i, j, conductance)` of the stiffness graph. Each undirected
    /// edge appears once.
    pub(crate) fn edges(&self) -> Vec<(usize, usize, f64)> {
        match &self.geometry {
            Geometry::Radial { conductance, .. } => conductance
                .iter()
                .enumerate()
                .map(|(j, c)| (j, j + 1, *c))
                .collect(),
            Geometry::Torus {
                spacing,
                per_axis,
                strides,
            } => {
                let coef = self.weights[0] / (spacing * spacing);
                let m = *per_axis;
                let mut e = Vec::with_capacity(self.len() * self.dim);
                for i in 0..self.len() {
                    for s in strides {
                        let coord = (i / s) % m;
                        let up = if coord + 1 == m { i + s - m * s } else { i + s };
                        e.push((i, up, coef));
                    }
                }
                e
            }
        }
    }

    /// Gershgorin bound on the norm of `Δ` in the weighted inner product.
    pub fn laplacian_norm_bound(&self) -> f64 {
        match &self.geometry {
            Geometry::Radial { conductance, .. } => {
                let n = self.len();
                (0..n)
                    .map(|i| {
                        let left = if i > 0 { conductance[i - 1] } else { 0.0 };
                        let right = if i + 1 < n { conductance[i] } else { 0.0 };
                        2.0 * (left + right) / self.weights[i]
                    })
                    .fold(0.0, f64::max)
            }
            Geometry::Torus { spacing, .. } => 4.0 * self.dim as f64 / (spacing * spacing),
        }
    }

    /// Solves `(coef·Δ + diag) x = rhs` for a positive coefficient and a
    /// positive diagonal.
    pub(crate) fn solve_shifted(&self, coef: f64, diag: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
        if diag.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::NumericFailure(
                "shifted operator is not positive definite".into(),
            ));
        }
        match &self.geometry {
            Geometry::Radial { conductance, .. } => {
                let n = self.len();
                let mut main: Vec<f64> = self
                    .weights
                    .iter()
                    .zip(diag)
                    .map(|(w, d)| w * d)
                    .collect();
                for (j, c) in conductance.iter().enumerate() {
                    main[j] += coef * c;
                    main[j + 1] += coef * c;
                }
                let off: Vec<f64> = conductance.iter().map(|c| -coef * c).collect();
                let b: Vec<f64> = rhs.iter().zip(&self.weights).map(|(r, w)| r * w).collect();
                debug_assert_eq!(main.len(), n);
                linalg::solve_sym_tridiagonal(&main, &off, &b)
            }
            Geometry::Torus { spacing, .. } => {
                let lap_diag = coef * 2.0 * self.dim as f64 / (spacing * spacing);
                let inv: Vec<f64> = diag.iter().map(|d| 1.0 / (lap_diag + d)).collect();
                let w = self.weights[0];
                let apply = |x: &[f64], y: &mut [f64]| {
                    self.stiffness_apply(x, y);
                    for i in 0..x.len() {
                        y[i] = coef * y[i] / w + diag[i] * x[i];
                    }
                };
                linalg::conjugate_gradient(apply, &inv, rhs, None, 1e-13, 20 * self.len() + 100)
            }
        }
    }

    /// Solves `(Δ + diag) x = rhs` on the radial sphere for a diagonal of
    /// either sign. Used for Newton steps, where the operator is indefinite.
    pub(crate) fn solve_radial_schrodinger(&self, diag: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
        let Geometry::Radial { conductance, .. } = &self.geometry else {
            return Err(Error::UnsupportedGeometry(
                "tridiagonal solves need the radial sphere".into(),
            ));
        };
        let mut main: Vec<f64> = self.weights.iter().zip(diag).map(|(w, d)| w * d).collect();
        for (j, c) in conductance.iter().enumerate() {
            main[j] += c;
            main[j + 1] += c;
        }
        let off: Vec<f64> = conductance.iter().map(|c| -c).collect();
        let b: Vec<f64> = rhs.iter().zip(&self.weights).map(|(r, w)| r * w).collect();
        linalg::solve_sym_tridiagonal(&main, &off, &b)
    }

    /// Fraction of each node's cell lying in the geodesic ball `B(center, radius)`.
    ///
    /// On the radial sphere a node stands for the whole shell at its radius;
    /// the fraction of that shell inside a ball centred off the pole is the
    /// normalized measure of a spherical cap of `S^{n−1}`.
    pub fn ball_fractions(&self, center: &Point, radius: f64) -> Vec<f64> {
        match (&self.geometry, center) {
            (Geometry::Radial { radii, .. }, Point::Radius(r0)) => {
                let half = 0.5 * (self.dim as f64 - 1.0);
                let (s0, c0) = r0.sin_cos();
                radii
                    .iter()
                    .map(|&r| {
                        let (s, c) = r.sin_cos();
                        let denom = s * s0;
                        if denom < 1e-300 {
                            return if (r - r0).abs() < radius { 1.0 } else { 0.0 };
                        }
                        let t = (radius.cos() - c * c0) / denom;
                        if t >= 1.0 {
                            0.0
                        } else if t <= -1.0 {
                            1.0
                        } else {
                            statrs::function::beta::beta_reg(half, half, 0.5 * (1.0 - t))
                        }
                    })
                    .collect()
            }
            _ => self
                .distances_from(center)
                .into_iter()
                .map(|d| if d < radius { 1.0 } else { 0.0 })
                .collect(),
        }
    }

    /// Evaluates a radial field at an arbitrary radius by cubic Hermite
    /// interpolation (sphere only).
    pub fn interpolate_radial(&self, values: &[f64], r: f64) -> Result<f64> {
        match &self.geometry {
            Geometry::Radial { radii, .. } => Ok(interp::radial_cubic(radii, values, r)),
            Geometry::Torus { .. } => Err(Error::UnsupportedGeometry(
                "radial interpolation needs the radial sphere".into(),
            )),
        }
    }

    /// Transfers a field to another radial sphere of the same dimension.
    pub fn resample_to(&self, field: &ScalarField, target: &Arc<DiscreteManifold>) -> Result<ScalarField> {
        self.check(field)?;
        if target.dim != self.dim {
            return Err(Error::InvalidInput("resampling across dimensions".into()));
        }
        let (Geometry::Radial { radii, .. }, Some(target_radii)) = (&self.geometry, target.radii())
        else {
            return Err(Error::UnsupportedGeometry(
                "resampling is only defined between radial spheres".into(),
            ));
        };
        let values = target_radii
            .iter()
            .map(|&r| interp::radial_cubic(radii, field.values(), r))
            .collect();
        ScalarField::new(target.clone(), values)
    }
}
