use std::sync::Arc;

use super::{DiscreteManifold, Point};
use crate::error::{Error, Result};

/// Values of a function at the nodes of a manifold.
#[derive(Debug, Clone)]
pub struct ScalarField {
    manifold: Arc<DiscreteManifold>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(manifold: Arc<DiscreteManifold>, values: Vec<f64>) -> Result<Self> {
        if values.len() != manifold.len() {
            return Err(Error::InvalidInput(format!(
                "field has {} values, manifold has {} nodes",
                values.len(),
                manifold.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value at node {i}")));
        }
        Ok(Self { manifold, values })
    }

    pub(crate) fn from_values_unchecked(manifold: Arc<DiscreteManifold>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), manifold.len());
        Self { manifold, values }
    }

    pub fn constant(manifold: &Arc<DiscreteManifold>, c: f64) -> Self {
        Self {
            manifold: manifold.clone(),
            values: vec![c; manifold.len()],
        }
    }

    pub fn zeros(manifold: &Arc<DiscreteManifold>) -> Self {
        Self::constant(manifold, 0.0)
    }

    pub fn from_point_fn(manifold: &Arc<DiscreteManifold>, f: impl Fn(&Point) -> f64) -> Result<Self> {
        let values = (0..manifold.len()).map(|i| f(&manifold.node_point(i))).collect();
        Self::new(manifold.clone(), values)
    }

    /// Samples `f(d(base, x))`, the distance being measured from the pole of
    /// the sphere or the origin of the torus.
    pub fn from_radial_fn(manifold: &Arc<DiscreteManifold>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = manifold
            .distances_from(&manifold.base_point())
            .into_iter()
            .map(f)
            .collect();
        Self::new(manifold.clone(), values)
    }

    pub fn manifold(&self) -> &Arc<DiscreteManifold> {
        &self.manifold
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Index of the largest value; the first (smallest radius) wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        best
    }

    /// All nodes whose value lies within `tol` of the maximum.
    pub fn max_points(&self, tol: f64) -> Vec<usize> {
        let m = self.max();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v >= m - tol)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            manifold: self.manifold.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Nodewise combination with another field on the same manifold.
    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.manifold.check(other)?;
        Ok(Self {
            manifold: self.manifold.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn add_scalar(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }
}
