//! Nodal fields in the discontinuous element spaces.
//!
//! A field stores one value per GLL node, element-major, with local node
//! `k = i + (m+1)·j`. Scalar fields hold `f64`; vector fields hold Cartesian
//! tangent vectors, with covariant and contravariant components formed on
//! demand from the mesh metric.

use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::geometry::{Mesh, Vec3};

#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    nodes_per_element: usize,
    values: Vec<T>,
}

pub type ScalarField = Field<f64>;
pub type VectorField = Field<Vec3>;

/// Values that can live on nodes and be combined linearly.
pub trait NodalValue: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl NodalValue for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl NodalValue for Vec3 {
    fn zero() -> Self {
        Vec3::zeros()
    }
}

impl<T: NodalValue> Field<T> {
    pub fn zeros(mesh: &Mesh) -> Self {
        Self::constant(mesh, T::zero())
    }

    pub fn constant(mesh: &Mesh, value: T) -> Self {
        Field {
            nodes_per_element: mesh.nodes_per_element(),
            values: vec![value; mesh.num_nodes()],
        }
    }

    pub fn from_values(mesh: &Mesh, values: Vec<T>) -> Result<Self> {
        if values.len() != mesh.num_nodes() {
            return Err(Error::MeshMismatch {
                expected: mesh.num_nodes(),
                actual: values.len(),
            });
        }
        Ok(Field {
            nodes_per_element: mesh.nodes_per_element(),
            values,
        })
    }

    /// Builds a field node by node from `(element, local node)`.
    pub fn from_fn(mesh: &Mesh, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let npe = mesh.nodes_per_element();
        let values = (0..mesh.num_elements())
            .flat_map(|e| (0..npe).map(move |k| (e, k)))
            .map(|(e, k)| f(e, k))
            .collect();
        Field {
            nodes_per_element: npe,
            values,
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nodes_per_element(&self) -> usize {
        self.nodes_per_element
    }

    #[inline]
    pub fn get(&self, e: usize, k: usize) -> T {
        self.values[e * self.nodes_per_element + k]
    }

    #[inline]
    pub fn set(&mut self, e: usize, k: usize, v: T) {
        self.values[e * self.nodes_per_element + k] = v;
    }

    pub fn element(&self, e: usize) -> &[T] {
        let n = self.nodes_per_element;
        &self.values[e * n..(e + 1) * n]
    }

    pub fn element_mut(&mut self, e: usize) -> &mut [T] {
        let n = self.nodes_per_element;
        &mut self.values[e * n..(e + 1) * n]
    }

    pub fn check_mesh(&self, mesh: &Mesh) -> Result<()> {
        if self.values.len() != mesh.num_nodes() || self.nodes_per_element != mesh.nodes_per_element() {
            return Err(Error::MeshMismatch {
                expected: mesh.num_nodes(),
                actual: self.values.len(),
            });
        }
        Ok(())
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.values.len(), other.values.len());
        for (s, o) in self.values.iter_mut().zip(&other.values) {
            *s = *s + *o * a;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for s in &mut self.values {
            *s = *s * a;
        }
    }

    /// `a · self + b · other`.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        Field {
            nodes_per_element: self.nodes_per_element,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| x * a + y * b)
                .collect(),
        }
    }

    pub fn map<U: NodalValue>(&self, f: impl Fn(T) -> U) -> Field<U> {
        Field {
            nodes_per_element: self.nodes_per_element,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map<U: NodalValue, V: NodalValue>(&self, other: &Field<U>, f: impl Fn(T, U) -> V) -> Field<V> {
        debug_assert_eq!(self.values.len(), other.values.len());
        Field {
            nodes_per_element: self.nodes_per_element,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl ScalarField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl VectorField {
    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.iter().all(|c| c.is_finite()))
    }

    /// Largest `|w·k|` relative to `|w|` over the mesh.
    pub fn max_normal_component(&self, mesh: &Mesh) -> f64 {
        let npe = self.nodes_per_element;
        self.values
            .iter()
            .enumerate()
            .map(|(idx, w)| {
                let k = mesh.node(idx / npe, idx % npe).k;
                let n = w.norm();
                if n == 0.0 {
                    0.0
                } else {
                    w.dot(&k).abs() / n
                }
            })
            .fold(0.0, f64::max)
    }
}
