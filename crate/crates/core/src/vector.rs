//! Dense vector arithmetic with a deterministic summation order.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Dense, ordered `f64` coordinates. The universal parameter/gradient
/// representation throughout the workspace.
///
/// Reductions (`dot`, `norm`) accumulate strictly left to right so that
/// repeated runs with identical inputs are bit-identical.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    pub fn new(data: Vec<f64>) -> Self {
        Self { data }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            data: vec![0.0; len],
        }
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> f64) -> Self {
        Self {
            data: (0..len).map(|i| f(i)).collect(),
        }
    }

    /// Standard basis vector `e_i` of the given length.
    pub fn basis(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.data[i] = 1.0;
        v
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.data.clone()
    }

    /// True when every coordinate is finite (no NaN/Inf).
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Inner product, sequential left-to-right accumulation.
    ///
    /// Panics on length mismatch.
    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(
            self.len(),
            other.len(),
            "dot: length mismatch ({} vs {})",
            self.len(),
            other.len()
        );
        let mut acc = 0.0;
        for i in 0..self.data.len() {
            acc += self.data[i] * other.data[i];
        }
        acc
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `self += a * x`. Panics on length mismatch.
    pub fn axpy(&mut self, a: f64, x: &Vector) {
        assert_eq!(
            self.len(),
            x.len(),
            "axpy: length mismatch ({} vs {})",
            self.len(),
            x.len()
        );
        for i in 0..self.data.len() {
            self.data[i] += a * x.data[i];
        }
    }

    /// Returns `s * self`.
    pub fn scale(&self, s: f64) -> Vector {
        Vector {
            data: self.data.iter().map(|x| s * x).collect(),
        }
    }

    pub fn scale_mut(&mut self, s: f64) {
        for x in &mut self.data {
            *x *= s;
        }
    }

    pub fn fill(&mut self, value: f64) {
        for x in &mut self.data {
            *x = value;
        }
    }
}

impl From<Vec<f64>> for Vector {
    fn from(data: Vec<f64>) -> Self {
        Self { data }
    }
}

impl From<&[f64]> for Vector {
    fn from(data: &[f64]) -> Self {
        Self {
            data: data.to_vec(),
        }
    }
}

impl FromIterator<f64> for Vector {
    fn from_iter<T: IntoIterator<Item = f64>>(iter: T) -> Self {
        Self {
            data: iter.into_iter().collect(),
        }
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        assert_eq!(self.len(), rhs.len(), "add: length mismatch");
        Vector::from_fn(self.len(), |i| self.data[i] + rhs.data[i])
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        assert_eq!(self.len(), rhs.len(), "sub: length mismatch");
        Vector::from_fn(self.len(), |i| self.data[i] - rhs.data[i])
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        self.scale(s)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}
