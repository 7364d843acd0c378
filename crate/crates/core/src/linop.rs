//! Matrix-free symmetric linear operators.

use crate::vector::Vector;

/// A linear map `R^dim -> R^dim` applied without materializing a matrix.
///
/// Implementations are expected to be symmetric and linear; both properties
/// are checked statistically in tests via [`symmetry_defect`].
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, v: &Vector) -> Vector;
}

impl<A: LinearOperator + ?Sized> LinearOperator for &A {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, v: &Vector) -> Vector {
        (**self).apply(v)
    }
}

/// Operator backed by a closure.
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&Vector) -> Vector> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&Vector) -> Vector> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, v: &Vector) -> Vector {
        (self.f)(v)
    }
}

/// `A - shift * I`, used by the eigenvalue probe's shift trick.
pub struct ShiftedOperator<'a, A: ?Sized> {
    inner: &'a A,
    shift: f64,
}

impl<'a, A: LinearOperator + ?Sized> ShiftedOperator<'a, A> {
    pub fn new(inner: &'a A, shift: f64) -> Self {
        Self { inner, shift }
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }
}

impl<A: LinearOperator + ?Sized> LinearOperator for ShiftedOperator<'_, A> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn apply(&self, v: &Vector) -> Vector {
        let mut out = self.inner.apply(v);
        out.axpy(-self.shift, v);
        out
    }
}

/// `|<Au, v> - <u, Av>|` for a probe pair; small for symmetric operators.
pub fn symmetry_defect(a: &impl LinearOperator, u: &Vector, v: &Vector) -> f64 {
    (a.apply(u).dot(v) - u.dot(&a.apply(v))).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_operator_subtracts_identity_multiple() {
        let a = FnOperator::new(2, |v: &Vector| v.scale(3.0));
        let s = ShiftedOperator::new(&a, 1.0);
        let out = s.apply(&Vector::new(vec![1.0, -2.0]));
        assert_eq!(out.as_slice(), &[2.0, -4.0]);
    }

    #[test]
    fn symmetry_defect_zero_for_scaling() {
        let a = FnOperator::new(3, |v: &Vector| v.scale(0.5));
        let u = Vector::new(vec![1.0, 2.0, 3.0]);
        let v = Vector::new(vec![-1.0, 0.5, 2.0]);
        assert!(symmetry_defect(&a, &u, &v) < 1e-14);
    }
}
