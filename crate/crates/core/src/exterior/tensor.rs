use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, FLOAT_TOL};

/// Symmetric bilinear form, `T(e_i, e_j) = matrix[(i, j)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor<S>(Matrix<S>);

impl<S: Scalar> SymTensor<S> {
    pub fn new(m: Matrix<S>) -> Result<Self> {
        if !m.is_symmetric(FLOAT_TOL) {
            return Err(Error::Precondition("tensor is not symmetric".into()));
        }
        Ok(Self(m))
    }

    /// Wrap a matrix known to be symmetric by construction.
    pub fn from_matrix_unchecked(m: Matrix<S>) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    /// `a ⊗ b + b ⊗ a` halved; for `a = b` this is `a ⊗ a`.
    pub fn sym_product(a: &[S], b: &[S]) -> Self {
        let two = S::from_int(2);
        Self(Matrix::from_fn(a.len(), a.len(), |i, j| {
            (a[i].clone() * b[j].clone() + b[i].clone() * a[j].clone()) / two.clone()
        }))
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn at(&self, i: usize, j: usize) -> &S {
        &self.0[(i, j)]
    }

    pub fn apply(&self, x: &[S], y: &[S]) -> S {
        crate::linalg::dot(x, &self.0.mul_vec(y))
    }

    pub fn is_positive_definite(&self) -> bool {
        self.0.is_positive_definite()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(self.0.add(&o.0))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self(self.0.sub(&o.0))
    }

    pub fn scale(&self, c: &S) -> Self {
        Self(self.0.scale(c))
    }

    pub fn convert<T: Scalar>(&self) -> SymTensor<T> {
        SymTensor(self.0.map(crate::scalar::convert))
    }
}

/// Linear endomorphism of the Lie algebra; column `j` is the image of `e_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Endomorphism<S>(Matrix<S>);

impl<S: Scalar> Endomorphism<S> {
    pub fn new(m: Matrix<S>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension {
                expected: m.rows(),
                got: m.cols(),
            });
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        self.0.mul_vec(v)
    }

    pub fn image_of_basis(&self, j: usize) -> Vec<S> {
        self.0.column(j)
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0.mul(&other.0))
    }

    /// Action on 1-forms, `(Jα)(x) = -α(Jx)`.
    pub fn act_on_covector(&self, alpha: &[S]) -> Vec<S> {
        self.0.transpose().mul_vec(alpha).into_iter().map(|x| -x).collect()
    }

    pub fn convert<T: Scalar>(&self) -> Endomorphism<T> {
        Endomorphism(self.0.map(crate::scalar::convert))
    }
}
