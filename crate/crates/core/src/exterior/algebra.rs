use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{convert, Scalar, FLOAT_TOL};

/// Real Lie algebra given by structure constants in a fixed basis
/// `e_0, …, e_{dim-1}`: `[e_i, e_j] = Σ_k c^k_{ij} e_k`.
///
/// Only `i < j` entries are accepted on construction; the other half is
/// filled in by antisymmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra<S> {
    dim: usize,
    // c[(i * dim + j) * dim + k] = c^k_{ij}
    constants: Vec<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub jacobi: bool,
    pub unimodular: bool,
    pub max_jacobi_residual: f64,
}

/// One nonzero structure constant `c^k_{ij}` with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketEntry<S> {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub coeff: S,
}

impl<S: Scalar> BracketEntry<S> {
    pub fn new(i: usize, j: usize, k: usize, coeff: S) -> Self {
        Self { i, j, k, coeff }
    }
}

impl<S: Scalar> LieAlgebra<S> {
    pub fn abelian(dim: usize) -> Self {
        Self {
            dim,
            constants: vec![S::zero(); dim * dim * dim],
        }
    }

    pub fn from_brackets(dim: usize, entries: &[BracketEntry<S>]) -> Result<Self> {
        let mut alg = Self::abelian(dim);
        for e in entries {
            if e.i >= e.j {
                return Err(Error::BracketOrder { i: e.i, j: e.j });
            }
            for idx in [e.i, e.j, e.k] {
                if idx >= dim {
                    return Err(Error::IndexRange { index: idx, dim });
                }
            }
            let at = alg.offset(e.i, e.j, e.k);
            alg.constants[at] = alg.constants[at].clone() + e.coeff.clone();
            let at = alg.offset(e.j, e.i, e.k);
            alg.constants[at] = alg.constants[at].clone() - e.coeff.clone();
        }
        Ok(alg)
    }

    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `c^k_{ij}`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> &S {
        &self.constants[self.offset(i, j, k)]
    }

    /// Coordinates of `[e_i, e_j]`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[S] {
        let start = self.offset(i, j, 0);
        &self.constants[start..start + self.dim]
    }

    pub fn bracket(&self, u: &[S], v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim];
        for (i, ui) in u.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, vj) in v.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                if i == j {
                    continue;
                }
                let w = ui.clone() * vj.clone();
                for (k, c) in self.bracket_basis(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        out[k] = out[k].clone() + w.clone() * c.clone();
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad_{e_i}`: column `j` holds `[e_i, e_j]`.
    pub fn ad(&self, i: usize) -> Matrix<S> {
        Matrix::from_fn(self.dim, self.dim, |k, j| self.c(i, j, k).clone())
    }

    pub fn ad_vector(&self, x: &[S]) -> Matrix<S> {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            m = m.add(&self.ad(i).scale(xi));
        }
        m
    }

    /// Nonzero `c^k_{ij}` with `i < j`, in lexicographic order.
    pub fn entries(&self) -> Vec<BracketEntry<S>> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for k in 0..self.dim {
                    let c = self.c(i, j, k);
                    if !c.is_zero() {
                        out.push(BracketEntry::new(i, j, k, c.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.constants.iter().all(|c| c.is_zero())
    }

    pub fn jacobiator(&self, i: usize, j: usize, l: usize) -> Vec<S> {
        let e = |a: usize| unit::<S>(self.dim, a);
        let t1 = self.bracket(self.bracket_basis(i, j), &e(l));
        let t2 = self.bracket(self.bracket_basis(j, l), &e(i));
        let t3 = self.bracket(self.bracket_basis(l, i), &e(j));
        t1.into_iter().zip(t2).zip(t3).map(|((a, b), c)| a + b + c).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut max_res = 0.0f64;
        let mut jacobi = true;
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for l in j + 1..self.dim {
                    for v in self.jacobiator(i, j, l) {
                        max_res = max_res.max(v.to_f64_lossy().abs());
                        if !v.is_negligible(FLOAT_TOL) {
                            jacobi = false;
                        }
                    }
                }
            }
        }
        let unimodular = (0..self.dim).all(|i| self.ad(i).trace().is_negligible(FLOAT_TOL));
        ValidationReport {
            jacobi,
            unimodular,
            max_jacobi_residual: max_res,
        }
    }

    pub fn is_unimodular(&self) -> bool {
        (0..self.dim).all(|i| self.ad(i).trace().is_negligible(FLOAT_TOL))
    }

    pub fn ensure_jacobi(&self) -> Result<()> {
        let r = self.validate();
        if r.jacobi {
            Ok(())
        } else {
            Err(Error::Jacobi {
                residual: r.max_jacobi_residual,
            })
        }
    }

    /// Restriction to the subalgebra spanned by the columns of `basis`
    /// (given in ambient coordinates). Fails if the span is not closed under
    /// the bracket.
    pub fn subalgebra(&self, basis: &[Vec<S>]) -> Result<LieAlgebra<S>> {
        let m = basis.len();
        let b = Matrix::from_fn(self.dim, m, |r, c| basis[c][r].clone());
        // least-squares coordinates through the normal equations
        let bt = b.transpose();
        let gram = bt.mul(&b);
        let mut entries = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let br = self.bracket(&basis[i], &basis[j]);
                let coords = gram.solve_vec(&bt.mul_vec(&br))?;
                let back = b.mul_vec(&coords);
                let closed = back
                    .iter()
                    .zip(&br)
                    .all(|(x, y)| (x.clone() - y.clone()).is_negligible(FLOAT_TOL));
                if !closed {
                    return Err(Error::Precondition("span is not closed under the bracket".into()));
                }
                for (k, c) in coords.into_iter().enumerate() {
                    if !c.is_zero() {
                        entries.push(BracketEntry::new(i, j, k, c));
                    }
                }
            }
        }
        LieAlgebra::from_brackets(m, &entries)
    }

    pub fn convert<T: Scalar>(&self) -> LieAlgebra<T> {
        LieAlgebra {
            dim: self.dim,
            constants: self.constants.iter().map(convert).collect(),
        }
    }
}

pub fn unit<S: Scalar>(dim: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); dim];
    v[i] = S::one();
    v
}
