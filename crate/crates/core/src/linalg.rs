//! Small dense matrices over a [`Scalar`] field.
//!
//! Sizes in this crate are tiny (at most a few hundred rows for the
//! exterior-power systems), so everything is plain row-major storage with
//! Gaussian elimination. Pivoting picks the largest magnitude entry, which is
//! partial pivoting in float mode and simply "some nonzero entry" in rational
//! mode.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, FLOAT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Dimension {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(entries: &[S]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.clone() * b.clone();
                    let cell = &mut out[(i, j)];
                    *cell = cell.clone() + prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|a| a.clone() * c.clone())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// Largest absolute entry, as `f64`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64_lossy().abs()).fold(0.0, f64::max)
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.is_negligible(tol))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (i + 1..self.cols).all(|j| (self[(i, j)].clone() - self[(j, i)].clone()).is_negligible(tol)))
    }

    /// Row-reduce a copy; returns (reduced matrix, pivot columns, determinant sign/scale).
    fn eliminate(&self, tol: f64) -> (Self, Vec<usize>, S) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut det = S::one();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let (best, _) = (row..m.rows)
                .map(|r| (r, m[(r, col)].to_f64_lossy().abs()))
                .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if m[(best, col)].is_negligible(pivot_tol(tol)) {
                det = S::zero();
                continue;
            }
            if best != row {
                m.swap_rows(best, row);
                det = -det;
            }
            let p = m[(row, col)].clone();
            det = det * p.clone();
            for r in 0..m.rows {
                if r == row || m[(r, col)].is_zero() {
                    continue;
                }
                let f = m[(r, col)].clone() / p.clone();
                for c in col..m.cols {
                    let v = m[(row, c)].clone() * f.clone();
                    m[(r, c)] = m[(r, c)].clone() - v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        if pivots.len() < m.rows.min(m.cols) {
            det = S::zero();
        }
        (m, pivots, det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.eliminate(tol).1.len()
    }

    pub fn determinant(&self) -> S {
        assert!(self.is_square(), "determinant of non-square matrix");
        if self.rows == 0 {
            return S::one();
        }
        self.eliminate(0.0).2
    }

    /// Solve `self * X = rhs` for square nonsingular `self`.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let aug = Self::from_fn(n, n + rhs.cols, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else {
                rhs[(i, j - n)].clone()
            }
        });
        let (red, pivots, _) = aug.eliminate(0.0);
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return Err(Error::Singular);
        }
        Ok(Self::from_fn(n, rhs.cols, |i, j| {
            red[(i, n + j)].clone() / red[(i, i)].clone()
        }))
    }

    pub fn solve_vec(&self, rhs: &[S]) -> Result<Vec<S>> {
        let b = Self::from_fn(rhs.len(), 1, |i, _| rhs[i].clone());
        Ok(self.solve(&b)?.column(0))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.solve(&Self::identity(self.rows))
    }

    /// Basis of the right null space.
    pub fn null_space(&self, tol: f64) -> Vec<Vec<S>> {
        let (red, pivots, _) = self.eliminate(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.cols];
                v[f] = S::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -(red[(r, f)].clone() / red[(r, p)].clone());
                }
                v
            })
            .collect()
    }

    /// Symmetric positive definiteness by the signs of the elimination pivots
    /// (Sylvester's criterion in disguise, exact in rational mode).
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric(FLOAT_TOL) {
            return false;
        }
        let mut m = self.clone();
        let n = self.rows;
        for k in 0..n {
            let p = m[(k, k)].clone();
            if !p.is_positive() || p.is_negligible(pivot_tol(0.0)) {
                return false;
            }
            for r in k + 1..n {
                let f = m[(r, k)].clone() / p.clone();
                for c in k..n {
                    let v = m[(k, c)].clone() * f.clone();
                    m[(r, c)] = m[(r, c)].clone() - v;
                }
            }
        }
        true
    }
}

fn pivot_tol(tol: f64) -> f64 {
    if tol > 0.0 {
        tol
    } else {
        1e-13
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn scale_vec<S: Scalar>(v: &[S], c: &S) -> Vec<S> {
    v.iter().map(|x| x.clone() * c.clone()).collect()
}

pub fn add_vec<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn sub_vec<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::Zero;

    fn q(p: i64, d: i64) -> Rational {
        Rational::ratio(p, d)
    }

    #[test]
    fn exact_inverse() {
        let m = Matrix::from_rows(vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert_eq!(m.determinant(), q(1, 1));
    }

    #[test]
    fn singular_detected() {
        let m = Matrix::from_rows(vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]]).unwrap();
        assert!(matches!(m.inverse(), Err(Error::Singular)));
        assert_eq!(m.rank(0.0), 1);
        let ns = m.null_space(0.0);
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn positive_definite() {
        let g = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(g.is_positive_definite());
        let h = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(!h.is_positive_definite());
    }

    #[test]
    fn determinant_with_row_swap() {
        let m = Matrix::from_rows(vec![
            vec![q(0, 1), q(1, 1), q(0, 1)],
            vec![q(1, 1), q(0, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(3, 1)],
        ])
        .unwrap();
        assert_eq!(m.determinant(), q(-3, 1));
    }
}
