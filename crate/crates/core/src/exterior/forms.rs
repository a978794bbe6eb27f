use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exterior::algebra::LieAlgebra;
use crate::linalg::Matrix;
use crate::scalar::{convert, Scalar};

/// Exterior form on a Lie algebra with coefficients in the dual basis:
/// `α = Σ_{I increasing} α_I e^I`, with `e^{i_1}∧…∧e^{i_k}(e_{i_1},…,e_{i_k}) = 1`.
///
/// Only nonzero coefficients are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct KForm<S> {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, S>,
}

impl<S: Scalar> KForm<S> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self {
            dim,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, value: S) -> Self {
        let mut f = Self::zero(dim, 0);
        f.set(&[], value);
        f
    }

    /// `e^{i_1}∧…∧e^{i_k}` for any index order (sign applied).
    pub fn basis(dim: usize, indices: &[usize]) -> Self {
        let mut f = Self::zero(dim, indices.len());
        f.add_at(indices, S::one());
        f
    }

    pub fn from_vector(v: &[S]) -> Self {
        let mut f = Self::zero(v.len(), 1);
        for (i, x) in v.iter().enumerate() {
            f.set(&[i], x.clone());
        }
        f
    }

    /// 2-form whose value on `(e_i, e_j)` is `m[(i, j)]`; `m` is read above the diagonal.
    pub fn from_matrix(m: &Matrix<S>) -> Self {
        let n = m.rows();
        let mut f = Self::zero(n, 2);
        for i in 0..n {
            for j in i + 1..n {
                f.set(&[i, j], m[(i, j)].clone());
            }
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &S)> {
        self.coeffs.iter()
    }

    /// Coefficient on an increasing index tuple.
    pub fn get(&self, indices: &[usize]) -> S {
        self.coeffs.get(indices).cloned().unwrap_or_else(S::zero)
    }

    /// Set the coefficient on an increasing tuple.
    pub fn set(&mut self, indices: &[usize], value: S) {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        if value.is_zero() {
            self.coeffs.remove(indices);
        } else {
            self.coeffs.insert(indices.to_vec(), value);
        }
    }

    /// Add `value · e^{indices}` for an arbitrary index order.
    pub fn add_at(&mut self, indices: &[usize], value: S) {
        if let Some((sorted, sign)) = sort_with_sign(indices) {
            let v = if sign < 0 { -value } else { value };
            let cur = self.get(&sorted);
            self.set(&sorted, cur + v);
        }
    }

    /// Value on basis vectors `e_{i_1}, …, e_{i_k}` in any order.
    pub fn eval_basis(&self, indices: &[usize]) -> S {
        match sort_with_sign(indices) {
            Some((sorted, sign)) => {
                let v = self.get(&sorted);
                if sign < 0 {
                    -v
                } else {
                    v
                }
            }
            None => S::zero(),
        }
    }

    /// Value on arbitrary vectors (multilinear expansion).
    pub fn eval(&self, vectors: &[Vec<S>]) -> S {
        assert_eq!(vectors.len(), self.degree);
        let mut total = S::zero();
        for (idx, c) in &self.coeffs {
            // Σ_σ sign(σ) Π v_a[idx[σ(a)]] = det of the minor
            let minor = Matrix::from_fn(self.degree, self.degree, |a, b| vectors[a][idx[b]].clone());
            total = total + c.clone() * minor.determinant();
        }
        total
    }

    pub fn to_vector(&self) -> Vec<S> {
        assert_eq!(self.degree, 1, "to_vector on a {}-form", self.degree);
        (0..self.dim).map(|i| self.get(&[i])).collect()
    }

    /// Full antisymmetric matrix `A_{ij} = α(e_i, e_j)` of a 2-form.
    pub fn to_matrix(&self) -> Matrix<S> {
        assert_eq!(self.degree, 2, "to_matrix on a {}-form", self.degree);
        Matrix::from_fn(self.dim, self.dim, |i, j| self.eval_basis(&[i, j]))
    }

    pub fn scalar_value(&self) -> S {
        assert_eq!(self.degree, 0);
        self.get(&[])
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            let cur = out.get(k);
            out.set(k, cur + v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.dim, self.degree);
        for (k, v) in &self.coeffs {
            out.set(k, v.clone() * c.clone());
        }
        out
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(
            (self.dim, self.degree),
            (other.dim, other.degree),
            "forms of different shape"
        );
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.coeffs.values().all(|v| v.is_negligible(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|v| v.to_f64_lossy().abs()).fold(0.0, f64::max)
    }

    pub fn convert<T: Scalar>(&self) -> KForm<T> {
        let mut out = KForm::zero(self.dim, self.degree);
        for (k, v) in &self.coeffs {
            out.set(k, convert(v));
        }
        out
    }

    /// Graded-commutative product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut out = Self::zero(self.dim, self.degree + other.degree);
        if self.degree + other.degree > self.dim {
            return Ok(out);
        }
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                if i.iter().any(|x| j.contains(x)) {
                    continue;
                }
                let joined: Vec<usize> = i.iter().chain(j.iter()).copied().collect();
                out.add_at(&joined, a.clone() * b.clone());
            }
        }
        Ok(out)
    }

    /// Chevalley–Eilenberg differential on left-invariant forms,
    /// `dα(x_0,…,x_k) = Σ_{i<j} (-1)^{i+j} α([x_i,x_j], x_0,…,x̂_i,…,x̂_j,…,x_k)`.
    /// On 1-forms this is `dα(x, y) = -α([x, y])`.
    pub fn d(&self, alg: &LieAlgebra<S>) -> Self {
        let n = self.dim;
        assert_eq!(alg.dim(), n, "form and algebra dimensions differ");
        let k = self.degree;
        let mut out = Self::zero(n, k + 1);
        if k + 1 > n || self.coeffs.is_empty() {
            return out;
        }
        for tuple in increasing_tuples(n, k + 1) {
            let mut acc = S::zero();
            for a in 0..=k {
                for b in a + 1..=k {
                    let rest: Vec<usize> = tuple
                        .iter()
                        .enumerate()
                        .filter(|(p, _)| *p != a && *p != b)
                        .map(|(_, &x)| x)
                        .collect();
                    let br = alg.bracket_basis(tuple[a], tuple[b]);
                    let mut term = S::zero();
                    for (m, c) in br.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let mut idx = Vec::with_capacity(k);
                        idx.push(m);
                        idx.extend_from_slice(&rest);
                        let v = self.eval_basis(&idx);
                        if !v.is_zero() {
                            term = term + c.clone() * v;
                        }
                    }
                    if (a + b) % 2 == 1 {
                        term = -term;
                    }
                    acc = acc + term;
                }
            }
            out.set(&tuple, acc);
        }
        out
    }

    /// Contraction with a vector in the first slot.
    pub fn interior(&self, v: &[S]) -> Self {
        assert!(self.degree >= 1);
        let mut out = Self::zero(self.dim, self.degree - 1);
        for (idx, c) in &self.coeffs {
            for (pos, &i) in idx.iter().enumerate() {
                if v[i].is_zero() {
                    continue;
                }
                let rest: Vec<usize> = idx
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| *p != pos)
                    .map(|(_, &x)| x)
                    .collect();
                let mut term = c.clone() * v[i].clone();
                if pos % 2 == 1 {
                    term = -term;
                }
                let cur = out.get(&rest);
                out.set(&rest, cur + term);
            }
        }
        out
    }
}

/// Sort indices, returning the sign of the sorting permutation, or `None`
/// when an index repeats.
pub fn sort_with_sign(indices: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = indices.to_vec();
    let mut sign = 1;
    // insertion sort, counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

/// All strictly increasing `k`-tuples from `0..n`, lexicographic.
pub fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::algebra::BracketEntry;
    use crate::scalar::Rational;

    type Q = Rational;

    fn h3() -> LieAlgebra<Q> {
        LieAlgebra::from_brackets(3, &[BracketEntry::new(0, 1, 2, Q::from_int(1))]).unwrap()
    }

    #[test]
    fn wedge_examples() {
        let e1 = KForm::<Q>::basis(3, &[0]);
        let e2 = KForm::<Q>::basis(3, &[1]);
        let e3 = KForm::<Q>::basis(3, &[2]);
        assert!(e1.wedge(&e1).unwrap().is_zero_within(0.0));
        assert_eq!(e1.wedge(&e2).unwrap(), e2.wedge(&e1).unwrap().scale(&Q::from_int(-1)));
        let lhs = e1.add(&e2).wedge(&e3).unwrap();
        let rhs = KForm::basis(3, &[0, 2]).add(&KForm::basis(3, &[1, 2]));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn d_on_heisenberg_dual_of_center() {
        // oracle: d e3*(e1, e2) = -e3*([e1, e2]) = -1, all other pairs vanish
        let d = KForm::<Q>::basis(3, &[2]).d(&h3());
        assert_eq!(d, KForm::basis(3, &[0, 1]).scale(&Q::from_int(-1)));
        assert_eq!(d.eval_basis(&[1, 0]), Q::from_int(1));
    }

    #[test]
    fn d_on_abelian_vanishes() {
        let alg = LieAlgebra::<Q>::abelian(4);
        let f = KForm::basis(4, &[0, 3]).add(&KForm::basis(4, &[1]).wedge(&KForm::basis(4, &[2])).unwrap());
        assert!(f.d(&alg).is_zero_within(0.0));
    }

    #[test]
    fn degree_overflow_gives_zero() {
        let f = KForm::<Q>::basis(3, &[0, 1, 2]);
        let d = f.d(&h3());
        assert_eq!(d.degree(), 4);
        assert!(d.is_zero_within(0.0));
    }

    #[test]
    fn eval_matches_coefficients() {
        let f = KForm::<Q>::basis(3, &[0, 2]).scale(&Q::from_int(5));
        let v = |a: i64, b: i64, c: i64| vec![Q::from_int(a), Q::from_int(b), Q::from_int(c)];
        // (e1∧e3)(x, y) = x1 y3 - x3 y1
        assert_eq!(f.eval(&[v(1, 0, 2), v(3, 1, 4)]), Q::from_int(5 * (4 - 6)));
    }

    #[test]
    fn interior_product() {
        let f = KForm::<Q>::basis(3, &[0, 1]);
        let i2 = f.interior(&[Q::from_int(0), Q::from_int(1), Q::from_int(0)]);
        assert_eq!(i2, KForm::basis(3, &[0]).scale(&Q::from_int(-1)));
    }

    #[test]
    fn tuples_count() {
        assert_eq!(increasing_tuples(5, 2).len(), 10);
        assert_eq!(increasing_tuples(4, 0), vec![Vec::<usize>::new()]);
        assert!(increasing_tuples(2, 3).is_empty());
    }
}
