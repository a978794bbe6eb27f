//! Metric duality, induced inner products and the codifferential on
//! left-invariant forms.

use crate::error::{Error, Result};
use crate::exterior::algebra::LieAlgebra;
use crate::exterior::forms::{increasing_tuples, KForm};
use crate::exterior::tensor::SymTensor;
use crate::linalg::{dot, Matrix};
use crate::scalar::Scalar;

/// A positive definite inner product together with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric<S> {
    g: SymTensor<S>,
    inv: Matrix<S>,
}

impl<S: Scalar> Metric<S> {
    pub fn new(g: SymTensor<S>) -> Result<Self> {
        if !g.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let inv = g.matrix().inverse()?;
        Ok(Self { g, inv })
    }

    pub fn tensor(&self) -> &SymTensor<S> {
        &self.g
    }

    pub fn matrix(&self) -> &Matrix<S> {
        self.g.matrix()
    }

    pub fn inverse(&self) -> &Matrix<S> {
        &self.inv
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn pair(&self, x: &[S], y: &[S]) -> S {
        self.g.apply(x, y)
    }

    /// `θ^♯` with `g(θ^♯, x) = θ(x)`.
    pub fn sharp(&self, alpha: &[S]) -> Vec<S> {
        self.inv.mul_vec(alpha)
    }

    pub fn flat(&self, v: &[S]) -> Vec<S> {
        self.g.matrix().mul_vec(v)
    }

    /// Pointwise norm squared of a 1-form.
    pub fn covector_norm_sq(&self, alpha: &[S]) -> S {
        dot(alpha, &self.sharp(alpha))
    }

    /// Induced inner product of k-forms:
    /// `⟨α, β⟩ = Σ_{I,J} α_I β_J det(g^{-1}[I, J])`.
    pub fn form_inner(&self, a: &KForm<S>, b: &KForm<S>) -> S {
        assert_eq!(a.degree(), b.degree());
        let k = a.degree();
        let mut total = S::zero();
        for (i, x) in a.terms() {
            for (j, y) in b.terms() {
                let minor = Matrix::from_fn(k, k, |r, c| self.inv[(i[r], j[c])].clone());
                let det = if k == 0 { S::one() } else { minor.determinant() };
                total = total + x.clone() * y.clone() * det;
            }
        }
        total
    }

    pub fn form_norm_sq(&self, a: &KForm<S>) -> S {
        self.form_inner(a, a)
    }

    /// `⟨A, B⟩ = g^{ac} g^{bd} A_{ab} B_{cd}` for (0,2)-tensors.
    pub fn tensor_inner(&self, a: &Matrix<S>, b: &Matrix<S>) -> S {
        let left = self.inv.mul(a).mul(&self.inv);
        let n = self.dim();
        let mut total = S::zero();
        for i in 0..n {
            for j in 0..n {
                total = total + left[(i, j)].clone() * b[(i, j)].clone();
            }
        }
        total
    }

    pub fn tensor_norm_sq(&self, a: &Matrix<S>) -> S {
        self.tensor_inner(a, a)
    }

    /// `tr_g T = g^{ab} T_{ab}`.
    pub fn trace(&self, t: &Matrix<S>) -> S {
        self.inv.mul(t).trace()
    }

    pub fn scaled(&self, c: &S) -> Result<Self> {
        Self::new(self.g.scale(c))
    }

    pub fn convert<T: Scalar>(&self) -> Metric<T> {
        Metric {
            g: self.g.convert(),
            inv: self.inv.map(crate::scalar::convert),
        }
    }
}

impl Metric<f64> {
    /// Gram–Schmidt orthonormal frame (columns are frame vectors in the
    /// algebra basis).
    pub fn orthonormal_frame(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut frame: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = crate::exterior::algebra::unit::<f64>(n, i);
            for f in &frame {
                let p = self.pair(&v, f);
                for (a, b) in v.iter_mut().zip(f) {
                    *a -= p * b;
                }
            }
            let norm = self.pair(&v, &v).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            frame.push(v);
        }
        frame
    }
}

/// Christoffel coefficients of the Levi-Civita connection of a left-invariant
/// metric, from the Koszul formula for invariant fields,
/// `2g(∇_x y, z) = g([x,y],z) - g([y,z],x) + g([z,x],y)`.
///
/// Returned flat: `gamma[(i * n + j) * n + k]` is the `e_k` component of `∇_{e_i} e_j`.
pub fn levi_civita_coefficients<S: Scalar>(alg: &LieAlgebra<S>, g: &Metric<S>) -> Vec<S> {
    let n = alg.dim();
    let gm = g.matrix();
    // bracket_g[i][j][l] = g([e_i, e_j], e_l)
    let mut bg = vec![S::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            let br = alg.bracket_basis(i, j);
            for l in 0..n {
                bg[(i * n + j) * n + l] = dot(br, gm.row(l));
            }
        }
    }
    let half = S::ratio(1, 2);
    let inv = g.inverse();
    let mut gamma = vec![S::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            let lower: Vec<S> = (0..n)
                .map(|l| {
                    (bg[(i * n + j) * n + l].clone() - bg[(j * n + l) * n + i].clone()
                        + bg[(l * n + i) * n + j].clone())
                        * half.clone()
                })
                .collect();
            let upper = inv.mul_vec(&lower);
            gamma[(i * n + j) * n..(i * n + j) * n + n].clone_from_slice(&upper);
        }
    }
    gamma
}

/// Covariant derivative `∇_{e_b} α` of an invariant form for connection
/// coefficients in the layout of [`levi_civita_coefficients`].
pub fn covariant_derivative_form<S: Scalar>(gamma: &[S], b: usize, alpha: &KForm<S>) -> KForm<S> {
    let n = alpha.dim();
    let k = alpha.degree();
    let mut out = KForm::zero(n, k);
    if k == 0 {
        return out;
    }
    for tuple in increasing_tuples(n, k) {
        let mut acc = S::zero();
        for pos in 0..k {
            let j = tuple[pos];
            for m in 0..n {
                let c = &gamma[(b * n + j) * n + m];
                if c.is_zero() {
                    continue;
                }
                let mut idx = tuple.clone();
                idx[pos] = m;
                let v = alpha.eval_basis(&idx);
                if !v.is_zero() {
                    acc = acc - c.clone() * v;
                }
            }
        }
        out.set(&tuple, acc);
    }
    out
}

/// Result of [`codifferential`]; `unimodular == false` means the output is the
/// geometric codifferential but it is not the formal adjoint of `d` on
/// invariant forms.
#[derive(Debug, Clone, PartialEq)]
pub struct Codifferential<S> {
    pub form: KForm<S>,
    pub unimodular: bool,
}

/// `d*α = -Σ_{a,b} g^{ab} ι_{e_a} ∇_{e_b} α` with the Levi-Civita connection.
pub fn codifferential<S: Scalar>(alg: &LieAlgebra<S>, g: &Metric<S>, alpha: &KForm<S>) -> Codifferential<S> {
    let n = alg.dim();
    let unimodular = alg.is_unimodular();
    if alpha.degree() == 0 {
        return Codifferential {
            form: KForm::zero(n, 0),
            unimodular,
        };
    }
    let gamma = levi_civita_coefficients(alg, g);
    let inv = g.inverse();
    let mut out = KForm::zero(n, alpha.degree() - 1);
    for b in 0..n {
        let nabla = covariant_derivative_form(&gamma, b, alpha);
        if nabla.is_zero_within(0.0) {
            continue;
        }
        for a in 0..n {
            let w = &inv[(a, b)];
            if w.is_zero() {
                continue;
            }
            let e_a = crate::exterior::algebra::unit(n, a);
            out = out.sub(&nabla.interior(&e_a).scale(w));
        }
    }
    Codifferential { form: out, unimodular }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::algebra::BracketEntry;
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(p: i64, d: i64) -> Q {
        Q::ratio(p, d)
    }

    #[test]
    fn sharp_identity_metric() {
        let g = Metric::new(SymTensor::<Q>::identity(3)).unwrap();
        let theta = vec![q(1, 1), q(0, 1), q(0, 1)];
        assert_eq!(g.sharp(&theta), theta);
        assert_eq!(g.covector_norm_sq(&theta), q(1, 1));
    }

    #[test]
    fn sharp_diagonal_metric() {
        let g = Metric::new(SymTensor::from_matrix_unchecked(Matrix::diagonal(&[
            q(4, 1),
            q(1, 1),
            q(1, 1),
        ])))
        .unwrap();
        let theta = vec![q(1, 1), q(0, 1), q(0, 1)];
        assert_eq!(g.sharp(&theta), vec![q(1, 4), q(0, 1), q(0, 1)]);
        assert_eq!(g.covector_norm_sq(&theta), q(1, 4));
    }

    #[test]
    fn non_positive_metric_rejected() {
        let m = Matrix::diagonal(&[q(1, 1), q(-1, 1)]);
        assert!(matches!(
            Metric::new(SymTensor::from_matrix_unchecked(m)),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn abelian_codifferential_vanishes() {
        let alg = LieAlgebra::<Q>::abelian(4);
        let g = Metric::new(SymTensor::identity(4)).unwrap();
        let f = KForm::basis(4, &[0, 2]).add(&KForm::basis(4, &[1, 3]));
        let cd = codifferential(&alg, &g, &f);
        assert!(cd.form.is_zero_within(0.0));
        assert!(cd.unimodular);
    }

    #[test]
    fn heisenberg_codifferential_of_e12() {
        // brute-force adjointness over basis pairings: ⟨d e^k, e^{12}⟩ = ⟨e^k, d* e^{12}⟩;
        // only d e^3 = -e^{12} pairs nontrivially, so d* e^{12} = -e^3.
        let alg = LieAlgebra::from_brackets(3, &[BracketEntry::new(0, 1, 2, q(1, 1))]).unwrap();
        let g = Metric::new(SymTensor::identity(3)).unwrap();
        let beta = KForm::basis(3, &[0, 1]);
        let cd = codifferential(&alg, &g, &beta).form;
        for k in 0..3 {
            let ek = KForm::basis(3, &[k]);
            assert_eq!(g.form_inner(&ek.d(&alg), &beta), g.form_inner(&ek, &cd));
        }
        assert_eq!(cd, KForm::basis(3, &[2]).scale(&q(-1, 1)));
    }

    #[test]
    fn form_inner_of_two_forms() {
        let g = Metric::new(SymTensor::from_matrix_unchecked(Matrix::diagonal(&[
            q(2, 1),
            q(3, 1),
            q(1, 1),
        ])))
        .unwrap();
        // |e^1∧e^2|² = g^{11} g^{22} = 1/6
        assert_eq!(g.form_norm_sq(&KForm::basis(3, &[0, 1])), q(1, 6));
    }

    #[test]
    fn gram_schmidt_frame_is_orthonormal() {
        let g = Metric::new(SymTensor::from_matrix_unchecked(
            Matrix::from_rows(vec![vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap(),
        ))
        .unwrap();
        let f = g.orthonormal_frame();
        assert!((g.pair(&f[0], &f[0]) - 1.0).abs() < 1e-14);
        assert!((g.pair(&f[1], &f[1]) - 1.0).abs() < 1e-14);
        assert!(g.pair(&f[0], &f[1]).abs() < 1e-14);
    }
}
