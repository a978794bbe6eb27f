//! Levi-Civita, Weyl and Chern connections of left-invariant Hermitian
//! structures, with curvature and Ricci contractions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{levi_civita_coefficients, KForm, LieAlgebra, Metric, SymTensor};
use crate::hermitian::{ConformalClass, HermitianStructure, LeeData};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, FLOAT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConnectionKind {
    LeviCivita,
    Weyl,
    Chern,
}

/// Connection on invariant fields, `∇_{e_i} e_j = Σ_k Γ^k_{ij} e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantConnection<S> {
    kind: ConnectionKind,
    dim: usize,
    gamma: Vec<S>,
}

impl<S: Scalar> InvariantConnection<S> {
    /// `gamma[(i * dim + j) * dim + k] = Γ^k_{ij}`.
    pub fn from_coefficients(kind: ConnectionKind, dim: usize, gamma: Vec<S>) -> Self {
        assert_eq!(gamma.len(), dim * dim * dim);
        Self { kind, dim, gamma }
    }

    pub fn kind(&self) -> ConnectionKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coefficients(&self) -> &[S] {
        &self.gamma
    }

    /// `Γ^k_{ij}`.
    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &S {
        &self.gamma[(i * self.dim + j) * self.dim + k]
    }

    /// Matrix of `y ↦ ∇_{e_i} y`.
    pub fn matrix(&self, i: usize) -> Matrix<S> {
        Matrix::from_fn(self.dim, self.dim, |k, j| self.gamma(i, j, k).clone())
    }

    /// Matrix of `y ↦ ∇_x y`.
    pub fn matrix_along(&self, x: &[S]) -> Matrix<S> {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            m = m.add(&self.matrix(i).scale(xi));
        }
        m
    }

    pub fn nabla(&self, x: &[S], y: &[S]) -> Vec<S> {
        self.matrix_along(x).mul_vec(y)
    }

    /// `T(e_i, e_j) = ∇_{e_i} e_j - ∇_{e_j} e_i - [e_i, e_j]`.
    pub fn torsion(&self, alg: &LieAlgebra<S>, i: usize, j: usize) -> Vec<S> {
        (0..self.dim)
            .map(|k| self.gamma(i, j, k).clone() - self.gamma(j, i, k).clone() - alg.c(i, j, k).clone())
            .collect()
    }

    pub fn torsion_residual(&self, alg: &LieAlgebra<S>) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for v in self.torsion(alg, i, j) {
                    worst = worst.max(v.to_f64_lossy().abs());
                }
            }
        }
        worst
    }

    /// `(∇_{e_i} B)(e_j, e_k)` for a bilinear form with matrix `b`.
    pub fn bilinear_derivative(&self, i: usize, b: &Matrix<S>) -> Matrix<S> {
        let n = self.matrix(i);
        n.transpose().mul(b).add(&b.mul(&n)).scale(&-S::one())
    }

    /// `∇_{e_i} A = [N_i, A]` for an endomorphism `A`.
    pub fn endomorphism_derivative(&self, i: usize, a: &Matrix<S>) -> Matrix<S> {
        let n = self.matrix(i);
        n.mul(a).sub(&a.mul(&n))
    }

    /// Largest component of `∇g - θ⊗g` (pass a zero `θ` for metric connections).
    pub fn metric_defect(&self, g: &Metric<S>, theta: &[S]) -> f64 {
        let gm = g.matrix();
        (0..self.dim)
            .map(|i| self.bilinear_derivative(i, gm).sub(&gm.scale(&theta[i])).max_abs())
            .fold(0.0, f64::max)
    }

    /// Largest component of `∇A`.
    pub fn parallel_defect(&self, a: &Matrix<S>) -> f64 {
        (0..self.dim)
            .map(|i| self.endomorphism_derivative(i, a).max_abs())
            .fold(0.0, f64::max)
    }

    /// `R(e_i, e_j) = [N_i, N_j] - N_{[e_i, e_j]}`, indexed `i * dim + j`.
    pub fn curvature(&self, alg: &LieAlgebra<S>) -> Curvature<S> {
        let n = self.dim;
        let mats: Vec<Matrix<S>> = (0..n).map(|i| self.matrix(i)).collect();
        let mut r = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut m = mats[i].mul(&mats[j]).sub(&mats[j].mul(&mats[i]));
                for (k, c) in alg.bracket_basis(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        m = m.sub(&mats[k].scale(c));
                    }
                }
                r.push(m);
            }
        }
        Curvature { dim: n, r }
    }

    pub fn max_difference(&self, other: &Self) -> f64 {
        self.gamma
            .iter()
            .zip(&other.gamma)
            .map(|(a, b)| (a.clone() - b.clone()).to_f64_lossy().abs())
            .fold(0.0, f64::max)
    }

    pub fn convert<T: Scalar>(&self) -> InvariantConnection<T> {
        InvariantConnection {
            kind: self.kind,
            dim: self.dim,
            gamma: self.gamma.iter().map(crate::scalar::convert).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curvature<S> {
    dim: usize,
    r: Vec<Matrix<S>>,
}

impl<S: Scalar> Curvature<S> {
    /// Matrix of `z ↦ R(e_i, e_j) z`.
    pub fn operator(&self, i: usize, j: usize) -> &Matrix<S> {
        &self.r[i * self.dim + j]
    }

    /// `Ric(x, y) = tr(z ↦ R(z, x) y)`.
    pub fn ricci(&self) -> Matrix<S> {
        let n = self.dim;
        Matrix::from_fn(n, n, |a, b| {
            let mut acc = S::zero();
            for c in 0..n {
                acc = acc + self.operator(c, a)[(c, b)].clone();
            }
            acc
        })
    }

    /// Largest component of the cyclic sum `R(x,y)z + R(y,z)x + R(z,x)y`.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for k in 0..n {
                        let v = self.operator(a, b)[(k, c)].clone()
                            + self.operator(b, c)[(k, a)].clone()
                            + self.operator(c, a)[(k, b)].clone();
                        worst = worst.max(v.to_f64_lossy().abs());
                    }
                }
            }
        }
        worst
    }

    pub fn is_flat(&self) -> bool {
        self.r.iter().all(|m| m.is_zero_within(FLOAT_TOL))
    }
}

pub fn levi_civita_of<S: Scalar>(alg: &LieAlgebra<S>, g: &Metric<S>) -> InvariantConnection<S> {
    InvariantConnection::from_coefficients(ConnectionKind::LeviCivita, alg.dim(), levi_civita_coefficients(alg, g))
}

pub fn levi_civita<S: Scalar>(h: &HermitianStructure<S>) -> InvariantConnection<S> {
    levi_civita_of(h.alg(), h.metric())
}

/// `∇^W_x y = ∇_x y - ½θ(x)y - ½θ(y)x + ½g(x,y)θ^♯`.
pub fn weyl_connection<S: Scalar>(h: &HermitianStructure<S>, lee: &LeeData<S>) -> Result<InvariantConnection<S>> {
    if !lee.is_lck() {
        return Err(Error::NotLcK);
    }
    let lc = levi_civita(h);
    let n = h.dim();
    let theta = lee.theta_vec();
    let sharp = h.metric().sharp(&theta);
    let gm = h.metric().matrix();
    let half = S::ratio(1, 2);
    let mut gamma = lc.coefficients().to_vec();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = gm[(i, j)].clone() * sharp[k].clone();
                if j == k {
                    v = v - theta[i].clone();
                }
                if i == k {
                    v = v - theta[j].clone();
                }
                let at = (i * n + j) * n + k;
                gamma[at] = gamma[at].clone() + v * half.clone();
            }
        }
    }
    Ok(InvariantConnection::from_coefficients(ConnectionKind::Weyl, n, gamma))
}

/// The Chern connection, `g(∇_x y, z) = g(∇^{LC}_x y, z) - ½dω(Jx, y, z)`:
/// the unique Hermitian connection (`∇g = 0`, `∇J = 0`) whose torsion has no
/// (1,1) part.
pub fn chern_connection<S: Scalar>(h: &HermitianStructure<S>) -> InvariantConnection<S> {
    let alg = h.alg();
    let n = h.dim();
    let g = h.metric();
    let lc = levi_civita(h);
    let domega = h.omega().d(alg);
    let jm = h.j().matrix();
    let half = S::ratio(1, 2);
    let gm = g.matrix();
    let mut gamma = Vec::with_capacity(n * n * n);
    for i in 0..n {
        let ji = jm.column(i);
        for j in 0..n {
            let lower: Vec<S> = (0..n)
                .map(|l| {
                    let mut acc: S = (0..n)
                        .map(|k| lc.gamma(i, j, k).clone() * gm[(k, l)].clone())
                        .fold(S::zero(), |a, b| a + b);
                    for (m, jm_i) in ji.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                        acc = acc - half.clone() * jm_i.clone() * domega.eval_basis(&[m, j, l]);
                    }
                    acc
                })
                .collect();
            gamma.extend(g.sharp(&lower));
        }
    }
    InvariantConnection::from_coefficients(ConnectionKind::Chern, n, gamma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RicciData<S> {
    /// `Ric(x, y) = tr(z ↦ R(z, x) y)` of the connection.
    pub ricci: Matrix<S>,
    /// `Ric(J·, ·)` for Weyl, the Chern–Ricci form for Chern.
    pub ricci_form: Option<KForm<S>>,
    /// `g`-trace of `ricci`.
    pub scalar: S,
}

impl<S: Scalar> RicciData<S> {
    pub fn ricci_sym(&self) -> SymTensor<S> {
        let half = S::ratio(1, 2);
        SymTensor::from_matrix_unchecked(self.ricci.add(&self.ricci.transpose()).scale(&half))
    }
}

pub fn curvature_ricci<S: Scalar>(h: &HermitianStructure<S>, conn: &InvariantConnection<S>) -> RicciData<S> {
    let curv = conn.curvature(h.alg());
    let ricci = curv.ricci();
    let scalar = h.metric().trace(&ricci);
    let ricci_form = match conn.kind() {
        ConnectionKind::LeviCivita => None,
        ConnectionKind::Weyl => Some(KForm::from_matrix(&h.j().matrix().transpose().mul(&ricci))),
        ConnectionKind::Chern => Some(chern_ricci_from_curvature(h, &curv)),
    };
    RicciData {
        ricci,
        ricci_form,
        scalar,
    }
}

/// `ρ(x, y) = ½ tr(J ∘ R^{Ch}(x, y))`, normalized so that on Kähler
/// structures `ρ(x, y) = Ric(Jx, y)`.
fn chern_ricci_from_curvature<S: Scalar>(h: &HermitianStructure<S>, curv: &Curvature<S>) -> KForm<S> {
    let n = h.dim();
    let jm = h.j().matrix();
    let kappa = S::ratio(1, 2);
    let m = Matrix::from_fn(n, n, |a, b| jm.mul(curv.operator(a, b)).trace() * kappa.clone());
    KForm::from_matrix(&m)
}

/// Chern–Ricci form `Ric(ω)` as the trace form of the Chern curvature.
pub fn chern_ricci_form<S: Scalar>(h: &HermitianStructure<S>) -> RicciData<S> {
    curvature_ricci(h, &chern_connection(h))
}

/// `(∇θ)(x, y) = g(∇_x θ^♯, y)` and its `J`-invariant part
/// `½(∇θ + ∇θ(J·, J·))`.
pub fn nabla_theta_split<S: Scalar>(
    h: &HermitianStructure<S>,
    lee: &LeeData<S>,
    lc: &InvariantConnection<S>,
) -> Result<(SymTensor<S>, SymTensor<S>)> {
    if lc.kind() != ConnectionKind::LeviCivita {
        return Err(Error::Precondition(
            "nabla_theta_split needs the Levi-Civita connection".into(),
        ));
    }
    let n = h.dim();
    let sharp = h.metric().sharp(&lee.theta_vec());
    let gm = h.metric().matrix();
    // row a: g(∇_{e_a} θ^♯, ·)
    let rows: Vec<Vec<S>> = (0..n).map(|a| gm.mul_vec(&lc.matrix(a).mul_vec(&sharp))).collect();
    let full = SymTensor::new(Matrix::from_rows(rows)?)?;
    let jm = h.j().matrix();
    let half = S::ratio(1, 2);
    let jj = jm.transpose().mul(full.matrix()).mul(jm);
    let part = SymTensor::from_matrix_unchecked(full.matrix().add(&jj).scale(&half));
    Ok((full, part))
}

/// `∇^{LC}θ = 0`; `None` unless the structure is strictly lcK.
pub fn vaisman_check<S: Scalar>(h: &HermitianStructure<S>, lee: &LeeData<S>) -> Option<bool> {
    if lee.conformal_class != ConformalClass::StrictLcK {
        return None;
    }
    let lc = levi_civita(h);
    let sharp = h.metric().sharp(&lee.theta_vec());
    Some((0..h.dim()).all(|a| lc.matrix(a).mul_vec(&sharp).iter().all(|v| v.is_negligible(FLOAT_TOL))))
}
