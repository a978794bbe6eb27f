//! Complex structures, Hermitian metrics and Lee forms on Lie algebras.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{codifferential, unit, Endomorphism, KForm, LieAlgebra, Metric, SymTensor};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, FLOAT_TOL};

/// Relative residual above which a float-mode Lee system is declared
/// inconsistent.
pub const LEE_RELATIVE_TOL: f64 = 1e-8;

/// An endomorphism with `J² = -Id`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure<S> {
    j: Endomorphism<S>,
}

impl<S: Scalar> ComplexStructure<S> {
    /// Checks `J² = -Id`; integrability is checked separately against an algebra.
    pub fn new(j: Endomorphism<S>) -> Result<Self> {
        let n = j.dim();
        let sq = j.compose(&j).matrix().add(&Matrix::identity(n));
        if !sq.is_zero_within(FLOAT_TOL) {
            return Err(Error::AlmostComplex { residual: sq.max_abs() });
        }
        Ok(Self { j })
    }

    pub fn from_matrix(m: Matrix<S>) -> Result<Self> {
        Self::new(Endomorphism::new(m)?)
    }

    /// `J e_{2k} = e_{2k+1}` on `ℝ^{2m}`.
    pub fn standard(dim: usize) -> Result<Self> {
        if !dim.is_multiple_of(2) {
            return Err(Error::Precondition(format!("dimension {dim} is odd")));
        }
        let mut m = Matrix::zeros(dim, dim);
        for k in 0..dim / 2 {
            m[(2 * k + 1, 2 * k)] = S::one();
            m[(2 * k, 2 * k + 1)] = -S::one();
        }
        Self::from_matrix(m)
    }

    pub fn endomorphism(&self) -> &Endomorphism<S> {
        &self.j
    }

    pub fn matrix(&self) -> &Matrix<S> {
        self.j.matrix()
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        self.j.apply(v)
    }

    /// `(Jα)(x) = -α(Jx)`.
    pub fn on_covector(&self, alpha: &[S]) -> Vec<S> {
        self.j.act_on_covector(alpha)
    }

    pub fn convert<T: Scalar>(&self) -> ComplexStructure<T> {
        ComplexStructure { j: self.j.convert() }
    }
}

/// Largest component of `N(x,y) = [Jx,Jy] - [x,y] - J[Jx,y] - J[x,Jy]` over
/// basis pairs; zero iff `J` is integrable.
pub fn nijenhuis_check<S: Scalar>(alg: &LieAlgebra<S>, j: &ComplexStructure<S>) -> S {
    let n = alg.dim();
    let mut worst = S::zero();
    for a in 0..n {
        for b in a + 1..n {
            let x = unit::<S>(n, a);
            let y = unit::<S>(n, b);
            let jx = j.apply(&x);
            let jy = j.apply(&y);
            let t1 = alg.bracket(&jx, &jy);
            let t2 = alg.bracket_basis(a, b);
            let t3 = j.apply(&alg.bracket(&jx, &y));
            let t4 = j.apply(&alg.bracket(&x, &jy));
            for k in 0..n {
                let v = (t1[k].clone() - t2[k].clone() - t3[k].clone() - t4[k].clone()).abs();
                if v > worst {
                    worst = v;
                }
            }
        }
    }
    worst
}

/// `ω(x, y) = g(Jx, y)`.
pub fn fundamental_form<S: Scalar>(j: &ComplexStructure<S>, g: &SymTensor<S>) -> Result<KForm<S>> {
    let jm = j.matrix();
    let gm = g.matrix();
    let defect = jm.transpose().mul(gm).mul(jm).sub(gm);
    if !defect.is_zero_within(FLOAT_TOL) {
        return Err(Error::Incompatible {
            residual: defect.max_abs(),
        });
    }
    Ok(KForm::from_matrix(&jm.transpose().mul(gm)))
}

/// Integrable complex structure with a compatible positive definite metric on a
/// Lie algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianStructure<S> {
    alg: LieAlgebra<S>,
    j: ComplexStructure<S>,
    g: Metric<S>,
    omega: KForm<S>,
}

impl<S: Scalar> HermitianStructure<S> {
    /// Validates, in order: Jacobi, dimensions, `J² = -Id`, integrability,
    /// positive definiteness and compatibility.
    pub fn new(alg: LieAlgebra<S>, j: Matrix<S>, g: Matrix<S>) -> Result<Self> {
        alg.ensure_jacobi()?;
        let n = alg.dim();
        for m in [&j, &g] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: m.rows().max(m.cols()),
                });
            }
        }
        if !n.is_multiple_of(2) {
            return Err(Error::Precondition(format!(
                "Hermitian structures need even dimension, got {n}"
            )));
        }
        let j = ComplexStructure::from_matrix(j)?;
        let nij = nijenhuis_check(&alg, &j);
        if !nij.is_negligible(FLOAT_TOL) {
            return Err(Error::NotIntegrable {
                residual: nij.to_f64_lossy(),
            });
        }
        let g = Metric::new(SymTensor::new(g).map_err(|_| Error::NotPositiveDefinite)?)?;
        let omega = fundamental_form(&j, g.tensor())?;
        Ok(Self { alg, j, g, omega })
    }

    pub fn alg(&self) -> &LieAlgebra<S> {
        &self.alg
    }

    pub fn j(&self) -> &ComplexStructure<S> {
        &self.j
    }

    pub fn metric(&self) -> &Metric<S> {
        &self.g
    }

    pub fn omega(&self) -> &KForm<S> {
        &self.omega
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    /// Complex dimension.
    pub fn n(&self) -> usize {
        self.alg.dim() / 2
    }

    /// Same algebra and `J`, metric multiplied by `c > 0`.
    pub fn scaled(&self, c: &S) -> Result<Self> {
        let g = self.g.scaled(c)?;
        let omega = self.omega.scale(c);
        Ok(Self {
            alg: self.alg.clone(),
            j: self.j.clone(),
            g,
            omega,
        })
    }

    pub fn convert<T: Scalar>(&self) -> HermitianStructure<T> {
        HermitianStructure {
            alg: self.alg.convert(),
            j: self.j.convert(),
            g: self.g.convert(),
            omega: self.omega.convert(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConformalClass {
    Kahler,
    GloballyConformallyKahler,
    StrictLcK,
    NotLcK,
}

impl std::fmt::Display for ConformalClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConformalClass::Kahler => "Kahler",
            ConformalClass::GloballyConformallyKahler => "GloballyConformallyKahler",
            ConformalClass::StrictLcK => "StrictLcK",
            ConformalClass::NotLcK => "NotLcK",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeeData<S> {
    pub theta: KForm<S>,
    pub j_theta: KForm<S>,
    pub dj_theta: KForm<S>,
    pub norm_sq: S,
    pub conformal_class: ConformalClass,
    pub gauduchon: bool,
    /// `d*θ`.
    pub codifferential: S,
    /// Max residual of `dω - θ∧ω`.
    pub residual: f64,
}

impl<S: Scalar> LeeData<S> {
    pub fn theta_vec(&self) -> Vec<S> {
        self.theta.to_vector()
    }

    pub fn j_theta_vec(&self) -> Vec<S> {
        self.j_theta.to_vector()
    }

    pub fn is_lck(&self) -> bool {
        !matches!(self.conformal_class, ConformalClass::NotLcK)
    }
}

/// Least-squares solution of `θ∧ω = dω`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeeSolution<S> {
    pub theta: Vec<S>,
    pub residual: f64,
    pub consistent: bool,
}

/// Solve `θ∧ω = dω` for a 1-form `θ` through the normal equations. The
/// system is consistent when the residual vanishes (exactly for rationals,
/// below `1e-8·‖dω‖` for floats).
pub fn solve_lee_system<S: Scalar>(omega: &KForm<S>, domega: &KForm<S>) -> Result<LeeSolution<S>> {
    let n = omega.dim();
    if n < 4 {
        return Err(Error::Precondition(
            "Lee form extraction needs real dimension at least 4".into(),
        ));
    }
    let rows = crate::exterior::increasing_tuples(n, 3);
    let cols: Vec<KForm<S>> = (0..n)
        .map(|i| KForm::basis(n, &[i]).wedge(omega))
        .collect::<Result<_>>()?;
    let a = Matrix::from_fn(rows.len(), n, |r, c| cols[c].get(&rows[r]));
    let b: Vec<S> = rows.iter().map(|r| domega.get(r)).collect();
    let at = a.transpose();
    let theta = at.mul(&a).solve_vec(&at.mul_vec(&b))?;
    let fitted = a.mul_vec(&theta);
    let mut residual = 0.0f64;
    let mut exact = true;
    for (x, y) in fitted.iter().zip(&b) {
        let d = x.clone() - y.clone();
        residual = residual.max(d.to_f64_lossy().abs());
        if !d.is_zero() {
            exact = false;
        }
    }
    let consistent = match S::MODE {
        crate::scalar::ScalarMode::Rational => exact,
        crate::scalar::ScalarMode::Float => residual <= LEE_RELATIVE_TOL * domega.max_abs().max(1.0),
    };
    Ok(LeeSolution {
        theta,
        residual,
        consistent,
    })
}

/// Solve for the Lee form and classify the structure.
///
/// A `NotLcK` structure still returns data (with the least-squares `θ`) so that
/// reports can show the residual; callers needing a genuine Lee form use
/// [`require_lck`].
pub fn extract_lee_form<S: Scalar>(h: &HermitianStructure<S>) -> Result<LeeData<S>> {
    let alg = h.alg();
    let omega = h.omega();
    let domega = omega.d(alg);
    let sol = solve_lee_system(omega, &domega)?;
    let theta = KForm::from_vector(&sol.theta);
    let closed = theta.d(alg).is_zero_within(FLOAT_TOL);
    let j_theta = KForm::from_vector(&h.j().on_covector(&sol.theta));
    let dj_theta = j_theta.d(alg);
    let norm_sq = h.metric().covector_norm_sq(&sol.theta);
    let codiff = codifferential(alg, h.metric(), &theta).form.scalar_value();
    let conformal_class = if !sol.consistent || !closed {
        ConformalClass::NotLcK
    } else if theta.is_zero_within(FLOAT_TOL) {
        ConformalClass::Kahler
    } else {
        // an invariant exact 1-form is d of a constant, hence zero
        ConformalClass::StrictLcK
    };
    Ok(LeeData {
        theta,
        j_theta,
        dj_theta,
        norm_sq,
        conformal_class,
        gauduchon: codiff.is_negligible(FLOAT_TOL),
        codifferential: codiff,
        residual: sol.residual,
    })
}

pub fn require_lck<S: Scalar>(lee: &LeeData<S>) -> Result<()> {
    if lee.is_lck() {
        Ok(())
    } else {
        Err(Error::NotLcK)
    }
}

/// Tests `|θ|²ω = θ∧Jθ - dJθ`. `None` when the structure is not strictly lcK.
pub fn potential_form_check<S: Scalar>(h: &HermitianStructure<S>, lee: &LeeData<S>) -> Option<bool> {
    if lee.conformal_class != ConformalClass::StrictLcK {
        return None;
    }
    let lhs = h.omega().scale(&lee.norm_sq);
    let rhs = lee.theta.wedge(&lee.j_theta).ok()?.sub(&lee.dj_theta);
    Some(lhs.sub(&rhs).is_zero_within(FLOAT_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::BracketEntry;
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(p: i64) -> Q {
        Q::from_int(p)
    }

    // basis T, X, Y, Z with [X, Y] = Z; J T = Z, J X = Y
    fn kodaira_like(g: Matrix<Q>) -> Result<HermitianStructure<Q>> {
        let alg = LieAlgebra::from_brackets(4, &[BracketEntry::new(1, 2, 3, q(1))]).unwrap();
        let mut j = Matrix::zeros(4, 4);
        j[(3, 0)] = q(1);
        j[(0, 3)] = q(-1);
        j[(2, 1)] = q(1);
        j[(1, 2)] = q(-1);
        HermitianStructure::new(alg, j, g)
    }

    #[test]
    fn fundamental_form_on_plane() {
        let j = ComplexStructure::<Q>::standard(2).unwrap();
        let w = fundamental_form(&j, &SymTensor::identity(2)).unwrap();
        // ω(e1, e2) = g(J e1, e2) = g(e2, e2) = 1
        assert_eq!(w, KForm::basis(2, &[0, 1]));
    }

    #[test]
    fn omega_recovers_metric() {
        let h = kodaira_like(Matrix::identity(4)).unwrap();
        let w = h.omega().to_matrix();
        let jm = h.j().matrix();
        // ω(x, Jy) = g(Jx, Jy) = g(x, y)
        assert_eq!(w.mul(jm), Matrix::identity(4));
    }

    #[test]
    fn almost_complex_failure_is_named() {
        let alg = LieAlgebra::<Q>::abelian(4);
        let err = HermitianStructure::new(alg, Matrix::identity(4), Matrix::identity(4)).unwrap_err();
        assert!(err.to_string().starts_with("almost-complex"));
    }

    #[test]
    fn kodaira_lee_form() {
        let h = kodaira_like(Matrix::identity(4)).unwrap();
        let lee = extract_lee_form(&h).unwrap();
        assert_eq!(lee.conformal_class, ConformalClass::StrictLcK);
        assert_eq!(lee.theta, KForm::basis(4, &[0]));
        assert_eq!(lee.j_theta, KForm::basis(4, &[3]));
        assert!(lee.gauduchon);
        assert_eq!(potential_form_check(&h, &lee), Some(true));
    }

    #[test]
    fn lee_form_invariant_under_constant_rescale() {
        let h = kodaira_like(Matrix::identity(4)).unwrap();
        let a = extract_lee_form(&h).unwrap();
        let b = extract_lee_form(&h.scaled(&Q::ratio(7, 3)).unwrap()).unwrap();
        assert_eq!(a.theta, b.theta);
    }

    #[test]
    fn abelian_is_kahler() {
        let alg = LieAlgebra::<Q>::abelian(4);
        let j = ComplexStructure::<Q>::standard(4).unwrap().matrix().clone();
        let h = HermitianStructure::new(alg, j, Matrix::identity(4)).unwrap();
        let lee = extract_lee_form(&h).unwrap();
        assert_eq!(lee.conformal_class, ConformalClass::Kahler);
        assert_eq!(potential_form_check(&h, &lee), None);
    }

    #[test]
    fn dimension_four_system_always_solvable() {
        // compatible metric with g(X, Z) = -g(Y, T) ≠ 0: θ∧ω = dω still has a
        // closed solution, so the structure stays lcK
        let mut g = Matrix::identity(4);
        g[(1, 3)] = Q::ratio(1, 3);
        g[(3, 1)] = Q::ratio(1, 3);
        g[(2, 0)] = Q::ratio(-1, 3);
        g[(0, 2)] = Q::ratio(-1, 3);
        let h = kodaira_like(g).unwrap();
        let lee = extract_lee_form(&h).unwrap();
        assert_eq!(lee.residual, 0.0);
        assert_eq!(lee.conformal_class, ConformalClass::StrictLcK);
    }

    #[test]
    fn inconsistent_lee_system_in_dimension_six() {
        // T, X1, Y1, X2, Y2, Z with [Xi, Yi] = Z and a metric coupling X1 with X2
        let alg = LieAlgebra::from_brackets(6, &[BracketEntry::new(1, 2, 5, q(1)), BracketEntry::new(3, 4, 5, q(1))])
            .unwrap();
        let mut j = Matrix::zeros(6, 6);
        for (a, b) in [(0, 5), (1, 2), (3, 4)] {
            j[(b, a)] = q(1);
            j[(a, b)] = q(-1);
        }
        let mut g = Matrix::identity(6);
        for (a, b) in [(1, 3), (2, 4)] {
            g[(a, b)] = Q::ratio(1, 3);
            g[(b, a)] = Q::ratio(1, 3);
        }
        let h = HermitianStructure::new(alg, j, g).unwrap();
        let lee = extract_lee_form(&h).unwrap();
        assert!(lee.residual > 0.0);
        assert_eq!(lee.conformal_class, ConformalClass::NotLcK);
        assert!(require_lck(&lee).is_err());
    }

    #[test]
    fn nijenhuis_detects_rotated_structure() {
        // h3 ⊕ R with J e1 = e3 (pairs a generator with the center)
        let alg = LieAlgebra::from_brackets(4, &[BracketEntry::new(0, 1, 2, q(1))]).unwrap();
        let mut j = Matrix::zeros(4, 4);
        j[(2, 0)] = q(1);
        j[(0, 2)] = q(-1);
        j[(3, 1)] = q(1);
        j[(1, 3)] = q(-1);
        let j = ComplexStructure::from_matrix(j).unwrap();
        assert!(nijenhuis_check(&alg, &j) > q(0));
    }
}
