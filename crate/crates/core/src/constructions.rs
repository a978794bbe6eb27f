//! Example algebras: Heisenberg and Kodaira, flat Kähler bases, Vaisman double
//! extensions, the Oeljeklaus–Toma solvable algebras and an Inoue-type family.

use rand::Rng;

use crate::connections::levi_civita_of;
use crate::error::{Error, Result};
use crate::exterior::{BracketEntry, Endomorphism, KForm, LieAlgebra, Metric, SymTensor};
use crate::hermitian::{fundamental_form, nijenhuis_check, ComplexStructure, HermitianStructure};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, FLOAT_TOL};

/// `h_{2n+1}` in the basis `X_1, Y_1, …, X_n, Y_n, Z` with `[X_i, Y_i] = Z`.
pub fn heisenberg_algebra<S: Scalar>(n: usize) -> Result<LieAlgebra<S>> {
    if n < 1 {
        return Err(Error::Precondition("Heisenberg algebra needs n >= 1".into()));
    }
    let z = 2 * n;
    let entries: Vec<_> = (0..n)
        .map(|i| BracketEntry::new(2 * i, 2 * i + 1, z, S::one()))
        .collect();
    LieAlgebra::from_brackets(2 * n + 1, &entries)
}

/// `ℝ ⊕ h_{2n+1}` in the basis `T, X_1, Y_1, …, X_n, Y_n, Z` with
/// `JT = Z`, `JX_i = Y_i` and the euclidean metric.
pub fn kodaira_structure<S: Scalar>(n: usize) -> Result<HermitianStructure<S>> {
    let h = heisenberg_algebra::<S>(n)?;
    let dim = 2 * n + 2;
    let entries: Vec<_> = h
        .entries()
        .into_iter()
        .map(|e| BracketEntry::new(e.i + 1, e.j + 1, e.k + 1, e.coeff))
        .collect();
    let alg = LieAlgebra::from_brackets(dim, &entries)?;
    let mut j = Matrix::zeros(dim, dim);
    set_pair(&mut j, 0, dim - 1);
    for i in 0..n {
        set_pair(&mut j, 2 * i + 1, 2 * i + 2);
    }
    HermitianStructure::new(alg, j, Matrix::identity(dim))
}

// J e_a = e_b, J e_b = -e_a
fn set_pair<S: Scalar>(j: &mut Matrix<S>, a: usize, b: usize) {
    j[(b, a)] = S::one();
    j[(a, b)] = -S::one();
}

/// `ℝ ⊕ h_3` in the basis `T, X, Y, Z` with the Kodaira `J` and the metric
/// `Id + tilt·(X^*Z^* + Z^*X^* - T^*Y^* - Y^*T^*)`, positive for `|tilt| < 1`.
pub fn heisenberg_tilted_structure<S: Scalar>(tilt: S) -> Result<HermitianStructure<S>> {
    let k = kodaira_structure::<S>(1)?;
    let mut g = Matrix::identity(4);
    g[(1, 3)] = tilt.clone();
    g[(3, 1)] = tilt.clone();
    g[(0, 2)] = -tilt.clone();
    g[(2, 0)] = -tilt;
    HermitianStructure::new(k.alg().clone(), k.j().matrix().clone(), g)
}

/// A Kähler Lie algebra whose Levi-Civita connection is flat.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatKahlerAlgebra<S> {
    pub alg: LieAlgebra<S>,
    pub j: ComplexStructure<S>,
    pub g: Metric<S>,
    pub omega: KForm<S>,
    pub flat: bool,
}

impl<S: Scalar> FlatKahlerAlgebra<S> {
    /// Checks Jacobi, integrability, `dω = 0` and flatness.
    pub fn new(alg: LieAlgebra<S>, j: Matrix<S>, g: Matrix<S>) -> Result<Self> {
        alg.ensure_jacobi()?;
        let j = ComplexStructure::from_matrix(j)?;
        if !nijenhuis_check(&alg, &j).is_negligible(FLOAT_TOL) {
            return Err(Error::Precondition("base complex structure is not integrable".into()));
        }
        let g = Metric::new(SymTensor::new(g)?)?;
        let omega = fundamental_form(&j, g.tensor())?;
        if !omega.d(&alg).is_zero_within(FLOAT_TOL) {
            return Err(Error::Precondition("base is not Kähler (dω ≠ 0)".into()));
        }
        let flat = levi_civita_of(&alg, &g).curvature(&alg).is_flat();
        if !flat {
            return Err(Error::Precondition("base metric is not flat".into()));
        }
        Ok(Self { alg, j, g, omega, flat })
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }
}

/// Abelian `ℝ^m` with `J e_{2k} = e_{2k+1}` and the euclidean metric.
pub fn flat_kahler_abelian<S: Scalar>(m: usize) -> Result<FlatKahlerAlgebra<S>> {
    flat_kahler_abelian_with_metric(m, &vec![S::one(); m / 2])
}

/// Abelian `ℝ^m` with the diagonal metric `λ_k` on the `k`-th `J`-pair.
pub fn flat_kahler_abelian_with_metric<S: Scalar>(m: usize, weights: &[S]) -> Result<FlatKahlerAlgebra<S>> {
    if !m.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "flat Kähler base needs even dimension, got {m}"
        )));
    }
    let j = ComplexStructure::<S>::standard(m)?.matrix().clone();
    FlatKahlerAlgebra::new(LieAlgebra::abelian(m), j, pair_diagonal(weights))
}

fn pair_diagonal<S: Scalar>(weights: &[S]) -> Matrix<S> {
    let diag: Vec<S> = weights.iter().flat_map(|w| [w.clone(), w.clone()]).collect();
    Matrix::diagonal(&diag)
}

/// `e(2) ⊕ ℝ ⊕ ℝ^{2p}`: basis `f_1, …, f_4` with `[f_1, f_3] = f_4`,
/// `[f_1, f_4] = -f_3`, `J f_1 = f_2`, `J f_3 = f_4`, followed by `p` abelian
/// pairs. `weights` has one entry per `J`-pair (`p + 2` entries).
pub fn flat_kahler_euclidean<S: Scalar>(weights: &[S]) -> Result<FlatKahlerAlgebra<S>> {
    if weights.len() < 2 {
        return Err(Error::Precondition("need at least two metric weights".into()));
    }
    let m = 2 * weights.len();
    let alg = LieAlgebra::from_brackets(
        m,
        &[
            BracketEntry::new(0, 2, 3, S::one()),
            BracketEntry::new(0, 3, 2, -S::one()),
        ],
    )?;
    let j = ComplexStructure::<S>::standard(m)?.matrix().clone();
    FlatKahlerAlgebra::new(alg, j, pair_diagonal(weights))
}

/// Base data for a double extension `ℝθ ⋉_D (ℝJθ ⊕ 𝔩)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleExtensionSpec<S> {
    pub base: FlatKahlerAlgebra<S>,
    /// Endomorphism of `ℝJθ ⊕ 𝔩`, basis order `(Jθ^♯, 𝔩)`.
    pub d: Endomorphism<S>,
}

impl<S: Scalar> DoubleExtensionSpec<S> {
    /// Embed an endomorphism of `𝔩` with `D(Jθ^♯) = 0`.
    pub fn on_base(base: FlatKahlerAlgebra<S>, d_l: Matrix<S>) -> Result<Self> {
        let m = base.dim();
        if d_l.rows() != m || d_l.cols() != m {
            return Err(Error::Dimension {
                expected: m,
                got: d_l.rows(),
            });
        }
        let d = Matrix::from_fn(m + 1, m + 1, |r, c| {
            if r == 0 || c == 0 {
                S::zero()
            } else {
                d_l[(r - 1, c - 1)].clone()
            }
        });
        Ok(Self {
            base,
            d: Endomorphism::new(d)?,
        })
    }

    /// Checks `D(Jθ^♯) = 0`, skew-symmetry for the extended metric and
    /// `[D, J_𝔩] = 0`.
    pub fn validate(&self) -> Result<()> {
        let m = self.base.dim();
        let d = self.d.matrix();
        if d.rows() != m + 1 {
            return Err(Error::Dimension {
                expected: m + 1,
                got: d.rows(),
            });
        }
        if !d.column(0).iter().all(|v| v.is_negligible(FLOAT_TOL)) {
            return Err(Error::InadmissibleExtension("D does not annihilate Jθ".into()));
        }
        let g = Matrix::from_fn(m + 1, m + 1, |r, c| match (r, c) {
            (0, 0) => S::one(),
            (0, _) | (_, 0) => S::zero(),
            _ => self.base.g.matrix()[(r - 1, c - 1)].clone(),
        });
        let skew = d.transpose().mul(&g).add(&g.mul(d));
        if !skew.is_zero_within(FLOAT_TOL) {
            return Err(Error::InadmissibleExtension(format!(
                "D is not skew-symmetric (residual {:e})",
                skew.max_abs()
            )));
        }
        let dl = Matrix::from_fn(m, m, |r, c| d[(r + 1, c + 1)].clone());
        let jl = self.base.j.matrix();
        let comm = dl.mul(jl).sub(&jl.mul(&dl));
        if !comm.is_zero_within(FLOAT_TOL) {
            return Err(Error::InadmissibleExtension(format!(
                "D does not commute with J (residual {:e})",
                comm.max_abs()
            )));
        }
        Ok(())
    }
}

/// `𝔤 = ℝT ⋉_D (ℝZ ⊕ 𝔩)` in the basis `T, 𝔩, Z`, with
/// `[x, y] = ω_𝔩(x, y) Z + [x, y]_𝔩` on `𝔩`, `[T, x] = Dx`, `JT = Z`,
/// and `T, Z` orthonormal and orthogonal to `𝔩`. Here `T = θ^♯` and
/// `Z = Jθ^♯`, so `-dJθ|_𝔩 = ω_𝔩`.
pub fn double_extension<S: Scalar>(spec: &DoubleExtensionSpec<S>) -> Result<HermitianStructure<S>> {
    spec.validate()?;
    let base = &spec.base;
    let m = base.dim();
    let dim = m + 2;
    let z = dim - 1;
    // position in g of index r of (Z, 𝔩)
    let pos = |r: usize| if r == 0 { z } else { r };
    let mut entries = Vec::new();
    for e in base.alg.entries() {
        entries.push(BracketEntry::new(e.i + 1, e.j + 1, e.k + 1, e.coeff));
    }
    for (idx, c) in base.omega.terms() {
        entries.push(BracketEntry::new(idx[0] + 1, idx[1] + 1, z, c.clone()));
    }
    let d = spec.d.matrix();
    for col in 0..=m {
        for row in 0..=m {
            let c = &d[(row, col)];
            if !c.is_zero() {
                entries.push(BracketEntry::new(0, pos(col), pos(row), c.clone()));
            }
        }
    }
    let alg = LieAlgebra::from_brackets(dim, &entries)?;
    let report = alg.validate();
    if !report.jacobi {
        return Err(Error::InadmissibleExtension(format!(
            "Jacobi identity fails (residual {:e}); D is not a derivation",
            report.max_jacobi_residual
        )));
    }
    let mut j = Matrix::zeros(dim, dim);
    set_pair(&mut j, 0, z);
    let mut g = Matrix::identity(dim);
    for r in 0..m {
        for c in 0..m {
            j[(r + 1, c + 1)] = base.j.matrix()[(r, c)].clone();
            g[(r + 1, c + 1)] = base.g.matrix()[(r, c)].clone();
        }
    }
    HermitianStructure::new(alg, j, g)
}

/// Small random rational `p/q` with `|p| <= max_num`, `1 <= q <= max_den`.
pub fn random_ratio<S: Scalar, R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> S {
    S::ratio(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den))
}

/// Random element of `u(m)` for the diagonal pair metric `weights` on abelian
/// `ℝ^{2m}`: `D = G^{-1}K` with `K` skew and `J`-commuting.
pub fn random_unitary_derivation<S: Scalar, R: Rng>(rng: &mut R, weights: &[S]) -> Matrix<S> {
    let p = weights.len();
    let m = 2 * p;
    let mut k = Matrix::zeros(m, m);
    // complex entry a + ib at (r, c) acts as [[a, -b], [b, a]] on pair blocks;
    // a skew, b symmetric makes K skew
    for r in 0..p {
        for c in r..p {
            let a: S = if r == c { S::zero() } else { random_ratio(rng, 3, 2) };
            let b: S = random_ratio(rng, 3, 2);
            let mut put = |r: usize, c: usize, a: S, b: S| {
                k[(2 * r, 2 * c)] = a.clone();
                k[(2 * r + 1, 2 * c + 1)] = a;
                k[(2 * r, 2 * c + 1)] = -b.clone();
                k[(2 * r + 1, 2 * c)] = b;
            };
            put(r, c, a.clone(), b.clone());
            if r != c {
                put(c, r, -a, b);
            }
        }
    }
    let ginv = pair_diagonal(weights).inverse().expect("positive weights");
    ginv.mul(&k)
}

/// Rotation generator on the `J`-pair starting at index `a`: `e_a ↦ e_{a+1}`,
/// `e_{a+1} ↦ -e_a`.
pub fn pair_rotation<S: Scalar>(m: usize, a: usize, c: S) -> Matrix<S> {
    let mut d = Matrix::zeros(m, m);
    d[(a + 1, a)] = c.clone();
    d[(a, a + 1)] = -c;
    d
}

/// Oeljeklaus–Toma solvable algebra of type `(s, 1)` modelling `ℍ^s × ℂ`.
///
/// Basis `B_1, A_1, …, B_s, A_s, U, V` where at the base point `(w = i, z = 0)`
/// `B_j = ∂_{x_j}`, `A_j = ∂_{y_j}`, `U = ∂_u`, `V = ∂_v`. Brackets
/// `[A_j, B_j] = B_j`, `[A_j, U] = -½U + φ_j V`, `[A_j, V] = -½V - φ_j U`;
/// `J B_j = A_j`, `J U = V`. The metric is the invariant lcK metric with
/// `g(A_j, A_k) = g(B_j, B_k) = 1 + δ_{jk}` and `g(U, U) = g(V, V) = 2`.
pub fn ot_solvable_structure<S: Scalar>(s: usize, angles: Option<&[S]>) -> Result<HermitianStructure<S>> {
    if s < 1 {
        return Err(Error::Precondition("OT structure needs s >= 1".into()));
    }
    if let Some(a) = angles {
        if a.len() != s {
            return Err(Error::Dimension {
                expected: s,
                got: a.len(),
            });
        }
    }
    let dim = 2 * s + 2;
    let (u, v) = (2 * s, 2 * s + 1);
    let half = S::ratio(1, 2);
    let mut entries = Vec::new();
    for jdx in 0..s {
        let (b, a) = (2 * jdx, 2 * jdx + 1);
        entries.push(BracketEntry::new(b, a, b, -S::one()));
        entries.push(BracketEntry::new(a, u, u, -half.clone()));
        entries.push(BracketEntry::new(a, v, v, -half.clone()));
        if let Some(phi) = angles.map(|p| p[jdx].clone()).filter(|p| !p.is_zero()) {
            entries.push(BracketEntry::new(a, u, v, phi.clone()));
            entries.push(BracketEntry::new(a, v, u, -phi));
        }
    }
    let alg = LieAlgebra::from_brackets(dim, &entries)?;
    let j = ComplexStructure::<S>::standard(dim)?.matrix().clone();
    let g = Matrix::from_fn(dim, dim, |r, c| {
        if r >= u || c >= u {
            if r == c {
                S::from_int(2)
            } else {
                S::zero()
            }
        } else if r % 2 != c % 2 {
            S::zero()
        } else if r == c {
            S::from_int(2)
        } else {
            S::one()
        }
    });
    HermitianStructure::new(alg, j, g)
}

/// `ℝ ⊕ su(2)` (the Hopf surface) in the basis `T, E_1, E_2, E_3` with
/// `[E_i, E_j] = E_k` cyclically, `JT = E_3`, `JE_1 = E_2` and the euclidean
/// metric.
pub fn hopf_surface_structure<S: Scalar>() -> Result<HermitianStructure<S>> {
    let alg = LieAlgebra::from_brackets(
        4,
        &[
            BracketEntry::new(1, 2, 3, S::one()),
            BracketEntry::new(2, 3, 1, S::one()),
            BracketEntry::new(1, 3, 2, -S::one()),
        ],
    )?;
    let mut j = Matrix::zeros(4, 4);
    set_pair(&mut j, 0, 3);
    set_pair(&mut j, 1, 2);
    HermitianStructure::new(alg, j, Matrix::identity(4))
}

/// Non-unimodular family `[A, B] = B`, `[A, U] = cU`, `[A, V] = cV` in the
/// basis `B, A, U, V` with `JB = A`, `JU = V` and metric `2·Id`. It is lcK
/// with `θ = -2c A^*`; `c = -½` is the `s = 1` OT algebra.
pub fn inoue_type_structure<S: Scalar>(c: S) -> Result<HermitianStructure<S>> {
    let alg = LieAlgebra::from_brackets(
        4,
        &[
            BracketEntry::new(0, 1, 0, -S::one()),
            BracketEntry::new(1, 2, 2, c.clone()),
            BracketEntry::new(1, 3, 3, c),
        ],
    )?;
    let j = ComplexStructure::<S>::standard(4)?.matrix().clone();
    HermitianStructure::new(alg, j, Matrix::identity(4).scale(&S::from_int(2)))
}
