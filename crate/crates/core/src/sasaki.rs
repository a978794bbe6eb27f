//! Sasaki structures on odd-dimensional metric Lie algebras, η-Einstein
//! fitting, and the Vaisman → Sasaki restriction.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::connections::{levi_civita_of, vaisman_check};
use crate::error::{Error, Result};
use crate::exterior::{BracketEntry, Endomorphism, KForm, LieAlgebra, Metric, SymTensor};
use crate::hermitian::{extract_lee_form, ConformalClass, HermitianStructure};
use crate::linalg::{dot, Matrix};
use crate::models::derivative;
use crate::rigidity::normalize;
use crate::scalar::{Scalar, FLOAT_TOL};

/// `(alg, g_S, η, ξ, Φ)` with `η(ξ) = 1`, `g_S(ξ, ξ) = 1`,
/// `Φ² = -Id + ξ⊗η`, `g_S = η⊗η + ½dη(·, Φ·)` and `ξ` Killing.
#[derive(Debug, Clone, PartialEq)]
pub struct SasakiStructure<S> {
    alg: LieAlgebra<S>,
    g: Metric<S>,
    eta: KForm<S>,
    xi: Vec<S>,
    phi: Endomorphism<S>,
}

impl<S: Scalar> SasakiStructure<S> {
    pub fn new(alg: LieAlgebra<S>, g: Matrix<S>, eta: Vec<S>, xi: Vec<S>, phi: Matrix<S>) -> Result<Self> {
        alg.ensure_jacobi()?;
        let dim = alg.dim();
        if dim.is_multiple_of(2) || dim < 3 {
            return Err(Error::Precondition(format!(
                "Sasaki structure needs odd dimension >= 3, got {dim}"
            )));
        }
        for len in [g.rows(), eta.len(), xi.len(), phi.rows()] {
            if len != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: len,
                });
            }
        }
        let g = Metric::new(SymTensor::new(g)?)?;
        let phi = Endomorphism::new(phi)?;
        let eta_form = KForm::from_vector(&eta);
        let fail = |what: &str, r: f64| Err(Error::Precondition(format!("Sasaki: {what} (residual {r:e})")));
        let r = (dot(&eta, &xi) - S::one()).abs().to_f64_lossy();
        if r > FLOAT_TOL {
            return fail("η(ξ) != 1", r);
        }
        let r = (g.pair(&xi, &xi) - S::one()).abs().to_f64_lossy();
        if r > FLOAT_TOL {
            return fail("g(ξ, ξ) != 1", r);
        }
        let p = phi.matrix();
        let xi_eta = Matrix::from_fn(dim, dim, |r, c| xi[r].clone() * eta[c].clone());
        let phi2 = p.mul(p).add(&Matrix::identity(dim)).sub(&xi_eta);
        if !phi2.is_zero_within(FLOAT_TOL) {
            return fail("Φ² != -Id + ξ⊗η", phi2.max_abs());
        }
        let deta = eta_form.d(&alg).to_matrix();
        let half = S::ratio(1, 2);
        let assoc = Matrix::from_fn(dim, dim, |r, c| eta[r].clone() * eta[c].clone()).add(&deta.mul(p).scale(&half));
        let defect = assoc.sub(g.matrix());
        if !defect.is_zero_within(FLOAT_TOL) {
            return fail("g != η⊗η + ½dη(·, Φ·)", defect.max_abs());
        }
        let ad = alg.ad_vector(&xi);
        let killing = ad.transpose().mul(g.matrix()).add(&g.matrix().mul(&ad));
        if !killing.is_zero_within(FLOAT_TOL) {
            return fail("ξ is not Killing", killing.max_abs());
        }
        Ok(Self {
            alg,
            g,
            eta: eta_form,
            xi,
            phi,
        })
    }

    pub fn alg(&self) -> &LieAlgebra<S> {
        &self.alg
    }

    pub fn metric(&self) -> &Metric<S> {
        &self.g
    }

    pub fn eta(&self) -> Vec<S> {
        self.eta.to_vector()
    }

    pub fn xi(&self) -> &[S] {
        &self.xi
    }

    pub fn phi(&self) -> &Endomorphism<S> {
        &self.phi
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    /// Complex dimension of the cone.
    pub fn n(&self) -> usize {
        self.dim().div_ceil(2)
    }

    pub fn convert<T: Scalar>(&self) -> SasakiStructure<T> {
        SasakiStructure {
            alg: self.alg.convert(),
            g: self.g.convert(),
            eta: self.eta.convert(),
            xi: self.xi.iter().map(crate::scalar::convert).collect(),
            phi: self.phi.convert(),
        }
    }
}

/// `h_3` with orthonormal `X, Y, ξ`, `[X, Y] = -2ξ`, `ΦX = Y`.
pub fn heisenberg_sasaki<S: Scalar>() -> Result<SasakiStructure<S>> {
    let alg = LieAlgebra::from_brackets(3, &[BracketEntry::new(0, 1, 2, S::from_int(-2))])?;
    let mut phi = Matrix::zeros(3, 3);
    phi[(1, 0)] = S::one();
    phi[(0, 1)] = -S::one();
    let e3 = vec![S::zero(), S::zero(), S::one()];
    SasakiStructure::new(alg, Matrix::identity(3), e3.clone(), e3, phi)
}

/// `so(3)` with orthonormal `E_1, E_2, E_3`, `[E_i, E_j] = 2E_k`, `ξ = E_3`:
/// the unit round 3-sphere.
pub fn sphere_sasaki<S: Scalar>() -> Result<SasakiStructure<S>> {
    let two = S::from_int(2);
    let alg = LieAlgebra::from_brackets(
        3,
        &[
            BracketEntry::new(0, 1, 2, two.clone()),
            BracketEntry::new(1, 2, 0, two.clone()),
            BracketEntry::new(0, 2, 1, -two),
        ],
    )?;
    let mut phi = Matrix::zeros(3, 3);
    phi[(1, 0)] = -S::one();
    phi[(0, 1)] = S::one();
    let e3 = vec![S::zero(), S::zero(), S::one()];
    SasakiStructure::new(alg, Matrix::identity(3), e3.clone(), e3, phi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtaEinsteinFit<S> {
    pub alpha: S,
    pub beta: S,
    /// `g`-norm of `Ric - αg - βη⊗η`.
    pub residual: f64,
    /// `α + β - (2n - 2)`.
    pub sum_defect: S,
    pub n: usize,
}

/// Least-squares `Ric = αg + βη⊗η` for any odd-dimensional metric algebra
/// and 1-form `η`.
pub fn eta_einstein_fit_metric<S: Scalar>(alg: &LieAlgebra<S>, g: &Metric<S>, eta: &[S]) -> Result<EtaEinsteinFit<S>> {
    let dim = alg.dim();
    let ric = levi_civita_of(alg, g).curvature(alg).ricci();
    let ee = Matrix::from_fn(dim, dim, |r, c| eta[r].clone() * eta[c].clone());
    let gm = g.matrix();
    let gram = Matrix::from_rows(vec![
        vec![g.tensor_inner(gm, gm), g.tensor_inner(gm, &ee)],
        vec![g.tensor_inner(&ee, gm), g.tensor_inner(&ee, &ee)],
    ])?;
    let rhs = vec![g.tensor_inner(&ric, gm), g.tensor_inner(&ric, &ee)];
    let sol = gram
        .solve_vec(&rhs)
        .map_err(|_| Error::Precondition("η⊗η is proportional to g".into()))?;
    let (alpha, beta) = (sol[0].clone(), sol[1].clone());
    let rem = ric.sub(&gm.scale(&alpha)).sub(&ee.scale(&beta));
    let residual = g.tensor_norm_sq(&rem).to_f64_lossy().max(0.0).sqrt();
    let n = dim.div_ceil(2);
    let sum_defect = alpha.clone() + beta.clone() - S::from_int(2 * n as i64 - 2);
    Ok(EtaEinsteinFit {
        alpha,
        beta,
        residual,
        sum_defect,
        n,
    })
}

pub fn eta_einstein_fit<S: Scalar>(s: &SasakiStructure<S>) -> Result<EtaEinsteinFit<S>> {
    eta_einstein_fit_metric(&s.alg, &s.g, &s.eta())
}

/// `(α, β) = (-(2 + 4t), 2n + 4t)`.
pub fn vaisman_sasaki_constants<S: Scalar>(t: &S, n: usize) -> (S, S) {
    let four_t = S::from_int(4) * t.clone();
    (-(S::from_int(2) + four_t.clone()), S::from_int(2 * n as i64) + four_t)
}

/// Sasaki structure on `ker θ` of a Vaisman structure rescaled to `|θ| = 1`:
/// `g_S = ¼g`, `η = -½Jθ`, `ξ = -2(Jθ)^♯`, `Φ = J` on `ker θ ∩ ker Jθ`.
/// The basis is a basis of `ker θ ∩ ker Jθ` followed by `ξ`.
pub fn sasaki_from_vaisman<S: Scalar>(h: &HermitianStructure<S>) -> Result<SasakiStructure<S>> {
    let lee = extract_lee_form(h)?;
    if lee.conformal_class != ConformalClass::StrictLcK {
        return Err(Error::NotLcK);
    }
    if vaisman_check(h, &lee) != Some(true) {
        return Err(Error::Precondition("structure is not Vaisman".into()));
    }
    let (h, lee) = normalize(h, &lee)?;
    let dim = h.dim();
    let theta = lee.theta_vec();
    let jtheta = lee.j_theta_vec();
    let constraints = Matrix::from_rows(vec![theta.clone(), jtheta.clone()])?;
    let horizontal = constraints.null_space(FLOAT_TOL);
    let two = S::from_int(2);
    let xi_amb: Vec<S> = h
        .metric()
        .sharp(&jtheta)
        .into_iter()
        .map(|v| -(v * two.clone()))
        .collect();
    let mut basis = horizontal.clone();
    basis.push(xi_amb.clone());
    let alg = h.alg().subalgebra(&basis)?;
    let m = basis.len();
    let quarter = S::ratio(1, 4);
    let g = Matrix::from_fn(m, m, |a, b| h.metric().pair(&basis[a], &basis[b]) * quarter.clone());
    // coordinates of J(horizontal) in the horizontal basis
    let hb = Matrix::from_fn(dim, m - 1, |r, c| horizontal[c][r].clone());
    let hbt = hb.transpose();
    let gram = hbt.mul(&hb);
    let mut phi = Matrix::zeros(m, m);
    for (c, v) in horizontal.iter().enumerate() {
        let coords = gram.solve_vec(&hbt.mul_vec(&h.j().apply(v)))?;
        for (r, x) in coords.into_iter().enumerate() {
            phi[(r, c)] = x;
        }
    }
    let mut xi = vec![S::zero(); m];
    xi[m - 1] = S::one();
    let half = S::ratio(1, 2);
    let eta: Vec<S> = basis.iter().map(|v| -(dot(&jtheta, v) * half.clone())).collect();
    SasakiStructure::new(alg, g, eta, xi, phi)
}

/// Cone check at one radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeSample {
    pub r: f64,
    pub point: Vec<f64>,
    /// Max entry of `Ric_S - Ric(ω̃)(·, Φ·) - (2n-2)g_S`.
    pub residual: f64,
    /// Max entry of `Ric_cone + (2n-2)g_S - Ric_S` on `TS`.
    pub warped_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeCheck {
    pub samples: Vec<ConeSample>,
    pub max_residual: f64,
    /// Max minus min residual over the radii at the identity.
    pub spread: f64,
}

pub const CONE_RADII: [f64; 3] = [0.5, 1.0, 2.0];

/// Left-trivialized coordinate vectors of `x ↦ exp(x_1e_1)···exp(x_me_m)`.
fn trivialization(ads: &[DMatrix<f64>], x: &[f64]) -> DMatrix<f64> {
    let m = x.len();
    let mut v = DMatrix::zeros(m, m);
    for i in 0..m {
        let mut col = DMatrix::from_fn(m, 1, |r, _| if r == i { 1.0 } else { 0.0 });
        for k in i + 1..m {
            col = (&ads[k] * (-x[k])).exp() * col;
        }
        v.set_column(i, &col.column(0));
    }
    v
}

struct Cone {
    ads: Vec<DMatrix<f64>>,
    g: DMatrix<f64>,
}

impl Cone {
    /// Cone metric `dr² + r²g_S` in coordinates `(x, r)`, flattened.
    fn metric(&self, y: &[f64]) -> Vec<f64> {
        let m = self.g.nrows();
        let (x, r) = (&y[..m], y[m]);
        let v = trivialization(&self.ads, x);
        let gs = v.transpose() * &self.g * &v;
        let n = m + 1;
        let mut out = vec![0.0; n * n];
        for a in 0..m {
            for b in 0..m {
                out[a * n + b] = r * r * gs[(a, b)];
            }
        }
        out[n * n - 1] = 1.0;
        out
    }

    /// Christoffel symbols `Γ^k_{ij}` at `y`, flattened `(i * n + j) * n + k`.
    fn christoffel(&self, y: &[f64], h: f64) -> Vec<f64> {
        let n = y.len();
        let gflat = self.metric(y);
        let ginv = DMatrix::from_row_slice(n, n, &gflat)
            .try_inverse()
            .expect("metric is invertible");
        let dg: Vec<Vec<f64>> = (0..n)
            .map(|mu| derivative(&|z| self.metric(z), y, mu, h, true))
            .collect();
        let mut out = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = 0.0;
                    for l in 0..n {
                        acc += ginv[(k, l)] * (dg[i][j * n + l] + dg[j][i * n + l] - dg[l][i * n + j]);
                    }
                    out[(i * n + j) * n + k] = 0.5 * acc;
                }
            }
        }
        out
    }

    /// Riemannian Ricci tensor at `y`.
    fn ricci(&self, y: &[f64], h_inner: f64, h_outer: f64) -> DMatrix<f64> {
        let n = y.len();
        let gam = self.christoffel(y, h_inner);
        let dgam: Vec<Vec<f64>> = (0..n)
            .map(|mu| derivative(&|z| self.christoffel(z, h_inner), y, mu, h_outer, true))
            .collect();
        let g = |i: usize, j: usize, k: usize| gam[(i * n + j) * n + k];
        // R^l_{ijk} = ∂_iΓ^l_{jk} - ∂_jΓ^l_{ik} + Γ^l_{im}Γ^m_{jk} - Γ^l_{jm}Γ^m_{ik}, Ric_{jk} = R^i_{ijk}
        DMatrix::from_fn(n, n, |j, k| {
            let mut acc = 0.0;
            for i in 0..n {
                acc += dgam[i][(j * n + k) * n + i] - dgam[j][(i * n + k) * n + i];
                for m in 0..n {
                    acc += g(i, m, i) * g(j, k, m) - g(j, m, i) * g(i, k, m);
                }
            }
            acc
        })
    }
}

/// Evaluates the cone `dr² + r²g_S` in exponential coordinates of the second
/// kind around sampled group points, computes its Ricci tensor by nested
/// finite differences, and checks
/// `Ric_S = Ric(ω̃)(·, Φ·) + (2n-2)g_S` with `Ric(ω̃) = Ric_cone(J·, ·)`,
/// `J(r∂_r) = ξ`. `samples` base points (the first is the identity) are
/// taken at each radius in [`CONE_RADII`].
pub fn cone_consistency_check(s: &SasakiStructure<f64>, samples: usize, seed: u64) -> Result<ConeCheck> {
    cone_consistency_at(s, samples, seed, &CONE_RADII)
}

pub fn cone_consistency_at(s: &SasakiStructure<f64>, samples: usize, seed: u64, radii: &[f64]) -> Result<ConeCheck> {
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::Domain(format!("cone radius {r} is not positive")));
    }
    if samples == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    let m = s.dim();
    let cone = Cone {
        ads: (0..m).map(|i| to_dmatrix(&s.alg.ad(i))).collect(),
        g: to_dmatrix(s.g.matrix()),
    };
    let ric_s = levi_civita_of(&s.alg, &s.g).curvature(&s.alg).ricci();
    let eta = s.eta();
    let phi = s.phi.matrix();
    let k = 2.0 * s.n() as f64 - 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..samples)
        .map(|i| {
            if i == 0 {
                vec![0.0; m]
            } else {
                (0..m).map(|_| rng.gen_range(-0.5..0.5)).collect()
            }
        })
        .collect();
    let mut out = Vec::new();
    for &r in radii {
        for x in &points {
            let v = trivialization(&cone.ads, x);
            let vinv = v.clone().try_inverse().expect("trivialization is invertible");
            let mut y = x.clone();
            y.push(r);
            let ric = cone.ricci(&y, 1e-4 * r.min(1.0), 1e-3 * r.min(1.0));
            // invariant vector u ↦ cone coordinates (V^{-1}u, 0)
            let coords = |u: &[f64], radial: f64| -> Vec<f64> {
                let c = &vinv * nalgebra::DVector::from_column_slice(u);
                let mut out: Vec<f64> = c.iter().copied().collect();
                out.push(radial);
                out
            };
            let pair = |a: &[f64], b: &[f64]| -> f64 {
                let mut acc = 0.0;
                for i in 0..=m {
                    for j in 0..=m {
                        acc += a[i] * ric[(i, j)] * b[j];
                    }
                }
                acc
            };
            let basis = |a: usize| -> Vec<f64> { (0..m).map(|i| if i == a { 1.0 } else { 0.0 }).collect() };
            let mut residual: f64 = 0.0;
            let mut warped: f64 = 0.0;
            for a in 0..m {
                let ea = basis(a);
                // J e_a = η(e_a)(-r∂_r) + Φe_a
                let ja = coords(&phi.column(a), -r * eta[a]);
                for b in 0..m {
                    let eb = basis(b);
                    let rho = pair(&ja, &coords(&phi.column(b), 0.0));
                    let gs = s.g.matrix()[(a, b)];
                    residual = residual.max((ric_s[(a, b)] - rho - k * gs).abs());
                    let cone_ab = pair(&coords(&ea, 0.0), &coords(&eb, 0.0));
                    warped = warped.max((cone_ab + k * gs - ric_s[(a, b)]).abs());
                }
            }
            out.push(ConeSample {
                r,
                point: x.clone(),
                residual,
                warped_residual: warped,
            });
        }
    }
    let max_residual = out
        .iter()
        .map(|s| s.residual.max(s.warped_residual))
        .fold(0.0, f64::max);
    let at_identity: Vec<f64> = out.iter().step_by(samples).map(|s| s.residual).collect();
    let spread =
        at_identity.iter().copied().fold(f64::MIN, f64::max) - at_identity.iter().copied().fold(f64::MAX, f64::min);
    Ok(ConeCheck {
        samples: out,
        max_residual,
        spread,
    })
}

fn to_dmatrix(m: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)])
}

/// Finite-difference tolerance for the cone relation.
pub const CONE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SasakiReport {
    pub name: String,
    pub dim: usize,
    pub n: usize,
    pub alpha: String,
    pub beta: String,
    pub fit_residual: f64,
    /// `α + β - (2n - 2)`.
    pub sum_defect: String,
    /// `t` of the Vaisman structure the Sasaki structure came from.
    pub vaisman_t: Option<String>,
    /// `vaisman_sasaki_constants(t, n)`.
    pub predicted: Option<[String; 2]>,
    pub prediction_residual: Option<f64>,
    pub cone: ConeCheck,
    pub tolerance: f64,
    pub cone_tolerance: f64,
    pub pass: bool,
}

pub fn sasaki_report<S: Scalar>(
    name: &str,
    s: &SasakiStructure<S>,
    t: Option<&S>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<SasakiReport> {
    let fit = eta_einstein_fit(s)?;
    let predicted = t.map(|t| vaisman_sasaki_constants(t, s.n()));
    let prediction_residual = predicted.as_ref().map(|(a, b)| {
        (fit.alpha.clone() - a.clone())
            .abs()
            .to_f64_lossy()
            .max((fit.beta.clone() - b.clone()).abs().to_f64_lossy())
    });
    let cone = cone_consistency_check(&s.convert(), samples, seed)?;
    let pass = fit.residual < tol
        && fit.sum_defect.abs().to_f64_lossy() < tol
        && prediction_residual.is_none_or(|r| r < tol)
        && cone.max_residual < CONE_TOL
        && cone.spread < CONE_TOL;
    Ok(SasakiReport {
        name: name.into(),
        dim: s.dim(),
        n: s.n(),
        alpha: fit.alpha.to_text(),
        beta: fit.beta.to_text(),
        fit_residual: fit.residual,
        sum_defect: fit.sum_defect.to_text(),
        vaisman_t: t.map(|t| t.to_text()),
        predicted: predicted.map(|(a, b)| [a.to_text(), b.to_text()]),
        prediction_residual,
        cone,
        tolerance: tol,
        cone_tolerance: CONE_TOL,
        pass,
    })
}
