//! Einstein-type fit `Ric(ω) = t·dJθ` for invariant lcK structures, the
//! curvature identities relating Weyl, Levi-Civita and Chern Ricci data, and
//! the Gauduchon/`t ≤ 0` ⇒ Vaisman rigidity pipeline.

use serde::Serialize;

use crate::connections::{
    chern_ricci_form, curvature_ricci, levi_civita, nabla_theta_split, vaisman_check, weyl_connection,
    InvariantConnection, RicciData,
};
use crate::error::{Error, Result};
use crate::exterior::{KForm, Metric};
use crate::hermitian::{extract_lee_form, ConformalClass, HermitianStructure, LeeData};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, FLOAT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct EinsteinFit<S> {
    /// `None` when `Ric(ω)` is not a multiple of `dJθ`.
    pub t: Option<S>,
    /// `g`-norm of `Ric(ω) - t·dJθ` at the least-squares `t`.
    pub residual: f64,
}

fn norm(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

/// Least-squares `t` for `Ric(ω) = t·dJθ` in the metric inner product on
/// 2-forms.
pub fn einstein_fit<S: Scalar>(
    h: &HermitianStructure<S>,
    lee: &LeeData<S>,
    ric: &KForm<S>,
    tol: f64,
) -> EinsteinFit<S> {
    let g = h.metric();
    let denom = g.form_norm_sq(&lee.dj_theta);
    let t = if denom.is_zero() {
        S::zero()
    } else {
        g.form_inner(ric, &lee.dj_theta) / denom
    };
    let diff = ric.sub(&lee.dj_theta.scale(&t));
    let residual = norm(g.form_norm_sq(&diff).to_f64_lossy());
    let ok = diff.is_zero_within(0.0) || (S::MODE == crate::ScalarMode::Float && residual < tol);
    EinsteinFit {
        t: ok.then_some(t),
        residual,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRecord {
    pub name: String,
    /// Norm (tensors) or value (scalars) of the left-hand side.
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub pass: bool,
}

impl IdentityRecord {
    fn scalar<S: Scalar>(name: &str, lhs: &S, rhs: &S, tol: f64) -> Self {
        let residual = (lhs.clone() - rhs.clone()).abs().to_f64_lossy();
        Self {
            name: name.into(),
            lhs: lhs.to_f64_lossy(),
            rhs: rhs.to_f64_lossy(),
            residual,
            pass: residual < tol,
        }
    }

    fn tensor<S: Scalar>(name: &str, g: &Metric<S>, lhs: &Matrix<S>, rhs: &Matrix<S>, tol: f64) -> Self {
        let residual = norm(g.tensor_norm_sq(&lhs.sub(rhs)).to_f64_lossy());
        Self {
            name: name.into(),
            lhs: norm(g.tensor_norm_sq(lhs).to_f64_lossy()),
            rhs: norm(g.tensor_norm_sq(rhs).to_f64_lossy()),
            residual,
            pass: residual < tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub records: Vec<IdentityRecord>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.records.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// Everything the identities need, computed once.
#[derive(Debug, Clone)]
pub struct CurvatureBundle<S> {
    pub lc: InvariantConnection<S>,
    pub ric_lc: RicciData<S>,
    pub ric_weyl: RicciData<S>,
    pub chern: RicciData<S>,
    pub nabla_theta: Matrix<S>,
    pub nabla_theta_11: Matrix<S>,
}

impl<S: Scalar> CurvatureBundle<S> {
    pub fn new(h: &HermitianStructure<S>, lee: &LeeData<S>) -> Result<Self> {
        let lc = levi_civita(h);
        let weyl = weyl_connection(h, lee)?;
        let ric_lc = curvature_ricci(h, &lc);
        let ric_weyl = curvature_ricci(h, &weyl);
        let chern = chern_ricci_form(h);
        let (nt, nt11) = nabla_theta_split(h, lee, &lc)?;
        Ok(Self {
            lc,
            ric_lc,
            ric_weyl,
            chern,
            nabla_theta: nt.matrix().clone(),
            nabla_theta_11: nt11.matrix().clone(),
        })
    }

    pub fn chern_ricci(&self) -> &KForm<S> {
        self.chern.ricci_form.as_ref().expect("Chern data carries its form")
    }
}

fn outer<S: Scalar>(a: &[S], b: &[S]) -> Matrix<S> {
    Matrix::from_fn(a.len(), b.len(), |i, j| a[i].clone() * b[j].clone())
}

/// The Ricci identities for an lcK structure; `(e)` is included when `t` is
/// given.
pub fn identity_suite<S: Scalar>(
    h: &HermitianStructure<S>,
    lee: &LeeData<S>,
    cb: &CurvatureBundle<S>,
    t: Option<&S>,
    tol: f64,
) -> IdentityReport {
    let g = h.metric();
    let gm = g.matrix();
    let jm = h.j().matrix();
    let n = S::from_int(h.n() as i64);
    let one = S::one();
    let two = S::from_int(2);
    let half = S::ratio(1, 2);
    let th = lee.theta_vec();
    let jth = lee.j_theta_vec();
    let th_th = outer(&th, &th);
    let jth_jth = outer(&jth, &jth);
    let nsq = lee.norm_sq.clone();
    let codiff = lee.codifferential.clone();
    let djt = lee.dj_theta.to_matrix();
    let rho = cb.chern_ricci().to_matrix();
    let ric = &cb.ric_lc.ricci;
    let ric_w = &cb.ric_weyl.ricci;
    let nt = &cb.nabla_theta;
    let nt11 = &cb.nabla_theta_11;
    let mut records = Vec::new();

    // Ric^W(J·,·) = (n/2) dJθ + Ric(ω)
    let lhs = jm.transpose().mul(ric_w);
    let rhs = djt.scale(&(n.clone() / two.clone())).add(&rho);
    records.push(IdentityRecord::tensor("weyl_chern", g, &lhs, &rhs, tol));

    // Ric^W = Ric + ½(-d*θ + (1-n)|θ|²) g + (n-1)∇θ + ½(n-1) θ⊗θ
    let c_g = (-codiff.clone() + (one.clone() - n.clone()) * nsq.clone()) * half.clone();
    let rhs = ric
        .add(&gm.scale(&c_g))
        .add(&nt.scale(&(n.clone() - one.clone())))
        .add(&th_th.scale(&((n.clone() - one.clone()) * half.clone())));
    records.push(IdentityRecord::tensor("ric_w_lc", g, ric_w, &rhs, tol));

    // dJθ(·, J·) = 2(∇θ)^{1,1} - |θ|² g + θ⊗θ + Jθ⊗Jθ
    let lhs = djt.mul(jm);
    let rhs = nt11.scale(&two).sub(&gm.scale(&nsq)).add(&th_th).add(&jth_jth);
    records.push(IdentityRecord::tensor("djtheta", g, &lhs, &rhs, tol));

    // s^W = s - (2n-1) d*θ - ((2n-1)(n-1)/2) |θ|²
    let two_n_1 = two.clone() * n.clone() - one.clone();
    let rhs = cb.ric_lc.scalar.clone()
        - two_n_1.clone() * codiff.clone()
        - two_n_1.clone() * (n.clone() - one.clone()) * half.clone() * nsq.clone();
    records.push(IdentityRecord::scalar("scalar", &cb.ric_weyl.scalar, &rhs, tol));

    if let Some(t) = t {
        // s = (n-1-2t) d*θ - ((n-1)/2 + t(2n-2)) |θ|², the trace of the
        // expansion below
        records.push(IdentityRecord::scalar(
            "scalar_fit",
            &cb.ric_lc.scalar,
            &scalar_from_fit(h.n(), t, &codiff, &nsq),
            tol,
        ));

        // Ric = (n+2t)(∇θ)^{1,1} - ((t+½)|θ|² - d*θ/2) g - (n-1)∇θ
        //       + ((2t+1)/2) θ⊗θ + (n/2+t) Jθ⊗Jθ
        let c_g = (t.clone() + half.clone()) * nsq.clone() - codiff.clone() * half.clone();
        let rhs = nt11
            .scale(&(n.clone() + two.clone() * t.clone()))
            .sub(&gm.scale(&c_g))
            .sub(&nt.scale(&(n.clone() - one.clone())))
            .add(&th_th.scale(&((two.clone() * t.clone() + one.clone()) * half.clone())))
            .add(&jth_jth.scale(&(n.clone() * half.clone() + t.clone())));
        records.push(IdentityRecord::tensor("ricci_full", g, ric, &rhs, tol));
    }
    IdentityReport { records }
}

/// `s^{LC}` predicted by `Ric(ω) = t·dJθ`:
/// `(n-1-2t) d*θ - ((n-1)/2 + (2n-2)t) |θ|²`.
pub fn scalar_from_fit<S: Scalar>(n: usize, t: &S, codiff: &S, norm_sq: &S) -> S {
    let n = S::from_int(n as i64);
    let one = S::one();
    let two = S::from_int(2);
    (n.clone() - one.clone() - two.clone() * t.clone()) * codiff.clone()
        - ((n.clone() - one.clone()) / two.clone() + t.clone() * (two * (n - one))) * norm_sq.clone()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BochnerRecord {
    /// `⟨∇*∇θ, θ⟩`.
    pub rough_laplacian_pairing: f64,
    /// `‖∇θ‖²`.
    pub nabla_theta_norm_sq: f64,
    /// `Ric(θ^♯, θ^♯)`.
    pub ricci_theta_theta: f64,
    /// Max of the residuals of `⟨∇*∇θ, θ⟩ = ‖∇θ‖²` and `‖∇θ‖² + Ric(θ^♯, θ^♯) = 0`.
    pub residual: f64,
    pub pass: bool,
}

/// Weitzenböck identity for the Lee form of a Gauduchon structure on a
/// unimodular algebra. `None` (not applicable) otherwise.
pub fn bochner_weitzenboeck_check<S: Scalar>(
    h: &HermitianStructure<S>,
    lee: &LeeData<S>,
    cb: &CurvatureBundle<S>,
    tol: f64,
) -> Option<BochnerRecord> {
    if !lee.gauduchon || !h.alg().is_unimodular() || !lee.is_lck() {
        return None;
    }
    let g = h.metric();
    let dim = h.dim();
    let inv = g.inverse();
    let nt = &cb.nabla_theta;
    // (∇*∇θ)(e_c) = -Σ g^{ab} (∇_{e_a} ∇θ)(e_b, e_c)
    let mut rough = vec![S::zero(); dim];
    for a in 0..dim {
        let d = cb.lc.bilinear_derivative(a, nt);
        for b in 0..dim {
            let w = &inv[(a, b)];
            if w.is_zero() {
                continue;
            }
            for (c, r) in rough.iter_mut().enumerate() {
                *r = r.clone() - w.clone() * d[(b, c)].clone();
            }
        }
    }
    let sharp = g.sharp(&lee.theta_vec());
    let pairing = crate::linalg::dot(&rough, &sharp);
    let nsq = g.tensor_norm_sq(nt);
    let ric_tt = crate::linalg::dot(&sharp, &cb.ric_lc.ricci.mul_vec(&sharp));
    let r1 = (pairing.clone() - nsq.clone()).abs().to_f64_lossy();
    let r2 = (nsq.clone() + ric_tt.clone()).abs().to_f64_lossy();
    let residual = r1.max(r2);
    Some(BochnerRecord {
        rough_laplacian_pairing: pairing.to_f64_lossy(),
        nabla_theta_norm_sq: nsq.to_f64_lossy(),
        ricci_theta_theta: ric_tt.to_f64_lossy(),
        residual,
        pass: residual < tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqtCertificate<S> {
    /// `(n+2t)‖(∇θ)^{1,1}‖² - n‖∇θ‖²`.
    pub value: S,
    /// `-‖∇θ‖²`.
    pub jtheta_lhs: S,
    /// `(n/2+t) ∇θ(Jθ^♯, Jθ^♯)`.
    pub jtheta_rhs: S,
}

impl<S: Scalar> EqtCertificate<S> {
    pub fn jtheta_residual(&self) -> f64 {
        (self.jtheta_lhs.clone() - self.jtheta_rhs.clone()).abs().to_f64_lossy()
    }
}

pub fn eqt_certificate<S: Scalar>(
    h: &HermitianStructure<S>,
    lee: &LeeData<S>,
    cb: &CurvatureBundle<S>,
    fit: &EinsteinFit<S>,
) -> Result<EqtCertificate<S>> {
    let t = fit
        .t
        .clone()
        .ok_or_else(|| Error::Precondition("Einstein fit absent".into()))?;
    if !lee.gauduchon || lee.conformal_class != ConformalClass::StrictLcK {
        return Err(Error::Precondition(
            "certificate needs a Gauduchon strictly lcK structure".into(),
        ));
    }
    let g = h.metric();
    let n = S::from_int(h.n() as i64);
    let two = S::from_int(2);
    let full = g.tensor_norm_sq(&cb.nabla_theta);
    let part = g.tensor_norm_sq(&cb.nabla_theta_11);
    let value = (n.clone() + two.clone() * t.clone()) * part - n.clone() * full.clone();
    let jsharp = g.sharp(&lee.j_theta_vec());
    let jj = crate::linalg::dot(&jsharp, &cb.nabla_theta.mul_vec(&jsharp));
    Ok(EqtCertificate {
        value,
        jtheta_lhs: -full,
        jtheta_rhs: (n / two + t) * jj,
    })
}

/// `t = (n/2)(‖∇θ‖² / ‖(∇θ)^{1,1}‖² - 1)` for non-Vaisman structures.
pub fn corollary_t<S: Scalar>(h: &HermitianStructure<S>, lee: &LeeData<S>, cb: &CurvatureBundle<S>) -> Result<S> {
    if lee.conformal_class != ConformalClass::StrictLcK {
        return Err(Error::NotLcK);
    }
    let g = h.metric();
    let full = g.tensor_norm_sq(&cb.nabla_theta);
    if full.is_negligible(FLOAT_TOL) {
        return Err(Error::Precondition("∇θ = 0 (Vaisman): the formula is undefined".into()));
    }
    let part = g.tensor_norm_sq(&cb.nabla_theta_11);
    if part.is_negligible(FLOAT_TOL) {
        return Err(Error::Domain("(∇θ)^{1,1} = 0".into()));
    }
    let n = S::from_int(h.n() as i64);
    Ok(n / S::from_int(2) * (full / part - S::one()))
}

/// Rescale `g` by the constant `|θ|²` so that the Lee form has unit length.
pub fn normalize<S: Scalar>(
    h: &HermitianStructure<S>,
    lee: &LeeData<S>,
) -> Result<(HermitianStructure<S>, LeeData<S>)> {
    if lee.conformal_class != ConformalClass::StrictLcK || lee.norm_sq.is_zero() {
        return Ok((h.clone(), lee.clone()));
    }
    let scaled = h.scaled(&lee.norm_sq)?;
    let lee = extract_lee_form(&scaled)?;
    Ok((scaled, lee))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Gauduchon with `t ≤ 0` and Vaisman.
    Confirmed,
    /// Hypotheses not met (non-Gauduchon, `t > 0` or no fit).
    Consistent,
    NotApplicable,
    /// Gauduchon, `t ≤ 0` and not Vaisman.
    Alarm,
}

#[derive(Debug, Clone)]
pub struct RigidityReport<S> {
    pub conformal_class: ConformalClass,
    pub gauduchon: bool,
    pub unimodular: bool,
    pub vaisman: Option<bool>,
    pub potential_form: Option<bool>,
    /// `Ric(ω) = 0`.
    pub chern_ricci_flat: bool,
    /// `g`-norm of `Ric(ω)`.
    pub chern_ricci_norm: f64,
    /// `g`-norm of `∇θ` on the normalized structure; `None` when not lcK.
    pub nabla_theta_norm: Option<f64>,
    pub fit: Option<EinsteinFit<S>>,
    pub identities: Option<IdentityReport>,
    pub bochner: Option<BochnerRecord>,
    pub eqt: Option<EqtCertificate<S>>,
    pub corollary_t: Option<S>,
    /// Lee data of the structure as given.
    pub input_lee: LeeData<S>,
    pub lee: LeeData<S>,
    /// Structure with `|θ| = 1` on which the identities were evaluated.
    pub normalized: HermitianStructure<S>,
    pub outcome: Outcome,
    pub verdict: String,
}

impl<S: Scalar> RigidityReport<S> {
    pub fn alarm(&self) -> bool {
        self.outcome == Outcome::Alarm
    }
}

/// Full pipeline: classify, normalize, fit `t`, run the identities, and
/// check that Gauduchon with `t ≤ 0` forces Vaisman.
pub fn rigidity_report<S: Scalar>(h: &HermitianStructure<S>, tol: f64) -> Result<RigidityReport<S>> {
    let lee0 = extract_lee_form(h)?;
    let unimodular = h.alg().is_unimodular();
    if !lee0.is_lck() {
        let verdict = "not lcK: rigidity not applicable".to_string();
        let rho = chern_ricci_form(h).ricci_form.expect("Chern data carries its form");
        return Ok(RigidityReport {
            conformal_class: lee0.conformal_class,
            gauduchon: lee0.gauduchon,
            unimodular,
            vaisman: None,
            potential_form: None,
            chern_ricci_flat: rho.is_zero_within(FLOAT_TOL),
            chern_ricci_norm: norm(h.metric().form_norm_sq(&rho).to_f64_lossy()),
            nabla_theta_norm: None,
            fit: None,
            identities: None,
            bochner: None,
            eqt: None,
            corollary_t: None,
            input_lee: lee0.clone(),
            lee: lee0,
            normalized: h.clone(),
            outcome: Outcome::NotApplicable,
            verdict,
        });
    }
    let (hn, lee) = normalize(h, &lee0)?;
    let cb = CurvatureBundle::new(&hn, &lee)?;
    let strict = lee.conformal_class == ConformalClass::StrictLcK;
    let fit = strict.then(|| einstein_fit(&hn, &lee, cb.chern_ricci(), tol));
    let t = fit.as_ref().and_then(|f| f.t.clone());
    let identities = identity_suite(&hn, &lee, &cb, t.as_ref(), tol);
    let bochner = if strict {
        bochner_weitzenboeck_check(&hn, &lee, &cb, tol)
    } else {
        None
    };
    let eqt = fit.as_ref().and_then(|f| eqt_certificate(&hn, &lee, &cb, f).ok());
    let vaisman = vaisman_check(&hn, &lee);
    let corollary = if vaisman == Some(false) {
        corollary_t(&hn, &lee, &cb).ok()
    } else {
        None
    };
    let chern_ricci_flat = cb.chern_ricci().is_zero_within(FLOAT_TOL);
    let chern_ricci_norm = norm(hn.metric().form_norm_sq(cb.chern_ricci()).to_f64_lossy());
    let nabla_theta_norm = Some(norm(hn.metric().tensor_norm_sq(&cb.nabla_theta).to_f64_lossy()));
    let potential_form = crate::hermitian::potential_form_check(&hn, &lee);
    let (outcome, verdict) = if !strict {
        (Outcome::NotApplicable, "Kahler: rigidity not applicable".to_string())
    } else {
        match (&t, lee.gauduchon) {
            (None, g) => (
                Outcome::Consistent,
                format!(
                    "{}, no Einstein fit: rigidity hypothesis not met",
                    if g { "Gauduchon" } else { "non-Gauduchon" }
                ),
            ),
            (Some(tv), false) => (
                Outcome::Consistent,
                format!("non-Gauduchon, t={}: rigidity hypothesis not met", format_scalar(tv)),
            ),
            (Some(tv), true) => {
                let nonpositive = tv.to_f64_lossy() <= tol;
                let tt = format_scalar(tv);
                match (nonpositive, vaisman == Some(true)) {
                    (true, true) => (
                        Outcome::Confirmed,
                        format!("Gauduchon, t={tt}, Vaisman: rigidity confirmed"),
                    ),
                    (true, false) => (Outcome::Alarm, format!("ALARM: Gauduchon, t={tt} <= 0, non-Vaisman")),
                    (false, true) => (
                        Outcome::Consistent,
                        format!("Gauduchon, t={tt} > 0, Vaisman: consistent (rigidity hypothesis not met)"),
                    ),
                    (false, false) => (
                        Outcome::Consistent,
                        format!("Gauduchon, t={tt} > 0, non-Vaisman: consistent (rigidity hypothesis not met)"),
                    ),
                }
            }
        }
    };
    Ok(RigidityReport {
        conformal_class: lee.conformal_class,
        gauduchon: lee.gauduchon,
        unimodular,
        vaisman,
        potential_form,
        chern_ricci_flat,
        chern_ricci_norm,
        nabla_theta_norm,
        fit,
        identities: Some(identities),
        bochner,
        eqt,
        corollary_t: corollary,
        input_lee: lee0,
        lee,
        normalized: hn,
        outcome,
        verdict,
    })
}

/// Exact text for rationals, shortest round-trip text for floats.
pub fn format_scalar<S: Scalar>(v: &S) -> String {
    v.to_text()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{inoue_type_structure, kodaira_structure, ot_solvable_structure};
    use crate::scalar::Rational;

    type Q = Rational;

    #[test]
    fn kodaira_pipeline() {
        for n in 1..=2 {
            let h = kodaira_structure::<Q>(n).unwrap();
            let r = rigidity_report(&h, FLOAT_TOL).unwrap();
            assert_eq!(r.fit.as_ref().unwrap().t, Some(Q::from_int(0)));
            assert_eq!(r.outcome, Outcome::Confirmed);
            assert!(r.identities.as_ref().unwrap().all_pass(), "{:?}", r.identities);
            assert_eq!(r.identities.unwrap().max_residual(), 0.0);
            assert_eq!(r.eqt.unwrap().value, Q::from_int(0));
            assert!(r.bochner.unwrap().pass);
            assert!(r.chern_ricci_flat);
        }
    }

    #[test]
    fn ot_pipeline() {
        for s in 1..=2 {
            let h = ot_solvable_structure::<Q>(s, None).unwrap();
            let r = rigidity_report(&h, FLOAT_TOL).unwrap();
            let ids = r.identities.as_ref().unwrap();
            assert!(ids.all_pass(), "s={s}: {ids:?}");
            assert_eq!(ids.max_residual(), 0.0);
            assert_eq!(r.fit.as_ref().unwrap().t, Some(Q::ratio(1, 2)), "s={s}");
            assert_eq!(r.corollary_t, Some(Q::ratio(1, 2)));
            assert_eq!(r.eqt.as_ref().unwrap().value, Q::from_int(0));
            assert_eq!(r.eqt.as_ref().unwrap().jtheta_residual(), 0.0);
            assert!(r.bochner.as_ref().unwrap().pass);
            assert!(r.bochner.as_ref().unwrap().nabla_theta_norm_sq > 0.0);
            assert_eq!(r.outcome, Outcome::Consistent);
            assert_eq!(r.vaisman, Some(false));
        }
    }

    #[test]
    fn ot_angles_do_not_change_curvature_data() {
        for (s, angles) in [(1, vec![Q::ratio(1, 3)]), (2, vec![Q::from_int(1), Q::ratio(-2, 5)])] {
            let plain = rigidity_report(&ot_solvable_structure::<Q>(s, None).unwrap(), FLOAT_TOL).unwrap();
            let h = ot_solvable_structure::<Q>(s, Some(&angles)).unwrap();
            let r = rigidity_report(&h, FLOAT_TOL).unwrap();
            assert_eq!(r.lee.theta, plain.lee.theta);
            assert_eq!(r.fit.as_ref().unwrap().t, Some(Q::ratio(1, 2)), "s={s}");
            assert_eq!(r.corollary_t, plain.corollary_t);
            assert!(r.identities.as_ref().unwrap().all_pass());
            let cb = CurvatureBundle::new(&r.normalized, &r.lee).unwrap();
            let cb0 = CurvatureBundle::new(&plain.normalized, &plain.lee).unwrap();
            assert_eq!(cb.chern_ricci(), cb0.chern_ricci());
            assert_eq!(cb.ric_lc.ricci, cb0.ric_lc.ricci);
        }
    }

    #[test]
    fn inoue_type_fit_values() {
        // predicted t = -(1 + c) / (2c)
        for (c, t) in [
            (Q::ratio(-1, 2), Q::ratio(1, 2)),
            (Q::from_int(1), Q::from_int(-1)),
            (Q::from_int(-1), Q::from_int(0)),
        ] {
            let h = inoue_type_structure(c.clone()).unwrap();
            let r = rigidity_report(&h, FLOAT_TOL).unwrap();
            assert_eq!(r.fit.as_ref().unwrap().t, Some(t), "c = {c}");
            assert!(r.identities.as_ref().unwrap().all_pass());
            assert!(!r.alarm());
        }
    }

    #[test]
    fn non_gauduchon_family_does_not_alarm() {
        let h = inoue_type_structure(Q::from_int(1)).unwrap();
        let r = rigidity_report(&h, FLOAT_TOL).unwrap();
        assert!(!r.gauduchon);
        assert_eq!(r.vaisman, Some(false));
        assert!(r.bochner.is_none());
        assert_eq!(r.outcome, Outcome::Consistent);
    }

    #[test]
    fn scalar_relation_coefficient() {
        // tracing Ric^W = (n/2+t) dJθ(·,J·) through the s^W relation gives the
        // |θ|² coefficient (n-1)/2 + (2n-2)t; with (2n-1)t instead the OT value
        // would be off by exactly t|θ|²
        let h = ot_solvable_structure::<Q>(1, None).unwrap();
        let r = rigidity_report(&h, FLOAT_TOL).unwrap();
        let cb = CurvatureBundle::new(&r.normalized, &r.lee).unwrap();
        let t = Q::ratio(1, 2);
        let s = cb.ric_lc.scalar.clone();
        assert_eq!(s, scalar_from_fit(2, &t, &r.lee.codifferential, &r.lee.norm_sq));
        let off_by_one = r.lee.codifferential.clone() * (Q::from_int(1) - t.clone() * Q::from_int(2))
            - (Q::ratio(1, 2) + t.clone() * Q::from_int(3)) * r.lee.norm_sq.clone();
        assert_eq!(s - off_by_one, t * r.lee.norm_sq.clone());
    }

    #[test]
    fn vaisman_corollary_is_undefined() {
        let h = kodaira_structure::<Q>(1).unwrap();
        let lee = extract_lee_form(&h).unwrap();
        let cb = CurvatureBundle::new(&h, &lee).unwrap();
        assert!(corollary_t(&h, &lee, &cb).is_err());
    }
}
