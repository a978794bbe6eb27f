use serde::Serialize;

use crate::hermitian::{ConformalClass, HermitianStructure};
use crate::rigidity::{rigidity_report, BochnerRecord, IdentityReport, Outcome, RigidityReport};
use crate::scalar::{Scalar, ScalarMode};
use crate::Result;

pub const REPORT_SCHEMA: &str = "lcklab.report/1";
pub const TOOL: &str = "lcklab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Value in canonical text together with the residual of the test that
/// produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measured {
    pub value: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub conformal_class: ConformalClass,
    /// Components of `θ` of the input structure.
    pub lee_form: Vec<String>,
    /// Residual of `dω = θ∧ω`.
    pub lee_residual: f64,
    pub lee_norm_sq: String,
    pub gauduchon: bool,
    /// `d*θ` on the input structure; the residual is `|d*θ|`.
    pub codifferential: Measured,
    pub unimodular: bool,
    pub vaisman: Option<bool>,
    /// `|∇θ|` after normalizing `|θ| = 1`.
    pub nabla_theta_norm: Option<f64>,
    /// `Ric(ω) = 0`.
    pub calabi_yau: bool,
    pub chern_ricci_norm: f64,
    pub potential_form: Option<bool>,
    /// `t` in `Ric(ω) = t·dJθ` after normalizing `|θ| = 1`.
    pub fitted_t: Option<Measured>,
    pub fit_residual: Option<f64>,
    pub corollary_t: Option<String>,
    pub outcome: Outcome,
    pub alarm: bool,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqtBlock {
    pub value: String,
    pub residual: f64,
    pub jtheta_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub tolerance: f64,
    pub mode: ScalarMode,
}

impl Provenance {
    pub fn new(tolerance: f64, mode: ScalarMode) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            tolerance,
            mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema: String,
    pub name: String,
    pub dim: usize,
    pub classification: Classification,
    pub identities: Option<IdentityReport>,
    pub bochner: Option<BochnerRecord>,
    pub eqt: Option<EqtBlock>,
    pub provenance: Provenance,
}

impl ReportDocument {
    pub fn from_report<S: Scalar>(name: &str, dim: usize, r: &RigidityReport<S>, tol: f64) -> Self {
        let text = |v: &S| v.to_text();
        let lee = &r.input_lee;
        let classification = Classification {
            conformal_class: r.conformal_class,
            lee_form: lee.theta_vec().iter().map(text).collect(),
            lee_residual: lee.residual,
            lee_norm_sq: text(&lee.norm_sq),
            gauduchon: lee.gauduchon,
            codifferential: Measured {
                value: text(&lee.codifferential),
                residual: lee.codifferential.abs().to_f64_lossy(),
            },
            unimodular: r.unimodular,
            vaisman: r.vaisman,
            nabla_theta_norm: r.nabla_theta_norm,
            calabi_yau: r.chern_ricci_flat,
            chern_ricci_norm: r.chern_ricci_norm,
            potential_form: r.potential_form,
            fitted_t: r.fit.as_ref().and_then(|f| {
                f.t.as_ref().map(|t| Measured {
                    value: text(t),
                    residual: f.residual,
                })
            }),
            fit_residual: r.fit.as_ref().map(|f| f.residual),
            corollary_t: r.corollary_t.as_ref().map(text),
            outcome: r.outcome,
            alarm: r.alarm(),
            verdict: r.verdict.clone(),
        };
        Self {
            schema: REPORT_SCHEMA.into(),
            name: name.into(),
            dim,
            classification,
            identities: r.identities.clone(),
            bochner: r.bochner.clone(),
            eqt: r.eqt.as_ref().map(|e| EqtBlock {
                value: text(&e.value),
                residual: e.value.abs().to_f64_lossy(),
                jtheta_residual: e.jtheta_residual(),
            }),
            provenance: Provenance::new(tol, S::MODE),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let c = &self.classification;
        let opt = |b: Option<bool>| b.map_or("n/a".to_string(), |v| v.to_string());
        let mut out = format!("{} (dim {}, {} mode)\n", self.name, self.dim, self.provenance.mode);
        out += &format!("  class        {}\n", c.conformal_class);
        out += &format!("  lee form     [{}]  |θ|² = {}\n", c.lee_form.join(", "), c.lee_norm_sq);
        out += &format!("  gauduchon    {}  (d*θ = {})\n", c.gauduchon, c.codifferential.value);
        out += &format!("  vaisman      {}\n", opt(c.vaisman));
        out += &format!("  Ric(ω) = 0   {}\n", c.calabi_yau);
        if let Some(t) = &c.fitted_t {
            out += &format!("  fitted t     {}  (residual {:e})\n", t.value, t.residual);
        }
        if let Some(t) = &c.corollary_t {
            out += &format!("  corollary t  {t}\n");
        }
        if let Some(ids) = &self.identities {
            for r in &ids.records {
                out += &format!(
                    "  identity {:<12} {}  (residual {:e})\n",
                    r.name,
                    if r.pass { "pass" } else { "FAIL" },
                    r.residual
                );
            }
        }
        out += &format!("  verdict      {}\n", c.verdict);
        out
    }
}

/// Run the rigidity pipeline and build its document.
pub fn classify<S: Scalar>(
    name: &str,
    h: &HermitianStructure<S>,
    tol: f64,
) -> Result<(RigidityReport<S>, ReportDocument)> {
    let r = rigidity_report(h, tol)?;
    let doc = ReportDocument::from_report(name, h.dim(), &r, tol);
    Ok((r, doc))
}
