use std::path::Path;

use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use super::corpus::{builtin_corpus, CorpusEntry, EntryKind};
use super::document::{classify, Provenance, ReportDocument};
use super::file::StructureFile;
use crate::constructions::{hopf_surface_structure, FlatKahlerAlgebra};
use crate::error::{Error, Result};
use crate::hermitian::{ConformalClass, HermitianStructure};
use crate::models::{hopf_model_eval, ot_model_eval, ChartPoint, FdOptions, HopfModel, OtModel};
use crate::rigidity::{format_scalar, rigidity_report, RigidityReport};
use crate::sasaki::{eta_einstein_fit, heisenberg_sasaki, vaisman_sasaki_constants};
use crate::scalar::{Rational, Scalar, ScalarMode, FLOAT_TOL};

pub const SUITE_SCHEMA: &str = "lcklab.suite/1";

/// Tolerance for pointwise finite-difference checks.
pub const MODEL_TOL: f64 = 1e-6;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Pass = 0,
    CheckFailure = 1,
    Validation = 2,
    Alarm = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    fn new(name: &str, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            pass: residual < tol,
            detail: None,
        }
    }

    fn flag(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            residual: if pass { 0.0 } else { 1.0 },
            pass,
            detail: Some(detail.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryReport {
    pub name: String,
    pub kind: EntryKind,
    pub report: Option<ReportDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub validation_error: bool,
    pub checks: Vec<CheckRecord>,
    pub alarm: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema: String,
    pub entries: Vec<EntryReport>,
    pub model_checks: Vec<CheckRecord>,
    pub failures: Vec<String>,
    pub validation_errors: Vec<String>,
    pub alarms: Vec<String>,
    pub pass: bool,
    pub exit_status: ExitStatus,
    pub provenance: Provenance,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("suite report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let status = if e.alarm {
                "ALARM"
            } else if e.pass {
                "ok"
            } else {
                "FAIL"
            };
            let verdict = e
                .report
                .as_ref()
                .map(|r| r.classification.verdict.clone())
                .or_else(|| e.error.clone())
                .unwrap_or_default();
            out += &format!("{status:<5} {:<32} {verdict}\n", e.name);
            for c in e.checks.iter().filter(|c| !c.pass) {
                out += &format!("        failed check {} (residual {:e})\n", c.name, c.residual);
            }
        }
        for c in &self.model_checks {
            out += &format!(
                "{:<5} {:<32} residual {:e}\n",
                if c.pass { "ok" } else { "FAIL" },
                c.name,
                c.residual
            );
        }
        out += &format!(
            "{} entries, {} failures, {} validation errors, {} alarms\n",
            self.entries.len(),
            self.failures.len(),
            self.validation_errors.len(),
            self.alarms.len()
        );
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub tolerance: f64,
    pub mode: ScalarMode,
    /// Run the pointwise-model and Sasaki cross-checks.
    pub models: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            tolerance: FLOAT_TOL,
            mode: ScalarMode::Rational,
            models: true,
        }
    }
}

/// One structure to run, in exact form when available.
#[derive(Debug, Clone)]
pub struct SuiteInput {
    pub name: String,
    pub kind: EntryKind,
    pub rational: Option<HermitianStructure<Rational>>,
    pub float: HermitianStructure<f64>,
    pub base: Option<FlatKahlerAlgebra<Rational>>,
    pub expected_class: Option<String>,
}

impl From<CorpusEntry> for SuiteInput {
    fn from(e: CorpusEntry) -> Self {
        Self {
            name: e.name,
            kind: e.kind,
            float: e.structure.convert(),
            rational: Some(e.structure),
            base: e.base,
            expected_class: None,
        }
    }
}

/// Loaded input or the error that prevented loading.
pub type LoadedInput = std::result::Result<SuiteInput, (String, Error)>;

/// Load one structure file, or every `*.json` file of a directory.
pub fn load_inputs(path: &Path) -> Result<Vec<LoadedInput>> {
    let mut files = Vec::new();
    if path.is_dir() {
        for entry in std::fs::read_dir(path)? {
            let p = entry?.path();
            if p.extension().is_some_and(|e| e == "json") {
                files.push(p);
            }
        }
        files.sort();
    } else {
        files.push(path.to_path_buf());
    }
    let mut out = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(&f)?;
        let stem = f
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        out.push(load_input(&text).map_err(|e| (stem, e)));
    }
    Ok(out)
}

pub fn load_input(text: &str) -> Result<SuiteInput> {
    let file = StructureFile::from_json(text)?;
    let (rational, float) = match file.mode {
        ScalarMode::Rational => {
            let h = file.build::<Rational>()?;
            (Some(h.clone()), h.convert())
        }
        ScalarMode::Float => (None, file.build::<f64>()?),
    };
    Ok(SuiteInput {
        name: file.name.clone(),
        kind: EntryKind::File,
        rational,
        float,
        base: None,
        expected_class: file.metadata.and_then(|m| m.expected_class),
    })
}

/// Largest difference between the numeric content of two reports.
fn report_distance<A: Scalar, B: Scalar>(
    a: &RigidityReport<A>,
    b: &RigidityReport<B>,
) -> std::result::Result<f64, String> {
    if a.conformal_class != b.conformal_class {
        return Err(format!("class {} vs {}", a.conformal_class, b.conformal_class));
    }
    if a.gauduchon != b.gauduchon || a.vaisman != b.vaisman || a.outcome != b.outcome {
        return Err("Gauduchon, Vaisman or outcome flags differ".into());
    }
    let mut d: f64 = 0.0;
    let mut cmp = |x: f64, y: f64| d = d.max((x - y).abs());
    for (x, y) in a.input_lee.theta_vec().iter().zip(b.input_lee.theta_vec()) {
        cmp(x.to_f64_lossy(), y.to_f64_lossy());
    }
    cmp(a.input_lee.norm_sq.to_f64_lossy(), b.input_lee.norm_sq.to_f64_lossy());
    cmp(
        a.input_lee.codifferential.to_f64_lossy(),
        b.input_lee.codifferential.to_f64_lossy(),
    );
    cmp(a.chern_ricci_norm, b.chern_ricci_norm);
    cmp(a.nabla_theta_norm.unwrap_or(0.0), b.nabla_theta_norm.unwrap_or(0.0));
    let ta = a.fit.as_ref().and_then(|x| x.t.as_ref()).map(Scalar::to_f64_lossy);
    let tb = b.fit.as_ref().and_then(|x| x.t.as_ref()).map(Scalar::to_f64_lossy);
    match (ta, tb) {
        (Some(x), Some(y)) => cmp(x, y),
        (None, None) => {}
        _ => return Err("Einstein fit present in one mode only".into()),
    }
    if let (Some(x), Some(y)) = (&a.corollary_t, &b.corollary_t) {
        cmp(x.to_f64_lossy(), y.to_f64_lossy());
    }
    if let (Some(x), Some(y)) = (&a.eqt, &b.eqt) {
        cmp(x.value.to_f64_lossy(), y.value.to_f64_lossy());
    }
    if let (Some(x), Some(y)) = (&a.identities, &b.identities) {
        for (r, s) in x.records.iter().zip(&y.records) {
            cmp(r.lhs, s.lhs);
            cmp(r.rhs, s.rhs);
        }
    }
    Ok(d)
}

fn pipeline_checks<S: Scalar>(input: &SuiteInput, r: &RigidityReport<S>, tol: f64) -> Vec<CheckRecord> {
    let mut checks = Vec::new();
    let class = r.conformal_class.to_string();
    match &input.expected_class {
        Some(expected) => checks.push(CheckRecord::flag(
            "expected_class",
            &class == expected,
            format!("expected {expected}, got {class}"),
        )),
        None => checks.push(CheckRecord::flag(
            "lck",
            r.conformal_class != ConformalClass::NotLcK,
            format!("class {class}"),
        )),
    }
    if let Some(ids) = &r.identities {
        let mut c = CheckRecord::new("identities", ids.max_residual(), tol);
        c.pass &= ids.all_pass();
        checks.push(c);
    }
    if let Some(b) = &r.bochner {
        let mut c = CheckRecord::new("bochner", b.residual, tol);
        c.pass &= b.pass;
        checks.push(c);
    }
    if let Some(e) = &r.eqt {
        let res = e.value.abs().to_f64_lossy().max(e.jtheta_residual());
        checks.push(CheckRecord::new("eqt_certificate", res, tol));
    }
    let t = r.fit.as_ref().and_then(|f| f.t.clone());
    if r.vaisman == Some(false) {
        if let Some(t) = &t {
            // the formula rests on the integral identity, which needs a
            // compact quotient (unimodular) and d*θ = 0
            let applicable = r.unimodular && r.gauduchon;
            match (&r.corollary_t, applicable) {
                (Some(ct), true) => checks.push(CheckRecord::new(
                    "corollary_t",
                    (ct.clone() - t.clone()).abs().to_f64_lossy(),
                    tol,
                )),
                (None, true) => checks.push(CheckRecord::flag("corollary_t", false, "corollary value undefined")),
                (Some(ct), false) => checks.push(CheckRecord {
                    name: "corollary_t_informational".into(),
                    residual: (ct.clone() - t.clone()).abs().to_f64_lossy(),
                    pass: true,
                    detail: Some(format!(
                        "not checked: unimodular {}, Gauduchon {}; formula gives {}, fit gives {}",
                        r.unimodular,
                        r.gauduchon,
                        format_scalar(ct),
                        format_scalar(t)
                    )),
                }),
                (None, false) => {}
            }
        }
    }
    checks.push(CheckRecord::flag("no_alarm", !r.alarm(), r.verdict.clone()));
    checks
}

fn exact_checks(
    input: &SuiteInput,
    h: &HermitianStructure<Rational>,
    r: &RigidityReport<Rational>,
) -> Vec<CheckRecord> {
    let mut checks = Vec::new();
    let t = r.fit.as_ref().and_then(|f| f.t.clone());
    match input.kind {
        EntryKind::Kodaira => {
            let ok = t == Some(Rational::from_int(0))
                && r.potential_form == Some(true)
                && r.vaisman == Some(true)
                && r.chern_ricci_flat
                && r.gauduchon
                && r.conformal_class == ConformalClass::StrictLcK;
            checks.push(CheckRecord::flag(
                "kodaira_anchor",
                ok,
                "t = 0, Vaisman, Ric(ω) = 0, potential form",
            ));
        }
        EntryKind::Ot => {
            let half = Some(Rational::ratio(1, 2));
            let ok = t == half && r.corollary_t == half && r.vaisman == Some(false);
            checks.push(CheckRecord::flag(
                "ot_anchor",
                ok,
                format!("t = {}", t.as_ref().map(format_scalar).unwrap_or_else(|| "none".into())),
            ));
        }
        EntryKind::DoubleExtension => {
            let base = input.base.as_ref().expect("double extensions carry their base");
            let m = base.dim();
            let dj = r.input_lee.dj_theta.to_matrix();
            let restricted = crate::linalg::Matrix::from_fn(m, m, |a, b| -dj[(a + 1, b + 1)].clone());
            let omega_ok = restricted == base.omega.to_matrix();
            let jacobi = h.alg().validate();
            let ok = jacobi.jacobi
                && jacobi.max_jacobi_residual == 0.0
                && h.alg().is_unimodular()
                && r.vaisman == Some(true)
                && r.chern_ricci_flat
                && omega_ok;
            checks.push(CheckRecord::flag(
                "double_extension_contract",
                ok,
                format!(
                    "jacobi {}, unimodular {}, vaisman {:?}, Ric(ω) = 0 {}, -dJθ|l = ω_l {}",
                    jacobi.jacobi,
                    h.alg().is_unimodular(),
                    r.vaisman,
                    r.chern_ricci_flat,
                    omega_ok
                ),
            ));
        }
        _ => {}
    }
    checks
}

/// Run every pipeline check on one input.
pub fn run_entry(input: &SuiteInput, opts: &SuiteOptions) -> EntryReport {
    let tol = opts.tolerance;
    let mut entry = EntryReport {
        name: input.name.clone(),
        kind: input.kind,
        report: None,
        error: None,
        validation_error: false,
        checks: Vec::new(),
        alarm: false,
        pass: false,
    };
    let float = match classify(&input.name, &input.float, tol) {
        Ok(x) => x,
        Err(e) => {
            entry.error = Some(e.to_string());
            return entry;
        }
    };
    match &input.rational {
        Some(hq) => {
            let exact = match classify(&input.name, hq, tol) {
                Ok(x) => x,
                Err(e) => {
                    entry.error = Some(e.to_string());
                    return entry;
                }
            };
            let (doc, alarm, mut checks) = if opts.mode == ScalarMode::Rational {
                (exact.1.clone(), exact.0.alarm(), pipeline_checks(input, &exact.0, tol))
            } else {
                (float.1.clone(), float.0.alarm(), pipeline_checks(input, &float.0, tol))
            };
            checks.extend(exact_checks(input, hq, &exact.0));
            checks.push(match report_distance(&exact.0, &float.0) {
                Ok(d) => CheckRecord::new("float_agreement", d, tol),
                Err(msg) => CheckRecord::flag("float_agreement", false, msg),
            });
            entry.report = Some(doc);
            entry.alarm = alarm;
            entry.checks = checks;
        }
        None => {
            entry.checks = pipeline_checks(input, &float.0, tol);
            entry.alarm = float.0.alarm();
            entry.report = Some(float.1);
        }
    }
    entry.pass = entry.checks.iter().all(|c| c.pass);
    entry
}

/// Pointwise-model and Sasaki cross-checks against the invariant pipeline.
pub fn model_checks(tol: f64) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let opts = FdOptions::default();
    for s in 1..=3 {
        let m = OtModel::new(s).expect("s >= 1");
        let name = format!("ot_model_s{s}_base_point");
        let check = ot_model_eval(&m, &m.base_point(), opts, MODEL_TOL).and_then(|rec| {
            let h = crate::constructions::ot_solvable_structure::<f64>(s, None)?;
            let rho = crate::connections::chern_ricci_form(&h)
                .ricci_form
                .expect("Chern data carries its form");
            let closed = crate::linalg::Matrix::from_rows(rec.ricci_closed.clone())?;
            let metric = crate::linalg::Matrix::from_rows(rec.metric.clone())?;
            let frame = rho
                .to_matrix()
                .sub(&closed)
                .max_abs()
                .max(metric.sub(h.metric().matrix()).max_abs());
            let res = frame
                .max(rec.lee_error)
                .max(rec.ricci_fd_error)
                .max(rec.ricci_half_dj_theta_error);
            Ok(CheckRecord::new(&name, res, MODEL_TOL))
        });
        out.push(check.unwrap_or_else(|e| CheckRecord::flag(&name, false, e.to_string())));
    }
    let name = "hopf_model_vs_invariant";
    let check = HopfModel::new(2).and_then(|m| {
        let p = ChartPoint::new(vec![
            num_complex::Complex64::new(0.8, 0.3),
            num_complex::Complex64::new(-0.4, 0.5),
        ]);
        let rec = hopf_model_eval(&m, &p, opts, MODEL_TOL)?;
        let r = rigidity_report(&hopf_surface_structure::<Rational>()?, tol)?;
        let t = r.fit.and_then(|f| f.t).map(|t| t.to_f64_lossy()).unwrap_or(f64::NAN);
        let res = (rec.t - t).abs().max(rec.fit_residual).max(rec.lee_error);
        Ok(CheckRecord::new(name, res, MODEL_TOL))
    });
    out.push(check.unwrap_or_else(|e| CheckRecord::flag(name, false, e.to_string())));
    let name = "sasaki_heisenberg_constants";
    let check = heisenberg_sasaki::<Rational>().and_then(|s| {
        let fit = eta_einstein_fit(&s)?;
        let (a, b) = vaisman_sasaki_constants(&Rational::from_int(0), 2);
        let res = (fit.alpha - a)
            .abs()
            .to_f64_lossy()
            .max((fit.beta - b).abs().to_f64_lossy())
            .max(fit.residual);
        Ok(CheckRecord::new(name, res, tol))
    });
    out.push(check.unwrap_or_else(|e| CheckRecord::flag(name, false, e.to_string())));
    out
}

/// Run the suite on loaded inputs; entries are evaluated in parallel and
/// reported in name order.
pub fn run_suite(inputs: Vec<LoadedInput>, opts: &SuiteOptions) -> SuiteReport {
    let mut entries: Vec<EntryReport> = inputs
        .par_iter()
        .map(|inp| match inp {
            Ok(input) => run_entry(input, opts),
            Err((name, e)) => EntryReport {
                name: name.clone(),
                kind: EntryKind::File,
                report: None,
                error: Some(e.to_string()),
                validation_error: e.is_validation(),
                checks: Vec::new(),
                alarm: false,
                pass: false,
            },
        })
        .collect();
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    let model_checks = if opts.models {
        model_checks(opts.tolerance)
    } else {
        Vec::new()
    };
    let failures: Vec<String> = entries
        .iter()
        .filter(|e| !e.pass && !e.validation_error)
        .map(|e| e.name.clone())
        .chain(model_checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()))
        .collect();
    let validation_errors: Vec<String> = entries
        .iter()
        .filter(|e| e.validation_error)
        .map(|e| e.name.clone())
        .collect();
    let alarms: Vec<String> = entries.iter().filter(|e| e.alarm).map(|e| e.name.clone()).collect();
    let exit_status = if !alarms.is_empty() {
        ExitStatus::Alarm
    } else if !validation_errors.is_empty() {
        ExitStatus::Validation
    } else if !failures.is_empty() {
        ExitStatus::CheckFailure
    } else {
        ExitStatus::Pass
    };
    SuiteReport {
        schema: SUITE_SCHEMA.into(),
        pass: exit_status == ExitStatus::Pass,
        entries,
        model_checks,
        failures,
        validation_errors,
        alarms,
        exit_status,
        provenance: Provenance::new(opts.tolerance, opts.mode),
    }
}

/// The built-in corpus through [`run_suite`].
pub fn run_builtin_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let inputs = builtin_corpus()?.into_iter().map(|e| Ok(SuiteInput::from(e))).collect();
    Ok(run_suite(inputs, opts))
}
