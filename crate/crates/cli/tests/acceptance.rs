//! One line per acceptance criterion, then a single assertion over all of them.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use lck_core::connections::chern_ricci_form;
use lck_core::constructions::{double_extension, flat_kahler_abelian, kodaira_structure, DoubleExtensionSpec};
use lck_core::hermitian::{ConformalClass, HermitianStructure};
use lck_core::linalg::Matrix;
use lck_core::models::ChartPoint;
use lck_core::models::{complex_two_form_to_real, fd_chern_ricci_coefficients, ot_model_run, FdOptions, OtModel};
use lck_core::report::{builtin_corpus, random_double_extension, StructureFile};
use lck_core::rigidity::{rigidity_report, RigidityReport};
use lck_core::sasaki::{
    cone_consistency_check, eta_einstein_fit, heisenberg_sasaki, sasaki_from_vaisman, sphere_sasaki,
    vaisman_sasaki_constants, CONE_RADII, CONE_TOL,
};
use lck_core::{Rational, Scalar};
use num_complex::Complex64;

const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

type CorpusReport = (String, HermitianStructure<Rational>, RigidityReport<Rational>);

struct Line {
    number: usize,
    title: &'static str,
    outcome: Outcome,
    elapsed: Duration,
}

fn run(number: usize, title: &'static str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> Line {
    let start = Instant::now();
    let mut outcome = f();
    let elapsed = start.elapsed();
    if let (Some(b), Ok(msg)) = (budget, &outcome) {
        if elapsed > b {
            outcome = Err(format!("{msg}; runtime {elapsed:.2?} exceeds {b:?}"));
        }
    }
    let line = Line {
        number,
        title,
        outcome,
        elapsed,
    };
    let (tag, msg) = match &line.outcome {
        Ok(m) => ("PASS", m),
        Err(m) => ("FAIL", m),
    };
    // Straight to the process stdout so the line shows without --nocapture.
    let _ = writeln!(
        std::io::stdout().lock(),
        "criterion {} {tag} {} [{:.2?}]: {msg}",
        line.number,
        line.title,
        line.elapsed
    );
    line
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ot_anchor() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in 1..=3 {
        let run = ot_model_run(s, 10, 2024 + s as u64, FdOptions::default(), 1e-6).map_err(|e| e.to_string())?;
        ensure(
            run.records.len() == 11,
            format!("s = {s}: expected base point plus 10 samples"),
        )?;
        for r in &run.records {
            ensure(
                r.ricci_half_dj_theta_error < 1e-6,
                format!("s = {s}: Ric vs ½dJθ residual {:e}", r.ricci_half_dj_theta_error),
            )?;
            ensure(r.pass, format!("s = {s}: model record failed at {:?}", r.point))?;
            worst = worst.max(r.ricci_half_dj_theta_error);
        }
        let base = &run.records[0];
        ensure(
            base.ww_closed == [0.0, -0.25],
            format!("s = {s}: closed (w,w̄) coefficient {:?}", base.ww_closed),
        )?;
        let fd = (base.ww_fd[0].powi(2) + (base.ww_fd[1] + 0.25).powi(2)).sqrt();
        ensure(
            fd < 1e-6,
            format!("s = {s}: finite-difference (w,w̄) coefficient off by {fd:e}"),
        )?;
    }
    Ok(format!(
        "s = 1..3, 10 random points each, max relative residual {worst:.2e}, (w,w̄) = -i/4 at w = i"
    ))
}

fn kodaira_anchor() -> Outcome {
    for n in 1..=3 {
        let h = kodaira_structure::<Rational>(n).map_err(|e| e.to_string())?;
        let r = rigidity_report(&h, TOL).map_err(|e| e.to_string())?;
        let t = r.fit.as_ref().and_then(|f| f.t.clone());
        ensure(
            r.conformal_class == ConformalClass::StrictLcK,
            format!("n = {n}: class {}", r.conformal_class),
        )?;
        ensure(r.gauduchon, format!("n = {n}: not Gauduchon"))?;
        ensure(
            r.nabla_theta_norm == Some(0.0),
            format!("n = {n}: ∇θ = {:?}", r.nabla_theta_norm),
        )?;
        let rho = chern_ricci_form(&h).ricci_form.ok_or("no Chern–Ricci form")?;
        ensure(rho.is_zero_within(0.0), format!("n = {n}: Ric(ω) not exactly zero"))?;
        ensure(t == Some(Rational::from_int(0)), format!("n = {n}: fitted t {t:?}"))?;
        ensure(
            r.potential_form == Some(true),
            format!("n = {n}: potential-form identity fails"),
        )?;
    }
    Ok("n = 1..3: StrictLcK, Gauduchon, ∇θ = 0, Ric(ω) = 0 exactly, t = 0, potential form exact".into())
}

fn corpus_reports() -> Result<Vec<CorpusReport>, String> {
    let corpus = builtin_corpus().map_err(|e| e.to_string())?;
    corpus
        .into_iter()
        .map(|e| {
            let r = rigidity_report(&e.structure, TOL).map_err(|err| format!("{}: {err}", e.name))?;
            Ok((e.name, e.structure, r))
        })
        .collect()
}

fn rigidity_property() -> Outcome {
    let reports = corpus_reports()?;
    ensure(reports.len() >= 30, format!("corpus has {} structures", reports.len()))?;
    for family in [
        "double_extension_abelian",
        "double_extension_euclidean",
        "kodaira",
        "ot_s",
    ] {
        ensure(
            reports.iter().any(|(n, _, _)| n.starts_with(family)),
            format!("corpus lacks the {family} family"),
        )?;
    }
    let mut instances = 0;
    for (name, _, r) in &reports {
        ensure(!r.alarm(), format!("{name}: alarm fired"))?;
        let t = r.fit.as_ref().and_then(|f| f.t.as_ref());
        if let (true, Some(t)) = (r.gauduchon, t) {
            if t.to_f64_lossy() <= 0.0 {
                ensure(
                    r.vaisman == Some(true),
                    format!("{name}: Gauduchon, t = {t}, not Vaisman"),
                )?;
                instances += 1;
            }
        }
    }
    Ok(format!(
        "{} structures, {instances} Gauduchon with t ≤ 0, all Vaisman, no alarm",
        reports.len()
    ))
}

fn identity_suite() -> Outcome {
    let reports = corpus_reports()?;
    let (mut strict, mut certified, mut compared, mut outside) = (0, 0, 0, Vec::new());
    for (name, _, r) in &reports {
        if r.conformal_class != ConformalClass::StrictLcK {
            continue;
        }
        strict += 1;
        let ids = r.identities.as_ref().ok_or(format!("{name}: identities missing"))?;
        ensure(
            ids.records.len() >= 5 && ids.records.iter().all(|x| x.residual < TOL),
            format!("{name}: identity residual {:e}", ids.max_residual()),
        )?;
        let t = r.fit.as_ref().and_then(|f| f.t.clone());
        if let (Some(t), true) = (&t, r.gauduchon) {
            let eqt = r.eqt.as_ref().ok_or(format!("{name}: certificate missing"))?;
            ensure(
                eqt.value.to_f64_lossy().abs() < TOL,
                format!("{name}: certificate value {}", eqt.value),
            )?;
            certified += 1;
            if r.vaisman == Some(false) {
                let c = r.corollary_t.as_ref().ok_or(format!("{name}: corollary t missing"))?;
                ensure(
                    (c.clone() - t.clone()).to_f64_lossy().abs() < TOL,
                    format!("{name}: corollary t {c} vs fit {t}"),
                )?;
                compared += 1;
            }
        } else if let (Some(t), Some(false)) = (&t, r.vaisman) {
            outside.push(format!("{name} (t = {t})"));
        }
    }
    ensure(
        compared >= 3,
        format!("only {compared} non-Vaisman Gauduchon fits compared"),
    )?;
    Ok(format!(
        "{strict} StrictLcK structures pass identities; {certified} certificates vanish; corollary t equals the fit on \
         {compared} non-Vaisman Gauduchon fits; non-Gauduchon fits outside the certificate's hypothesis: {}",
        if outside.is_empty() { "none".into() } else { outside.join(", ") }
    ))
}

fn double_extension_contract() -> Outcome {
    let mut count = 0;
    for seed in 0..20 {
        let (h, base) = random_double_extension(seed).map_err(|e| e.to_string())?;
        let v = h.alg().validate();
        ensure(
            v.jacobi && v.max_jacobi_residual == 0.0,
            format!("seed {seed}: Jacobi fails"),
        )?;
        ensure(h.alg().is_unimodular(), format!("seed {seed}: not unimodular"))?;
        let r = rigidity_report(&h, TOL).map_err(|e| e.to_string())?;
        ensure(r.vaisman == Some(true), format!("seed {seed}: not Vaisman"))?;
        let rho = chern_ricci_form(&h).ricci_form.ok_or("no Chern–Ricci form")?;
        ensure(rho.is_zero_within(0.0), format!("seed {seed}: Ric(ω) ≠ 0"))?;
        let m = base.dim();
        let dj = r.input_lee.dj_theta.to_matrix();
        let restricted = Matrix::from_fn(m, m, |a, b| -dj[(a + 1, b + 1)].clone());
        ensure(
            restricted == base.omega.to_matrix(),
            format!("seed {seed}: -dJθ|l ≠ ω_l"),
        )?;
        count += 1;
    }
    for pairs in 1..=3 {
        let base = flat_kahler_abelian::<Rational>(2 * pairs).map_err(|e| e.to_string())?;
        let m = base.dim();
        let spec = DoubleExtensionSpec::on_base(base, Matrix::zeros(m, m)).map_err(|e| e.to_string())?;
        let h = double_extension(&spec).map_err(|e| e.to_string())?;
        let k = kodaira_structure::<Rational>(pairs).map_err(|e| e.to_string())?;
        ensure(
            h.alg().entries() == k.alg().entries(),
            format!("D = 0 over ℝ^{}: structure constants differ from Kodaira", 2 * pairs),
        )?;
    }
    Ok(format!(
        "{count} random specs exact; D = 0 reproduces Kodaira for n = 1..3"
    ))
}

fn sasaki_anchor() -> Outcome {
    let h3 = heisenberg_sasaki::<f64>().map_err(|e| e.to_string())?;
    let fit = eta_einstein_fit(&h3).map_err(|e| e.to_string())?;
    let (a, b) = vaisman_sasaki_constants(&0.0, 2);
    ensure(
        (fit.alpha - a).abs() < 1e-8 && (fit.beta - b).abs() < 1e-8 && (a, b) == (-2.0, 4.0),
        format!("h3 fit ({}, {}) vs predicted ({a}, {b})", fit.alpha, fit.beta),
    )?;
    let mut fits = vec![("h3".to_string(), fit.alpha + fit.beta, fit.n)];
    let sphere = sphere_sasaki::<Rational>().map_err(|e| e.to_string())?;
    let f = eta_einstein_fit(&sphere).map_err(|e| e.to_string())?;
    fits.push(("sphere".into(), (f.alpha + f.beta).to_f64_lossy(), f.n));
    for (name, h, r) in corpus_reports()? {
        if r.vaisman == Some(true) && r.conformal_class == ConformalClass::StrictLcK {
            let s = sasaki_from_vaisman(&h).map_err(|e| format!("{name}: {e}"))?;
            let f = eta_einstein_fit(&s).map_err(|e| format!("{name}: {e}"))?;
            if f.residual < TOL {
                fits.push((name, (f.alpha + f.beta).to_f64_lossy(), f.n));
            }
        }
    }
    for (name, sum, n) in &fits {
        let expected = (2 * n) as f64 - 2.0;
        ensure(
            (sum - expected).abs() < TOL,
            format!("{name}: α + β = {sum}, expected {expected}"),
        )?;
    }
    let mut worst: f64 = 0.0;
    for s in [h3, sphere.convert::<f64>()] {
        let cone = cone_consistency_check(&s, 2, 7).map_err(|e| e.to_string())?;
        let radii: Vec<f64> = cone.samples.iter().map(|x| x.r).collect();
        ensure(
            CONE_RADII.iter().all(|r| radii.contains(r)),
            format!("cone radii {radii:?}"),
        )?;
        ensure(
            cone.max_residual < CONE_TOL,
            format!("cone residual {:e}", cone.max_residual),
        )?;
        worst = worst.max(cone.max_residual);
    }
    Ok(format!(
        "h3 (α, β) = (-2, 4); α + β = 2n - 2 on {} fits; cone residual {worst:.1e} at radii {CONE_RADII:?}",
        fits.len()
    ))
}

fn numerics_hygiene() -> Outcome {
    let m = OtModel::new(2).map_err(|e| e.to_string())?;
    let p = ChartPoint::new(vec![
        Complex64::new(0.8, 1.5),
        Complex64::new(-0.3, 0.9),
        Complex64::new(0.2, -0.4),
    ]);
    let exact = complex_two_form_to_real(&m.closed_form_ricci_coefficients(&p));
    let err = |step: f64, richardson: bool| -> Result<f64, String> {
        let fd = fd_chern_ricci_coefficients(&m, &p, FdOptions { step, richardson }).map_err(|e| e.to_string())?;
        Ok(complex_two_form_to_real(&fd).sub(&exact).max_abs())
    };
    let plain = (err(0.04, false)? / err(0.02, false)?).log2();
    let extrapolated = (err(0.04, true)? / err(0.02, true)?).log2();
    ensure(extrapolated >= 2.0, format!("extrapolated order {extrapolated:.2}"))?;
    ensure(plain > 1.9, format!("plain central-difference order {plain:.2}"))?;

    let mut worst: f64 = 0.0;
    for (name, h, exact) in corpus_reports()? {
        let hf = h.convert::<f64>();
        let float = rigidity_report(&hf, TOL).map_err(|e| format!("{name}: {e}"))?;
        let d = distance(&h, &hf, &exact, &float).map_err(|e| format!("{name}: {e}"))?;
        ensure(d < TOL, format!("{name}: rational and float differ by {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!(
        "order {extrapolated:.2} (extrapolated), {plain:.2} (plain); rational vs float max difference {worst:.1e}"
    ))
}

fn distance(
    h: &HermitianStructure<Rational>,
    hf: &HermitianStructure<f64>,
    a: &RigidityReport<Rational>,
    b: &RigidityReport<f64>,
) -> Result<f64, String> {
    ensure(
        a.conformal_class == b.conformal_class && a.gauduchon == b.gauduchon && a.vaisman == b.vaisman,
        "classification flags differ",
    )?;
    let mut d: f64 = 0.0;
    let mut pair = |x: &Rational, y: f64| d = d.max((x.to_f64_lossy() - y).abs());
    let rho_a = chern_ricci_form(h).ricci_form.ok_or("no form")?.to_matrix();
    let rho_b = chern_ricci_form(hf).ricci_form.ok_or("no form")?.to_matrix();
    rho_a
        .to_rows()
        .concat()
        .iter()
        .zip(rho_b.to_rows().concat())
        .for_each(|(x, y)| pair(x, y));
    let (la, lb) = (&a.input_lee, &b.input_lee);
    la.theta_vec().iter().zip(lb.theta_vec()).for_each(|(x, y)| pair(x, y));
    la.dj_theta
        .to_matrix()
        .to_rows()
        .concat()
        .iter()
        .zip(lb.dj_theta.to_matrix().to_rows().concat())
        .for_each(|(x, y)| pair(x, y));
    pair(&la.norm_sq, lb.norm_sq);
    pair(&la.codifferential, lb.codifferential);
    match (
        a.fit.as_ref().and_then(|f| f.t.as_ref()),
        b.fit.as_ref().and_then(|f| f.t),
    ) {
        (Some(x), Some(y)) => pair(x, y),
        (None, None) => {}
        _ => return Err("Einstein fit present in one mode only".into()),
    }
    if let (Some(x), Some(y)) = (&a.corollary_t, b.corollary_t) {
        pair(x, y);
    }
    if let (Some(x), Some(y)) = (&a.eqt, &b.eqt) {
        pair(&x.value, y.value);
    }
    if let (Some(x), Some(y)) = (&a.identities, &b.identities) {
        for (r, s) in x.records.iter().zip(&y.records) {
            d = d.max((r.lhs - s.lhs).abs()).max((r.rhs - s.rhs).abs());
        }
    }
    Ok(d)
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn lcklab(args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_lcklab"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    ))
}

fn cli_contract() -> Outcome {
    let dir = fixtures();
    let names = ["kodaira_n1", "ot_s1", "ot_s2", "heisenberg_3", "abelian_kahler_4"];
    for name in names {
        let path = dir.join(format!("{name}.json"));
        let p = path.to_str().ok_or("non-UTF-8 path")?;
        let (code, first) = lcklab(&["classify", "--json", p])?;
        ensure(code == 0, format!("{name}: exit {code}"))?;
        let (_, second) = lcklab(&["classify", "--json", p])?;
        ensure(first == second, format!("{name}: JSON differs between runs"))?;
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let file = StructureFile::from_json(&text).map_err(|e| e.to_string())?;
        ensure(file.to_json() == text, format!("{name}: file does not round-trip"))?;
    }
    let broken = dir.join("broken.json");
    let (code, _) = lcklab(&["classify", broken.to_str().ok_or("non-UTF-8 path")?])?;
    ensure(code == 2, format!("broken fixture: exit {code}"))?;

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    for name in names {
        std::fs::copy(
            dir.join(format!("{name}.json")),
            tmp.path().join(format!("{name}.json")),
        )
        .map_err(|e| e.to_string())?;
    }
    std::fs::copy(
        dir.join("perturbed/perturbed_kodaira.json"),
        tmp.path().join("perturbed_kodaira.json"),
    )
    .map_err(|e| e.to_string())?;
    let (code, out) = lcklab(&["suite", "--json", tmp.path().to_str().ok_or("non-UTF-8 path")?])?;
    ensure(code == 1, format!("suite with perturbed fixture: exit {code}"))?;
    let doc: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure(
        doc["failures"] == serde_json::json!(["perturbed_kodaira"]),
        format!("suite failures {}", doc["failures"]),
    )?;
    Ok(
        "5 bundled fixtures exit 0 with stable JSON; broken exits 2; perturbed_kodaira fails the suite with exit 1"
            .into(),
    )
}

#[test]
fn acceptance() {
    let lines = [
        run(1, "OT anchor", Some(Duration::from_secs(5)), ot_anchor),
        run(2, "Kodaira anchor", Some(Duration::from_secs(1)), kodaira_anchor),
        run(
            3,
            "rigidity over the corpus",
            Some(Duration::from_secs(30)),
            rigidity_property,
        ),
        run(4, "identity suite", None, identity_suite),
        run(5, "double-extension contract", None, double_extension_contract),
        run(6, "Sasaki anchor", None, sasaki_anchor),
        run(7, "numerics hygiene", None, numerics_hygiene),
        run(8, "CLI contract", None, cli_contract),
    ];
    let failed: Vec<usize> = lines.iter().filter(|l| l.outcome.is_err()).map(|l| l.number).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
