use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lck_core::constructions::{
    double_extension, flat_kahler_abelian, flat_kahler_euclidean, heisenberg_tilted_structure, kodaira_structure,
    ot_solvable_structure, DoubleExtensionSpec,
};
use lck_core::hermitian::HermitianStructure;
use lck_core::linalg::Matrix;
use lck_core::models::{hopf_model_run, ot_model_run, FdOptions, DEFAULT_STEP};
use lck_core::report::{
    classify, load_inputs, random_double_extension_on, run_builtin_suite, run_suite, BaseKind, ExitStatus, Metadata,
    StructureFile, SuiteOptions,
};
use lck_core::rigidity::rigidity_report;
use lck_core::sasaki::{heisenberg_sasaki, sasaki_from_vaisman, sasaki_report, sphere_sasaki, SasakiReport};
use lck_core::scalar::FLOAT_TOL;
use lck_core::{Error, Rational, Scalar, ScalarMode};

#[derive(Parser)]
#[command(
    name = "lcklab",
    version,
    about = "Invariant lcK structures: classification, rigidity checks and models"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Absolute tolerance for pass/fail decisions.
    #[arg(long, global = true, default_value_t = FLOAT_TOL)]
    tolerance: f64,
    /// Scalar field used for the computation.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Rational,
    Float,
}

impl From<Mode> for ScalarMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Rational => ScalarMode::Rational,
            Mode::Float => ScalarMode::Float,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify one structure file and run the rigidity pipeline.
    Classify { file: PathBuf },
    /// Run every check over a file, a directory of files or the built-in corpus.
    Suite {
        path: Option<PathBuf>,
        #[arg(long)]
        builtin_corpus: bool,
        /// Skip the pointwise-model and Sasaki cross-checks.
        #[arg(long)]
        no_models: bool,
    },
    /// Write a structure file for a standard construction.
    #[command(subcommand)]
    Construct(Construct),
    /// Compare closed forms with finite differences on a coordinate model.
    #[command(subcommand)]
    Model(Model),
    /// Fit the η-Einstein constants of a Sasaki structure and check the cone relation.
    Sasaki {
        /// Vaisman structure file; its Sasaki structure lives on ker θ.
        file: Option<PathBuf>,
        #[arg(long, value_enum)]
        builtin: Option<BuiltinSasaki>,
        #[arg(long, default_value_t = 2)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BuiltinSasaki {
    Heisenberg,
    Sphere,
}

#[derive(Subcommand)]
enum Construct {
    Kodaira {
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// `ℝ ⊕ h_3` with the Kodaira J and a tilted metric.
    Heisenberg {
        #[arg(long, default_value = "1/3")]
        tilt: String,
    },
    DoubleExtension {
        #[arg(long, value_enum, default_value = "abelian")]
        base: Base,
        /// Complex dimension of the flat Kähler base.
        #[arg(long, default_value_t = 1)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use D = 0 instead of a random derivation.
        #[arg(long)]
        zero: bool,
    },
    Ot {
        #[arg(long, default_value_t = 1)]
        s: usize,
        /// Comma-separated rotation rates, one per factor.
        #[arg(long, value_delimiter = ',')]
        angles: Option<Vec<String>>,
    },
    FlatKahler {
        /// Complex dimension.
        #[arg(long, default_value_t = 2)]
        pairs: usize,
        #[arg(long)]
        euclidean: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    Abelian,
    Euclidean,
}

#[derive(Subcommand)]
enum Model {
    Ot {
        #[arg(long, default_value_t = 1)]
        s: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    Hopf {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
}

#[derive(Args)]
struct Sampling {
    /// Random points in addition to the base point.
    #[arg(long, default_value_t = 10)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Finite-difference step relative to the local scale.
    #[arg(long, default_value_t = DEFAULT_STEP)]
    step: f64,
    /// Model tolerance.
    #[arg(long, default_value_t = 1e-6)]
    model_tolerance: f64,
}

impl Sampling {
    fn options(&self) -> FdOptions {
        FdOptions {
            step: self.step,
            richardson: true,
        }
    }
}

struct Output {
    text: String,
    status: ExitStatus,
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, Error> {
    Ok(std::fs::read_to_string(path)?)
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let g = &cli.global;
    match &cli.command {
        Command::Classify { file } => classify_file(g, file),
        Command::Suite {
            path,
            builtin_corpus,
            no_models,
        } => {
            let opts = SuiteOptions {
                tolerance: g.tolerance,
                mode: g.mode.map_or(ScalarMode::Rational, Into::into),
                models: !no_models,
            };
            let report = match (path, builtin_corpus) {
                (None, true) => run_builtin_suite(&opts)?,
                (Some(p), false) => run_suite(load_inputs(p)?, &SuiteOptions { models: false, ..opts }),
                _ => return Err(Error::Precondition("give either a path or --builtin-corpus".into())),
            };
            let text = if g.json { report.to_json() } else { report.to_text() };
            Ok(Output {
                text,
                status: report.exit_status,
            })
        }
        Command::Construct(c) => construct(g, c),
        Command::Model(m) => model(g, m),
        Command::Sasaki {
            file,
            builtin,
            samples,
            seed,
        } => sasaki(g, file.as_deref(), *builtin, *samples, *seed),
    }
}

fn classify_file(g: &Global, path: &Path) -> Result<Output, Error> {
    let file = StructureFile::from_json(&read(path)?)?;
    let mode = g.mode.map_or(file.mode, Into::into);
    let (alarm, doc) = match mode {
        ScalarMode::Rational => {
            let h = file.build::<Rational>()?;
            let (r, doc) = classify(&file.name, &h, g.tolerance)?;
            (r.alarm(), doc)
        }
        ScalarMode::Float => {
            let h = file.build::<f64>()?;
            let (r, doc) = classify(&file.name, &h, g.tolerance)?;
            (r.alarm(), doc)
        }
    };
    Ok(Output {
        text: if g.json { doc.to_json() } else { doc.to_text() },
        status: if alarm { ExitStatus::Alarm } else { ExitStatus::Pass },
    })
}

fn structure_output(g: &Global, name: &str, h: &HermitianStructure<Rational>, source: &str) -> Output {
    let metadata = Some(Metadata {
        source: Some(source.into()),
        expected_class: None,
    });
    let file = match g.mode.map_or(ScalarMode::Rational, Into::into) {
        ScalarMode::Rational => StructureFile::from_structure(name, h, metadata),
        ScalarMode::Float => StructureFile::from_structure(name, &h.convert::<f64>(), metadata),
    };
    Output {
        text: file.to_json(),
        status: ExitStatus::Pass,
    }
}

fn construct(g: &Global, c: &Construct) -> Result<Output, Error> {
    let (name, h, source) = match c {
        Construct::Kodaira { n } => (
            format!("kodaira_n{n}"),
            kodaira_structure(*n)?,
            "construct kodaira".to_string(),
        ),
        Construct::Heisenberg { tilt } => {
            let t = Rational::parse_text(tilt)?;
            (
                "heisenberg_3".into(),
                heisenberg_tilted_structure(t)?,
                format!("construct heisenberg --tilt {tilt}"),
            )
        }
        Construct::DoubleExtension {
            base,
            pairs,
            seed,
            zero,
        } => {
            let kind = match base {
                Base::Abelian => BaseKind::Abelian,
                Base::Euclidean => BaseKind::Euclidean,
            };
            let h = if *zero {
                let b = match kind {
                    BaseKind::Abelian => flat_kahler_abelian(2 * pairs)?,
                    BaseKind::Euclidean => flat_kahler_euclidean(&vec![Rational::from_int(1); *pairs])?,
                };
                let m = b.dim();
                double_extension(&DoubleExtensionSpec::on_base(b, Matrix::zeros(m, m))?)?
            } else {
                random_double_extension_on(kind, *pairs, *seed)?.0
            };
            let label = match kind {
                BaseKind::Abelian => "abelian",
                BaseKind::Euclidean => "euclidean",
            };
            (
                format!(
                    "double_extension_{label}_p{pairs}_seed{seed}{}",
                    if *zero { "_zero" } else { "" }
                ),
                h,
                format!("construct double-extension --base {label} --pairs {pairs} --seed {seed}"),
            )
        }
        Construct::Ot { s, angles } => {
            let parsed = angles
                .as_ref()
                .map(|a| a.iter().map(|t| Rational::parse_text(t)).collect::<Result<Vec<_>, _>>())
                .transpose()?;
            let name = if parsed.is_some() {
                format!("ot_s{s}_rotated")
            } else {
                format!("ot_s{s}")
            };
            (
                name,
                ot_solvable_structure(*s, parsed.as_deref())?,
                "construct ot".to_string(),
            )
        }
        Construct::FlatKahler { pairs, euclidean } => {
            let b = if *euclidean {
                flat_kahler_euclidean(&vec![Rational::from_int(1); *pairs])?
            } else {
                flat_kahler_abelian(2 * pairs)?
            };
            let name = if *euclidean {
                format!("euclidean_kahler_{}", 2 * pairs)
            } else {
                format!("abelian_kahler_{}", 2 * pairs)
            };
            let h = HermitianStructure::new(b.alg, b.j.matrix().clone(), b.g.matrix().clone())?;
            (name, h, "construct flat-kahler".to_string())
        }
    };
    Ok(structure_output(g, &name, &h, &source))
}

fn model(g: &Global, m: &Model) -> Result<Output, Error> {
    let (value, pass, text) = match m {
        Model::Ot { s, sampling } => {
            let run = ot_model_run(
                *s,
                sampling.points,
                sampling.seed,
                sampling.options(),
                sampling.model_tolerance,
            )?;
            let mut text = format!("OT model s = {s}, {} points\n", run.records.len());
            for r in &run.records {
                text += &format!(
                    "  {} Ric fd {:.2e}  Ric vs ½dJθ {:.2e}  θ {:.2e}  (w,w̄) coefficient {:+.6}{:+.6}i\n",
                    if r.pass { "ok  " } else { "FAIL" },
                    r.ricci_fd_error,
                    r.ricci_half_dj_theta_error,
                    r.lee_error,
                    r.ww_closed[0],
                    r.ww_closed[1]
                );
            }
            (serde_json::to_value(&run)?, run.pass, text)
        }
        Model::Hopf { n, sampling } => {
            let run = hopf_model_run(
                *n,
                sampling.points,
                sampling.seed,
                sampling.options(),
                sampling.model_tolerance,
            )?;
            let mut text = format!("Hopf model n = {n}, {} points\n", run.records.len());
            for r in &run.records {
                text += &format!(
                    "  {} t = {:.9} (expected {})  fit residual {:.2e}\n",
                    if r.pass { "ok  " } else { "FAIL" },
                    r.t,
                    r.t_expected,
                    r.fit_residual
                );
            }
            (serde_json::to_value(&run)?, run.pass, text)
        }
    };
    Ok(Output {
        text: if g.json { json(&value) } else { text },
        status: if pass {
            ExitStatus::Pass
        } else {
            ExitStatus::CheckFailure
        },
    })
}

fn sasaki(
    g: &Global,
    file: Option<&Path>,
    builtin: Option<BuiltinSasaki>,
    samples: usize,
    seed: u64,
) -> Result<Output, Error> {
    let tol = g.tolerance;
    let report: SasakiReport = match (file, builtin) {
        (Some(path), None) => {
            let f = StructureFile::from_json(&read(path)?)?;
            let h = f.build::<Rational>()?;
            let r = rigidity_report(&h, tol)?;
            let t = r.fit.and_then(|f| f.t);
            let s = sasaki_from_vaisman(&h)?;
            sasaki_report(&f.name, &s, t.as_ref(), samples, seed, tol)?
        }
        (None, Some(BuiltinSasaki::Heisenberg)) => sasaki_report(
            "heisenberg_sasaki",
            &heisenberg_sasaki::<Rational>()?,
            Some(&Rational::from_int(0)),
            samples,
            seed,
            tol,
        )?,
        (None, Some(BuiltinSasaki::Sphere)) => sasaki_report(
            "sphere_sasaki",
            &sphere_sasaki::<Rational>()?,
            Some(&Rational::from_int(-1)),
            samples,
            seed,
            tol,
        )?,
        _ => return Err(Error::Precondition("give either a structure file or --builtin".into())),
    };
    let text = if g.json {
        json(&report)
    } else {
        let mut t = format!(
            "{} (dim {}): α = {}, β = {}, fit residual {:e}, α+β-(2n-2) = {}\n",
            report.name, report.dim, report.alpha, report.beta, report.fit_residual, report.sum_defect
        );
        if let (Some(vt), Some(p)) = (&report.vaisman_t, &report.predicted) {
            t += &format!("  Vaisman t = {vt} predicts (α, β) = ({}, {})\n", p[0], p[1]);
        }
        t += &format!(
            "  cone relation: max residual {:e}, spread over radii {:e}\n  {}\n",
            report.cone.max_residual,
            report.cone.spread,
            if report.pass { "pass" } else { "FAIL" }
        );
        t
    };
    Ok(Output {
        text,
        status: if report.pass {
            ExitStatus::Pass
        } else {
            ExitStatus::CheckFailure
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Some(path) = &cli.global.out {
                if let Err(e) = std::fs::write(path, &out.text) {
                    eprintln!("error: {e}");
                    return ExitCode::from(ExitStatus::Validation.code() as u8);
                }
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ExitStatus::Validation.code() as u8)
        }
    }
}
