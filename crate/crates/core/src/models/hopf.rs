use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{fd_chern_ricci, fd_dj_theta, fd_lee_form, rows, ChartPoint, FdOptions, MetricField};
use crate::error::{Error, Result};

/// Hopf metric `h = |z|^{-2} I` on `ℂ^n ∖ {0}`, with `θ = -d log|z|²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HopfModel {
    pub n: usize,
}

impl HopfModel {
    /// The Lee system needs real dimension at least 4.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition("Hopf model needs n >= 2".into()));
        }
        Ok(Self { n })
    }

    pub fn closed_form_lee(&self, p: &ChartPoint) -> Vec<f64> {
        let r2: f64 = p.coords.iter().map(|c| c.norm_sqr()).sum();
        p.to_real().into_iter().map(|v| -2.0 * v / r2).collect()
    }
}

impl MetricField for HopfModel {
    fn complex_dim(&self) -> usize {
        self.n
    }

    fn check_domain(&self, p: &ChartPoint) -> Result<()> {
        if p.coords.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: p.coords.len(),
            });
        }
        if self.margin(p) == 0.0 {
            return Err(Error::Domain("z = 0 is not in ℂ^n ∖ {0}".into()));
        }
        Ok(())
    }

    fn margin(&self, p: &ChartPoint) -> f64 {
        p.coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    fn hermitian(&self, p: &ChartPoint) -> DMatrix<Complex64> {
        let r2: f64 = p.coords.iter().map(|c| c.norm_sqr()).sum();
        DMatrix::identity(self.n, self.n) * Complex64::new(1.0 / r2, 0.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HopfRecord {
    pub n: usize,
    pub point: Vec<[f64; 2]>,
    pub lee_closed: Vec<f64>,
    pub lee_fd: Vec<f64>,
    pub lee_error: f64,
    pub ricci_fd: Vec<Vec<f64>>,
    pub dj_theta_fd: Vec<Vec<f64>>,
    /// Least-squares `t` in `Ric(ω) = t dJθ`.
    pub t: f64,
    pub t_expected: f64,
    pub fit_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn hopf_model_eval(model: &HopfModel, p: &ChartPoint, opts: FdOptions, tol: f64) -> Result<HopfRecord> {
    model.check_domain(p)?;
    let lee = fd_lee_form(model, p, opts)?;
    let lee_closed = model.closed_form_lee(p);
    let scale = lee_closed.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lee_error = lee
        .theta
        .iter()
        .zip(&lee_closed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale;
    let ric = fd_chern_ricci(model, p, opts)?;
    let dj = fd_dj_theta(model, p, opts)?;
    let dot = |a: &crate::linalg::Matrix<f64>, b: &crate::linalg::Matrix<f64>| -> f64 {
        (0..a.rows())
            .flat_map(|r| (0..a.cols()).map(move |c| (r, c)))
            .map(|(r, c)| a[(r, c)] * b[(r, c)])
            .sum()
    };
    let t = dot(&ric, &dj) / dot(&dj, &dj);
    let fit_residual = ric.sub(&dj.scale(&t)).max_abs() / ric.max_abs().max(f64::MIN_POSITIVE);
    let t_expected = -(model.n as f64) / 2.0;
    let pass = lee.consistent && lee_error < tol && fit_residual < tol && (t - t_expected).abs() < tol;
    Ok(HopfRecord {
        n: model.n,
        point: p.coords.iter().map(|c| [c.re, c.im]).collect(),
        lee_closed,
        lee_fd: lee.theta,
        lee_error,
        ricci_fd: rows(&ric),
        dj_theta_fd: rows(&dj),
        t,
        t_expected,
        fit_residual,
        tolerance: tol,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HopfRun {
    pub n: usize,
    pub seed: u64,
    pub options: FdOptions,
    pub records: Vec<HopfRecord>,
    pub pass: bool,
}

/// Random point with `0.3 ≤ |z| ≤ 3`.
pub fn hopf_random_point<R: Rng>(n: usize, rng: &mut R) -> ChartPoint {
    loop {
        let c: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let r = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if (0.3..=3.0).contains(&r) {
            return ChartPoint::new(c);
        }
    }
}

pub fn hopf_model_run(n: usize, points: usize, seed: u64, opts: FdOptions, tol: f64) -> Result<HopfRun> {
    let model = HopfModel::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut one = vec![Complex64::new(0.0, 0.0); n];
    one[0] = Complex64::new(1.0, 0.0);
    let mut pts = vec![ChartPoint::new(one)];
    pts.extend((0..points).map(|_| hopf_random_point(n, &mut rng)));
    let records = pts
        .par_iter()
        .map(|p| hopf_model_eval(&model, p, opts, tol))
        .collect::<Result<Vec<_>>>()?;
    let pass = records.iter().all(|r| r.pass);
    Ok(HopfRun {
        n,
        seed,
        options: opts,
        records,
        pass,
    })
}
