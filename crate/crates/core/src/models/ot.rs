use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    complex_two_form_to_real, fd_chern_ricci_coefficients, fd_dj_theta, fd_lee_form, real_metric, relative_residual,
    rows, ChartPoint, FdOptions, MetricField,
};
use crate::error::{Error, Result};

/// Oeljeklaus–Toma metric on `ℍ^s × ℂ` with coordinates `(w_1, …, w_s, z)`:
/// `h_{jk̄} = M_{jk}/(y_j y_k)` with `M_{jj} = 1`, `M_{jk} = ½`, and
/// `h_{zz̄} = P = Π y_j`, where `y_j = Im w_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OtModel {
    pub s: usize,
}

impl OtModel {
    pub fn new(s: usize) -> Result<Self> {
        if s < 1 {
            return Err(Error::Precondition("OT model needs s >= 1".into()));
        }
        Ok(Self { s })
    }

    /// Base point `w_j = i`, `z = 0`.
    pub fn base_point(&self) -> ChartPoint {
        let mut c = vec![Complex64::i(); self.s];
        c.push(Complex64::new(0.0, 0.0));
        ChartPoint::new(c)
    }

    fn heights(&self, p: &ChartPoint) -> Vec<f64> {
        p.coords[..self.s].iter().map(|w| w.im).collect()
    }

    /// `Ric(ω) = -(i/4) Σ dw_j∧dw̄_j / y_j²` as complex coefficients.
    pub fn closed_form_ricci_coefficients(&self, p: &ChartPoint) -> DMatrix<Complex64> {
        let y = self.heights(p);
        DMatrix::from_fn(self.s + 1, self.s + 1, |a, b| {
            if a == b && a < self.s {
                Complex64::new(0.0, -0.25 / (y[a] * y[a]))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `θ = d log P = Σ dy_j / y_j`.
    pub fn closed_form_lee(&self, p: &ChartPoint) -> Vec<f64> {
        let y = self.heights(p);
        let mut theta = vec![0.0; 2 * self.s + 2];
        for (j, yj) in y.iter().enumerate() {
            theta[2 * j + 1] = 1.0 / yj;
        }
        theta
    }
}

impl MetricField for OtModel {
    fn complex_dim(&self) -> usize {
        self.s + 1
    }

    fn check_domain(&self, p: &ChartPoint) -> Result<()> {
        if p.coords.len() != self.s + 1 {
            return Err(Error::Dimension {
                expected: self.s + 1,
                got: p.coords.len(),
            });
        }
        if let Some(y) = self.heights(p).into_iter().find(|y| !(*y > 0.0)) {
            return Err(Error::Domain(format!("Im w = {y} is not positive")));
        }
        Ok(())
    }

    fn margin(&self, p: &ChartPoint) -> f64 {
        self.heights(p).into_iter().fold(f64::INFINITY, f64::min)
    }

    fn hermitian(&self, p: &ChartPoint) -> DMatrix<Complex64> {
        let y = self.heights(p);
        let prod: f64 = y.iter().product();
        DMatrix::from_fn(self.s + 1, self.s + 1, |a, b| {
            let v = if a == self.s || b == self.s {
                if a == b {
                    prod
                } else {
                    0.0
                }
            } else {
                let m = if a == b { 1.0 } else { 0.5 };
                m / (y[a] * y[b])
            };
            Complex64::new(v, 0.0)
        })
    }
}

/// Pointwise comparison of closed-form and finite-difference data on the OT
/// model.
#[derive(Debug, Clone, Serialize)]
pub struct OtRecord {
    pub s: usize,
    pub point: Vec<[f64; 2]>,
    pub metric: Vec<Vec<f64>>,
    pub lee_closed: Vec<f64>,
    pub lee_fd: Vec<f64>,
    pub lee_residual: f64,
    pub lee_consistent: bool,
    pub ricci_closed: Vec<Vec<f64>>,
    pub ricci_fd: Vec<Vec<f64>>,
    pub half_dj_theta_fd: Vec<Vec<f64>>,
    /// Coefficient of `dw_1∧dw̄_1` in `Ric(ω)`, as `[re, im]`.
    pub ww_closed: [f64; 2],
    pub ww_fd: [f64; 2],
    pub lee_error: f64,
    pub ricci_fd_error: f64,
    pub ricci_half_dj_theta_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn ot_model_eval(model: &OtModel, p: &ChartPoint, opts: FdOptions, tol: f64) -> Result<OtRecord> {
    model.check_domain(p)?;
    let lee = fd_lee_form(model, p, opts)?;
    let lee_closed = model.closed_form_lee(p);
    let lee_error = lee
        .theta
        .iter()
        .zip(&lee_closed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / lee_closed.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let closed_c = model.closed_form_ricci_coefficients(p);
    let fd_c = fd_chern_ricci_coefficients(model, p, opts)?;
    let ricci_closed = complex_two_form_to_real(&closed_c);
    let ricci_fd = complex_two_form_to_real(&fd_c);
    let half_dj = fd_dj_theta(model, p, opts)?.scale(&0.5);
    let ricci_fd_error = relative_residual(&ricci_fd, &ricci_closed);
    let ricci_half_dj_theta_error = relative_residual(&half_dj, &ricci_closed);
    let pass = lee.consistent && lee_error < tol && ricci_fd_error < tol && ricci_half_dj_theta_error < tol;
    Ok(OtRecord {
        s: model.s,
        point: p.coords.iter().map(|c| [c.re, c.im]).collect(),
        metric: rows(&real_metric(model, p)),
        lee_closed,
        lee_fd: lee.theta,
        lee_residual: lee.residual,
        lee_consistent: lee.consistent,
        ricci_closed: rows(&ricci_closed),
        ricci_fd: rows(&ricci_fd),
        half_dj_theta_fd: rows(&half_dj),
        ww_closed: [closed_c[(0, 0)].re, closed_c[(0, 0)].im],
        ww_fd: [fd_c[(0, 0)].re, fd_c[(0, 0)].im],
        lee_error,
        ricci_fd_error,
        ricci_half_dj_theta_error,
        tolerance: tol,
        pass,
    })
}

/// Base point followed by `points` random points of the domain.
#[derive(Debug, Clone, Serialize)]
pub struct OtRun {
    pub s: usize,
    pub seed: u64,
    pub options: FdOptions,
    pub records: Vec<OtRecord>,
    pub pass: bool,
}

/// Random point with `Im w_j ∈ [0.3, 3]`, `Re w_j ∈ [-5, 5]`, `|z| ≤ 2`.
pub fn ot_random_point<R: Rng>(s: usize, rng: &mut R) -> ChartPoint {
    let mut c: Vec<Complex64> = (0..s)
        .map(|_| Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(0.3..3.0)))
        .collect();
    c.push(Complex64::new(rng.gen_range(-1.4..1.4), rng.gen_range(-1.4..1.4)));
    ChartPoint::new(c)
}

pub fn ot_model_run(s: usize, points: usize, seed: u64, opts: FdOptions, tol: f64) -> Result<OtRun> {
    let model = OtModel::new(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![model.base_point()];
    pts.extend((0..points).map(|_| ot_random_point(s, &mut rng)));
    let records = pts
        .par_iter()
        .map(|p| ot_model_eval(&model, p, opts, tol))
        .collect::<Result<Vec<_>>>()?;
    let pass = records.iter().all(|r| r.pass);
    Ok(OtRun {
        s,
        seed,
        options: opts,
        records,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::chern_ricci_form;
    use crate::constructions::ot_solvable_structure;
    use crate::hermitian::extract_lee_form;

    fn point(ys: &[f64], xs: &[f64]) -> ChartPoint {
        let mut c: Vec<_> = ys.iter().zip(xs).map(|(y, x)| Complex64::new(*x, *y)).collect();
        c.push(Complex64::new(0.7, -0.3));
        ChartPoint::new(c)
    }

    #[test]
    fn base_point_component() {
        let m = OtModel::new(1).unwrap();
        let rec = ot_model_eval(&m, &m.base_point(), FdOptions::default(), 1e-6).unwrap();
        assert!(rec.pass, "{rec:?}");
        assert_eq!(rec.ww_closed, [0.0, -0.25]);
        assert!((rec.ww_fd[1] + 0.25).abs() < 1e-6);
        assert!(rec.ww_fd[0].abs() < 1e-6);
    }

    #[test]
    fn off_base_points() {
        for s in 1..=3 {
            let m = OtModel::new(s).unwrap();
            let ys = [0.5, 2.0, 1.3];
            let xs = [0.1, -3.0, 7.0];
            let rec = ot_model_eval(&m, &point(&ys[..s], &xs[..s]), FdOptions::default(), 1e-6).unwrap();
            assert!(rec.pass, "s = {s}: {rec:?}");
        }
    }

    #[test]
    fn outside_domain() {
        let m = OtModel::new(1).unwrap();
        let p = point(&[-1.0], &[0.0]);
        assert!(matches!(
            ot_model_eval(&m, &p, FdOptions::default(), 1e-6),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn convergence_order() {
        let m = OtModel::new(2).unwrap();
        let p = point(&[0.8, 1.5], &[0.0, 0.2]);
        let exact = complex_two_form_to_real(&m.closed_form_ricci_coefficients(&p));
        let err = |step: f64| {
            let opts = FdOptions {
                step,
                richardson: false,
            };
            let fd = complex_two_form_to_real(&fd_chern_ricci_coefficients(&m, &p, opts).unwrap());
            fd.sub(&exact).max_abs()
        };
        let (e1, e2) = (err(0.1), err(0.05));
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "measured order {order}");
    }

    #[test]
    fn base_point_matches_invariant_frame() {
        for s in 1..=2 {
            let m = OtModel::new(s).unwrap();
            let p = m.base_point();
            let h = ot_solvable_structure::<f64>(s, None).unwrap();
            let g = real_metric(&m, &p);
            assert!(g.sub(h.metric().matrix()).max_abs() < 1e-14);
            let lee = extract_lee_form(&h).unwrap();
            let fd = fd_lee_form(&m, &p, FdOptions::default()).unwrap();
            let diff = fd
                .theta
                .iter()
                .zip(lee.theta_vec())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-8);
            let rho = chern_ricci_form(&h).ricci_form.unwrap().to_matrix();
            let closed = complex_two_form_to_real(&m.closed_form_ricci_coefficients(&p));
            assert!(rho.sub(&closed).max_abs() < 1e-12, "s = {s}");
        }
    }
}
