//! Coordinate models with closed-form Hermitian metrics and finite-difference
//! curvature oracles.
//!
//! Real coordinates are ordered `(x_1, y_1, …, x_n, y_n)` with `ζ_a = x_a + i y_a`
//! and `J ∂_{x_a} = ∂_{y_a}`. A Hermitian matrix `h_{ab̄}` gives the metric
//! `g(X, Y) = 2 Re Σ h_{ab̄} X^a \bar{Y^b}` and `ω = i Σ h_{ab̄} dζ_a∧dζ̄_b`.

mod hopf;
mod ot;

pub use hopf::{hopf_model_eval, hopf_model_run, hopf_random_point, HopfModel, HopfRecord, HopfRun};
pub use ot::{ot_model_eval, ot_model_run, ot_random_point, OtModel, OtRecord, OtRun};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::KForm;
use crate::hermitian::solve_lee_system;
use crate::linalg::Matrix;

/// Relative default step for finite differences.
pub const DEFAULT_STEP: f64 = 1e-4;

/// A point of a chart, as complex coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub coords: Vec<Complex64>,
}

impl ChartPoint {
    pub fn new(coords: Vec<Complex64>) -> Self {
        Self { coords }
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.coords.iter().flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn from_real(x: &[f64]) -> Self {
        Self {
            coords: x.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect(),
        }
    }
}

/// A Hermitian metric field on an open subset of `ℂ^n`.
pub trait MetricField: Sync {
    fn complex_dim(&self) -> usize;

    /// Fails outside the domain.
    fn check_domain(&self, p: &ChartPoint) -> Result<()>;

    /// Distance-like margin to the domain boundary; also the local scale.
    fn margin(&self, p: &ChartPoint) -> f64;

    /// `h_{ab̄}` at `p`.
    fn hermitian(&self, p: &ChartPoint) -> DMatrix<Complex64>;
}

/// Finite-difference settings: absolute step is `step · margin(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdOptions {
    pub step: f64,
    pub richardson: bool,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            richardson: true,
        }
    }
}

impl FdOptions {
    fn absolute_step<F: MetricField + ?Sized>(&self, field: &F, p: &ChartPoint) -> Result<f64> {
        field.check_domain(p)?;
        let margin = field.margin(p);
        let h = self.step * margin;
        if !(h > 0.0) || h >= margin / 2.0 {
            return Err(Error::StepTooLarge { step: h, margin });
        }
        Ok(h)
    }
}

/// Real metric matrix in the coordinate frame.
pub fn real_metric<F: MetricField + ?Sized>(field: &F, p: &ChartPoint) -> Matrix<f64> {
    let h = field.hermitian(p);
    let n = field.complex_dim();
    Matrix::from_fn(2 * n, 2 * n, |r, c| {
        let v = h[(r / 2, c / 2)];
        match (r % 2, c % 2) {
            (0, 0) | (1, 1) => 2.0 * v.re,
            (0, 1) => 2.0 * v.im,
            _ => -2.0 * v.im,
        }
    })
}

/// Standard complex structure on `ℝ^{2n}` in the interleaved order.
pub fn standard_j(dim: usize) -> Matrix<f64> {
    crate::hermitian::ComplexStructure::<f64>::standard(dim)
        .expect("even dimension")
        .matrix()
        .clone()
}

/// `ω(∂_μ, ∂_ν) = g(J∂_μ, ∂_ν)` as a matrix.
pub fn real_omega<F: MetricField + ?Sized>(field: &F, p: &ChartPoint) -> Matrix<f64> {
    let g = real_metric(field, p);
    standard_j(g.rows()).transpose().mul(&g)
}

/// Central first derivative of a vector-valued function along coordinate `mu`.
pub(crate) fn derivative(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], mu: usize, h: f64, richardson: bool) -> Vec<f64> {
    let central = |h: f64| {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[mu] += h;
        xm[mu] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        fp.iter()
            .zip(&fm)
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect::<Vec<f64>>()
    };
    let d1 = central(h);
    if !richardson {
        return d1;
    }
    let d2 = central(h / 2.0);
    d1.iter().zip(&d2).map(|(a, b)| (4.0 * b - a) / 3.0).collect()
}

/// Central second derivatives `∂_μ∂_ν F` of a scalar function.
fn hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64, richardson: bool) -> Vec<Vec<f64>> {
    let dim = x.len();
    let at = |shifts: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(i, s) in shifts {
            y[i] += s;
        }
        f(&y)
    };
    let central = |h: f64| {
        let mut out = vec![vec![0.0; dim]; dim];
        let f0 = f(x);
        for mu in 0..dim {
            out[mu][mu] = (at(&[(mu, h)]) - 2.0 * f0 + at(&[(mu, -h)])) / (h * h);
            for nu in mu + 1..dim {
                let v = (at(&[(mu, h), (nu, h)]) - at(&[(mu, h), (nu, -h)]) - at(&[(mu, -h), (nu, h)])
                    + at(&[(mu, -h), (nu, -h)]))
                    / (4.0 * h * h);
                out[mu][nu] = v;
                out[nu][mu] = v;
            }
        }
        out
    };
    let d1 = central(h);
    if !richardson {
        return d1;
    }
    let d2 = central(h / 2.0);
    d1.iter()
        .zip(&d2)
        .map(|(r1, r2)| r1.iter().zip(r2).map(|(a, b)| (4.0 * b - a) / 3.0).collect())
        .collect()
}

fn log_det<F: MetricField + ?Sized>(field: &F, x: &[f64]) -> f64 {
    field.hermitian(&ChartPoint::from_real(x)).determinant().re.ln()
}

/// Complex coefficients `c_{ab}` of `Σ c_{ab} dζ_a∧dζ̄_b` for
/// `-i∂∂̄ log det h`, by central differences.
pub fn fd_chern_ricci_coefficients<F: MetricField + ?Sized>(
    field: &F,
    p: &ChartPoint,
    opts: FdOptions,
) -> Result<DMatrix<Complex64>> {
    let h = opts.absolute_step(field, p)?;
    let x = p.to_real();
    let hess = hessian(&|y| log_det(field, y), &x, h, opts.richardson);
    let n = field.complex_dim();
    Ok(DMatrix::from_fn(n, n, |a, b| {
        let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
        // ∂_a ∂_b̄ F = ¼[(F_{x_a x_b} + F_{y_a y_b}) + i(F_{x_a y_b} - F_{y_a x_b})]
        let ddbar = Complex64::new(
            0.25 * (hess[xa][xb] + hess[ya][yb]),
            0.25 * (hess[xa][yb] - hess[ya][xb]),
        );
        -Complex64::i() * ddbar
    }))
}

/// Real 2-form matrix of `Σ c_{ab} dζ_a∧dζ̄_b`.
pub fn complex_two_form_to_real(c: &DMatrix<Complex64>) -> Matrix<f64> {
    let n = c.nrows();
    let dzeta = |a: usize, mu: usize| -> Complex64 {
        if mu == 2 * a {
            Complex64::new(1.0, 0.0)
        } else if mu == 2 * a + 1 {
            Complex64::i()
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    Matrix::from_fn(2 * n, 2 * n, |mu, nu| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                acc += c[(a, b)] * (dzeta(a, mu) * dzeta(b, nu).conj() - dzeta(a, nu) * dzeta(b, mu).conj());
            }
        }
        acc.re
    })
}

/// `-i∂∂̄ log det h` at `p` as a real 2-form matrix.
pub fn fd_chern_ricci<F: MetricField + ?Sized>(field: &F, p: &ChartPoint, opts: FdOptions) -> Result<Matrix<f64>> {
    Ok(complex_two_form_to_real(&fd_chern_ricci_coefficients(field, p, opts)?))
}

/// `dω` at `p` by central differences of `ω`.
pub fn fd_d_omega<F: MetricField + ?Sized>(field: &F, p: &ChartPoint, opts: FdOptions) -> Result<KForm<f64>> {
    let h = opts.absolute_step(field, p)?;
    let x = p.to_real();
    let dim = x.len();
    let flat = |y: &[f64]| -> Vec<f64> {
        let w = real_omega(field, &ChartPoint::from_real(y));
        (0..dim * dim).map(|k| w[(k / dim, k % dim)]).collect()
    };
    let partials: Vec<Vec<f64>> = (0..dim)
        .map(|mu| derivative(&flat, &x, mu, h, opts.richardson))
        .collect();
    let w = |mu: usize, a: usize, b: usize| partials[mu][a * dim + b];
    let mut out = KForm::zero(dim, 3);
    for a in 0..dim {
        for b in a + 1..dim {
            for c in b + 1..dim {
                out.set(&[a, b, c], w(a, b, c) - w(b, a, c) + w(c, a, b));
            }
        }
    }
    Ok(out)
}

/// Pointwise Lee form by solving `dω = θ∧ω` with finite-difference `dω`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointLee {
    pub theta: Vec<f64>,
    pub residual: f64,
    pub consistent: bool,
}

pub fn fd_lee_form<F: MetricField + ?Sized>(field: &F, p: &ChartPoint, opts: FdOptions) -> Result<PointLee> {
    let omega = KForm::from_matrix(&real_omega(field, p));
    let domega = fd_d_omega(field, p, opts)?;
    let sol = solve_lee_system(&omega, &domega)?;
    Ok(PointLee {
        theta: sol.theta,
        residual: sol.residual,
        consistent: sol.consistent,
    })
}

/// `dJθ` at `p`, differentiating the finite-difference Lee form once more.
pub fn fd_dj_theta<F: MetricField + ?Sized>(field: &F, p: &ChartPoint, opts: FdOptions) -> Result<Matrix<f64>> {
    let h = opts.absolute_step(field, p)?;
    let x = p.to_real();
    let dim = x.len();
    let j = standard_j(dim);
    let j_theta = |y: &[f64]| -> Vec<f64> {
        let lee = fd_lee_form(field, &ChartPoint::from_real(y), opts).expect("inner point in domain");
        j.transpose().mul_vec(&lee.theta).into_iter().map(|v| -v).collect()
    };
    // outer differences use a coarser step so inner roundoff stays small
    let outer = (10.0 * h).min(field.margin(p) / 4.0);
    let partials: Vec<Vec<f64>> = (0..dim)
        .map(|mu| derivative(&j_theta, &x, mu, outer, opts.richardson))
        .collect();
    Ok(Matrix::from_fn(dim, dim, |a, b| partials[a][b] - partials[b][a]))
}

/// Largest entry of `a - b` relative to the largest entry of `b`.
pub fn relative_residual(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
    a.sub(b).max_abs() / b.max_abs().max(f64::MIN_POSITIVE)
}

/// Matrix rows for JSON output.
pub fn rows(m: &Matrix<f64>) -> Vec<Vec<f64>> {
    m.to_rows()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Constant(usize);

    impl MetricField for Constant {
        fn complex_dim(&self) -> usize {
            self.0
        }
        fn check_domain(&self, _p: &ChartPoint) -> Result<()> {
            Ok(())
        }
        fn margin(&self, _p: &ChartPoint) -> f64 {
            1.0
        }
        fn hermitian(&self, _p: &ChartPoint) -> DMatrix<Complex64> {
            let mut h = DMatrix::identity(self.0, self.0);
            h[(0, 1)] = Complex64::new(0.2, 0.1);
            h[(1, 0)] = Complex64::new(0.2, -0.1);
            h
        }
    }

    // h = diag(e^{f(x)}, e^{-f(x)}): det h = 1 everywhere, but not constant
    struct UnitDeterminant;

    impl MetricField for UnitDeterminant {
        fn complex_dim(&self) -> usize {
            2
        }
        fn check_domain(&self, _p: &ChartPoint) -> Result<()> {
            Ok(())
        }
        fn margin(&self, _p: &ChartPoint) -> f64 {
            1.0
        }
        fn hermitian(&self, p: &ChartPoint) -> DMatrix<Complex64> {
            let f = p.coords[0].re.sin() + p.coords[1].im;
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                Complex64::new(f.exp(), 0.0),
                Complex64::new((-f).exp(), 0.0),
            ]))
        }
    }

    fn point() -> ChartPoint {
        ChartPoint::new(vec![Complex64::new(0.3, -0.2), Complex64::new(1.1, 0.4)])
    }

    #[test]
    fn constant_field_is_ricci_flat_and_kahler() {
        let ric = fd_chern_ricci(&Constant(2), &point(), FdOptions::default()).unwrap();
        assert!(ric.max_abs() < 1e-6);
        let lee = fd_lee_form(&Constant(2), &point(), FdOptions::default()).unwrap();
        assert!(lee.theta.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn unit_determinant_field_is_ricci_flat() {
        let ric = fd_chern_ricci(&UnitDeterminant, &point(), FdOptions::default()).unwrap();
        assert!(ric.max_abs() < 1e-6);
    }

    #[test]
    fn real_metric_matches_hermitian_pairing() {
        let g = real_metric(&Constant(2), &point());
        assert!(g.is_symmetric(1e-15));
        // ω is J-invariant and ω(x, Jy) = g(x, y)
        let w = real_omega(&Constant(2), &point());
        let j = standard_j(4);
        assert!(w.mul(&j).sub(&g).max_abs() < 1e-15);
    }

    #[test]
    fn two_form_conversion() {
        // i dζ∧dζ̄ = 2 dx∧dy
        let c = DMatrix::from_element(1, 1, Complex64::i());
        let m = complex_two_form_to_real(&c);
        assert_eq!(m[(0, 1)], 2.0);
        assert_eq!(m[(1, 0)], -2.0);
    }

    #[test]
    fn step_too_large_rejected() {
        let opts = FdOptions {
            step: 0.6,
            richardson: true,
        };
        assert!(matches!(
            fd_chern_ricci(&Constant(2), &point(), opts),
            Err(Error::StepTooLarge { .. })
        ));
    }
}
