//! Incomplete beta function, the scaled beta models of `F(ν)`, and their
//! least-squares fit to estimated grids.
//!
//! `beta_inc` is unregularized: `B_ν(a,b) = ∫₀^ν w^{a−1}(1−w)^{b−1} dw`.

use std::io::Write;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::estimator::FGrid;
use crate::{Case, Error, Result};

const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;
const CF_MAX_ITER: usize = 20_000;

/// Complete beta function `B(a,b)`.
pub fn beta(a: f64, b: f64) -> f64 {
    if a + b < 170.0 {
        libm::tgamma(a) * libm::tgamma(b) / libm::tgamma(a + b)
    } else {
        (libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)).exp()
    }
}

/// Modified Lentz evaluation of the continued fraction for `I_x(a,b)`,
/// without the `x^a (1−x)^b / a` prefactor.
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

fn beta_inc_direct(x: f64, a: f64, b: f64) -> f64 {
    let front = (a * x.ln() + b * (-x).ln_1p()).exp() / a;
    front * beta_cf(x, a, b)
}

/// Unregularized incomplete beta `B_x(a,b)` for `x ∈ [0,1]`, `a, b > 0`.
pub fn beta_inc(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::BetaDomain { nu: x, a, b });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if b == 1.0 {
        return Ok(x.powf(a) / a);
    }
    if a == 1.0 {
        return Ok(-(b * (-x).ln_1p()).exp_m1() / b);
    }
    if x == 1.0 {
        return Ok(beta(a, b));
    }
    if x > (a + 1.0) / (a + b + 2.0) {
        Ok(beta(a, b) - beta_inc_direct(1.0 - x, b, a))
    } else {
        Ok(beta_inc_direct(x, a, b))
    }
}

/// Regularized `I_x(a,b) = B_x(a,b) / B(a,b)`.
pub fn beta_inc_regularized(x: f64, a: f64, b: f64) -> Result<f64> {
    Ok(beta_inc(x, a, b)? / beta(a, b))
}

/// `c · B_ν(a,b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GModel {
    pub scale: f64,
    pub a: f64,
    pub b: f64,
}

impl GModel {
    pub fn new(scale: f64, a: f64, b: f64) -> Result<Self> {
        if !(scale >= 0.0 && scale.is_finite())
            || !(a > 0.0 && a.is_finite())
            || !(b > 0.0 && b.is_finite())
        {
            return Err(Error::InvalidConfig(format!(
                "beta model needs c ≥ 0 and a, b > 0 (got c={scale}, a={a}, b={b})"
            )));
        }
        Ok(GModel { scale, a, b })
    }

    /// The recognized closed-form models.
    pub fn closed_form(case: Case) -> Self {
        match case {
            Case::Real => {
                let a = 0.5;
                let b = 3f64.sqrt();
                let scale = (4.0 + 1.0 / (5.0 * 2f64.sqrt())) * beta(a, b).powi(8);
                GModel { scale, a, b }
            }
            Case::Complex => {
                let a = 2.0 * 6f64.sqrt() / 5.0;
                let b = 3.0 / 2f64.sqrt();
                let denom = 2.0 * 2f64.cbrt() + 10f64.powf(0.75) / 3f64.powf(2.0 / 3.0);
                let scale = 1e8 / denom * beta(a, b).powi(14);
                GModel { scale, a, b }
            }
        }
    }

    /// A model that is identically zero.
    pub fn zero() -> Self {
        GModel {
            scale: 0.0,
            a: 1.0,
            b: 1.0,
        }
    }

    /// Starting point `a = b = 1`, `c = max F`.
    pub fn initial_guess(f: &[f64]) -> Self {
        let fmax = f.iter().copied().fold(0.0, f64::max);
        GModel {
            scale: if fmax > 0.0 { fmax } else { 1.0 },
            a: 1.0,
            b: 1.0,
        }
    }

    pub fn eval(&self, nu: f64) -> Result<f64> {
        if self.scale == 0.0 {
            if !(0.0..=1.0).contains(&nu) {
                return Err(Error::BetaDomain {
                    nu,
                    a: self.a,
                    b: self.b,
                });
            }
            return Ok(0.0);
        }
        Ok(self.scale * beta_inc(nu, self.a, self.b)?)
    }
}

/// The recognized model for `case` at `ν`.
pub fn g_value(nu: f64, case: Case) -> Result<f64> {
    GModel::closed_form(case).eval(nu)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_simplex_iterations: usize,
    pub max_polish_iterations: usize,
    /// Largest parameter step (in log-parameters) counted as converged.
    pub step_tol: f64,
    /// Relative SSE improvement counted as converged.
    pub sse_rel_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_simplex_iterations: 4000,
            max_polish_iterations: 500,
            step_tol: 1e-10,
            sse_rel_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: GModel,
    pub initial: GModel,
    pub nu: Vec<f64>,
    pub residuals: Vec<f64>,
    pub sse: f64,
    pub simplex_iterations: usize,
    pub polish_iterations: usize,
    pub converged: bool,
}

impl FitReport {
    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// `F[k] − model(ν_k)`.
pub fn residuals_at(nu: &[f64], f: &[f64], model: &GModel) -> Result<Vec<f64>> {
    if nu.len() != f.len() {
        return Err(Error::DimensionMismatch {
            expected: nu.len(),
            got: f.len(),
        });
    }
    nu.iter()
        .zip(f)
        .map(|(&v, &y)| Ok(y - model.eval(v)?))
        .collect()
}

pub fn residuals(fgrid: &FGrid, model: &GModel) -> Result<Vec<f64>> {
    residuals_at(&fgrid.nu, &fgrid.f, model)
}

/// Local cubic (four-point Lagrange) interpolation of sorted `(xs, ys)`.
pub fn interpolate_cubic(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            got: xs.len(),
        });
    }
    let n = xs.len();
    let i = xs.partition_point(|&v| v < x);
    let start = i.saturating_sub(2).min(n - 4);
    let (px, py) = (&xs[start..start + 4], &ys[start..start + 4]);
    let mut acc = 0.0;
    for j in 0..4 {
        let mut w = 1.0;
        for m in 0..4 {
            if m != j {
                w *= (x - px[m]) / (px[j] - px[m]);
            }
        }
        acc += w * py[j];
    }
    Ok(acc)
}

/// Residuals on `m` uniform values of `ν` in `[0,1]`, interpolating `F`
/// cubically in `μ` first.
pub fn residuals_uniform_nu(
    fgrid: &FGrid,
    model: &GModel,
    m: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if m < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: m });
    }
    let mut nus = Vec::with_capacity(m);
    let mut res = Vec::with_capacity(m);
    for j in 0..m {
        let nu = j as f64 / (m - 1) as f64;
        let f = interpolate_cubic(&fgrid.mu, &fgrid.f, nu.sqrt())?;
        nus.push(nu);
        res.push(f - model.eval(nu)?);
    }
    Ok((nus, res))
}

struct Problem<'a> {
    nu: &'a [f64],
    f: &'a [f64],
}

impl Problem<'_> {
    fn model(theta: &[f64; 3]) -> GModel {
        GModel {
            scale: theta[0].exp(),
            a: theta[1].exp(),
            b: theta[2].exp(),
        }
    }

    fn residuals(&self, theta: &[f64; 3]) -> Option<Vec<f64>> {
        let m = Self::model(theta);
        if !(m.scale.is_finite() && m.a.is_finite() && m.b.is_finite()) || m.a <= 0.0 || m.b <= 0.0
        {
            return None;
        }
        let r: Vec<f64> = self
            .nu
            .iter()
            .zip(self.f)
            .map(|(&v, &y)| m.eval(v).map(|g| g - y).unwrap_or(f64::NAN))
            .collect();
        r.iter().all(|x| x.is_finite()).then_some(r)
    }

    fn sse(&self, theta: &[f64; 3]) -> f64 {
        self.residuals(theta)
            .map(|r| r.iter().map(|x| x * x).sum())
            .unwrap_or(f64::INFINITY)
    }
}

fn nelder_mead(p: &Problem, start: [f64; 3], opts: &FitOptions) -> ([f64; 3], usize) {
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((start, p.sse(&start)));
    for i in 0..3 {
        let mut v = start;
        v[i] += 0.5;
        simplex.push((v, p.sse(&v)));
    }
    let mut iters = 0;
    while iters < opts.max_simplex_iterations {
        iters += 1;
        simplex.sort_by(|x, y| x.1.total_cmp(&y.1));
        let (best, worst) = (simplex[0].1, simplex[3].1);
        let spread = (0..3)
            .map(|i| {
                simplex
                    .iter()
                    .map(|s| (s.0[i] - simplex[0].0[i]).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread < 1e-9 || (worst - best).abs() <= 1e-15 * best.abs() {
            break;
        }
        let mut centroid = [0.0; 3];
        for s in &simplex[..3] {
            for (c, x) in centroid.iter_mut().zip(s.0) {
                *c += x / 3.0;
            }
        }
        let along = |t: f64| -> [f64; 3] {
            std::array::from_fn(|i| centroid[i] + t * (simplex[3].0[i] - centroid[i]))
        };
        let xr = along(-1.0);
        let fr = p.sse(&xr);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = p.sse(&xe);
            simplex[3] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (xr, fr);
        } else {
            let xc = if fr < worst { along(-0.5) } else { along(0.5) };
            let fc = p.sse(&xc);
            if fc < fr.min(worst) {
                simplex[3] = (xc, fc);
            } else {
                let x0 = simplex[0].0;
                for s in simplex.iter_mut().skip(1) {
                    for (x, o) in s.0.iter_mut().zip(x0) {
                        *x = o + 0.5 * (*x - o);
                    }
                    s.1 = p.sse(&s.0);
                }
            }
        }
    }
    simplex.sort_by(|x, y| x.1.total_cmp(&y.1));
    (simplex[0].0, iters)
}

/// Levenberg–Marquardt with central-difference derivatives.
fn polish(p: &Problem, start: [f64; 3], opts: &FitOptions) -> ([f64; 3], usize, bool) {
    let mut theta = start;
    let Some(mut r) = p.residuals(&theta) else {
        return (theta, 0, false);
    };
    let mut sse: f64 = r.iter().map(|x| x * x).sum();
    let data_scale: f64 =
        p.f.iter()
            .map(|x| x * x)
            .sum::<f64>()
            .max(f64::MIN_POSITIVE);
    let mut lambda = 1e-3;
    for it in 1..=opts.max_polish_iterations {
        if sse <= 1e-30 * data_scale {
            return (theta, it - 1, true);
        }
        let n = r.len();
        let mut jac = vec![[0.0; 3]; n];
        for i in 0..3 {
            let h = 1e-6 * theta[i].abs().max(1.0);
            let (mut tp, mut tm) = (theta, theta);
            tp[i] += h;
            tm[i] -= h;
            let (Some(rp), Some(rm)) = (p.residuals(&tp), p.residuals(&tm)) else {
                return (theta, it, false);
            };
            for k in 0..n {
                jac[k][i] = (rp[k] - rm[k]) / (2.0 * h);
            }
        }
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for k in 0..n {
            let row = Vector3::from(jac[k]);
            jtj += row * row.transpose();
            jtr += row * r[k];
        }
        loop {
            let mut lhs = jtj;
            for i in 0..3 {
                lhs[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
            }
            let Some(step) = lhs.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                if lambda > 1e12 {
                    return (theta, it, false);
                }
                continue;
            };
            let cand = [theta[0] + step[0], theta[1] + step[1], theta[2] + step[2]];
            let cand_sse = p.sse(&cand);
            if cand_sse <= sse {
                let improvement = (sse - cand_sse) / sse.max(f64::MIN_POSITIVE);
                let step_size = step.amax();
                theta = cand;
                r = p
                    .residuals(&theta)
                    .expect("finite sse implies finite residuals");
                sse = cand_sse;
                lambda = (lambda * 0.1).max(1e-12);
                if step_size < opts.step_tol && improvement < opts.sse_rel_tol {
                    return (theta, it, true);
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e12 {
                // No descent direction left at working precision.
                return (theta, it, step.amax() < opts.step_tol.sqrt());
            }
        }
    }
    (theta, opts.max_polish_iterations, false)
}

/// Unweighted least squares of `c · B_ν(a,b)` against `(ν, F)` pairs.
pub fn fit_points(nu: &[f64], f: &[f64], init: GModel, opts: &FitOptions) -> Result<FitReport> {
    if nu.len() != f.len() {
        return Err(Error::DimensionMismatch {
            expected: nu.len(),
            got: f.len(),
        });
    }
    let interior = nu.iter().filter(|&&v| v > 0.0 && v < 1.0).count();
    if interior < 10 {
        return Err(Error::TooFewPoints {
            needed: 10,
            got: interior,
        });
    }
    if let Some(&bad) = nu.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidNu(bad));
    }
    if init.scale <= 0.0 {
        return Err(Error::InvalidConfig(
            "initial scale must be positive".into(),
        ));
    }
    let p = Problem { nu, f };
    let start = [init.scale.ln(), init.a.ln(), init.b.ln()];
    let (nm, simplex_iterations) = nelder_mead(&p, start, opts);
    let (theta, polish_iterations, converged) = polish(&p, nm, opts);
    let model = Problem::model(&theta);
    let residuals = residuals_at(nu, f, &model)?;
    let sse = residuals.iter().map(|x| x * x).sum();
    Ok(FitReport {
        model,
        initial: init,
        nu: nu.to_vec(),
        residuals,
        sse,
        simplex_iterations,
        polish_iterations,
        converged,
    })
}

pub fn fit_beta(fgrid: &FGrid, init: GModel, opts: &FitOptions) -> Result<FitReport> {
    fit_points(&fgrid.nu, &fgrid.f, init, opts)
}

/// Residual series as CSV with header `nu,residual`.
pub fn write_residual_csv<W: Write>(nu: &[f64], residual: &[f64], w: W) -> Result<()> {
    let err = |e: csv::Error| Error::io("<residual csv>", std::io::Error::other(e));
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["nu", "residual"]).map_err(err)?;
    for (v, r) in nu.iter().zip(residual) {
        wtr.write_record(&[v.to_string(), r.to_string()])
            .map_err(err)?;
    }
    wtr.flush().map_err(|e| Error::io("<residual csv>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadOptions};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// Quadrature with substitutions that remove both endpoint singularities.
    fn oracle(x: f64, a: f64, b: f64) -> f64 {
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-13,
            max_subdivisions: 20_000,
        };
        let split = x.min(0.5);
        let left = integrate(
            |s: f64| (1.0 - s.powf(1.0 / a)).powf(b - 1.0),
            0.0,
            split.powf(a),
            &opts,
        )
        .unwrap()
        .value
            / a;
        let right = if x > 0.5 {
            integrate(
                |r: f64| (1.0 - r.powf(1.0 / b)).powf(a - 1.0),
                (1.0 - x).powf(b),
                0.5f64.powf(b),
                &opts,
            )
            .unwrap()
            .value
                / b
        } else {
            0.0
        };
        left + right
    }

    #[test]
    fn uniform_density() {
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(beta_inc(x, 1.0, 1.0).unwrap(), x);
        }
    }

    #[test]
    fn arcsine_value_and_complete_beta() {
        let v = beta_inc(0.5, 0.5, 0.5).unwrap();
        assert!(rel(v, std::f64::consts::FRAC_PI_2) < 1e-12);
        assert!(rel(beta_inc(1.0, 2.0, 3.0).unwrap(), 1.0 / 12.0) < 1e-15);
        assert!(rel(beta(2.0, 3.0), 1.0 / 12.0) < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(beta_inc(-0.1, 1.0, 1.0).is_err());
        assert!(beta_inc(1.1, 1.0, 1.0).is_err());
        assert!(beta_inc(0.5, 0.0, 1.0).is_err());
        assert!(beta_inc(0.5, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn symmetry_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let x: f64 = rng.random();
            let a = rng.random_range(1e-3..=5.0);
            let b = rng.random_range(1e-3..=5.0);
            let lhs = beta_inc(x, a, b).unwrap() + beta_inc(1.0 - x, b, a).unwrap();
            assert!(rel(lhs, beta(a, b)) < 1e-13, "x={x} a={a} b={b}");
        }
    }

    #[test]
    fn quadrature_oracle_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let x: f64 = rng.random_range(0.01..0.99);
            let a = rng.random_range(0.1..=5.0);
            let b = rng.random_range(0.1..=5.0);
            let got = beta_inc(x, a, b).unwrap();
            let want = oracle(x, a, b);
            assert!(rel(got, want) < 1e-10, "x={x} a={a} b={b}: {got} vs {want}");
        }
    }

    #[test]
    fn strictly_increasing() {
        for (a, b) in [
            (0.5, 3f64.sqrt()),
            (2.0 * 6f64.sqrt() / 5.0, 3.0 / 2f64.sqrt()),
            (3.0, 0.4),
        ] {
            let mut prev = -1.0;
            for k in 0..=1000 {
                let v = beta_inc(k as f64 / 1000.0, a, b).unwrap();
                assert!(v > prev);
                prev = v;
            }
        }
    }

    #[test]
    fn model_values_at_endpoints() {
        assert!(rel(g_value(1.0, Case::Real).unwrap(), 114.6270015) < 1e-6);
        assert!(rel(g_value(1.0, Case::Complex).unwrap(), 387.486102) < 1e-6);
        assert_eq!(g_value(0.0, Case::Real).unwrap(), 0.0);
        assert_eq!(g_value(0.0, Case::Complex).unwrap(), 0.0);
    }

    fn synthetic(model: &GModel, n: usize) -> (Vec<f64>, Vec<f64>) {
        let nu: Vec<f64> = (0..n)
            .map(|k| (k as f64 / (n - 1) as f64).powi(2))
            .collect();
        let f = nu.iter().map(|&v| model.eval(v).unwrap()).collect();
        (nu, f)
    }

    #[test]
    fn zero_noise_recovery() {
        for case in [Case::Real, Case::Complex] {
            let truth = GModel::closed_form(case);
            let (nu, f) = synthetic(&truth, 201);
            let rep =
                fit_points(&nu, &f, GModel::initial_guess(&f), &FitOptions::default()).unwrap();
            assert!(rep.converged, "{case}: {rep:?}");
            assert!((rep.model.a - truth.a).abs() < 1e-6);
            assert!((rep.model.b - truth.b).abs() < 1e-6);
            assert!(rel(rep.model.scale, truth.scale) < 1e-6);
            assert!(rep.max_abs_residual() < 1e-12 * truth.scale.max(1.0) * 100.0);
            assert_eq!(rep.residuals.len(), nu.len());
        }
    }

    #[test]
    fn noisy_recovery() {
        let truth = GModel::closed_form(Case::Real);
        let (nu, mut f) = synthetic(&truth, 201);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for y in f.iter_mut().skip(1) {
            *y += rng.random_range(-0.1..0.1);
        }
        let rep = fit_points(&nu, &f, GModel::initial_guess(&f), &FitOptions::default()).unwrap();
        assert!((rep.model.a - truth.a).abs() < 5e-2);
        assert!((rep.model.b - truth.b).abs() < 5e-2);
    }

    #[test]
    fn too_few_points() {
        let nu = [0.0, 0.5, 1.0];
        let f = [0.0, 1.0, 2.0];
        assert!(matches!(
            fit_points(&nu, &f, GModel::initial_guess(&f), &FitOptions::default()),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn zero_model_residuals_are_data() {
        let nu = [0.0, 0.25, 1.0];
        let f = [0.0, 3.0, 7.5];
        assert_eq!(residuals_at(&nu, &f, &GModel::zero()).unwrap(), f.to_vec());
    }

    #[test]
    fn cubic_interpolation_is_exact_on_cubics() {
        let xs: Vec<f64> = (0..20).map(|k| k as f64 / 19.0).collect();
        let p = |x: f64| 2.0 * x * x * x - x + 0.5;
        let ys: Vec<f64> = xs.iter().map(|&x| p(x)).collect();
        for x in [0.0, 0.013, 0.5, 0.77, 1.0] {
            assert!((interpolate_cubic(&xs, &ys, x).unwrap() - p(x)).abs() < 1e-13);
        }
    }
}
