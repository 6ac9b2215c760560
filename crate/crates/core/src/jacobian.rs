//! The closed-form jacobians `Jac_real(ν)` and `Jac_complex(ν)`.
//!
//! They come from integrating the diagonal measure `(Π ρ_ii)^k` (k = 3/2 real,
//! k = 3 complex) over the simplex at fixed `ν`:
//!
//! ```text
//! Jac_real(ν)    = ν^{3/2} (12 P(ν) log√ν − 5 Q(ν)) / (3780 (ν−1)^9)
//! Jac_complex(ν) = −ν³ (h₁(ν) + h₂(ν)) / (3603600 (ν−1)^15)
//! ```
//!
//! The numerators vanish to ninth and fifteenth order at `ν = 1`. Away from 1
//! the closed forms are evaluated in double-double arithmetic; closer in, in
//! binary floating point with enough bits to absorb the cancellation. Within
//! `series_radius` of 1, `eval` uses a Taylor expansion about `ν = 1`.
//! Both functions obey `Jac(1/ν) = ν² Jac(ν)`, so `∫₁^∞ = ∫₀¹`.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

use crate::dd::Dd;
use crate::quadrature::{integrate, QuadOptions, QuadResult};
use crate::{Case, Error, Result};

/// Taylor coefficients in `t = ν − 1`, exact rationals rounded to `f64`.
const REAL_SERIES: [f64; 24] = [
    2.5195263290501387e-06,
    -2.5195263290501387e-06,
    1.8037518037518038e-06,
    -1.087977278453469e-06,
    5.40822713441761e-07,
    -1.6228810871668013e-07,
    -8.556602678626489e-08,
    2.406791841315651e-07,
    -3.325521072903229e-07,
    3.8224679314025207e-07,
    -4.0426300233249715e-07,
    4.0841477015845253e-07,
    -4.0128805338380984e-07,
    3.8727951304983274e-07,
    -3.693104174852382e-07,
    3.493096497720615e-07,
    -3.2853859871397217e-07,
    3.0780950716059344e-07,
    -2.8763245678420254e-07,
    2.683145840857447e-07,
    -2.5002725166264473e-07,
    2.3285164473869881e-07,
    -2.1680978007100674e-07,
    2.0188560834243887e-07,
];

const COMPLEX_SERIES: [f64; 24] = [
    3.77331379662382e-10,
    -3.77331379662382e-10,
    1.9976367158596694e-10,
    -2.2195963509551882e-11,
    -9.696131427856875e-11,
    1.5770816177839496e-10,
    -1.7673327335801084e-10,
    1.7072534338550057e-10,
    -1.519287943591867e-10,
    1.2814377690763028e-10,
    -1.038639033882898e-10,
    8.141398148618012e-11,
    -6.180331441286666e-11,
    4.529456770579492e-11,
    -3.175826011555736e-11,
    2.088293606869983e-11,
    -1.2293986556573287e-11,
    5.61699466363985e-12,
    -5.08534496296612e-13,
    -3.3314519943146465e-12,
    6.157237168063677e-12,
    -8.179904450326141e-12,
    9.572150863359091e-12,
    -1.0473757455345968e-11,
];

/// Above this ν the closed form is evaluated through the reflection law.
const REFLECT_ABOVE: f64 = 1e16;

/// Inside `|ν − 1| <` this, double-double loses more than ~3 digits.
const WIDE_BELOW_REAL: f64 = 0.03;
const WIDE_BELOW_COMPLEX: f64 = 0.3;

type Big = FBig<HalfEven, 2>;

/// Evaluation settings for one of the two jacobians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianCase {
    pub case: Case,
    pub series_radius: f64,
    pub series_terms: usize,
}

impl JacobianCase {
    pub fn new(case: Case) -> Self {
        JacobianCase {
            case,
            series_radius: 0.1,
            series_terms: 16,
        }
    }

    pub fn with_series(case: Case, series_radius: f64, series_terms: usize) -> Result<Self> {
        if !(series_radius > 0.0 && series_radius < 0.5) {
            return Err(Error::InvalidJacobian(format!(
                "series radius {series_radius} outside (0, 0.5)"
            )));
        }
        if !(12..=REAL_SERIES.len()).contains(&series_terms) {
            return Err(Error::InvalidJacobian(format!(
                "series terms {series_terms} outside 12..={}",
                REAL_SERIES.len()
            )));
        }
        Ok(JacobianCase {
            case,
            series_radius,
            series_terms,
        })
    }

    /// Branch-selecting evaluation; `ν` must be nonnegative.
    pub fn eval(&self, nu: f64) -> f64 {
        if nu == 0.0 {
            0.0
        } else if (nu - 1.0).abs() <= self.series_radius {
            series(self.case, nu, self.series_terms)
        } else {
            closed_form(self.case, nu)
        }
    }
}

/// `Jac(ν)` with the default branch settings of `case`.
pub fn jac(nu: f64, case: &JacobianCase) -> Result<f64> {
    if !(nu >= 0.0) || nu.is_infinite() {
        return Err(Error::InvalidNu(nu));
    }
    Ok(case.eval(nu))
}

/// The closed form, valid for every `ν > 0` except exactly 1.
pub fn closed_form(case: Case, nu: f64) -> f64 {
    if nu == 0.0 {
        return 0.0;
    }
    if nu > REFLECT_ABOVE {
        return closed_form(case, 1.0 / nu) / (nu * nu);
    }
    let wide_below = match case {
        Case::Real => WIDE_BELOW_REAL,
        Case::Complex => WIDE_BELOW_COMPLEX,
    };
    if (nu - 1.0).abs() < wide_below {
        return closed_form_wide(case, nu);
    }
    let x = Dd::new(nu);
    let t = x - Dd::new(1.0);
    let ln = Dd::ln(nu);
    let horner = |coeffs: &[f64]| coeffs.iter().fold(Dd::ZERO, |acc, &c| acc * x + Dd::new(c));
    match case {
        Case::Real => {
            // 12 P log√ν − 5 Q with P = ν⁴+16ν³+36ν²+16ν+1.
            let p = horner(&[1.0, 16.0, 36.0, 16.0, 1.0]);
            let q = horner(&[5.0, 32.0, 0.0, -32.0, -5.0]);
            let num = Dd::new(6.0) * p * ln - Dd::new(5.0) * q;
            let r = num / (Dd::new(3780.0) * t.powi(9));
            nu * nu.sqrt() * r.to_f64()
        }
        Case::Complex => {
            let h1 = horner(&[
                363.0, 9947.0, 48363.0, 42875.0, -42875.0, -48363.0, -9947.0, -363.0,
            ]);
            let rr = horner(&[1.0, 49.0, 441.0, 1225.0, 1225.0, 441.0, 49.0, 1.0]);
            let h2 = Dd::new(-70.0) * rr * ln;
            let r = (h1 + h2) / (Dd::new(3_603_600.0) * t.powi(15));
            -(nu * nu * nu) * r.to_f64()
        }
    }
}

fn closed_form_wide(case: Case, nu: f64) -> f64 {
    let t = nu - 1.0;
    if t == 0.0 {
        return f64::NAN;
    }
    let order: i32 = match case {
        Case::Real => 9,
        Case::Complex => 15,
    };
    // Bits lost to cancellation grow like order·log2(1/|t|).
    let bits = 96 + (order as f64 * -t.abs().log2()).ceil().max(0.0) as usize + 8 * order as usize;
    let x = Big::try_from(nu)
        .expect("finite")
        .with_precision(bits)
        .value();
    let one = Big::ONE.with_precision(bits).value();
    let tb = &x - &one;
    let ln = x.ln();
    let horner = |coeffs: &[i64]| {
        coeffs
            .iter()
            .fold(Big::ZERO.with_precision(bits).value(), |acc, &c| {
                acc * &x + Big::from(c)
            })
    };
    let r = match case {
        Case::Real => {
            let p = horner(&[1, 16, 36, 16, 1]);
            let q = horner(&[5, 32, 0, -32, -5]);
            let num = p * ln * Big::from(6) - q * Big::from(5);
            num / (tb.powi(order.into()) * Big::from(3780))
        }
        Case::Complex => {
            let h1 = horner(&[363, 9947, 48363, 42875, -42875, -48363, -9947, -363]);
            let rr = horner(&[1, 49, 441, 1225, 1225, 441, 49, 1]);
            let num = h1 - rr * ln * Big::from(70);
            -(num / (tb.powi(order.into()) * Big::from(3_603_600)))
        }
    };
    let prefactor = match case {
        Case::Real => nu * nu.sqrt(),
        Case::Complex => nu * nu * nu,
    };
    prefactor * r.to_f64().value()
}

/// Truncated Taylor expansion about `ν = 1` with `terms` coefficients.
pub fn series(case: Case, nu: f64, terms: usize) -> f64 {
    let coeffs = match case {
        Case::Real => &REAL_SERIES[..],
        Case::Complex => &COMPLEX_SERIES[..],
    };
    let t = nu - 1.0;
    coeffs[..terms.min(coeffs.len())]
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * t + c)
}

/// `Jac(1)`, the limit of the closed form.
pub fn value_at_one(case: Case) -> f64 {
    match case {
        Case::Real => REAL_SERIES[0],
        Case::Complex => COMPLEX_SERIES[0],
    }
}

pub fn default_quad_options() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-11,
        max_subdivisions: 5000,
    }
}

/// `∫_a^b Jac(ν) dν` for `0 ≤ a, b`.
pub fn jac_integral_over(case: &JacobianCase, a: f64, b: f64) -> Result<QuadResult> {
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::InvalidNu(a.min(b)));
    }
    integrate(|nu| case.eval(nu), a, b, &default_quad_options())
}

/// `∫₀¹ Jac(ν) dν`.
pub fn jac_integral(case: &JacobianCase) -> Result<QuadResult> {
    jac_integral_over(case, 0.0, 1.0)
}

/// One row of the plotting table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianRow {
    pub nu: f64,
    pub real: f64,
    pub complex: f64,
}

/// `rows` equally spaced values of `ν` over `[0, nu_max]`.
pub fn table(rows: usize, nu_max: f64) -> Result<Vec<JacobianRow>> {
    if rows < 2 || !(nu_max > 0.0) || !nu_max.is_finite() {
        return Err(Error::InvalidJacobian(format!(
            "table needs at least 2 rows and a positive ν range (got {rows}, {nu_max})"
        )));
    }
    let jr = JacobianCase::new(Case::Real);
    let jc = JacobianCase::new(Case::Complex);
    Ok((0..rows)
        .map(|k| {
            let nu = nu_max * k as f64 / (rows - 1) as f64;
            JacobianRow {
                nu,
                real: jr.eval(nu),
                complex: jc.eval(nu),
            }
        })
        .collect())
}

/// Writes `nu,jac_real,jac_complex` CSV.
pub fn write_table_csv<W: std::io::Write>(rows: &[JacobianRow], w: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["nu", "jac_real", "jac_complex"])?;
    for r in rows {
        wtr.write_record(&[
            format!("{:.17e}", r.nu),
            format!("{:.17e}", r.real),
            format!("{:.17e}", r.complex),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn vanishes_at_zero() {
        for case in [Case::Real, Case::Complex] {
            assert_eq!(jac(0.0, &JacobianCase::new(case)).unwrap(), 0.0);
        }
        assert!(jac(-0.5, &JacobianCase::new(Case::Real)).is_err());
    }

    #[test]
    fn finite_limit_at_one() {
        // The limits are 1/396900 and 1/2650190400.
        assert!(rel(value_at_one(Case::Real), 1.0 / 396_900.0) < 1e-15);
        assert!(rel(value_at_one(Case::Complex), 1.0 / 2_650_190_400.0) < 1e-15);
        // 80-digit reference values at ν = 1.001.
        assert!(rel(closed_form(Case::Real, 1.001), 2.517_008_605_385_456e-6) < 1e-13);
        assert!(rel(closed_form(Case::Complex, 1.001), 3.769_542_480_240_985e-10) < 1e-13);
        let jr = JacobianCase::new(Case::Real);
        assert!(rel(jr.eval(1.001), 2.517_008_605_385_456e-6) < 1e-14);
    }

    #[test]
    fn reflection_quarter_four() {
        for case in [Case::Real, Case::Complex] {
            let j = JacobianCase::new(case);
            assert!(rel(j.eval(0.25), 16.0 * j.eval(4.0)) < 1e-13);
        }
    }

    #[test]
    fn reflection_law_random() {
        for case in [Case::Real, Case::Complex] {
            let j = JacobianCase::new(case);
            for k in 1..400 {
                let nu = 0.0025 * k as f64;
                let lhs = j.eval(1.0 / nu);
                let rhs = nu * nu * j.eval(nu);
                assert!(rel(lhs, rhs) < 1e-10, "{case} ν={nu}: {lhs} vs {rhs}");
            }
            let big = j.eval(1e20);
            assert!(big > 0.0 && big.is_finite());
        }
    }

    #[test]
    fn branches_agree_at_seam() {
        for case in [Case::Real, Case::Complex] {
            for t in [0.1, 0.05, -0.05, -0.1, 0.02] {
                let nu = 1.0 + t;
                let s = series(case, nu, 16);
                let c = closed_form(case, nu);
                assert!(rel(s, c) < 1e-10, "{case} t={t}: {s} vs {c}");
            }
        }
    }

    #[test]
    fn positive_everywhere_sampled() {
        for case in [Case::Real, Case::Complex] {
            let j = JacobianCase::new(case);
            for k in 1..1000 {
                let nu = 3.0 * k as f64 / 1000.0;
                assert!(j.eval(nu) > 0.0, "{case} ν={nu}");
            }
        }
    }

    #[test]
    fn integral_of_empty_interval() {
        let j = JacobianCase::new(Case::Real);
        assert_eq!(jac_integral_over(&j, 0.0, 0.0).unwrap().value, 0.0);
    }

    #[test]
    fn settings_are_validated() {
        assert!(JacobianCase::with_series(Case::Real, 0.6, 16).is_err());
        assert!(JacobianCase::with_series(Case::Real, 0.1, 8).is_err());
        assert!(JacobianCase::with_series(Case::Real, 0.2, 24).is_ok());
    }
}
