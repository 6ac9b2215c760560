//! Separable volumes `2 ∫₀¹ Jac(ν) G(ν) dν`, separability probabilities and
//! boundary hyperareas.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::betafit::GModel;
use crate::jacobian::JacobianCase;
use crate::quadrature::{integrate, QuadOptions};
use crate::{Case, Error, Result};

/// Terms of the power-series cross-check.
pub const DEFAULT_SERIES_TERMS: usize = 300;

pub fn sep_quad_options() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-12,
        max_subdivisions: 5000,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SepIntegral {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

/// Adaptive quadrature of `2·Jac(ν)·G(ν)` over `[0,1]`.
pub fn integrate_sep(case: Case, model: &GModel) -> Result<SepIntegral> {
    if model.scale == 0.0 {
        return Ok(SepIntegral {
            value: 0.0,
            abs_error: 0.0,
            subdivisions: 0,
        });
    }
    let jc = JacobianCase::new(case);
    let r = integrate(
        |nu| 2.0 * jc.eval(nu) * model.eval(nu).unwrap_or(f64::NAN),
        0.0,
        1.0,
        &sep_quad_options(),
    )?;
    if !r.value.is_finite() {
        return Err(Error::QuadratureDiverged {
            value: r.value,
            error: r.abs_error,
            subdivisions: r.subdivisions,
        });
    }
    Ok(SepIntegral {
        value: r.value,
        abs_error: r.abs_error,
        subdivisions: r.subdivisions,
    })
}

/// Cross-check path: expands `B_ν(a,b) = Σₙ (1−b)ₙ/n! · ν^{a+n}/(a+n)` about
/// `ν = 0` and integrates term by term against the jacobian moments.
pub fn integrate_sep_series(case: Case, model: &GModel, terms: usize) -> Result<f64> {
    if terms == 0 {
        return Err(Error::InvalidConfig(
            "series needs at least one term".into(),
        ));
    }
    if model.scale == 0.0 {
        return Ok(0.0);
    }
    let jc = JacobianCase::new(case);
    let opts = sep_quad_options();
    let mut coef = 1.0;
    let mut sum = 0.0;
    for n in 0..terms {
        let p = model.a + n as f64;
        let moment = integrate(|nu| jc.eval(nu) * nu.powf(p), 0.0, 1.0, &opts)?.value;
        sum += coef / p * moment;
        coef *= (n as f64 + 1.0 - model.b) / (n as f64 + 1.0);
        if coef == 0.0 {
            break;
        }
    }
    Ok(2.0 * model.scale * sum)
}

/// A known or conjectured closed form, set against the computed value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparator {
    pub name: String,
    pub conjectured: f64,
    pub computed: f64,
    pub rel_diff: f64,
}

impl Comparator {
    fn new(name: &str, conjectured: f64, computed: f64) -> Self {
        Comparator {
            name: name.into(),
            conjectured,
            computed,
            rel_diff: (computed - conjectured) / conjectured,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeDiagnostics {
    pub abs_error: f64,
    pub subdivisions: usize,
    pub series_terms: usize,
    pub series_value: Option<f64>,
    pub series_rel_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeReport {
    pub case: Case,
    pub model: GModel,
    pub v_total: f64,
    pub v_sep: f64,
    pub p_sep: f64,
    pub boundary_ratio: f64,
    pub h_sep: f64,
    /// `H_sep` with twice the boundary ratio.
    pub h_sep_twice_ratio: f64,
    pub comparators: Vec<Comparator>,
    pub diagnostics: VolumeDiagnostics,
}

/// Conjectured complex separable volume `(5√3)^{-7}`.
pub fn conjectured_complex_vsep() -> f64 {
    (5.0 * 3f64.sqrt()).powi(-7)
}

/// Conjectured complex separability probability `2²·3·7²·11·13·√3/(5⁴π⁶)`.
pub fn conjectured_complex_psep() -> f64 {
    4.0 * 3.0 * 49.0 * 11.0 * 13.0 * 3f64.sqrt() / (625.0 * std::f64::consts::PI.powi(6))
}

pub fn report(
    case: Case,
    model: GModel,
    sep: SepIntegral,
    series_value: Option<f64>,
    series_terms: usize,
) -> VolumeReport {
    let v_total = case.total_volume();
    let v_sep = sep.value;
    let p_sep = v_sep / v_total;
    let ratio = case.boundary_ratio();
    let comparators = match case {
        Case::Complex => vec![
            Comparator::new("V_sep = (5√3)^-7", conjectured_complex_vsep(), v_sep),
            Comparator::new(
                "P_sep = 2²·3·7²·11·13·√3/(5⁴π⁶)",
                conjectured_complex_psep(),
                p_sep,
            ),
        ],
        Case::Real => Vec::new(),
    };
    VolumeReport {
        case,
        model,
        v_total,
        v_sep,
        p_sep,
        boundary_ratio: ratio,
        h_sep: ratio * v_sep,
        h_sep_twice_ratio: 2.0 * ratio * v_sep,
        comparators,
        diagnostics: VolumeDiagnostics {
            abs_error: sep.abs_error,
            subdivisions: sep.subdivisions,
            series_terms,
            series_value,
            series_rel_diff: series_value.map(|s| {
                if v_sep == 0.0 {
                    0.0
                } else {
                    (s - v_sep) / v_sep
                }
            }),
        },
    }
}

/// Both integration paths plus the derived quantities.
pub fn volume_report(case: Case, model: &GModel, series_terms: usize) -> Result<VolumeReport> {
    let sep = integrate_sep(case, model)?;
    let series = if series_terms > 0 {
        Some(integrate_sep_series(case, model, series_terms)?)
    } else {
        None
    };
    Ok(report(case, *model, sep, series, series_terms))
}

impl fmt::Display for VolumeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<(String, String)> = [
            ("case", self.case.to_string()),
            (
                "model",
                format!(
                    "{:.10} · B_ν({:.10}, {:.10})",
                    self.model.scale, self.model.a, self.model.b
                ),
            ),
            ("V_total", format!("{:.10e}", self.v_total)),
            ("V_sep", format!("{:.10e}", self.v_sep)),
            ("P_sep", format!("{:.10}", self.p_sep)),
            ("boundary ratio", format!("{:.10}", self.boundary_ratio)),
            ("H_sep", format!("{:.10e}", self.h_sep)),
            (
                "H_sep (2× ratio)",
                format!("{:.10e}", self.h_sep_twice_ratio),
            ),
            (
                "quadrature error",
                format!("{:.3e}", self.diagnostics.abs_error),
            ),
            ("subdivisions", self.diagnostics.subdivisions.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .chain(self.diagnostics.series_value.map(|s| {
            (
                format!("series ({} terms)", self.diagnostics.series_terms),
                format!(
                    "{:.10e} (rel diff {:.2e})",
                    s,
                    self.diagnostics.series_rel_diff.unwrap_or(0.0)
                ),
            )
        }))
        .chain(self.comparators.iter().map(|c| {
            (
                format!("conj. {}", c.name),
                format!("{:.10e} (rel diff {:+.3e})", c.conjectured, c.rel_diff),
            )
        }))
        .collect();
        let width = rows
            .iter()
            .map(|(k, _)| k.chars().count())
            .max()
            .unwrap_or(0);
        for (k, v) in rows {
            writeln!(f, "{k:<width$}  {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn zero_model_gives_zero() {
        for case in [Case::Real, Case::Complex] {
            assert_eq!(integrate_sep(case, &GModel::zero()).unwrap().value, 0.0);
            assert_eq!(
                integrate_sep_series(case, &GModel::zero(), 10).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn uniform_model_matches_total_integral() {
        // c·B_ν(1,1) = c·ν, so the series has a single term.
        let m = GModel::new(2.0, 1.0, 1.0).unwrap();
        let q = integrate_sep(Case::Real, &m).unwrap().value;
        let s = integrate_sep_series(Case::Real, &m, 5).unwrap();
        assert!(rel(q, s) < 1e-11);
    }

    #[test]
    fn closed_form_models_within_bounds() {
        for case in [Case::Real, Case::Complex] {
            let r = volume_report(case, &GModel::closed_form(case), 0).unwrap();
            assert!(r.v_sep > 0.0 && r.v_sep < r.v_total);
            assert!(r.p_sep > 0.0 && r.p_sep < 1.0);
        }
    }

    #[test]
    fn conjectured_constants() {
        assert!(rel(conjectured_complex_vsep(), 2.73707e-7) < 1e-5);
        assert!(rel(conjectured_complex_psep(), 0.242379) < 1e-5);
    }

    #[test]
    fn text_table_is_aligned() {
        let r = volume_report(Case::Complex, &GModel::closed_form(Case::Complex), 0).unwrap();
        let s = r.to_string();
        let cols: Vec<usize> = s
            .lines()
            .map(|l| {
                l.char_indices()
                    .position(|(i, _)| l[i..].starts_with("  "))
                    .unwrap()
            })
            .collect();
        assert!(cols.len() > 5);
    }
}
