//! Incomplete beta values, the recognized models, and a fit to an estimated
//! grid.
//!
//! cargo run --release --example beta_fit

use sepvol::betafit::{beta_inc, fit_beta, g_value, residuals, FitOptions, GModel};
use sepvol::estimator::{estimate_f, EstimationConfig};
use sepvol::Case;

fn main() -> sepvol::Result<()> {
    println!(
        "B_0.5(½,½) = {:.16} (π/2 = {:.16})",
        beta_inc(0.5, 0.5, 0.5)?,
        std::f64::consts::FRAC_PI_2
    );
    println!("B_1(2,3) = {:.16}", beta_inc(1.0, 2.0, 3.0)?);
    for case in [Case::Real, Case::Complex] {
        let m = GModel::closed_form(case);
        println!(
            "{case}: G = {:.10}·B_ν({:.6}, {:.6}), G(1) = {:.7}",
            m.scale,
            m.a,
            m.b,
            g_value(1.0, case)?
        );
    }

    let g = estimate_f(&EstimationConfig::desk(Case::Real))?;
    let init = GModel::initial_guess(&g.f);
    let rep = fit_beta(&g, init, &FitOptions::default())?;
    println!(
        "fit from (c, a, b) = ({:.3}, 1, 1): c = {:.6}, a = {:.6}, b = {:.6}, SSE {:.4}, converged {}",
        init.scale, rep.model.scale, rep.model.a, rep.model.b, rep.sse, rep.converged
    );
    let r = residuals(&g, &GModel::closed_form(Case::Real))?;
    println!(
        "max |F − G_real| over the grid: {:.4}",
        r.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    );
    Ok(())
}
