//! Estimate, fit and integrate for both cases, comparing the fitted
//! separable volume with the one from the recognized model.
//!
//! cargo run --release --example full_pipeline

use sepvol::betafit::{fit_beta, FitOptions, GModel};
use sepvol::estimator::{estimate_f, total_volume, EstimationConfig};
use sepvol::volume::integrate_sep;
use sepvol::Case;

fn main() -> sepvol::Result<()> {
    for case in [Case::Real, Case::Complex] {
        let g = estimate_f(&EstimationConfig::desk(case))?;
        let v_total = total_volume(&g)?;
        let fit = fit_beta(&g, GModel::initial_guess(&g.f), &FitOptions::default())?;
        let fitted = integrate_sep(case, &fit.model)?.value;
        let known = integrate_sep(case, &GModel::closed_form(case))?.value;
        println!("{case}");
        println!(
            "  V_total estimate {:.6e} (exact {:.6e})",
            v_total,
            case.total_volume()
        );
        println!("  fitted a = {:.4}, b = {:.4}", fit.model.a, fit.model.b);
        println!(
            "  V_sep fitted {:.6e}, recognized model {:.6e} ({:+.2}%)",
            fitted,
            known,
            100.0 * (fitted / known - 1.0)
        );
        println!("  P_sep fitted {:.5}", fitted / case.total_volume());
    }
    Ok(())
}
