//! A desk-scale F(ν) campaign with the total-volume check.
//!
//! cargo run --release --example estimate_f [real|complex] [POINTS]

use sepvol::estimator::{estimate_f, symmetry_check, total_volume, EstimationConfig};
use sepvol::Case;

fn main() -> sepvol::Result<()> {
    let mut args = std::env::args().skip(1);
    let case: Case = args
        .next()
        .map_or(Ok(Case::Real), |s| s.parse())
        .map_err(sepvol::Error::InvalidConfig)?;
    let mut cfg = EstimationConfig::desk(case);
    if let Some(n) = args.next().and_then(|s| s.parse().ok()) {
        cfg = cfg.with_points(n);
    }
    let g = estimate_f(&cfg)?;
    println!(
        "{case}: N = {}, PSD points {}, F_tot = {:.4}",
        g.points, g.n_psd, g.f_tot
    );
    for mu in [0.0, 0.25, 0.5, 0.75, 1.0] {
        println!("  F(ν = {:.4}) = {:.4}", mu * mu, g.f_at_mu(mu));
    }
    let v = total_volume(&g)?;
    println!(
        "  2·F_tot·∫Jac = {v:.6e}, exact {:.6e}, rel {:+.2e}",
        case.total_volume(),
        v / case.total_volume() - 1.0
    );
    for w in g.warnings() {
        println!("  warning: {w}");
    }
    let (a, b) = symmetry_check(&cfg.clone().with_points(100_000), 0.25)?;
    println!("  F(¼) = {a:.4} vs F(4) = {b:.4} at N = 10⁵");
    Ok(())
}
