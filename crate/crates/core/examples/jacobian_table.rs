//! The jacobians: values, the reflection law, the seam and `∫₀¹ Jac`.
//!
//! cargo run --example jacobian_table [ROWS]

use sepvol::jacobian::{
    closed_form, jac, jac_integral, series, table, value_at_one, write_table_csv, JacobianCase,
};
use sepvol::Case;

fn main() -> sepvol::Result<()> {
    let rows: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(11);
    for case in [Case::Real, Case::Complex] {
        let j = JacobianCase::new(case);
        let i = jac_integral(&j)?;
        println!(
            "{case}: Jac(1) = {:.15e}, ∫₀¹ Jac = {:.15e} ± {:.1e}",
            value_at_one(case),
            i.value,
            i.abs_error
        );
        println!("  Jac(¼) / Jac(4) = {:.15}", jac(0.25, &j)? / jac(4.0, &j)?);
        for nu in [0.9, 1.05] {
            println!(
                "  ν = {nu}: series {:.15e}, closed form {:.15e}",
                series(case, nu, j.series_terms),
                closed_form(case, nu)
            );
        }
    }
    println!();
    write_table_csv(&table(rows, 3.0)?, std::io::stdout()).expect("stdout");
    Ok(())
}
