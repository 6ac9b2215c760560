//! Density-matrix algebra in Bloore variables: assembly, the PSD test, CAD
//! bounds and the partial-transpose quartic.
//!
//! cargo run --example bloore_algebra

use sepvol::bloore::{
    a2_real, a3_quartic_coeffs, assemble_density, cad_bounds, canonical_diagonals, is_ppt, is_psd,
    partial_transpose, BlooreComplex, BlooreReal, BlooreVector, CanonicalScales, DiagonalVector,
    NuRatio,
};

fn main() -> sepvol::Result<()> {
    let z = BlooreReal::new(0.3, -0.2, 0.1, 0.4, 0.25, -0.5);
    let d = DiagonalVector::new([0.1, 0.3, 0.4, 0.2])?;
    let rho = assemble_density(&z, &d)?;
    println!("trace ρ = {:.15}", rho.trace());
    println!(
        "det ρ = {:.6e}, Π d · A₂(z) = {:.6e}",
        rho.determinant(),
        d.product() * a2_real(&z)
    );
    println!("PSD: {}", is_psd(&z));

    let b = cad_bounds(z.0[0], z.0[1], z.0[2], z.0[3], z.0[4])?;
    println!(
        "CAD: z23 ∈ [{:.4}, {:.4}], z24 ∈ [{:.4}, {:.4}], z34 ∈ [{:.4}, {:.4}]",
        b.z23.lo, b.z23.hi, b.z24.lo, b.z24.hi, b.z34.lo, b.z34.hi
    );

    // det ρ_PT depends on the diagonal only through ν = d1 d4 / (d2 d3).
    let q = a3_quartic_coeffs(&z);
    println!("quartic coefficients c0..c4 = {:?}", q.0);
    for nu in [0.0, 0.1, 0.25, 0.5, 1.0, 2.0] {
        let nu = NuRatio::new(nu)?;
        let s = CanonicalScales::new(nu);
        let pt = partial_transpose(&assemble_density(&z, &canonical_diagonals(nu))?);
        println!(
            "ν = {:4}: det ρ_PT = {:+.6e}, (d2 d3)²·q(μ) = {:+.6e}, PPT = {}",
            nu.nu(),
            pt.determinant(),
            s.quartic_prefactor() * q.eval(nu.mu()),
            is_ppt(&z, nu)
        );
    }

    // The same test for a complex vector.
    let zc = BlooreComplex::from_parts(
        &[0.3, -0.2, 0.1, 0.4, 0.25, -0.5],
        &[0.1, 0.0, -0.2, 0.1, 0.0, 0.3],
    );
    let s = CanonicalScales::new(NuRatio::new(0.5)?);
    println!(
        "complex: PSD = {}, det ρ_PT(ν = 0.5) = {:+.6e}",
        zc.is_psd(),
        zc.pt_determinant(&s)
    );
    Ok(())
}
