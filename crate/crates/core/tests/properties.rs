//! Property tests of the algebraic and numerical invariants.

use nalgebra::{Complex, Matrix4};
use proptest::prelude::*;
use sepvol::betafit::{beta, beta_inc, GModel};
use sepvol::bloore::{
    a2_real, a3_quartic_coeffs, assemble_density, canonical_diagonals, is_psd, partial_transpose,
    BlooreComplex, BlooreReal, BlooreVector, CanonicalScales, DensityMatrix4, DiagonalVector,
    NuRatio,
};
use sepvol::jacobian::JacobianCase;
use sepvol::qmc::{generate, SequenceSpec};
use sepvol::Case;

fn to_na(m: &DensityMatrix4) -> Matrix4<Complex<f64>> {
    Matrix4::from_fn(|i, j| m.0[i][j])
}

fn real_z() -> impl Strategy<Value = BlooreReal> {
    prop::array::uniform6(-1.0f64..1.0).prop_map(BlooreReal)
}

fn complex_z() -> impl Strategy<Value = BlooreComplex> {
    (
        prop::array::uniform6(-1.0f64..1.0),
        prop::array::uniform6(-1.0f64..1.0),
    )
        .prop_map(|(re, im)| BlooreComplex::from_parts(&re, &im))
}

fn diagonal() -> impl Strategy<Value = DiagonalVector> {
    prop::array::uniform4(0.01f64..1.0).prop_map(|mut d| {
        let s: f64 = d.iter().sum();
        d.iter_mut().for_each(|x| *x /= s);
        DiagonalVector(d)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn psd_does_not_depend_on_the_diagonal(z in real_z(), d in diagonal()) {
        let lam = to_na(&assemble_density(&z, &d).unwrap()).symmetric_eigenvalues().min();
        prop_assume!(lam.abs() > 1e-10);
        prop_assert_eq!(is_psd(&z), lam > 0.0);
    }

    #[test]
    fn complex_psd_does_not_depend_on_the_diagonal(z in complex_z(), d in diagonal()) {
        let lam = to_na(&assemble_density(&z, &d).unwrap()).symmetric_eigenvalues().min();
        prop_assume!(lam.abs() > 1e-10);
        prop_assert_eq!(z.is_psd(), lam > 0.0);
    }

    #[test]
    fn determinant_factorizes(z in real_z(), d in diagonal()) {
        let direct = to_na(&assemble_density(&z, &d).unwrap()).determinant().re;
        let factored = d.product() * a2_real(&z);
        prop_assert!((direct - factored).abs() <= 1e-12 * d.product() * (1.0 + a2_real(&z).abs()));
    }

    #[test]
    fn pt_determinant_is_the_scaled_quartic(z in real_z(), mu in 0.0f64..3.0) {
        let nu = NuRatio::from_mu(mu).unwrap();
        let pt = partial_transpose(&assemble_density(&z, &canonical_diagonals(nu)).unwrap());
        let direct = to_na(&pt).determinant().re;
        let s = CanonicalScales::new(nu);
        let via = s.quartic_prefactor() * a3_quartic_coeffs(&z).eval(mu);
        prop_assert!((direct - via).abs() <= 1e-12 * s.quartic_prefactor() * 16.0);
    }

    #[test]
    fn complex_pt_fast_path(z in complex_z(), mu in 0.0f64..3.0) {
        let nu = NuRatio::from_mu(mu).unwrap();
        let pt = partial_transpose(&assemble_density(&z, &canonical_diagonals(nu)).unwrap());
        let direct = to_na(&pt).determinant().re;
        let fast = z.pt_determinant(&CanonicalScales::new(nu));
        prop_assert!((direct - fast).abs() <= 1e-13);
    }

    #[test]
    fn faure_restart_equals_prefix(seed in any::<u64>(), skip in 0u64..5000, n in 1u64..50) {
        let all = generate(&SequenceSpec::for_case(Case::Complex, Some(seed), 0, skip + n)).unwrap();
        let tail = generate(&SequenceSpec::for_case(Case::Complex, Some(seed), skip, n)).unwrap();
        prop_assert_eq!(&all[skip as usize..], &tail[..]);
        prop_assert!(tail.iter().flatten().all(|&u| (0.0..1.0).contains(&u)));
    }

    #[test]
    fn jacobian_reflection(nu in 1e-4f64..1e4) {
        for case in [Case::Real, Case::Complex] {
            let j = JacobianCase::new(case);
            let lhs = j.eval(1.0 / nu);
            let rhs = nu * nu * j.eval(nu);
            prop_assert!(((lhs - rhs) / rhs).abs() < 1e-10);
            prop_assert!(rhs > 0.0);
        }
    }

    #[test]
    fn beta_symmetry(x in 0.0f64..=1.0, a in 0.01f64..=5.0, b in 0.01f64..=5.0) {
        let lhs = beta_inc(x, a, b).unwrap() + beta_inc(1.0 - x, b, a).unwrap();
        prop_assert!(((lhs - beta(a, b)) / beta(a, b)).abs() < 1e-13);
    }

    #[test]
    fn models_vanish_at_zero_and_increase(c in 0.1f64..1e3, a in 0.1f64..4.0, b in 0.1f64..4.0,
                                          x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let m = GModel::new(c, a, b).unwrap();
        prop_assert_eq!(m.eval(0.0).unwrap(), 0.0);
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        prop_assert!(m.eval(lo).unwrap() <= m.eval(hi).unwrap());
    }
}
