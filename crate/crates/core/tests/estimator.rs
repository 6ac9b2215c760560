//! Estimator invariants that need whole campaigns.

use nalgebra::{Complex, Matrix4};
use proptest::prelude::*;
use sepvol::bloore::{assemble_density, canonical_diagonals, BlooreVector, NuRatio};
use sepvol::estimator::{count_at, estimate_f, EstimationConfig};
use sepvol::qmc::{generate, map_to_bloore, AnyBloore, SequenceSpec};
use sepvol::Case;

#[test]
fn psd_count_is_the_same_for_five_diagonals() {
    for case in [Case::Real, Case::Complex] {
        let n = 20_000;
        let cfg = EstimationConfig {
            grid_points: 5,
            ..EstimationConfig::desk(case).with_points(n)
        };
        let g = estimate_f(&cfg).unwrap();
        let pts = generate(&SequenceSpec::for_case(case, Some(1), 0, n)).unwrap();
        for nu in [0.01, 0.2, 0.5, 1.0, 3.0] {
            let d = canonical_diagonals(NuRatio::new(nu).unwrap());
            let count = pts
                .iter()
                .filter(|p| {
                    let z = map_to_bloore(p, case).unwrap();
                    let rho = match &z {
                        AnyBloore::Real(z) => assemble_density(z, &d),
                        AnyBloore::Complex(z) => assemble_density(z, &d),
                    }
                    .unwrap();
                    let m = Matrix4::<Complex<f64>>::from_fn(|i, j| rho.0[i][j]);
                    m.symmetric_eigenvalues().min() >= 0.0
                })
                .count() as u64;
            assert_eq!(count, g.n_psd, "{case} ν = {nu}");
        }
        // And the structural count agrees with the diagonal-free test.
        let direct = pts
            .iter()
            .filter(|p| map_to_bloore(p, case).unwrap().is_psd())
            .count() as u64;
        assert_eq!(direct, g.n_psd);
    }
}

#[test]
fn worker_count_does_not_change_counters() {
    for case in [Case::Real, Case::Complex] {
        let base = EstimationConfig {
            grid_points: 41,
            ..EstimationConfig::desk(case).with_points(300_001)
        };
        let mus = base.mu_grid();
        let runs: Vec<_> = [1, 3, 8]
            .into_iter()
            .map(|w| {
                count_at(
                    &EstimationConfig {
                        workers: w,
                        ..base.clone()
                    },
                    &mus,
                    None,
                )
                .unwrap()
            })
            .collect();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[0], runs[2]);
    }
}

#[test]
fn separability_is_tested_at_every_grid_value() {
    // Counts at a sub-grid must equal the corresponding entries of the full grid.
    let cfg = EstimationConfig {
        grid_points: 21,
        ..EstimationConfig::desk(Case::Real).with_points(50_000)
    };
    let full = estimate_f(&cfg).unwrap();
    let sub = count_at(&cfg, &[full.mu[3], full.mu[17]], None).unwrap();
    assert_eq!(sub.n_sep, vec![full.n_sep[3], full.n_sep[17]]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn counter_bounds(seed in any::<u64>(), n in 1u64..20_000, grid in 2usize..30, complex in any::<bool>()) {
        let case = if complex { Case::Complex } else { Case::Real };
        let cfg = EstimationConfig {
            grid_points: grid,
            sequence: SequenceSpec::for_case(case, Some(seed), 0, n),
            ..EstimationConfig::desk(case)
        };
        let g = estimate_f(&cfg).unwrap();
        prop_assert_eq!(g.points, n);
        prop_assert!(g.n_psd <= n);
        prop_assert!(g.n_sep.iter().all(|&k| k <= g.n_psd));
        prop_assert_eq!(g.n_sep[0], 0);
        prop_assert_eq!(g.len(), grid);
    }
}
