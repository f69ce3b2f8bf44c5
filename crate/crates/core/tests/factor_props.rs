use polylift_core::liftfactor::{
    factor_2x2, factor_nxn, profile_strictly_descends, random_sl_matrix, verify_chain, DEFAULT_TOL,
};
use polylift_core::Error;
use proptest::prelude::*;
use rand::rngs::SmallRng;
use rand::SeedableRng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_band_round_trip_descends(seed in any::<u64>(), count in 1usize..=6) {
        let mut rng = SmallRng::seed_from_u64(seed);
        let (a, _) = random_sl_matrix(2, count, 4, &mut rng).unwrap();
        let chain = factor_2x2(&a, DEFAULT_TOL).unwrap();
        let report = verify_chain(&chain, &a, 1e-9).unwrap();
        prop_assert!(report.passed, "err {}", report.max_coeff_err);
        prop_assert!(profile_strictly_descends(&chain, &report.degree_profile));
        prop_assert!(report.max_det_defect <= 1e-9 * a.det_scale());
        let bound = 2 * (1 + a.max_degree().finite().unwrap_or(0) as usize);
        prop_assert!(chain.lifting_len() <= bound, "len {} bound {}", chain.lifting_len(), bound);
    }

    #[test]
    fn multi_band_round_trip(seed in any::<u64>(), n in 3usize..=4, count in 1usize..=6) {
        let mut rng = SmallRng::seed_from_u64(seed);
        let (a, _) = random_sl_matrix(n, count, 4, &mut rng).unwrap();
        // rare numerical breakdowns must surface as factorization errors;
        // their rate is measured by the acceptance suite
        let chain = match factor_nxn(&a, DEFAULT_TOL) {
            Ok(chain) => chain,
            Err(e) => {
                let classified = matches!(
                    e,
                    Error::NotSl | Error::InconsistentQuotient { .. } | Error::NonTerminating { .. } | Error::NonUnitPivot { .. }
                );
                prop_assert!(classified, "unexpected error {e:?}");
                return Ok(());
            }
        };
        let report = verify_chain(&chain, &a, 1e-9).unwrap();
        let scale = a.entries().iter().map(|e| e.max_abs()).fold(1.0, f64::max);
        prop_assert!(report.max_coeff_err <= 1e-9 * scale, "err {} scale {}", report.max_coeff_err, scale);
        prop_assert!(report.max_det_defect <= 1e-9 * a.det_scale());
    }
}
