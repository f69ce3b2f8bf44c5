use polylift_core::filterbank::{
    analyze, apply_chain, apply_matrix_direct, merge, split, synthesize, BankOptions, Boundary, Padding, Signal,
};
use polylift_core::liftfactor::{random_lifting_steps, LiftingChain};
use polylift_core::polymat::{LiftingStep, PolyMatrix};
use polylift_core::{Complex64, Error};
use proptest::prelude::*;
use rand::rngs::SmallRng;
use rand::SeedableRng;

fn signal(max_len: usize) -> impl Strategy<Value = Signal> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..max_len)
        .prop_map(|v| Signal::new(v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()))
}

fn chain(n: usize, count: usize, seed: u64) -> LiftingChain {
    let mut rng = SmallRng::seed_from_u64(seed);
    LiftingChain {
        n,
        steps: random_lifting_steps(n, count, 4, &mut rng),
        residual: PolyMatrix::identity(n),
    }
}

fn energy(xs: &[Complex64]) -> f64 {
    xs.iter().map(|c| c.norm_sqr()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn perfect_reconstruction(x in signal(512), n in 2usize..=4, count in 1usize..=6, seed in any::<u64>()) {
        let c = chain(n, count, seed);
        let opts = BankOptions::default();
        let y = synthesize(&c, &analyze(&c, &x, opts).unwrap(), opts).unwrap();
        prop_assert!(y.max_diff(&x) <= 1e-10);
    }

    #[test]
    fn zero_boundary_reconstruction(x in signal(200), n in 2usize..=3, count in 1usize..=4, seed in any::<u64>()) {
        let c = chain(n, count, seed);
        let opts = BankOptions { boundary: Boundary::Zero, ..Default::default() };
        let y = synthesize(&c, &analyze(&c, &x, opts).unwrap(), opts).unwrap();
        prop_assert!(y.max_diff(&x) <= 1e-10);
    }

    #[test]
    fn factored_matches_direct(x in signal(300), n in 2usize..=4, count in 1usize..=6, seed in any::<u64>()) {
        let c = chain(n, count, seed);
        let opts = BankOptions::default();
        let a = c.product().unwrap();
        let f = apply_chain(&c, &x, opts).unwrap();
        let d = apply_matrix_direct(&a, &x, opts).unwrap();
        prop_assert!(f.max_diff(&d) <= 1e-10);
    }

    #[test]
    fn monomial_residual_round_trips(x in signal(100), shift in -5i64..5, k in 0.2f64..3.0) {
        let c = LiftingChain {
            n: 2,
            steps: vec![LiftingStep::lower(vec![polylift_core::LaurentPoly::from_real(&[0.5, -1.0])])],
            residual: PolyMatrix::diagonal(vec![
                polylift_core::LaurentPoly::monomial(Complex64::new(k, 0.0), shift),
                polylift_core::LaurentPoly::monomial(Complex64::new(1.0 / k, 0.0), -shift),
            ])
            .unwrap(),
        };
        let opts = BankOptions::default();
        let y = synthesize(&c, &analyze(&c, &x, opts).unwrap(), opts).unwrap();
        prop_assert!(y.max_diff(&x) <= 1e-10);
    }

    #[test]
    fn split_merge_is_a_permutation(x in signal(300), n in 2usize..=8) {
        let b = split(&x, n, BankOptions::default()).unwrap();
        // every sample lands in exactly one slot, the rest is zero padding
        let mut seen = vec![false; b.bands.concat().len()];
        for (i, s) in x.samples.iter().enumerate() {
            prop_assert_eq!(b.bands[i % n][i / n], *s);
            seen[(i % n) * b.bands[0].len() + i / n] = true;
        }
        for (slot, v) in b.bands.concat().iter().enumerate() {
            prop_assert!(seen[slot] || *v == Complex64::new(0.0, 0.0));
        }
        let (e_bands, e_x) = (energy(&b.bands.concat()), energy(&x.samples));
        prop_assert!((e_bands - e_x).abs() <= 1e-12 * e_x);
        prop_assert_eq!(merge(&b).unwrap(), x.clone());
        let strict = BankOptions { padding: Padding::Strict, ..Default::default() };
        match split(&x, n, strict) {
            Ok(_) => prop_assert_eq!(x.len() % n, 0),
            Err(e) => {
                let length_error = matches!(e, Error::LengthMismatch { .. });
                prop_assert!(length_error);
            }
        }
    }
}
