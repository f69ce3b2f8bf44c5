use num_complex::Complex64;
use polylift_core::cuntz::{grid_point, CuntzRep};
use polylift_core::polymat::{LiftingStep, PolyMatrix};
use polylift_core::LaurentPoly;
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = LaurentPoly> {
    (
        -2i64..3,
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 0..4),
    )
        .prop_map(|(e, c)| LaurentPoly::new(e, c.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()))
}

fn step(n: usize) -> impl Strategy<Value = LiftingStep> {
    let band = (1..n, any::<bool>()).prop_flat_map(move |(offset, lower)| {
        prop::collection::vec(poly(), n - offset).prop_map(move |polys| {
            if lower {
                LiftingStep::Lower { offset, polys }
            } else {
                LiftingStep::Upper { offset, polys }
            }
        })
    });
    prop_oneof![
        band,
        (0.2..2.0f64, 0.0..6.3f64).prop_map(|(r, t)| LiftingStep::DiagonalScale(Complex64::from_polar(r, t))),
        (-3i64..4).prop_map(LiftingStep::MonomialShift),
    ]
}

fn sized_step() -> impl Strategy<Value = (usize, LiftingStep)> {
    (2usize..6).prop_flat_map(|n| step(n).prop_map(move |s| (n, s)))
}

fn matrix(n: usize) -> impl Strategy<Value = PolyMatrix> {
    prop::collection::vec(poly(), n * n).prop_map(move |e| PolyMatrix::new(n, e).unwrap())
}

fn coeff_vec(len: usize) -> impl Strategy<Value = LaurentPoly> {
    (-5i64..5, prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 0..=len))
        .prop_map(|(e, c)| LaurentPoly::new(e, c.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()))
}

proptest! {
    #[test]
    fn step_determinant((n, s) in sized_step()) {
        let det = s.realize(n).unwrap().det();
        let expect = match s {
            LiftingStep::MonomialShift(l) => LaurentPoly::z_pow(n as i64 * l),
            _ => LaurentPoly::one(),
        };
        prop_assert!(det.max_coeff_diff(&expect) <= 1e-12);
    }

    #[test]
    fn step_times_inverse_is_identity((n, s) in sized_step()) {
        let prod = s.realize(n).unwrap().matmul(&s.invert().unwrap().realize(n).unwrap()).unwrap();
        prop_assert!(prod.max_coeff_diff(&PolyMatrix::identity(n)) <= 1e-12);
    }

    #[test]
    fn polyphase_action_associates((n, a, b) in (2usize..4).prop_flat_map(|n| (Just(n), matrix(n), matrix(n)))) {
        let lhs = a.matmul(&b).unwrap().polyphase_apply();
        let fb = b.polyphase_apply();
        for k in 0..8 {
            let z = grid_point(3 * k + 1, 29);
            let zn = z.powu(n as u32);
            let an = a.eval_at(zn);
            for i in 0..n {
                let rhs: Complex64 = (0..n).map(|j| an[i * n + j] * fb[j].eval_at(z)).sum();
                prop_assert!((lhs[i].eval_at(z) - rhs).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn cuntz_isometries_are_exact(n in 2usize..9, f in coeff_vec(40)) {
        let rep = CuntzRep::monomial(n).unwrap();
        for j in 0..n {
            let sf = rep.s_apply(j, &f).unwrap();
            prop_assert_eq!(sf.norm_sqr(), f.norm_sqr());
            for k in 0..n {
                let back = rep.s_adjoint(k, &sf).unwrap();
                if j == k {
                    prop_assert_eq!(&back, &f);
                } else {
                    prop_assert!(back.is_zero());
                }
            }
        }
        let parts = rep.polyphase_split(&f).unwrap();
        prop_assert_eq!(rep.reconstruct(&parts).unwrap(), f);
    }

    #[test]
    fn cuntz_evaluation_identity(n in 2usize..6, j in 0usize..6, f in coeff_vec(12), k in 0usize..97) {
        prop_assume!(j < n);
        let rep = CuntzRep::monomial(n).unwrap();
        let z = grid_point(k, 97);
        let lhs = rep.s_apply(j, &f).unwrap().eval_at(z);
        let rhs = z.powu(j as u32) * f.eval_at(z.powu(n as u32));
        prop_assert!((lhs - rhs).norm() <= 1e-10);
    }

    #[test]
    fn haar_is_isometric(f in coeff_vec(30)) {
        let rep = CuntzRep::haar();
        for j in 0..2 {
            let sf = rep.s_apply(j, &f).unwrap();
            prop_assert!((sf.norm_sqr() - f.norm_sqr()).abs() <= 1e-12 * f.norm_sqr().max(1.0));
        }
    }
}
