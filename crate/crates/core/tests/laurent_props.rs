use num_complex::Complex64;
use polylift_core::cuntz::grid_point;
use polylift_core::{Degree, LaurentPoly};
use proptest::prelude::*;

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..=max_len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

fn ordinary(max_len: usize) -> impl Strategy<Value = LaurentPoly> {
    coeffs(max_len).prop_map(|c| LaurentPoly::new(0, c))
}

fn laurent(max_len: usize) -> impl Strategy<Value = LaurentPoly> {
    (-4i64..4, coeffs(max_len)).prop_map(|(e, c)| LaurentPoly::new(e, c))
}

fn unit_point() -> impl Strategy<Value = Complex64> {
    (0.0..std::f64::consts::TAU).prop_map(|t| Complex64::from_polar(1.0, t))
}

fn rel_diff(a: &LaurentPoly, b: &LaurentPoly) -> f64 {
    a.max_coeff_diff(b) / a.max_abs().max(b.max_abs()).max(1.0)
}

proptest! {
    #[test]
    fn divrem_reconstructs_dividend(f in ordinary(9), g in ordinary(5)) {
        prop_assume!(g.degree() <= f.degree());
        prop_assume!(g.leading().unwrap().norm() > 0.05);
        let (q, r) = f.divrem(&g).unwrap();
        prop_assert!(r.degree() < g.degree());
        prop_assert!(q.is_ordinary() && r.is_ordinary());
        // rounding scales with the operands actually combined
        let scale = f.max_abs() + g.max_abs() * q.max_abs();
        prop_assert!((&(&g * &q) + &r).max_coeff_diff(&f) <= 1e-12 * scale);
    }

    #[test]
    fn mul_commutes_and_associates(a in laurent(5), b in laurent(5), c in laurent(5)) {
        prop_assert!(rel_diff(&(&a * &b), &(&b * &a)) <= 1e-12);
        prop_assert!(rel_diff(&(&(&a * &b) * &c), &(&a * &(&b * &c))) <= 1e-12);
    }

    #[test]
    fn eval_is_multiplicative(a in laurent(6), b in laurent(6), z in unit_point()) {
        let lhs = (&a * &b).eval(z).unwrap();
        let rhs = a.eval(z).unwrap() * b.eval(z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10);
    }

    #[test]
    fn normalize_monomial_round_trips(p in laurent(6)) {
        prop_assume!(!p.is_zero());
        let (l, q) = p.normalize_monomial().unwrap();
        prop_assert_eq!(q.min_exp(), 0);
        prop_assert!(q.coeff(0).norm() > 0.0);
        prop_assert_eq!(q.shift(l), p);
    }

    #[test]
    fn add_matches_pointwise_sum(a in laurent(6), b in laurent(6), k in 0usize..64) {
        let z = grid_point(k, 64);
        let s = (&a + &b).eval_at(z);
        prop_assert!((s - a.eval_at(z) - b.eval_at(z)).norm() <= 1e-12);
    }
}

#[test]
fn zero_degree_is_a_sentinel() {
    assert_eq!(LaurentPoly::zero().degree(), Degree::NegInfinity);
    assert!(LaurentPoly::zero().degree() < LaurentPoly::one().degree());
}
