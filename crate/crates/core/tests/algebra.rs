use num_bigint::BigInt;
use num_rational::BigRational;
use p1tr::algebra::{bernoulli, BaseNumber as K, Field, Poly, RatFunc, Scalar, TruncSeries, Var};
use proptest::prelude::*;
use serde_json::json;

fn k(p: i64, q: i64) -> K {
    K::ratio(p, q)
}

fn kn(a: i64, b: i64, c: i64, d: i64, den: i64) -> K {
    let r = |x: i64| BigRational::new(BigInt::from(x), BigInt::from(den));
    K::new(r(a), r(b), r(c), r(d))
}

#[test]
fn i_squared_is_minus_one() {
    assert_eq!(&K::i() * &K::i(), K::from_i64(-1));
    assert_eq!(&K::sqrt2() * &K::sqrt2(), K::from_i64(2));
}

#[test]
fn inverse_of_one_plus_i() {
    let x = &K::one() + &K::i();
    assert_eq!(x.inv().unwrap(), kn(1, -1, 0, 0, 2));
}

#[test]
fn division_by_zero_is_an_error() {
    assert!(K::zero().inv().is_err());
}

#[test]
fn square_roots_in_k() {
    assert_eq!(K::from_i64(-1).sqrt().unwrap(), K::i());
    assert_eq!(k(1, 2).sqrt().unwrap(), kn(0, 0, 1, 0, 2));
    let r = K::from_i64(-8).sqrt().unwrap();
    assert_eq!(&r * &r, K::from_i64(-8));
    let z = kn(3, 4, 0, 0, 1);
    let s = z.sqrt().unwrap();
    assert_eq!(&s * &s, z);
    let two_i = kn(0, 2, 0, 0, 1);
    let s = two_i.sqrt().unwrap();
    assert_eq!(&s * &s, two_i);
    assert!(K::from_i64(3).sqrt().is_none());
}

#[test]
fn json_round_trip_and_float_rejection() {
    let x = kn(1, -3, 5, 7, 6);
    assert_eq!(K::from_json(&x.to_json()).unwrap(), x);
    assert_eq!(K::from_json(&json!("3/4")).unwrap(), k(3, 4));
    assert_eq!(K::from_json(&json!(-2)).unwrap(), K::from_i64(-2));
    assert!(K::from_json(&json!(0.5)).is_err());
    assert!(K::from_json(&json!("0.5")).is_err());
}

#[test]
fn bernoulli_values() {
    let b = |n| bernoulli(n);
    assert_eq!(b(1), BigRational::new((-1).into(), 2.into()));
    assert_eq!(b(2), BigRational::new(1.into(), 6.into()));
    assert_eq!(b(4), BigRational::new((-1).into(), 30.into()));
    assert_eq!(b(6), BigRational::new(1.into(), 42.into()));
    assert_eq!(b(3), BigRational::from_integer(0.into()));
}

#[test]
fn series_reversion_of_x_plus_x2() {
    let s = TruncSeries::new(Var::X, 1, vec![K::one(), K::one()], 8);
    let r = s.reversion().unwrap();
    let expect = [1, -1, 2, -5, 14, -42, 132];
    for (j, c) in expect.iter().enumerate() {
        assert_eq!(r.coeff(j as i64 + 1).unwrap(), K::from_i64(*c));
    }
    let back = s.compose(&r).unwrap();
    assert_eq!(back.coeff(1).unwrap(), K::one());
    for e in 2..8 {
        assert!(back.coeff(e).unwrap().is_zero());
    }
}

#[test]
fn truncation_is_reported() {
    let s = TruncSeries::new(Var::X, 0, vec![K::one()], 3);
    assert!(s.coeff(3).is_err());
    assert!(s.coeff(-5).unwrap().is_zero());
}

#[test]
fn residue_of_rational_function() {
    // 1/(Y (Y - 1)) has residue -1 at 0 and +1 at 1.
    let f = RatFunc::new(
        Poly::constant(K::one()),
        Poly::new(vec![K::zero(), K::from_i64(-1), K::one()]),
    )
    .unwrap();
    assert_eq!(f.expand_at(&K::zero(), Var::Y, 3).unwrap().residue().unwrap(), K::from_i64(-1));
    assert_eq!(f.expand_at(&K::one(), Var::U, 3).unwrap().residue().unwrap(), K::one());
    let inf = f.expand_at_infinity(Var::T, 5).unwrap();
    assert_eq!(inf.coeff(2).unwrap(), K::one());
    assert_eq!(inf.coeff(3).unwrap(), K::one());
    assert_eq!(f.pole_order_at(&K::one()), 1);
}

#[test]
fn exp_and_log_are_inverse() {
    let s = TruncSeries::new(Var::X, 1, vec![k(1, 2), k(-3, 1), k(2, 7)], 7);
    let back = s.exp().unwrap().log().unwrap();
    for e in 0..7 {
        assert_eq!(back.coeff(e).unwrap(), s.coeff(e).unwrap());
    }
}

#[test]
fn scalar_reduction_and_calculus() {
    let s = Scalar::sigma();
    let x = s.fmul(&s).fsub(&Scalar::one());
    let y = s.fsub(&Scalar::one());
    let q = x.fdiv(&y).unwrap();
    assert_eq!(q, s.fadd(&Scalar::one()));
    let lp = Scalar::sigma_pow(K::from_i64(3), -4);
    assert_eq!(lp.derivative(), Scalar::sigma_pow(K::from_i64(-12), -5));
    assert_eq!(lp.derivative().integrate_sigma().unwrap(), lp);
    assert!(Scalar::sigma_pow(K::one(), -1).integrate_sigma().is_err());
    assert_eq!(lp.eval(&K::from_i64(2)).unwrap(), k(3, 16));
    let js = lp.to_json();
    assert_eq!(Scalar::from_json(&js).unwrap(), lp);
}

fn arb_k() -> impl Strategy<Value = K> {
    (-20i64..20, -20i64..20, -20i64..20, -20i64..20, 1i64..12)
        .prop_map(|(a, b, c, d, q)| kn(a, b, c, d, q))
}

proptest! {
    #[test]
    fn field_axioms(a in arb_k(), b in arb_k(), c in arb_k()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, K::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), K::one());
        }
    }

    #[test]
    fn series_inverse(a in proptest::collection::vec(arb_k(), 1..6)) {
        prop_assume!(!a[0].is_zero());
        let s = TruncSeries::new(Var::Z, -1, a, 6);
        let p = s.mul(&s.inv().unwrap());
        prop_assert_eq!(p.coeff(0).unwrap(), K::one());
        for e in 1..p.order() {
            prop_assert!(p.coeff(e).unwrap().is_zero());
        }
    }

    #[test]
    fn poly_divrem(a in proptest::collection::vec(arb_k(), 0..5), b in proptest::collection::vec(arb_k(), 1..4)) {
        let pa = Poly::new(a);
        let pb = Poly::new(b);
        prop_assume!(!pb.is_zero());
        let (q, r) = pa.divrem(&pb).unwrap();
        prop_assert!(r.degree() < pb.degree());
        prop_assert_eq!(q.mul(&pb).add(&r), pa);
    }
}
