use p1tr::algebra::{BaseNumber as K, Field};
use p1tr::curve::SpectralCurve;
use p1tr::forms::{dxi_principal, FormSystem, PoleTensor};
use proptest::prelude::*;

fn system() -> FormSystem<K> {
    FormSystem::new(SpectralCurve::p1(K::from_i64(1), K::from_i64(0), K::sqrt2()).unwrap())
}

#[test]
fn dxi0_matches_closed_form() {
    for fs in [system(), FormSystem::new(SpectralCurve::p1(K::zero(), K::zero(), K::from_i64(1)).unwrap())] {
        for a in 0..2 {
            assert_eq!(fs.dxi(a, 0).unwrap(), fs.dxi0_closed(a).unwrap());
        }
    }
}

#[test]
fn dxi_local_structure() {
    let fs = system();
    for a in 0..2 {
        for d in 0..=4usize {
            let f = fs.dxi(a, d).unwrap();
            let p = fs.point(a).clone();
            assert_eq!(f.pole_order_at(&p), 2 * d as i64 + 2);
            assert!(f.pole_order_at(fs.point(1 - a)) <= 0);
            let fr = fs.frame(a, 2 * d + 8).unwrap();
            let s = fr.expand(&f, &p).unwrap();
            for e in -(2 * d as i64) - 2..0 {
                let c = s.coeff(e).unwrap();
                if e == -(2 * d as i64) - 2 {
                    assert_eq!(c, dxi_principal::<K>(d));
                } else {
                    assert!(c.is_zero(), "alpha {a} d {d} exponent {e}");
                }
            }
        }
    }
}

#[test]
fn w0_is_dxi0_and_w_forms_decompose() {
    let fs = system();
    for a in 0..2 {
        assert_eq!(fs.w_form(a, 0).unwrap(), fs.dxi(a, 0).unwrap());
        for k in 1..=3 {
            let w = fs.w_form(a, k).unwrap();
            let c = fs.decompose(&w).unwrap();
            assert_eq!(c.get(&(a, k)).cloned().unwrap_or_else(K::zero), K::one(), "top coefficient of W^{a}_{k}");
        }
    }
}

#[test]
fn decompose_linear_combination() {
    let fs = system();
    let f = fs.dxi(0, 0).unwrap().scale(&K::from_i64(3)).add(&fs.dxi(1, 2).unwrap().scale(&K::from_i64(5)));
    let c = fs.decompose(&f).unwrap();
    assert_eq!(c.len(), 2);
    assert_eq!(c[&(0, 0)], K::from_i64(3));
    assert_eq!(c[&(1, 2)], K::from_i64(5));
}

#[test]
fn decompose_rejects_residues() {
    let fs = system();
    let f = p1tr::algebra::RatFunc::pole(K::one(), fs.point(0), 1);
    assert!(fs.decompose(&f).is_err());
}

#[test]
fn tensor_json_round_trip() {
    let mut t = PoleTensor::zero(0, 3);
    t.add_term(vec![(0, 0), (1, 0), (0, 0)], K::ratio(3, 7));
    let back = PoleTensor::from_json(&t.to_json()).unwrap();
    assert_eq!(back, t);
}

fn arb_tensor() -> impl Strategy<Value = PoleTensor<K>> {
    (1usize..=2, proptest::collection::vec(((0usize..2, 0usize..=4), (0usize..2, 0usize..=4), -9i64..10), 1..4))
        .prop_map(|(n, terms)| {
            let mut t = PoleTensor::zero(1, n);
            for (s1, s2, c) in terms {
                let slots = if n == 1 { vec![s1] } else { vec![s1, s2] };
                t.add_term(slots, K::from_i64(c));
            }
            t
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]
    #[test]
    fn realize_then_decompose(t in arb_tensor()) {
        let fs = system();
        let m = fs.realize(&t).unwrap();
        let back = fs.decompose_multi(t.g, &m).unwrap();
        prop_assert_eq!(back, t);
    }
}
