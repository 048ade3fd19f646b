use p1tr::algebra::{BaseNumber as K, Field, Poly, RatFunc};
use p1tr::curve::{derive_params, SpectralCurve};

fn points() -> Vec<SpectralCurve<K>> {
    vec![
        SpectralCurve::p1(K::from_i64(1), K::from_i64(0), K::sqrt2()).unwrap(),
        SpectralCurve::p1(K::from_i64(0), K::from_i64(0), K::from_i64(1)).unwrap(),
        SpectralCurve::p1(K::from_i64(3), K::ratio(1, 2), K::from_i64(2)).unwrap(),
        SpectralCurve::lambert(),
    ]
}

#[test]
fn derived_parameters() {
    let c = derive_params(K::from_i64(1), K::from_i64(0), K::sqrt2()).unwrap();
    assert_eq!(c.q, K::ratio(3, 4));
    assert_eq!(c.p[0], K::ratio(1, 2));
    assert_eq!(c.p[1], K::ratio(-3, 2));
    assert_eq!(&c.p[0] * &c.p[1], -c.q.clone());
    assert_eq!(&c.p[0] + &c.p[1], &c.w2 - &c.w1);
    let d = &c.delta[0] * &c.delta[0];
    assert_eq!(d, &(&c.chi[0] * &c.chi[0]) + &(&c.q * &K::from_i64(4)));

    let n = derive_params(K::zero(), K::zero(), K::one()).unwrap();
    assert_eq!(n.q, K::ratio(1, 4));
}

#[test]
fn degenerate_parameters_are_rejected() {
    assert!(derive_params(K::zero(), K::zero(), K::zero()).is_err());
    assert!(derive_params(K::from_i64(1), K::zero(), K::one()).is_err());
}

#[test]
fn zeta_squared_is_the_critical_value_difference() {
    for c in points() {
        for a in 0..c.num_branch_points() {
            let f = c.local_frame(a, 10).unwrap();
            // dx pulled back equals -2 zeta dzeta
            let s = f.expand(&c.dx(), c.branch_point(a)).unwrap();
            assert!(s.order() >= 8);
            for e in 0..8 {
                let expect = if e == 1 { K::from_i64(-2) } else { K::zero() };
                assert_eq!(s.coeff(e).unwrap(), expect, "alpha {a} exponent {e}");
            }
            assert_eq!(&f.c1 * &f.c1, -(&(&K::from_i64(2) * &(c.branch_point(a) * c.branch_point(a))))
                .checked_div(&c.params.delta[a]).unwrap());
        }
    }
}

#[test]
fn first_h_coefficient() {
    for c in points() {
        for a in 0..c.num_branch_points() {
            let f = c.local_frame(a, 6).unwrap();
            let expect = -(&(&K::i() * &K::sqrt2()).checked_div(c.sqrt_delta(a)).unwrap());
            assert_eq!(f.h[1], expect);
        }
    }
}

#[test]
fn lambert_branch_point() {
    let c = SpectralCurve::lambert();
    assert_eq!(c.branch_point(0), &K::one());
    let f = c.local_frame(0, 4).unwrap();
    assert_eq!(&f.c1 * &f.c1, K::from_i64(-2));
}

#[test]
fn simple_pole_residue_is_one() {
    for c in points() {
        let p = c.branch_point(0).clone();
        let f = c.local_frame(0, 8).unwrap();
        let form = RatFunc::new(Poly::one(), Poly::linear_root(&p)).unwrap();
        assert_eq!(f.expand(&form, &p).unwrap().residue().unwrap(), K::one());
        let dy = RatFunc::constant(K::one());
        let s = f.expand(&dy, &p).unwrap();
        assert_eq!(s.coeff(0).unwrap(), f.c1);
    }
}

#[test]
fn fingerprints_distinguish_curves() {
    let p = points();
    assert_ne!(p[0].fingerprint(), p[1].fingerprint());
    assert_eq!(p[0].fingerprint(), points()[0].fingerprint());
}
