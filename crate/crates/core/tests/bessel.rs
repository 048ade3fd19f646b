use num_rational::BigRational;
use p1tr::algebra::{BaseNumber as K, Field, TruncSeries, Var};
use p1tr::bessel::*;
use p1tr::givental::{bernoulli_exp, s_tilde_q0, FrobeniusPoint};
use p1tr::rmatrix::{eval_even, r_from_ode};

fn k(p: i64, q: i64) -> K {
    K::from_rational(&BigRational::new(p.into(), q.into()))
}

fn points() -> Vec<FrobeniusPoint<K>> {
    vec![
        FrobeniusPoint::new(K::one(), K::zero(), K::sqrt2()).unwrap(),
        FrobeniusPoint::new(K::from_i64(2), K::zero(), K::from_i64(2)).unwrap(),
        FrobeniusPoint::new(K::from_i64(3), k(1, 2), K::from_i64(2)).unwrap(),
        FrobeniusPoint::new(K::zero(), K::zero(), K::sqrt2()).unwrap(),
    ]
}

#[test]
fn j_matches_bessel_to_q8() {
    for p in points() {
        let rep = check_j_bessel(&p, 8).unwrap();
        assert!(rep.passed(), "{rep}");
    }
}

#[test]
fn low_order_bessel_terms() {
    // 1/(z(chi + z)) = w^2 sum (-chi w)^k and 1/(2 z^2 (chi + z)(chi + 2z))
    let chi = k(3, 2);
    let order = 10;
    let geo = |m: i64| {
        let c: Vec<K> = (0..order).map(|j| chi.fneg().fdiv(&K::from_i64(m)).unwrap().fpow(j as u32).fdiv(&K::from_i64(m)).unwrap()).collect();
        TruncSeries::new(Var::W, 0, c, order)
    };
    assert_eq!(bessel_term(&K::zero(), 0, order).unwrap(), TruncSeries::one(Var::W, order));
    assert_eq!(bessel_term(&chi, 1, order).unwrap(), geo(1).shift(2).truncate(order));
    assert_eq!(bessel_term(&chi, 2, order).unwrap(), geo(1).mul(&geo(2)).shift(4).scale(&k(1, 2)).truncate(order));
}

#[test]
fn printed_intermediate_differs_by_four_to_the_m() {
    let chi = K::from_i64(2);
    for m in 1..=4 {
        let a = printed_intermediate_term(&chi, m, 14).unwrap();
        let b = j_closed_term(&chi, m, 14).unwrap();
        assert_ne!(a, b);
        assert_eq!(a, b.scale(&K::from_i64(4).fpow(m as u32)));
    }
}

#[test]
fn qde_to_q8() {
    for p in points() {
        let rep = check_qde(&p, 8).unwrap();
        assert!(rep.passed(), "{rep}");
        assert_eq!(rep.checked, 9);
    }
}

#[test]
fn unit_contours() {
    assert_eq!(contour_via_shift(0, 0).unwrap(), gamma00());
    assert_eq!(contour_via_shift(0, 1).unwrap(), gamma01());
    assert_eq!(gamma00(), contour_closed(0, 0));
    assert_eq!(gamma01(), contour_closed(0, 1));
}

#[test]
fn contour_one_one() {
    // gamma_(-1,2) + gamma_(0,1) - gamma_(0,0)
    let expected = gamma01().scale(1, 1).add(&gamma01()).add(&gamma00().scale(-1, 0));
    let d = contour_decompose(1, 1, Decomposition::Corrected).unwrap();
    assert_eq!(d, expected);
    assert_eq!(d, contour_closed(1, 1));
}

#[test]
fn printed_decomposition_fails() {
    let d = contour_decompose(1, 1, Decomposition::Printed).unwrap();
    assert_ne!(d, contour_closed(1, 1));
}

#[test]
fn contour_lemma_up_to_three() {
    let rep = check_contour_lemma(3).unwrap();
    assert!(rep.passed(), "{rep}");
    assert!(contour_via_shift(-2, 1).is_err());
}

#[test]
fn s_tilde_at_q0_factors_through_r() {
    // S-tilde = Psi R at q = 0 with Psi_i^alpha = T_i|alpha / sqrt(chi^alpha)
    let order = 7;
    for (w1, w2, s) in [(K::from_i64(2), K::zero(), K::sqrt2()), (K::from_i64(3), K::from_i64(-1), K::from_i64(2))] {
        let st = s_tilde_q0(&w1, &w2, &s, order).unwrap();
        let r = r_from_ode(&w1, &w2, order as usize).unwrap();
        let chi = w1.fsub(&w2);
        let sq = [s.clone(), K::i().fmul(&s)];
        let w = [w1.clone(), w2.clone()];
        for i in 0..2 {
            for b in 0..2 {
                let mut acc = TruncSeries::zero(Var::Z, order);
                for a in 0..2 {
                    let ra = r.r[a][b].try_map(|x| eval_even(x, &chi)).unwrap();
                    let t = if i == 0 { K::one() } else { w[a].clone() };
                    acc = acc.add(&ra.scale(&t.fdiv(&sq[a]).unwrap()));
                }
                assert_eq!(acc.truncate(order - 1), st[i][b].truncate(order - 1), "({i},{b})");
            }
        }
        let b1 = bernoulli_exp(&chi, order).unwrap();
        assert_eq!(b1.coeff(1).unwrap(), chi.fmul(&K::from_i64(12)).finv().unwrap().fneg());
    }
}
