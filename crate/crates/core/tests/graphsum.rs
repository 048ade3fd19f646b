use std::sync::Arc;

use num_rational::BigRational;
use p1tr::algebra::{factorial, BaseNumber as K, Field};
use p1tr::curve::SpectralCurve;
use p1tr::forms::FormSystem;
use p1tr::givental::{Coh, FrobeniusPoint};
use p1tr::graphsum::*;
use p1tr::recursion::Recursion;
use p1tr::rmatrix::{r_from_curve, r_from_ode_at};

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn tuples(n: usize, base: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| (0..base).map(move |x| [t.clone(), vec![x]].concat()))
            .collect();
    }
    out
}

/// Sum over fully labeled graphs divided by |S_V x (S_E x Z2^E)|.
fn mass_formula(g: usize, n: usize) -> BigRational {
    let mut total = rat(0, 1);
    for nv in 1..=(2 * g + n - 2) {
        for genus in tuples(nv, g + 1) {
            let sg: usize = genus.iter().sum();
            if sg > g {
                continue;
            }
            let ne = g + nv - 1 - sg;
            let mut count = 0i64;
            for ends in tuples(2 * ne, nv) {
                for leaves in tuples(n, nv) {
                    let mut val = vec![0usize; nv];
                    for &x in ends.iter().chain(leaves.iter()) {
                        val[x] += 1;
                    }
                    if (0..nv).any(|v| 2 * genus[v] + val[v] <= 2) {
                        continue;
                    }
                    // connectivity by union-find
                    let mut parent: Vec<usize> = (0..nv).collect();
                    fn find(p: &mut Vec<usize>, x: usize) -> usize {
                        if p[x] != x {
                            let r = find(p, p[x]);
                            p[x] = r;
                        }
                        p[x]
                    }
                    for e in 0..ne {
                        let a = find(&mut parent, ends[2 * e]);
                        let b = find(&mut parent, ends[2 * e + 1]);
                        parent[a] = b;
                    }
                    let root = find(&mut parent, 0);
                    if (0..nv).all(|v| find(&mut parent, v) == root) {
                        count += 1;
                    }
                }
            }
            let den = factorial(nv as u64) * factorial(ne as u64) * num_bigint::BigInt::from(1u64 << ne);
            total += BigRational::new(count.into(), den);
        }
    }
    total
}

#[test]
fn enumeration_matches_the_mass_formula() {
    for (g, n) in [(0, 3), (0, 4), (0, 5), (1, 1), (1, 2), (1, 3), (2, 1), (2, 2)] {
        let graphs = enumerate_graphs(g, n).unwrap();
        let mass: BigRational = graphs.iter().map(|gr| rat(1, gr.aut as i64)).sum();
        assert_eq!(mass, mass_formula(g, n), "(g, n) = ({g}, {n})");
        for gr in &graphs {
            assert!(gr.is_stable() && gr.is_connected());
            assert_eq!(gr.total_genus(), g);
            assert_eq!(gr.leaves.len(), n);
        }
    }
}

#[test]
fn small_enumerations() {
    assert_eq!(enumerate_graphs(0, 3).unwrap().len(), 1);
    let g11 = enumerate_graphs(1, 1).unwrap();
    assert_eq!(g11.len(), 2);
    let auts: Vec<u64> = g11.iter().map(|g| g.aut).collect();
    assert!(auts.contains(&1) && auts.contains(&2));
    assert_eq!(enumerate_graphs(0, 4).unwrap().len(), 4);
    assert_eq!(enumerate_graphs(1, 2).unwrap().len(), 5);
    assert!(enumerate_graphs(0, 2).is_err());
    assert!(enumerate_graphs(1, 0).is_err());
}

#[test]
fn graph_sum_equals_recursion() {
    for (w1, w2, s) in [(K::from_i64(0), K::from_i64(0), K::from_i64(1)), (K::from_i64(1), K::from_i64(0), K::sqrt2())] {
        let fs = Arc::new(FormSystem::new(SpectralCurve::p1(w1, w2, s).unwrap()));
        let rec = Recursion::new(fs.clone());
        let r = r_from_curve(&fs, 12).unwrap();
        for (g, n) in [(0, 3), (1, 1), (0, 4), (1, 2)] {
            assert_eq!(*rec.omega(g, n).unwrap(), omega_via_graphs(&fs, &r, g, n).unwrap(), "({g},{n})");
        }
    }
}

#[test]
fn vertex_factor_ratio() {
    // (h_1/sqrt2)^(2-2g-val) = rho^(2-2g-val) sqrt(Delta)^(2g-2+val) with rho = -i
    for c in [
        SpectralCurve::p1(K::from_i64(1), K::from_i64(0), K::sqrt2()).unwrap(),
        SpectralCurve::p1(K::from_i64(0), K::from_i64(0), K::from_i64(1)).unwrap(),
    ] {
        let fs = FormSystem::new(c);
        let rho = vertex_ratio(&fs).unwrap();
        assert_eq!(rho, -K::i());
        for a in 0..2 {
            let h1 = fs.frame(a, 8).unwrap().h[1].clone();
            let sd = fs.curve.sqrt_delta(a).clone();
            for (g, val) in [(0usize, 3usize), (1, 1), (1, 2), (2, 1)] {
                let e = (2 * g + val - 2) as u32;
                let lhs = (&h1 * &K::sqrt2().inv().unwrap()).fpow(e).inv().unwrap();
                let rhs = &rho.fpow(e).inv().unwrap() * &sd.fpow(e);
                assert_eq!(lhs, rhs);
            }
        }
    }
}

fn ins(flat: usize, a: usize) -> Vec<Insertion<K>> {
    vec![Insertion { flat, a, coeff: K::one() }]
}

#[test]
fn genus_zero_primary_three_point() {
    for (w1, w2, s) in [(K::from_i64(1), K::from_i64(0), K::sqrt2()), (K::from_i64(3), K::ratio(1, 2), K::from_i64(2))] {
        let p = FrobeniusPoint::new(w1.clone(), w2.clone(), s.clone()).unwrap();
        let r = r_from_ode_at(&w1, &w2, &s, 6).unwrap();
        let basis = [Coh::one(), Coh::h()];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let got = descendant_sum(&p, &r, 0, &[ins(i, 0), ins(j, 0), ins(k, 0)]).unwrap();
                    let want = p.pairing(&p.quantum_product(&basis[i], &basis[j]), &basis[k]);
                    assert_eq!(got, want, "<T{i} T{j} T{k}>");
                }
            }
        }
    }
}

#[test]
fn genus_zero_stationary_one_point_from_j() {
    // <tau_{2d}(H) 1 1>_{0,3,d} = <tau_{2d-2}(H)>_{0,1,d} by the string equation
    let z = K::from_i64(0);
    let s = K::sqrt2();
    let p = FrobeniusPoint::new(z.clone(), z.clone(), s.clone()).unwrap();
    let r = r_from_ode_at(&z, &z, &s, 12).unwrap();
    for d in 1..=3usize {
        let got = descendant_sum(&p, &r, 0, &[ins(1, 2 * d), ins(0, 0), ins(0, 0)]).unwrap();
        let want = p.one_point(d).unwrap() * p.q().fpow(d as u32);
        assert_eq!(got, want, "d = {d}");
    }
}

#[test]
fn lambert_graph_sum_equals_recursion() {
    let fs = std::sync::Arc::new(p1tr::forms::FormSystem::new(p1tr::curve::SpectralCurve::lambert()));
    let rec = p1tr::recursion::Recursion::new(fs.clone());
    let r = p1tr::rmatrix::r_from_curve(&fs, p1tr::graphsum::GraphWeights::<p1tr::algebra::BaseNumber>::order_for(2, 1)).unwrap();
    for (g, n) in [(0, 3), (1, 1), (0, 4), (1, 2), (2, 1)] {
        assert_eq!(*rec.omega(g, n).unwrap(), p1tr::graphsum::omega_via_graphs(&fs, &r, g, n).unwrap(), "({g},{n})");
    }
}
