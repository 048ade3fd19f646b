//! Acceptance criteria. Prints one pass/fail line per criterion and exits
//! nonzero if any fails.

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use p1tr::algebra::{factorial, BaseNumber as K, Field};
use p1tr::applications::{hurwitz_bruteforce, hurwitz_extract, norbury_scott_extract};
use p1tr::bessel::{check_contour_lemma, check_j_bessel, check_qde, CheckReport};
use p1tr::cli::CACHE_ENV;
use p1tr::curve::SpectralCurve;
use p1tr::forms::{dxi_principal, FormSystem, PoleTensor};
use p1tr::givental::{bernoulli_exp, FrobeniusPoint};
use p1tr::graphsum::{descendant_sum, omega_via_graphs, GraphWeights, Insertion};
use p1tr::intersections::tau;
use p1tr::recursion::{Recursion, ZetaSlot};
use p1tr::rmatrix::{eval_even, r_closed, r_from_curve, r_from_ode, r_from_ode_at};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

type Res = p1tr::error::Result<CheckReport>;

fn k(a: i64, b: i64) -> K {
    K::ratio(a, b)
}

fn p1(w1: K, w2: K, s: K) -> Arc<FormSystem<K>> {
    Arc::new(FormSystem::new(SpectralCurve::p1(w1, w2, s).unwrap()))
}

fn within(rep: &mut CheckReport, start: Instant, limit: Duration) {
    let t = start.elapsed();
    rep.record(t <= limit, || format!("took {:.1} s, limit {} s", t.as_secs_f64(), limit.as_secs()));
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn c1() -> Res {
    let start = Instant::now();
    let mut rep = CheckReport::new("recursion = graph sum");
    let points = [
        (K::from_i64(1), K::from_i64(0), K::sqrt2()),
        (K::from_i64(2), K::from_i64(0), K::from_i64(2)),
        (K::from_i64(0), K::from_i64(0), K::from_i64(1)),
    ];
    for (w1, w2, s) in points {
        let fs = p1(w1.clone(), w2.clone(), s.clone());
        let rec = Recursion::new(fs.clone());
        let r = r_from_curve(&fs, GraphWeights::<K>::order_for(2, 1))?;
        for (g, n) in [(0, 3), (0, 4), (1, 1), (1, 2), (2, 1)] {
            let ok = *rec.omega(g, n)? == omega_via_graphs(&fs, &r, g, n)?;
            rep.record(ok, || format!("({g},{n}) at w=({w1},{w2}) sigma={s}"));
        }
    }
    within(&mut rep, start, Duration::from_secs(300));
    Ok(rep)
}

fn c2() -> Res {
    let mut rep = CheckReport::new("R-matrix routes");
    let order = 7;
    for s in [K::from_i64(1), K::sqrt2(), k(3, 2)] {
        let c = r_from_curve(&p1(K::zero(), K::zero(), s.clone()), order)?;
        let o = r_from_ode_at(&K::zero(), &K::zero(), &s, order)?;
        let cl = r_closed(&s, order)?;
        rep.record(c.agrees_with(&o, order as i64), || format!("curve vs ode at sigma={s}"));
        rep.record(c.agrees_with(&cl, order as i64), || format!("curve vs closed form at sigma={s}"));
        rep.record(o.agrees_with(&cl, order as i64), || format!("ode vs closed form at sigma={s}"));
    }
    for (w1, w2, s) in [(K::from_i64(1), K::zero(), K::sqrt2()), (K::from_i64(3), k(1, 2), K::from_i64(2))] {
        let c = r_from_curve(&p1(w1.clone(), w2.clone(), s.clone()), order)?;
        let o = r_from_ode_at(&w1, &w2, &s, order)?;
        rep.record(c.agrees_with(&o, order as i64), || format!("curve vs ode at w=({w1},{w2}) sigma={s}"));
    }
    Ok(rep)
}

fn c3() -> Res {
    let mut rep = CheckReport::new("unitarity and q -> 0 limit");
    let order = 7;
    for (w1, w2, s) in [(K::from_i64(1), K::zero(), K::sqrt2()), (K::zero(), K::zero(), K::from_i64(1))] {
        rep.record(r_from_curve(&p1(w1.clone(), w2.clone(), s.clone()), order)?.is_unitary(), || format!("curve route at sigma={s}"));
        rep.record(r_from_ode_at(&w1, &w2, &s, order)?.is_unitary(), || format!("ode route at sigma={s}"));
    }
    rep.record(r_closed(&K::sqrt2(), order)?.is_unitary(), || "closed form".into());
    let sym = r_from_ode(&K::from_i64(1), &K::zero(), order)?;
    rep.record(sym.is_unitary(), || "symbolic ode route".into());
    let log = FormSystem::new(SpectralCurve::log_line(K::from_i64(-1), K::from_i64(-1).sqrt().expect("sqrt"))?);
    rep.record(r_from_curve(&log, order)?.is_unitary(), || "degenerate curve route".into());

    // Bernoulli diagonal to z^5
    let chi = K::from_i64(1);
    for a in 0..2 {
        let c = if a == 0 { chi.clone() } else { -chi.clone() };
        let b = bernoulli_exp(&c, 6)?;
        for j in 0..6 {
            let d = eval_even(&sym.r[a][a].coeff(j)?, &chi)?;
            rep.record(d == b.coeff(j)?, || format!("diagonal {a} at z^{j}"));
            let od = eval_even(&sym.r[a][1 - a].coeff(j)?, &chi)?;
            rep.record(od.is_zero(), || format!("off-diagonal {a} at z^{j}"));
        }
    }
    for chi in [K::from_i64(1), K::from_i64(-2), k(1, 2)] {
        let w1 = -chi.clone();
        let fs = FormSystem::new(SpectralCurve::log_line(w1.clone(), w1.sqrt().expect("sqrt"))?);
        let r = r_from_curve(&fs, 6)?;
        let b = bernoulli_exp(&chi, 6)?;
        for j in 0..6 {
            rep.record(r.r[0][0].coeff(j)? == b.coeff(j)?, || format!("degenerate curve chi={chi} at z^{j}"));
        }
    }
    Ok(rep)
}

fn c4() -> Res {
    let start = Instant::now();
    let mut rep = CheckReport::new("psi intersections");
    for n in 3..=8usize {
        for ks in compositions(n - 3, n) {
            let mut expected = BigRational::from_integer(factorial(n as u64 - 3));
            for &x in &ks {
                expected /= BigRational::from_integer(factorial(x as u64));
            }
            let v = tau(0, &ks)?;
            rep.record(v == expected, || format!("genus 0 {ks:?}: {v}"));
        }
    }
    let mut keys = Vec::new();
    for g in 0..=3usize {
        for n in 1..=4usize {
            if 2 * g + n > 2 {
                keys.extend(compositions(3 * g + n - 3, n).into_iter().map(|ks| (g, ks)));
            }
        }
    }
    let mut runner = TestRunner::deterministic();
    let strategy = proptest::sample::select(keys);
    for _ in 0..200 {
        let (g, ks) = strategy.new_tree(&mut runner).expect("sample key").current();
        let n = ks.len();
        let mut with0 = ks.clone();
        with0.push(0);
        let mut string = BigRational::from_integer(0.into());
        for j in 0..n {
            if ks[j] > 0 {
                let mut m = ks.clone();
                m[j] -= 1;
                string += tau(g, &m)?;
            }
        }
        rep.record(tau(g, &with0)? == string, || format!("string at g={g} {ks:?}"));
        let mut with1 = ks.clone();
        with1.push(1);
        let dil = tau(g, &ks)? * BigRational::from_integer(((2 * g + n) as i64 - 2).into());
        rep.record(tau(g, &with1)? == dil, || format!("dilaton at g={g} {ks:?}"));
    }
    let t = tau(1, &[1])?;
    rep.record(t == BigRational::new(1.into(), 24.into()), || format!("<tau_1>_1 = {t}"));
    within(&mut rep, start, Duration::from_secs(10));
    Ok(rep)
}

fn c5() -> Res {
    let mut rep = CheckReport::new("stationary invariants");
    let tables = |s: K| -> p1tr::error::Result<Vec<_>> {
        let fs = p1(K::zero(), K::zero(), s);
        let rec = Recursion::new(fs.clone());
        [(0, 3), (0, 4), (1, 1), (1, 2)]
            .into_iter()
            .map(|(g, n)| Ok((g, n, norbury_scott_extract(&fs, &*rec.omega(g, n)?, 4)?)))
            .collect()
    };
    let s = K::sqrt2();
    let fs = p1(K::zero(), K::zero(), s.clone());
    let r = r_from_curve(&fs, 16)?;
    let p = FrobeniusPoint::new(K::zero(), K::zero(), s.clone())?;
    let hi = tables(s)?;
    let lo = tables(K::one())?;
    for ((g, n, a), (_, _, b)) in hi.iter().zip(&lo) {
        for (key, e) in a {
            let inputs: Vec<_> = key.iter().map(|&x| vec![Insertion { flat: 1, a: x, coeff: K::one() }]).collect();
            let d = descendant_sum(&p, &r, *g, &inputs)?;
            rep.record(d == e.full, || format!("({g},{n}) {key:?}: extracted {} vs descendant {d}", e.full));
            let f = &b[key];
            rep.record(e.value == f.value, || format!("({g},{n}) {key:?}: value depends on q"));
            if !e.full.is_zero() {
                let sum: usize = key.iter().sum();
                let want = (sum / 2) as i64 + 1 - *g as i64;
                rep.record(sum % 2 == 0 && e.q_power == Some(want), || format!("({g},{n}) {key:?}: q-power {:?}", e.q_power));
            }
        }
    }
    let q1 = FrobeniusPoint::new(K::zero(), K::zero(), K::one())?;
    for d in 1..=3u64 {
        let v = q1.one_point(d as usize)?;
        let expected = K::from_rational(&BigRational::new(1.into(), factorial(d) * factorial(d)));
        rep.record(v == expected, || format!("one-point d={d}: {v}"));
    }
    Ok(rep)
}

fn c6() -> Res {
    let mut rep = CheckReport::new("simple Hurwitz numbers");
    let fs = Arc::new(FormSystem::new(SpectralCurve::lambert()));
    let rec = Recursion::new(fs.clone());
    for (g, n) in [(0, 3), (1, 1), (0, 4), (1, 2)] {
        let table = hurwitz_extract(&fs, &*rec.omega(g, n)?, 4)?;
        rep.record(!table.is_empty(), || format!("({g},{n}) empty"));
        for (mu, h) in table {
            if mu.iter().sum::<usize>() > 4 {
                continue;
            }
            let bf = K::from_rational(&hurwitz_bruteforce(g, &mu)?);
            rep.record(h == bf, || format!("H_{{{g},{mu:?}}}: extracted {h} vs count {bf}"));
        }
    }
    Ok(rep)
}

fn c7() -> Res {
    let start = Instant::now();
    let mut rep = CheckReport::new("Bessel structure");
    for (w1, w2, s) in [(K::from_i64(1), K::zero(), K::sqrt2()), (K::zero(), K::zero(), K::from_i64(1)), (K::from_i64(3), k(1, 2), K::from_i64(2))] {
        let f = FrobeniusPoint::new(w1, w2, s)?;
        rep.merge(check_j_bessel(&f, 8)?);
        rep.merge(check_qde(&f, 8)?);
    }
    rep.merge(check_contour_lemma(3)?);
    within(&mut rep, start, Duration::from_secs(10));
    Ok(rep)
}

fn arb_tensor(g: usize) -> impl Strategy<Value = PoleTensor<K>> {
    (1usize..=2, proptest::collection::vec(((0usize..2, 0usize..=4), (0usize..2, 0usize..=4), -9i64..10), 1..4)).prop_map(
        move |(n, terms)| {
            let mut t = PoleTensor::zero(g, n);
            for (s1, s2, c) in terms {
                let slots = if n == 1 { vec![s1] } else { vec![s1, s2] };
                t.add_term(slots, K::from_i64(c));
            }
            t
        },
    )
}

fn c8() -> Res {
    let mut rep = CheckReport::new("basis forms");
    let fs = p1(K::from_i64(1), K::zero(), K::sqrt2());
    for a in 0..2 {
        let p = fs.point(a).clone();
        for d in 0..=4usize {
            let f = fs.dxi(a, d)?;
            let top = 2 * d as i64 + 2;
            rep.record(f.pole_order_at(&p) == top, || format!("alpha {a} d {d}: pole order"));
            rep.record(f.pole_order_at(fs.point(1 - a)) <= 0, || format!("alpha {a} d {d}: pole at the other branch point"));
            let s = fs.frame(a, 2 * d + 8)?.expand(&f, &p)?;
            for e in -top..0 {
                let c = s.coeff(e)?;
                if e == -top {
                    rep.record(c == dxi_principal::<K>(d), || format!("alpha {a} d {d}: leading coefficient {c}"));
                } else if e == -1 {
                    rep.record(c.is_zero(), || format!("alpha {a} d {d}: residue {c}"));
                } else {
                    rep.record(c.is_zero(), || format!("alpha {a} d {d}: extra singular term at {e}"));
                }
            }
        }
    }
    let mut runner = TestRunner::deterministic();
    for i in 0..50 {
        let t = arb_tensor(i % 2).new_tree(&mut runner).expect("sample tensor").current();
        let back = fs.decompose_multi(t.g, &fs.realize(&t)?)?;
        rep.record(back == t, || format!("round trip {i}"));
    }
    Ok(rep)
}

fn run_cli(args: &[&str], cache: Option<&Path>) -> String {
    let mut c = Command::new(env!("CARGO_BIN_EXE_p1tr"));
    c.args(args).env_remove(CACHE_ENV);
    if let Some(d) = cache {
        c.env(CACHE_ENV, d);
    }
    let o = c.output().expect("run p1tr");
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn c9() -> Res {
    let mut rep = CheckReport::new("hygiene");
    for fs in [p1(K::from_i64(1), K::zero(), K::sqrt2()), p1(K::zero(), K::zero(), K::one())] {
        let first = Recursion::with_zeta_slot(fs.clone(), ZetaSlot::First);
        let last = Recursion::with_zeta_slot(fs, ZetaSlot::Last);
        for (g, n) in [(0, 3), (0, 4), (1, 2), (1, 3), (2, 1)] {
            let a = first.omega(g, n)?;
            rep.record(a.is_symmetric(), || format!("({g},{n}) not symmetric"));
            rep.record(*a == *last.omega(g, n)?, || format!("({g},{n}) depends on the distinguished variable"));
        }
    }
    let args = ["--no-cache", "--format", "json", "omega", "--g", "1", "--n", "2", "--method", "both"];
    let a = run_cli(&args, None);
    let b = run_cli(&args, None);
    let hash = |s: &str| serde_json::from_str::<serde_json::Value>(s).ok().and_then(|v| v["hash"].as_str().map(String::from));
    rep.record(hash(&a).is_some() && a == b && hash(&a) == hash(&b), || "CLI reruns differ".into());
    let dir = tempfile::tempdir().expect("tempdir");
    let cached = &args[1..];
    let cold = run_cli(cached, Some(dir.path()));
    let warm = run_cli(cached, Some(dir.path()));
    rep.record(!cold.is_empty() && cold == warm && cold == a, || "warm cache differs from cold cache".into());
    Ok(rep)
}

fn main() {
    let criteria: [(usize, fn() -> Res); 9] = [(1, c1), (2, c2), (3, c3), (4, c4), (5, c5), (6, c6), (7, c7), (8, c8), (9, c9)];
    let mut failed = 0;
    for (i, f) in criteria {
        let start = Instant::now();
        let (ok, line) = match f() {
            Ok(rep) => (rep.passed(), rep.to_string()),
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        println!("criterion {i}: {} [{secs:.1} s] {line}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
