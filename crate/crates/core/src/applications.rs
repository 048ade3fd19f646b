//! Enumerative numbers read off from omega_{g,n}: stationary invariants of P^1
//! at non-equivariant points and simple Hurwitz numbers on the Lambert curve.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{factorial, Field, Poly, TruncSeries, Var};
use crate::curve::CurveKind;
use crate::error::{Error, Result};
use crate::forms::{FormSystem, PoleTensor, Slot};

fn sign_n(n: usize) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// -(1/(a+1)!) Res_{Y=0} x^(a+1) dxi_slot, the coefficient of (a+1)!/x^(a+2) dx.
pub fn x_moments<F: Field>(forms: &FormSystem<F>, slot: Slot, amax: usize) -> Result<Vec<F>> {
    if forms.curve.kind != CurveKind::P1 || !forms.curve.is_non_equivariant() {
        return Err(Error::InvalidInput("stationary extraction needs w1 = w2 = 0".into()));
    }
    let f = forms.dxi(slot.0, slot.1)?;
    let fs = f.expand_at(&F::zero(), Var::Y, amax as i64 + 1)?;
    let q = forms.curve.params.q.clone();
    let base = Poly::new(vec![q, F::zero(), F::one()]);
    (0..=amax)
        .map(|a| {
            // x^(a+1) = Y^(-a-1) (Y^2 + q)^(a+1)
            let p = base.pow(a as u32 + 1);
            let mut res = F::zero();
            for j in 0..=a {
                res = res.fadd(&p.coeff(j).fmul(&fs.coeff((a - j) as i64)?));
            }
            let fct = F::from_rational(&BigRational::from_integer(factorial(a as u64 + 1)));
            Ok(res.fdiv(&fct)?.fneg())
        })
        .collect()
}

/// One stationary entry: the q-dependent bracket, its q-exponent, and the
/// number with the q-power removed.
#[derive(Clone, Debug, PartialEq)]
pub struct GwEntry<F> {
    pub full: F,
    pub q_power: Option<i64>,
    pub value: F,
}

fn tuples(n: usize, base: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..base).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// q-exponent (sum a)/2 + 1 - g when it is a nonnegative integer.
pub fn stationary_q_power(g: usize, a: &[usize]) -> Option<i64> {
    let s: usize = a.iter().sum();
    if s % 2 != 0 {
        return None;
    }
    let d = (s / 2) as i64 + 1 - g as i64;
    (d >= 0).then_some(d)
}

/// Stationary table {a_1 <= ... <= a_n} -> entry, from omega at a non-equivariant point.
/// The bracket is sum over terms of coeff * prod x_moments.
pub fn norbury_scott_extract<F: Field>(
    forms: &FormSystem<F>,
    omega: &PoleTensor<F>,
    amax: usize,
) -> Result<BTreeMap<Vec<usize>, GwEntry<F>>> {
    let (g, n) = (omega.g, omega.n);
    let mut moments: BTreeMap<Slot, Vec<F>> = BTreeMap::new();
    for (slots, _) in omega.terms() {
        for s in slots {
            if !moments.contains_key(s) {
                moments.insert(*s, x_moments(forms, *s, amax)?);
            }
        }
    }
    let q = forms.curve.params.q.clone();
    let mut out = BTreeMap::new();
    for a in tuples(n, amax + 1) {
        if a.windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        let mut full = F::zero();
        for (slots, c) in omega.terms() {
            let mut t = c.clone();
            for (s, &aj) in slots.iter().zip(&a) {
                t = t.fmul(&moments[s][aj]);
            }
            full = full.fadd(&t);
        }
        let q_power = stationary_q_power(g, &a);
        let value = match q_power {
            Some(d) => full.fdiv(&q.fpow(d as u32))?,
            None if full.is_zero() => F::zero(),
            None => return Err(Error::Verification(format!("nonzero entry {a:?} with no valid q-power"))),
        };
        out.insert(a, GwEntry { full, q_power, value });
    }
    Ok(out)
}

/// Res_{Y=0} Z^(-mu) dxi_slot / mu with Z = Y e^(Y/w1): the Z^mu coefficient of the primitive.
pub fn z_moment<F: Field>(forms: &FormSystem<F>, slot: Slot, mu: usize) -> Result<F> {
    if forms.curve.kind != CurveKind::LogLine {
        return Err(Error::InvalidInput("Hurwitz extraction needs the curve x = Y + w1 log Y".into()));
    }
    if mu == 0 {
        return Err(Error::InvalidInput("parts must be positive".into()));
    }
    let w1 = forms.curve.params.w1.clone();
    let f = forms.dxi(slot.0, slot.1)?;
    let fs = f.expand_at(&F::zero(), Var::Y, mu as i64)?;
    let ex = TruncSeries::monomial(Var::Y, F::from_int(-(mu as i64)).fdiv(&w1)?, 1, mu as i64).exp()?;
    let mut res = F::zero();
    for j in 0..mu {
        res = res.fadd(&ex.coeff(j as i64)?.fmul(&fs.coeff((mu - 1 - j) as i64)?));
    }
    res.fdiv(&F::from_int(mu as i64))
}

fn aut_order(mu: &[usize]) -> BigInt {
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for &m in mu {
        *counts.entry(m).or_default() += 1;
    }
    counts.values().map(|&c| factorial(c)).product()
}

/// H_{g,mu} read off omega on the curve x = Y + w1 log Y, for every ordered
/// mu with parts in 1..=mumax; keys are sorted partitions.
pub fn hurwitz_extract<F: Field>(
    forms: &FormSystem<F>,
    omega: &PoleTensor<F>,
    mumax: usize,
) -> Result<BTreeMap<Vec<usize>, F>> {
    let (g, n) = (omega.g, omega.n);
    let w1 = forms.curve.params.w1.clone();
    let mut moments: BTreeMap<(Slot, usize), F> = BTreeMap::new();
    for (slots, _) in omega.terms() {
        for s in slots {
            for mu in 1..=mumax {
                if !moments.contains_key(&(*s, mu)) {
                    moments.insert((*s, mu), z_moment(forms, *s, mu)?);
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for t in tuples(n, mumax) {
        let mu: Vec<usize> = t.iter().map(|x| x + 1).collect();
        let mut sorted = mu.clone();
        sorted.sort();
        let mut p = F::zero();
        for (slots, c) in omega.terms() {
            let mut x = c.clone();
            for (s, &m) in slots.iter().zip(&mu) {
                x = x.fmul(&moments[&(*s, m)]);
            }
            p = p.fadd(&x);
        }
        // coefficient = (-1)^n |Aut mu| H / (b! (-w1)^b), b = 2g - 2 + n + |mu|
        let b = (2 * g + n + mu.iter().sum::<usize>()) as i64 - 2;
        if b < 0 {
            continue;
        }
        let aut = F::from_rational(&BigRational::from_integer(aut_order(&mu)));
        let bf = F::from_rational(&BigRational::from_integer(factorial(b as u64)));
        let h = p
            .fmul(&F::from_int(sign_n(n)))
            .fmul(&bf)
            .fmul(&w1.fneg().fpow(b as u32))
            .fdiv(&aut)?;
        match out.get(&sorted) {
            None => {
                out.insert(sorted, h);
            }
            Some(prev) if *prev == h => {}
            Some(_) => return Err(Error::Verification(format!("extraction not symmetric at {mu:?}"))),
        }
    }
    Ok(out)
}

/// Connected simple Hurwitz number by enumeration: tuples of b transpositions
/// in S_d whose product is a fixed permutation of type mu and which act
/// transitively, divided by z_mu.
pub fn hurwitz_bruteforce(g: usize, mu: &[usize]) -> Result<BigRational> {
    let d: usize = mu.iter().sum();
    if mu.is_empty() || mu.contains(&0) {
        return Err(Error::InvalidInput("mu must be a nonempty list of positive parts".into()));
    }
    if d > 6 {
        return Err(Error::InvalidInput("brute-force Hurwitz numbers are limited to |mu| <= 6".into()));
    }
    let b = 2 * g as i64 - 2 + mu.len() as i64 + d as i64;
    if b < 0 {
        return Ok(BigRational::zero());
    }
    // target permutation: consecutive cycles
    let mut target = vec![0u8; d];
    let mut start = 0;
    for &m in mu {
        for i in 0..m {
            target[start + i] = (start + (i + 1) % m) as u8;
        }
        start += m;
    }
    let transpositions: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let id: Vec<u8> = (0..d as u8).collect();
    let mut states: HashMap<(Vec<u8>, Vec<u8>), BigInt> = HashMap::new();
    states.insert((id.clone(), id), BigInt::one());
    for _ in 0..b {
        let mut next: HashMap<(Vec<u8>, Vec<u8>), BigInt> = HashMap::new();
        for ((perm, blocks), c) in &states {
            for &(i, j) in &transpositions {
                let mut p = perm.clone();
                p.swap(i, j);
                let (bi, bj) = (blocks[i], blocks[j]);
                let (lo, hi) = (bi.min(bj), bi.max(bj));
                let bl: Vec<u8> = blocks.iter().map(|&x| if x == hi { lo } else { x }).collect();
                *next.entry((p, bl)).or_insert_with(BigInt::zero) += c;
            }
        }
        states = next;
    }
    let count: BigInt = states
        .iter()
        .filter(|((p, bl), _)| *p == target && bl.iter().all(|&x| x == 0))
        .map(|(_, c)| c.clone())
        .sum();
    let mut z = BigInt::one();
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for &m in mu {
        *counts.entry(m).or_default() += 1;
    }
    for (&m, &c) in &counts {
        z *= BigInt::from(m).pow(c as u32) * factorial(c);
    }
    Ok(BigRational::new(count, z))
}

/// Solves the ELSV relation for the Hodge integrals int lambda_k prod psi^a_j
/// (a a sorted multiset, k <= g) from Hurwitz numbers at the sample partitions.
pub fn elsv_invert(
    g: usize,
    n: usize,
    samples: &[(Vec<usize>, BigRational)],
) -> Result<BTreeMap<(Vec<usize>, usize), BigRational>> {
    let dim = 3 * g + n;
    if dim < 3 {
        return Err(Error::Unstable { g, n });
    }
    let dim = dim - 3;
    let mut unknowns: Vec<(Vec<usize>, usize)> = Vec::new();
    for k in 0..=g.min(dim) {
        for a in tuples(n, dim - k + 1) {
            if a.iter().sum::<usize>() == dim - k && a.windows(2).all(|w| w[0] <= w[1]) {
                unknowns.push((a, k));
            }
        }
    }
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for (mu, h) in samples {
        if mu.len() != n {
            return Err(Error::InvalidInput("sample length differs from n".into()));
        }
        let b = 2 * g + n + mu.iter().sum::<usize>() - 2;
        // H |Aut| / b! prod mu!/mu^mu
        let mut lhs = h * BigRational::new(aut_order(mu), factorial(b as u64));
        for &m in mu {
            lhs *= BigRational::new(factorial(m as u64), BigInt::from(m).pow(m as u32));
        }
        let mut row: Vec<BigRational> = unknowns
            .iter()
            .map(|(a, k)| {
                let mut s = BigRational::zero();
                let mut seen = std::collections::BTreeSet::new();
                for perm in permutations_of(a) {
                    if seen.insert(perm.clone()) {
                        let mut t = BigRational::one();
                        for (&m, &e) in mu.iter().zip(&perm) {
                            t *= BigRational::from_integer(BigInt::from(m).pow(e as u32));
                        }
                        s += t;
                    }
                }
                if k % 2 == 1 {
                    -s
                } else {
                    s
                }
            })
            .collect();
        row.push(lhs);
        rows.push(row);
    }
    let m = unknowns.len();
    // Gaussian elimination
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..m {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if pivots.len() < m {
        return Err(Error::Degenerate("ELSV system is singular for the given samples".into()));
    }
    if rows[r..].iter().any(|row| !row[m].is_zero()) {
        return Err(Error::Verification("inconsistent Hurwitz samples".into()));
    }
    Ok(unknowns.into_iter().enumerate().map(|(i, u)| (u, rows[i][m].clone())).collect())
}

fn permutations_of(a: &[usize]) -> Vec<Vec<usize>> {
    if a.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..a.len() {
        let mut rest = a.to_vec();
        let x = rest.remove(i);
        for mut p in permutations_of(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}
