//! psi-class intersection numbers on the moduli of stable curves.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use parking_lot::RwLock;

use crate::algebra::double_factorial;
use crate::error::{Error, Result};

type Memo = RwLock<HashMap<(usize, Vec<usize>), BigRational>>;

fn memo() -> &'static Memo {
    static M: OnceLock<Memo> = OnceLock::new();
    M.get_or_init(|| RwLock::new(HashMap::new()))
}

fn stable(g: usize, n: usize) -> bool {
    2 * g + n > 2
}

/// <tau_{k_1} ... tau_{k_n}>_g. Unstable keys are an error.
pub fn tau(g: usize, ks: &[usize]) -> Result<BigRational> {
    if !stable(g, ks.len()) {
        return Err(Error::Unstable { g, n: ks.len() });
    }
    Ok(tau_inner(g, ks))
}

/// Like `tau` but returns 0 for unstable keys.
pub fn tau_or_zero(g: usize, ks: &[usize]) -> BigRational {
    if stable(g, ks.len()) {
        tau_inner(g, ks)
    } else {
        BigRational::zero()
    }
}

fn tau_inner(g: usize, ks: &[usize]) -> BigRational {
    let n = ks.len();
    if ks.iter().sum::<usize>() + 3 != 3 * g + n {
        return BigRational::zero();
    }
    let mut key = ks.to_vec();
    key.sort_unstable_by(|a, b| b.cmp(a));
    if let Some(v) = memo().read().get(&(g, key.clone())) {
        return v.clone();
    }
    let v = compute(g, &key);
    memo().write().insert((g, key), v.clone());
    v
}

fn df(n: i64) -> BigRational {
    BigRational::from_integer(double_factorial(n))
}

fn compute(g: usize, key: &[usize]) -> BigRational {
    let n = key.len();
    if g == 0 && n == 3 {
        return BigRational::one();
    }
    if g == 1 && n == 1 {
        return BigRational::new(BigInt::one(), BigInt::from(24));
    }
    // key is sorted descending; a trailing zero allows the string equation
    if key[n - 1] == 0 {
        let rest = &key[..n - 1];
        let mut s = BigRational::zero();
        for j in 0..rest.len() {
            if rest[j] > 0 {
                let mut r = rest.to_vec();
                r[j] -= 1;
                s += tau_or_zero(g, &r);
            }
        }
        return s;
    }
    let k = key[0] as i64 - 1;
    let rest = &key[1..];
    let mut s = BigRational::zero();
    for j in 0..rest.len() {
        let dj = rest[j] as i64;
        let mut r = rest.to_vec();
        r[j] = (dj + k) as usize;
        s += df(2 * k + 2 * dj + 1) / df(2 * dj - 1) * tau_or_zero(g, &r);
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for a in 0..k {
        let b = k - 1 - a;
        let w = df(2 * a + 1) * df(2 * b + 1) * &half;
        if g >= 1 {
            let mut r = vec![a as usize, b as usize];
            r.extend_from_slice(rest);
            s += &w * tau_or_zero(g - 1, &r);
        }
        let m = rest.len();
        for mask in 0u32..(1 << m) {
            let (mut i_part, mut j_part) = (vec![a as usize], vec![b as usize]);
            for (t, &x) in rest.iter().enumerate() {
                if mask & (1 << t) != 0 {
                    i_part.push(x);
                } else {
                    j_part.push(x);
                }
            }
            for g1 in 0..=g {
                let l = tau_or_zero(g1, &i_part);
                if l.is_zero() {
                    continue;
                }
                s += &w * l * tau_or_zero(g - g1, &j_part);
            }
        }
    }
    s / df(2 * k + 3)
}
