//! The R-matrix by three routes: stationary phase on the curve, the flatness
//! ODE in sigma, and the closed form at non-equivariant points. Also the edge
//! and dilaton weights built from it.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::algebra::{double_factorial, factorial, BaseNumber as K, Field, Scalar, TruncSeries, Var};
use crate::error::{Error, Result};
use crate::forms::FormSystem;
use crate::givental::{bernoulli_exp, FrobeniusPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Curve,
    Ode,
    ClosedForm,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Curve => "curve",
            Route::Ode => "ode",
            Route::ClosedForm => "closed-form",
        }
    }
}

/// R(z) with `r[a][b] = R_a^b(z)`, series in z known below z^order.
#[derive(Clone, Debug)]
pub struct RMatrix<F> {
    pub route: Route,
    pub r: Vec<Vec<TruncSeries<F>>>,
}

impl<F: Field> RMatrix<F> {
    pub fn dim(&self) -> usize {
        self.r.len()
    }

    pub fn order(&self) -> i64 {
        self.r.iter().flatten().map(|s| s.order()).min().unwrap_or(0)
    }

    pub fn entry(&self, a: usize, b: usize) -> &TruncSeries<F> {
        &self.r[a][b]
    }

    /// R_k as a matrix of coefficients.
    pub fn coeff(&self, k: i64) -> Result<Vec<Vec<F>>> {
        self.r.iter().map(|row| row.iter().map(|s| s.coeff(k)).collect()).collect()
    }

    /// sum_g R_g^a(z) R_g^b(-z); the identity for a unitary R.
    pub fn unitarity_defect(&self) -> Vec<Vec<TruncSeries<F>>> {
        let n = self.dim();
        let order = self.order();
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let mut acc = TruncSeries::zero(Var::Z, order);
                        for g in 0..n {
                            acc = acc.add(&self.r[g][a].mul(&self.r[g][b].negate_var()));
                        }
                        if a == b {
                            acc = acc.sub(&TruncSeries::one(Var::Z, order));
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect()
            .iter()
            .flatten()
            .all(|s| (0..s.order()).all(|e| s.coeff_lenient(e).is_zero()))
    }

    pub fn truncate(&self, order: i64) -> Self {
        RMatrix {
            route: self.route,
            r: self.r.iter().map(|row| row.iter().map(|s| s.truncate(order)).collect()).collect(),
        }
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> Result<G>) -> Result<RMatrix<G>> {
        let r = self
            .r
            .iter()
            .map(|row| row.iter().map(|s| s.try_map(&f)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(RMatrix { route: self.route, r })
    }

    /// Entrywise equality of coefficients below z^order.
    pub fn agrees_with(&self, o: &Self, order: i64) -> bool {
        self.dim() == o.dim()
            && (0..self.dim()).all(|a| {
                (0..self.dim()).all(|b| (0..order).all(|k| self.r[a][b].coeff(k).ok() == o.r[a][b].coeff(k).ok()))
            })
    }

    pub fn to_json(&self) -> Value {
        let ks: Vec<Value> = (0..self.order())
            .map(|k| {
                let m: Vec<Value> = self
                    .r
                    .iter()
                    .map(|row| Value::Array(row.iter().map(|s| s.coeff_lenient(k).to_json()).collect()))
                    .collect();
                json!({"k": k, "matrix": m})
            })
            .collect();
        json!({"route": self.route.name(), "coefficients": ks})
    }
}

/// Stationary-phase route: R_b^a(z) = -sum_{m >= -1} a_{2m} (2m-1)!! (z/2)^(m+1)
/// with a the zeta-expansion of dxi_{b,0}/dzeta at the branch point a.
pub fn r_from_curve<F: Field>(forms: &FormSystem<F>, order: usize) -> Result<RMatrix<F>> {
    let n = forms.num_branch_points();
    let ord = order as i64;
    let need = 2 * order;
    let half = F::one().fdiv(&F::from_int(2))?;
    let mut r = vec![vec![TruncSeries::zero(Var::Z, ord); n]; n];
    for a in 0..n {
        for b in 0..n {
            let s = forms.local_e(a, b, 0, need)?;
            let mut c = vec![F::zero(); order];
            for m in -1..(ord - 1) {
                let am = s.coeff(2 * m)?;
                let df = F::from_rational(&double_factorial(2 * m - 1).into());
                c[(m + 1) as usize] = am.fmul(&df).fmul(&half.fpow((m + 1) as u32)).fneg();
            }
            r[b][a] = TruncSeries::new(Var::Z, 0, c, ord);
        }
    }
    Ok(RMatrix { route: Route::Curve, r })
}

type M2 = [[Scalar; 2]; 2];

fn m2_mul(a: &M2, b: &M2) -> M2 {
    let e = |i: usize, j: usize| a[i][0].fmul(&b[0][j]).fadd(&a[i][1].fmul(&b[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Evaluates a Laurent polynomial in sigma that is even, at sigma^2 = s2.
pub fn eval_even(s: &Scalar, s2: &K) -> Result<K> {
    let mut acc = K::zero();
    for (e, c) in s.laurent_terms()? {
        if e % 2 != 0 {
            return Err(Error::Convention(format!("odd power sigma^{e} in an even quantity")));
        }
        acc = acc + c * s2.pow_i(e / 2)?;
    }
    Ok(acc)
}

/// Flatness-ODE route over symbolic sigma with w1, w2 fixed. The q -> 0
/// Bernoulli limit fixes the odd diagonal constants.
pub fn r_from_ode(w1: &K, w2: &K, order: usize) -> Result<RMatrix<Scalar>> {
    let p = FrobeniusPoint::new(Scalar::from(w1.clone()), Scalar::from(w2.clone()), Scalar::sigma())?;
    let psi = p.psi()?;
    let pinv = p.psi_inv()?;
    let dpsi = psi.clone().map(|row| row.map(|s| s.derivative()));
    let a = m2_mul(&pinv, &dpsi);
    for al in 0..2 {
        if !a[al][al].is_zero() {
            return Err(Error::Convention("Psi^-1 dPsi has a diagonal part".into()));
        }
    }
    let gap = p.du[0].fsub(&p.du[1]);
    if gap.is_zero() {
        return Err(Error::Degenerate("coincident canonical coordinates".into()));
    }
    // q d/dq = (q / sigma^3) d/dsigma
    let qd = p.q().fdiv(&Scalar::sigma_pow(K::one(), 3))?;
    let chi = w1 - w2;
    let limits = if chi.is_zero() {
        None
    } else {
        let b0 = bernoulli_exp(&chi, order as i64)?;
        let b1 = bernoulli_exp(&-chi.clone(), order as i64)?;
        Some([b0, b1])
    };

    let zero = || [[Scalar::zero(), Scalar::zero()], [Scalar::zero(), Scalar::zero()]];
    let mut rs: Vec<M2> = vec![[[Scalar::one(), Scalar::zero()], [Scalar::zero(), Scalar::one()]]];
    for n in 1..order {
        let prev = &rs[n - 1];
        let dprev = prev.clone().map(|row| row.map(|s| s.derivative()));
        let ar = m2_mul(&a, prev);
        let mut next = zero();
        for al in 0..2 {
            let be = 1 - al;
            let lhs = qd.fmul(&dprev[al][be].fadd(&ar[al][be]));
            let du = if al == 0 { gap.clone() } else { gap.fneg() };
            next[al][be] = lhs.fdiv(&du)?;
        }
        for al in 0..2 {
            next[al][al] = if n % 2 == 0 {
                // 2 R_n[al][al] + sum_{0<k<n} (-1)^k sum_g R_k[g][al] R_{n-k}[g][al] = 0
                let mut acc = Scalar::zero();
                for k in 1..n {
                    let sign = if k % 2 == 0 { Scalar::one() } else { Scalar::from(-1) };
                    for g in 0..2 {
                        acc = acc.fadd(&sign.fmul(&rs[k][g][al]).fmul(&rs[n - k][g][al]));
                    }
                }
                acc.fneg().fdiv(&Scalar::from(2))?
            } else {
                let rhs = a[al][1 - al].fmul(&next[1 - al][al]).fneg();
                let prim = rhs.integrate_sigma()?;
                match &limits {
                    None => prim,
                    Some(b) => {
                        let want = b[al].coeff(n as i64)?;
                        let at0 = eval_even(&prim, &chi)?;
                        prim.fadd(&Scalar::from(want - at0))
                    }
                }
            };
        }
        rs.push(next);
    }
    let ord = order as i64;
    let r = (0..2)
        .map(|i| {
            (0..2)
                .map(|j| TruncSeries::new(Var::Z, 0, rs.iter().map(|m| m[i][j].clone()).collect(), ord))
                .collect()
        })
        .collect();
    Ok(RMatrix { route: Route::Ode, r })
}

/// r_from_ode evaluated at a concrete sigma.
pub fn r_from_ode_at(w1: &K, w2: &K, sigma: &K, order: usize) -> Result<RMatrix<K>> {
    let s2 = sigma * sigma;
    r_from_ode(w1, w2, order)?.map(|s| eval_even(s, &s2))
}

/// R_n at a non-equivariant point, q^(1/2) = sigma^2/2.
pub fn r_closed_noneq<F: Field>(sigma: &F, n: usize) -> Result<[[F; 2]; 2]> {
    if n == 0 {
        return Ok([[F::one(), F::zero()], [F::zero(), F::one()]]);
    }
    let ni = n as i64;
    let num = double_factorial(2 * ni - 1) * double_factorial(2 * ni - 3);
    let den = factorial(n as u64) * num_bigint::BigInt::from(2).pow(4 * n as u32);
    let c = F::from_rational(&num_rational::BigRational::new(num, den));
    let qh = F::from_int(2).fdiv(&sigma.fmul(sigma))?.fpow(n as u32);
    let c = c.fmul(&qh);
    let i = F::from_base(&K::i());
    let sgn = if n % 2 == 1 { F::one() } else { F::from_int(-1) };
    let two_n_i = F::from_int(2 * ni).fmul(&i);
    Ok([
        [c.fneg(), c.fmul(&two_n_i).fmul(&sgn)],
        [c.fmul(&two_n_i), c.fmul(&sgn)],
    ])
}

pub fn r_closed<F: Field>(sigma: &F, order: usize) -> Result<RMatrix<F>> {
    let ms = (0..order).map(|n| r_closed_noneq(sigma, n)).collect::<Result<Vec<_>>>()?;
    let ord = order as i64;
    let r = (0..2)
        .map(|i| {
            (0..2)
                .map(|j| TruncSeries::new(Var::Z, 0, ms.iter().map(|m| m[i][j].clone()).collect(), ord))
                .collect()
        })
        .collect();
    Ok(RMatrix { route: Route::ClosedForm, r })
}

/// Edge weights E^{ab}_{k,l} = [z^k w^l] (delta_ab - sum_g R_g^a(-z) R_g^b(-w)) / (z + w).
#[derive(Clone, Debug)]
pub struct EdgeWeight<F> {
    pub kmax: usize,
    pub e: BTreeMap<(usize, usize, usize, usize), F>,
}

impl<F: Field> EdgeWeight<F> {
    pub fn get(&self, a: usize, k: usize, b: usize, l: usize) -> F {
        self.e.get(&(a, b, k, l)).cloned().unwrap_or_else(F::zero)
    }
}

pub fn edge_weights<F: Field>(r: &RMatrix<F>, kmax: usize) -> Result<EdgeWeight<F>> {
    let need = 2 * kmax as i64 + 2;
    if r.order() < need {
        return Err(Error::Truncation { needed: need, order: r.order() });
    }
    let n = r.dim();
    let mut e = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            // numerator coefficients n_{ij}, i + j <= top + 1
            let num = |i: usize, j: usize| -> Result<F> {
                let mut acc = if a == b && i == 0 && j == 0 { F::one() } else { F::zero() };
                for g in 0..n {
                    let x = r.r[g][a].coeff(i as i64)?;
                    let y = r.r[g][b].coeff(j as i64)?;
                    let sgn = if (i + j) % 2 == 0 { F::one() } else { F::from_int(-1) };
                    acc = acc.fsub(&x.fmul(&y).fmul(&sgn));
                }
                Ok(acc)
            };
            if !num(0, 0)?.is_zero() {
                return Err(Error::Verification("edge numerator does not vanish at z = w = 0".into()));
            }
            let mut t: BTreeMap<(usize, usize), F> = BTreeMap::new();
            for s in 0..=2 * kmax {
                // n_{k+1,l} = e_{k,l} + e_{k+1,l-1}
                for l in 0..=s {
                    let k = s - l;
                    let mut v = num(k + 1, l)?;
                    if l > 0 {
                        v = v.fsub(&t[&(k + 1, l - 1)]);
                    }
                    t.insert((k, l), v);
                }
                // n_{0,s+1} = e_{0,s}
                if num(0, s + 1)? != t[&(0, s)] {
                    return Err(Error::Verification("edge numerator is not divisible by z + w".into()));
                }
            }
            for ((k, l), v) in t {
                if k <= kmax && l <= kmax {
                    e.insert((a, b, k, l), v);
                }
            }
        }
    }
    Ok(EdgeWeight { kmax, e })
}

/// Dilaton leaves (L^1)^b_k = [z^(k-1)] (-sum_a R_a^b(-z) / sqrt(Delta^a)), k = 1..=kmax.
pub fn dilaton_weights<F: Field>(r: &RMatrix<F>, sqrt_delta: &[F], kmax: usize) -> Result<Vec<Vec<F>>> {
    if r.order() < kmax as i64 {
        return Err(Error::Truncation { needed: kmax as i64, order: r.order() });
    }
    let n = r.dim();
    let inv = sqrt_delta.iter().map(|s| s.finv()).collect::<Result<Vec<_>>>()?;
    (0..n)
        .map(|b| {
            (0..=kmax)
                .map(|k| {
                    if k == 0 {
                        return Ok(F::zero());
                    }
                    let e = k as i64 - 1;
                    let sgn = if e % 2 == 0 { F::one() } else { F::from_int(-1) };
                    let mut acc = F::zero();
                    for a in 0..n {
                        acc = acc.fsub(&r.r[a][b].coeff(e)?.fmul(&inv[a]).fmul(&sgn));
                    }
                    Ok(acc)
                })
                .collect()
        })
        .collect()
}

/// B-side dilaton weight -(1/i^(2k-1)) 2 (2k-1)!! h^a_(2k-1) from the local frame.
pub fn dilaton_weights_curve<F: Field>(forms: &FormSystem<F>, kmax: usize) -> Result<Vec<Vec<F>>> {
    let i = F::from_base(&K::i());
    (0..forms.num_branch_points())
        .map(|a| {
            let fr = forms.frame(a, 2 * kmax + 2)?;
            (0..=kmax)
                .map(|k| {
                    if k == 0 {
                        return Ok(F::zero());
                    }
                    let df = F::from_rational(&double_factorial(2 * k as i64 - 1).into());
                    let h = fr.h[2 * k - 1].clone();
                    Ok(h.fmul(&df).fmul(&F::from_int(2)).fdiv(&i.fpow(2 * k as u32 - 1))?.fneg())
                })
                .collect()
        })
        .collect()
}
