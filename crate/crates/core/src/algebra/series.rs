use serde::{Deserialize, Serialize};

use super::{Field, Poly};
use crate::error::{Error, Result};

/// Tag naming the expansion variable of a series.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub enum Var {
    Z,
    W,
    Zeta,
    U,
    Y,
    T,
    Q,
    X,
    Sigma,
}

/// Order used for exact (untruncated) series.
pub const EXACT: i64 = 1 << 40;
const MAX_DENSE: i64 = 1 << 20;

/// Laurent series with coefficients known exactly for exponents below
/// `order`. Stored coefficients start at exponent `val`; exponents past the
/// stored ones and below `order` are zero.
#[derive(Clone, PartialEq, Debug)]
pub struct TruncSeries<F> {
    var: Var,
    val: i64,
    c: Vec<F>,
    order: i64,
}

impl<F: Field> TruncSeries<F> {
    pub fn new(var: Var, val: i64, mut c: Vec<F>, order: i64) -> Self {
        let order = order.min(EXACT);
        let len = (order - val).max(0) as usize;
        c.truncate(len);
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        TruncSeries { var, val: val.min(order), c, order }
    }

    pub fn from_poly(var: Var, p: &Poly<F>, order: i64) -> Self {
        Self::new(var, 0, p.coeffs().to_vec(), order)
    }

    pub fn zero(var: Var, order: i64) -> Self {
        Self::new(var, 0.min(order), vec![], order)
    }

    pub fn constant(var: Var, a: F, order: i64) -> Self {
        Self::new(var, 0, vec![a], order)
    }

    pub fn one(var: Var, order: i64) -> Self {
        Self::constant(var, F::one(), order)
    }

    /// a * var^e
    pub fn monomial(var: Var, a: F, e: i64, order: i64) -> Self {
        Self::new(var, e, vec![a], order)
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order >= EXACT
    }

    /// Exponent of the first nonzero known coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.c.iter().position(|x| !x.is_zero()).map(|k| self.val + k as i64)
    }

    /// One past the highest stored exponent.
    fn end(&self) -> i64 {
        self.val + self.c.len() as i64
    }

    pub fn coeff(&self, e: i64) -> Result<F> {
        if e >= self.order {
            return Err(Error::Truncation { needed: e, order: self.order });
        }
        Ok(self.raw(e))
    }

    fn raw(&self, e: i64) -> F {
        if e < self.val || e >= self.end() {
            return F::zero();
        }
        self.c[(e - self.val) as usize].clone()
    }

    /// Coefficient, or zero past the truncation order.
    pub fn coeff_lenient(&self, e: i64) -> F {
        self.raw(e)
    }

    /// Nonzero known terms as (exponent, coefficient).
    pub fn terms(&self) -> Vec<(i64, F)> {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| (self.val + k as i64, x.clone()))
            .collect()
    }

    pub fn residue(&self) -> Result<F> {
        self.coeff(-1)
    }

    pub fn normalized(&self) -> Self {
        match self.valuation() {
            Some(v) => TruncSeries {
                var: self.var,
                val: v,
                c: self.c[(v - self.val) as usize..].to_vec(),
                order: self.order,
            },
            None => Self::zero(self.var, self.order),
        }
    }

    pub fn truncate(&self, order: i64) -> Self {
        if order >= self.order {
            return self.clone();
        }
        Self::new(self.var, self.val, self.c.clone(), order)
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    fn combine(&self, o: &Self, sub: bool) -> Self {
        debug_assert_eq!(self.var, o.var);
        let order = self.order.min(o.order);
        let val = self.val.min(o.val).min(order);
        let end = self.end().max(o.end()).min(order);
        let c = (val..end)
            .map(|e| {
                let (a, b) = (self.raw(e), o.raw(e));
                if sub {
                    a.fsub(&b)
                } else {
                    a.fadd(&b)
                }
            })
            .collect();
        Self::new(self.var, val, c, order)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, false)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, true)
    }

    pub fn neg(&self) -> Self {
        TruncSeries {
            var: self.var,
            val: self.val,
            c: self.c.iter().map(|x| x.fneg()).collect(),
            order: self.order,
        }
    }

    pub fn scale(&self, a: &F) -> Self {
        Self::new(self.var, self.val, self.c.iter().map(|x| x.fmul(a)).collect(), self.order)
    }

    /// Multiplies by var^k.
    pub fn shift(&self, k: i64) -> Self {
        TruncSeries {
            var: self.var,
            val: self.val + k,
            c: self.c.clone(),
            order: (self.order + k).min(EXACT),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.var, o.var);
        let a = self.normalized();
        let b = o.normalized();
        let va = a.valuation().unwrap_or(a.order);
        let vb = b.valuation().unwrap_or(b.order);
        let order = (a.order + vb).min(b.order + va).min(EXACT);
        let val = (va + vb).min(order);
        let len = ((order - val).max(0) as usize).min((a.c.len() + b.c.len()).saturating_sub(1));
        let mut c = vec![F::zero(); len];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() || i >= len {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                let k = i + j;
                if k >= len {
                    break;
                }
                if !y.is_zero() {
                    c[k] = c[k].fadd(&x.fmul(y));
                }
            }
        }
        Self::new(self.var, val, c, order)
    }

    fn dense_len(&self) -> Result<usize> {
        let n = self.order - self.val;
        if n > MAX_DENSE {
            return Err(Error::Valuation("operation needs a finite truncation order".into()));
        }
        Ok(n.max(0) as usize)
    }

    pub fn inv(&self) -> Result<Self> {
        let a = self.normalized();
        let v = a.valuation().ok_or_else(|| {
            Error::Valuation("inverse of a series with no known nonzero term".into())
        })?;
        let n = a.dense_len()?;
        let a0i = a.c[0].finv()?;
        let mut b: Vec<F> = Vec::with_capacity(n);
        b.push(a0i.clone());
        for k in 1..n {
            let mut s = F::zero();
            for j in 1..=k.min(a.c.len() - 1) {
                if !a.c[j].is_zero() {
                    s = s.fadd(&a.c[j].fmul(&b[k - j]));
                }
            }
            b.push(s.fmul(&a0i).fneg());
        }
        Ok(Self::new(self.var, -v, b, a.order - 2 * v))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Self::one(self.var, EXACT));
        }
        let mut sq = if e < 0 { self.inv()? } else { self.clone() };
        let mut m = e.unsigned_abs();
        let mut acc: Option<Self> = None;
        loop {
            if m & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            m >>= 1;
            if m == 0 {
                break;
            }
            sq = sq.mul(&sq);
        }
        Ok(acc.expect("nonzero exponent"))
    }

    /// d/dvar
    pub fn derivative(&self) -> Self {
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(k, x)| x.fmul(&F::from_int(self.val + k as i64)))
            .collect();
        Self::new(self.var, self.val - 1, c, self.order - 1)
    }

    /// Antiderivative with zero constant term; fails on a var^-1 term.
    pub fn integrate(&self) -> Result<Self> {
        let mut c = Vec::with_capacity(self.c.len());
        for (k, x) in self.c.iter().enumerate() {
            let e = self.val + k as i64;
            if e == -1 {
                if !x.is_zero() {
                    return Err(Error::Valuation("integral of a series with a residue".into()));
                }
                c.push(F::zero());
            } else {
                c.push(x.fdiv(&F::from_int(e + 1))?);
            }
        }
        Ok(Self::new(self.var, self.val + 1, c, self.order + 1))
    }

    /// self(t) for t of positive valuation; the result is in t's variable.
    pub fn compose(&self, t: &Self) -> Result<Self> {
        let t = t.normalized();
        let vt = t.valuation().unwrap_or(t.order);
        if vt < 1 {
            return Err(Error::Valuation("inner series must have positive valuation".into()));
        }
        let s = self.normalized();
        let vs = s.valuation().unwrap_or(s.order);
        let stored = s.c.len() as i64;
        let missing = (s.order - vs - stored).max(0);
        let init = missing.saturating_mul(vt).min(EXACT);
        let mut acc = Self::zero(t.var, init);
        for k in (0..stored).rev() {
            acc = acc.mul(&t);
            acc = acc.add(&Self::constant(t.var, s.raw(vs + k), EXACT));
        }
        if vs != 0 {
            acc = acc.mul(&t.pow(vs)?);
        }
        Ok(acc)
    }

    /// Compositional inverse of a series of valuation exactly 1.
    pub fn reversion(&self) -> Result<Self> {
        let s = self.normalized();
        if s.valuation() != Some(1) {
            return Err(Error::Valuation("reversion needs valuation exactly 1".into()));
        }
        let n = s.order;
        s.dense_len()?;
        let phi = s.shift(-1).inv()?;
        let mut c = vec![F::zero(); (n - 1).max(0) as usize];
        let mut pw = TruncSeries::one(self.var, phi.order);
        for k in 1..n {
            pw = pw.mul(&phi);
            let a = pw.coeff(k - 1)?;
            c[(k - 1) as usize] = a.fdiv(&F::from_int(k))?;
        }
        Ok(Self::new(self.var, 1, c, n))
    }

    /// exp of a series with positive valuation.
    pub fn exp(&self) -> Result<Self> {
        if self.valuation().is_some_and(|v| v < 1) {
            return Err(Error::Valuation("exp needs positive valuation".into()));
        }
        self.dense_len()?;
        let n = self.order.max(0) as usize;
        let f: Vec<F> = (0..n as i64).map(|e| self.coeff_lenient(e)).collect();
        let mut e = vec![F::one()];
        for m in 1..n {
            let mut s = F::zero();
            for k in 1..=m {
                if !f[k].is_zero() {
                    s = s.fadd(&f[k].fmul(&e[m - k]).fmul(&F::from_int(k as i64)));
                }
            }
            e.push(s.fdiv(&F::from_int(m as i64))?);
        }
        Ok(TruncSeries::new(self.var, 0, e, n as i64))
    }

    /// log of a series with constant term 1.
    pub fn log(&self) -> Result<Self> {
        if self.valuation().is_some_and(|v| v < 0) || !self.coeff(0)?.is_one() {
            return Err(Error::Valuation("log needs constant term 1".into()));
        }
        self.dense_len()?;
        let n = self.order as usize;
        let g: Vec<F> = (0..n as i64).map(|e| self.coeff_lenient(e)).collect();
        let mut l = vec![F::zero(); n];
        for m in 1..n {
            let mut s = g[m].fmul(&F::from_int(m as i64));
            for k in 1..m {
                if !g[m - k].is_zero() {
                    s = s.fsub(&l[k].fmul(&F::from_int(k as i64)).fmul(&g[m - k]));
                }
            }
            l[m] = s.fdiv(&F::from_int(m as i64))?;
        }
        Ok(TruncSeries::new(self.var, 0, l, n as i64))
    }

    /// log(1 + self) for a series of positive valuation.
    pub fn log1p(&self) -> Result<Self> {
        self.add(&Self::one(self.var, EXACT)).log()
    }

    /// Square root whose leading coefficient is `root0`.
    pub fn sqrt_with(&self, root0: &F) -> Result<Self> {
        let a = self.normalized();
        let v = a.valuation().ok_or_else(|| Error::Valuation("sqrt of unknown series".into()))?;
        if v % 2 != 0 {
            return Err(Error::Valuation("sqrt of odd valuation".into()));
        }
        if root0.fmul(root0) != a.c[0] {
            return Err(Error::Convention("given root does not square to leading term".into()));
        }
        let two_b0_inv = root0.fadd(root0).finv()?;
        let n = a.dense_len()?;
        let mut b = vec![root0.clone()];
        for k in 1..n {
            let mut s = a.raw(v + k as i64);
            for j in 1..k {
                s = s.fsub(&b[j].fmul(&b[k - j]));
            }
            b.push(s.fmul(&two_b0_inv));
        }
        Ok(Self::new(self.var, v / 2, b, a.order - v / 2))
    }

    /// self(-var)
    pub fn negate_var(&self) -> Self {
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(k, x)| if (self.val + k as i64) % 2 != 0 { x.fneg() } else { x.clone() })
            .collect();
        TruncSeries { var: self.var, val: self.val, c, order: self.order }
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> TruncSeries<G> {
        TruncSeries { var: self.var, val: self.val, c: self.c.iter().map(f).collect(), order: self.order }
    }

    pub fn try_map<G: Field>(&self, f: impl Fn(&F) -> Result<G>) -> Result<TruncSeries<G>> {
        Ok(TruncSeries {
            var: self.var,
            val: self.val,
            c: self.c.iter().map(f).collect::<Result<_>>()?,
            order: self.order,
        })
    }
}
