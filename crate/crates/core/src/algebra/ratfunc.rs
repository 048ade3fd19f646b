use std::fmt;

use super::{Field, Poly, TruncSeries, Var};
use crate::error::{Error, Result};

/// Reduced quotient of polynomials with a monic denominator.
#[derive(Clone, PartialEq)]
pub struct RatFunc<F> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: Field> RatFunc<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let (mut num, mut den) = (num, den);
        if den.degree() > 0 {
            let g = num.gcd(&den)?;
            if g.degree() > 0 {
                num = num.div_exact(&g)?;
                den = den.div_exact(&g)?;
            }
        }
        let l = den.lead().finv()?;
        Ok(RatFunc { num: num.scale(&l), den: den.scale(&l) })
    }

    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(a: F) -> Self {
        Self::from_poly(Poly::constant(a))
    }

    /// c / (X - a)^k
    pub fn pole(c: F, a: &F, k: u32) -> Self {
        Self::new(Poly::constant(c), Poly::linear_root(a).pow(k)).expect("nonzero den")
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone()).expect("nonzero den");
        }
        Self::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
        .expect("nonzero den")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, a: &F) -> Self {
        if a.is_zero() {
            return Self::zero();
        }
        RatFunc { num: self.num.scale(a), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero den")
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn derivative(&self) -> Self {
        let n = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        Self::new(n, self.den.mul(&self.den)).expect("nonzero den")
    }

    pub fn eval(&self, x: &F) -> Result<F> {
        self.num.eval(x).fdiv(&self.den.eval(x))
    }

    /// Laurent expansion in u = X - a, known below exponent `order`.
    pub fn expand_at(&self, a: &F, var: Var, order: i64) -> Result<TruncSeries<F>> {
        let n = self.num.compose_linear(&F::one(), a);
        let d = self.den.compose_linear(&F::one(), a);
        let v = d.valuation().ok_or(Error::DivisionByZero)?;
        let o = order + v as i64;
        let ns = TruncSeries::from_poly(var, &n, o);
        let ds = TruncSeries::from_poly(var, &d.unshift(v), o);
        Ok(ns.mul(&ds.inv()?).shift(-(v as i64)))
    }

    /// Expansion in t = 1/X, known below exponent `order` in t.
    pub fn expand_at_infinity(&self, var: Var, order: i64) -> Result<TruncSeries<F>> {
        let rev = |p: &Poly<F>| -> Poly<F> {
            let mut c = p.coeffs().to_vec();
            c.reverse();
            Poly::new(c)
        };
        let shift = self.den.degree() - self.num.degree();
        let r = RatFunc::new(rev(&self.num), rev(&self.den))?;
        Ok(r.expand_at(&F::zero(), var, order - shift)?.shift(shift))
    }

    /// Order of the pole at X = a (negative for a zero).
    pub fn pole_order_at(&self, a: &F) -> i64 {
        let mult = |p: &Poly<F>| -> i64 {
            let mut p = p.clone();
            let lin = Poly::linear_root(a);
            let mut k = 0;
            while !p.is_zero() {
                match p.divrem(&lin) {
                    Ok((q, r)) if r.is_zero() => {
                        p = q;
                        k += 1;
                    }
                    _ => break,
                }
            }
            k
        };
        mult(&self.den) - mult(&self.num)
    }
}

impl<F: Field + fmt::Display> fmt::Display for RatFunc<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &Poly<F>, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            let terms: Vec<String> = p
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| format!("({c})X^{k}"))
                .collect();
            if terms.is_empty() {
                write!(f, "0")
            } else {
                write!(f, "{}", terms.join(" + "))
            }
        };
        write!(f, "[")?;
        show(&self.num, f)?;
        write!(f, "] / [")?;
        show(&self.den, f)?;
        write!(f, "]")
    }
}

impl<F: Field> fmt::Debug for RatFunc<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({:?} / {:?})", self.num, self.den)
    }
}
