use std::fmt;

use num_rational::BigRational;
use serde_json::{json, Value};

use super::{BaseNumber, Field, Poly};
use crate::error::{Error, Result};

type K = BaseNumber;

/// Element of K(sigma): either a constant or a reduced fraction with a monic
/// denominator.
#[derive(Clone, PartialEq)]
pub enum Scalar {
    Const(BaseNumber),
    Frac { num: Poly<K>, den: Poly<K> },
}

impl Scalar {
    pub fn sigma() -> Self {
        Scalar::Frac { num: Poly::monomial(K::one(), 1), den: Poly::one() }
    }

    /// a * sigma^k for any integer k.
    pub fn sigma_pow(a: K, k: i64) -> Self {
        if k >= 0 {
            Self::make(Poly::monomial(a, k as usize), Poly::one()).expect("nonzero den")
        } else {
            Self::make(Poly::constant(a), Poly::monomial(K::one(), (-k) as usize))
                .expect("nonzero den")
        }
    }

    pub fn from_polys(num: Poly<K>, den: Poly<K>) -> Result<Self> {
        Self::make(num, den)
    }

    fn make(mut num: Poly<K>, mut den: Poly<K>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Scalar::Const(K::zero()));
        }
        let vn = num.valuation().unwrap_or(0);
        let vd = den.valuation().unwrap_or(0);
        let s = vn.min(vd);
        if s > 0 {
            num = num.unshift(s);
            den = den.unshift(s);
        }
        if den.degree() > 0 && !den.is_monomial() {
            let g = num.gcd(&den)?;
            if g.degree() > 0 {
                num = num.div_exact(&g)?;
                den = den.div_exact(&g)?;
            }
        }
        let l = den.lead();
        if !l.is_one() {
            let li = l.inv()?;
            num = num.scale(&li);
            den = den.scale(&li);
        }
        if den.degree() == 0 && num.degree() <= 0 {
            return Ok(Scalar::Const(num.coeff(0)));
        }
        Ok(Scalar::Frac { num, den })
    }

    pub fn num(&self) -> Poly<K> {
        match self {
            Scalar::Const(c) => Poly::constant(c.clone()),
            Scalar::Frac { num, .. } => num.clone(),
        }
    }

    pub fn den(&self) -> Poly<K> {
        match self {
            Scalar::Const(_) => Poly::one(),
            Scalar::Frac { den, .. } => den.clone(),
        }
    }

    pub fn as_const(&self) -> Option<&K> {
        match self {
            Scalar::Const(c) => Some(c),
            _ => None,
        }
    }

    /// True when the denominator is a power of sigma.
    pub fn is_laurent(&self) -> bool {
        match self {
            Scalar::Const(_) => true,
            Scalar::Frac { den, .. } => den.is_monomial(),
        }
    }

    /// (exponent, coefficient) pairs for a Laurent polynomial in sigma.
    pub fn laurent_terms(&self) -> Result<Vec<(i64, K)>> {
        if !self.is_laurent() {
            return Err(Error::Convention("not a Laurent polynomial in sigma".into()));
        }
        let d = self.den().degree();
        Ok(self
            .num()
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as i64 - d, c.clone()))
            .collect())
    }

    pub fn eval(&self, s: &K) -> Result<K> {
        match self {
            Scalar::Const(c) => Ok(c.clone()),
            Scalar::Frac { num, den } => num.eval(s).checked_div(&den.eval(s)),
        }
    }

    /// d/dsigma
    pub fn derivative(&self) -> Self {
        match self {
            Scalar::Const(_) => Scalar::Const(K::zero()),
            Scalar::Frac { num, den } => {
                let n = num.derivative().mul(den).sub(&num.mul(&den.derivative()));
                Self::make(n, den.mul(den)).expect("nonzero den")
            }
        }
    }

    /// Antiderivative in sigma of a Laurent polynomial with no sigma^-1 term.
    pub fn integrate_sigma(&self) -> Result<Self> {
        let mut acc = Scalar::zero();
        for (e, c) in self.laurent_terms()? {
            if e == -1 {
                return Err(Error::Convention(
                    "sigma^-1 term has no Laurent antiderivative".into(),
                ));
            }
            let c = c.div_int(&(e + 1).into())?;
            acc = acc.fadd(&Self::sigma_pow(c, e + 1));
        }
        Ok(acc)
    }

    pub fn pow_i(&self, e: i64) -> Result<Self> {
        let p = self.fpow(e.unsigned_abs() as u32);
        if e < 0 {
            p.finv()
        } else {
            Ok(p)
        }
    }

    pub fn to_json(&self) -> Value {
        let enc = |p: &Poly<K>| Value::Array(p.coeffs().iter().map(|c| c.to_json()).collect());
        json!({ "num": enc(&self.num()), "den": enc(&self.den()) })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        if let Value::Object(m) = v {
            if m.contains_key("num") {
                let dec = |k: &str| -> Result<Poly<K>> {
                    match m.get(k) {
                        Some(Value::Array(a)) => {
                            Ok(Poly::new(a.iter().map(K::from_json).collect::<Result<_>>()?))
                        }
                        None if k == "den" => Ok(Poly::one()),
                        _ => Err(Error::InvalidInput(format!("scalar field '{k}' must be an array"))),
                    }
                };
                return Self::make(dec("num")?, dec("den")?);
            }
        }
        Ok(Scalar::Const(K::from_json(v)?))
    }
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::Const(K::zero())
    }
    fn one() -> Self {
        Scalar::Const(K::one())
    }
    fn is_zero(&self) -> bool {
        matches!(self, Scalar::Const(c) if c.is_zero())
    }
    fn fadd(&self, o: &Self) -> Self {
        match (self, o) {
            (Scalar::Const(a), Scalar::Const(b)) => Scalar::Const(a + b),
            _ if self.is_zero() => o.clone(),
            _ if o.is_zero() => self.clone(),
            _ => {
                let (an, ad, bn, bd) = (self.num(), self.den(), o.num(), o.den());
                if ad == bd {
                    Self::make(an.add(&bn), ad).expect("nonzero den")
                } else {
                    Self::make(an.mul(&bd).add(&bn.mul(&ad)), ad.mul(&bd)).expect("nonzero den")
                }
            }
        }
    }
    fn fsub(&self, o: &Self) -> Self {
        self.fadd(&o.fneg())
    }
    fn fmul(&self, o: &Self) -> Self {
        match (self, o) {
            (Scalar::Const(a), Scalar::Const(b)) => Scalar::Const(a * b),
            (Scalar::Const(a), Scalar::Frac { num, den })
            | (Scalar::Frac { num, den }, Scalar::Const(a)) => {
                if a.is_zero() {
                    Scalar::zero()
                } else {
                    Scalar::Frac { num: num.scale(a), den: den.clone() }
                }
            }
            _ => Self::make(self.num().mul(&o.num()), self.den().mul(&o.den()))
                .expect("nonzero den"),
        }
    }
    fn fneg(&self) -> Self {
        match self {
            Scalar::Const(a) => Scalar::Const(-a),
            Scalar::Frac { num, den } => Scalar::Frac { num: num.neg(), den: den.clone() },
        }
    }
    fn finv(&self) -> Result<Self> {
        match self {
            Scalar::Const(a) => Ok(Scalar::Const(a.inv()?)),
            Scalar::Frac { num, den } => Self::make(den.clone(), num.clone()),
        }
    }
    fn from_int(n: i64) -> Self {
        Scalar::Const(K::from_i64(n))
    }
    fn from_rational(r: &BigRational) -> Self {
        Scalar::Const(K::from_rat(r))
    }
    fn from_base(k: &K) -> Self {
        Scalar::Const(k.clone())
    }
    fn to_json(&self) -> Value {
        Scalar::to_json(self)
    }
}

impl From<K> for Scalar {
    fn from(v: K) -> Self {
        Scalar::Const(v)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Const(K::from_i64(v))
    }
}

fn fmt_poly(p: &Poly<K>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut first = true;
    for (k, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        match k {
            0 => write!(f, "({c})")?,
            1 => write!(f, "({c})σ")?,
            _ => write!(f, "({c})σ^{k}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Const(c) => write!(f, "{c}"),
            Scalar::Frac { num, den } => {
                write!(f, "[")?;
                fmt_poly(num, f)?;
                if den.degree() > 0 {
                    write!(f, "] / [")?;
                    fmt_poly(den, f)?;
                }
                write!(f, "]")
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
