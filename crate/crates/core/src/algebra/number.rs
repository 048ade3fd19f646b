use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::Field;
use crate::error::{Error, Result};

/// Element a + b i + c sqrt2 + d i sqrt2 of K = Q(i, sqrt 2).
///
/// Stored as four integer numerators over one positive common denominator,
/// kept in lowest terms so that derived equality and hashing are exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BaseNumber {
    n: [BigInt; 4],
    d: BigInt,
}

impl BaseNumber {
    fn from_parts(n: [BigInt; 4], d: BigInt) -> Self {
        let mut x = BaseNumber { n, d };
        x.reduce();
        x
    }

    fn reduce(&mut self) {
        if self.d.is_negative() {
            self.d = -&self.d;
            for c in self.n.iter_mut() {
                *c = -&*c;
            }
        }
        if self.n.iter().all(|c| c.is_zero()) {
            self.d = BigInt::one();
            return;
        }
        if self.d.is_one() {
            return;
        }
        let mut g = self.d.clone();
        for c in &self.n {
            if !c.is_zero() {
                g = g.gcd(c);
                if g.is_one() {
                    return;
                }
            }
        }
        if !g.is_one() {
            for c in self.n.iter_mut() {
                *c = &*c / &g;
            }
            self.d = &self.d / &g;
        }
    }

    /// Builds a + b i + c sqrt2 + d i sqrt2 from rational components.
    pub fn new(re: BigRational, im: BigRational, rt2: BigRational, irt2: BigRational) -> Self {
        let parts = [re, im, rt2, irt2];
        let mut d = BigInt::one();
        for p in &parts {
            d = d.lcm(p.denom());
        }
        let n = parts.map(|p| p.numer() * (&d / p.denom()));
        Self::from_parts(n, d)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_bigint(BigInt::from(v))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        BaseNumber {
            n: [v, BigInt::zero(), BigInt::zero(), BigInt::zero()],
            d: BigInt::one(),
        }
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Self::from_parts(
            [BigInt::from(p), BigInt::zero(), BigInt::zero(), BigInt::zero()],
            BigInt::from(q),
        )
    }

    pub fn from_rat(r: &BigRational) -> Self {
        Self::from_parts(
            [r.numer().clone(), BigInt::zero(), BigInt::zero(), BigInt::zero()],
            r.denom().clone(),
        )
    }

    pub fn i() -> Self {
        Self::unit(1)
    }

    pub fn sqrt2() -> Self {
        Self::unit(2)
    }

    fn unit(k: usize) -> Self {
        let mut n = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
        n[k] = BigInt::one();
        BaseNumber { n, d: BigInt::one() }
    }

    /// Components (re, im, rt2, irt2) as rationals.
    pub fn parts(&self) -> [BigRational; 4] {
        [0, 1, 2, 3].map(|k| BigRational::new(self.n[k].clone(), self.d.clone()))
    }

    pub fn is_rational(&self) -> bool {
        self.n[1..].iter().all(|c| c.is_zero())
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.n[0].clone(), self.d.clone()))
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_rational() && self.d.is_one() {
            self.n[0].to_i64()
        } else {
            None
        }
    }

    /// Image under i -> -i.
    pub fn conj_i(&self) -> Self {
        BaseNumber {
            n: [
                self.n[0].clone(),
                -&self.n[1],
                self.n[2].clone(),
                -&self.n[3],
            ],
            d: self.d.clone(),
        }
    }

    /// Image under sqrt2 -> -sqrt2.
    pub fn conj_rt2(&self) -> Self {
        BaseNumber {
            n: [
                self.n[0].clone(),
                self.n[1].clone(),
                -&self.n[2],
                -&self.n[3],
            ],
            d: self.d.clone(),
        }
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        Self::from_parts(self.n.clone().map(|c| c * k), self.d.clone())
    }

    pub fn div_int(&self, k: &BigInt) -> Result<Self> {
        if k.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_parts(self.n.clone(), &self.d * k))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_rational() {
            return Ok(Self::from_parts(
                [self.d.clone(), BigInt::zero(), BigInt::zero(), BigInt::zero()],
                self.n[0].clone(),
            ));
        }
        let c1 = self.conj_rt2();
        let norm1 = self * &c1;
        let c2 = norm1.conj_i();
        let norm2 = &norm1 * &c2;
        let r = norm2.to_rational().ok_or_else(|| {
            Error::Convention("field norm is not rational".into())
        })?;
        let num = &c1 * &c2;
        Ok(&num * &Self::from_rat(&r.recip()))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        Ok(self * &o.inv()?)
    }

    pub fn pow_i(&self, e: i64) -> Result<Self> {
        let p = self.fpow(e.unsigned_abs() as u32);
        if e < 0 {
            p.inv()
        } else {
            Ok(p)
        }
    }

    /// A square root inside K when one is found, for rationals of the form
    /// plus or minus m^2 or 2 m^2 and for Gaussian rationals whose norm is a
    /// rational square of such a shape.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if let Some(r) = self.to_rational() {
            return sqrt_rational(&r);
        }
        if self.n[2].is_zero() && self.n[3].is_zero() {
            let [a, b, _, _] = self.parts();
            let nrm = sqrt_rational(&(&a * &a + &b * &b))?.to_rational()?;
            for s in [nrm.clone(), -nrm] {
                let half = (&a + &s) / BigRational::from_integer(2.into());
                if half.is_zero() {
                    continue;
                }
                if let Some(x) = sqrt_rational(&half) {
                    let two_x = &x + &x;
                    if let Ok(y) = Self::from_rat(&b).checked_div(&two_x) {
                        let cand = &x + &(&y * &Self::i());
                        if &(&cand * &cand) == self {
                            return Some(cand);
                        }
                    }
                }
            }
        }
        None
    }

    /// Encodes as {"re","im","rt2","imrt2"} with "p/q" strings.
    pub fn to_json(&self) -> Value {
        let [a, b, c, d] = self.parts();
        json!({
            "re": a.to_string(),
            "im": b.to_string(),
            "rt2": c.to_string(),
            "imrt2": d.to_string(),
        })
    }

    /// Accepts the object form, a "p/q" string, or an integer. Floats are rejected.
    pub fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Self::from_i64(i))
                } else {
                    Err(Error::InvalidInput(format!(
                        "floating point number {n} is not an exact value"
                    )))
                }
            }
            Value::String(s) => Ok(Self::from_rat(&parse_rational(s)?)),
            Value::Object(m) => {
                for k in m.keys() {
                    if !["re", "im", "rt2", "imrt2"].contains(&k.as_str()) {
                        return Err(Error::InvalidInput(format!("unknown number field '{k}'")));
                    }
                }
                let get = |k: &str| -> Result<BigRational> {
                    match m.get(k) {
                        None => Ok(BigRational::zero()),
                        Some(Value::String(s)) => parse_rational(s),
                        Some(Value::Number(n)) => n
                            .as_i64()
                            .map(|i| BigRational::from_integer(i.into()))
                            .ok_or_else(|| {
                                Error::InvalidInput(format!("floating point number {n} in field '{k}'"))
                            }),
                        Some(other) => {
                            Err(Error::InvalidInput(format!("bad number field '{k}': {other}")))
                        }
                    }
                };
                Ok(Self::new(get("re")?, get("im")?, get("rt2")?, get("imrt2")?))
            }
            other => Err(Error::InvalidInput(format!("not a number: {other}"))),
        }
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if t.contains(['.', 'e', 'E']) {
        return Err(Error::InvalidInput(format!("'{s}' is not an exact rational")));
    }
    let r: BigRational = t
        .parse()
        .map_err(|_| Error::InvalidInput(format!("cannot parse rational '{s}'")))?;
    Ok(r)
}

fn sqrt_rational(r: &BigRational) -> Option<BaseNumber> {
    if r.is_zero() {
        return Some(BaseNumber::zero());
    }
    let neg = r.is_negative();
    let q = r.denom().clone();
    let pq = (r.numer() * &q).abs();
    let root = |m: &BigInt| -> Option<BigInt> {
        let s = m.sqrt();
        (&s * &s == *m).then_some(s)
    };
    let base = if let Some(m) = root(&pq) {
        BaseNumber::from_parts([m, BigInt::zero(), BigInt::zero(), BigInt::zero()], q)
    } else if pq.is_even() {
        let m = root(&(&pq / 2))?;
        BaseNumber::from_parts([BigInt::zero(), BigInt::zero(), m, BigInt::zero()], q)
    } else {
        return None;
    };
    Some(if neg { &base * &BaseNumber::i() } else { base })
}

impl Field for BaseNumber {
    fn zero() -> Self {
        Self::from_i64(0)
    }
    fn one() -> Self {
        Self::from_i64(1)
    }
    fn is_zero(&self) -> bool {
        self.n.iter().all(|c| c.is_zero())
    }
    fn is_one(&self) -> bool {
        self.d.is_one() && self.n[0].is_one() && self.n[1..].iter().all(|c| c.is_zero())
    }
    fn fadd(&self, o: &Self) -> Self {
        self + o
    }
    fn fsub(&self, o: &Self) -> Self {
        self - o
    }
    fn fmul(&self, o: &Self) -> Self {
        self * o
    }
    fn fneg(&self) -> Self {
        -self
    }
    fn finv(&self) -> Result<Self> {
        self.inv()
    }
    fn from_int(n: i64) -> Self {
        Self::from_i64(n)
    }
    fn from_rational(r: &BigRational) -> Self {
        Self::from_rat(r)
    }
    fn from_base(k: &BaseNumber) -> Self {
        k.clone()
    }
    fn to_json(&self) -> Value {
        BaseNumber::to_json(self)
    }
}

fn add_like(a: &BaseNumber, b: &BaseNumber, sign: i32) -> BaseNumber {
    if a.d == b.d {
        let n = [0, 1, 2, 3].map(|k| {
            if sign > 0 {
                &a.n[k] + &b.n[k]
            } else {
                &a.n[k] - &b.n[k]
            }
        });
        return BaseNumber::from_parts(n, a.d.clone());
    }
    let n = [0, 1, 2, 3].map(|k| {
        let x = &a.n[k] * &b.d;
        let y = &b.n[k] * &a.d;
        if sign > 0 {
            x + y
        } else {
            x - y
        }
    });
    BaseNumber::from_parts(n, &a.d * &b.d)
}

impl<'a> Add<&'a BaseNumber> for &'a BaseNumber {
    type Output = BaseNumber;
    fn add(self, o: &BaseNumber) -> BaseNumber {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        add_like(self, o, 1)
    }
}

impl<'a> Sub<&'a BaseNumber> for &'a BaseNumber {
    type Output = BaseNumber;
    fn sub(self, o: &BaseNumber) -> BaseNumber {
        if o.is_zero() {
            return self.clone();
        }
        add_like(self, o, -1)
    }
}

impl<'a> Mul<&'a BaseNumber> for &'a BaseNumber {
    type Output = BaseNumber;
    fn mul(self, o: &BaseNumber) -> BaseNumber {
        if self.is_zero() || o.is_zero() {
            return BaseNumber::zero();
        }
        if self.is_rational() && o.is_rational() {
            return BaseNumber::from_parts(
                [&self.n[0] * &o.n[0], BigInt::zero(), BigInt::zero(), BigInt::zero()],
                &self.d * &o.d,
            );
        }
        let [a, b, c, d] = &self.n;
        let [e, f, g, h] = &o.n;
        let two = BigInt::from(2);
        let re = a * e - b * f + &two * (c * g - d * h);
        let im = a * f + b * e + &two * (c * h + d * g);
        let rt2 = a * g + c * e - b * h - d * f;
        let irt2 = a * h + d * e + b * g + c * f;
        BaseNumber::from_parts([re, im, rt2, irt2], &self.d * &o.d)
    }
}

impl Neg for &BaseNumber {
    type Output = BaseNumber;
    fn neg(self) -> BaseNumber {
        BaseNumber {
            n: self.n.clone().map(|c| -c),
            d: self.d.clone(),
        }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<BaseNumber> for BaseNumber {
            type Output = BaseNumber;
            fn $m(self, o: BaseNumber) -> BaseNumber {
                (&self).$m(&o)
            }
        }
        impl $tr<&BaseNumber> for BaseNumber {
            type Output = BaseNumber;
            fn $m(self, o: &BaseNumber) -> BaseNumber {
                (&self).$m(o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for BaseNumber {
    type Output = BaseNumber;
    fn neg(self) -> BaseNumber {
        -&self
    }
}

impl From<i64> for BaseNumber {
    fn from(v: i64) -> Self {
        Self::from_i64(v)
    }
}

impl fmt::Display for BaseNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let labels = ["", "i", "√2", "i√2"];
        let mut first = true;
        for (p, l) in self.parts().iter().zip(labels) {
            if p.is_zero() {
                continue;
            }
            let (sign, mag) = if p.is_negative() { ("-", -p) } else { ("+", p.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if l.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{l}")?;
            } else {
                write!(f, "{mag}{l}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BaseNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * k)
}

/// n!! with (-1)!! = 1 and (-3)!! = -1.
pub fn double_factorial(n: i64) -> BigInt {
    match n {
        -1 | 0 => BigInt::one(),
        -3 => -BigInt::one(),
        n if n < 0 => panic!("double factorial of {n}"),
        n => {
            let mut acc = BigInt::one();
            let mut k = n;
            while k > 1 {
                acc *= k;
                k -= 2;
            }
            acc
        }
    }
}

/// Bernoulli numbers with B_1 = -1/2.
pub fn bernoulli(n: usize) -> BigRational {
    let mut b: Vec<BigRational> = vec![BigRational::one()];
    for m in 1..=n {
        let mut s = BigRational::zero();
        let mut binom = BigInt::one();
        for (k, bk) in b.iter().enumerate() {
            s += BigRational::from_integer(binom.clone()) * bk;
            binom = binom * (m + 1 - k) / (k + 1);
        }
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b[n].clone()
}
