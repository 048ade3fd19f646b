//! Exact arithmetic: the number field K = Q(i, sqrt 2), rational functions
//! over K in the parameter sigma, rational functions in a curve variable, and
//! truncated Laurent series.

mod number;
mod poly;
mod ratfunc;
mod scalar;
mod series;

pub use number::{bernoulli, double_factorial, factorial, BaseNumber};
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use scalar::Scalar;
pub use series::{TruncSeries, Var, EXACT};

use crate::error::Result;
use num_rational::BigRational;

/// Minimal field interface shared by the coefficient types.
pub trait Field: Clone + PartialEq + std::fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn fadd(&self, o: &Self) -> Self;
    fn fsub(&self, o: &Self) -> Self;
    fn fmul(&self, o: &Self) -> Self;
    fn fneg(&self) -> Self;
    fn finv(&self) -> Result<Self>;
    fn from_int(n: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn from_base(k: &BaseNumber) -> Self;
    fn to_json(&self) -> serde_json::Value;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn fdiv(&self, o: &Self) -> Result<Self> {
        Ok(self.fmul(&o.finv()?))
    }
    fn fpow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.fmul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.fmul(&base);
            }
        }
        acc
    }
}
