//! Formal Bessel identities: the J-function against the modified Bessel
//! series, the quantum differential equation, and the contour lemma as an
//! identity of Laurent polynomials in E = exp(2 pi i alpha).

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use crate::algebra::{factorial, Field, TruncSeries, Var};
use crate::error::{Error, Result};
use crate::givental::{CohSeries, FrobeniusPoint};

/// Outcome of a family of exact checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn new(name: &str) -> Self {
        CheckReport { name: name.to_string(), checked: 0, failures: Vec::new() }
    }
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
    pub fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
    pub fn merge(&mut self, o: CheckReport) {
        self.checked += o.checked;
        self.failures.extend(o.failures);
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "pass" } else { "FAIL" };
        write!(f, "{}: {status} ({} checks", self.name, self.checked)?;
        if let Some(x) = self.failures.first() {
            write!(f, ", first failure: {x}")?;
        }
        write!(f, ")")
    }
}

fn w_series<F: Field>(c: Vec<F>, order: i64) -> TruncSeries<F> {
    TruncSeries::new(Var::W, 0, c, order)
}

/// [q^m] of z^nu Gamma(nu + 1) (x/2)^(-nu) I_nu(x) with x = 2 sqrt(q)/z and nu = chi/z,
/// that is (x/2)^(2m) Gamma(nu + 1)/(m! Gamma(nu + m + 1)), as a series in w = 1/z.
pub fn bessel_term<F: Field>(chi: &F, m: usize, order: i64) -> Result<TruncSeries<F>> {
    // (x/2)^2 = q w^2; Gamma(nu + m + 1)/Gamma(nu + 1) = prod_{k=1}^m (nu + k), nu = chi w
    let mut poch = TruncSeries::one(Var::W, order);
    for k in 1..=m {
        poch = poch.mul(&w_series(vec![F::from_int(k as i64), chi.clone()], order));
    }
    let mf = F::from_rational(&BigRational::from_integer(factorial(m as u64)));
    Ok(poch.inv()?.shift(2 * m as i64).scale(&mf.finv()?).truncate(order))
}

/// The printed intermediate (2 sqrt(q)/z)^(2m) Gamma(nu + 1)/(m! Gamma(nu + m + 1)) at q = 1.
pub fn printed_intermediate_term<F: Field>(chi: &F, m: usize, order: i64) -> Result<TruncSeries<F>> {
    Ok(bessel_term(chi, m, order)?.scale(&F::from_int(4).fpow(m as u32)))
}

/// q^d/(d! z^d prod_{m=1}^d (chi + m z)) as a series in w.
pub fn j_closed_term<F: Field>(chi: &F, d: usize, order: i64) -> Result<TruncSeries<F>> {
    let mut acc = TruncSeries::one(Var::W, order);
    for m in 1..=d {
        // 1/(chi + m z) = w/(m + chi w)
        let f = w_series(vec![F::from_int(m as i64), chi.clone()], order).inv()?.shift(1);
        acc = acc.mul(&f);
    }
    let df = F::from_rational(&BigRational::from_integer(factorial(d as u64)));
    Ok(acc.shift(d as i64).scale(&df.finv()?).truncate(order))
}

/// Coefficientwise equality below w^order.
fn agree<F: Field>(x: &TruncSeries<F>, y: &TruncSeries<F>, order: i64) -> bool {
    let top = order.min(x.order()).min(y.order());
    top > 0 && (-4 * order..top).all(|e| x.coeff_lenient(e) == y.coeff_lenient(e))
}

fn restrict<F: Field>(x: &CohSeries<F>, h: &F) -> TruncSeries<F> {
    x.a.add(&x.b.scale(h))
}

/// J at the fixed point alpha against the Bessel series and the closed product, for q^0..q^dmax.
pub fn check_j_bessel<F: Field>(p: &FrobeniusPoint<F>, dmax: usize) -> Result<CheckReport> {
    let order = 2 * dmax as i64 + 6;
    let mut rep = CheckReport::new("J-Bessel");
    let terms = p.j_terms(dmax, order)?;
    let w = [p.params.w1.clone(), p.params.w2.clone()];
    for alpha in 0..2 {
        let chi = &p.params.chi[alpha];
        for (d, t) in terms.iter().enumerate() {
            let j = restrict(t, &w[alpha]);
            let b = bessel_term(chi, d, order)?;
            let c = j_closed_term(chi, d, order)?;
            rep.record(agree(&j, &b, order), || format!("alpha={} q^{d}: J differs from the Bessel term", alpha + 1));
            rep.record(agree(&b, &c, order), || format!("alpha={} q^{d}: Bessel term differs from the closed product", alpha + 1));
        }
    }
    Ok(rep)
}

/// (z q d/dq - w1)(z q d/dq - w2) applied to sum_d q^(d + H/z) J_d equals q times the same,
/// coefficientwise: (H + d z - w1)(H + d z - w2) J_d = J_(d-1), in F[H]/((H - w1)(H - w2)).
pub fn check_qde<F: Field>(p: &FrobeniusPoint<F>, dmax: usize) -> Result<CheckReport> {
    let order = 2 * dmax as i64 + 6;
    let mut rep = CheckReport::new("QDE");
    let (w1, w2) = (p.params.w1.clone(), p.params.w2.clone());
    let (s, pr) = (w1.fadd(&w2), w1.fmul(&w2));
    let mul = |x: &CohSeries<F>, y: &CohSeries<F>| {
        let bb = x.b.mul(&y.b);
        CohSeries {
            a: x.a.mul(&y.a).sub(&bb.scale(&pr)),
            b: x.a.mul(&y.b).add(&x.b.mul(&y.a)).add(&bb.scale(&s)),
        }
    };
    let terms = p.j_terms(dmax, order)?;
    for (d, t) in terms.iter().enumerate() {
        // w (H + d z - wk) = d + (H - wk) w
        let fac = |wk: &F| CohSeries {
            a: w_series(vec![F::from_int(d as i64), wk.fneg()], order),
            b: w_series(vec![F::zero(), F::one()], order),
        };
        let lhs = mul(&fac(&w1), &mul(&fac(&w2), t));
        let (ra, rb) = if d == 0 {
            (TruncSeries::zero(Var::W, order), TruncSeries::zero(Var::W, order))
        } else {
            (terms[d - 1].a.shift(2), terms[d - 1].b.shift(2))
        };
        let ok = agree(&lhs.a, &ra, order) && agree(&lhs.b, &rb, order);
        rep.record(ok, || format!("q^{d}"));
    }
    Ok(rep)
}

/// Laurent polynomial in E with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Laurent(BTreeMap<i64, i64>);

impl Laurent {
    pub fn monomial(c: i64, e: i64) -> Self {
        let mut l = Laurent::default();
        l.add_term(c, e);
        l
    }
    fn add_term(&mut self, c: i64, e: i64) {
        let v = self.0.entry(e).or_insert(0);
        *v += c;
        if *v == 0 {
            self.0.remove(&e);
        }
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (&e, &c) in &o.0 {
            r.add_term(c, e);
        }
        r
    }
    pub fn scale(&self, c: i64, shift: i64) -> Self {
        let mut r = Laurent::default();
        for (&e, &x) in &self.0 {
            r.add_term(c * x, e + shift);
        }
        r
    }
    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.0.iter().map(|(&e, &c)| (e, c))
    }
}

/// Element a I_(-alpha) + b I_alpha of the span over Laurent polynomials in E,
/// with the common prefactor pi/sin(alpha pi) dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ContourElement {
    pub minus: Laurent,
    pub plus: Laurent,
}

impl ContourElement {
    pub fn add(&self, o: &Self) -> Self {
        ContourElement { minus: self.minus.add(&o.minus), plus: self.plus.add(&o.plus) }
    }
    /// c E^k times self
    pub fn scale(&self, c: i64, k: i64) -> Self {
        ContourElement { minus: self.minus.scale(c, k), plus: self.plus.scale(c, k) }
    }
}

/// gamma_(0,0) = I_(-alpha) - I_alpha.
pub fn gamma00() -> ContourElement {
    ContourElement { minus: Laurent::monomial(1, 0), plus: Laurent::monomial(-1, 0) }
}

/// gamma_(0,1) = I_(-alpha) - E^(-1) I_alpha.
pub fn gamma01() -> ContourElement {
    ContourElement { minus: Laurent::monomial(1, 0), plus: Laurent::monomial(-1, -1) }
}

/// Closed form E^(l1) I_(-alpha) - E^(-l2) I_alpha.
pub fn contour_closed(l1: i64, l2: i64) -> ContourElement {
    ContourElement { minus: Laurent::monomial(1, l1), plus: Laurent::monomial(-1, -l2) }
}

/// Which decomposition of gamma_(l1,l2) into unit contours to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decomposition {
    /// sum_{k=-l1}^{l2-1} gamma_(-k,k+1) - sum_{k=1-l1}^{l2-1} gamma_(-k,k)
    Corrected,
    /// sum_{k=-l1}^{l2-1} gamma_(1-k,k) - sum_{k=1-l1}^{l2-1} gamma_(-k,k)
    Printed,
}

/// gamma_(l1-k, l2+k) = E^(-k) gamma_(l1,l2) applied to the unit contours.
fn unit(l1: i64, l2: i64) -> Result<ContourElement> {
    match l1 + l2 {
        0 => Ok(gamma00().scale(1, l1)),
        1 => Ok(gamma01().scale(1, l1)),
        _ => Err(Error::InvalidInput(format!("gamma_({l1},{l2}) is not a unit contour"))),
    }
}

/// gamma_(l1,l2) for l1 + l2 >= 1 by decomposition into unit contours.
pub fn contour_decompose(l1: i64, l2: i64, rule: Decomposition) -> Result<ContourElement> {
    if l1 + l2 < 1 {
        return Err(Error::InvalidInput("decomposition needs l1 + l2 >= 1".into()));
    }
    let mut acc = ContourElement::default();
    for k in -l1..l2 {
        let t = match rule {
            Decomposition::Corrected => unit(-k, k + 1)?,
            // gamma_(1-k,k) has l1 + l2 = 1 as well
            Decomposition::Printed => unit(1 - k, k)?,
        };
        acc = acc.add(&t);
    }
    for k in (1 - l1)..l2 {
        acc = acc.add(&unit(-k, k)?.scale(-1, 0));
    }
    Ok(acc)
}

/// gamma_(l1,l2) by shifting to gamma_(0, l1 + l2) and decomposing there.
pub fn contour_via_shift(l1: i64, l2: i64) -> Result<ContourElement> {
    if l1 + l2 < 0 {
        return Err(Error::InvalidInput("l1 + l2 must be nonnegative".into()));
    }
    let base = if l1 + l2 == 0 { gamma00() } else { contour_decompose(0, l1 + l2, Decomposition::Corrected)? };
    Ok(base.scale(1, l1))
}

/// Both routes against the closed form for |l1|, |l2| <= lmax with l1 + l2 >= 0.
pub fn check_contour_lemma(lmax: i64) -> Result<CheckReport> {
    let mut rep = CheckReport::new("contour lemma");
    for l1 in -lmax..=lmax {
        for l2 in -lmax..=lmax {
            if l1 + l2 < 0 {
                continue;
            }
            let closed = contour_closed(l1, l2);
            let s = contour_via_shift(l1, l2)?;
            rep.record(s == closed, || format!("shift route at ({l1},{l2})"));
            if l1 + l2 >= 1 {
                let d = contour_decompose(l1, l2, Decomposition::Corrected)?;
                rep.record(d == closed, || format!("decomposition at ({l1},{l2})"));
            }
        }
    }
    Ok(rep)
}
