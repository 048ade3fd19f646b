//! Meromorphic differentials on the curve: the dxi basis, the W forms, and
//! the PoleTensor storage of stable invariants.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use parking_lot::RwLock;
use serde_json::{json, Value};

use crate::algebra::{double_factorial, BaseNumber as K, Field, Poly, RatFunc, TruncSeries};
use crate::curve::{LocalFrame, SpectralCurve};
use crate::error::{Error, Result};

/// (branch index, d), branch index starting at 0.
pub type Slot = (usize, usize);

/// Stable invariant as coefficients over products of dxi_{alpha,d}(Y_j),
/// one slot per variable in variable order.
#[derive(Clone, PartialEq, Debug)]
pub struct PoleTensor<F> {
    pub g: usize,
    pub n: usize,
    terms: BTreeMap<Vec<Slot>, F>,
}

impl<F: Field> PoleTensor<F> {
    pub fn zero(g: usize, n: usize) -> Self {
        PoleTensor { g, n, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, slots: Vec<Slot>, c: F) {
        debug_assert_eq!(slots.len(), self.n);
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(slots).or_insert_with(F::zero);
        *e = e.fadd(&c);
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn get(&self, slots: &[Slot]) -> F {
        self.terms.get(slots).cloned().unwrap_or_else(F::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Slot>, &F)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, a: &F) -> Self {
        let mut t = Self::zero(self.g, self.n);
        for (k, v) in &self.terms {
            t.add_term(k.clone(), v.fmul(a));
        }
        t
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut t = self.clone();
        for (k, v) in &o.terms {
            t.add_term(k.clone(), v.clone());
        }
        t
    }

    /// Tensor with variable j moved to position perm[j].
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut t = Self::zero(self.g, self.n);
        for (k, v) in &self.terms {
            let mut s = k.clone();
            for (j, slot) in k.iter().enumerate() {
                s[perm[j]] = *slot;
            }
            t.add_term(s, v.clone());
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n.saturating_sub(1)).all(|j| {
            let mut perm: Vec<usize> = (0..self.n).collect();
            perm.swap(j, j + 1);
            self.permute(&perm) == *self
        }) && {
            let mut perm: Vec<usize> = (1..self.n).collect();
            perm.push(0);
            self.permute(&perm) == *self
        }
    }

    pub fn max_d(&self) -> usize {
        self.terms.keys().flat_map(|k| k.iter().map(|s| s.1)).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(k, v)| {
                let slots: Vec<Value> = k.iter().map(|(a, d)| json!([a + 1, d])).collect();
                json!({ "slots": slots, "coeff": v.to_json() })
            })
            .collect();
        json!({ "g": self.g, "n": self.n, "terms": terms })
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> Result<G>) -> Result<PoleTensor<G>> {
        let mut t = PoleTensor::zero(self.g, self.n);
        for (k, v) in &self.terms {
            t.add_term(k.clone(), f(v)?);
        }
        Ok(t)
    }
}

impl PoleTensor<K> {
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidInput(format!("pole tensor: {m}"));
        let g = v.get("g").and_then(Value::as_u64).ok_or_else(|| bad("missing g"))? as usize;
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| bad("missing n"))? as usize;
        let mut t = Self::zero(g, n);
        for term in v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))? {
            let slots = term
                .get("slots")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("missing slots"))?
                .iter()
                .map(|s| {
                    let a = s.get(0).and_then(Value::as_u64).ok_or_else(|| bad("bad slot"))?;
                    let d = s.get(1).and_then(Value::as_u64).ok_or_else(|| bad("bad slot"))?;
                    if a == 0 || a > 2 {
                        return Err(bad("branch index must be 1 or 2"));
                    }
                    Ok((a as usize - 1, d as usize))
                })
                .collect::<Result<Vec<_>>>()?;
            if slots.len() != n {
                return Err(bad("slot count differs from n"));
            }
            let c = K::from_json(term.get("coeff").ok_or_else(|| bad("missing coeff"))?)?;
            t.add_term(slots, c);
        }
        Ok(t)
    }
}

/// Normalization of dxi_{alpha,d} relative to e^alpha_{2d}: (-1)^d (2d-1)!! / 2^d.
pub fn dxi_scale<F: Field>(d: usize) -> F {
    let v = double_factorial(2 * d as i64 - 1) * if d % 2 == 0 { 1 } else { -1 };
    F::from_base(&K::from_bigint(v).div_int(&(BigInt::from(1) << d)).expect("nonzero"))
}

/// Principal coefficient of dxi_{alpha,d} at zeta^(-2d-2): (-1)^d (2d+1)!! / 2^d.
pub fn dxi_principal<F: Field>(d: usize) -> F {
    dxi_scale::<F>(d).fmul(&F::from_int(2 * d as i64 + 1))
}

/// Curve together with cached local frames and basis forms.
pub struct FormSystem<F> {
    pub curve: SpectralCurve<F>,
    frames: RwLock<Vec<Option<Arc<LocalFrame<F>>>>>,
    e_cache: RwLock<HashMap<(usize, usize), Arc<RatFunc<F>>>>,
    local_cache: RwLock<HashMap<(usize, usize, usize), Arc<TruncSeries<F>>>>,
}

impl<F: Field> FormSystem<F> {
    pub fn new(curve: SpectralCurve<F>) -> Self {
        let nb = curve.num_branch_points();
        FormSystem {
            curve,
            frames: RwLock::new(vec![None; nb]),
            e_cache: RwLock::new(HashMap::new()),
            local_cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn num_branch_points(&self) -> usize {
        self.curve.num_branch_points()
    }

    pub fn point(&self, alpha: usize) -> &F {
        self.curve.branch_point(alpha)
    }

    /// Local frame with at least the given order.
    pub fn frame(&self, alpha: usize, order: usize) -> Result<Arc<LocalFrame<F>>> {
        if let Some(f) = &self.frames.read()[alpha] {
            if f.order >= order {
                return Ok(f.clone());
            }
        }
        let target = order.max(8).next_power_of_two();
        let f = Arc::new(self.curve.local_frame(alpha, target)?);
        let mut w = self.frames.write();
        match &w[alpha] {
            Some(old) if old.order >= f.order => Ok(old.clone()),
            _ => {
                w[alpha] = Some(f.clone());
                Ok(f)
            }
        }
    }

    /// e^alpha_m(Y) = [zeta'^m] B(Y, Y_alpha(zeta')) / dzeta', a polynomial in 1/(Y - P).
    pub fn e_form(&self, alpha: usize, m: usize) -> Result<Arc<RatFunc<F>>> {
        if let Some(r) = self.e_cache.read().get(&(alpha, m)) {
            return Ok(r.clone());
        }
        let fr = self.frame(alpha, m + 2)?;
        let dy = fr.u.derivative();
        // numerator over (Y - P)^(m+2): sum_j (j+1) a_j (Y-P)^(m-j), a_j = [zeta^m](Y' u^j)
        let mut coeffs = vec![F::zero(); m + 1];
        let mut uj = TruncSeries::one(fr.u.var(), crate::algebra::EXACT);
        for j in 0..=m {
            let a = dy.mul(&uj).coeff(m as i64)?;
            coeffs[m - j] = a.fmul(&F::from_int(j as i64 + 1));
            uj = uj.mul(&fr.u);
        }
        let p = self.point(alpha).clone();
        let num = Poly::new(coeffs).compose_linear(&F::one(), &p.fneg());
        let r = Arc::new(RatFunc::new(num, Poly::linear_root(&p).pow(m as u32 + 2))?);
        self.e_cache.write().insert((alpha, m), r.clone());
        Ok(r)
    }

    /// dxi_{alpha,d} as a rational function times dY.
    pub fn dxi(&self, alpha: usize, d: usize) -> Result<RatFunc<F>> {
        Ok(self.e_form(alpha, 2 * d)?.scale(&dxi_scale(d)))
    }

    /// Closed form i sqrt(2/Delta) P / (Y - P)^2 for d = 0.
    pub fn dxi0_closed(&self, alpha: usize) -> Result<RatFunc<F>> {
        let i = F::from_base(&K::i());
        let rt2 = F::from_base(&K::sqrt2());
        let p = self.point(alpha).clone();
        let c = i.fmul(&rt2).fdiv(self.curve.sqrt_delta(alpha))?.fmul(&p);
        Ok(RatFunc::pole(c, &p, 2))
    }

    /// Pullback of e^beta_m at branch point alpha, exact below zeta^order.
    pub fn local_e(&self, alpha: usize, beta: usize, m: usize, order: usize) -> Result<Arc<TruncSeries<F>>> {
        if let Some(s) = self.local_cache.read().get(&(alpha, beta, m)) {
            if s.order() >= order as i64 {
                return Ok(s.clone());
            }
        }
        let e = self.e_form(beta, m)?;
        let pole = if alpha == beta { m + 2 } else { 0 };
        let fr = self.frame(alpha, order + pole + 2)?;
        let s = Arc::new(fr.expand(&e, self.point(alpha))?);
        if s.order() < order as i64 {
            return Err(Error::Truncation { needed: order as i64, order: s.order() });
        }
        self.local_cache.write().insert((alpha, beta, m), s.clone());
        Ok(s)
    }

    /// W^alpha_k = d((-1)^k theta^k xi_{alpha,0}) with theta f = df/dx.
    pub fn w_form(&self, alpha: usize, k: usize) -> Result<RatFunc<F>> {
        let d0 = self.dxi(alpha, 0)?;
        let p = self.point(alpha).clone();
        // xi_{alpha,0} = -c / (Y - P) where dxi_{alpha,0} = c / (Y - P)^2
        let c = d0.num().coeff(0).fdiv(&d0.den().lead())?;
        let mut f = RatFunc::pole(c.fneg(), &p, 1);
        let inv_dx = self.curve.dx().inv()?;
        for _ in 0..k {
            f = f.derivative().mul(&inv_dx).neg();
        }
        Ok(f.derivative())
    }

    /// Coefficients over dxi_{alpha,d} of a residue-free form with poles only
    /// at branch points. The reconstruction is checked exactly.
    pub fn decompose(&self, form: &RatFunc<F>) -> Result<BTreeMap<Slot, F>> {
        let mut out = BTreeMap::new();
        let mut recon = RatFunc::zero();
        for alpha in 0..self.num_branch_points() {
            let p = self.point(alpha).clone();
            let m = form.pole_order_at(&p);
            if m <= 0 {
                continue;
            }
            if m == 1 {
                return Err(Error::Verification("simple pole at a branch point".into()));
            }
            let fr = self.frame(alpha, m as usize + 4)?;
            let s = fr.expand(form, &p)?;
            let lo = s.valuation().unwrap_or(0);
            for e in lo..0 {
                let c = s.coeff(e)?;
                if c.is_zero() {
                    continue;
                }
                if e == -1 {
                    return Err(Error::Verification("nonzero residue at a branch point".into()));
                }
                if e % 2 != 0 {
                    return Err(Error::Convention(format!(
                        "odd singular term zeta^{e} at branch point {}",
                        alpha + 1
                    )));
                }
                let d = ((-e - 2) / 2) as usize;
                let coeff = c.fdiv(&dxi_principal(d))?;
                recon = recon.add(&self.dxi(alpha, d)?.scale(&coeff));
                out.insert((alpha, d), coeff);
            }
        }
        if recon != *form {
            return Err(Error::Verification(
                "form is not a combination of dxi (poles away from branch points)".into(),
            ));
        }
        Ok(out)
    }

    /// Realization of a tensor as a multivariate rational form.
    pub fn realize(&self, t: &PoleTensor<F>) -> Result<MultiForm<F>> {
        let n = t.n;
        let nb = self.num_branch_points();
        let mut maxd = vec![vec![None::<usize>; nb]; n];
        for (k, _) in t.terms() {
            for (j, &(a, d)) in k.iter().enumerate() {
                maxd[j][a] = Some(maxd[j][a].map_or(d, |x: usize| x.max(d)));
            }
        }
        let mut dens = Vec::with_capacity(n);
        let mut exps = Vec::with_capacity(n);
        for row in &maxd {
            let mut den = Poly::one();
            let mut ex = vec![0u32; nb];
            for (a, md) in row.iter().enumerate() {
                if let Some(md) = md {
                    ex[a] = 2 * *md as u32 + 2;
                    den = den.mul(&Poly::linear_root(self.point(a)).pow(ex[a]));
                }
            }
            dens.push(den);
            exps.push(ex);
        }
        let mut num: BTreeMap<Vec<u32>, F> = BTreeMap::new();
        let mut slot_poly: HashMap<(usize, Slot), Poly<F>> = HashMap::new();
        for (k, c) in t.terms() {
            let mut acc: BTreeMap<Vec<u32>, F> = BTreeMap::new();
            acc.insert(vec![], c.clone());
            for (j, &(a, d)) in k.iter().enumerate() {
                let poly = match slot_poly.get(&(j, (a, d))) {
                    Some(p) => p.clone(),
                    None => {
                        let f = self.dxi(a, d)?;
                        let mut p = f.num().clone();
                        let scale = f.den().lead().finv()?;
                        for (b, &e) in exps[j].iter().enumerate() {
                            let own = if b == a { 2 * d as u32 + 2 } else { 0 };
                            p = p.mul(&Poly::linear_root(self.point(b)).pow(e - own));
                        }
                        let p = p.scale(&scale);
                        slot_poly.insert((j, (a, d)), p.clone());
                        p
                    }
                };
                let mut next = BTreeMap::new();
                for (key, v) in &acc {
                    for (e, pc) in poly.coeffs().iter().enumerate() {
                        if pc.is_zero() {
                            continue;
                        }
                        let mut nk = key.clone();
                        nk.push(e as u32);
                        let x: &mut F = next.entry(nk).or_insert_with(F::zero);
                        *x = x.fadd(&v.fmul(pc));
                    }
                }
                acc = next;
            }
            for (key, v) in acc {
                let x = num.entry(key).or_insert_with(F::zero);
                *x = x.fadd(&v);
            }
        }
        num.retain(|_, v| !v.is_zero());
        Ok(MultiForm { n, num, dens })
    }

    /// Inverse of `realize`, decomposing one variable at a time.
    pub fn decompose_multi(&self, g: usize, m: &MultiForm<F>) -> Result<PoleTensor<F>> {
        let mut out = PoleTensor::zero(g, m.n);
        self.decompose_rec(m, &mut vec![], &mut out)?;
        Ok(out)
    }

    fn decompose_rec(
        &self,
        m: &MultiForm<F>,
        prefix: &mut Vec<Slot>,
        out: &mut PoleTensor<F>,
    ) -> Result<()> {
        if m.n == 0 {
            let c = m.num.get(&vec![]).cloned().unwrap_or_else(F::zero);
            out.add_term(prefix.clone(), c);
            return Ok(());
        }
        let mut groups: BTreeMap<Vec<u32>, BTreeMap<u32, F>> = BTreeMap::new();
        for (k, v) in &m.num {
            groups.entry(k[1..].to_vec()).or_default().insert(k[0], v.clone());
        }
        let mut by_slot: BTreeMap<Slot, BTreeMap<Vec<u32>, F>> = BTreeMap::new();
        for (rest, poly) in groups {
            let deg = *poly.keys().max().unwrap_or(&0) as usize;
            let mut c = vec![F::zero(); deg + 1];
            for (e, v) in poly {
                c[e as usize] = v;
            }
            let f = RatFunc::new(Poly::new(c), m.dens[0].clone())?;
            for (slot, coeff) in self.decompose(&f)? {
                by_slot.entry(slot).or_default().insert(rest.clone(), coeff);
            }
        }
        for (slot, num) in by_slot {
            let sub = MultiForm { n: m.n - 1, num, dens: m.dens[1..].to_vec() };
            prefix.push(slot);
            self.decompose_rec(&sub, prefix, out)?;
            prefix.pop();
        }
        Ok(())
    }
}

/// Sum of monomials in Y_1..Y_n over a product of per-variable denominators.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiForm<F> {
    pub n: usize,
    pub num: BTreeMap<Vec<u32>, F>,
    pub dens: Vec<Poly<F>>,
}

impl<F: Field> MultiForm<F> {
    /// Value of the coefficient of dY_1...dY_n at a point.
    pub fn eval(&self, y: &[F]) -> Result<F> {
        let mut s = F::zero();
        for (k, v) in &self.num {
            let mut t = v.clone();
            for (j, e) in k.iter().enumerate() {
                t = t.fmul(&y[j].fpow(*e));
            }
            s = s.fadd(&t);
        }
        for (j, d) in self.dens.iter().enumerate() {
            s = s.fdiv(&d.eval(&y[j]))?;
        }
        Ok(s)
    }
}
