//! Topological recursion for the invariants omega_{g,n}.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use parking_lot::RwLock;
use rayon::prelude::*;

use crate::algebra::{Field, TruncSeries, Var};
use crate::error::{Error, Result};
use crate::forms::{dxi_scale, FormSystem, PoleTensor, Slot};

/// Which slot of a stored invariant is fed the local coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZetaSlot {
    First,
    Last,
}

/// Slot in the e-basis: (branch, m) for e^branch_m.
type ESlot = (usize, usize);
/// Local expansion keyed by (variable position, e-slot) pairs.
type Expansion<F> = Vec<(Vec<(usize, ESlot)>, TruncSeries<F>)>;

pub struct Recursion<F> {
    pub forms: Arc<FormSystem<F>>,
    zeta_slot: ZetaSlot,
    memo: RwLock<HashMap<(usize, usize), Arc<PoleTensor<F>>>>,
}

impl<F: Field> Recursion<F> {
    pub fn new(forms: Arc<FormSystem<F>>) -> Self {
        Self::with_zeta_slot(forms, ZetaSlot::First)
    }

    pub fn with_zeta_slot(forms: Arc<FormSystem<F>>, zeta_slot: ZetaSlot) -> Self {
        Recursion { forms, zeta_slot, memo: RwLock::new(HashMap::new()) }
    }

    /// Seeds the memo table, e.g. from a persisted cache.
    pub fn insert(&self, t: PoleTensor<F>) {
        self.memo.write().insert((t.g, t.n), Arc::new(t));
    }

    pub fn cached(&self, g: usize, n: usize) -> Option<Arc<PoleTensor<F>>> {
        self.memo.read().get(&(g, n)).cloned()
    }

    /// omega_{g,n} in the dxi basis.
    pub fn omega(&self, g: usize, n: usize) -> Result<Arc<PoleTensor<F>>> {
        if n == 0 || 2 * g + n <= 2 {
            if (g, n) == (0, 1) {
                return Err(Error::InvalidInput("ω_{0,1}=0 is not a stable invariant".into()));
            }
            return Err(Error::Unstable { g, n });
        }
        if let Some(t) = self.cached(g, n) {
            return Ok(t);
        }
        let t = Arc::new(self.compute_escalating(g, n)?);
        self.memo.write().insert((g, n), t.clone());
        Ok(t)
    }

    fn compute_escalating(&self, g: usize, n: usize) -> Result<PoleTensor<F>> {
        let dmax = 3 * g + n - 3;
        let base = 2 * dmax + 2;
        let mut last = None;
        for extra in [0usize, 4, 12] {
            match self.compute(g, n, base + extra) {
                Err(Error::Truncation { needed, order }) => {
                    last = Some(format!("needed {needed}, had {order}"));
                }
                other => return other,
            }
        }
        Err(Error::EscalationExhausted(format!(
            "omega_{{{g},{n}}}: {}",
            last.unwrap_or_default()
        )))
    }

    fn compute(&self, g: usize, n: usize, pmax: usize) -> Result<PoleTensor<F>> {
        // sub-invariants first, sequentially, so the branch computations only read the memo
        for (g1, n1) in sub_pairs(g, n) {
            self.omega(g1, n1)?;
        }
        let nb = self.forms.num_branch_points();
        let parts: Vec<Result<PoleTensor<F>>> = (0..nb)
            .into_par_iter()
            .map(|alpha| self.branch(alpha, g, n, pmax))
            .collect();
        let mut out = PoleTensor::zero(g, n);
        for p in parts {
            out = out.add(&p?);
        }
        Ok(out)
    }

    /// Contribution of the residue at one branch point.
    fn branch(&self, alpha: usize, g: usize, n: usize, pmax: usize) -> Result<PoleTensor<F>> {
        let s = n - 1;
        let order = pmax as i64 + 1;
        let mut f: BTreeMap<Vec<ESlot>, TruncSeries<F>> = BTreeMap::new();
        let mut push = |key: Vec<(usize, ESlot)>, ser: TruncSeries<F>| {
            let mut k: Vec<(usize, ESlot)> = key;
            k.sort_unstable();
            let key: Vec<ESlot> = k.into_iter().map(|x| x.1).collect();
            match f.get_mut(&key) {
                Some(acc) => *acc = acc.add(&ser),
                None => {
                    f.insert(key, ser);
                }
            }
        };
        let all: Vec<usize> = (0..s).collect();
        if g >= 1 {
            if g == 1 && s == 0 {
                push(vec![], self.bergman_diagonal(alpha, order)?);
            } else {
                for (key, ser) in self.double_expansion(alpha, g - 1, &all, order)? {
                    push(key, ser);
                }
            }
        }
        for g1 in 0..=g {
            let g2 = g - g1;
            for mask in 0u32..(1 << s) {
                let i: Vec<usize> = (0..s).filter(|j| mask & (1 << j) != 0).collect();
                let j: Vec<usize> = (0..s).filter(|j| mask & (1 << j) == 0).collect();
                if (g1 == 0 && i.is_empty()) || (g2 == 0 && j.is_empty()) {
                    continue;
                }
                let a = self.expansion(alpha, g1, &i, false, order, pmax)?;
                let b = self.expansion(alpha, g2, &j, true, order, pmax)?;
                for (ka, sa) in &a {
                    let va = sa.valuation().unwrap_or(i64::MAX / 4);
                    for (kb, sb) in &b {
                        let vb = sb.valuation().unwrap_or(i64::MAX / 4);
                        if va + vb > 0 {
                            continue;
                        }
                        let mut key = ka.clone();
                        key.extend(kb.iter().cloned());
                        push(key, sa.mul(sb));
                    }
                }
            }
        }
        let fr = self.forms.frame(alpha, 2 * pmax + 6)?;
        let hn = 2 * pmax as i64 + 4;
        let h: Vec<F> = (0..hn)
            .map(|k| if k % 2 == 1 { fr.h[k as usize].clone() } else { F::zero() })
            .collect();
        let hinv = TruncSeries::new(Var::Zeta, 0, h, hn).inv()?;
        let dmax = 3 * g + n - 3;
        let mut out = PoleTensor::zero(g, n);
        for (key, ser) in f {
            let q = ser.mul(&hinv);
            // odd e-slots must cancel in the final answer
            let mut vals = Vec::with_capacity(dmax + 1);
            for d in 0..=dmax {
                let c = q.coeff(-2 * d as i64 - 1)?;
                vals.push(c.fdiv(&F::from_int(4 * (2 * d as i64 + 1)))?);
            }
            if vals.iter().all(|v| v.is_zero()) {
                continue;
            }
            if key.iter().any(|(_, m)| m % 2 == 1) {
                return Err(Error::Convention(format!(
                    "odd e-slot {key:?} survives at branch point {}",
                    alpha + 1
                )));
            }
            let mut scale = F::one();
            for (_, m) in &key {
                scale = scale.fmul(&dxi_scale::<F>(m / 2));
            }
            let scale = scale.finv()?;
            for (d, v) in vals.into_iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let mut slots: Vec<Slot> = vec![(alpha, d)];
                slots.extend(key.iter().map(|&(b, m)| (b, m / 2)));
                let c = v.fmul(&scale).fdiv(&dxi_scale::<F>(d))?;
                out.add_term(slots, c);
            }
        }
        Ok(out)
    }

    /// dzeta^2 coefficient of B(Y(zeta), Y(-zeta)).
    fn bergman_diagonal(&self, alpha: usize, order: i64) -> Result<TruncSeries<F>> {
        let quarter = F::one().fdiv(&F::from_int(4))?;
        let mut acc = TruncSeries::monomial(Var::Zeta, quarter, -2, order);
        for l in 0..order.max(0) as usize {
            let s = self.forms.local_e(alpha, alpha, l, order as usize)?;
            // regular part only
            let mut reg = Vec::new();
            for e in 0..order {
                reg.push(s.coeff(e)?);
            }
            let reg = TruncSeries::new(Var::Zeta, 0, reg, order - l as i64);
            let sign = if l % 2 == 0 { F::one() } else { F::one().fneg() };
            acc = acc.add(&reg.shift(l as i64).scale(&sign).truncate(order));
        }
        Ok(acc.neg())
    }

    /// Expansion of omega_{g', |vars|+1}(Y(+-zeta), Y_vars) in its zeta slot.
    fn expansion(
        &self,
        alpha: usize,
        g1: usize,
        vars: &[usize],
        hat: bool,
        order: i64,
        pmax: usize,
    ) -> Result<Expansion<F>> {
        let mut out = Vec::new();
        if g1 == 0 && vars.len() == 1 {
            for m in 0..=pmax {
                let sign = if hat && m % 2 == 0 { F::one().fneg() } else { F::one() };
                out.push((vec![(vars[0], (alpha, m))], TruncSeries::monomial(Var::Zeta, sign, m as i64, order)));
            }
            return Ok(out);
        }
        let t = self.omega(g1, vars.len() + 1)?;
        let zs = match self.zeta_slot {
            ZetaSlot::First => 0,
            ZetaSlot::Last => vars.len(),
        };
        for (slots, c) in t.terms() {
            let (b, d) = slots[zs];
            let mut coeff = c.fmul(&dxi_scale::<F>(d));
            let mut key = Vec::with_capacity(vars.len());
            let mut vi = 0;
            for (k, &(b2, d2)) in slots.iter().enumerate() {
                if k == zs {
                    continue;
                }
                coeff = coeff.fmul(&dxi_scale::<F>(d2));
                key.push((vars[vi], (b2, 2 * d2)));
                vi += 1;
            }
            let l = self.forms.local_e(alpha, b, 2 * d, order as usize)?;
            let l = l.truncate(order);
            let ser = if hat { l.negate_var().neg() } else { l };
            out.push((key, ser.scale(&coeff)));
        }
        Ok(out)
    }

    /// Expansion of omega_{g', |vars|+2}(Y(zeta), Y(-zeta), Y_vars).
    fn double_expansion(&self, alpha: usize, g1: usize, vars: &[usize], order: i64) -> Result<Expansion<F>> {
        let t = self.omega(g1, vars.len() + 2)?;
        let nn = vars.len() + 2;
        let (z1, z2) = match self.zeta_slot {
            ZetaSlot::First => (0, 1),
            ZetaSlot::Last => (nn - 2, nn - 1),
        };
        let mut out = Vec::new();
        for (slots, c) in t.terms() {
            let (b1, d1) = slots[z1];
            let (b2, d2) = slots[z2];
            let mut coeff = c.fmul(&dxi_scale::<F>(d1)).fmul(&dxi_scale::<F>(d2));
            let mut key = Vec::with_capacity(vars.len());
            let mut vi = 0;
            for (k, &(b, d)) in slots.iter().enumerate() {
                if k == z1 || k == z2 {
                    continue;
                }
                coeff = coeff.fmul(&dxi_scale::<F>(d));
                key.push((vars[vi], (b, 2 * d)));
                vi += 1;
            }
            let l1 = self.forms.local_e(alpha, b1, 2 * d1, 2 * order as usize)?.truncate(2 * order);
            let l2 = self.forms.local_e(alpha, b2, 2 * d2, 2 * order as usize)?.truncate(2 * order);
            let ser = l1.mul(&l2.negate_var().neg()).scale(&coeff);
            out.push((key, ser));
        }
        Ok(out)
    }
}

/// Invariants the recursion for omega_{g,n} reads.
fn sub_pairs(g: usize, n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    if g >= 1 && 2 * (g - 1) + n + 1 > 2 {
        v.push((g - 1, n + 1));
    }
    for g1 in 0..=g {
        for k in 0..n {
            // omega_{g1, k+1} with k of the remaining n-1 variables
            if k < n && 2 * g1 + k + 1 > 2 && (g1, k + 1) != (g, n) {
                v.push((g1, k + 1));
            }
        }
    }
    v.sort_unstable();
    v.dedup();
    v
}
