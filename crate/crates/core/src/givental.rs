//! Frobenius data of equivariant quantum cohomology of P^1 at t0 = 0 with
//! Novikov variable absorbed into q.

use num_rational::BigRational;

use crate::algebra::{bernoulli, Field, TruncSeries, Var};
use crate::curve::{derive_params, CurveParams};
use crate::error::{Error, Result};

/// a + b H
#[derive(Clone, Debug, PartialEq)]
pub struct Coh<F> {
    pub a: F,
    pub b: F,
}

impl<F: Field> Coh<F> {
    pub fn new(a: F, b: F) -> Self {
        Coh { a, b }
    }
    pub fn one() -> Self {
        Coh { a: F::one(), b: F::zero() }
    }
    pub fn h() -> Self {
        Coh { a: F::zero(), b: F::one() }
    }
    pub fn add(&self, o: &Self) -> Self {
        Coh { a: self.a.fadd(&o.a), b: self.b.fadd(&o.b) }
    }
    pub fn scale(&self, c: &F) -> Self {
        Coh { a: self.a.fmul(c), b: self.b.fmul(c) }
    }
}

/// a + b H with a, b series in w = 1/z, in the classical ring
/// F[H]/((H - w1)(H - w2)).
#[derive(Clone, Debug)]
pub struct CohSeries<F> {
    pub a: TruncSeries<F>,
    pub b: TruncSeries<F>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusPoint<F> {
    pub params: CurveParams<F>,
    /// eigenvalue of H* on phi_alpha, (w1 + w2 + Delta^alpha)/2
    pub du: [F; 2],
}

impl<F: Field> FrobeniusPoint<F> {
    pub fn new(w1: F, w2: F, sigma: F) -> Result<Self> {
        Self::from_params(derive_params(w1, w2, sigma)?)
    }

    pub fn from_params(params: CurveParams<F>) -> Result<Self> {
        let half = F::one().fdiv(&F::from_int(2))?;
        let s = params.w1.fadd(&params.w2);
        let du = [0, 1].map(|a| s.fadd(&params.delta[a]).fmul(&half));
        Ok(FrobeniusPoint { params, du })
    }

    pub fn q(&self) -> &F {
        &self.params.q
    }

    fn sum_w(&self) -> F {
        self.params.w1.fadd(&self.params.w2)
    }

    fn prod_w(&self) -> F {
        self.params.w1.fmul(&self.params.w2)
    }

    /// H * H = (w1 + w2) H - w1 w2 + q
    pub fn quantum_product(&self, x: &Coh<F>, y: &Coh<F>) -> Coh<F> {
        let hh = x.b.fmul(&y.b);
        Coh {
            a: x.a.fmul(&y.a).fadd(&hh.fmul(&self.params.q.fsub(&self.prod_w()))),
            b: x.a.fmul(&y.b).fadd(&x.b.fmul(&y.a)).fadd(&hh.fmul(&self.sum_w())),
        }
    }

    /// Equivariant Poincare pairing: (1,1) = 0, (1,H) = 1, (H,H) = w1 + w2.
    pub fn pairing(&self, x: &Coh<F>, y: &Coh<F>) -> F {
        x.a.fmul(&y.b)
            .fadd(&x.b.fmul(&y.a))
            .fadd(&x.b.fmul(&y.b).fmul(&self.sum_w()))
    }

    /// Quantum idempotent phi_alpha(q).
    pub fn idempotent(&self, alpha: usize) -> Result<Coh<F>> {
        let other = &self.du[1 - alpha];
        let den = self.du[alpha].fsub(other).finv()?;
        Ok(Coh { a: other.fneg().fmul(&den), b: den })
    }

    /// Psi[i][alpha] = Psi_i^alpha, i = 0 for 1 and i = 1 for H.
    pub fn psi(&self) -> Result<[[F; 2]; 2]> {
        let inv = [0, 1].map(|a| self.params.sqrt_delta[a].finv());
        let inv = [inv[0].clone()?, inv[1].clone()?];
        Ok([
            [inv[0].clone(), inv[1].clone()],
            [self.du[0].fmul(&inv[0]), self.du[1].fmul(&inv[1])],
        ])
    }

    /// PsiInv[alpha][i] = (Psi^-1)_alpha^i.
    pub fn psi_inv(&self) -> Result<[[F; 2]; 2]> {
        let mut out: [[F; 2]; 2] = [[F::zero(), F::zero()], [F::zero(), F::zero()]];
        let two = F::from_int(2);
        for a in 0..2 {
            let sd = &self.params.sqrt_delta[a];
            out[a][0] = self.params.delta[a].fsub(&self.sum_w()).fdiv(&two.fmul(sd))?;
            out[a][1] = sd.finv()?;
        }
        Ok(out)
    }

    fn ring_mul(&self, x: &CohSeries<F>, y: &CohSeries<F>) -> CohSeries<F> {
        let bb = x.b.mul(&y.b);
        CohSeries {
            a: x.a.mul(&y.a).sub(&bb.scale(&self.prod_w())),
            b: x.a.mul(&y.b).add(&x.b.mul(&y.a)).add(&bb.scale(&self.sum_w())),
        }
    }

    fn ring_inv(&self, x: &CohSeries<F>) -> Result<CohSeries<F>> {
        // (a + bH)(a + b(w1 + w2) - bH) = a^2 + ab(w1 + w2) + b^2 w1 w2
        let conj_a = x.a.add(&x.b.scale(&self.sum_w()));
        let norm = x.a.mul(&conj_a).add(&x.b.mul(&x.b).scale(&self.prod_w()));
        let ni = norm.inv()?;
        Ok(CohSeries { a: conj_a.mul(&ni), b: x.b.neg().mul(&ni) })
    }

    /// J_d, the coefficient of q^d in J at t = 0, as a series in w = 1/z known below w^order.
    pub fn j_terms(&self, dmax: usize, order: i64) -> Result<Vec<CohSeries<F>>> {
        let one = CohSeries {
            a: TruncSeries::one(Var::W, order),
            b: TruncSeries::zero(Var::W, order),
        };
        let mut out = vec![one.clone()];
        let mut cur = one;
        for m in 1..=dmax as i64 {
            for wk in [&self.params.w1, &self.params.w2] {
                // 1/(H - wk + m z) = w / (m + (H - wk) w)
                let fac = CohSeries {
                    a: TruncSeries::new(Var::W, 0, vec![F::from_int(m), wk.fneg()], order),
                    b: TruncSeries::monomial(Var::W, F::one(), 1, order),
                };
                let inv = self.ring_inv(&fac)?;
                cur = self.ring_mul(&cur, &CohSeries { a: inv.a.shift(1), b: inv.b.shift(1) });
            }
            out.push(CohSeries { a: cur.a.truncate(order), b: cur.b.truncate(order) });
        }
        Ok(out)
    }

    /// Flat matrix M[i][j] = (z d_i J, T_j) at the point, as series in w = 1/z.
    pub fn flat_s(&self, order: i64) -> Result<[[TruncSeries<F>; 2]; 2]> {
        let dmax = (order.max(0) as usize) / 2 + 1;
        let terms = self.j_terms(dmax, order + 1)?;
        let mut j = CohSeries { a: TruncSeries::zero(Var::W, order), b: TruncSeries::zero(Var::W, order) };
        let mut dj = j.clone();
        let mut qd = F::one();
        let h = CohSeries {
            a: TruncSeries::zero(Var::W, crate::algebra::EXACT),
            b: TruncSeries::one(Var::W, crate::algebra::EXACT),
        };
        for (d, t) in terms.iter().enumerate() {
            let ts = CohSeries { a: t.a.scale(&qd), b: t.b.scale(&qd) };
            j.a = j.a.add(&ts.a);
            j.b = j.b.add(&ts.b);
            // z d_1 acts as H + d z on the q^d term
            let ht = self.ring_mul(&h, &ts);
            let dz = F::from_int(d as i64);
            dj.a = dj.a.add(&ht.a).add(&ts.a.shift(-1).scale(&dz));
            dj.b = dj.b.add(&ht.b).add(&ts.b.shift(-1).scale(&dz));
            qd = qd.fmul(&self.params.q);
        }
        let pair = |x: &CohSeries<F>, j: usize| -> TruncSeries<F> {
            if j == 0 {
                x.b.truncate(order)
            } else {
                x.a.add(&x.b.scale(&self.sum_w())).truncate(order)
            }
        };
        Ok([[pair(&j, 0), pair(&j, 1)], [pair(&dj, 0), pair(&dj, 1)]])
    }

    /// S in the normalized canonical basis, S[g][a] = S^{g-hat}_{a-hat}.
    pub fn normalized_s(&self, order: i64) -> Result<[[TruncSeries<F>; 2]; 2]> {
        let m = self.flat_s(order)?;
        let pi = self.psi_inv()?;
        let mut out: Vec<Vec<TruncSeries<F>>> = Vec::new();
        for g in 0..2 {
            let mut row = Vec::new();
            for a in 0..2 {
                let mut acc = TruncSeries::zero(Var::W, order);
                for i in 0..2 {
                    for j in 0..2 {
                        acc = acc.add(&m[i][j].scale(&pi[g][i].fmul(&pi[a][j])));
                    }
                }
                row.push(acc);
            }
            out.push(row);
        }
        let mut it = out.into_iter().map(|r| {
            let mut r = r.into_iter();
            [r.next().unwrap(), r.next().unwrap()]
        });
        Ok([it.next().unwrap(), it.next().unwrap()])
    }

    /// [z^-2d] (J_d, H): the genus-0 one-point invariant <tau_{2d-2}(H)>_{0,1,d}.
    pub fn one_point(&self, d: usize) -> Result<F> {
        let order = 2 * d as i64 + 1;
        let t = self.j_terms(d, order)?;
        t[d].a.add(&t[d].b.scale(&self.sum_w())).coeff(2 * d as i64)
    }
}

/// exp(-sum_n B_2n / (2n (2n-1)) (z/chi)^(2n-1)) as a series in z.
pub fn bernoulli_exp<F: Field>(chi: &F, order: i64) -> Result<TruncSeries<F>> {
    if chi.is_zero() {
        return Err(Error::InvalidInput("Bernoulli normalization needs an equivariant point".into()));
    }
    let ci = chi.finv()?;
    let mut c = vec![F::zero(); order.max(1) as usize];
    let mut n = 1usize;
    while (2 * n - 1) < order as usize {
        let b = bernoulli(2 * n);
        let den = BigRational::from_integer(((2 * n) * (2 * n - 1)).into());
        let coeff = F::from_rational(&(-b / den)).fmul(&ci.fpow(2 * n as u32 - 1));
        c[2 * n - 1] = coeff;
        n += 1;
    }
    TruncSeries::new(Var::Z, 0, c, order).exp()
}

/// Bernoulli-normalized S at q = 0, t = 0: out[i][alpha] = (T_i|_alpha / sqrt(chi^alpha)) times
/// the Bernoulli factor in chi^alpha, with chi^1 = w1 - w2, chi^2 = -chi^1, sqrt(chi^2) = i sqrt(chi^1).
pub fn s_tilde_q0<F: Field>(w1: &F, w2: &F, sqrt_chi1: &F, order: i64) -> Result<[[TruncSeries<F>; 2]; 2]> {
    let chi1 = w1.fsub(w2);
    if sqrt_chi1.fmul(sqrt_chi1) != chi1 {
        return Err(Error::InvalidInput("sqrt_chi1 does not square to w1 - w2".into()));
    }
    let i = F::from_base(&crate::algebra::BaseNumber::i());
    let chi = [chi1.clone(), chi1.fneg()];
    let sq = [sqrt_chi1.clone(), i.fmul(sqrt_chi1)];
    let w = [w1.clone(), w2.clone()];
    let col = |a: usize, t: &F| -> Result<TruncSeries<F>> { Ok(bernoulli_exp(&chi[a], order)?.scale(&t.fdiv(&sq[a])?)) };
    Ok([
        [col(0, &F::one())?, col(1, &F::one())?],
        [col(0, &w[0])?, col(1, &w[1])?],
    ])
}
