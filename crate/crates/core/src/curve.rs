//! The spectral curve x = Y + q/Y + w1 log Y + w2 log(q/Y) and its
//! Lambert-type degeneration x = Y + w1 log Y, with local data at the
//! branch points.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{BaseNumber as K, Field, Poly, RatFunc, TruncSeries, Var};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CurveKind {
    P1,
    LogLine,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::P1 => "p1",
            CurveKind::LogLine => "lambert",
        }
    }
}

/// Parameters and the quantities derived from them. Index 0 is the first
/// branch point, index 1 the second.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveParams<F> {
    pub w1: F,
    pub w2: F,
    pub sigma: F,
    pub q: F,
    pub delta: [F; 2],
    pub sqrt_delta: [F; 2],
    pub chi: [F; 2],
    pub p: [F; 2],
}

/// q, Delta, chi and the critical points for the equivariant curve.
pub fn derive_params<F: Field>(w1: F, w2: F, sigma: F) -> Result<CurveParams<F>> {
    if sigma.is_zero() {
        return Err(Error::Degenerate("sigma = 0".into()));
    }
    let chi1 = w1.fsub(&w2);
    let s2 = sigma.fmul(&sigma);
    let q = s2.fmul(&s2).fsub(&chi1.fmul(&chi1)).fdiv(&F::from_int(4))?;
    if q.is_zero() {
        return Err(Error::Degenerate("q = 0".into()));
    }
    let i = F::from_base(&K::i());
    let half = F::from_base(&K::ratio(1, 2));
    let p1 = chi1.fneg().fadd(&s2).fmul(&half);
    let p2 = chi1.fneg().fsub(&s2).fmul(&half);
    if p1 == p2 || p1.is_zero() || p2.is_zero() {
        return Err(Error::Degenerate("coincident or vanishing critical points".into()));
    }
    Ok(CurveParams {
        q,
        delta: [s2.clone(), s2.fneg()],
        sqrt_delta: [sigma.clone(), i.fmul(&sigma)],
        chi: [chi1.clone(), chi1.fneg()],
        p: [p1, p2],
        w1,
        w2,
        sigma,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCurve<F> {
    pub kind: CurveKind,
    pub params: CurveParams<F>,
}

impl<F: Field> SpectralCurve<F> {
    pub fn p1(w1: F, w2: F, sigma: F) -> Result<Self> {
        Ok(SpectralCurve { kind: CurveKind::P1, params: derive_params(w1, w2, sigma)? })
    }

    /// x = Y + w1 log Y with sigma^2 = w1; branch point Y = -w1.
    pub fn log_line(w1: F, sigma: F) -> Result<Self> {
        if w1.is_zero() {
            return Err(Error::Degenerate("w1 = 0 on the Lambert curve".into()));
        }
        if sigma.fmul(&sigma) != w1 {
            return Err(Error::InvalidInput("Lambert curve needs sigma^2 = w1".into()));
        }
        let i = F::from_base(&K::i());
        let p = w1.fneg();
        let params = CurveParams {
            w2: F::zero(),
            q: F::zero(),
            delta: [p.clone(), p.clone()],
            sqrt_delta: [i.fmul(&sigma), i.fmul(&sigma)],
            chi: [w1.clone(), w1.clone()],
            p: [p.clone(), p],
            w1,
            sigma,
        };
        Ok(SpectralCurve { kind: CurveKind::LogLine, params })
    }

    pub fn num_branch_points(&self) -> usize {
        match self.kind {
            CurveKind::P1 => 2,
            CurveKind::LogLine => 1,
        }
    }

    pub fn branch_point(&self, alpha: usize) -> &F {
        &self.params.p[alpha]
    }

    pub fn sqrt_delta(&self, alpha: usize) -> &F {
        &self.params.sqrt_delta[alpha]
    }

    /// Coefficient of the logarithmic term of x in a neighbourhood of a branch point.
    fn log_coeff(&self) -> F {
        match self.kind {
            CurveKind::P1 => self.params.w1.fsub(&self.params.w2),
            CurveKind::LogLine => self.params.w1.clone(),
        }
    }

    /// dx / dY as a rational function of Y.
    pub fn dx(&self) -> RatFunc<F> {
        let y = Poly::monomial(F::one(), 1);
        match self.kind {
            CurveKind::P1 => {
                let n = Poly::linear_root(&self.params.p[0]).mul(&Poly::linear_root(&self.params.p[1]));
                RatFunc::new(n, y.mul(&y)).expect("nonzero den")
            }
            CurveKind::LogLine => RatFunc::new(
                Poly::new(vec![self.params.w1.clone(), F::one()]),
                y,
            )
            .expect("nonzero den"),
        }
    }

    /// Local frame at branch point `alpha` with Y(zeta) known below zeta^order.
    pub fn local_frame(&self, alpha: usize, order: usize) -> Result<LocalFrame<F>> {
        if order < 2 {
            return Err(Error::InvalidInput("local frame order must be at least 2".into()));
        }
        if alpha >= self.num_branch_points() {
            return Err(Error::InvalidInput(format!("no branch point {}", alpha + 1)));
        }
        let n = order as i64;
        let p = self.params.p[alpha].clone();
        let pinv = p.finv()?;
        let c = self.log_coeff();
        let q = self.params.q.clone();
        // -(x - x(P)) / u^2, needed below u^(n-1)
        let mut g = Vec::with_capacity(order);
        let mut pk = pinv.clone();
        for k in 1..=(order + 1) {
            pk = pk.fmul(&pinv);
            let sign = if k % 2 == 0 { F::one() } else { F::one().fneg() };
            let qt = q.fmul(&sign).fmul(&pk);
            let lt = c
                .fmul(&sign.fneg())
                .fmul(&pk.fmul(&p))
                .fdiv(&F::from_int(k as i64))?;
            let lin = if k == 1 { F::one() } else { F::zero() };
            if k >= 2 {
                g.push(qt.fadd(&lt).fadd(&lin).fneg());
            } else if !qt.fadd(&lt).fadd(&lin).is_zero() {
                return Err(Error::Convention("branch point is not a critical point".into()));
            }
        }
        let gs = TruncSeries::new(Var::U, 0, g, n);
        let i = F::from_base(&K::i());
        let rt2 = F::from_base(&K::sqrt2());
        let c1 = i.fmul(&p).fmul(&rt2).fdiv(&self.params.sqrt_delta[alpha])?;
        let zeta_of_u = gs.sqrt_with(&c1.finv()?)?.shift(1);
        let u_of_zeta = zeta_of_u.reversion()?.with_var(Var::Zeta);
        let y = u_of_zeta.add(&TruncSeries::constant(Var::Zeta, p.clone(), n));
        let logs = u_of_zeta.scale(&pinv).log1p()?;
        let h: Vec<F> = (0..order as i64).map(|k| logs.coeff_lenient(k).fneg()).collect();
        Ok(LocalFrame { alpha, order, c1, u: u_of_zeta, y, h })
    }

    /// Canonical JSON echo of the defining parameters.
    pub fn params_json(&self) -> Value {
        match self.kind {
            CurveKind::P1 => json!({
                "kind": "p1",
                "w1": self.params.w1.to_json(),
                "w2": self.params.w2.to_json(),
                "sigma": self.params.sigma.to_json(),
            }),
            CurveKind::LogLine => json!({
                "kind": "lambert",
                "w1": self.params.w1.to_json(),
                "sigma": self.params.sigma.to_json(),
            }),
        }
    }

    /// sha256 of the canonical parameter echo.
    pub fn fingerprint(&self) -> String {
        let s = serde_json::to_string(&self.params_json()).expect("json");
        hex::encode(Sha256::digest(s.as_bytes()))
    }

    pub fn is_non_equivariant(&self) -> bool {
        self.kind == CurveKind::P1 && self.params.w1.is_zero() && self.params.w2.is_zero()
    }
}

impl SpectralCurve<K> {
    /// x = Y - log Y.
    pub fn lambert() -> Self {
        Self::log_line(K::from_i64(-1), K::i()).expect("valid Lambert curve")
    }
}

/// Local data at one branch point: Y(zeta) with x = u - zeta^2 and
/// log Y = log P - sum h_k zeta^k.
#[derive(Clone, Debug)]
pub struct LocalFrame<F> {
    pub alpha: usize,
    pub order: usize,
    /// dY/dzeta at zeta = 0.
    pub c1: F,
    /// Y(zeta) - P
    pub u: TruncSeries<F>,
    pub y: TruncSeries<F>,
    /// h[k] for 1 <= k < order; h[0] = 0.
    pub h: Vec<F>,
}

impl<F: Field> LocalFrame<F> {
    /// Pullback of f(Y) dY to a series in zeta times dzeta. Exact below
    /// zeta^(order - 1 - m) for a pole of order m at the branch point.
    pub fn expand(&self, f: &RatFunc<F>, p: &F) -> Result<TruncSeries<F>> {
        let fu = f.expand_at(p, Var::U, self.order as i64)?;
        Ok(fu.compose(&self.u)?.mul(&self.u.derivative()))
    }
}
