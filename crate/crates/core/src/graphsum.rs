//! Stable graphs and the Givental graph sum, with leaves either symbolic
//! (a coefficient table) or realized as forms on the curve.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{factorial, BaseNumber as K, Field};
use crate::error::{Error, Result};
use crate::forms::{FormSystem, PoleTensor, Slot};
use crate::givental::FrobeniusPoint;
use crate::intersections::tau_or_zero;
use crate::rmatrix::{dilaton_weights, edge_weights, r_from_curve, EdgeWeight, RMatrix};

/// Connected stable graph with vertex genera, edges (self-loops allowed) and
/// ordered leaves; no dilaton leaves, markings or heights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableGraph {
    pub genus: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub leaves: Vec<usize>,
    /// order of the automorphism group fixing leaves
    pub aut: u64,
}

impl StableGraph {
    pub fn num_vertices(&self) -> usize {
        self.genus.len()
    }

    /// number of half-edges and leaves at v
    pub fn valence(&self, v: usize) -> usize {
        let e: usize = self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum();
        e + self.leaves.iter().filter(|&&l| l == v).count()
    }

    pub fn total_genus(&self) -> usize {
        self.genus.iter().sum::<usize>() + self.edges.len() + 1 - self.num_vertices()
    }

    pub fn is_stable(&self) -> bool {
        (0..self.num_vertices()).all(|v| 2 * self.genus[v] + self.valence(v) > 2)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    fn multiplicity(&self, a: usize, b: usize) -> usize {
        let (a, b) = (a.min(b), a.max(b));
        self.edges.iter().filter(|&&(x, y)| (x.min(y), x.max(y)) == (a, b)).count()
    }

    fn key(&self, perm: &[usize]) -> (Vec<usize>, Vec<(usize, usize)>, Vec<usize>) {
        let n = perm.len();
        let mut genus = vec![0; n];
        for v in 0..n {
            genus[perm[v]] = self.genus[v];
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b])))
            .collect();
        edges.sort();
        let leaves = self.leaves.iter().map(|&l| perm[l]).collect();
        (genus, edges, leaves)
    }

    fn canonical(&self) -> (Vec<usize>, Vec<(usize, usize)>, Vec<usize>) {
        permutations(self.num_vertices())
            .into_iter()
            .map(|p| self.key(&p))
            .min()
            .expect("at least one vertex")
    }

    fn automorphisms(&self) -> u64 {
        let id = self.key(&(0..self.num_vertices()).collect::<Vec<_>>());
        let vperms = permutations(self.num_vertices()).into_iter().filter(|p| self.key(p) == id).count() as u64;
        let mut aut = vperms;
        let n = self.num_vertices();
        for a in 0..n {
            for b in a..n {
                let m = self.multiplicity(a, b) as u64;
                let f = factorial(m).try_into().unwrap_or(u64::MAX);
                aut *= f;
                if a == b {
                    aut *= 1 << m;
                }
            }
        }
        aut
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn multisets(items: &[(usize, usize)], k: usize, start: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    if k == 0 {
        out.push(cur.clone());
        return;
    }
    for i in start..items.len() {
        cur.push(items[i]);
        multisets(items, k - 1, i, cur, out);
        cur.pop();
    }
}

fn tuples(n: usize, base: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..base).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn check_stable(g: usize, n: usize) -> Result<()> {
    if 2 * g + n <= 2 {
        return Err(Error::Unstable { g, n });
    }
    Ok(())
}

/// All stable graphs of genus g with n ordered leaves, one per isomorphism class.
pub fn enumerate_graphs(g: usize, n: usize) -> Result<Vec<StableGraph>> {
    check_stable(g, n)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for nv in 1..=(2 * g + n - 2) {
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|a| (a..nv).map(move |b| (a, b))).collect();
        for genus in tuples(nv, g + 1) {
            let sg: usize = genus.iter().sum();
            if sg > g {
                continue;
            }
            let ne = g + nv - 1 - sg;
            let mut edge_sets = Vec::new();
            multisets(&pairs, ne, 0, &mut Vec::new(), &mut edge_sets);
            for edges in &edge_sets {
                for leaves in tuples(n, nv) {
                    let gr = StableGraph { genus: genus.clone(), edges: edges.clone(), leaves, aut: 1 };
                    if !gr.is_connected() || !gr.is_stable() {
                        continue;
                    }
                    let c = gr.canonical();
                    if seen.insert(c.clone()) {
                        let mut gr = StableGraph { genus: c.0, edges: c.1, leaves: c.2, aut: 1 };
                        gr.aut = gr.automorphisms();
                        out.push(gr);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Weights entering the ancestor graph sum.
#[derive(Clone, Debug)]
pub struct GraphWeights<F> {
    pub sqrt_delta: Vec<F>,
    pub edge: EdgeWeight<F>,
    /// dilaton leaf weights, index [beta][k]
    pub dilaton: Vec<Vec<F>>,
    pub kmax: usize,
}

impl<F: Field> GraphWeights<F> {
    pub fn new(r: &RMatrix<F>, sqrt_delta: Vec<F>, kmax: usize) -> Result<Self> {
        let edge = edge_weights(r, kmax)?;
        let dilaton = dilaton_weights(r, &sqrt_delta, kmax)?;
        Ok(GraphWeights { sqrt_delta, edge, dilaton, kmax })
    }

    /// R order needed for graphs of type (g, n).
    pub fn order_for(g: usize, n: usize) -> usize {
        2 * Self::kmax_for(g, n) + 2
    }

    pub fn kmax_for(g: usize, n: usize) -> usize {
        // one dilaton leaf at a single vertex carries the largest height
        (3 * g + n).saturating_sub(2)
    }
}

/// Leaf key: (marking, height) for each ordered leaf.
pub type LeafKey = Vec<(usize, usize)>;

/// Per-vertex local configuration.
struct VertexConfig<F> {
    /// heights of the vertex's half-edges in the order given by `slots`
    heights: Vec<usize>,
    factor: F,
}

fn compositions(total: usize, parts: usize, min: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    if total < min * parts {
        return out;
    }
    for first in min..=(total - min * (parts - 1)) {
        for mut rest in compositions(total - first, parts - 1, min) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn vertex_configs<F: Field>(gv: usize, r: usize, beta: usize, w: &GraphWeights<F>) -> Result<Vec<VertexConfig<F>>> {
    let mut out = Vec::new();
    let max_m = (3 * gv + r).saturating_sub(3);
    for m in 0..=max_m {
        let dim = 3 * gv + r + m;
        if dim < 3 {
            continue;
        }
        let dim = dim - 3;
        let sd = w.sqrt_delta[beta].fpow((2 * gv + r + m - 2) as u32);
        let inv_mfact = F::from_rational(&num_rational::BigRational::new(1.into(), factorial(m as u64)));
        for dsum in (2 * m)..=dim {
            for dil in compositions(dsum, m, 2) {
                let mut dfac = inv_mfact.clone();
                for &k in &dil {
                    if k > w.kmax {
                        return Err(Error::Truncation { needed: k as i64, order: w.kmax as i64 });
                    }
                    dfac = dfac.fmul(&w.dilaton[beta][k]);
                }
                if dfac.is_zero() {
                    continue;
                }
                for hs in compositions(dim - dsum, r, 0) {
                    let mut all = hs.clone();
                    all.extend_from_slice(&dil);
                    let t = tau_or_zero(gv, &all);
                    if t == num_rational::BigRational::from_integer(0.into()) {
                        continue;
                    }
                    let factor = sd.fmul(&F::from_rational(&t)).fmul(&dfac);
                    out.push(VertexConfig { heights: hs, factor });
                }
            }
        }
    }
    Ok(out)
}

enum HalfEdge {
    Edge(usize, usize),
    Leaf(usize),
}

/// Sum over all decorations of one graph, accumulated by leaf key.
fn graph_table<F: Field>(gr: &StableGraph, w: &GraphWeights<F>, out: &mut BTreeMap<LeafKey, F>) -> Result<()> {
    let nv = gr.num_vertices();
    // half-edges at each vertex
    let mut halves: Vec<Vec<HalfEdge>> = (0..nv).map(|_| Vec::new()).collect();
    for (i, &(a, b)) in gr.edges.iter().enumerate() {
        halves[a].push(HalfEdge::Edge(i, 0));
        halves[b].push(HalfEdge::Edge(i, 1));
    }
    for (j, &v) in gr.leaves.iter().enumerate() {
        halves[v].push(HalfEdge::Leaf(j));
    }
    let aut_inv = F::one().fdiv(&F::from_int(gr.aut as i64))?;
    let n = gr.leaves.len();
    for marking in tuples(nv, w.sqrt_delta.len()) {
        let configs = (0..nv)
            .map(|v| vertex_configs(gr.genus[v], halves[v].len(), marking[v], w))
            .collect::<Result<Vec<_>>>()?;
        if configs.iter().any(|c| c.is_empty()) {
            continue;
        }
        let total: usize = configs.iter().map(|c| c.len()).product();
        let mut choice = vec![0usize; nv];
        for idx in 0..total {
            let mut rem = idx;
            for v in 0..nv {
                choice[v] = rem % configs[v].len();
                rem /= configs[v].len();
            }
            let mut val = aut_inv.clone();
            let mut eh = vec![[0usize; 2]; gr.edges.len()];
            let mut key: LeafKey = vec![(0, 0); n];
            for v in 0..nv {
                let c = &configs[v][choice[v]];
                val = val.fmul(&c.factor);
                for (h, &k) in halves[v].iter().zip(&c.heights) {
                    match *h {
                        HalfEdge::Edge(i, s) => eh[i][s] = k,
                        HalfEdge::Leaf(j) => key[j] = (marking[v], k),
                    }
                }
            }
            for (i, &(a, b)) in gr.edges.iter().enumerate() {
                if val.is_zero() {
                    break;
                }
                let (k, l) = (eh[i][0], eh[i][1]);
                if k > w.kmax || l > w.kmax {
                    return Err(Error::Truncation { needed: k.max(l) as i64, order: w.kmax as i64 });
                }
                val = val.fmul(&w.edge.get(marking[a], k, marking[b], l));
            }
            if !val.is_zero() {
                let e = out.entry(key).or_insert_with(F::zero);
                *e = e.fadd(&val);
            }
        }
    }
    Ok(())
}

/// Coefficient of each product of leaves in the ancestor graph sum of type (g, n).
pub fn coefficient_table<F: Field>(g: usize, n: usize, w: &GraphWeights<F>) -> Result<BTreeMap<LeafKey, F>> {
    let graphs = enumerate_graphs(g, n)?;
    let parts = graphs
        .par_iter()
        .map(|gr| {
            let mut m = BTreeMap::new();
            graph_table(gr, w, &mut m)?;
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out: BTreeMap<LeafKey, F> = BTreeMap::new();
    for m in parts {
        for (k, v) in m {
            let e = out.entry(k).or_insert_with(F::zero);
            *e = e.fadd(&v);
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// Contracts a coefficient table with per-variable leaf vectors:
/// leaves[j][beta][k] is a linear combination of basis slots.
pub fn contract<F: Field>(
    g: usize,
    n: usize,
    table: &BTreeMap<LeafKey, F>,
    leaves: &[Vec<Vec<BTreeMap<Slot, F>>>],
) -> Result<PoleTensor<F>> {
    let mut t = PoleTensor::zero(g, n);
    for (key, c) in table {
        let mut partial: Vec<(Vec<Slot>, F)> = vec![(Vec::new(), c.clone())];
        for (j, &(beta, k)) in key.iter().enumerate() {
            let lv = leaves[j]
                .get(beta)
                .and_then(|row| row.get(k))
                .ok_or(Error::Truncation { needed: k as i64, order: leaves[j][beta].len() as i64 })?;
            let mut next = Vec::new();
            for (slots, a) in &partial {
                for (s, b) in lv {
                    let mut sl = slots.clone();
                    sl.push(*s);
                    next.push((sl, a.fmul(b)));
                }
            }
            partial = next;
        }
        for (slots, v) in partial {
            t.add_term(slots, v);
        }
    }
    Ok(t)
}

/// Leaf forms (1/sqrt(-2)) sum_{i, gamma} [z^(k-i)] R_gamma^beta(-z) W^gamma_i in the
/// dxi basis, indexed [beta][k].
pub fn leaf_forms<F: Field>(forms: &FormSystem<F>, r: &RMatrix<F>, kmax: usize) -> Result<Vec<Vec<BTreeMap<Slot, F>>>> {
    let nb = forms.num_branch_points();
    let sqrt_m2 = F::from_base(&(K::i() * K::sqrt2()));
    let pref = sqrt_m2.finv()?;
    let ws = (0..nb)
        .map(|g| (0..=kmax).map(|i| forms.decompose(&forms.w_form(g, i)?)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    (0..nb)
        .map(|beta| {
            (0..=kmax)
                .map(|k| {
                    let mut acc: BTreeMap<Slot, F> = BTreeMap::new();
                    for i in 0..=k {
                        let e = (k - i) as i64;
                        let sgn = if e % 2 == 0 { F::one() } else { F::from_int(-1) };
                        for gm in 0..nb {
                            let c = r.r[gm][beta].coeff(e)?.fmul(&sgn).fmul(&pref);
                            if c.is_zero() {
                                continue;
                            }
                            for (s, v) in &ws[gm][i] {
                                let x = acc.entry(*s).or_insert_with(F::zero);
                                *x = x.fadd(&v.fmul(&c));
                            }
                        }
                    }
                    acc.retain(|_, v| !v.is_zero());
                    Ok(acc)
                })
                .collect()
        })
        .collect()
}

/// omega_{g,n} from the graph sum: (-1)^(g-1+n) times the ancestor sum with
/// leaves realized as forms.
pub fn omega_via_graphs<F: Field>(forms: &FormSystem<F>, r: &RMatrix<F>, g: usize, n: usize) -> Result<PoleTensor<F>> {
    check_stable(g, n)?;
    let kmax = GraphWeights::<F>::kmax_for(g, n);
    let nb = forms.num_branch_points();
    let sd = (0..nb).map(|a| forms.curve.sqrt_delta(a).clone()).collect();
    let w = GraphWeights::new(r, sd, kmax)?;
    let table = coefficient_table(g, n, &w)?;
    let lf = leaf_forms(forms, r, kmax)?;
    let leaves = vec![lf; n];
    let t = contract(g, n, &table, &leaves)?;
    let rho = vertex_ratio(forms)?;
    let mut c = rho.fpow(2 * g as u32).finv()?.fmul(&rho.fmul(&rho));
    if (g + n) % 2 == 0 {
        c = c.fneg();
    }
    Ok(t.scale(&c))
}

/// rho = h^alpha_1 sqrt(Delta^alpha) / sqrt(2), the ratio between the curve's
/// vertex factor h_1/sqrt(2) and 1/sqrt(Delta). Must agree at all branch points.
pub fn vertex_ratio<F: Field>(forms: &FormSystem<F>) -> Result<F> {
    let s2 = F::from_base(&K::sqrt2());
    let mut rho: Option<F> = None;
    for a in 0..forms.num_branch_points() {
        let h1 = forms.frame(a, 8)?.h[1].clone();
        let r = h1.fmul(forms.curve.sqrt_delta(a)).fdiv(&s2)?;
        match &rho {
            None => rho = Some(r),
            Some(x) if *x == r => {}
            Some(_) => return Err(Error::Convention("vertex ratio differs between branch points".into())),
        }
    }
    rho.ok_or_else(|| Error::Degenerate("no branch points".into()))
}

/// One descendant insertion c z^a T_i with T_0 = 1, T_1 = H.
#[derive(Clone, Debug, PartialEq)]
pub struct Insertion<F> {
    pub flat: usize,
    pub a: usize,
    pub coeff: F,
}

/// Descendant leaf [z^k] sum_g [sum_j c z^a (Psi^-1)_g^j S_{j,i}(z)]_+ R_g^beta(-z), indexed [beta][k].
pub fn descendant_leaf<F: Field>(
    p: &FrobeniusPoint<F>,
    r: &RMatrix<F>,
    u: &[Insertion<F>],
    kmax: usize,
) -> Result<Vec<Vec<F>>> {
    let amax = u.iter().map(|x| x.a).max().unwrap_or(0);
    let m = p.flat_s(amax as i64 + 1)?;
    let pinv = p.psi_inv()?;
    // v_g(z) = [sum c z^a (Psi^-1 M)_{g,i}]_+ as a polynomial in z
    let mut v = vec![vec![F::zero(); amax + 1]; 2];
    for ins in u {
        for g in 0..2 {
            for j in 0..2 {
                let pj = pinv[g][j].fmul(&ins.coeff);
                for e in 0..=ins.a {
                    let c = m[j][ins.flat].coeff(e as i64)?.fmul(&pj);
                    v[g][ins.a - e] = v[g][ins.a - e].fadd(&c);
                }
            }
        }
    }
    (0..2)
        .map(|beta| {
            (0..=kmax)
                .map(|k| {
                    let mut acc = F::zero();
                    for g in 0..2 {
                        for (e, c) in v[g].iter().enumerate().take(k + 1) {
                            let d = (k - e) as i64;
                            let sgn = if d % 2 == 0 { F::one() } else { F::from_int(-1) };
                            acc = acc.fadd(&c.fmul(&r.r[g][beta].coeff(d)?).fmul(&sgn));
                        }
                    }
                    Ok(acc)
                })
                .collect()
        })
        .collect()
}

/// F_{g,n}(u_1, ..., u_n) at t = 0 from the descendant graph sum.
pub fn descendant_sum<F: Field>(
    p: &FrobeniusPoint<F>,
    r: &RMatrix<F>,
    g: usize,
    inputs: &[Vec<Insertion<F>>],
) -> Result<F> {
    let n = inputs.len();
    check_stable(g, n)?;
    let kmax = GraphWeights::<F>::kmax_for(g, n);
    let sd = p.params.sqrt_delta.to_vec();
    let w = GraphWeights::new(r, sd, kmax)?;
    let table = coefficient_table(g, n, &w)?;
    let leaves = inputs.iter().map(|u| descendant_leaf(p, r, u, kmax)).collect::<Result<Vec<_>>>()?;
    contract_scalar(&table, &leaves)
}

/// Contracts a coefficient table with scalar leaves leaves[j][beta][k].
pub fn contract_scalar<F: Field>(table: &BTreeMap<LeafKey, F>, leaves: &[Vec<Vec<F>>]) -> Result<F> {
    let mut acc = F::zero();
    for (key, c) in table {
        let mut t = c.clone();
        for (j, &(beta, k)) in key.iter().enumerate() {
            let l = leaves[j][beta]
                .get(k)
                .ok_or(Error::Truncation { needed: k as i64, order: leaves[j][beta].len() as i64 })?;
            t = t.fmul(l);
            if t.is_zero() {
                break;
            }
        }
        acc = acc.fadd(&t);
    }
    Ok(acc)
}

/// Startup check of the recursion's global sign: omega_{0,3} from the
/// recursion must equal the graph sum.
pub fn sign_self_test<F: Field>(forms: &Arc<FormSystem<F>>) -> Result<()> {
    let r = r_from_curve(forms, GraphWeights::<F>::order_for(0, 3))?;
    let rec = crate::recursion::Recursion::new(forms.clone()).omega(0, 3)?;
    if *rec != omega_via_graphs(forms, &r, 0, 3)? {
        return Err(Error::Convention("omega_{0,3} from the recursion differs from the graph sum".into()));
    }
    Ok(())
}
