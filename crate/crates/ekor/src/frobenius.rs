//! Coxeter data over F: a product of affine diagrams, a diagram automorphism
//! sigma realized as an affine symmetry of the base alcove, and a coweight.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fm::{self, Row, Q};
use crate::weyl::{mat_mul, mat_vec, AffineWeyl, Component, Elem, Family, NodeSet};

/// A node permutation realized as the affine map sending vertex `v_i` of the
/// base alcove to `v_{perm(i)}`, acting on the group by conjugation.
#[derive(Clone, Debug)]
pub struct DiagramMap {
    perm: Vec<usize>,
    comp_map: Vec<usize>,
    lin: Vec<Vec<i32>>,
    shift: Vec<Vec<i32>>,
    conj: Vec<Vec<u16>>,
}

struct AffineParts {
    comp_map: Vec<usize>,
    lin: Vec<Vec<i32>>,
    shift: Vec<Vec<i32>>,
}

fn affine_parts(g: &AffineWeyl, perm: &[usize]) -> Result<AffineParts> {
    let comps = g.components();
    let mut comp_map = Vec::new();
    let mut lin = Vec::new();
    let mut shift = Vec::new();
    for (c, src) in comps.iter().enumerate() {
        let (b, _) = g.locate(perm[g.global(c, 0)]);
        let dst = &comps[b];
        if dst.family != src.family || dst.rank != src.rank {
            return Err(Error::InvalidSigma(format!(
                "component {} of type {} is sent to a component of type {}",
                c,
                src.name(),
                dst.name()
            )));
        }
        let psi: Vec<usize> = (0..src.nodes())
            .map(|k| {
                let (bb, kk) = g.locate(perm[g.global(c, k)]);
                if bb == b {
                    Ok(kk)
                } else {
                    Err(Error::InvalidSigma(format!("component {c} is split between components")))
                }
            })
            .collect::<Result<_>>()?;
        if (0..src.nodes()).any(|k| dst.mark(psi[k]) != src.mark(k)) {
            return Err(Error::InvalidSigma("permutation does not preserve the highest-root marks".into()));
        }
        let r = src.rank;
        let s = dst.fundamental(psi[0]);
        let mut l = vec![0; r * r];
        for k in 1..=r {
            let col: Vec<i32> = dst
                .fundamental(psi[k])
                .iter()
                .zip(&s)
                .map(|(&f, &x)| f - src.mark(k) * x)
                .collect();
            for i in 0..r {
                l[i * r + (k - 1)] = col[i];
            }
        }
        comp_map.push(b);
        lin.push(l);
        shift.push(s);
    }
    Ok(AffineParts { comp_map, lin, shift })
}

impl DiagramMap {
    pub fn new(g: &AffineWeyl, perm: Vec<usize>) -> Result<DiagramMap> {
        let n = g.node_count();
        if perm.len() != n {
            return Err(Error::InvalidSigma(format!("expected a permutation of {n} nodes, got {}", perm.len())));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidSigma("not a bijection of the node set".into()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if coxeter_entry(g, i, j) != coxeter_entry(g, perm[i], perm[j]) {
                    return Err(Error::InvalidSigma(format!(
                        "bond {}-{} is not preserved",
                        g.node_name(i),
                        g.node_name(j)
                    )));
                }
            }
        }
        let fwd = affine_parts(g, &perm)?;
        let mut inv_perm = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inv_perm[p] = i;
        }
        let back = affine_parts(g, &inv_perm)?;
        let comps = g.components();
        let mut conj = Vec::new();
        for (c, src) in comps.iter().enumerate() {
            let b = fwd.comp_map[c];
            let dst = &comps[b];
            let r = src.rank;
            let l = &fwd.lin[c];
            let linv = &back.lin[b];
            if mat_mul(r, l, linv) != mat_mul(r, &identity(r), &identity(r)) {
                return Err(Error::Invariant("affine realization is not invertible".into()));
            }
            let table = (0..src.weyl().order() as u16)
                .map(|u| {
                    let m = mat_mul(r, &mat_mul(r, l, src.weyl().matrix(u)), linv);
                    dst.weyl().lookup(&m).ok_or_else(|| {
                        Error::InvalidSigma("permutation is not induced by a symmetry of the root system".into())
                    })
                })
                .collect::<Result<Vec<u16>>>()?;
            conj.push(table);
        }
        let map = DiagramMap { perm, comp_map: fwd.comp_map, lin: fwd.lin, shift: fwd.shift, conj };
        for i in 0..n {
            if map.apply(g, g.simple(i)) != *g.simple(map.perm[i]) {
                return Err(Error::InvalidSigma(format!(
                    "affine realization does not send {} to {}",
                    g.node_name(i),
                    g.node_name(map.perm[i])
                )));
            }
        }
        Ok(map)
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn comp_map(&self) -> &[usize] {
        &self.comp_map
    }

    pub fn apply(&self, g: &AffineWeyl, w: &Elem) -> Elem {
        let mut out = g.identity();
        for (c, comp) in g.components().iter().enumerate() {
            let b = self.comp_map[c];
            let r = comp.rank;
            let (lam, u) = g.part(w, c);
            let u2 = self.conj[c][u as usize];
            let dst = &g.components()[b];
            let s = &self.shift[c];
            let ls = mat_vec(r, &self.lin[c], lam);
            let us = mat_vec(r, dst.weyl().matrix(u2), s);
            let lam2: Vec<i32> = (0..r).map(|i| ls[i] + s[i] - us[i]).collect();
            g.set_part(&mut out, b, &lam2, u2);
        }
        out
    }

    /// Linear image of a coweight on component `c`, landing on `comp_map[c]`.
    pub fn transport(&self, c: usize, lambda: &[i32]) -> Vec<i32> {
        mat_vec(lambda.len(), &self.lin[c], lambda)
    }

    pub fn apply_set(&self, k: NodeSet) -> NodeSet {
        permute_set(&self.perm, k)
    }

    /// Affine map `v -> L v + s` on component `c`.
    pub(crate) fn affine(&self, c: usize) -> (&[i32], &[i32]) {
        (&self.lin[c], &self.shift[c])
    }
}

fn identity(r: usize) -> Vec<i32> {
    let mut m = vec![0; r * r];
    for i in 0..r {
        m[i * r + i] = 1;
    }
    m
}

pub(crate) fn coxeter_entry(g: &AffineWeyl, i: usize, j: usize) -> u32 {
    let (ci, ki) = g.locate(i);
    let (cj, kj) = g.locate(j);
    if ci != cj {
        2
    } else {
        g.components()[ci].coxeter(ki, kj)
    }
}

pub fn permute_set(perm: &[usize], k: NodeSet) -> NodeSet {
    let mut out = 0;
    for (i, &p) in perm.iter().enumerate() {
        if k >> i & 1 == 1 {
            out |= 1 << p;
        }
    }
    out
}

pub fn compose(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&i| outer[i]).collect()
}

pub fn closure(perm: &[usize], mut k: NodeSet) -> NodeSet {
    loop {
        let next = k | permute_set(perm, k);
        if next == k {
            return k;
        }
        k = next;
    }
}

/// Every Coxeter-graph automorphism of one component, as local permutations.
pub fn diagram_automorphisms(comp: &Component) -> Vec<Vec<usize>> {
    let n = comp.nodes();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| {
        if (0..n).all(|i| (0..n).all(|j| comp.coxeter(i, j) == comp.coxeter(p[i], p[j])))
            && (0..n).all(|i| comp.mark(i) == comp.mark(p[i]))
        {
            out.push(p.to_vec());
        }
    });
    out.sort();
    out
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Resolve a named automorphism of one component to a local permutation.
///
/// Names: `id`, `varsigma0`, `rho<k>` (type A rotation), `ad_tau<k>`, and
/// compositions `a*b` meaning `a` after `b`.
pub fn named_sigma(comp: &Arc<Component>, name: &str) -> Result<Vec<usize>> {
    let n = comp.nodes();
    let mut acc: Vec<usize> = (0..n).collect();
    for part in name.split('*') {
        let p = single_named(comp, part.trim())?;
        acc = compose(&acc, &p);
    }
    Ok(acc)
}

fn single_named(comp: &Arc<Component>, name: &str) -> Result<Vec<usize>> {
    let n = comp.nodes();
    let r = comp.rank;
    let bad = |why: &str| Error::InvalidSigma(format!("`{name}` on {}: {why}", comp.name()));
    let name = name.replace('ς', "varsigma").replace('ϱ', "rho").replace('ρ', "rho");
    if name == "id" {
        return Ok((0..n).collect());
    }
    if name == "varsigma0" {
        return match comp.family {
            Family::A => Ok((0..n).map(|i| (n - i) % n).collect()),
            Family::D => {
                let mut p: Vec<usize> = (0..n).collect();
                p.swap(r - 1, r);
                Ok(p)
            }
            _ => Err(bad("defined only for types A and D")),
        };
    }
    let (k, via_rotation) = if let Some(k) = name.strip_prefix("ad_tau") {
        (k, false)
    } else if let Some(k) = name.strip_prefix("rho") {
        (k, true)
    } else {
        return Err(bad("unknown name"));
    };
    let k: usize = k.parse().map_err(|_| bad("bad index"))?;
    if via_rotation {
        if comp.family != Family::A {
            return Err(bad("rotations exist only in type A"));
        }
        return Ok((0..n).map(|i| (i + k) % n).collect());
    }
    if k > r || !comp.is_special(k) {
        return Err(bad("index is not a special node"));
    }
    let g = AffineWeyl::new(vec![comp.clone()])?;
    let tau = g.omega_element(&[k])?;
    Ok(g.conjugation_perm(&tau))
}

/// Coxeter datum over F.
#[derive(Debug)]
pub struct Datum {
    group: Arc<AffineWeyl>,
    sigma: DiagramMap,
    mu: Vec<Vec<i32>>,
    mu_dom: Vec<Vec<i32>>,
    tau: Elem,
    ad_tau: Vec<usize>,
    twist: Vec<usize>,
}

/// Result of collapsing a restriction of scalars to its unique non-central factor.
#[derive(Debug)]
pub struct Collapse {
    pub inner: Datum,
    pub component: usize,
    pub degree: usize,
}

impl Datum {
    pub fn new(group: Arc<AffineWeyl>, sigma: Vec<usize>, mu: Vec<Vec<i32>>) -> Result<Datum> {
        let comps = group.components();
        if mu.len() != comps.len() || mu.iter().zip(comps).any(|(m, c)| m.len() != c.rank) {
            return Err(Error::Precondition("mu needs one coweight of the right rank per component".into()));
        }
        let sigma = DiagramMap::new(&group, sigma)?;
        let mu_dom: Vec<Vec<i32>> = mu.iter().zip(comps).map(|(m, c)| c.dominant(m)).collect();
        let tau = group.omega_of(&group.translation(&mu_dom));
        let ad_tau = group.conjugation_perm(&tau);
        let twist = compose(&ad_tau, sigma.perm());
        Ok(Datum { group, sigma, mu, mu_dom, tau, ad_tau, twist })
    }

    pub fn irreducible(family: Family, rank: usize, sigma: &str, mu: Vec<i32>) -> Result<Datum> {
        let comp = Component::get(family, rank)?;
        let perm = named_sigma(&comp, sigma)?;
        Datum::new(Arc::new(AffineWeyl::new(vec![comp])?), perm, vec![mu])
    }

    pub fn with_perm(family: Family, rank: usize, perm: Vec<usize>, mu: Vec<i32>) -> Result<Datum> {
        let comp = Component::get(family, rank)?;
        Datum::new(Arc::new(AffineWeyl::new(vec![comp])?), perm, vec![mu])
    }

    /// `d` copies of one diagram, sigma moving copy `i` to copy `i+1` and the
    /// last copy back to the first through `delta`.
    pub fn restrict_scalars(family: Family, rank: usize, delta: &[usize], d: usize, mu: Vec<Vec<i32>>) -> Result<Datum> {
        if d == 0 {
            return Err(Error::Precondition("degree must be positive".into()));
        }
        let comp = Component::get(family, rank)?;
        let n = comp.nodes();
        if delta.len() != n {
            return Err(Error::InvalidSigma("delta must permute the nodes of one copy".into()));
        }
        let group = Arc::new(AffineWeyl::new(vec![comp; d])?);
        let mut perm = vec![0; n * d];
        for c in 0..d {
            for j in 0..n {
                perm[c * n + j] = if c + 1 < d { (c + 1) * n + j } else { delta[j] };
            }
        }
        Datum::new(group, perm, mu)
    }

    pub fn group(&self) -> &Arc<AffineWeyl> {
        &self.group
    }

    /// Short human-readable summary, e.g. `A2 | sigma s0 s2 s1 | mu (1,0)`.
    pub fn label(&self) -> String {
        let g = &self.group;
        let perm: Vec<String> = self.sigma.perm().iter().map(|&p| g.node_name(p)).collect();
        let mu: Vec<String> = self
            .mu
            .iter()
            .map(|m| format!("({})", m.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        format!("{} | sigma {} | mu {}", g.name(), perm.join(" "), mu.join(" "))
    }

    pub fn sigma(&self) -> &DiagramMap {
        &self.sigma
    }

    pub fn mu(&self) -> &[Vec<i32>] {
        &self.mu
    }

    pub fn mu_dominant(&self) -> &[Vec<i32>] {
        &self.mu_dom
    }

    pub fn tau(&self) -> &Elem {
        &self.tau
    }

    pub fn ad_tau(&self) -> &[usize] {
        &self.ad_tau
    }

    /// `Ad(tau) o sigma` on nodes.
    pub fn twist(&self) -> &[usize] {
        &self.twist
    }

    pub fn apply_sigma(&self, w: &Elem) -> Elem {
        self.sigma.apply(&self.group, w)
    }

    pub fn mu_two_rho(&self) -> i64 {
        self.group.components().iter().zip(&self.mu_dom).map(|(c, m)| c.two_rho(m)).sum()
    }

    pub fn is_minuscule(&self) -> bool {
        self.group.components().iter().zip(&self.mu_dom).all(|(c, m)| c.is_minuscule(m))
    }

    pub fn non_central_components(&self) -> Vec<usize> {
        (0..self.mu.len()).filter(|&c| !self.group.components()[c].is_central(&self.mu[c])).collect()
    }

    pub fn is_central(&self) -> bool {
        self.non_central_components().is_empty()
    }

    /// sigma acts transitively on the components.
    pub fn is_quasi_simple(&self) -> bool {
        let n = self.group.components().len();
        let mut c = 0;
        for k in 1..=n {
            c = self.sigma.comp_map()[c];
            if c == 0 {
                return k == n;
            }
        }
        false
    }

    pub fn is_sigma_stable(&self, k: NodeSet) -> bool {
        self.sigma.apply_set(k) == k
    }

    /// A level: sigma-stable with finite parahoric Weyl group.
    pub fn check_level(&self, k: NodeSet) -> Result<()> {
        if k & !self.group.all_nodes() != 0 {
            return Err(Error::InvalidLevel("level mentions unknown nodes".into()));
        }
        if !self.group.is_finite_set(k) {
            return Err(Error::InvalidLevel("W_K is infinite (K contains a whole component)".into()));
        }
        if !self.is_sigma_stable(k) {
            return Err(Error::InvalidLevel(format!("{} is not sigma-stable", self.format_set(k))));
        }
        Ok(())
    }

    pub fn format_set(&self, k: NodeSet) -> String {
        let names: Vec<String> = (0..self.group.node_count())
            .filter(|&i| k >> i & 1 == 1)
            .map(|i| self.group.node_name(i))
            .collect();
        format!("{{{}}}", names.join(", "))
    }

    pub fn parse_set(&self, names: &[String]) -> Result<NodeSet> {
        let mut k = 0;
        for name in names {
            let n = (0..self.group.node_count())
                .find(|&i| self.group.node_name(i) == name.trim())
                .ok_or_else(|| Error::InvalidLevel(format!("unknown node `{name}`")))?;
            k |= 1 << n;
        }
        Ok(k)
    }

    /// Closure of `supp(w tau(w)^{-1})` under `Ad(tau(w)) o sigma`.
    pub fn sigma_support(&self, w: &Elem) -> NodeSet {
        let g = &self.group;
        let supp = g.support(w);
        let t = g.omega_of(w);
        if t == self.tau {
            closure(&self.twist, supp)
        } else {
            closure(&compose(&g.conjugation_perm(&t), self.sigma.perm()), supp)
        }
    }

    pub fn twist_closure(&self, supp: NodeSet) -> NodeSet {
        closure(&self.twist, supp)
    }

    /// Does `v -> x(sigma(v))` fix a point of the closed base alcove?
    pub fn fixes_point_in_closed_alcove(&self, x: &Elem) -> bool {
        let g = &self.group;
        let comps = g.components();
        let offs: Vec<usize> = comps
            .iter()
            .scan(0, |acc, c| {
                let o = *acc;
                *acc += c.rank;
                Some(o)
            })
            .collect();
        let nv: usize = comps.iter().map(|c| c.rank).sum();
        let q = |v: i32| Q::from_integer(v as i128);
        let mut eqs = Vec::new();
        let mut ineqs = Vec::new();
        for (c, comp) in comps.iter().enumerate() {
            let b = self.sigma.comp_map()[c];
            let r = comp.rank;
            let (l, s) = self.sigma.affine(c);
            let (lam, u) = g.part(x, b);
            let m = comps[b].weyl().matrix(u);
            let ml = mat_mul(r, m, l);
            let ms = mat_vec(r, m, s);
            // v_b - M L v_c = M s + lambda
            for i in 0..r {
                let mut a = vec![Q::from_integer(0); nv];
                a[offs[b] + i] += Q::from_integer(1);
                for j in 0..r {
                    a[offs[c] + j] -= q(ml[i * r + j]);
                }
                eqs.push(Row::new(a, q(ms[i] + lam[i])));
            }
            let mut hb = vec![Q::from_integer(0); nv];
            for i in 0..r {
                let mut a = vec![Q::from_integer(0); nv];
                a[offs[c] + i] = q(-1);
                ineqs.push(Row::new(a, Q::from_integer(0)));
                hb[offs[c] + i] = q(comp.mark(i + 1));
            }
            ineqs.push(Row::new(hb, Q::from_integer(1)));
        }
        fm::feasible(eqs, ineqs, nv)
    }

    /// Collapse to the unique non-central factor.
    pub fn collapse(&self) -> Result<Collapse> {
        if !self.is_quasi_simple() {
            return Err(Error::Precondition("sigma is not transitive on components".into()));
        }
        let nc = self.non_central_components();
        if nc.len() != 1 {
            return Err(Error::Precondition(format!(
                "collapse needs exactly one non-central component, found {}",
                nc.len()
            )));
        }
        let j = nc[0];
        let g = &self.group;
        let d = g.components().len();
        let comp = g.components()[j].clone();
        let delta: Vec<usize> = (0..comp.nodes())
            .map(|k| {
                let mut x = g.global(j, k);
                for _ in 0..d {
                    x = self.sigma.perm()[x];
                }
                g.locate(x).1
            })
            .collect();
        let inner = Datum::new(Arc::new(AffineWeyl::new(vec![comp])?), delta, vec![self.mu[j].clone()])?;
        Ok(Collapse { inner, component: j, degree: d })
    }

    /// Powers of sigma carry component `c` to component `to`; the transported
    /// coweight, dominant.
    pub fn transport_dominant(&self, c: usize, to: usize, lambda: &[i32]) -> Option<Vec<i32>> {
        let mut cur = c;
        let mut lam = lambda.to_vec();
        for _ in 0..=self.group.components().len() {
            if cur == to {
                return Some(self.group.components()[to].dominant(&lam));
            }
            lam = self.sigma.transport(cur, &lam);
            cur = self.sigma.comp_map()[cur];
        }
        None
    }
}

impl Collapse {
    pub fn project_level(&self, outer: &Datum, k: NodeSet) -> NodeSet {
        let g = outer.group();
        (k & g.component_nodes(self.component)) >> g.global(self.component, 0)
    }

    pub fn project(&self, outer: &Datum, w: &Elem) -> Elem {
        let g = outer.group();
        let (lam, u) = g.part(w, self.component);
        let ig = self.inner.group();
        let mut x = ig.identity();
        ig.set_part(&mut x, 0, lam, u);
        x
    }

    /// Replace the non-central factor of `base` by the inner element `x`.
    pub fn lift(&self, outer: &Datum, base: &Elem, x: &Elem) -> Elem {
        let (lam, u) = self.inner.group().part(x, 0);
        let mut w = base.clone();
        outer.group().set_part(&mut w, self.component, lam, u);
        w
    }
}
