//! Admissible sets, their parahoric refinements and the order `≼_{K,σ}`.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frobenius::Datum;
use crate::par::{self, Exec};
use crate::weyl::{AffineWeyl, Elem, Family, NodeSet};

/// Enumeration caps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_two_rho: i64,
    pub max_size: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_two_rho: 12, max_size: 2_000_000 }
    }
}

/// Budget plus execution mode, threaded through every enumeration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Ctx {
    pub budget: Budget,
    pub exec: Exec,
}

impl Ctx {
    pub fn sequential() -> Ctx {
        Ctx { budget: Budget::default(), exec: Exec::Sequential }
    }
}

/// `Adm(μ)`, sorted by length then lex-least reduced word.
#[derive(Debug)]
pub struct AdmissibleSet {
    group: Arc<AffineWeyl>,
    elems: Vec<Elem>,
    lengths: Vec<u32>,
    supports: Vec<NodeSet>,
    descents: Vec<NodeSet>,
    index: HashMap<Elem, usize>,
    generators: Vec<Vec<Vec<i32>>>,
}

type CacheKey = (Vec<(Family, usize)>, Vec<Vec<i32>>);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<AdmissibleSet>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<AdmissibleSet>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Every tuple `(x_1 λ_1, ..., x_d λ_d)` with `x_i ∈ W_0`.
pub fn product_orbit(g: &AffineWeyl, mu: &[Vec<i32>]) -> Vec<Vec<Vec<i32>>> {
    let mut out = vec![Vec::new()];
    for (c, m) in g.components().iter().zip(mu) {
        let orbit = c.orbit(m);
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Vec<i32>>| {
                orbit.iter().map(move |l| {
                    let mut p = prefix.clone();
                    p.push(l.clone());
                    p
                })
            })
            .collect();
    }
    out.sort();
    out
}

/// Bruhat down-set of `w`, as products of subwords of a reduced word.
pub fn lower_interval(g: &AffineWeyl, w: &Elem) -> Vec<Elem> {
    let (word, tail) = g.reduced_word(w);
    let mut set: HashSet<Elem> = HashSet::from([g.identity()]);
    for &s in &word {
        let add: Vec<Elem> = set.iter().map(|x| g.mul(x, g.simple(s as usize))).collect();
        set.extend(add);
    }
    set.into_iter().map(|x| g.mul(&x, &tail)).collect()
}

/// `(length, reduced word, Omega labels)`: the canonical report order.
pub fn sort_key(g: &AffineWeyl, w: &Elem) -> (u32, Vec<u8>, Vec<usize>) {
    let (word, _) = g.reduced_word(w);
    (word.len() as u32, word, g.omega_labels(w))
}

impl AdmissibleSet {
    pub fn build(group: Arc<AffineWeyl>, mu: &[Vec<i32>], budget: Budget, exec: Exec) -> Result<AdmissibleSet> {
        let two_rho: i64 = group.components().iter().zip(mu).map(|(c, m)| c.two_rho(m)).sum();
        if two_rho > budget.max_two_rho {
            return Err(Error::Budget(format!(
                "<mu, 2rho> = {two_rho} exceeds the cap {}",
                budget.max_two_rho
            )));
        }
        let generators = product_orbit(&group, mu);
        let g = &*group;
        let parts = par::map(exec, &generators, |lam| lower_interval(g, &g.translation(lam)));
        let mut all: HashSet<Elem> = HashSet::new();
        for p in parts {
            all.extend(p);
            if all.len() > budget.max_size {
                return Err(Error::Budget(format!("|Adm| exceeds the cap {}", budget.max_size)));
            }
        }
        let mut keyed: Vec<((u32, Vec<u8>, Vec<usize>), Elem)> =
            par::map(exec, &all.into_iter().collect::<Vec<_>>(), |w| (sort_key(g, w), w.clone()));
        keyed.sort();
        let elems: Vec<Elem> = keyed.into_iter().map(|(_, w)| w).collect();
        let probes = par::map(exec, &elems, |w| (g.probe(w), g.support(w)));
        let lengths = probes.iter().map(|p| p.0 .0).collect();
        let descents = probes.iter().map(|p| p.0 .1).collect();
        let supports = probes.iter().map(|p| p.1).collect();
        let index = elems.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        Ok(AdmissibleSet { group, elems, lengths, supports, descents, index, generators })
    }

    /// Cached per group and dominant coweight; `Adm(μ)` ignores sigma.
    pub fn for_datum(datum: &Datum, ctx: Ctx) -> Result<Arc<AdmissibleSet>> {
        AdmissibleSet::of(datum, ctx.budget, ctx.exec)
    }

    pub fn of(datum: &Datum, budget: Budget, exec: Exec) -> Result<Arc<AdmissibleSet>> {
        let g = datum.group();
        let key: CacheKey = (
            g.components().iter().map(|c| (c.family, c.rank)).collect(),
            datum.mu_dominant().to_vec(),
        );
        if let Some(a) = cache().lock().unwrap().get(&key) {
            if a.len() <= budget.max_size && datum.mu_two_rho() <= budget.max_two_rho {
                return Ok(a.clone());
            }
        }
        let a = Arc::new(AdmissibleSet::build(g.clone(), datum.mu_dominant(), budget, exec)?);
        cache().lock().unwrap().insert(key, a.clone());
        Ok(a)
    }

    pub fn group(&self) -> &Arc<AffineWeyl> {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elems
    }

    pub fn contains(&self, w: &Elem) -> bool {
        self.index.contains_key(w)
    }

    pub fn position(&self, w: &Elem) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn length_at(&self, i: usize) -> u32 {
        self.lengths[i]
    }

    pub fn support_at(&self, i: usize) -> NodeSet {
        self.supports[i]
    }

    pub fn generators(&self) -> &[Vec<Vec<i32>>] {
        &self.generators
    }

    /// Indices of `^K Adm(μ)`.
    pub fn k_indices(&self, k: NodeSet) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.descents[i] & k == 0).collect()
    }

    pub fn k_adm(&self, k: NodeSet) -> Vec<Elem> {
        self.k_indices(k).into_iter().map(|i| self.elems[i].clone()).collect()
    }

    /// Indices of `^K Adm(μ)_0`: finite sigma-support.
    pub fn k_indices0(&self, datum: &Datum, k: NodeSet) -> Vec<usize> {
        let g = &self.group;
        self.k_indices(k)
            .into_iter()
            .filter(|&i| g.is_finite_set(datum.twist_closure(self.supports[i])))
            .collect()
    }

    pub fn k_adm0(&self, datum: &Datum, k: NodeSet) -> Vec<Elem> {
        self.k_indices0(datum, k).into_iter().map(|i| self.elems[i].clone()).collect()
    }

    pub fn max_length(&self, idx: &[usize]) -> Option<u32> {
        idx.iter().map(|&i| self.lengths[i]).max()
    }
}

/// All elements of the finite parabolic subgroup `W_K`.
pub fn parabolic(g: &AffineWeyl, k: NodeSet) -> Vec<Elem> {
    assert!(g.is_finite_set(k), "W_K must be finite");
    let mut seen: HashSet<Elem> = HashSet::from([g.identity()]);
    let mut out = vec![g.identity()];
    let mut i = 0;
    while i < out.len() {
        for s in (0..g.node_count()).filter(|s| k >> s & 1 == 1) {
            let x = g.mul(&out[i], g.simple(s));
            if seen.insert(x.clone()) {
                out.push(x);
            }
        }
        i += 1;
    }
    out.sort_by_key(|x| sort_key(g, x));
    out
}

/// The σ-conjugates `x w σ(x)^{-1}` for `x ∈ W_K`.
pub struct KConjugator {
    pairs: Vec<(Elem, Elem)>,
}

impl KConjugator {
    pub fn new(datum: &Datum, k: NodeSet) -> KConjugator {
        let g = datum.group();
        let pairs = parabolic(g, k)
            .into_iter()
            .map(|x| {
                let sx = g.inv(&datum.apply_sigma(&x));
                (x, sx)
            })
            .collect();
        KConjugator { pairs }
    }

    pub fn orbit(&self, g: &AffineWeyl, w: &Elem) -> Vec<Elem> {
        let mut seen = HashSet::new();
        self.pairs
            .iter()
            .map(|(x, sx)| g.mul(&g.mul(x, w), sx))
            .filter(|y| seen.insert(y.clone()))
            .collect()
    }

    /// `w′ ≼_{K,σ} w`.
    pub fn preceq(&self, g: &AffineWeyl, w_prime: &Elem, w: &Elem) -> bool {
        self.pairs.iter().any(|(x, sx)| g.bruhat_leq(&g.mul(&g.mul(x, w_prime), sx), w))
    }
}

pub fn preceq(datum: &Datum, k: NodeSet, w_prime: &Elem, w: &Elem) -> bool {
    KConjugator::new(datum, k).preceq(datum.group(), w_prime, w)
}

/// Maximal elements of `subset` under `≼_{K,σ}`, longest first.
pub fn maximal_elements(datum: &Datum, k: NodeSet, subset: &[Elem], exec: Exec) -> Vec<Elem> {
    let g = datum.group();
    let conj = KConjugator::new(datum, k);
    let lens: Vec<u32> = subset.iter().map(|w| g.length(w)).collect();
    let idx: Vec<usize> = (0..subset.len()).collect();
    let keep = par::map(exec, &idx, |&i| {
        let orbit = conj.orbit(g, &subset[i]);
        let min_len = orbit.iter().map(|y| g.length(y)).min().unwrap_or(0);
        !(0..subset.len())
            .any(|j| j != i && lens[j] >= min_len && orbit.iter().any(|y| g.bruhat_leq(y, &subset[j])))
    });
    let mut out: Vec<Elem> = subset.iter().zip(keep).filter(|(_, k)| *k).map(|(w, _)| w.clone()).collect();
    out.sort_by_key(|w| {
        let (l, word, om) = sort_key(g, w);
        (std::cmp::Reverse(l), word, om)
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(g: &AffineWeyl, ws: &[Elem]) -> Vec<String> {
        ws.iter().map(|w| g.format(w)).collect()
    }

    #[test]
    fn gu3() {
        let d = Datum::irreducible(Family::A, 2, "varsigma0", vec![1, 0]).unwrap();
        let g = d.group().clone();
        let adm = AdmissibleSet::of(&d, Budget::default(), Exec::Sequential).unwrap();
        assert_eq!(adm.len(), 7);
        let p = |s: &str| g.parse(s).unwrap();
        for s in ["tau1", "s0 tau1", "s1 tau1", "s2 tau1", "s0 s2 tau1", "s1 s0 tau1", "s2 s1 tau1"] {
            assert!(adm.contains(&p(s)), "{s}");
        }
        assert!(!adm.contains(&p("s0 s1 tau1")));
        let zero = adm.k_adm0(&d, 0);
        let mut expect: Vec<Elem> = ["tau1", "s0 tau1", "s1 tau1", "s2 tau1", "s1 s0 tau1"].map(p).to_vec();
        expect.sort_by_key(|w| sort_key(&g, w));
        assert_eq!(zero, expect);
        assert_eq!(adm.k_adm0(&d, 1).len(), 4);
        let max = maximal_elements(&d, 0, &zero, Exec::Sequential);
        assert_eq!(words(&g, &max), vec!["s1 s0 . tau1", "s2 . tau1"]);
        assert!(preceq(&d, 1, &p("tau1"), &p("s1 s0 tau1")));
    }

    #[test]
    fn stamm() {
        let d = Datum::restrict_scalars(Family::A, 1, &[0, 1], 2, vec![vec![1], vec![1]]).unwrap();
        let g = d.group().clone();
        let adm = AdmissibleSet::of(&d, Budget::default(), Exec::Parallel).unwrap();
        assert_eq!(adm.len(), 9);
        let k = d.parse_set(&["s0".into(), "s0'".into()]).unwrap();
        assert_eq!(
            words(&g, &adm.k_adm(k)),
            vec![". tau1 tau1'", "s1 . tau1 tau1'", "s1' . tau1 tau1'", "s1 s1' . tau1 tau1'"]
        );
    }

    #[test]
    fn double_coset_identity() {
        for (f, r, mu) in [(Family::A, 2, vec![1, 1]), (Family::C, 2, vec![0, 1]), (Family::A, 3, vec![0, 1, 0])] {
            let d = Datum::irreducible(f, r, "id", mu).unwrap();
            let g = d.group().clone();
            let adm = AdmissibleSet::of(&d, Budget::default(), Exec::Parallel).unwrap();
            for k in 0..g.all_nodes() {
                if !g.is_finite_set(k) {
                    continue;
                }
                let wk = parabolic(&g, k);
                let mut two_sided: HashSet<Elem> = HashSet::new();
                for w in adm.elements() {
                    for x in &wk {
                        let xw = g.mul(x, w);
                        for y in &wk {
                            let z = g.mul(&xw, y);
                            if g.is_k_minimal(&z, k) {
                                two_sided.insert(z);
                            }
                        }
                    }
                }
                let direct: HashSet<Elem> = adm.k_adm(k).into_iter().collect();
                assert_eq!(direct, two_sided);
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let d = Datum::irreducible(Family::A, 2, "id", vec![4, 4]).unwrap();
        let r = AdmissibleSet::build(d.group().clone(), d.mu_dominant(), Budget::default(), Exec::Sequential);
        assert!(matches!(r, Err(Error::Budget(_))));
    }
}
