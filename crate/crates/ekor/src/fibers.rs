//! Change of parahoric: `I(K,w,σ)`, partial σ-conjugation, the stratum map
//! `π′_{K,K′}`, fixed-point polynomials of finite flag varieties and the
//! fiber table.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::admissible::{parabolic, sort_key, AdmissibleSet, Ctx};
use crate::classification::{situation, Situation};
use crate::error::{Error, Result};
use crate::frobenius::{coxeter_entry, Datum};
use crate::par;
use crate::poly::Poly;
use crate::weyl::{AffineWeyl, Elem, NodeSet};

/// `s ↦ w σ(s) w^{-1}` on nodes, `None` where the image is not simple.
pub fn ad_w_sigma(datum: &Datum, w: &Elem, s: usize) -> Option<usize> {
    let g = datum.group();
    let x = g.mul(&g.mul(w, &datum.apply_sigma(g.simple(s))), &g.inv(w));
    g.as_simple(&x)
}

/// Largest `J ⊆ K` with `Ad(w)∘σ(J) = J`.
pub fn i_k_w_sigma(datum: &Datum, k: NodeSet, w: &Elem) -> NodeSet {
    let n = datum.group().node_count();
    let image: Vec<Option<usize>> = (0..n).map(|s| ad_w_sigma(datum, w, s)).collect();
    let mut j = k;
    loop {
        let keep = (0..n)
            .filter(|&s| j >> s & 1 == 1)
            .filter(|&s| image[s].is_some_and(|t| j >> t & 1 == 1))
            .fold(0, |acc, s| acc | 1 << s);
        if keep == j {
            return j;
        }
        j = keep;
    }
}

/// The states reachable from `w` by `y ↦ s y σ(s)`, `s ∈ K′`, without
/// increasing length.
#[derive(Clone, Debug)]
pub struct ConjClass {
    pub members: Vec<Elem>,
    /// Members that are `K′`-minimal.
    pub minimal: Vec<Elem>,
}

pub fn partial_class(datum: &Datum, k_prime: NodeSet, w: &Elem) -> ConjClass {
    let g = datum.group();
    let gens: Vec<(Elem, Elem)> = (0..g.node_count())
        .filter(|&s| k_prime >> s & 1 == 1)
        .map(|s| (g.simple(s).clone(), datum.apply_sigma(g.simple(s))))
        .collect();
    let mut seen: HashSet<Elem> = HashSet::from([w.clone()]);
    let mut members = vec![w.clone()];
    let mut i = 0;
    while i < members.len() {
        let y = members[i].clone();
        let ly = g.length(&y);
        for (s, ss) in &gens {
            let z = g.mul(&g.mul(s, &y), ss);
            if g.length(&z) <= ly && seen.insert(z.clone()) {
                members.push(z);
            }
        }
        i += 1;
    }
    members.sort_by_key(|x| sort_key(g, x));
    let minimal = members.iter().filter(|x| g.is_k_minimal(x, k_prime)).cloned().collect();
    ConjClass { members, minimal }
}

/// Every endpoint of greedy descent `y ↦ s y σ(s)` with `s y < y`, `s ∈ K′`,
/// over all choice orders.
pub fn greedy_endpoints(datum: &Datum, k_prime: NodeSet, w: &Elem) -> Vec<Elem> {
    let g = datum.group();
    let mut seen: HashSet<Elem> = HashSet::new();
    let mut stack = vec![w.clone()];
    let mut ends: BTreeSet<(u32, Vec<u8>, Vec<usize>)> = BTreeSet::new();
    let mut found = Vec::new();
    while let Some(y) = stack.pop() {
        if !seen.insert(y.clone()) {
            continue;
        }
        let desc = g.left_descents(&y) & k_prime;
        if desc == 0 {
            if ends.insert(sort_key(g, &y)) {
                found.push(y);
            }
            continue;
        }
        for s in (0..g.node_count()).filter(|&s| desc >> s & 1 == 1) {
            stack.push(g.mul(&g.mul(g.simple(s), &y), &datum.apply_sigma(g.simple(s))));
        }
    }
    found.sort_by_key(|x| sort_key(g, x));
    found
}

/// `π′_{K,K′}(w)`: the unique `K′`-minimal element of the partial class.
pub fn pi_prime(datum: &Datum, k_prime: NodeSet, w: &Elem) -> Result<Elem> {
    let g = datum.group();
    let class = partial_class(datum, k_prime, w);
    if class.minimal.len() != 1 {
        return Err(Error::Invariant(format!(
            "{} has {} K'-minimal partial conjugates",
            g.format(w),
            class.minimal.len()
        )));
    }
    let greedy = greedy_endpoints(datum, k_prime, w);
    if greedy != class.minimal {
        return Err(Error::Invariant(format!("greedy descent from {} depends on the order", g.format(w))));
    }
    Ok(class.minimal[0].clone())
}

/// `{x w′ σ(x)^{-1} : x ∈ W_D}` with `D` the right descents of `w′` in `K′∖K`.
pub fn preimage_closed_form(datum: &Datum, k: NodeSet, k_prime: NodeSet, w_prime: &Elem) -> Vec<Elem> {
    let g = datum.group();
    let d = g.right_descents(w_prime) & k_prime & !k;
    let mut out: Vec<Elem> = parabolic(g, d)
        .iter()
        .map(|x| g.mul(&g.mul(x, w_prime), &g.inv(&datum.apply_sigma(x))))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    out.sort_by_key(|x| sort_key(g, x));
    out
}

/// The closed form for a restriction of scalars: computed on the collapsed
/// datum, where the formula is stated, and carried back.
fn preimage_via_collapse(datum: &Datum, k: NodeSet, k_prime: NodeSet, w_prime: &Elem) -> Result<Vec<Elem>> {
    let g = datum.group();
    if g.components().len() == 1 {
        return Ok(preimage_closed_form(datum, k, k_prime, w_prime));
    }
    let col = datum.collapse()?;
    let inner = &col.inner;
    let (k1, kp1) = (col.project_level(datum, k), col.project_level(datum, k_prime));
    let mut out: Vec<Elem> = preimage_closed_form(inner, k1, kp1, &col.project(datum, w_prime))
        .iter()
        .map(|x| col.lift(datum, w_prime, x))
        .collect();
    out.sort_by_key(|x| sort_key(g, x));
    Ok(out)
}

/// `Σ q^{ℓ(x)}` over `x ∈ W_J` fixed by the node permutation `f`.
pub fn flag_poly(g: &AffineWeyl, j: NodeSet, f: &[usize]) -> Result<Poly> {
    if !g.is_finite_set(j) {
        return Err(Error::Precondition("W_J must be finite".into()));
    }
    let nodes: Vec<usize> = (0..g.node_count()).filter(|&s| j >> s & 1 == 1).collect();
    let ok = nodes.iter().all(|&s| j >> f[s] & 1 == 1)
        && nodes.iter().all(|&a| nodes.iter().all(|&b| coxeter_entry(g, a, b) == coxeter_entry(g, f[a], f[b])));
    if !ok {
        return Err(Error::Precondition("map is not an automorphism of (W_J, J)".into()));
    }
    let mut coeffs: Vec<i64> = Vec::new();
    for x in parabolic(g, j) {
        let (word, _) = g.reduced_word(&x);
        let image: Vec<u8> = word.iter().map(|&s| f[s as usize] as u8).collect();
        if g.word_product(&image) == x {
            let l = word.len();
            if coeffs.len() <= l {
                coeffs.resize(l + 1, 0);
            }
            coeffs[l] += 1;
        }
    }
    Ok(Poly::new(coeffs))
}

/// `Ad(w)∘σ` on `I(K,w,σ)`, identity elsewhere, and the resulting polynomial.
pub fn stratum_poly(datum: &Datum, k: NodeSet, w: &Elem) -> Result<(NodeSet, Poly)> {
    let g = datum.group();
    let j = i_k_w_sigma(datum, k, w);
    let f: Vec<usize> = (0..g.node_count())
        .map(|s| if j >> s & 1 == 1 { ad_w_sigma(datum, w, s).unwrap_or(s) } else { s })
        .collect();
    Ok((j, flag_poly(g, j, &f)?))
}

/// Which of the three single-node cases a total should fall in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingleCase {
    /// `w′ s < w′`: two points.
    Descent,
    /// `s ∈ supp(w′τ^{-1})`: a projective line.
    Support,
    /// Neither: one point.
    Neither,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberRow {
    pub target: String,
    pub i_k_prime: String,
    pub target_poly: Poly,
    pub preimage: Vec<String>,
    pub degrees: Vec<Poly>,
    pub total: Poly,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<SingleCase>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    pub datum: String,
    pub level: String,
    pub level_prime: String,
    pub situation: Option<Situation>,
    /// `w ↦ π′(w)` over `^K Adm(μ)_0`.
    pub pi_prime: Vec<(String, String)>,
    pub rows: Vec<FiberRow>,
}

/// Totals allowed when `K′∖K` has two elements, in the variable `q^d`.
pub fn product_totals(d: usize) -> Vec<Poly> {
    let one = Poly::constant(1);
    let two = Poly::constant(2);
    let line = Poly::q_plus_one();
    [one.clone(), two.clone(), Poly::constant(4), line.clone(), two.mul(&line), line.mul(&line)]
        .iter()
        .map(|p| p.substitute_power(d))
        .collect()
}

/// The Frobenius degree `d`: number of components.
fn degree(datum: &Datum) -> usize {
    datum.group().components().len()
}

/// Fiber cardinalities of `π_{K,K′}` stratum by stratum.
///
/// Outside the Lubin-Tate and exotic shapes the result is not covered by
/// theory; pass `force` to compute it anyway.
pub fn fiber_table(datum: &Datum, k: NodeSet, k_prime: NodeSet, ctx: Ctx, force: bool) -> Result<FiberReport> {
    datum.check_level(k)?;
    datum.check_level(k_prime)?;
    if k & !k_prime != 0 || k == k_prime {
        return Err(Error::InvalidLevel("K must be a proper subset of K'".into()));
    }
    let sit = situation(datum, k, k_prime)?;
    if sit.is_none() && !force {
        return Err(Error::Precondition(
            "neither the Lubin-Tate nor the exotic unitary shape; fiber degrees are unsupported here".into(),
        ));
    }
    let g = datum.group();
    let adm = AdmissibleSet::for_datum(datum, ctx)?;
    let source = adm.k_adm0(datum, k);
    let images = par::map(ctx.exec, &source, |w| pi_prime(datum, k_prime, w));
    let mut map: HashMap<Elem, Vec<Elem>> = HashMap::new();
    let mut pi = Vec::new();
    for (w, img) in source.iter().zip(images) {
        let img = img?;
        if !adm.contains(&img) || !g.is_finite_set(datum.sigma_support(&img)) {
            return Err(Error::Invariant(format!("pi'({}) left ^K' Adm(mu)_0", g.format(w))));
        }
        pi.push((g.format(w), g.format(&img)));
        map.entry(img).or_default().push(w.clone());
    }
    let targets = adm.k_adm0(datum, k_prime);
    if let Some(extra) = map.keys().find(|x| !targets.contains(x)) {
        return Err(Error::Invariant(format!("{} is not K'-minimal", g.format(extra))));
    }
    let single = (k_prime & !k).count_ones() == 1;
    let d = degree(datum);
    let tau_inv = g.inv(datum.tau());
    let rows = par::map(ctx.exec, &targets, |wp| -> Result<FiberRow> {
        let mut brute = map.get(wp).cloned().unwrap_or_default();
        brute.sort_by_key(|x| sort_key(g, x));
        if sit.is_some() && preimage_via_collapse(datum, k, k_prime, wp)? != brute {
            return Err(Error::Invariant(format!("closed-form preimage of {} disagrees with inversion", g.format(wp))));
        }
        let (jp, top) = stratum_poly(datum, k_prime, wp)?;
        let mut degrees = Vec::new();
        let mut total = Poly::default();
        for w in &brute {
            let (_, bottom) = stratum_poly(datum, k, w)?;
            let deg = top.div_exact(&bottom).ok_or_else(|| {
                Error::Invariant(format!("{bottom} does not divide {top} over {} -> {}", g.format(w), g.format(wp)))
            })?;
            total = total.add(&deg);
            degrees.push(deg);
        }
        let case = if single && sit.is_some() {
            let s = (k_prime & !k).trailing_zeros() as usize;
            let descent = g.right_descents(wp) >> s & 1 == 1;
            let in_support = g.support(&g.mul(wp, &tau_inv)) >> s & 1 == 1;
            let (case, expect) = match (descent, in_support) {
                (true, false) => (SingleCase::Descent, Poly::constant(2)),
                (false, true) => (SingleCase::Support, Poly::q_plus_one().substitute_power(d)),
                (false, false) => (SingleCase::Neither, Poly::constant(1)),
                (true, true) => {
                    return Err(Error::Invariant(format!("{} is both a descent and a support case", g.format(wp))))
                }
            };
            if total != expect {
                return Err(Error::Invariant(format!("total {total} over {} should be {expect}", g.format(wp))));
            }
            Some(case)
        } else {
            None
        };
        if sit.is_some() && !single && !product_totals(d).contains(&total) {
            return Err(Error::Invariant(format!("total {total} over {} is outside the product set", g.format(wp))));
        }
        Ok(FiberRow {
            target: g.format(wp),
            i_k_prime: datum.format_set(jp),
            target_poly: top,
            preimage: brute.iter().map(|w| g.format(w)).collect(),
            degrees,
            total,
            case,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(FiberReport {
        datum: datum.label(),
        level: datum.format_set(k),
        level_prime: datum.format_set(k_prime),
        situation: sit,
        pi_prime: pi,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::Family;

    fn gu3() -> Datum {
        Datum::irreducible(Family::A, 2, "varsigma0", vec![1, 0]).unwrap()
    }

    #[test]
    fn i_values() {
        let d = gu3();
        let g = d.group();
        let p = |s: &str| g.parse(s).unwrap();
        assert_eq!(i_k_w_sigma(&d, 0, &p("tau1")), 0);
        assert_eq!(i_k_w_sigma(&d, 1, &p("s1 s0 tau1")), 1);
        assert_eq!(i_k_w_sigma(&d, 1, &p("tau1")), 0);
    }

    #[test]
    fn stratum_map() {
        let d = gu3();
        let g = d.group();
        let p = |s: &str| g.parse(s).unwrap();
        assert_eq!(pi_prime(&d, 1, &p("s0 tau1")).unwrap(), p("s1 tau1"));
        assert_eq!(pi_prime(&d, 1, &p("s1 tau1")).unwrap(), p("s1 tau1"));
        assert_eq!(pi_prime(&d, 1, &p("tau1")).unwrap(), p("tau1"));
        assert_eq!(pi_prime(&d, 1, &p("s1 s0 tau1")).unwrap(), p("s1 s0 tau1"));
        let pre = preimage_closed_form(&d, 0, 1, &p("s1 tau1"));
        assert_eq!(pre, vec![p("s0 tau1"), p("s1 tau1")]);
    }

    #[test]
    fn flag_polynomials() {
        let g = AffineWeyl::single(Family::A, 2).unwrap();
        assert_eq!(flag_poly(&g, 0, &[0, 1, 2]).unwrap(), Poly::constant(1));
        assert_eq!(flag_poly(&g, 0b10, &[0, 1, 2]).unwrap(), Poly::q_plus_one());
        assert_eq!(flag_poly(&g, 0b110, &[0, 2, 1]).unwrap().to_string(), "q^3 + 1");
        assert_eq!(flag_poly(&g, 0b110, &[0, 1, 2]).unwrap().to_string(), "q^3 + 2q^2 + 2q + 1");
        assert!(flag_poly(&g, 0b110, &[1, 0, 2]).is_err());
    }

    #[test]
    fn gu3_table() {
        let d = gu3();
        let t = fiber_table(&d, 0, 1, Ctx::default(), false).unwrap();
        let got: Vec<(String, String)> = t.rows.iter().map(|r| (r.target.clone(), r.total.to_string())).collect();
        let want = [(". tau1", "1"), ("s1 . tau1", "2"), ("s2 . tau1", "1"), ("s1 s0 . tau1", "q + 1")];
        assert_eq!(got, want.map(|(a, b)| (a.to_string(), b.to_string())));
        let i: Vec<&str> = t.rows.iter().map(|r| r.i_k_prime.as_str()).collect();
        assert_eq!(i, ["{}", "{}", "{}", "{s0}"]);
        assert!(fiber_table(&d, 0, 0b110, Ctx::default(), false).is_err());
    }

    #[test]
    fn unitary_two_nodes() {
        let d = Datum::irreducible(Family::A, 5, "varsigma0", vec![1, 0, 0, 0, 0]).unwrap();
        let t = fiber_table(&d, 0, 0b1001, Ctx::default(), false).unwrap();
        let totals: BTreeSet<String> = t.rows.iter().map(|r| r.total.to_string()).collect();
        assert!(totals.iter().all(|x| ["1", "2", "4", "q + 1", "2q + 2", "q^2 + 2q + 1"].contains(&x.as_str())));
        assert!(totals.contains("2q + 2") && totals.contains("q^2 + 2q + 1"));
    }
}
