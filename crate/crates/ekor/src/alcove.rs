//! Alcove geometry: vertices, critical indices, quasi-rigid elements and
//! the finite translation set `W(μ)_{K,fin}`.

use std::collections::HashSet;

use num_rational::Ratio;
use serde::Serialize;

use crate::admissible::{parabolic, product_orbit};
use crate::frobenius::{permute_set, Datum};
use crate::weyl::{AffineWeyl, Elem, NodeSet};

/// A vertex of the base alcove: the origin for node 0, else `ω_i / c_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlcoveVertex {
    pub component: usize,
    pub node: usize,
    pub coords: Vec<String>,
    pub special: bool,
}

pub fn vertices(g: &AffineWeyl) -> Vec<AlcoveVertex> {
    let mut out = Vec::new();
    for (c, comp) in g.components().iter().enumerate() {
        for k in 0..comp.nodes() {
            let coords = (1..=comp.rank)
                .map(|i| {
                    let x = if i == k { Ratio::new(1, comp.mark(k) as i64) } else { Ratio::from_integer(0) };
                    x.to_string()
                })
                .collect();
            out.push(AlcoveVertex { component: c, node: k, coords, special: comp.is_special(k) });
        }
    }
    out
}

/// Per component, the local nodes `i` with `v_i` also a vertex of `x(𝔞)`.
pub fn critical_indices(g: &AffineWeyl, x: &Elem) -> Vec<Vec<usize>> {
    g.components()
        .iter()
        .enumerate()
        .map(|(c, comp)| {
            let verts = comp.scaled_vertices();
            let scale = comp.vertex_scale();
            let images: HashSet<Vec<i64>> = verts.iter().map(|v| g.act_scaled(x, c, v, scale)).collect();
            (0..comp.nodes()).filter(|&i| images.contains(&verts[i])).collect()
        })
        .collect()
}

/// `Crit(x)` is nonempty.
pub fn is_quasi_rigid(g: &AffineWeyl, x: &Elem) -> bool {
    critical_indices(g, x).iter().all(|c| !c.is_empty())
}

/// The same test through the support of `x τ(x)^{-1}`.
pub fn is_quasi_rigid_by_support(g: &AffineWeyl, x: &Elem) -> bool {
    g.is_finite_set(g.support(x))
}

/// Choices of one critical index per component that form a `twist`-stable node set.
pub fn stable_critical_indices(g: &AffineWeyl, x: &Elem, twist: &[usize]) -> Vec<NodeSet> {
    let crit = critical_indices(g, x);
    stable_choices(g, &crit, twist)
}

fn stable_choices(g: &AffineWeyl, per_comp: &[Vec<usize>], twist: &[usize]) -> Vec<NodeSet> {
    let mut sets: Vec<NodeSet> = vec![0];
    for (c, opts) in per_comp.iter().enumerate() {
        sets = sets
            .into_iter()
            .flat_map(|s| opts.iter().map(move |&k| s | 1 << g.global(c, k)))
            .collect();
    }
    sets.into_iter().filter(|&s| permute_set(twist, s) == s).collect()
}

/// A system of special nodes, one per component, stable under `Ad(τ)∘σ`.
pub fn is_j_quasisplit(datum: &Datum) -> bool {
    let g = datum.group();
    let specials: Vec<Vec<usize>> = g.components().iter().map(|c| c.special_nodes()).collect();
    !stable_choices(g, &specials, datum.twist()).is_empty()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FinRoute {
    /// `t^λ ∈ ^K Adm(μ)_0`.
    SigmaSupport,
    /// `t^λ` is `K`-minimal with an `Ad(τ)∘σ`-stable critical index.
    CriticalIndex,
}

/// `W(μ)_{K,fin}` as sorted coweight tuples.
pub fn w_mu_k_fin(datum: &Datum, k: NodeSet, route: FinRoute) -> Vec<Vec<Vec<i32>>> {
    let g = datum.group();
    product_orbit(g, datum.mu_dominant())
        .into_iter()
        .filter(|lam| {
            let t = g.translation(lam);
            g.is_k_minimal(&t, k)
                && match route {
                    FinRoute::SigmaSupport => g.is_finite_set(datum.sigma_support(&t)),
                    FinRoute::CriticalIndex => !stable_critical_indices(g, &t, datum.twist()).is_empty(),
                }
        })
        .collect()
}

/// `{x ∈ W_a τ : ℓ(x) ≤ max_len, Crit(x) ≠ ∅, x ∈ ^K W̃}`, built as the
/// union of the finite cosets `W_{S∖{j}} τ`.
pub fn q_rig_window(g: &AffineWeyl, tau: &Elem, max_len: u32, k: NodeSet) -> Vec<Elem> {
    let mut js: Vec<NodeSet> = vec![g.all_nodes()];
    for c in 0..g.components().len() {
        js = js
            .into_iter()
            .flat_map(|j| {
                (0..g.components()[c].nodes()).map(move |i| j & !(1 << g.global(c, i)))
            })
            .collect();
    }
    let mut out: HashSet<Elem> = HashSet::new();
    for j in js {
        for w in parabolic(g, j) {
            if g.length(&w) <= max_len {
                let x = g.mul(&w, tau);
                if g.is_k_minimal(&x, k) {
                    out.insert(x);
                }
            }
        }
    }
    let mut v: Vec<Elem> = out.into_iter().collect();
    v.sort_by_key(|x| crate::admissible::sort_key(g, x));
    v
}
