//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach the output.

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use ekor::admissible::maximal_elements;
use ekor::alcove::{critical_indices, w_mu_k_fin, FinRoute};
use ekor::classification::{
    self, dominant_coweights, irreducible_corpus, sigma_stable_levels, situation, sweep, sweep_types, SweepSummary,
};
use ekor::fibers::{fiber_table, i_k_w_sigma, pi_prime};
use ekor::frobenius::diagram_automorphisms;
use ekor::hermitian::{verify_flag_polynomial, FlagPair};
use ekor::poly::Poly;
use ekor::{par, AdmissibleSet, Component, Ctx, Datum, DiagramMap, Elem, Error, Exec, Family, NodeSet};

struct Check {
    pass: bool,
    detail: String,
}

impl Check {
    fn new(pass: bool, detail: impl Into<String>) -> Check {
        Check { pass, detail: detail.into() }
    }
}

fn elems(d: &Datum, words: &[&str]) -> BTreeSet<String> {
    let g = d.group();
    words.iter().map(|w| g.format(&g.parse(w).unwrap())).collect()
}

fn fmt_set(d: &Datum, ws: &[Elem]) -> BTreeSet<String> {
    ws.iter().map(|w| d.group().format(w)).collect()
}

fn within(t: Instant, limit: Duration) -> bool {
    t.elapsed() < limit
}

fn ac1() -> Check {
    let t = Instant::now();
    let d = Datum::irreducible(Family::A, 2, "varsigma0", vec![1, 0]).unwrap();
    let ctx = Ctx::default();
    let adm = AdmissibleSet::for_datum(&d, ctx).unwrap();
    let all = [". tau1", "s0 . tau1", "s1 . tau1", "s2 . tau1", "s0 s2 . tau1", "s1 s0 . tau1", "s2 s1 . tau1"];
    let ok_adm = fmt_set(&d, adm.elements()) == elems(&d, &all) && adm.len() == 7;
    let zero = ["s1 s0 . tau1", ". tau1", "s0 . tau1", "s1 . tau1", "s2 . tau1"];
    let ok0 = fmt_set(&d, &adm.k_adm0(&d, 0)) == elems(&d, &zero);
    let ok1 = fmt_set(&d, &adm.k_adm0(&d, 0b001)) == elems(&d, &[". tau1", "s1 . tau1", "s2 . tau1", "s1 s0 . tau1"]);
    let g = d.group();
    let pi: Vec<(String, String)> =
        adm.k_adm0(&d, 0).iter().map(|w| (g.format(w), g.format(&pi_prime(&d, 0b001, w).unwrap()))).collect();
    let ok_pi = pi.iter().all(|(a, b)| if a == "s0 . tau1" { b == "s1 . tau1" } else { a == b });
    let targets = [". tau1", "s1 . tau1", "s2 . tau1", "s1 s0 . tau1"];
    let i_vals: Vec<NodeSet> = targets.iter().map(|w| i_k_w_sigma(&d, 0b001, &g.parse(w).unwrap())).collect();
    let ok_i = i_vals == [0, 0, 0, 0b001];
    let table = fiber_table(&d, 0, 0b001, ctx, false).unwrap();
    let mut totals: Vec<String> = table.rows.iter().map(|r| r.total.to_string()).collect();
    totals.sort();
    let ok_tot = totals == ["1", "1", "2", "q + 1"];
    let fast = within(t, Duration::from_secs(1));
    Check::new(
        ok_adm && ok0 && ok1 && ok_pi && ok_i && ok_tot && fast,
        format!("Adm {ok_adm}, Adm0 {ok0}/{ok1}, pi' {ok_pi}, I {ok_i}, totals {totals:?}, {:?}", t.elapsed()),
    )
}

fn ac2() -> Check {
    let t = Instant::now();
    let d = Datum::restrict_scalars(Family::A, 1, &[0, 1], 2, vec![vec![1], vec![1]]).unwrap();
    let ctx = Ctx::default();
    let adm = AdmissibleSet::for_datum(&d, ctx).unwrap();
    let nine = [
        ". tau1 tau1'",
        "s0 . tau1 tau1'",
        "s1 . tau1 tau1'",
        "s0' . tau1 tau1'",
        "s1' . tau1 tau1'",
        "s0 s0' . tau1 tau1'",
        "s0 s1' . tau1 tau1'",
        "s1 s0' . tau1 tau1'",
        "s1 s1' . tau1 tau1'",
    ];
    let ok_adm = fmt_set(&d, adm.elements()) == elems(&d, &nine);
    let zero = adm.k_adm0(&d, 0);
    let max = maximal_elements(&d, 0, &zero, ctx.exec);
    let ok_max = fmt_set(&d, &max) == elems(&d, &["s0 s1' . tau1 tau1'", "s1 s0' . tau1 tau1'"])
        && max.iter().all(|w| d.group().length(w) == 2);
    let k = d.parse_set(&["s0".into(), "s0'".into()]).unwrap();
    let ok_k = fmt_set(&d, &adm.k_adm(k))
        == elems(&d, &[". tau1 tau1'", "s1 . tau1 tau1'", "s1' . tau1 tau1'", "s1 s1' . tau1 tau1'"]);
    let fast = within(t, Duration::from_secs(1));
    Check::new(ok_adm && ok_max && ok_k && fast, format!("Adm {ok_adm}, maximal {ok_max}, ^K Adm {ok_k}, {:?}", t.elapsed()))
}

fn star(d: &Datum, k: NodeSet) -> (BTreeSet<String>, bool) {
    let g = d.group();
    let adm = AdmissibleSet::for_datum(d, Ctx::default()).unwrap();
    let max = maximal_elements(d, k, &adm.k_adm0(d, k), Exec::Parallel);
    let trans: HashSet<Elem> = w_mu_k_fin(d, k, FinRoute::SigmaSupport).iter().map(|l| g.translation(l)).collect();
    let holds = max.len() == trans.len() && max.iter().all(|m| trans.contains(m));
    (fmt_set(d, &max), holds)
}

fn ac3() -> Check {
    let t = Instant::now();
    let d = Datum::irreducible(Family::A, 3, "ad_tau2", vec![0, 1, 0]).unwrap();
    let (m0, star0) = star(&d, 0);
    let want0 = elems(&d, &["s2 s1 s3 s2 . tau2", "s3 s2 s0 s3 . tau2", "s0 s1 s3 s0 . tau2", "s1 s2 s0 s1 . tau2"]);
    let (m2, star2) = star(&d, 0b0101);
    let want2 = elems(&d, &["s3 s2 s0 s3 . tau2", "s1 s2 s0 s1 . tau2", "s1 s3 s0 . tau2", "s1 s3 s2 . tau2"]);
    let fast = within(t, Duration::from_secs(5));
    Check::new(
        m0 == want0 && star0 && m2 == want2 && !star2 && fast,
        format!("K=0 {} (star {star0}), K=s0,s2 {} (star {star2}), {:?}", m0 == want0, m2 == want2, t.elapsed()),
    )
}

fn ac4(s: &SweepSummary, took: Duration) -> Check {
    let names = ["zero_dim", "discrete_fiber", "max_dim", "equi_max"];
    let mut pass = s.errors.is_empty() && took < Duration::from_secs(600);
    let mut parts = vec![format!("{} data", s.data)];
    for n in names {
        let t = &s.tallies[n];
        pass &= t.disagreements == 0 && t.both_defined > 0;
        parts.push(format!("{n} {}/{} both defined, {} disagree", t.both_defined, t.instances, t.disagreements));
    }
    parts.push(format!("{} errors, {took:?}", s.errors.len()));
    Check::new(pass, parts.join("; "))
}

fn ac5(s: &SweepSummary) -> Check {
    let t = &s.tallies["drinfeld_qrig"];
    let iff = t.disagreements == 0 && t.both_defined > 0;
    let eq = t.secondary_failures == 0;
    Check::new(
        iff && eq,
        format!(
            "containment iff (A, w1): {} on {} Ad(tau)-stable levels; equality with Q-Rig cap ^K W fails on {} levels where both sides predict it",
            if iff { "holds" } else { "fails" },
            t.both_defined,
            t.secondary_failures
        ),
    )
}

fn omega1_like(d: &Datum) -> bool {
    let comp = &d.group().components()[0];
    let r = comp.rank;
    let mu = &d.mu_dominant()[0];
    let e = |k: usize| (0..r).map(|i| i32::from(i + 1 == k)).collect::<Vec<_>>();
    comp.family == Family::A && (*mu == e(1) || *mu == e(r))
}

/// Length-preserving automorphisms carry `λ` to a dominant minuscule coweight.
fn moves_to_minuscule(comp: &std::sync::Arc<Component>, lam: &[i32]) -> bool {
    let g = ekor::AffineWeyl::new(vec![comp.clone()]).unwrap();
    let t = g.translation(&[lam.to_vec()]);
    diagram_automorphisms(comp).into_iter().any(|p| {
        let theta = DiagramMap::new(&g, p).unwrap();
        match g.as_translation(&theta.apply(&g, &t)) {
            Some(l) => comp.dominant(&l[0]) == l[0] && comp.is_minuscule(&l[0]),
            None => false,
        }
    })
}

fn ac6(corpus: &[Datum]) -> Check {
    let ctx = Ctx::default();
    let untwisted: Vec<&Datum> =
        corpus.iter().filter(|d| d.sigma().perm().iter().enumerate().all(|(i, &p)| i == p)).collect();
    let mut fails: Vec<String> = Vec::new();
    let mut counts = [0usize; 6];
    for d in &untwisted {
        let g = d.group();
        let adm = AdmissibleSet::for_datum(d, ctx).unwrap();
        let n = g.node_count();
        let tau = d.tau();
        let st = |s: usize| g.mul(g.simple(s), tau);
        counts[0] += n;
        if let Some(s) = (0..n).find(|&s| !adm.contains(&st(s))) {
            fails.push(format!("s tau: {} s{s}", d.label()));
        }
        counts[1] += 1;
        let full = (0..adm.len()).any(|i| adm.support_at(i) == g.all_nodes());
        if full == omega1_like(d) {
            fails.push(format!("full support: {}", d.label()));
        }
        if g.components()[0].family == Family::A && !omega1_like(d) {
            for a in 0..n {
                for b in 0..n {
                    counts[2] += 1;
                    if !adm.contains(&g.mul(g.simple(a), &st(b))) {
                        fails.push(format!("s s' tau: {} s{a} s{b}", d.label()));
                    }
                }
            }
        }
        let comp = &g.components()[0];
        for lam in comp.orbit(&d.mu_dominant()[0]) {
            counts[3] += 1;
            let t = g.translation(&[lam.clone()]);
            let crit = &critical_indices(g, &t)[0];
            let rigid = !crit.is_empty();
            if rigid != moves_to_minuscule(comp, &lam) {
                fails.push(format!("quasi-rigid translation: {} {lam:?}", d.label()));
            }
            if rigid && !(crit.len() == 1 && comp.is_special(crit[0])) {
                fails.push(format!("critical index of t^{lam:?} in {}: {crit:?}", d.label()));
            }
        }
    }
    // these depend on sigma, so run over the twisted corpus too
    let per = par::map(Exec::Parallel, corpus, |d| {
        let mut bad = Vec::new();
        let mut n = [0usize; 2];
        let adm = AdmissibleSet::for_datum(d, Ctx { exec: Exec::Sequential, ..Ctx::default() }).unwrap();
        for k in sigma_stable_levels(d) {
            n[0] += 1;
            let fin = w_mu_k_fin(d, k, FinRoute::SigmaSupport);
            if fin != w_mu_k_fin(d, k, FinRoute::CriticalIndex) {
                bad.push(format!("W_fin routes: {} {}", d.label(), d.format_set(k)));
            }
            if k == 0 && fin.is_empty() == (ekor::alcove::is_j_quasisplit(d) && d.is_minuscule()) {
                bad.push(format!("J-quasisplit: {}", d.label()));
            }
            n[1] += 1;
            let max = adm.max_length(&adm.k_indices0(d, k)).unwrap_or(0) as i64;
            if max > d.mu_two_rho() || (max == d.mu_two_rho()) == fin.is_empty() {
                bad.push(format!("length bound: {} {}", d.label(), d.format_set(k)));
            }
        }
        (bad, n)
    });
    for (bad, n) in per {
        fails.extend(bad);
        counts[4] += n[0];
        counts[5] += n[1];
    }
    let detail = format!(
        "s tau {}, full support {}, s s' tau {}, translations {}, W_fin levels {}, length bound levels {}; {} failures{}",
        counts[0],
        counts[1],
        counts[2],
        counts[3],
        counts[4],
        counts[5],
        fails.len(),
        fails.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
    );
    Check::new(fails.is_empty(), detail)
}

fn ac7() -> Check {
    let t = Instant::now();
    let mut checks = Vec::new();
    for q in [2, 3, 4, 5, 7] {
        checks.push(verify_flag_polynomial(FlagPair::UnitaryA1, q).unwrap());
    }
    for q in [2, 3] {
        checks.push(verify_flag_polynomial(FlagPair::UnitaryA2, q).unwrap());
    }
    let ok = checks.iter().all(|c| c.agree);
    let counts: Vec<String> = checks.iter().map(|c| format!("q={} {}={}", c.q, c.polynomial, c.counted)).collect();
    Check::new(ok && within(t, Duration::from_secs(10)), format!("{}; {:?}", counts.join(", "), t.elapsed()))
}

fn level_pairs(d: &Datum) -> Vec<(NodeSet, NodeSet)> {
    let levels = sigma_stable_levels(d);
    let mut out = Vec::new();
    for &k in &levels {
        for &kp in &levels {
            if k & !kp == 0 && k != kp {
                out.push((k, kp));
            }
        }
    }
    out
}

fn ac8(corpus: &[Datum]) -> Check {
    let ctx = Ctx { exec: Exec::Sequential, ..Ctx::default() };
    let per = par::map(Exec::Parallel, corpus, |d| {
        let mut n = 0;
        let mut bad = Vec::new();
        for (k, kp) in level_pairs(d) {
            if matches!(situation(d, k, kp), Ok(Some(_))) {
                n += 1;
                if let Err(e) = fiber_table(d, k, kp, ctx, false) {
                    bad.push(format!("{} {} {}: {e}", d.label(), d.format_set(k), d.format_set(kp)));
                }
            }
        }
        (n, bad)
    });
    let n: usize = per.iter().map(|p| p.0).sum();
    let bad: Vec<&String> = per.iter().flat_map(|p| &p.1).collect();
    Check::new(
        bad.is_empty() && n > 0,
        format!("{n} instances, {} failures{}", bad.len(), bad.first().map(|b| format!(" (first: {b})")).unwrap_or_default()),
    )
}

fn res_corpus() -> Vec<Datum> {
    let mut out = Vec::new();
    for (f, r) in [(Family::A, 1), (Family::A, 2), (Family::A, 3), (Family::C, 2), (Family::B, 3)] {
        let comp = Component::get(f, r).unwrap();
        for delta in diagram_automorphisms(&comp) {
            for mu in dominant_coweights(&comp, 4) {
                for d in [2, 3] {
                    for at in [0, d - 1] {
                        let mut mus = vec![vec![0; r]; d];
                        mus[at] = mu.clone();
                        out.push(Datum::restrict_scalars(f, r, &delta, d, mus).unwrap());
                    }
                }
            }
        }
    }
    out
}

fn verdict(r: ekor::Result<classification::VerdictReport>) -> Result<Option<bool>, String> {
    match r {
        Ok(v) => Ok(v.verdict),
        Err(Error::Precondition(_)) => Ok(None),
        Err(e) => Err(e.to_string()),
    }
}

fn commutes(d: &Datum) -> Result<usize, String> {
    let ctx = Ctx { exec: Exec::Sequential, ..Ctx::default() };
    let col = d.collapse().map_err(|e| e.to_string())?;
    let inner = &col.inner;
    let deg = col.degree;
    let g = d.group();
    let ig = inner.group();
    let adm = AdmissibleSet::for_datum(d, ctx).map_err(|e| e.to_string())?;
    let iadm = AdmissibleSet::for_datum(inner, ctx).map_err(|e| e.to_string())?;
    let mut checked = 0;
    let lvl = |k: NodeSet| col.project_level(d, k);
    for k in sigma_stable_levels(d) {
        let k1 = lvl(k);
        inner.check_level(k1).map_err(|e| format!("level {}: {e}", d.format_set(k)))?;
        let outer0: BTreeSet<String> = adm.k_adm0(d, k).iter().map(|w| ig.format(&col.project(d, w))).collect();
        if outer0 != fmt_set(inner, &iadm.k_adm0(inner, k1)) || outer0.len() != adm.k_adm0(d, k).len() {
            return Err(format!("^K Adm_0 at {}", d.format_set(k)));
        }
        let pairs = [
            (classification::zero_dim_verdict(d, k, ctx), classification::zero_dim_verdict(inner, k1, ctx)),
            (classification::max_dim_verdict(d, k, ctx), classification::max_dim_verdict(inner, k1, ctx)),
            (classification::equi_max_verdict(d, k, ctx), classification::equi_max_verdict(inner, k1, ctx)),
        ];
        for (a, b) in pairs {
            checked += 1;
            if verdict(a)? != verdict(b)? {
                return Err(format!("verdict at {}", d.format_set(k)));
            }
        }
    }
    for (k, kp) in level_pairs(d) {
        let (k1, kp1) = (lvl(k), lvl(kp));
        checked += 1;
        let a = verdict(classification::discrete_fiber_verdict(d, k, kp, ctx))?;
        if a != verdict(classification::discrete_fiber_verdict(inner, k1, kp1, ctx))? {
            return Err(format!("discrete fiber at {} {}", d.format_set(k), d.format_set(kp)));
        }
        // pi' exists only in the Lubin-Tate and exotic shapes
        if situation(d, k, kp).map_err(|e| e.to_string())?.is_some() {
            for w in adm.k_adm0(d, k) {
                let outer = pi_prime(d, kp, &w).map_err(|e| e.to_string())?;
                let via = pi_prime(inner, kp1, &col.project(d, &w)).map_err(|e| e.to_string())?;
                if col.project(d, &outer) != via {
                    return Err(format!("pi' of {} at {}", g.format(&w), d.format_set(kp)));
                }
            }
            let ot = fiber_table(d, k, kp, ctx, false).map_err(|e| e.to_string())?;
            let it = fiber_table(inner, k1, kp1, ctx, false).map_err(|e| e.to_string())?;
            let lift: Vec<Poly> = it.rows.iter().map(|r| r.total.substitute_power(deg)).collect();
            let got: Vec<Poly> = ot.rows.iter().map(|r| r.total.clone()).collect();
            let mut a = lift.clone();
            let mut b = got.clone();
            a.sort();
            b.sort();
            if a != b {
                return Err(format!("fiber totals at {} {}: {got:?} vs {lift:?}", d.format_set(k), d.format_set(kp)));
            }
        }
    }
    Ok(checked)
}

fn ac9() -> Check {
    let data = res_corpus();
    let results = par::map(Exec::Parallel, &data, |d| commutes(d).map_err(|e| format!("{}: {e}", d.label())));
    let n: usize = results.iter().filter_map(|r| r.as_ref().ok()).sum();
    let bad: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    Check::new(
        bad.is_empty(),
        format!(
            "{} data, {n} verdict comparisons, {} failures{}",
            data.len(),
            bad.len(),
            bad.first().map(|b| format!(" (first: {b})")).unwrap_or_default()
        ),
    )
}

fn main() {
    let corpus = irreducible_corpus(&sweep_types(), 10).unwrap();
    let t = Instant::now();
    let summary = sweep(&corpus, Ctx::default());
    let took = t.elapsed();
    let results = [
        ("AC1", ac1()),
        ("AC2", ac2()),
        ("AC3", ac3()),
        ("AC4", ac4(&summary, took)),
        ("AC5", ac5(&summary)),
        ("AC6", ac6(&corpus)),
        ("AC7", ac7()),
        ("AC8", ac8(&corpus)),
        ("AC9", ac9()),
    ];
    let mut unexpected = Vec::new();
    for (id, c) in &results {
        println!("{id} {} {}", if c.pass { "PASS" } else { "FAIL" }, c.detail);
        // the equality clause of the quasi-rigid comparison is false
        let expected = *id != "AC5";
        if c.pass != expected {
            unexpected.push(*id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for {unexpected:?}");
        std::process::exit(1);
    }
}
