//! Running analyses and rendering their reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ekor::admissible::maximal_elements;
use ekor::alcove::{self, critical_indices, w_mu_k_fin, AlcoveVertex, FinRoute};
use ekor::classification::{
    self, canonical, drinfeld_qrig_verdict, fully_hn_shape, is_exotic_unitary, is_extended_lubin_tate,
    irreducible_corpus, sigma_stable_levels, CanonicalForm, HnShape, SweepSummary, VerdictReport,
};
use ekor::fibers::{fiber_table, FiberReport};
use ekor::hermitian::{verify_flag_polynomial, FlagPair, OracleCheck};
use ekor::{AdmissibleSet, Ctx, Datum, Error, NodeSet};
use serde::Serialize;

use crate::config::{parse_type, AnalysisConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Lists longer than this are cut in reports and marked as truncated.
const LIST_CAP: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Adm,
    Crit,
    Classify,
    Fibers,
    Star,
    Oracle,
    Sweep,
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Adm => "adm",
            Command::Crit => "crit",
            Command::Classify => "classify",
            Command::Fibers => "fibers",
            Command::Star => "star",
            Command::Oracle => "oracle",
            Command::Sweep => "sweep",
            Command::All => "all",
        }
    }
}

/// Why a run could not produce a clean report.
#[derive(Debug)]
pub enum RunError {
    /// The config does not support the requested subcommand.
    Usage(String),
    /// An internal consistency check failed.
    Invariant(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementList {
    pub count: usize,
    pub elements: Vec<String>,
    pub truncated: bool,
}

impl ElementList {
    fn new(elements: Vec<String>) -> ElementList {
        let count = elements.len();
        let truncated = count > LIST_CAP;
        ElementList { count, elements: elements.into_iter().take(LIST_CAP).collect(), truncated }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DatumInfo {
    pub label: String,
    pub group: String,
    pub sigma: String,
    pub tau: String,
    pub mu_two_rho: i64,
    pub level: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level_prime: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmSection {
    pub adm: ElementList,
    pub k_adm: ElementList,
    pub k_adm0: ElementList,
    pub max_length: Option<u32>,
    pub mu_two_rho: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_prime_adm0: Option<ElementList>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CritRow {
    pub element: String,
    pub critical: Vec<Vec<usize>>,
    pub quasi_rigid: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CritSection {
    pub vertices: Vec<AlcoveVertex>,
    pub rows: Vec<CritRow>,
    pub rows_truncated: bool,
    pub j_quasisplit: bool,
    /// `W(μ)_{K,fin}` as translation elements; both routes agreed.
    pub w_fin: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drinfeld_qrig: Option<VerdictReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Undefined {
    pub predicate: String,
    pub level: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical: Option<CanonicalForm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<HnShape>,
    pub lubin_tate: bool,
    pub exotic_unitary: bool,
    pub verdicts: Vec<VerdictReport>,
    pub undefined: Vec<Undefined>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StarSection {
    pub maximal: Vec<String>,
    pub translations: Vec<String>,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Truncation {
    pub section: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub command: String,
    pub config: AnalysisConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub datum: Option<DatumInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adm: Option<AdmSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crit: Option<CritSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fibers: Option<FiberReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub star: Option<StarSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Vec<OracleCheck>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSummary>,
    /// Sections cut short by the enumeration budget.
    pub truncated: Vec<Truncation>,
    /// Sections skipped because they do not apply to this datum.
    pub skipped: Vec<Truncation>,
}

impl AnalysisReport {
    /// Any disagreement or oracle mismatch in the report.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut verdicts: Vec<&VerdictReport> = Vec::new();
        if let Some(c) = &self.classify {
            verdicts.extend(&c.verdicts);
        }
        if let Some(r) = self.crit.as_ref().and_then(|c| c.drinfeld_qrig.as_ref()) {
            verdicts.push(r);
        }
        for r in verdicts.into_iter().filter(|r| !r.agree) {
            out.push(format!("{} at {} disagrees: {}", r.predicate, r.level, r.note));
        }
        for c in self.oracle.iter().flatten().filter(|c| !c.agree) {
            out.push(format!("oracle {:?} at q={} counted {} expected {}", c.pair, c.q, c.counted, c.predicted));
        }
        if let Some(s) = &self.sweep {
            for r in &s.disagreements {
                out.push(format!("sweep: {} on {} at {} disagrees", r.predicate, r.datum, r.level));
            }
            out.extend(s.errors.iter().map(|e| format!("sweep error: {e}")));
        }
        out
    }

    /// Every verdict the report carries.
    pub fn verdicts(&self) -> Vec<&VerdictReport> {
        let mut v: Vec<&VerdictReport> = Vec::new();
        if let Some(c) = &self.crit {
            v.extend(c.drinfeld_qrig.as_ref());
        }
        if let Some(c) = &self.classify {
            v.extend(&c.verdicts);
        }
        v
    }
}

/// Cycle notation for a node permutation, e.g. `(s0)(s1 s2)`.
pub fn cycles(datum: &Datum) -> String {
    let g = datum.group();
    let perm = datum.sigma().perm();
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cyc.push(g.node_name(x));
            x = perm[x];
        }
        write!(out, "({})", cyc.join(" ")).unwrap();
    }
    out
}

enum Outcome<T> {
    Done(T),
    Truncated(String),
    Skipped(String),
}

fn classify_err<T>(e: Error) -> Result<Outcome<T>, RunError> {
    match e {
        Error::Budget(m) => Ok(Outcome::Truncated(m)),
        Error::Precondition(m) => Ok(Outcome::Skipped(m)),
        Error::Invariant(m) => Err(RunError::Invariant(m)),
        other => Err(RunError::Usage(other.to_string())),
    }
}

fn lift<T>(r: ekor::Result<T>) -> Result<Outcome<T>, RunError> {
    match r {
        Ok(x) => Ok(Outcome::Done(x)),
        Err(e) => classify_err(e),
    }
}

fn adm_section(datum: &Datum, k: NodeSet, kp: Option<NodeSet>, ctx: Ctx) -> ekor::Result<AdmSection> {
    let g = datum.group();
    let adm = AdmissibleSet::for_datum(datum, ctx)?;
    let fmt = |ws: Vec<ekor::Elem>| ElementList::new(ws.iter().map(|w| g.format(w)).collect());
    let idx0 = adm.k_indices0(datum, k);
    Ok(AdmSection {
        adm: fmt(adm.elements().to_vec()),
        k_adm: fmt(adm.k_adm(k)),
        max_length: adm.max_length(&idx0),
        k_adm0: fmt(adm.k_adm0(datum, k)),
        mu_two_rho: datum.mu_two_rho(),
        k_prime_adm0: kp.map(|kp| fmt(adm.k_adm0(datum, kp))),
    })
}

fn crit_section(datum: &Datum, k: NodeSet, ctx: Ctx) -> ekor::Result<CritSection> {
    let g = datum.group();
    let adm = AdmissibleSet::for_datum(datum, ctx)?;
    let kadm = adm.k_adm(k);
    let rows: Vec<CritRow> = kadm
        .iter()
        .take(LIST_CAP)
        .map(|x| {
            let critical = critical_indices(g, x);
            let quasi_rigid = critical.iter().all(|c| !c.is_empty());
            CritRow { element: g.format(x), critical, quasi_rigid }
        })
        .collect();
    let fin = w_mu_k_fin(datum, k, FinRoute::SigmaSupport);
    if fin != w_mu_k_fin(datum, k, FinRoute::CriticalIndex) {
        return Err(Error::Invariant("W(mu)_K,fin differs between its two characterizations".into()));
    }
    let drinfeld = if g.components().len() == 1 { Some(drinfeld_qrig_verdict(datum, k, ctx)?) } else { None };
    Ok(CritSection {
        vertices: alcove::vertices(g),
        rows_truncated: kadm.len() > LIST_CAP,
        rows,
        j_quasisplit: alcove::is_j_quasisplit(datum),
        w_fin: fin.iter().map(|l| g.format(&g.translation(l))).collect(),
        drinfeld_qrig: drinfeld,
    })
}

fn classify_section(datum: &Datum, k: NodeSet, kp: Option<NodeSet>, ctx: Ctx) -> Result<ClassifySection, RunError> {
    let soft = |r: ekor::Result<bool>| -> Result<bool, RunError> {
        match r {
            Ok(b) => Ok(b),
            Err(Error::Precondition(_)) => Ok(false),
            Err(e) => classify_err::<()>(e).map(|_| false),
        }
    };
    let mut sec = ClassifySection {
        canonical: canonical(datum).ok(),
        shape: fully_hn_shape(datum).ok(),
        lubin_tate: soft(is_extended_lubin_tate(datum))?,
        exotic_unitary: soft(is_exotic_unitary(datum))?,
        verdicts: Vec::new(),
        undefined: Vec::new(),
    };
    let mut record = |name: &str, level: String, r: ekor::Result<VerdictReport>| -> Result<(), RunError> {
        match r {
            Ok(v) => sec.verdicts.push(v),
            Err(Error::Precondition(reason)) | Err(Error::Budget(reason)) => {
                sec.undefined.push(Undefined { predicate: name.into(), level, reason })
            }
            Err(e) => return classify_err::<()>(e).map(|_| ()),
        }
        Ok(())
    };
    for level in sigma_stable_levels(datum) {
        let name = datum.format_set(level);
        record("zero_dim", name.clone(), classification::zero_dim_verdict(datum, level, ctx))?;
        record("max_dim", name.clone(), classification::max_dim_verdict(datum, level, ctx))?;
        record("equi_max", name, classification::equi_max_verdict(datum, level, ctx))?;
    }
    if let Some(kp) = kp {
        let name = datum.format_set(k);
        record("discrete_fiber", name, classification::discrete_fiber_verdict(datum, k, kp, ctx))?;
    }
    Ok(sec)
}

fn star_section(datum: &Datum, k: NodeSet, ctx: Ctx) -> ekor::Result<StarSection> {
    let g = datum.group();
    let adm = AdmissibleSet::for_datum(datum, ctx)?;
    let zero = adm.k_adm0(datum, k);
    let max = maximal_elements(datum, k, &zero, ctx.exec);
    let fin = w_mu_k_fin(datum, k, FinRoute::SigmaSupport);
    let mut trans: Vec<ekor::Elem> = fin.iter().map(|l| g.translation(l)).collect();
    trans.sort_by_key(|t| ekor::admissible::sort_key(g, t));
    let holds = max.len() == trans.len() && max.iter().all(|m| trans.contains(m));
    Ok(StarSection {
        maximal: max.iter().map(|w| g.format(w)).collect(),
        translations: trans.iter().map(|w| g.format(w)).collect(),
        holds,
    })
}

fn oracle_section(qs: &[u32]) -> Result<Vec<OracleCheck>, RunError> {
    let mut out = Vec::new();
    for &q in qs {
        let mut pairs = vec![FlagPair::SplitA1];
        if q <= 9 {
            pairs.push(FlagPair::UnitaryA1);
        }
        if q <= 3 {
            pairs.push(FlagPair::UnitaryA2);
        }
        for pair in pairs {
            match verify_flag_polynomial(pair, q) {
                Ok(c) => out.push(c),
                Err(Error::Precondition(m)) | Err(Error::Budget(m)) => {
                    return Err(RunError::Usage(format!("oracle at q={q}: {m}")))
                }
                Err(e) => return Err(RunError::Invariant(e.to_string())),
            }
        }
    }
    Ok(out)
}

/// Execute one subcommand against a validated config.
pub fn run_analysis(cfg: &AnalysisConfig, cmd: Command, ctx: Ctx) -> Result<AnalysisReport, RunError> {
    let mut report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        command: cmd.name().into(),
        config: cfg.clone(),
        datum: None,
        adm: None,
        crit: None,
        classify: None,
        fibers: None,
        star: None,
        oracle: None,
        sweep: None,
        truncated: Vec::new(),
        skipped: Vec::new(),
    };
    let wants = |c: Command| cmd == c || (cmd == Command::All && c != Command::Sweep);
    if wants(Command::Oracle) {
        report.oracle = Some(oracle_section(&cfg.q)?);
    }
    if cmd == Command::Sweep {
        let types: Vec<_> = cfg.sweep.types.iter().filter_map(|t| parse_type(t)).collect();
        let data = irreducible_corpus(&types, cfg.sweep.max_two_rho).map_err(|e| RunError::Usage(e.to_string()))?;
        report.sweep = Some(classification::sweep(&data, ctx));
    }
    if matches!(cmd, Command::Oracle | Command::Sweep) {
        return Ok(report);
    }
    let datum = match cfg.datum() {
        Some(d) => d.map_err(|e| RunError::Usage(e.to_string()))?,
        None => return Err(RunError::Usage(format!("`{}` needs a [datum] section", cmd.name()))),
    };
    let (k, kp) = cfg.levels(&datum).map_err(|e| RunError::Usage(e.to_string()))?;
    if cmd == Command::Fibers && kp.is_none() {
        return Err(RunError::Usage("`fibers` needs level.k_prime".into()));
    }
    report.datum = Some(DatumInfo {
        label: datum.label(),
        group: datum.group().name(),
        sigma: cycles(&datum),
        tau: datum.group().format(datum.tau()),
        mu_two_rho: datum.mu_two_rho(),
        level: datum.format_set(k),
        level_prime: kp.map(|kp| datum.format_set(kp)),
    });
    let note = |section: &str, o: Outcome<()>, report: &mut AnalysisReport| {
        let entry = |reason| Truncation { section: section.into(), reason };
        match o {
            Outcome::Done(()) => {}
            Outcome::Truncated(r) => report.truncated.push(entry(r)),
            Outcome::Skipped(r) => report.skipped.push(entry(r)),
        }
    };
    macro_rules! section {
        ($cmd:expr, $name:literal, $field:ident, $e:expr) => {
            if wants($cmd) {
                match lift($e)? {
                    Outcome::Done(x) => report.$field = Some(x),
                    Outcome::Truncated(r) => note($name, Outcome::Truncated(r), &mut report),
                    Outcome::Skipped(r) => note($name, Outcome::Skipped(r), &mut report),
                }
            }
        };
    }
    section!(Command::Adm, "adm", adm, adm_section(&datum, k, kp, ctx));
    section!(Command::Crit, "crit", crit, crit_section(&datum, k, ctx));
    if wants(Command::Classify) {
        report.classify = Some(classify_section(&datum, k, kp, ctx)?);
    }
    match kp {
        Some(kp) => section!(Command::Fibers, "fibers", fibers, fiber_table(&datum, k, kp, ctx, cfg.force_fibers)),
        None if wants(Command::Fibers) => {
            note("fibers", Outcome::Skipped("no level.k_prime given".into()), &mut report)
        }
        None => {}
    }
    section!(Command::Star, "star", star, star_section(&datum, k, ctx));
    Ok(report)
}

/// Re-verify every witness in a JSON report, returning `(checked, failed)`.
pub fn recheck_report(text: &str) -> Result<(usize, Vec<String>), String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| format!("report is not JSON: {e}"))?;
    let cfg: AnalysisConfig = serde_json::from_value(value.get("config").cloned().unwrap_or_default())
        .map_err(|e| format!("report carries no usable config: {e}"))?;
    let mut found = Vec::new();
    collect_verdicts(&value, &mut found);
    if found.is_empty() {
        return Ok((0, Vec::new()));
    }
    let datum = match cfg.datum() {
        Some(Ok(d)) => d,
        Some(Err(e)) => return Err(e.to_string()),
        None => return Err("report has verdicts but no datum".into()),
    };
    let mut failed = Vec::new();
    for v in &found {
        let ok = classification::recheck(&datum, v).map_err(|e| e.to_string())?;
        if !ok {
            failed.push(format!("{} at {}", v.predicate, v.level));
        }
    }
    Ok((found.len(), failed))
}

fn collect_verdicts(v: &serde_json::Value, out: &mut Vec<VerdictReport>) {
    match v {
        serde_json::Value::Object(map) => {
            if map.contains_key("predicate") && map.contains_key("witness") {
                if let Ok(r) = serde_json::from_value::<VerdictReport>(v.clone()) {
                    out.push(r);
                    return;
                }
            }
            map.values().for_each(|x| collect_verdicts(x, out));
        }
        serde_json::Value::Array(xs) => xs.iter().for_each(|x| collect_verdicts(x, out)),
        _ => {}
    }
}

fn yes_no(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "yes",
        Some(false) => "no",
        None => "-",
    }
}

fn list(out: &mut String, title: &str, l: &ElementList) {
    let more = if l.truncated { " (truncated)" } else { "" };
    writeln!(out, "{title} ({}){more}", l.count).unwrap();
    for e in &l.elements {
        writeln!(out, "  {e}").unwrap();
    }
}

/// Human-readable rendering.
pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    writeln!(out, "ekor report, schema {}, command {}", r.schema_version, r.command).unwrap();
    if let Some(d) = &r.datum {
        writeln!(out, "datum  {}", d.label).unwrap();
        writeln!(out, "sigma  {}", d.sigma).unwrap();
        writeln!(out, "tau    {}", d.tau).unwrap();
        writeln!(out, "<mu,2rho> = {}", d.mu_two_rho).unwrap();
        match &d.level_prime {
            Some(kp) => writeln!(out, "K = {}  K' = {kp}", d.level).unwrap(),
            None => writeln!(out, "K = {}", d.level).unwrap(),
        }
    }
    if let Some(a) = &r.adm {
        writeln!(out, "\n== admissible set").unwrap();
        list(&mut out, "Adm(mu)", &a.adm);
        list(&mut out, "^K Adm(mu)", &a.k_adm);
        list(&mut out, "^K Adm(mu)_0", &a.k_adm0);
        if let Some(l) = &a.k_prime_adm0 {
            list(&mut out, "^K' Adm(mu)_0", l);
        }
        let max = a.max_length.map(|m| m.to_string()).unwrap_or_else(|| "-".into());
        writeln!(out, "max length on ^K Adm(mu)_0: {max}").unwrap();
    }
    if let Some(c) = &r.crit {
        writeln!(out, "\n== critical indices").unwrap();
        writeln!(out, "{:<28} {:<16} quasi-rigid", "element", "Crit").unwrap();
        for row in &c.rows {
            let crit: Vec<String> = row.critical.iter().map(|c| format!("{c:?}")).collect();
            writeln!(out, "{:<28} {:<16} {}", row.element, crit.join(" "), if row.quasi_rigid { "yes" } else { "no" })
                .unwrap();
        }
        if c.rows_truncated {
            writeln!(out, "  (truncated)").unwrap();
        }
        writeln!(out, "J-quasisplit: {}", if c.j_quasisplit { "yes" } else { "no" }).unwrap();
        writeln!(out, "W(mu)_K,fin: {}", if c.w_fin.is_empty() { "empty".into() } else { c.w_fin.join(", ") })
            .unwrap();
    }
    let verdicts = r.verdicts();
    if !verdicts.is_empty() {
        writeln!(out, "\n== verdicts").unwrap();
        writeln!(out, "{:<16} {:<20} {:>6} {:>6} {:>7} {:>6}  note", "predicate", "level", "first", "table", "verdict", "agree")
            .unwrap();
        for v in verdicts {
            let level = match &v.level_prime {
                Some(kp) => format!("{} < {kp}", v.level),
                None => v.level.clone(),
            };
            writeln!(
                out,
                "{:<16} {:<20} {:>6} {:>6} {:>7} {:>6}  {}",
                v.predicate,
                level,
                yes_no(v.first_principles),
                yes_no(v.structural),
                yes_no(v.verdict),
                if v.agree { "yes" } else { "NO" },
                v.note
            )
            .unwrap();
        }
    }
    if let Some(c) = &r.classify {
        if let Some(form) = &c.canonical {
            writeln!(out, "canonical form: {}{} sigma {:?} mu {:?}", form.family.letter(), form.rank, form.sigma, form.mu)
                .unwrap();
        }
        let shape = match &c.shape {
            Some(HnShape::Collapsed { row, degree, .. }) => format!("fully HN, collapses (degree {degree}) to {}", row.label()),
            Some(HnShape::HilbertBlumenthal { .. }) => "fully HN, Hilbert-Blumenthal type".into(),
            Some(HnShape::NotFullyHn) => "not fully HN decomposable".into(),
            None => "outside the classification".into(),
        };
        writeln!(out, "shape: {shape}").unwrap();
        writeln!(out, "Lubin-Tate: {}  exotic unitary: {}", c.lubin_tate, c.exotic_unitary).unwrap();
        for u in &c.undefined {
            writeln!(out, "undefined {} at {}: {}", u.predicate, u.level, u.reason).unwrap();
        }
    }
    if let Some(f) = &r.fibers {
        writeln!(out, "\n== fibers {} -> {}", f.level, f.level_prime).unwrap();
        writeln!(out, "pi':").unwrap();
        for (a, b) in &f.pi_prime {
            writeln!(out, "  {a:<24} -> {b}").unwrap();
        }
        writeln!(out, "{:<24} {:<12} {:<14} total", "target", "I(K',w)", "poly").unwrap();
        for row in &f.rows {
            writeln!(out, "{:<24} {:<12} {:<14} {}", row.target, row.i_k_prime, row.target_poly.to_string(), row.total)
                .unwrap();
        }
    }
    if let Some(s) = &r.star {
        writeln!(out, "\n== condition star: {}", if s.holds { "holds" } else { "fails" }).unwrap();
        writeln!(out, "maximal elements: {}", s.maximal.join(", ")).unwrap();
        writeln!(out, "translations:     {}", s.translations.join(", ")).unwrap();
    }
    if let Some(o) = &r.oracle {
        writeln!(out, "\n== oracle").unwrap();
        writeln!(out, "{:<12} {:>3} {:<10} {:>9} {:>8}", "pair", "q", "poly", "predicted", "counted").unwrap();
        for c in o {
            writeln!(out, "{:<12} {:>3} {:<10} {:>9} {:>8}", format!("{:?}", c.pair), c.q, c.polynomial, c.predicted, c.counted)
                .unwrap();
        }
    }
    if let Some(s) = &r.sweep {
        writeln!(out, "\n== sweep over {} data", s.data).unwrap();
        writeln!(out, "{:<16} {:>9} {:>6} {:>8} {:>9} {:>9}", "predicate", "instances", "both", "disagree", "undefined", "secondary")
            .unwrap();
        let tallies: &BTreeMap<_, _> = &s.tallies;
        for (name, t) in tallies {
            writeln!(
                out,
                "{:<16} {:>9} {:>6} {:>8} {:>9} {:>9}",
                name, t.instances, t.both_defined, t.disagreements, t.undefined, t.secondary_failures
            )
            .unwrap();
        }
        for e in &s.errors {
            writeln!(out, "error: {e}").unwrap();
        }
    }
    for t in &r.truncated {
        writeln!(out, "TRUNCATED {}: {}", t.section, t.reason).unwrap();
    }
    for t in &r.skipped {
        writeln!(out, "skipped {}: {}", t.section, t.reason).unwrap();
    }
    out
}

pub fn render_json(r: &AnalysisReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("reports serialize");
    s.push('\n');
    s
}
