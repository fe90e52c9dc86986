//! Analysis configuration: TOML in, validated datum and levels out.

use std::fmt;
use std::ops::Range;

use ekor::classification::sweep_types;
use ekor::frobenius::named_sigma;
use ekor::{AffineWeyl, Budget, Component, Datum, Family, NodeSet};
use serde::{Deserialize, Serialize};
use toml::Spanned;

/// A configuration error pinned to a line of the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigmaSpec {
    Named(String),
    Perm(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum MuSpec {
    Single(Vec<i32>),
    Multi(Vec<Vec<i32>>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    datum: Option<RawDatum>,
    level: Option<RawLevel>,
    options: Option<RawOptions>,
    sweep: Option<RawSweep>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDatum {
    family: Spanned<String>,
    rank: Spanned<usize>,
    degree: Option<Spanned<usize>>,
    sigma: Spanned<SigmaSpec>,
    mu: Spanned<MuSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLevel {
    k: Option<Spanned<Vec<String>>>,
    k_prime: Option<Spanned<Vec<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    q: Option<Vec<u32>>,
    max_two_rho: Option<Spanned<i64>>,
    max_size: Option<usize>,
    force_fibers: Option<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    types: Option<Spanned<Vec<String>>>,
    max_two_rho: Option<i64>,
}

/// Validated datum description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumSpec {
    pub family: Family,
    pub rank: usize,
    pub degree: usize,
    pub sigma: SigmaSpec,
    pub mu: Vec<Vec<i32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub types: Vec<String>,
    pub max_two_rho: i64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec { types: sweep_types().iter().map(|(f, r)| format!("{}{}", f.letter(), r)).collect(), max_two_rho: 10 }
    }
}

/// A validated configuration. Serializing it back to TOML and parsing again
/// yields the same value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datum: Option<DatumSpec>,
    #[serde(default)]
    pub k: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_prime: Option<Vec<String>>,
    pub q: Vec<u32>,
    pub budget: Budget,
    pub force_fibers: bool,
    pub sweep: SweepSpec,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            datum: None,
            k: Vec::new(),
            k_prime: None,
            q: vec![2, 3, 4, 5, 7],
            budget: Budget::default(),
            force_fibers: false,
            sweep: SweepSpec::default(),
        }
    }
}

fn line_of(text: &str, span: Range<usize>) -> usize {
    text[..span.start.min(text.len())].matches('\n').count() + 1
}

pub fn parse_type(s: &str) -> Option<(Family, usize)> {
    let s = s.trim();
    let fam = Family::parse(&s[..1]).ok()?;
    let rank = s[1..].parse().ok()?;
    Some((fam, rank))
}

impl DatumSpec {
    pub fn build(&self) -> ekor::Result<Datum> {
        let comp = Component::get(self.family, self.rank)?;
        let d = self.degree;
        match &self.sigma {
            SigmaSpec::Named(name) if d == 1 => Datum::irreducible(self.family, self.rank, name, self.mu[0].clone()),
            SigmaSpec::Named(name) => {
                let delta = named_sigma(&comp, name)?;
                Datum::restrict_scalars(self.family, self.rank, &delta, d, self.mu.clone())
            }
            SigmaSpec::Perm(p) => {
                let g = AffineWeyl::new(vec![comp; d])?;
                Datum::new(std::sync::Arc::new(g), p.clone(), self.mu.clone())
            }
        }
    }
}

impl AnalysisConfig {
    pub fn datum(&self) -> Option<ekor::Result<Datum>> {
        self.datum.as_ref().map(DatumSpec::build)
    }

    pub fn levels(&self, datum: &Datum) -> ekor::Result<(NodeSet, Option<NodeSet>)> {
        let k = datum.parse_set(&self.k)?;
        let kp = self.k_prime.as_ref().map(|v| datum.parse_set(v)).transpose()?;
        Ok((k, kp))
    }

    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        if let Some(d) = &self.datum {
            out.push_str("[datum]\n");
            out.push_str(&format!("family = \"{}\"\nrank = {}\ndegree = {}\n", d.family.letter(), d.rank, d.degree));
            match &d.sigma {
                SigmaSpec::Named(n) => out.push_str(&format!("sigma = \"{n}\"\n")),
                SigmaSpec::Perm(p) => out.push_str(&format!("sigma = {p:?}\n")),
            }
            out.push_str(&format!("mu = {:?}\n\n[level]\nk = {:?}\n", d.mu, self.k));
            if let Some(kp) = &self.k_prime {
                out.push_str(&format!("k_prime = {kp:?}\n"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "[options]\nq = {:?}\nmax_two_rho = {}\nmax_size = {}\nforce_fibers = {}\n\n",
            self.q, self.budget.max_two_rho, self.budget.max_size, self.force_fibers
        ));
        out.push_str(&format!("[sweep]\ntypes = {:?}\nmax_two_rho = {}\n", self.sweep.types, self.sweep.max_two_rho));
        out
    }
}

/// Parse and validate a configuration.
pub fn parse_config(text: &str) -> Result<AnalysisConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
        line: e.span().map(|s| line_of(text, s)).unwrap_or(1),
        message: e.message().to_string(),
    })?;
    let err = |span: Range<usize>, message: String| ConfigError { line: line_of(text, span), message };
    let mut cfg = AnalysisConfig::default();
    if let Some(o) = raw.options {
        if let Some(q) = o.q {
            cfg.q = q;
        }
        if let Some(m) = o.max_two_rho {
            cfg.budget.max_two_rho = *m.get_ref();
        }
        if let Some(m) = o.max_size {
            cfg.budget.max_size = m;
        }
        cfg.force_fibers = o.force_fibers.unwrap_or(false);
    }
    if let Some(s) = raw.sweep {
        if let Some(t) = s.types {
            for name in t.get_ref() {
                if parse_type(name).is_none() {
                    return Err(err(t.span(), format!("unknown affine type `{name}`")));
                }
            }
            cfg.sweep.types = t.into_inner();
        }
        if let Some(m) = s.max_two_rho {
            cfg.sweep.max_two_rho = m;
        }
    }
    let Some(d) = raw.datum else {
        if raw.level.is_some() {
            return Err(ConfigError { line: 1, message: "[level] needs a [datum] section".into() });
        }
        return Ok(cfg);
    };
    let family = Family::parse(d.family.get_ref()).map_err(|e| err(d.family.span(), e.to_string()))?;
    let rank = *d.rank.get_ref();
    Component::get(family, rank).map_err(|e| err(d.rank.span(), e.to_string()))?;
    let degree = d.degree.as_ref().map(|x| *x.get_ref()).unwrap_or(1);
    if degree == 0 {
        return Err(err(d.degree.unwrap().span(), "degree must be positive".into()));
    }
    let mu = match d.mu.get_ref() {
        MuSpec::Single(m) if degree == 1 => vec![m.clone()],
        MuSpec::Single(_) => {
            return Err(err(d.mu.span(), format!("degree {degree} needs one coweight per component")));
        }
        MuSpec::Multi(ms) => ms.clone(),
    };
    let spec = DatumSpec { family, rank, degree, sigma: d.sigma.get_ref().clone(), mu };
    let datum = spec.build().map_err(|e| {
        let span = match e {
            ekor::Error::InvalidSigma(_) => d.sigma.span(),
            _ => d.mu.span(),
        };
        err(span, e.to_string())
    })?;
    if datum.mu_two_rho() > cfg.budget.max_two_rho {
        return Err(err(
            d.mu.span(),
            format!("budget overflow: <mu, 2rho> = {} exceeds {}", datum.mu_two_rho(), cfg.budget.max_two_rho),
        ));
    }
    cfg.datum = Some(spec);
    if let Some(level) = raw.level {
        let mut k = 0;
        if let Some(names) = level.k {
            k = datum.parse_set(names.get_ref()).map_err(|e| err(names.span(), e.to_string()))?;
            datum.check_level(k).map_err(|e| err(names.span(), e.to_string()))?;
            cfg.k = names.into_inner();
        }
        if let Some(names) = level.k_prime {
            let kp = datum.parse_set(names.get_ref()).map_err(|e| err(names.span(), e.to_string()))?;
            datum.check_level(kp).map_err(|e| err(names.span(), e.to_string()))?;
            if k & !kp != 0 || k == kp {
                return Err(err(names.span(), "k must be a proper subset of k_prime".into()));
            }
            cfg.k_prime = Some(names.into_inner());
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GU3: &str = "[datum]\nfamily = \"A\"\nrank = 2\nsigma = \"varsigma0\"\nmu = [1, 0]\n\n[level]\nk_prime = [\"s0\"]\n";

    #[test]
    fn round_trip() {
        let cfg = parse_config(GU3).unwrap();
        assert_eq!(parse_config(&cfg.to_toml()).unwrap(), cfg);
        let datum = cfg.datum().unwrap().unwrap();
        assert_eq!(datum.sigma().perm(), &[0, 2, 1]);
    }

    #[test]
    fn errors_carry_lines() {
        let bad = GU3.replace("k_prime = [\"s0\"]", "k = [\"s1\"]");
        let e = parse_config(&bad).unwrap_err();
        assert_eq!(e.line, 8);
        assert!(e.message.contains("not sigma-stable"), "{e}");
        let e = parse_config(&GU3.replace("\"A\"", "\"Q\"")).unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_config(&GU3.replace("varsigma0", "rho9x")).unwrap_err();
        assert_eq!(e.line, 4);
        let e = parse_config(&GU3.replace("[1, 0]", "[9, 9]")).unwrap_err();
        assert!(e.message.contains("budget overflow"));
        assert_eq!(e.line, 5);
    }
}
