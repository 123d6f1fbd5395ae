//! The line-oriented system description format.
//!
//! ```text
//! [system]
//! n = 2
//! m = 1
//! x = t, th
//! y = r
//!
//! [F]
//! F[1][1][1] = -r
//!
//! [slice t]
//! phi = 1, 0
//! v = 1, 0
//!
//! [metric g]
//! g[1][1] = 1
//!
//! [options]
//! seed = 0x5EED
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use jetcurv_core::connection::Connection;
use jetcurv_core::jetcalc::JetContext;
use jetcurv_core::oracle::MATRIX_TOLERANCE;
use symcore::{Expr, DEFAULT_SEED, DEFAULT_TOLERANCE};

pub const DEFAULT_PROBE_POINTS: usize = 8;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("line {line}: {key}: {msg}")]
    Invalid { line: usize, key: String, msg: String },
    #[error("missing section [{0}]")]
    MissingSection(&'static str),
    #[error("[system]: missing key {0}")]
    MissingKey(&'static str),
    #[error("{0}")]
    Context(String),
}

fn invalid(line: usize, key: &str, msg: impl Into<String>) -> SpecError {
    SpecError::Invalid {
        line,
        key: key.to_string(),
        msg: msg.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub probe_points: usize,
    pub seed: u64,
    pub tol_sym: f64,
    pub tol_num: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            probe_points: DEFAULT_PROBE_POINTS,
            seed: DEFAULT_SEED,
            tol_sym: DEFAULT_TOLERANCE,
            tol_num: MATRIX_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SliceSpec {
    pub name: String,
    pub phi: Vec<Expr>,
    pub v: Vec<Expr>,
}

/// A parsed and validated system description.
#[derive(Clone, Debug)]
pub struct SystemSpec {
    pub ctx: Arc<JetContext>,
    /// `F[σ][i][j]` with zero-based indices and `i ≤ j`.
    pub f: BTreeMap<(usize, usize, usize), Expr>,
    pub slices: Vec<SliceSpec>,
    pub metric_g: Option<Vec<Vec<Expr>>>,
    pub metric_h: Option<Vec<Vec<Expr>>>,
    pub options: Options,
    /// Non-fatal notes, e.g. `F` entries defaulted to zero.
    pub warnings: Vec<String>,
}

impl SystemSpec {
    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    pub fn m(&self) -> usize {
        self.ctx.m()
    }

    pub fn connection(&self) -> Connection {
        Connection::new(self.ctx.clone(), |s, i, j| {
            let key = if i <= j { (s, i, j) } else { (s, j, i) };
            self.f.get(&key).cloned().unwrap_or_else(Expr::zero)
        })
    }

    pub fn slice(&self, name: &str) -> Option<&SliceSpec> {
        self.slices.iter().find(|s| s.name == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Section {
    System,
    F,
    Slice(String),
    Metric(String),
    Options,
}

struct Entry {
    line: usize,
    key: String,
    value: String,
}

/// `[a][b]...` after `prefix`, one-based and bounded.
fn indices(line: usize, key: &str, prefix: &str, bounds: &[usize]) -> Result<Vec<usize>, SpecError> {
    let rest = key
        .strip_prefix(prefix)
        .ok_or_else(|| invalid(line, key, format!("expected {prefix}[..]")))?;
    let mut out = Vec::new();
    let mut s = rest;
    while let Some(r) = s.strip_prefix('[') {
        let end = r.find(']').ok_or_else(|| invalid(line, key, "unclosed bracket"))?;
        let k: usize = r[..end]
            .trim()
            .parse()
            .map_err(|_| invalid(line, key, format!("index '{}' is not a positive integer", &r[..end])))?;
        out.push(k);
        s = &r[end + 1..];
    }
    if !s.trim().is_empty() || out.len() != bounds.len() {
        return Err(invalid(line, key, format!("expected {} indices", bounds.len())));
    }
    for (k, &b) in out.iter().zip(bounds) {
        if *k == 0 || *k > b {
            return Err(invalid(line, key, format!("index {k} out of range 1..={b}")));
        }
    }
    Ok(out.into_iter().map(|k| k - 1).collect())
}

/// Split on commas outside parentheses.
fn split_list(value: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in value.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    out.push(cur.trim().to_string());
    out
}

/// Seeds are hexadecimal, with or without `0x`.
pub fn parse_seed(text: &str) -> Option<u64> {
    let t = text.trim();
    match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(h, 16).ok(),
        None => u64::from_str_radix(t, 16).ok(),
    }
}

pub fn parse_spec(text: &str) -> Result<SystemSpec, SpecError> {
    let mut sections: Vec<(Section, Vec<Entry>)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(header) = content.strip_prefix('[').and_then(|h| h.strip_suffix(']')) {
            let mut words = header.split_whitespace();
            let section = match (words.next(), words.next(), words.next()) {
                (Some("system"), None, _) => Section::System,
                (Some("F"), None, _) => Section::F,
                (Some("options"), None, _) => Section::Options,
                (Some("slice"), Some(name), None) => Section::Slice(name.to_string()),
                (Some("metric"), Some(name @ ("g" | "h")), None) => Section::Metric(name.to_string()),
                _ => return Err(invalid(line, content, "unknown section")),
            };
            if sections.iter().any(|(s, _)| *s == section) {
                return Err(invalid(line, content, "duplicate section"));
            }
            sections.push((section, Vec::new()));
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| invalid(line, content, "expected key = value"))?;
        let (key, value) = (key.trim(), value.trim());
        let Some((_, entries)) = sections.last_mut() else {
            return Err(invalid(line, key, "entry before any section header"));
        };
        if entries.iter().any(|e: &Entry| e.key == key) {
            return Err(invalid(line, key, "duplicate key"));
        }
        entries.push(Entry {
            line,
            key: key.to_string(),
            value: value.to_string(),
        });
    }

    let system = sections
        .iter()
        .find(|(s, _)| *s == Section::System)
        .ok_or(SpecError::MissingSection("system"))?;
    let get = |key: &'static str| system.1.iter().find(|e| e.key == key).ok_or(SpecError::MissingKey(key));
    let dim = |key: &'static str| -> Result<usize, SpecError> {
        let e = get(key)?;
        e.value
            .parse::<usize>()
            .ok()
            .filter(|&k| k > 0)
            .ok_or_else(|| invalid(e.line, key, "must be a positive integer"))
    };
    let (n, m) = (dim("n")?, dim("m")?);
    let names = |key: &'static str, count: usize| -> Result<Vec<String>, SpecError> {
        let e = get(key)?;
        let list = split_list(&e.value);
        if list.len() != count || list.iter().any(String::is_empty) {
            return Err(invalid(e.line, key, format!("expected {count} names")));
        }
        Ok(list)
    };
    let x = names("x", n)?;
    let y = names("y", m)?;
    if let Some(e) = system
        .1
        .iter()
        .find(|e| !matches!(e.key.as_str(), "n" | "m" | "x" | "y"))
    {
        return Err(invalid(e.line, &e.key, "unknown key in [system]"));
    }
    let xr: Vec<&str> = x.iter().map(String::as_str).collect();
    let yr: Vec<&str> = y.iter().map(String::as_str).collect();
    let ctx = Arc::new(JetContext::new(&xr, &yr).map_err(|e| SpecError::Context(e.to_string()))?);
    let expr = |e: &Entry, text: &str| ctx.parse(text).map_err(|err| invalid(e.line, &e.key, err.to_string()));

    let mut spec = SystemSpec {
        ctx: ctx.clone(),
        f: BTreeMap::new(),
        slices: Vec::new(),
        metric_g: None,
        metric_h: None,
        options: Options::default(),
        warnings: Vec::new(),
    };
    for (section, entries) in &sections {
        match section {
            Section::System => {}
            Section::F => {
                for e in entries {
                    let ix = indices(e.line, &e.key, "F", &[m, n, n])?;
                    if ix[1] > ix[2] {
                        return Err(invalid(
                            e.line,
                            &e.key,
                            "use i <= j; F is symmetric in its lower indices",
                        ));
                    }
                    spec.f.insert((ix[0], ix[1], ix[2]), expr(e, &e.value)?);
                }
            }
            Section::Slice(name) => {
                let mut phi = None;
                let mut v = None;
                for e in entries {
                    let slot = match e.key.as_str() {
                        "phi" => &mut phi,
                        "v" => &mut v,
                        _ => return Err(invalid(e.line, &e.key, format!("unknown key in [slice {name}]"))),
                    };
                    let list = split_list(&e.value);
                    if list.len() != n {
                        return Err(invalid(e.line, &e.key, format!("expected {n} components")));
                    }
                    let comps = list.iter().map(|t| expr(e, t)).collect::<Result<Vec<_>, _>>()?;
                    if let Some(bad) = comps.iter().position(|c| !ctx.is_base_function(c)) {
                        return Err(invalid(
                            e.line,
                            &e.key,
                            format!("component {} must depend on {} only", bad + 1, x.join(", ")),
                        ));
                    }
                    *slot = Some(comps);
                }
                let phi = phi.ok_or_else(|| SpecError::Context(format!("[slice {name}]: missing key phi")))?;
                let v = v.ok_or_else(|| SpecError::Context(format!("[slice {name}]: missing key v")))?;
                spec.slices.push(SliceSpec {
                    name: name.clone(),
                    phi,
                    v,
                });
            }
            Section::Metric(name) => {
                let d = if name == "g" { n } else { m };
                let mut g = vec![vec![Expr::zero(); d]; d];
                let mut seen = vec![vec![false; d]; d];
                for e in entries {
                    let prefix = if e.key.starts_with(name.as_str()) {
                        name.as_str()
                    } else {
                        "g"
                    };
                    let ix = indices(e.line, &e.key, prefix, &[d, d])?;
                    let value = expr(e, &e.value)?;
                    let (i, j) = (ix[0], ix[1]);
                    if seen[j][i] && g[j][i] != value {
                        return Err(invalid(e.line, &e.key, "metric must be symmetric"));
                    }
                    seen[i][j] = true;
                    seen[j][i] = true;
                    g[i][j] = value.clone();
                    g[j][i] = value;
                }
                if name == "g" {
                    spec.metric_g = Some(g);
                } else {
                    spec.metric_h = Some(g);
                }
            }
            Section::Options => {
                for e in entries {
                    let bad = |what: &str| invalid(e.line, &e.key, format!("expected {what}"));
                    match e.key.as_str() {
                        "probe_points" => {
                            spec.options.probe_points = e
                                .value
                                .parse()
                                .ok()
                                .filter(|&k: &usize| k > 0)
                                .ok_or_else(|| bad("a positive integer"))?
                        }
                        "seed" => spec.options.seed = parse_seed(&e.value).ok_or_else(|| bad("a hexadecimal seed"))?,
                        "tol_sym" => {
                            spec.options.tol_sym = positive_float(&e.value).ok_or_else(|| bad("a positive number"))?
                        }
                        "tol_num" => {
                            spec.options.tol_num = positive_float(&e.value).ok_or_else(|| bad("a positive number"))?
                        }
                        _ => return Err(invalid(e.line, &e.key, "unknown key in [options]")),
                    }
                }
            }
        }
    }
    for s in 0..m {
        for i in 0..n {
            for j in i..n {
                if !spec.f.contains_key(&(s, i, j)) {
                    spec.warnings
                        .push(format!("F[{}][{}][{}] not given; using 0", s + 1, i + 1, j + 1));
                }
            }
        }
    }
    Ok(spec)
}

pub fn positive_float(text: &str) -> Option<f64> {
    text.trim().parse::<f64>().ok().filter(|v| v.is_finite() && *v > 0.0)
}
