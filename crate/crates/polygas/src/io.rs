//! Line-oriented text formats for systems, subset-gas specs, activities,
//! reference weights, and volumes. Parse failures carry the path and the
//! 1-based line number. `#` starts a comment anywhere on a line.

use std::collections::BTreeSet;
use std::path::Path;

use crate::criteria::MuVector;
use crate::error::{Error, Result};
use crate::model::{PolymerSubset, PolymerSystem, SubsetGasSpec};
use crate::numeric::{parse_rational, Rational};
use crate::partition::ActivityVector;

fn parse_err(path: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), line, msg: msg.into() }
}

/// Meaningful lines of a document: comment-stripped, trimmed, nonempty,
/// paired with their 1-based line numbers.
fn meaningful(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            None
        } else {
            Some((i + 1, body))
        }
    })
}

fn parse_usize(path: &str, line: usize, token: &str, what: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| parse_err(path, line, format!("expected {what}, got `{token}`")))
}

fn parse_value(path: &str, line: usize, token: &str) -> Result<Rational> {
    parse_rational(token)
        .ok_or_else(|| parse_err(path, line, format!("expected rational `p` or `p/q`, got `{token}`")))
}

/// System document: header `polymers N`, then `incompat i j` for each
/// cross-incompatible pair and optional `label i <text>` lines. Listing a
/// self-loop is an error; self-incompatibility is implicit.
pub fn parse_system_text(text: &str, path: &str) -> Result<PolymerSystem> {
    let mut system: Option<PolymerSystem> = None;
    for (ln, body) in meaningful(text) {
        let mut parts = body.split_whitespace();
        let key = parts.next().unwrap_or("");
        match key {
            "polymers" => {
                if system.is_some() {
                    return Err(parse_err(path, ln, "duplicate `polymers` header"));
                }
                let n = parse_usize(path, ln, parts.next().unwrap_or(""), "polymer count")?;
                if parts.next().is_some() {
                    return Err(parse_err(path, ln, "trailing tokens after `polymers N`"));
                }
                system = Some(PolymerSystem::new(n));
            }
            "incompat" => {
                let sys = system
                    .as_mut()
                    .ok_or_else(|| parse_err(path, ln, "`incompat` before `polymers N`"))?;
                let i = parse_usize(path, ln, parts.next().unwrap_or(""), "polymer id")?;
                let j = parse_usize(path, ln, parts.next().unwrap_or(""), "polymer id")?;
                if parts.next().is_some() {
                    return Err(parse_err(path, ln, "trailing tokens after `incompat i j`"));
                }
                if i == j {
                    return Err(parse_err(
                        path,
                        ln,
                        format!("self-loop `incompat {i} {i}` is implicit; remove it"),
                    ));
                }
                sys.add_incompatibility(i, j)
                    .map_err(|e| parse_err(path, ln, e.to_string()))?;
            }
            "label" => {
                let sys = system
                    .as_mut()
                    .ok_or_else(|| parse_err(path, ln, "`label` before `polymers N`"))?;
                let i = parse_usize(path, ln, parts.next().unwrap_or(""), "polymer id")?;
                let text: Vec<&str> = parts.collect();
                if text.is_empty() {
                    return Err(parse_err(path, ln, "empty label"));
                }
                sys.set_label(i, text.join(" "))
                    .map_err(|e| parse_err(path, ln, e.to_string()))?;
            }
            other => return Err(parse_err(path, ln, format!("unknown directive `{other}`"))),
        }
    }
    system.ok_or_else(|| parse_err(path, 1, "missing `polymers N` header"))
}

/// Subset-gas document: `space N`, optional `edge u v` lines, and a
/// required `maxsize k` (the truncation is never silent).
pub fn parse_subset_gas_text(text: &str, path: &str) -> Result<SubsetGasSpec> {
    let mut sites: Option<usize> = None;
    let mut max_size: Option<usize> = None;
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for (ln, body) in meaningful(text) {
        let mut parts = body.split_whitespace();
        let key = parts.next().unwrap_or("");
        match key {
            "space" => {
                if sites.is_some() {
                    return Err(parse_err(path, ln, "duplicate `space` line"));
                }
                sites = Some(parse_usize(path, ln, parts.next().unwrap_or(""), "site count")?);
            }
            "edge" => {
                let u = parse_usize(path, ln, parts.next().unwrap_or(""), "site id")?;
                let v = parse_usize(path, ln, parts.next().unwrap_or(""), "site id")?;
                edges.push((ln, u, v));
            }
            "maxsize" => {
                if max_size.is_some() {
                    return Err(parse_err(path, ln, "duplicate `maxsize` line"));
                }
                max_size = Some(parse_usize(path, ln, parts.next().unwrap_or(""), "size cap")?);
            }
            other => return Err(parse_err(path, ln, format!("unknown directive `{other}`"))),
        }
    }
    let sites = sites.ok_or_else(|| parse_err(path, 1, "missing `space N` line"))?;
    let max_size = max_size.ok_or_else(|| parse_err(path, 1, "missing `maxsize k` line"))?;
    let mut spec = SubsetGasSpec::new(sites, max_size)
        .map_err(|e| parse_err(path, 1, e.to_string()))?;
    for (ln, u, v) in edges {
        spec.add_edge(u, v).map_err(|e| parse_err(path, ln, e.to_string()))?;
    }
    Ok(spec)
}

/// Activities document: one `w i <rational>` line per polymer, each id
/// exactly once.
pub fn parse_activities_text(text: &str, path: &str, n: usize) -> Result<ActivityVector> {
    let mut seen: Vec<Option<Rational>> = vec![None; n];
    for (ln, body) in meaningful(text) {
        let mut parts = body.split_whitespace();
        if parts.next() != Some("w") {
            return Err(parse_err(path, ln, "expected `w i <rational>`"));
        }
        let i = parse_usize(path, ln, parts.next().unwrap_or(""), "polymer id")?;
        if i >= n {
            return Err(parse_err(path, ln, format!("polymer id {i} out of range (system has {n})")));
        }
        let value = parse_value(path, ln, parts.next().unwrap_or(""))?;
        if parts.next().is_some() {
            return Err(parse_err(path, ln, "trailing tokens after `w i <rational>`"));
        }
        if seen[i].is_some() {
            return Err(parse_err(path, ln, format!("duplicate activity for polymer {i}")));
        }
        seen[i] = Some(value);
    }
    let mut values = Vec::with_capacity(n);
    for (i, slot) in seen.into_iter().enumerate() {
        match slot {
            Some(v) => values.push(v),
            None => return Err(parse_err(path, 1, format!("no activity given for polymer {i}"))),
        }
    }
    Ok(ActivityVector::from_values(values))
}

/// Reference-weight document: either a single `mu uniform <rational>` line
/// or one `mu i <rational>` line per polymer, each id exactly once.
pub fn parse_mu_text(text: &str, path: &str, n: usize) -> Result<MuVector> {
    let mut seen: Vec<Option<Rational>> = vec![None; n];
    let mut uniform: Option<Rational> = None;
    let mut per_id = false;
    for (ln, body) in meaningful(text) {
        let mut parts = body.split_whitespace();
        if parts.next() != Some("mu") {
            return Err(parse_err(path, ln, "expected `mu i <rational>` or `mu uniform <rational>`"));
        }
        let selector = parts.next().unwrap_or("");
        let value = parse_value(path, ln, parts.next().unwrap_or(""))?;
        if parts.next().is_some() {
            return Err(parse_err(path, ln, "trailing tokens on `mu` line"));
        }
        if selector == "uniform" {
            if uniform.is_some() {
                return Err(parse_err(path, ln, "duplicate `mu uniform` line"));
            }
            uniform = Some(value);
        } else {
            let i = parse_usize(path, ln, selector, "polymer id")?;
            if i >= n {
                return Err(parse_err(path, ln, format!("polymer id {i} out of range (system has {n})")));
            }
            if seen[i].is_some() {
                return Err(parse_err(path, ln, format!("duplicate weight for polymer {i}")));
            }
            seen[i] = Some(value);
            per_id = true;
        }
    }
    if let Some(value) = uniform {
        if per_id {
            return Err(parse_err(path, 1, "mix of `mu uniform` and per-id `mu` lines"));
        }
        return MuVector::uniform(n, value);
    }
    let mut values = Vec::with_capacity(n);
    for (i, slot) in seen.into_iter().enumerate() {
        match slot {
            Some(v) => values.push(v),
            None => return Err(parse_err(path, 1, format!("no weight given for polymer {i}"))),
        }
    }
    MuVector::from_values(values)
}

/// Volume document: whitespace-separated polymer ids.
pub fn parse_lambda_text(text: &str, path: &str, n: usize) -> Result<PolymerSubset> {
    let mut out: PolymerSubset = BTreeSet::new();
    for (ln, body) in meaningful(text) {
        for token in body.split_whitespace() {
            let i = parse_usize(path, ln, token, "polymer id")?;
            if i >= n {
                return Err(parse_err(path, ln, format!("polymer id {i} out of range (system has {n})")));
            }
            out.insert(i);
        }
    }
    Ok(out)
}

fn slurp(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_string(), source })
}

pub fn parse_system_file(path: &str) -> Result<PolymerSystem> {
    parse_system_text(&slurp(path)?, path)
}

pub fn parse_subset_gas_file(path: &str) -> Result<SubsetGasSpec> {
    parse_subset_gas_text(&slurp(path)?, path)
}

pub fn parse_activities_file(path: &str, n: usize) -> Result<ActivityVector> {
    parse_activities_text(&slurp(path)?, path, n)
}

pub fn parse_mu_file(path: &str, n: usize) -> Result<MuVector> {
    parse_mu_text(&slurp(path)?, path, n)
}

pub fn parse_lambda_file(path: &str, n: usize) -> Result<PolymerSubset> {
    parse_lambda_text(&slurp(path)?, path, n)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
