//! Parsing of documents, group specs, element sets and means.

use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use multinorm::groups::{Element, GroupModel, GroupSpec, GroupVector};
use multinorm::{DiscreteSpace, Error, MultiVector, Result};
use serde::Deserialize;

/// Reads a file, or standard input for `-`.
pub fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

pub fn read_tuple(path: &Path) -> Result<MultiVector> {
    multinorm::spaces::SpaceDocument::parse(&read_text(path)?)
}

/// `{"matrix": [[...]], "domain_weights": [...], "codomain_weights": [...]}`;
/// rows index the codomain.
#[derive(Debug, Deserialize)]
pub struct MatrixDocument {
    pub matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub domain_weights: Option<Vec<f64>>,
    #[serde(default)]
    pub codomain_weights: Option<Vec<f64>>,
}

impl MatrixDocument {
    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&read_text(path)?)?)
    }

    pub fn spaces(&self) -> Result<(Arc<DiscreteSpace>, Arc<DiscreteSpace>)> {
        let rows = self.matrix.len();
        let cols = self.matrix.first().map_or(0, |r| r.len());
        let dom = self.domain_weights.clone().unwrap_or_else(|| vec![1.0; cols]);
        let cod = self.codomain_weights.clone().unwrap_or_else(|| vec![1.0; rows]);
        Ok((Arc::new(DiscreteSpace::weighted(dom)?), Arc::new(DiscreteSpace::weighted(cod)?)))
    }
}

/// A group name (`z3`, `s3`, `free2`, `int`, ...), inline JSON, or a path to
/// a JSON group spec.
pub fn parse_group(text: &str) -> Result<GroupModel> {
    let t = text.trim();
    if t.starts_with('{') {
        let spec: GroupSpec = serde_json::from_str(t)?;
        return GroupModel::from_spec(&spec);
    }
    if Path::new(t).is_file() {
        let spec: GroupSpec = serde_json::from_str(&std::fs::read_to_string(t)?)?;
        return GroupModel::from_spec(&spec);
    }
    GroupModel::named(t)
}

/// `ball:R`, `prefix:N`, `all` (finite groups), `a..b` (integers, `b`
/// excluded) or a comma-separated list of elements.
pub fn parse_set(g: &GroupModel, text: &str, guard: usize) -> Result<Vec<Element>> {
    let t = text.trim();
    let number = |s: &str| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad count in {t:?}")));
    if let Some(r) = t.strip_prefix("ball:") {
        return g.ball(number(r)?, guard);
    }
    if let Some(n) = t.strip_prefix("prefix:") {
        return g.prefix(number(n)?, guard);
    }
    if t == "all" {
        return g.elements();
    }
    if let Some((a, b)) = t.split_once("..") {
        if g.lattice_dim() != Some(1) {
            return Err(Error::Parse("ranges need the integers".into()));
        }
        let a: i64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad range {t:?}")))?;
        let b: i64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad range {t:?}")))?;
        return Ok((a..b).map(|v| Element::Lattice(vec![v])).collect());
    }
    split_list(t).map(|s| g.parse_element(s)).collect()
}

/// Splits on commas outside parentheses, so lattice points `(1,2)` survive.
fn split_list(t: &str) -> impl Iterator<Item = &str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in t.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&t[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&t[start..]);
    parts.into_iter().map(str::trim).filter(|s| !s.is_empty())
}

/// `label=weight,...` pairs, e.g. `e=0.5,a=0.5`.
pub fn parse_weights(g: &GroupModel, text: &str) -> Result<GroupVector> {
    let mut pairs = Vec::new();
    for item in split_list(text) {
        let (label, weight) =
            item.rsplit_once('=').ok_or_else(|| Error::Parse(format!("expected label=weight, got {item:?}")))?;
        let w: f64 = weight.trim().parse().map_err(|_| Error::Parse(format!("bad weight in {item:?}")))?;
        pairs.push((g.parse_element(label)?, w));
    }
    Ok(GroupVector::from_pairs(pairs))
}

/// `1,2,5` or `1..=8`.
pub fn parse_counts(text: &str) -> Result<Vec<usize>> {
    let t = text.trim();
    let bad = || Error::Parse(format!("bad list {t:?}"));
    if let Some((a, b)) = t.split_once("..=") {
        let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        return Ok((a..=b).collect());
    }
    split_list(t).map(|s| s.parse().map_err(|_| bad())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sets_and_weights() {
        let z = GroupModel::lattice(1).unwrap();
        assert_eq!(parse_set(&z, "0..3", 100).unwrap().len(), 3);
        assert_eq!(parse_set(&z, "0, 1, -4", 100).unwrap()[2], Element::Lattice(vec![-4]));
        let z2 = GroupModel::lattice(2).unwrap();
        assert_eq!(parse_set(&z2, "(0,1),(2,3)", 100).unwrap().len(), 2);
        let f2 = GroupModel::free(2).unwrap();
        assert_eq!(parse_set(&f2, "ball:2", 100).unwrap().len(), 17);
        assert_eq!(parse_weights(&f2, "e=0.5,aB=0.5").unwrap().sum(), 1.0);
        assert_eq!(parse_counts("1..=4").unwrap(), vec![1, 2, 3, 4]);
        assert!(parse_group("z5").unwrap().is_finite());
        assert!(parse_group(r#"{"kind": "free", "rank": 2}"#).unwrap().free_rank() == Some(2));
    }
}
