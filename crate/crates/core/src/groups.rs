//! Discrete groups: finite groups given by Cayley tables or permutation
//! generators, free groups and integer lattices, together with finitely
//! supported functions on them.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::rng;
use crate::error::{Error, Result};

/// A group element. Free-group words are reduced sequences of letters
/// `+-1, ..., +-rank` (letter `-j` is the inverse of letter `j`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Element {
    Finite(usize),
    Word(Vec<i32>),
    Lattice(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq)]
struct FiniteTable {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Finite(FiniteTable),
    Free { rank: usize },
    Lattice { dim: usize },
}

/// A group with a distinguished symmetric generating set.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupModel {
    name: String,
    kind: Kind,
    generators: Vec<Element>,
}

/// Serializable description of a group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    /// A name understood by [`GroupModel::named`].
    Named { name: String },
    /// A finite group from a Cayley table (inline, as CSV text, or as a
    /// path to a CSV file) or from permutation generators.
    Finite {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table: Option<Vec<Vec<usize>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table_csv: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        perm_gens: Option<Vec<Vec<usize>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generators: Option<Vec<usize>>,
    },
    Free { rank: usize },
    Lattice { dim: usize },
}

/// Parses a Cayley table from CSV text: one row per line, entries separated
/// by commas or whitespace, `#` starts a comment.
pub fn parse_table_csv(text: &str) -> Result<Vec<Vec<usize>>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad table entry {t:?}"))))
                .collect()
        })
        .collect()
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (a b)(i) = a(b(i))
    b.iter().map(|&i| a[i]).collect()
}

fn perm_label(p: &[usize]) -> String {
    if p.len() <= 10 {
        p.iter().map(|v| v.to_string()).collect()
    } else {
        format!("{p:?}")
    }
}

impl GroupModel {
    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        match spec {
            GroupSpec::Named { name } => Self::named(name),
            GroupSpec::Finite { table, table_csv, perm_gens, labels, generators } => {
                let table = match (table, table_csv, perm_gens) {
                    (Some(t), None, None) => t.clone(),
                    (None, Some(csv), None) => {
                        let text = if std::path::Path::new(csv).is_file() { std::fs::read_to_string(csv)? } else { csv.clone() };
                        parse_table_csv(&text)?
                    }
                    (None, None, Some(gens)) => return Self::from_permutations("perm", gens),
                    _ => return Err(Error::InvalidGroup("give exactly one of table, table_csv and perm_gens".into())),
                };
                Self::from_table("table", table, labels.clone(), generators.clone())
            }
            GroupSpec::Free { rank } => Self::free(*rank),
            GroupSpec::Lattice { dim } => Self::lattice(*dim),
        }
    }

    /// `zN` (cyclic of order N), `sN` (symmetric), `dN` (dihedral of order
    /// 2N), `freeK`, `int` (the integers) and `intD` (the lattice `Z^D`).
    pub fn named(name: &str) -> Result<Self> {
        let name = name.trim().to_ascii_lowercase();
        let num = |prefix: &str| name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok());
        if name == "int" || name == "integers" {
            return Self::lattice(1);
        }
        if let Some(d) = num("int") {
            return Self::lattice(d);
        }
        if let Some(k) = num("free") {
            return Self::free(k);
        }
        if let Some(n) = num("z") {
            return Self::cyclic(n);
        }
        if let Some(n) = num("s") {
            return Self::symmetric(n);
        }
        if let Some(n) = num("d") {
            return Self::dihedral(n);
        }
        Err(Error::InvalidGroup(format!("unknown group name {name:?}")))
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("cyclic group of order 0".into()));
        }
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let generators = if n > 1 { Some(vec![1]) } else { Some(vec![]) };
        Self::from_table(&format!("z{n}"), table, None, generators)
    }

    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("symmetric group on 0 points".into()));
        }
        let mut gens = Vec::new();
        if n > 1 {
            let mut swap: Vec<usize> = (0..n).collect();
            swap.swap(0, 1);
            gens.push(swap);
            gens.push((0..n).map(|i| (i + 1) % n).collect());
        } else {
            gens.push(vec![0]);
        }
        let mut g = Self::from_permutations(&format!("s{n}"), &gens)?;
        g.name = format!("s{n}");
        Ok(g)
    }

    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGroup("dihedral groups need n >= 3".into()));
        }
        let rotation: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let reflection: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        Self::from_permutations(&format!("d{n}"), &[rotation, reflection])
    }

    pub fn free(rank: usize) -> Result<Self> {
        if rank == 0 || rank > 26 {
            return Err(Error::InvalidGroup("free groups need rank between 1 and 26".into()));
        }
        let generators = (1..=rank as i32).flat_map(|j| [Element::Word(vec![j]), Element::Word(vec![-j])]).collect();
        Ok(GroupModel { name: format!("free{rank}"), kind: Kind::Free { rank }, generators })
    }

    pub fn lattice(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGroup("lattices need dimension >= 1".into()));
        }
        let generators = (0..dim)
            .flat_map(|j| {
                let unit = |s: i64| Element::Lattice((0..dim).map(|i| if i == j { s } else { 0 }).collect());
                [unit(1), unit(-1)]
            })
            .collect();
        let name = if dim == 1 { "int".to_string() } else { format!("int{dim}") };
        Ok(GroupModel { name, kind: Kind::Lattice { dim }, generators })
    }

    /// Closure of a set of permutations under composition.
    pub fn from_permutations(name: &str, gens: &[Vec<usize>]) -> Result<Self> {
        let d = gens.first().map_or(0, |g| g.len());
        if d == 0 {
            return Err(Error::InvalidGroup("need at least one non-empty permutation".into()));
        }
        for g in gens {
            let mut seen = vec![false; d];
            if g.len() != d || g.iter().any(|&i| i >= d || std::mem::replace(&mut seen[i], true)) {
                return Err(Error::InvalidGroup(format!("{g:?} is not a permutation of 0..{d}")));
            }
        }
        let identity: Vec<usize> = (0..d).collect();
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(identity, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let next = compose(&elements[i], g);
                if !index.contains_key(&next) {
                    if elements.len() >= 1_000_000 {
                        return Err(Error::GuardExceeded { what: "permutation group order".into(), size: 1e6, limit: 1e6 });
                    }
                    index.insert(next.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(next);
                }
            }
        }
        let table = elements.iter().map(|a| elements.iter().map(|b| index[&compose(a, b)]).collect()).collect();
        let labels = elements.iter().map(|p| perm_label(p)).collect();
        let generators = gens.iter().map(|g| index[g]).collect();
        Self::from_table(name, table, Some(labels), Some(generators))
    }

    /// Validates a Cayley table: square, Latin, with an identity, and
    /// associative (exhaustively up to order 125, on 200000 random triples
    /// beyond that).
    pub fn from_table(name: &str, table: Vec<Vec<usize>>, labels: Option<Vec<String>>, generators: Option<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty Cayley table".into()));
        }
        for row in &table {
            if row.len() != n {
                return Err(Error::InvalidGroup("Cayley table is not square".into()));
            }
            if row.iter().any(|&v| v >= n) {
                return Err(Error::InvalidGroup("Cayley table entry out of range".into()));
            }
        }
        fn latin(n: usize, line: impl Iterator<Item = usize>) -> bool {
            let mut seen = vec![false; n];
            line.into_iter().all(|v| !std::mem::replace(&mut seen[v], true))
        }
        for i in 0..n {
            if !latin(n, table[i].iter().cloned()) || !latin(n, (0..n).map(|j| table[j][i])) {
                return Err(Error::InvalidGroup("Cayley table is not a Latin square".into()));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|j| table[e][j] == j && table[j][e] == j))
            .ok_or_else(|| Error::InvalidGroup("Cayley table has no identity".into()))?;
        let inverse: Vec<usize> = (0..n).map(|i| (0..n).find(|&j| table[i][j] == identity).expect("Latin rows contain e")).collect();
        let assoc = |a: usize, b: usize, c: usize| table[table[a][b]][c] == table[a][table[b][c]];
        if n.pow(3) <= 2_000_000 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(Error::InvalidGroup(format!("not associative at ({a},{b},{c})")));
                        }
                    }
                }
            }
        } else {
            let mut r = rng(0x5eed, 0);
            for _ in 0..200_000 {
                let (a, b, c) = (r.random_range(0..n), r.random_range(0..n), r.random_range(0..n));
                if !assoc(a, b, c) {
                    return Err(Error::InvalidGroup(format!("not associative at ({a},{b},{c})")));
                }
            }
        }
        let labels = labels.unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
        if labels.len() != n {
            return Err(Error::InvalidGroup("one label per element".into()));
        }
        let gens = generators.unwrap_or_else(|| (0..n).filter(|&i| i != identity).collect());
        if gens.iter().any(|&g| g >= n) {
            return Err(Error::InvalidGroup("generator out of range".into()));
        }
        let mut symmetric: Vec<usize> = Vec::new();
        for g in gens {
            for h in [g, inverse[g]] {
                if h != identity && !symmetric.contains(&h) {
                    symmetric.push(h);
                }
            }
        }
        let generators = symmetric.into_iter().map(Element::Finite).collect();
        Ok(GroupModel { name: name.to_string(), kind: Kind::Finite(FiniteTable { table, identity, inverse, labels }), generators })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, Kind::Finite(_))
    }

    /// Rank of a free group.
    pub fn free_rank(&self) -> Option<usize> {
        match self.kind {
            Kind::Free { rank } => Some(rank),
            _ => None,
        }
    }

    pub fn lattice_dim(&self) -> Option<usize> {
        match self.kind {
            Kind::Lattice { dim } => Some(dim),
            _ => None,
        }
    }

    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            Kind::Finite(t) => Some(t.table.len()),
            _ => None,
        }
    }

    /// The symmetric generating set.
    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn identity(&self) -> Element {
        match &self.kind {
            Kind::Finite(t) => Element::Finite(t.identity),
            Kind::Free { .. } => Element::Word(Vec::new()),
            Kind::Lattice { dim } => Element::Lattice(vec![0; *dim]),
        }
    }

    /// Elements of a finite group in table order.
    pub fn elements(&self) -> Result<Vec<Element>> {
        match &self.kind {
            Kind::Finite(t) => Ok((0..t.table.len()).map(Element::Finite).collect()),
            _ => Err(Error::InvalidGroup(format!("{} is infinite", self.name))),
        }
    }

    /// Table index of an element of a finite group.
    pub fn index(&self, a: &Element) -> Result<usize> {
        self.check(a)?;
        match a {
            Element::Finite(i) => Ok(*i),
            _ => Err(Error::InvalidGroup(format!("{} has no element table", self.name))),
        }
    }

    pub fn check(&self, a: &Element) -> Result<()> {
        let ok = match (&self.kind, a) {
            (Kind::Finite(t), Element::Finite(i)) => *i < t.table.len(),
            (Kind::Free { rank }, Element::Word(w)) => {
                w.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= *rank) && w.windows(2).all(|p| p[0] != -p[1])
            }
            (Kind::Lattice { dim }, Element::Lattice(v)) => v.len() == *dim,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidGroup(format!("{a:?} is not an element of {}", self.name)))
        }
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub(crate) fn mul_unchecked(&self, a: &Element, b: &Element) -> Element {
        match (&self.kind, a, b) {
            (Kind::Finite(t), Element::Finite(i), Element::Finite(j)) => Element::Finite(t.table[*i][*j]),
            (Kind::Free { .. }, Element::Word(u), Element::Word(v)) => {
                let mut w = u.clone();
                for &l in v {
                    if w.last() == Some(&-l) {
                        w.pop();
                    } else {
                        w.push(l);
                    }
                }
                Element::Word(w)
            }
            (Kind::Lattice { .. }, Element::Lattice(u), Element::Lattice(v)) => {
                Element::Lattice(u.iter().zip(v).map(|(a, b)| a + b).collect())
            }
            _ => unreachable!("elements were checked against the group"),
        }
    }

    pub fn inv(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        Ok(self.inv_unchecked(a))
    }

    pub(crate) fn inv_unchecked(&self, a: &Element) -> Element {
        match (&self.kind, a) {
            (Kind::Finite(t), Element::Finite(i)) => Element::Finite(t.inverse[*i]),
            (Kind::Free { .. }, Element::Word(w)) => Element::Word(w.iter().rev().map(|l| -l).collect()),
            (Kind::Lattice { .. }, Element::Lattice(v)) => Element::Lattice(v.iter().map(|x| -x).collect()),
            _ => unreachable!("elements were checked against the group"),
        }
    }

    /// Word length for free groups and lattices (l^1 length); `None` for
    /// finite groups.
    pub fn length(&self, a: &Element) -> Option<usize> {
        match a {
            Element::Word(w) => Some(w.len()),
            Element::Lattice(v) => Some(v.iter().map(|x| x.unsigned_abs() as usize).sum()),
            Element::Finite(_) => None,
        }
    }

    pub fn display(&self, a: &Element) -> String {
        match (&self.kind, a) {
            (Kind::Finite(t), Element::Finite(i)) => t.labels.get(*i).cloned().unwrap_or_else(|| i.to_string()),
            (_, Element::Word(w)) if w.is_empty() => "e".into(),
            (_, Element::Word(w)) => w
                .iter()
                .map(|&l| {
                    let c = (b'a' + (l.unsigned_abs() as u8 - 1)) as char;
                    if l > 0 {
                        c
                    } else {
                        c.to_ascii_uppercase()
                    }
                })
                .collect(),
            (_, Element::Lattice(v)) if v.len() == 1 => v[0].to_string(),
            (_, Element::Lattice(v)) => format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
            (_, Element::Finite(i)) => i.to_string(),
        }
    }

    /// Inverse of [`display`](Self::display). Finite-group elements may
    /// also be given by table index.
    pub fn parse_element(&self, text: &str) -> Result<Element> {
        let s = text.trim();
        let bad = || Error::Parse(format!("{s:?} is not an element of {}", self.name));
        let el = match &self.kind {
            Kind::Finite(t) => match t.labels.iter().position(|l| l == s) {
                Some(i) => Element::Finite(i),
                None => Element::Finite(s.parse().map_err(|_| bad())?),
            },
            Kind::Free { .. } => {
                if s == "e" || s.is_empty() {
                    Element::Word(Vec::new())
                } else {
                    let mut w = Element::Word(Vec::new());
                    for c in s.chars() {
                        if !c.is_ascii_alphabetic() {
                            return Err(bad());
                        }
                        let j = (c.to_ascii_lowercase() as u8 - b'a') as i32 + 1;
                        let letter = Element::Word(vec![if c.is_ascii_lowercase() { j } else { -j }]);
                        self.check(&letter).map_err(|_| bad())?;
                        w = self.mul_unchecked(&w, &letter);
                    }
                    w
                }
            }
            Kind::Lattice { .. } => {
                let inner = s.trim_start_matches('(').trim_end_matches(')');
                let v: std::result::Result<Vec<i64>, _> = inner.split(',').map(|t| t.trim().parse()).collect();
                Element::Lattice(v.map_err(|_| bad())?)
            }
        };
        self.check(&el).map_err(|_| bad())?;
        Ok(el)
    }

    /// Elements of word length at most `radius`, in breadth-first order
    /// with generators tried in order.
    pub fn ball(&self, radius: usize, guard: usize) -> Result<Vec<Element>> {
        let e = self.identity();
        let mut seen: BTreeSet<Element> = BTreeSet::from([e.clone()]);
        let mut out = vec![e];
        let mut frontier = 0;
        for _ in 0..radius {
            let end = out.len();
            for idx in frontier..end {
                for g in &self.generators {
                    let next = self.mul_unchecked(&out[idx], g);
                    if seen.insert(next.clone()) {
                        if out.len() >= guard {
                            return Err(Error::GuardExceeded { what: "ball size".into(), size: out.len() as f64 + 1.0, limit: guard as f64 });
                        }
                        out.push(next);
                    }
                }
            }
            frontier = end;
        }
        Ok(out)
    }

    /// The first `n` elements of the breadth-first enumeration of the group.
    pub fn prefix(&self, n: usize, guard: usize) -> Result<Vec<Element>> {
        if let Some(order) = self.order() {
            if n > order {
                return Err(Error::Precondition(format!("{} has only {order} elements", self.name)));
            }
        }
        let mut radius = 0;
        loop {
            let ball = self.ball(radius, guard)?;
            if ball.len() >= n {
                return Ok(ball[..n].to_vec());
            }
            if self.is_finite() && radius > self.order().unwrap_or(0) {
                // Generators do not reach the whole group: pad in table order.
                let mut out = ball;
                for el in self.elements()? {
                    if out.len() == n {
                        break;
                    }
                    if !out.contains(&el) {
                        out.push(el);
                    }
                }
                return Ok(out);
            }
            radius += 1;
        }
    }

    /// `FS = { f s : f in F, s in S }`.
    pub fn product_set(&self, f: &[Element], s: &[Element]) -> Result<BTreeSet<Element>> {
        for a in f.iter().chain(s) {
            self.check(a)?;
        }
        Ok(f.iter().flat_map(|a| s.iter().map(move |b| (a, b))).map(|(a, b)| self.mul_unchecked(a, b)).collect())
    }

    /// Left translate `(s . f)(t) = f(s^{-1} t)`.
    pub fn translate(&self, s: &Element, f: &GroupVector) -> Result<GroupVector> {
        self.check(s)?;
        let mut out = BTreeMap::new();
        for (t, v) in &f.0 {
            self.check(t)?;
            out.insert(self.mul_unchecked(s, t), *v);
        }
        Ok(GroupVector(out))
    }
}

impl fmt::Display for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A finitely supported real function on a group.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroupVector(pub BTreeMap<Element, f64>);

impl GroupVector {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Element, f64)>) -> Self {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            *map.entry(k).or_insert(0.0) += v;
        }
        map.retain(|_, v| *v != 0.0);
        GroupVector(map)
    }

    /// `chi_S`.
    pub fn indicator(set: &[Element]) -> Self {
        GroupVector(set.iter().map(|s| (s.clone(), 1.0)).collect())
    }

    /// Uniform probability on `set`.
    pub fn uniform(set: &[Element]) -> Self {
        let unique: BTreeSet<&Element> = set.iter().collect();
        let w = 1.0 / unique.len() as f64;
        GroupVector(unique.into_iter().map(|s| (s.clone(), w)).collect())
    }

    pub fn get(&self, a: &Element) -> f64 {
        self.0.get(a).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> Vec<Element> {
        self.0.iter().filter(|(_, v)| **v != 0.0).map(|(k, _)| k.clone()).collect()
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.values().map(|v| v.abs()).sum()
    }

    /// `sum_t f(t)`.
    pub fn sum(&self) -> f64 {
        self.0.values().sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        GroupVector(self.0.iter().map(|(k, v)| (k.clone(), c * v)).collect())
    }

    pub fn add(&self, other: &GroupVector) -> Self {
        Self::from_pairs(self.0.iter().chain(&other.0).map(|(k, v)| (k.clone(), *v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_group_reduces_words() {
        let g = GroupModel::free(2).unwrap();
        let a = g.parse_element("ab").unwrap();
        let b = g.parse_element("BA").unwrap();
        assert_eq!(g.mul(&a, &b).unwrap(), g.identity());
        assert_eq!(g.inv(&a).unwrap(), b);
        assert_eq!(g.display(&g.parse_element("aAb").unwrap()), "b");
        assert!(g.check(&Element::Word(vec![1, -1])).is_err());
    }

    #[test]
    fn ball_sizes() {
        let f2 = GroupModel::free(2).unwrap();
        for r in 0..5 {
            assert_eq!(f2.ball(r, 1_000_000).unwrap().len(), 2 * 3usize.pow(r as u32) - 1);
        }
        let z = GroupModel::lattice(1).unwrap();
        assert_eq!(z.ball(3, 100).unwrap().len(), 7);
        let z2 = GroupModel::lattice(2).unwrap();
        assert_eq!(z2.ball(2, 100).unwrap().len(), 13);
        assert!(f2.ball(10, 1000).is_err());
    }

    #[test]
    fn finite_groups() {
        let s3 = GroupModel::named("s3").unwrap();
        assert_eq!(s3.order(), Some(6));
        let z6 = GroupModel::named("z6").unwrap();
        let three = z6.parse_element("3").unwrap();
        assert_eq!(z6.mul(&three, &three).unwrap(), z6.identity());
        assert_eq!(GroupModel::named("d4").unwrap().order(), Some(8));
        assert_eq!(GroupModel::symmetric(4).unwrap().order(), Some(24));
    }

    #[test]
    fn table_validation() {
        assert!(GroupModel::from_table("bad", vec![vec![0, 1], vec![0, 1]], None, None).is_err());
        // A Latin square with identity that is not associative (order 5 loop).
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(GroupModel::from_table("loop", loop5, None, None).is_err());
        let csv = "0,1,2\n1,2,0\n2,0,1\n";
        let g = GroupModel::from_spec(&GroupSpec::Finite {
            table: None,
            table_csv: Some(csv.into()),
            perm_gens: None,
            labels: None,
            generators: None,
        }).unwrap();
        assert_eq!(g.order(), Some(3));
        let spec: GroupSpec = serde_json::from_str(r#"{"kind":"finite","perm_gens":[[1,0,2],[1,2,0]]}"#).unwrap();
        assert_eq!(GroupModel::from_spec(&spec).unwrap().order(), Some(6));
        let spec: GroupSpec = serde_json::from_str(r#"{"kind":"free","rank":2}"#).unwrap();
        assert_eq!(GroupModel::from_spec(&spec).unwrap().free_rank(), Some(2));
    }

    #[test]
    fn translation_moves_support() {
        let z = GroupModel::lattice(1).unwrap();
        let f = GroupVector::indicator(&[Element::Lattice(vec![0]), Element::Lattice(vec![1])]);
        let t = z.translate(&Element::Lattice(vec![5]), &f).unwrap();
        assert_eq!(t.support(), vec![Element::Lattice(vec![5]), Element::Lattice(vec![6])]);
    }

    #[test]
    fn product_sets() {
        let z = GroupModel::lattice(1).unwrap();
        let f: Vec<Element> = (0..2).map(|i| Element::Lattice(vec![i])).collect();
        let s: Vec<Element> = (0..5).map(|i| Element::Lattice(vec![i])).collect();
        assert_eq!(z.product_set(&f, &s).unwrap().len(), 6);
    }
}
