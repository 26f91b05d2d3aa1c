//! Følner-type diagnostics and multi-invariance constants of finitely
//! supported candidate means on discrete groups (counting measure).

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{precondition, Error, Result};
use crate::groups::{Element, GroupModel, GroupVector};
use crate::multinorm::weak_pq;
use crate::result::NormResult;
use crate::spaces::{DiscreteSpace, Exponent, MultiVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub c: f64,
    pub n: usize,
    pub q: Exponent,
    /// `C n^{1 - 1/q}`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FolnerReport {
    pub f: Vec<String>,
    pub s: Vec<String>,
    pub f_size: usize,
    pub s_size: usize,
    pub fs_size: usize,
    /// `|FS| / |S|`.
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_checked: Option<BoundCheck>,
}

impl FolnerReport {
    /// Compares the ratio with `C n^{1 - 1/q}` where `n = |F|`.
    pub fn check_bound(&mut self, c: f64, q: Exponent) {
        let n = self.f_size;
        let bound = c * (n as f64).powf(1.0 - q.recip());
        self.bound_checked = Some(BoundCheck { c, n, q, bound, holds: self.ratio <= bound * (1.0 + 1e-12) });
    }
}

fn distinct(g: &GroupModel, set: &[Element]) -> Result<Vec<Element>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for a in set {
        g.check(a)?;
        if seen.insert(a.clone()) {
            out.push(a.clone());
        }
    }
    Ok(out)
}

fn labels(g: &GroupModel, set: &[Element]) -> Vec<String> {
    set.iter().map(|a| g.display(a)).collect()
}

/// `|FS| / |S|`, exactly by enumeration.
pub fn folner_ratio(g: &GroupModel, f: &[Element], s: &[Element]) -> Result<FolnerReport> {
    let f = distinct(g, f)?;
    let s = distinct(g, s)?;
    if s.is_empty() {
        return Err(precondition("S must be nonempty"));
    }
    let fs = g.product_set(&f, &s)?.len();
    Ok(FolnerReport {
        f: labels(g, &f),
        s: labels(g, &s),
        f_size: f.len(),
        s_size: s.len(),
        fs_size: fs,
        ratio: fs as f64 / s.len() as f64,
        bound_checked: None,
    })
}

/// Candidate sets `S` for [`folner_search`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FolnerFamily {
    /// Balls of radius `0..=max_radius` around the identity.
    Balls { max_radius: usize },
    /// Boxes `[0, a_1) x ... x [0, a_d)` with sides up to `max_side` (lattices only).
    Rectangles { max_side: usize },
    /// Connected subsets of the left Cayley graph (`s ~ g s`) containing the
    /// identity, of size at most `max_size`, inside the ball of `radius`
    /// (default `max_size - 1`). Right translation preserves `|FS|/|S|`, so
    /// containing the identity loses nothing.
    ConnectedSubsets { max_size: usize, radius: Option<usize> },
}

impl FolnerFamily {
    pub fn label(&self) -> String {
        match self {
            FolnerFamily::Balls { max_radius } => format!("balls(r<={max_radius})"),
            FolnerFamily::Rectangles { max_side } => format!("rectangles(side<={max_side})"),
            FolnerFamily::ConnectedSubsets { max_size, radius } => match radius {
                Some(r) => format!("connected_subsets(size<={max_size},radius<={r})"),
                None => format!("connected_subsets(size<={max_size})"),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FolnerSearchReport {
    pub family: String,
    pub candidates: usize,
    pub best: FolnerReport,
}

/// Best candidate so far: smallest `fs/s`, then smaller `S`, then smaller
/// sorted element list.
struct Best {
    fs: usize,
    s: usize,
    set: Vec<Element>,
}

impl Best {
    fn better(&self, fs: usize, s: usize, set: impl FnOnce() -> Vec<Element>) -> Option<Vec<Element>> {
        match (fs * self.s).cmp(&(self.fs * s)) {
            Ordering::Less => Some(set()),
            Ordering::Greater => None,
            Ordering::Equal => match s.cmp(&self.s) {
                Ordering::Less => Some(set()),
                Ordering::Greater => None,
                Ordering::Equal => {
                    let mut candidate = set();
                    candidate.sort();
                    let mut current = self.set.clone();
                    current.sort();
                    (candidate < current).then_some(candidate)
                }
            },
        }
    }
}

/// Minimizes `|FS|/|S|` over a family of candidate sets.
pub fn folner_search(g: &GroupModel, f: &[Element], family: &FolnerFamily, guard: usize) -> Result<FolnerSearchReport> {
    let f = distinct(g, f)?;
    if f.is_empty() {
        return Err(precondition("F must be nonempty"));
    }
    let mut best: Option<Best> = None;
    let mut candidates = 0;
    let mut offer = |fs: usize, s: usize, set: &dyn Fn() -> Vec<Element>| {
        candidates += 1;
        match &best {
            None => best = Some(Best { fs, s, set: set() }),
            Some(b) => {
                if let Some(set) = b.better(fs, s, set) {
                    best = Some(Best { fs, s, set });
                }
            }
        }
    };
    match family {
        FolnerFamily::Balls { max_radius } => {
            for r in 0..=*max_radius {
                let s = g.ball(r, guard)?;
                let fs = g.product_set(&f, &s)?.len();
                offer(fs, s.len(), &|| s.clone());
            }
        }
        FolnerFamily::Rectangles { max_side } => {
            let dim = g.lattice_dim().ok_or_else(|| Error::NotApplicable("rectangles need a lattice".into()))?;
            let count = (*max_side as f64).powi(dim as i32);
            if count > guard as f64 {
                return Err(Error::GuardExceeded { what: "number of rectangles".into(), size: count, limit: guard as f64 });
            }
            let mut sides = vec![1usize; dim];
            loop {
                let mut s = vec![Vec::new()];
                for &a in &sides {
                    s = s.into_iter().flat_map(|p: Vec<i64>| (0..a as i64).map(move |x| [p.clone(), vec![x]].concat())).collect();
                }
                let s: Vec<Element> = s.into_iter().map(Element::Lattice).collect();
                let fs = g.product_set(&f, &s)?.len();
                offer(fs, s.len(), &|| s.clone());
                let mut pos = 0;
                while pos < dim {
                    sides[pos] += 1;
                    if sides[pos] <= *max_side {
                        break;
                    }
                    sides[pos] = 1;
                    pos += 1;
                }
                if pos == dim {
                    break;
                }
            }
        }
        FolnerFamily::ConnectedSubsets { max_size, radius } => {
            let radius = radius.unwrap_or(max_size.saturating_sub(1));
            connected_search(g, &f, *max_size, radius, guard, &mut offer)?;
        }
    }
    let best = best.expect("every family offers at least one set");
    let mut report = folner_ratio(g, &f, &best.set)?;
    report.s = labels(g, &best.set);
    Ok(FolnerSearchReport { family: family.label(), candidates, best: report })
}

/// Enumerates connected sets containing the identity by include/exclude
/// branching on the boundary, maintaining `|FS|` incrementally.
fn connected_search(
    g: &GroupModel,
    f: &[Element],
    max_size: usize,
    radius: usize,
    guard: usize,
    offer: &mut dyn FnMut(usize, usize, &dyn Fn() -> Vec<Element>),
) -> Result<()> {
    if max_size == 0 {
        return Err(precondition("max_size must be positive"));
    }
    let ball = g.ball(radius, guard)?;
    let index: HashMap<&Element, usize> = ball.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let neighbours: Vec<Vec<usize>> = ball
        .iter()
        .map(|s| {
            let mut nb: Vec<usize> = g.generators().iter().filter_map(|gen| index.get(&g.mul_unchecked(gen, s)).copied()).collect();
            nb.sort();
            nb.dedup();
            nb
        })
        .collect();
    let mut products: HashMap<Element, usize> = HashMap::new();
    let fs: Vec<Vec<usize>> = ball
        .iter()
        .map(|s| {
            f.iter()
                .map(|a| {
                    let p = g.mul_unchecked(a, s);
                    let next = products.len();
                    *products.entry(p).or_insert(next)
                })
                .collect()
        })
        .collect();

    struct State<'a> {
        neighbours: &'a [Vec<usize>],
        fs: &'a [Vec<usize>],
        ball: &'a [Element],
        max_size: usize,
        in_set: Vec<bool>,
        blocked: Vec<bool>,
        counts: Vec<u32>,
        distinct: usize,
        members: Vec<usize>,
    }

    impl State<'_> {
        fn add(&mut self, v: usize) {
            self.in_set[v] = true;
            self.members.push(v);
            for &p in &self.fs[v] {
                if self.counts[p] == 0 {
                    self.distinct += 1;
                }
                self.counts[p] += 1;
            }
        }

        fn remove(&mut self, v: usize) {
            self.in_set[v] = false;
            self.members.pop();
            for &p in &self.fs[v] {
                self.counts[p] -= 1;
                if self.counts[p] == 0 {
                    self.distinct -= 1;
                }
            }
        }

        fn recurse(&mut self, mut frontier: Vec<usize>, offer: &mut dyn FnMut(usize, usize, &dyn Fn() -> Vec<Element>)) {
            if self.members.len() == self.max_size || frontier.is_empty() {
                let members = self.members.clone();
                let ball = self.ball;
                offer(self.distinct, members.len(), &|| members.iter().map(|&i| ball[i].clone()).collect());
                return;
            }
            let v = frontier.pop().expect("nonempty");
            // Branch 1: v joins the set.
            let mut grown = frontier.clone();
            self.add(v);
            for &u in &self.neighbours[v] {
                if !self.in_set[u] && !self.blocked[u] && !grown.contains(&u) {
                    grown.push(u);
                }
            }
            self.recurse(grown, offer);
            self.remove(v);
            // Branch 2: v is excluded from every extension of this set.
            self.blocked[v] = true;
            self.recurse(frontier, offer);
            self.blocked[v] = false;
        }
    }

    let mut state = State {
        neighbours: &neighbours,
        fs: &fs,
        ball: &ball,
        max_size,
        in_set: vec![false; ball.len()],
        blocked: vec![false; ball.len()],
        counts: vec![0; products.len()],
        distinct: 0,
        members: Vec::new(),
    };
    state.add(0);
    let frontier: Vec<usize> = neighbours[0].iter().rev().cloned().filter(|&u| u != 0).collect();
    state.recurse(frontier, offer);
    Ok(())
}

/// A finitely supported probability on a group.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanCandidate(GroupVector);

impl MeanCandidate {
    pub fn new(a: GroupVector) -> Result<Self> {
        if a.0.values().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(precondition("a candidate mean must be nonnegative"));
        }
        if (a.sum() - 1.0).abs() > 1e-12 {
            return Err(precondition(format!("a candidate mean must have unit mass, got {}", a.sum())));
        }
        Ok(MeanCandidate(a))
    }

    pub fn uniform(set: &[Element]) -> Result<Self> {
        if set.is_empty() {
            return Err(precondition("uniform mean on an empty set"));
        }
        Self::new(GroupVector::uniform(set))
    }

    pub fn vector(&self) -> &GroupVector {
        &self.0
    }
}

/// `(s_1 . a, ..., s_n . a)` on the union of their supports, as a tuple in
/// `l^1` with unit weights.
pub fn translate_tuple(g: &GroupModel, a: &GroupVector, f: &[Element]) -> Result<MultiVector> {
    if f.is_empty() {
        return Err(precondition("F must be nonempty"));
    }
    let translates: Vec<GroupVector> = f.iter().map(|s| g.translate(s, a)).collect::<Result<_>>()?;
    let mut support: BTreeSet<Element> = translates.iter().flat_map(|t| t.support()).collect();
    if support.is_empty() {
        support.insert(g.identity());
    }
    let points: Vec<Element> = support.into_iter().collect();
    let space = Arc::new(DiscreteSpace::new(points.iter().map(|p| g.display(p)).collect(), vec![1.0; points.len()])?);
    let cols = translates.iter().map(|t| points.iter().map(|p| t.get(p)).collect()).collect();
    MultiVector::new(space, cols)
}

/// `||(s_1 . a, ..., s_n . a)||^{(p,q)}` in `l^1(G)`. Dual suprema localize
/// to the union of the supports, so the weak norm there is the norm in
/// `l^1(G)`.
pub fn invariance_constant(g: &GroupModel, a: &GroupVector, f: &[Element], p: Exponent, q: Exponent, cfg: &SolverConfig) -> Result<NormResult> {
    weak_pq(&translate_tuple(g, a, f)?, Exponent::ONE, p, q, cfg)
}

/// `sum_k |beta_k| |F S_k|` for nested `S_1 ⊆ ... ⊆ S_N`, the `(1,1)` norm
/// of the translates of `sum_k beta_k chi_{S_k}` when the `beta_k` are
/// nonnegative.
pub fn layered_closed_form(g: &GroupModel, beta: &[f64], sets: &[Vec<Element>], f: &[Element]) -> Result<f64> {
    if beta.len() != sets.len() {
        return Err(Error::DimensionMismatch { expected: sets.len(), found: beta.len() });
    }
    for pair in sets.windows(2) {
        let outer: BTreeSet<&Element> = pair[1].iter().collect();
        if !pair[0].iter().all(|a| outer.contains(a)) {
            return Err(precondition("layer sets must be nested"));
        }
    }
    let f = distinct(g, f)?;
    let mut total = 0.0;
    for (b, s) in beta.iter().zip(sets) {
        total += b.abs() * g.product_set(&f, &distinct(g, s)?)?.len() as f64;
    }
    Ok(total)
}

/// `sum_k beta_k chi_{S_k}`.
pub fn layered_function(beta: &[f64], sets: &[Vec<Element>]) -> GroupVector {
    let mut out = GroupVector::default();
    for (b, s) in beta.iter().zip(sets) {
        let unique: BTreeSet<&Element> = s.iter().collect();
        out = out.add(&GroupVector::from_pairs(unique.into_iter().map(|a| (a.clone(), *b))));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactnessReport {
    pub shifts: Vec<String>,
    /// Mass of the candidate on the separated window.
    pub c: f64,
    /// `N^{1/q} c`.
    pub bound: f64,
    pub computed: NormResult,
    pub holds: bool,
}

/// Greedily picks `N` elements whose translates of `supp(a)` are pairwise
/// disjoint; the `(1,q)` norm of the translates is then at least `N^{1/q} c`.
pub fn compactness_obstruction(g: &GroupModel, a: &MeanCandidate, q: Exponent, count: usize, guard: usize, cfg: &SolverConfig) -> Result<CompactnessReport> {
    if g.is_finite() {
        return Err(precondition("the obstruction needs an infinite group"));
    }
    if count == 0 {
        return Err(precondition("need at least one translate"));
    }
    let window = a.vector().support();
    let c: f64 = window.iter().map(|v| a.vector().get(v)).sum();
    let mut occupied: BTreeSet<Element> = BTreeSet::new();
    let mut shifts = Vec::new();
    let mut radius = 0;
    let mut scanned: BTreeSet<Element> = BTreeSet::new();
    while shifts.len() < count {
        let ball = g.ball(radius, guard).map_err(|_| Error::GuardExceeded {
            what: "separating translates".into(),
            size: guard as f64,
            limit: guard as f64,
        })?;
        for s in ball {
            if shifts.len() == count {
                break;
            }
            if !scanned.insert(s.clone()) {
                continue;
            }
            let moved: Vec<Element> = window.iter().map(|v| g.mul_unchecked(&s, v)).collect();
            if moved.iter().all(|m| !occupied.contains(m)) {
                occupied.extend(moved);
                shifts.push(s);
            }
        }
        radius += 1;
    }
    let computed = invariance_constant(g, a.vector(), &shifts, Exponent::ONE, q, cfg)?;
    let bound = (count as f64).powf(q.recip()) * c;
    let holds = computed.upper_bound >= bound * (1.0 - 1e-12);
    Ok(CompactnessReport { shifts: labels(g, &shifts), c, bound, computed, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub name: String,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeObstructionReport {
    /// Masses of `W(a), W(a^-1), W(b), W(b^-1)` and `{e}`.
    pub pieces: Vec<Piece>,
    pub piece: String,
    pub piece_mass: f64,
    /// The generator `y` whose powers separate the chosen piece.
    pub shift: String,
    pub n: usize,
    /// `mass * n^{1/q}`.
    pub bound: f64,
    pub computed: NormResult,
    pub disjoint_verified: bool,
    pub holds: bool,
}

/// On the free group of rank two, the translates `y . a, ..., y^n . a` have
/// `(1,q)` norm at least `<chi_W, a> n^{1/q}` for a piece `W` of the
/// partition `{e}, W(a), W(a^-1), W(b), W(b^-1)` (words by first letter),
/// since the sets `y^i W` are pairwise disjoint for a suitable generator `y`.
pub fn freegroup_obstruction(g: &GroupModel, a: &MeanCandidate, q: Exponent, n: usize, cfg: &SolverConfig) -> Result<FreeObstructionReport> {
    if g.free_rank() != Some(2) {
        return Err(precondition("the free-group obstruction needs the free group of rank two"));
    }
    if n == 0 {
        return Err(precondition("need at least one translate"));
    }
    let first = |w: &Element| match w {
        Element::Word(w) => w.first().copied().unwrap_or(0),
        _ => 0,
    };
    let pieces_spec = [(1, "W(a)", 2), (-1, "W(A)", 2), (2, "W(b)", 1), (-2, "W(B)", 1), (0, "{e}", 2)];
    let pieces: Vec<Piece> = pieces_spec
        .iter()
        .map(|(letter, name, _)| Piece {
            name: name.to_string(),
            mass: a.vector().0.iter().filter(|(w, _)| first(w) == *letter).map(|(_, v)| v).sum(),
        })
        .collect();
    let chosen = (0..pieces.len()).fold(0, |b, i| if pieces[i].mass > pieces[b].mass { i } else { b });
    let (letter, _, shift_letter) = pieces_spec[chosen];
    let y = Element::Word(vec![shift_letter]);
    let mut shifts = Vec::with_capacity(n);
    let mut power = g.identity();
    for _ in 0..n {
        power = g.mul_unchecked(&power, &y);
        shifts.push(power.clone());
    }
    let tuple = translate_tuple(g, a.vector(), &shifts)?;
    // Every point of the translate supports lies in y^i W for at most one i.
    let points: Vec<Element> = tuple.space().points().iter().map(|p| g.parse_element(p)).collect::<Result<_>>()?;
    let disjoint_verified = points.iter().all(|t| {
        shifts
            .iter()
            .filter(|s| {
                let back = g.mul_unchecked(&g.inv_unchecked(s), t);
                first(&back) == letter && (letter != 0 || back == g.identity())
            })
            .count()
            <= 1
    });
    let computed = weak_pq(&tuple, Exponent::ONE, Exponent::ONE, q, cfg)?;
    let piece_mass = pieces[chosen].mass;
    let bound = piece_mass * (n as f64).powf(q.recip());
    let holds = disjoint_verified && computed.upper_bound >= bound * (1.0 - 1e-12);
    Ok(FreeObstructionReport {
        piece: pieces[chosen].name.clone(),
        piece_mass,
        shift: g.display(&y),
        pieces,
        n,
        bound,
        computed,
        disjoint_verified,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub family: String,
    pub best_ratio: f64,
    /// `n^{1 - 1/q}`.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub group: String,
    pub q: Exponent,
    pub rows: Vec<ScanRow>,
    /// Least-squares slope of `log best_ratio` against `log n` over `n >= 2`.
    pub fitted_exponent: Option<f64>,
}

/// For each `n`, the minimal Følner ratio of the first `n` elements of the
/// group (breadth-first order) over the family.
pub fn pseudo_amenability_scan(g: &GroupModel, ns: &[usize], family: &FolnerFamily, q: Exponent, guard: usize) -> Result<ScanReport> {
    let mut rows = Vec::new();
    for &n in ns {
        if n == 0 {
            return Err(precondition("n must be positive"));
        }
        let f = g.prefix(n, guard)?;
        let found = folner_search(g, &f, family, guard)?;
        rows.push(ScanRow { n, family: found.family, best_ratio: found.best.ratio, bound: (n as f64).powf(1.0 - q.recip()) });
    }
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.n >= 2).map(|r| ((r.n as f64).ln(), r.best_ratio.ln())).collect();
    let fitted_exponent = (pts.len() >= 2).then(|| {
        let k = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx == 0.0 {
            0.0
        } else {
            sxy / sxx
        }
    });
    Ok(ScanReport { group: g.name().to_string(), q, rows, fitted_exponent })
}
