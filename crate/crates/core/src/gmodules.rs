//! The group algebra `l^1(G)` acting on `l^p(G)` and on the operator space
//! `J = B(l^1(G), l^p(G))`, materialized as `|G| x |G|` matrices for finite
//! `G`. A matrix entry `U(t, s)` is the value at `s` of the image of `delta_t`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::amenability::invariance_constant;
use crate::config::SolverConfig;
use crate::error::{precondition, Error, Result};
use crate::groups::{Element, GroupModel, GroupVector};
use crate::result::NormResult;
use crate::spaces::{lp_norm, Exponent};

/// `(f * g)(u) = sum_t f(t) g(t^-1 u)`.
pub fn convolve(g: &GroupModel, f: &GroupVector, h: &GroupVector) -> Result<GroupVector> {
    let mut out: BTreeMap<Element, f64> = BTreeMap::new();
    for (t, a) in &f.0 {
        g.check(t)?;
        for (s, b) in &h.0 {
            g.check(s)?;
            *out.entry(g.mul_unchecked(t, s)).or_insert(0.0) += a * b;
        }
    }
    let out = GroupVector(out);
    debug_assert!(out.l1_norm() <= f.l1_norm() * h.l1_norm() * (1.0 + 1e-12) + 1e-300);
    Ok(out)
}

/// `sum_t f(t)`, the augmentation character.
pub fn augmentation(f: &GroupVector) -> f64 {
    f.sum()
}

/// Multiplication table of a finite group by element index.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGroup {
    model: GroupModel,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    identity: usize,
}

impl FiniteGroup {
    pub fn new(model: &GroupModel) -> Result<Arc<Self>> {
        let elements = model.elements()?;
        let idx = |a: &Element| model.index(a).expect("element of a finite group");
        let mul = elements.iter().map(|a| elements.iter().map(|b| idx(&model.mul_unchecked(a, b))).collect()).collect();
        let inv = elements.iter().map(|a| idx(&model.inv_unchecked(a))).collect();
        let identity = idx(&model.identity());
        Ok(Arc::new(FiniteGroup { model: model.clone(), mul, inv, identity }))
    }

    pub fn model(&self) -> &GroupModel {
        &self.model
    }

    pub fn order(&self) -> usize {
        self.inv.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// `(r . x)(s) = x(r^-1 s)`, the left regular action on `l^p(G)`.
    pub fn act(&self, r: usize, x: &[f64]) -> Vec<f64> {
        let ri = self.inv[r];
        (0..self.order()).map(|s| x[self.mul[ri][s]]).collect()
    }

    /// `b * x` for dense `b` and `x`.
    pub fn convolve_dense(&self, b: &[f64], x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.order()];
        for (t, bt) in b.iter().enumerate() {
            for (s, xs) in x.iter().enumerate() {
                out[self.mul[t][s]] += bt * xs;
            }
        }
        out
    }

    pub fn dense(&self, f: &GroupVector) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.order()];
        for (a, v) in &f.0 {
            out[self.model.index(a)?] += v;
        }
        Ok(out)
    }
}

/// An element of `J = B(l^1(G), l^p(G))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleMatrix {
    group: Arc<FiniteGroup>,
    p: Exponent,
    /// Row `t` is `U(delta_t)`.
    entries: Vec<Vec<f64>>,
}

impl ModuleMatrix {
    pub fn new(group: Arc<FiniteGroup>, p: Exponent, entries: Vec<Vec<f64>>) -> Result<Self> {
        let n = group.order();
        if entries.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: entries.len() });
        }
        for row in &entries {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
        }
        Ok(ModuleMatrix { group, p, entries })
    }

    pub fn zeros(group: Arc<FiniteGroup>, p: Exponent) -> Self {
        let n = group.order();
        ModuleMatrix { group, p, entries: vec![vec![0.0; n]; n] }
    }

    pub fn random(group: Arc<FiniteGroup>, p: Exponent, rng: &mut impl Rng) -> Self {
        let n = group.order();
        let entries = (0..n).map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect()).collect();
        ModuleMatrix { group, p, entries }
    }

    fn from_fn(group: &Arc<FiniteGroup>, p: Exponent, f: impl Fn(usize, usize) -> f64) -> Self {
        let n = group.order();
        let entries = (0..n).map(|t| (0..n).map(|s| f(t, s)).collect()).collect();
        ModuleMatrix { group: group.clone(), p, entries }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn get(&self, t: usize, s: usize) -> f64 {
        self.entries[t][s]
    }

    /// Exact operator norm: `max_t ||U(t, .)||_p`.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|row| lp_norm(row, None, self.p)).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &ModuleMatrix) -> ModuleMatrix {
        ModuleMatrix::from_fn(&self.group, self.p, |t, s| self.entries[t][s] + other.entries[t][s])
    }

    pub fn scaled(&self, c: f64) -> ModuleMatrix {
        ModuleMatrix::from_fn(&self.group, self.p, |t, s| c * self.entries[t][s])
    }

    /// `chi_V U`: keeps the output coordinates in `V`.
    pub fn masked(&self, v: &[usize]) -> ModuleMatrix {
        let mut keep = vec![false; self.group.order()];
        for &s in v {
            keep[s] = true;
        }
        ModuleMatrix::from_fn(&self.group, self.p, |t, s| if keep[s] { self.entries[t][s] } else { 0.0 })
    }

    /// `U(f)` for `f` in `l^1(G)`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let n = self.group.order();
        let mut out = vec![0.0; n];
        for (t, ft) in f.iter().enumerate() {
            for (o, u) in out.iter_mut().zip(&self.entries[t]) {
                *o += ft * u;
            }
        }
        out
    }

    /// `U'(f)(t) = <U(delta_t), f>` for `f` in `l^{p'}(G)`.
    pub fn adjoint_apply(&self, f: &[f64]) -> Vec<f64> {
        self.entries.iter().map(|row| row.iter().zip(f).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn max_abs_diff(&self, other: &ModuleMatrix) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `(r * U)(t, s) = U(r^-1 t, r^-1 s)`.
pub fn star_action(r: usize, u: &ModuleMatrix) -> ModuleMatrix {
    let g = u.group.clone();
    let ri = g.inv(r);
    ModuleMatrix::from_fn(&g, u.p, |t, s| u.entries[g.mul(ri, t)][g.mul(ri, s)])
}

/// `(r . U)(t, s) = U(t r, s)`, i.e. `(r . U)(a) = U(a * delta_r)`.
pub fn module_action(r: usize, u: &ModuleMatrix) -> ModuleMatrix {
    let g = u.group.clone();
    ModuleMatrix::from_fn(&g, u.p, |t, s| u.entries[g.mul(t, r)][s])
}

/// `Pi(x)(t, s) = x(t^-1 s)`, i.e. `Pi(x)(a) = a * x`.
pub fn pi(g: &Arc<FiniteGroup>, p: Exponent, x: &[f64]) -> ModuleMatrix {
    ModuleMatrix::from_fn(g, p, |t, s| x[g.mul(g.inv(t), s)])
}

/// `Pi~(x)(t, s) = x(s)`, i.e. `Pi~(x)(a) = phi(a) x`.
pub fn pi_tilde(g: &Arc<FiniteGroup>, p: Exponent, x: &[f64]) -> ModuleMatrix {
    ModuleMatrix::from_fn(g, p, |_, s| x[s])
}

/// `Q(U)(t, s) = U(t^-1, t^-1 s)`.
pub fn q_map(u: &ModuleMatrix) -> ModuleMatrix {
    let g = u.group.clone();
    ModuleMatrix::from_fn(&g, u.p, |t, s| {
        let ti = g.inv(t);
        u.entries[ti][g.mul(ti, s)]
    })
}

/// Interval for an operator norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: f64,
}

/// A linear map `J -> l^p(G)` stored as `R(U)(s0) = sum_{t,s} rho(t,s;s0) U(t,s)`.
#[derive(Clone, Debug)]
pub struct Retraction {
    group: Arc<FiniteGroup>,
    p: Exponent,
    /// Indexed `[s0][t][s]`.
    rho: Vec<Vec<Vec<f64>>>,
    /// `C_{p,p}` of the inducing mean.
    constant: Option<NormResult>,
    norm: NormEstimate,
}

impl Retraction {
    pub fn new(group: Arc<FiniteGroup>, p: Exponent, rho: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let n = group.order();
        let shape_ok = rho.len() == n && rho.iter().all(|a| a.len() == n && a.iter().all(|b| b.len() == n));
        if !shape_ok {
            return Err(precondition(format!("a retraction tensor on a group of order {n} must be {n}x{n}x{n}")));
        }
        let mut r = Retraction { group, p, rho, constant: None, norm: NormEstimate { lower: 0.0, upper: f64::INFINITY } };
        r.norm = r.generic_estimate();
        Ok(r)
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn norm_estimate(&self) -> NormEstimate {
        self.norm
    }

    /// `C_{p,p}` of the mean this retraction was built from.
    pub fn mean_constant(&self) -> Option<&NormResult> {
        self.constant.as_ref()
    }

    pub fn apply(&self, u: &ModuleMatrix) -> Vec<f64> {
        self.rho
            .iter()
            .map(|slab| slab.iter().zip(&u.entries).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()).sum())
            .collect()
    }

    /// Evaluation at `s0` is a functional of norm `sum_t ||rho(t,.;s0)||_{p'}`;
    /// the largest is a lower bound and their `l^p` norm an upper bound.
    fn generic_estimate(&self) -> NormEstimate {
        let pc = self.p.conjugate();
        let functionals: Vec<f64> = self.rho.iter().map(|slab| slab.iter().map(|row| lp_norm(row, None, pc)).sum()).collect();
        NormEstimate { lower: functionals.iter().cloned().fold(0.0, f64::max), upper: lp_norm(&functionals, None, self.p) }
    }

    /// Raises the lower bound with `||R(U)|| / ||U||`.
    pub fn observe(&mut self, u: &ModuleMatrix) {
        let nu = u.norm();
        if nu > 0.0 {
            let ratio = lp_norm(&self.apply(u), None, self.p) / nu;
            self.norm.lower = self.norm.lower.max(ratio.min(self.norm.upper));
        }
    }
}

/// `R(U)(s) = sum_t Lambda(s^-1 t) U(t, s)` for a probability `Lambda`.
/// The norm upper bound is the least of the generic bound, the Jensen bound
/// `(|G| max Lambda)^{1/p}` and `C_{p,p}(Lambda)`.
pub fn retraction_from_mean(group: &Arc<FiniteGroup>, mean: &[f64], p: Exponent, cfg: &SolverConfig) -> Result<Retraction> {
    let n = group.order();
    if mean.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: mean.len() });
    }
    if mean.iter().any(|v| *v < 0.0 || !v.is_finite()) || (mean.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(precondition("the mean must be a probability vector"));
    }
    let mut rho = vec![vec![vec![0.0; n]; n]; n];
    for (s0, slab) in rho.iter_mut().enumerate() {
        let si = group.inv(s0);
        for (t, row) in slab.iter_mut().enumerate() {
            row[s0] = mean[group.mul(si, t)];
        }
    }
    let mut r = Retraction::new(group.clone(), p, rho)?;
    let jensen = (n as f64 * mean.iter().cloned().fold(0.0, f64::max)).powf(p.recip());
    let constant = mean_constant(group, mean, p, cfg)?;
    r.norm.upper = r.norm.upper.min(jensen).min(constant.upper_bound);
    // Pi~(x) has norm ||x||_p and R(Pi~ x) = x.
    r.norm.lower = r.norm.lower.max(1.0).min(r.norm.upper);
    r.constant = Some(constant);
    Ok(r)
}

/// `C_{p,p}(Lambda)`: the weak `(p,p)` norm of all left translates of `Lambda`.
/// Repeating a translate does not change a multi-norm, so this is the
/// supremum over all finite tuples of translates.
pub fn mean_constant(group: &Arc<FiniteGroup>, mean: &[f64], p: Exponent, cfg: &SolverConfig) -> Result<NormResult> {
    let model = group.model();
    let elements = model.elements()?;
    let a = GroupVector::from_pairs(elements.iter().cloned().zip(mean.iter().cloned()));
    invariance_constant(model, &a, &elements, p, p, cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveredMean {
    pub mean: Vec<f64>,
    pub mass: f64,
    pub unit_mass: bool,
    pub constant: NormResult,
    pub retraction_upper: f64,
    /// `C_{p,p}(Lambda) <= ||R||` up to the solver gap.
    pub bounded: bool,
}

/// `Lambda(t) = R(U_t)(e)` with `U_t(t', s) = [t' = t][s = e]`, so that
/// `<lambda, Lambda> = R(delta_e (x) lambda)(e)`.
pub fn mean_from_retraction(r: &Retraction, cfg: &SolverConfig) -> Result<RecoveredMean> {
    let e = r.group.identity();
    let mean: Vec<f64> = (0..r.group.order()).map(|t| r.rho[e][t][e]).collect();
    let mass: f64 = mean.iter().sum();
    let unit_mass = (mass - 1.0).abs() <= 1e-12;
    let constant = mean_constant(&r.group, &mean, r.p, cfg)?;
    let bounded = constant.lower_bound <= r.norm.upper * (1.0 + 1e-9) + cfg.tol;
    Ok(RecoveredMean { mean, mass, unit_mass, constant, retraction_upper: r.norm.upper, bounded })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignLemmaReport {
    pub n: usize,
    pub diagonal: f64,
    /// Maximum over sign vectors of `(sum_j ||sum_i d_i F(i,j)||^p)^{1/p}`.
    pub c: f64,
    pub argmax: Vec<i8>,
    pub holds: bool,
}

pub const SIGN_LEMMA_LIMIT: usize = 12;

/// Exhaustive check of `(sum_j ||F(j,j)||^p)^{1/p} <= C` for an `n x n`
/// array of vectors normed in `l^p`.
pub fn sign_lemma_check(f: &[Vec<Vec<f64>>], p: Exponent) -> Result<SignLemmaReport> {
    let n = f.len();
    if n == 0 || f.iter().any(|row| row.len() != n) {
        return Err(precondition("F must be a nonempty square array"));
    }
    if n > SIGN_LEMMA_LIMIT {
        return Err(Error::GuardExceeded { what: "sign vectors (n)".into(), size: n as f64, limit: SIGN_LEMMA_LIMIT as f64 });
    }
    let dim = f[0][0].len();
    if f.iter().flatten().any(|v| v.len() != dim) {
        return Err(precondition("all entries of F must have the same length"));
    }
    let diagonal = lp_norm(&(0..n).map(|j| lp_norm(&f[j][j], None, p)).collect::<Vec<_>>(), None, p);
    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut x = vec![0.0; dim];
    for mask in 0u32..(1 << n) {
        let d: Vec<f64> = (0..n).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let norms: Vec<f64> = (0..n)
            .map(|j| {
                x.iter_mut().for_each(|v| *v = 0.0);
                for (i, di) in d.iter().enumerate() {
                    for (xk, fk) in x.iter_mut().zip(&f[i][j]) {
                        *xk += di * fk;
                    }
                }
                lp_norm(&x, None, p)
            })
            .collect();
        let c = lp_norm(&norms, None, p);
        if c > best.0 {
            best = (c, d);
        }
    }
    let argmax = best.1.iter().map(|&v| v as i8).collect();
    Ok(SignLemmaReport { n, diagonal, c: best.0, argmax, holds: diagonal <= best.0 * (1.0 + 1e-12) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalReport {
    pub left: f64,
    pub retraction_upper: f64,
    pub u_norm: f64,
    pub right: f64,
    pub holds: bool,
}

fn check_partition(n: usize, parts: &[Vec<usize>]) -> Result<()> {
    let mut seen = vec![false; n];
    for &s in parts.iter().flatten() {
        if s >= n || seen[s] {
            return Err(precondition("blocks must be disjoint subsets of the group"));
        }
        seen[s] = true;
    }
    if seen.iter().any(|v| !v) {
        return Err(precondition("blocks must cover the group"));
    }
    Ok(())
}

/// `(sum_i ||chi_{X_i} R(chi_{Y_i} U)||_p^p)^{1/p} <= ||R|| ||U||`, using the
/// upper end of the norm estimate for `||R||`.
pub fn diagonal_inequality_check(r: &Retraction, u: &ModuleMatrix, x: &[Vec<usize>], y: &[Vec<usize>]) -> Result<DiagonalReport> {
    let n = r.group.order();
    if x.len() != y.len() {
        return Err(precondition(format!("partitions have {} and {} blocks", x.len(), y.len())));
    }
    check_partition(n, x)?;
    check_partition(n, y)?;
    let terms: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let image = r.apply(&u.masked(yi));
            let restricted: Vec<f64> = xi.iter().map(|&s| image[s]).collect();
            lp_norm(&restricted, None, r.p)
        })
        .collect();
    let left = lp_norm(&terms, None, r.p);
    let u_norm = u.norm();
    let right = r.norm.upper * u_norm;
    Ok(DiagonalReport { left, retraction_upper: r.norm.upper, u_norm, right, holds: left <= right * (1.0 + 1e-12) + 1e-12 })
}

/// `(sum_s |R(chi_{s} U)(s)|^p)^{1/p} <= ||U|| ||R||`.
pub fn singleton_diagonal_check(r: &Retraction, u: &ModuleMatrix) -> Result<DiagonalReport> {
    let singletons: Vec<Vec<usize>> = (0..r.group.order()).map(|s| vec![s]).collect();
    diagonal_inequality_check(r, u, &singletons, &singletons)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisjointTestOperator {
    pub t: ModuleMatrix,
    pub norm: f64,
    /// `||U|| max_i ||f_i||_{p'} ||x_i||_p`.
    pub bound: f64,
    pub holds: bool,
}

/// `T = sum_i x_i (x) U'(f_i)`, i.e. `T(t, s) = sum_i x_i(s) U'(f_i)(t)`.
pub fn disjoint_test_operator(xs: &[Vec<f64>], fs: &[Vec<f64>], u: &ModuleMatrix) -> Result<DisjointTestOperator> {
    if xs.len() != fs.len() {
        return Err(Error::DimensionMismatch { expected: fs.len(), found: xs.len() });
    }
    let n = u.group.order();
    for list in [xs, fs] {
        let mut used = vec![false; n];
        for v in list {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
            for (s, val) in v.iter().enumerate() {
                if *val != 0.0 {
                    if used[s] {
                        return Err(precondition("supports must be pairwise disjoint"));
                    }
                    used[s] = true;
                }
            }
        }
    }
    let mut t = ModuleMatrix::zeros(u.group.clone(), u.p);
    let mut scale: f64 = 0.0;
    for (x, f) in xs.iter().zip(fs) {
        let uf = u.adjoint_apply(f);
        for (row, c) in t.entries.iter_mut().zip(&uf) {
            for (e, xv) in row.iter_mut().zip(x) {
                *e += c * xv;
            }
        }
        scale = scale.max(lp_norm(f, None, u.p.conjugate()) * lp_norm(x, None, u.p));
    }
    let norm = t.norm();
    let bound = u.norm() * scale;
    Ok(DisjointTestOperator { holds: norm <= bound * (1.0 + 1e-12) + 1e-12, t, norm, bound })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub identity: String,
    pub samples: usize,
    pub max_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleReport {
    pub group: String,
    pub order: usize,
    pub p: Exponent,
    pub seed: u64,
    pub identities: Vec<IdentityResidual>,
    /// `C_{p,p}` of the uniform mean.
    pub uniform_constant: NormResult,
    pub retraction_norm: NormEstimate,
    pub diagonal_checks: usize,
    pub diagonal_holds: bool,
    pub passed: bool,
}

pub const IDENTITY_TOL: f64 = 1e-12;

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_vector(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn random_partition(n: usize, rng: &mut impl Rng) -> Vec<Vec<usize>> {
    let blocks = rng.random_range(1..=n);
    let mut parts = vec![Vec::new(); blocks];
    for s in 0..n {
        parts[rng.random_range(0..blocks)].push(s);
    }
    parts
}

/// Runs the module identities on `samples` random inputs each, with the
/// uniform mean for the retraction, together with the diagonal inequalities
/// on random partitions.
pub fn verify_module_identities(model: &GroupModel, p: Exponent, samples: usize, cfg: &SolverConfig) -> Result<ModuleReport> {
    let g = FiniteGroup::new(model)?;
    let n = g.order();
    let uniform = vec![1.0 / n as f64; n];
    let mut r = retraction_from_mean(&g, &uniform, p, cfg)?;
    let mut rng = cfg.rng(7_000);
    let mut residuals: BTreeMap<&'static str, f64> = BTreeMap::new();
    let mut record = |name: &'static str, v: f64| {
        let e = residuals.entry(name).or_insert(0.0);
        *e = e.max(v);
    };
    let mut diagonal_checks = 0;
    let mut diagonal_holds = true;
    for _ in 0..samples {
        let x = random_vector(n, &mut rng);
        let b = random_vector(n, &mut rng);
        let h = random_vector(n, &mut rng);
        let u = ModuleMatrix::random(g.clone(), p, &mut rng);
        let v = ModuleMatrix::random(g.clone(), p, &mut rng);
        let r1 = rng.random_range(0..n);
        let r2 = rng.random_range(0..n);

        record("Q(Pi x) = Pi~(x)", q_map(&pi(&g, p, &x)).max_abs_diff(&pi_tilde(&g, p, &x)));
        record("Q(r.U) = r*Q(U)", q_map(&module_action(r1, &u)).max_abs_diff(&star_action(r1, &q_map(&u))));
        record("Q(U+V) = Q(U)+Q(V)", q_map(&u.add(&v)).max_abs_diff(&q_map(&u).add(&q_map(&v))));
        record("R(Pi~ x) = x", max_diff(&r.apply(&pi_tilde(&g, p, &x)), &x));
        record("R(r*U) = r.R(U)", max_diff(&r.apply(&star_action(r1, &u)), &g.act(r1, &r.apply(&u))));
        record("Pi(b*x) = b.Pi(x)", {
            let lhs = pi(&g, p, &g.convolve_dense(&b, &x));
            let px = pi(&g, p, &x);
            let rhs = (0..n).fold(ModuleMatrix::zeros(g.clone(), p), |acc, t| acc.add(&module_action(t, &px).scaled(b[t])));
            lhs.max_abs_diff(&rhs)
        });
        record("(r1 r2)*U = r1*(r2*U)", star_action(g.mul(r1, r2), &u).max_abs_diff(&star_action(r1, &star_action(r2, &u))));
        record("||r*U|| = ||U||", (star_action(r1, &u).norm() - u.norm()).abs());
        record(
            "(f*g)*h = f*(g*h)",
            max_diff(&g.convolve_dense(&g.convolve_dense(&b, &x), &h), &g.convolve_dense(&b, &g.convolve_dense(&x, &h))),
        );
        record("phi(f*g) = phi(f)phi(g)", {
            let prod: f64 = g.convolve_dense(&b, &x).iter().sum();
            (prod - b.iter().sum::<f64>() * x.iter().sum::<f64>()).abs()
        });

        r.observe(&u);
        let xs = random_partition(n, &mut rng);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let ys: Vec<Vec<usize>> = xs.iter().map(|blk| blk.iter().map(|&s| perm[s]).collect()).collect();
        for c in [singleton_diagonal_check(&r, &u)?, diagonal_inequality_check(&r, &u, &xs, &ys)?] {
            diagonal_checks += 1;
            diagonal_holds &= c.holds;
        }
    }
    let recovered = mean_from_retraction(&r, cfg)?;
    record("mean round trip", max_diff(&recovered.mean, &uniform));

    let identities: Vec<IdentityResidual> = residuals
        .into_iter()
        .map(|(name, max_residual)| IdentityResidual {
            identity: name.to_string(),
            samples,
            max_residual,
            passed: max_residual <= IDENTITY_TOL,
        })
        .collect();
    let uniform_constant = r.mean_constant().cloned().expect("mean-induced retraction");
    let constant_is_one =
        (uniform_constant.lower_bound - 1.0).abs() <= 1e-9 && (uniform_constant.upper_bound - 1.0).abs() <= 1e-9;
    let norm_is_one = (r.norm_estimate().upper - 1.0).abs() <= 1e-9;
    let passed = identities.iter().all(|i| i.passed)
        && diagonal_holds
        && recovered.unit_mass
        && recovered.bounded
        && constant_is_one
        && norm_is_one;
    Ok(ModuleReport {
        group: model.name().to_string(),
        order: n,
        p,
        seed: cfg.seed,
        identities,
        uniform_constant,
        retraction_norm: r.norm_estimate(),
        diagonal_checks,
        diagonal_holds,
        passed,
    })
}
