//! Linear operators between finite `L^r(w)` spaces, their amplifications
//! `T^{(k)}(x_1, ..., x_k) = (T x_1, ..., T x_k)` between multi-normed
//! spaces, and the multi-bounded norm `sup_k ||T^{(k)}||`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{check_dims, precondition, Error, Result};
use crate::multinorm::MultiNormEngine;
use crate::result::{Method, NormResult, Witness};
use crate::spaces::{lp_norm, DiscreteSpace, Exponent, MultiVector, Vector};

/// A matrix acting from `L^r(domain)` to `L^t(codomain)`; rows are indexed
/// by codomain points.
#[derive(Clone, Debug, PartialEq)]
pub struct LinOp {
    matrix: Vec<Vec<f64>>,
    domain: Arc<DiscreteSpace>,
    r: Exponent,
    codomain: Arc<DiscreteSpace>,
    t: Exponent,
}

impl LinOp {
    pub fn new(matrix: Vec<Vec<f64>>, domain: Arc<DiscreteSpace>, r: Exponent, codomain: Arc<DiscreteSpace>, t: Exponent) -> Result<Self> {
        check_dims(codomain.len(), matrix.len())?;
        for row in &matrix {
            check_dims(domain.len(), row.len())?;
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Parse("operator entries must be finite".into()));
            }
        }
        Ok(LinOp { matrix, domain, r, codomain, t })
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn domain(&self) -> &Arc<DiscreteSpace> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<DiscreteSpace> {
        &self.codomain
    }

    pub fn domain_exponent(&self) -> Exponent {
        self.r
    }

    pub fn codomain_exponent(&self) -> Exponent {
        self.t
    }

    pub fn apply_values(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if **x.space() != *self.domain {
            return Err(Error::InvalidSpace("vector is not on the operator's domain".into()));
        }
        Vector::new(self.codomain.clone(), self.apply_values(x.values()))
    }

    pub fn apply_tuple(&self, x: &MultiVector) -> Result<MultiVector> {
        if **x.space() != *self.domain {
            return Err(Error::InvalidSpace("tuple is not on the operator's domain".into()));
        }
        MultiVector::new(self.codomain.clone(), x.columns().iter().map(|c| self.apply_values(c)).collect())
    }

    fn image_norm(&self, x: &[f64]) -> f64 {
        self.codomain.norm(&self.apply_values(x), self.t)
    }

    /// `g^{(i)}_j = T_ij / w_j`, so that `(T x)_i = <g^{(i)}, x>`.
    fn row_functional(&self, i: usize) -> Vec<f64> {
        self.matrix[i].iter().zip(self.domain.weights()).map(|(a, w)| a / w).collect()
    }

    /// `||T||` from `L^1(w)`: the largest image of a normalized point mass.
    fn norm_from_l1(&self) -> (f64, usize) {
        let w = self.domain.weights();
        let mut best = (0.0, 0);
        for j in 0..self.domain.len() {
            let col: Vec<f64> = self.matrix.iter().map(|row| row[j]).collect();
            let v = self.codomain.norm(&col, self.t) / w[j];
            if v > best.0 {
                best = (v, j);
            }
        }
        best
    }

    /// `||T||` into `L^inf`: the largest dual norm of a row functional.
    fn norm_into_linf(&self) -> (f64, usize) {
        let rd = self.r.conjugate();
        let mut best = (0.0, 0);
        for i in 0..self.codomain.len() {
            let v = self.domain.norm(&self.row_functional(i), rd);
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    }

    /// Certified upper bound on `||T||` from the row functionals and from
    /// comparisons with the `L^1` and `L^inf` norms.
    fn upper_bound(&self) -> f64 {
        let rd = self.r.conjugate();
        let rows: Vec<f64> = (0..self.codomain.len()).map(|i| self.domain.norm(&self.row_functional(i), rd)).collect();
        let mut best = self.codomain.norm(&rows, self.t);
        best = best.min(self.domain.total_weight().powf(rd.recip()) * self.norm_from_l1().0);
        best = best.min(self.codomain.total_weight().powf(self.t.recip()) * self.norm_into_linf().0);
        best
    }
}

/// `||T: L^r -> L^t||` with a unit vector attaining the lower bound.
pub fn op_norm(op: &LinOp, cfg: &SolverConfig) -> NormResult {
    let m = op.domain.len();
    let w = op.domain.weights();
    if op.matrix.iter().flatten().all(|v| *v == 0.0) {
        return NormResult::exact(0.0, Method::ClosedForm, Witness::Point(vec![0.0; m]));
    }
    if op.r.is_one() {
        let (_, j) = op.norm_from_l1();
        let mut x = vec![0.0; m];
        x[j] = 1.0 / w[j];
        return NormResult::exact(op.image_norm(&x), Method::ClosedForm, Witness::Point(x));
    }
    if op.t.is_infinite() {
        let (_, i) = op.norm_into_linf();
        let x = op.domain.norming(&op.row_functional(i), op.r.conjugate());
        return NormResult::exact(op.image_norm(&x), Method::ClosedForm, Witness::Point(x));
    }
    if op.r.is(2.0) && op.t.is(2.0) {
        let wc = op.codomain.weights();
        let a = DMatrix::from_fn(op.codomain.len(), m, |i, j| wc[i].sqrt() * op.matrix[i][j] / w[j].sqrt());
        let svd = a.svd(false, true);
        let vt = svd.v_t.expect("right singular vectors requested");
        let top = (0..svd.singular_values.len()).fold(0, |b, j| if svd.singular_values[j] > svd.singular_values[b] { j } else { b });
        let x: Vec<f64> = (0..m).map(|j| vt[(top, j)] / w[j].sqrt()).collect();
        return NormResult::exact(op.image_norm(&x), Method::Spectral, Witness::Point(x));
    }
    let (value, x) = power_method(op, cfg);
    NormResult::from_below(value, op.upper_bound(), Method::Optimizer, Witness::Point(x))
}

/// Alternates between the norming functional of `T x` and the norming
/// vector of its pull-back; the image norm never decreases.
fn power_method(op: &LinOp, cfg: &SolverConfig) -> (f64, Vec<f64>) {
    let m = op.domain.len();
    let w = op.domain.weights();
    let wc = op.codomain.weights();
    let starts = m + cfg.restarts;
    let runs: Vec<(f64, Vec<f64>)> = (0..starts)
        .into_par_iter()
        .map(|s| {
            let seed: Vec<f64> = if s < m {
                (0..m).map(|j| if j == s { 1.0 } else { 0.0 }).collect()
            } else {
                let mut rng = cfg.rng(5_000 + s as u64);
                (0..m).map(|_| StandardNormal.sample(&mut rng)).collect()
            };
            let mut x = op.domain.norming(&seed, op.r.conjugate());
            let mut value = op.image_norm(&x);
            for _ in 0..cfg.max_iter {
                let y = op.apply_values(&x);
                let z = op.codomain.norming(&y, op.t);
                let h: Vec<f64> =
                    (0..m).map(|j| (0..op.codomain.len()).map(|i| wc[i] * z[i] * op.matrix[i][j]).sum::<f64>() / w[j]).collect();
                let next = op.domain.norming(&h, op.r.conjugate());
                let next_value = op.image_norm(&next);
                if !(next_value > value * (1.0 + 1e-15)) {
                    break;
                }
                x = next;
                value = next_value;
            }
            (value, x)
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, vec![0.0; m]);
    for run in runs {
        if run.0 > best.0 {
            best = run;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplificationResult {
    pub k: usize,
    /// Certified: `||T^{(k)} x||.lower / ||x||.upper` at the certificate.
    pub result: NormResult,
    /// Ratio of the engines' point values at the best candidate.
    pub point_estimate: f64,
}

struct Candidate {
    certified: f64,
    estimate: f64,
    x: Vec<Vec<f64>>,
}

fn evaluate_candidate(op: &LinOp, x: Vec<Vec<f64>>, dom: &dyn MultiNormEngine, cod: &dyn MultiNormEngine) -> Result<Option<Candidate>> {
    let tuple = MultiVector::new(op.domain.clone(), x)?;
    if tuple.is_zero() {
        return Ok(None);
    }
    let dx = dom.evaluate(&tuple)?;
    if dx.upper_bound <= 0.0 {
        return Ok(None);
    }
    let dy = cod.evaluate(&op.apply_tuple(&tuple)?)?;
    let estimate = if dx.value > 0.0 { dy.value / dx.value } else { 0.0 };
    Ok(Some(Candidate { certified: dy.lower_bound / dx.upper_bound, estimate, x: tuple.columns().to_vec() }))
}

/// Lower estimate of `||T^{(k)}||` by candidate search; `seeds` are extra
/// starting tuples (for instance a padded witness from `k - 1`).
pub fn amplification_norm(
    op: &LinOp,
    k: usize,
    dom: &dyn MultiNormEngine,
    cod: &dyn MultiNormEngine,
    seeds: &[Vec<Vec<f64>>],
    cfg: &SolverConfig,
) -> Result<AmplificationResult> {
    if k == 0 {
        return Err(precondition("amplification needs k >= 1"));
    }
    let m = op.domain.len();
    let norm = op_norm(op, cfg);
    let Witness::Point(v) = &norm.certificate else { unreachable!("op_norm returns a point") };
    let mut pool: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut first = vec![vec![0.0; m]; k];
    first[0] = v.clone();
    pool.push(first);
    pool.push(vec![v.clone(); k]);
    pool.extend(seeds.iter().filter(|s| s.len() == k).cloned());
    for s in 0..cfg.restarts / 2 {
        let mut rng = cfg.rng(6_000 + s as u64);
        pool.push((0..k).map(|_| (0..m).map(|_| StandardNormal.sample(&mut rng)).collect()).collect());
    }
    let evaluated: Vec<Result<Option<Candidate>>> =
        pool.into_par_iter().map(|x| evaluate_candidate(op, x, dom, cod)).collect();
    let mut best: Option<Candidate> = None;
    for c in evaluated {
        if let Some(c) = c? {
            if best.as_ref().is_none_or(|b| c.certified > b.certified) {
                best = Some(c);
            }
        }
    }
    let Some(mut best) = best else {
        return Ok(AmplificationResult {
            k,
            result: NormResult::exact(0.0, Method::ClosedForm, Witness::Tuple(vec![vec![0.0; m]; k])),
            point_estimate: 0.0,
        });
    };
    let mut rng = cfg.rng(7_000 + k as u64);
    for _ in 0..cfg.restarts {
        let mut x = best.x.clone();
        let i = rng.random_range(0..k);
        let scale = lp_norm(&x[i], None, Exponent::TWO).max(1e-3) * 0.3;
        for v in x[i].iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v += scale * z;
        }
        if let Some(c) = evaluate_candidate(op, x, dom, cod)? {
            if c.certified > best.certified {
                best = c;
            }
        }
    }
    let upper = k as f64 * norm.upper_bound;
    Ok(AmplificationResult {
        k,
        result: NormResult::from_below(best.certified, upper, Method::Optimizer, Witness::Tuple(best.x)),
        point_estimate: best.estimate,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MbReport {
    pub op_norm: NormResult,
    pub per_k: Vec<AmplificationResult>,
    /// The largest certified amplification over `k <= k_max`.
    pub value: NormResult,
    pub monotone: bool,
    /// For equal weak `(p,q)` engines on both sides the multi-bounded norm
    /// equals the operator norm; `None` when that does not apply.
    pub matches_op_norm: Option<bool>,
}

/// `sup_{k <= k_max} ||T^{(k)}||`, each `k` seeded with the padded witness
/// from `k - 1`.
pub fn mb_norm(op: &LinOp, k_max: usize, dom: &dyn MultiNormEngine, cod: &dyn MultiNormEngine, cfg: &SolverConfig) -> Result<MbReport> {
    if k_max == 0 {
        return Err(precondition("k_max must be positive"));
    }
    let norm = op_norm(op, cfg);
    let mut per_k: Vec<AmplificationResult> = Vec::new();
    for k in 1..=k_max {
        let mut seeds = Vec::new();
        if let Some(prev) = per_k.last() {
            if let Witness::Tuple(x) = &prev.result.certificate {
                let mut padded = x.clone();
                padded.push(vec![0.0; op.domain.len()]);
                seeds.push(padded);
                let mut repeated = x.clone();
                repeated.push(x[x.len() - 1].clone());
                seeds.push(repeated);
            }
        }
        per_k.push(amplification_norm(op, k, dom, cod, &seeds, cfg)?);
    }
    let monotone = per_k
        .windows(2)
        .all(|w| w[1].result.lower_bound >= w[0].result.lower_bound - 1e-8 * w[0].result.lower_bound.max(1.0));
    let best = per_k.iter().fold(&per_k[0], |b, r| if r.result.lower_bound > b.result.lower_bound { r } else { b });
    let upper = per_k.iter().map(|r| r.result.upper_bound).fold(0.0, f64::max);
    let matches_op_norm = match (dom.weak_parameters(), cod.weak_parameters()) {
        (Some(a), Some(b)) if a == b => {
            let value = best.result.lower_bound;
            let slack = 1e-8 * norm.upper_bound.max(1.0);
            Some(value <= norm.upper_bound + slack && value >= norm.lower_bound - slack)
        }
        _ => None,
    };
    let value = match matches_op_norm {
        Some(_) => NormResult::from_below(best.result.lower_bound, norm.upper_bound, Method::Optimizer, best.result.certificate.clone()),
        None => NormResult::from_below(best.result.lower_bound, upper, Method::Optimizer, best.result.certificate.clone()),
    };
    Ok(MbReport { op_norm: norm, per_k, value, monotone, matches_op_norm })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetConstantReport {
    /// Over tuples of distinct elements of the set, in index order.
    pub subset_value: f64,
    pub subset_upper: f64,
    /// Over all tuples with repetition.
    pub tuple_value: f64,
    pub tuple_upper: f64,
    pub subsets: usize,
    pub tuples: usize,
    pub agree: bool,
}

/// `c_B = sup ||(b_1, ..., b_n)||_n` over tuples from `B` with `n <= n_max`,
/// computed both over all tuples and over distinct subsets.
pub fn mb_set_constant(b: &[Vector], engine: &dyn MultiNormEngine, n_max: usize, guard: usize) -> Result<SetConstantReport> {
    if b.is_empty() {
        return Ok(SetConstantReport { subset_value: 0.0, subset_upper: 0.0, tuple_value: 0.0, tuple_upper: 0.0, subsets: 0, tuples: 0, agree: true });
    }
    let len = b.len();
    let n_max = n_max.max(1);
    let tuple_count: f64 = (1..=n_max).map(|n| (len as f64).powi(n as i32)).sum();
    if tuple_count > guard as f64 {
        return Err(Error::GuardExceeded { what: "tuples from the set".into(), size: tuple_count, limit: guard as f64 });
    }
    let eval = |idx: &[usize]| -> Result<NormResult> {
        let vs: Vec<Vector> = idx.iter().map(|&i| b[i].clone()).collect();
        engine.evaluate(&MultiVector::from_vectors(&vs)?)
    };
    let (mut sub, mut sub_up, mut subsets) = (0.0f64, 0.0f64, 0);
    for mask in 1u64..(1u64 << len.min(63)) {
        if mask.count_ones() as usize > n_max {
            continue;
        }
        let idx: Vec<usize> = (0..len).filter(|i| mask >> i & 1 == 1).collect();
        let r = eval(&idx)?;
        sub = sub.max(r.lower_bound);
        sub_up = sub_up.max(r.upper_bound);
        subsets += 1;
    }
    let (mut tup, mut tup_up, mut tuples) = (0.0f64, 0.0f64, 0);
    for n in 1..=n_max {
        let mut idx = vec![0usize; n];
        loop {
            let r = eval(&idx)?;
            tup = tup.max(r.lower_bound);
            tup_up = tup_up.max(r.upper_bound);
            tuples += 1;
            let mut pos = 0;
            while pos < n {
                idx[pos] += 1;
                if idx[pos] < len {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
    }
    let slack = 1e-9 * tup_up.max(sub_up).max(1.0);
    let agree = tup <= sub_up + slack && sub <= tup_up + slack;
    Ok(SetConstantReport { subset_value: sub, subset_upper: sub_up, tuple_value: tup, tuple_upper: tup_up, subsets, tuples, agree })
}

/// A random operator with Gaussian entries.
pub fn random_operator(domain: Arc<DiscreteSpace>, r: Exponent, codomain: Arc<DiscreteSpace>, t: Exponent, rng: &mut impl Rng) -> LinOp {
    let matrix = (0..codomain.len()).map(|_| (0..domain.len()).map(|_| StandardNormal.sample(rng)).collect()).collect();
    LinOp::new(matrix, domain, r, codomain, t).expect("shapes match")
}
