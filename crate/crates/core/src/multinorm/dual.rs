//! The dual `(r,s)` multi-norm
//! `|||lambda||| = inf { sum_j ||alpha_j||_s mu_{r,n}(y_j) : lambda = sum_j M_{alpha_j} y_j }`
//! and the dual of the weak `(p,q)` norm.
//!
//! Both are computed by the same linear-programming scheme. Decompositions
//! are built by column generation over atoms `M_alpha y / (||alpha||_s mu(y))`,
//! with new atoms supplied by the weak `(r,s')` norm on the other side of
//! the pairing; the dual norm is computed by Kelley cutting planes whose cuts
//! are weak-norm witnesses. Weak duality
//! `<x, lambda> <= ||x||^{(r,s')} |||lambda|||` turns every iterate into a
//! certified bound.

use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use serde::{Deserialize, Serialize};

use super::weak::weak_pq;
use crate::config::SolverConfig;
use crate::error::{precondition, Error, Result};
use crate::result::{DecompositionTerm, Method, NormResult, Witness};
use crate::spaces::{lp_norm, norming, pairing, Exponent, MultiVector};
use crate::weaksum::{mu_pointwise_sup, mu_raw};

/// maximize `c . eta` subject to `|cut . eta| <= 1` for every cut.
fn cut_lp(c: &[f64], cuts: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<Variable> = c.iter().map(|ci| lp.add_var(*ci, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    for cut in cuts {
        let expr: Vec<(Variable, f64)> = vars.iter().zip(cut).filter(|(_, a)| **a != 0.0).map(|(v, a)| (*v, *a)).collect();
        if expr.is_empty() {
            continue;
        }
        lp.add_constraint(expr.as_slice(), ComparisonOp::Le, 1.0);
        lp.add_constraint(expr.as_slice(), ComparisonOp::Ge, -1.0);
    }
    let sol = lp.solve().map_err(|e| Error::Solver(format!("{e}")))?;
    Ok((sol.objective(), vars.iter().map(|v| sol[*v]).collect()))
}

/// minimize `sum_j |c_j|` subject to `sum_j c_j atom_j = target`.
fn decomposition_lp(target: &[f64], atoms: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<(Variable, Variable)> =
        atoms.iter().map(|_| (lp.add_var(1.0, (0.0, f64::INFINITY)), lp.add_var(1.0, (0.0, f64::INFINITY)))).collect();
    for (e, t) in target.iter().enumerate() {
        let mut expr = Vec::new();
        for (atom, (u, v)) in atoms.iter().zip(&vars) {
            if atom[e] != 0.0 {
                expr.push((*u, atom[e]));
                expr.push((*v, -atom[e]));
            }
        }
        if expr.is_empty() {
            if *t != 0.0 {
                return Err(Error::Solver("decomposition dictionary does not span the target".into()));
            }
            continue;
        }
        lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, *t);
    }
    let sol = lp.solve().map_err(|e| Error::Solver(format!("{e}")))?;
    Ok(vars.iter().map(|(u, v)| sol[*u] - sol[*v]).collect())
}

fn flatten(cols: &[Vec<f64>]) -> Vec<f64> {
    cols.iter().flatten().cloned().collect()
}

fn unflatten(v: &[f64], n: usize, m: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| v[i * m..(i + 1) * m].to_vec()).collect()
}

/// A decomposition atom `M_alpha y` of cost `||alpha||_s mu(y)`.
struct Atom {
    alpha: Vec<f64>,
    y: Vec<Vec<f64>>,
    cost: f64,
}

impl Atom {
    /// Entries of `M_alpha y / cost`, flattened column by column.
    fn normalized(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (a, col) in self.alpha.iter().zip(&self.y) {
            out.extend(col.iter().map(|v| a * v / self.cost));
        }
        out
    }
}

/// Certified upper bound on the dual `(r,s)` multi-norm of `lambda` in
/// `L^t(w)^n`, with the decomposition attaining it.
///
/// Requires `1 <= r < inf` and `1 < s <= r'`.
pub fn dual_multinorm_upper(
    lambda: &MultiVector,
    t: Exponent,
    r: Exponent,
    s: Exponent,
    cfg: &SolverConfig,
) -> Result<NormResult> {
    if r.is_infinite() {
        return Err(precondition("dual multi-norm needs a finite r"));
    }
    if s.is_one() || s > r.conjugate() {
        return Err(precondition(format!("dual multi-norm needs 1 < s <= r' = {}, got s = {s}", r.conjugate())));
    }
    let n = lambda.n();
    let m = lambda.m();
    let w = lambda.weights();
    if lambda.is_zero() {
        return Ok(NormResult::exact(0.0, Method::ClosedForm, Witness::Decomposition(Vec::new())));
    }
    let mu_upper = |y: &[Vec<f64>]| mu_raw(r, y, w, t, cfg).upper_bound;
    let alpha_norm = |a: &[f64]| lp_norm(a, None, s);
    let unit = |i: usize| -> Vec<f64> { (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect() };

    let mut atoms = Vec::new();
    let mut target_norms = Vec::new();
    let mu_lambda = mu_upper(lambda.columns());
    let ones = vec![1.0; n];
    atoms.push(Atom { cost: alpha_norm(&ones) * mu_lambda, alpha: ones, y: lambda.columns().to_vec() });
    for i in 0..n {
        let norm = lp_norm(lambda.column(i), Some(w), t);
        target_norms.push(norm);
        if norm > 0.0 {
            let mut y = vec![vec![0.0; m]; n];
            y[i] = lambda.column(i).to_vec();
            atoms.push(Atom { alpha: unit(i), y, cost: norm });
        }
    }
    for i in 0..n {
        for k in 0..m {
            let mut y = vec![vec![0.0; m]; n];
            y[i][k] = 1.0;
            atoms.push(Atom { alpha: unit(i), y, cost: w[k].powf(t.recip()) });
        }
    }

    let target = flatten(lambda.columns());
    let mut lower: f64 = 0.0;
    let s_dual = s.conjugate();
    for _ in 0..cfg.column_budget {
        let cuts: Vec<Vec<f64>> = atoms.iter().map(Atom::normalized).collect();
        let (_, eta) = cut_lp(&target, &cuts)?;
        let xi: Vec<Vec<f64>> = unflatten(&eta, n, m).into_iter().map(|c| c.iter().zip(w).map(|(e, w)| e / w).collect()).collect();
        let xi = MultiVector::new(lambda.space().clone(), xi)?;
        let oracle = weak_pq(&xi, t.conjugate(), r, s_dual, cfg)?;
        let pair: f64 = lambda.columns().iter().zip(xi.columns()).map(|(a, b)| pairing(a, b, Some(w))).sum();
        if oracle.upper_bound > 0.0 {
            lower = lower.max(pair / oracle.upper_bound);
        }
        if oracle.lower_bound <= 1.0 + 1e-9 {
            break;
        }
        let Witness::DualTuple(y) = oracle.certificate else {
            return Err(Error::Solver("weak norm oracle returned no dual tuple".into()));
        };
        let c: Vec<f64> = y.iter().zip(xi.columns()).map(|(a, b)| pairing(a, b, Some(w))).collect();
        let alpha = norming(&c, None, s_dual);
        let cost = alpha_norm(&alpha) * mu_upper(&y);
        if cost == 0.0 {
            break;
        }
        atoms.push(Atom { alpha, y, cost });
    }

    let dictionary: Vec<Vec<f64>> = atoms.iter().map(Atom::normalized).collect();
    let coeffs = decomposition_lp(&target, &dictionary)?;
    let mut terms = Vec::new();
    let mut residual = target.clone();
    for ((atom, c), entries) in atoms.iter().zip(&coeffs).zip(&dictionary) {
        if c.abs() <= 1e-15 {
            continue;
        }
        for (r, e) in residual.iter_mut().zip(entries) {
            *r -= c * e;
        }
        let scale = c / atom.cost;
        terms.push(DecompositionTerm {
            alpha: atom.alpha.iter().map(|a| a * scale).collect(),
            y: atom.y.clone(),
            cost: c.abs(),
        });
    }
    // Rounding left in the LP solution is covered by single-entry terms.
    for (e, res) in residual.iter().enumerate() {
        if *res != 0.0 {
            let (i, k) = (e / m, e % m);
            let mut y = vec![vec![0.0; m]; n];
            y[i][k] = 1.0;
            let mut alpha = vec![0.0; n];
            alpha[i] = *res;
            terms.push(DecompositionTerm { alpha, y, cost: res.abs() * w[k].powf(t.recip()) });
        }
    }
    let cost: f64 = terms.iter().map(|t| t.cost).sum();
    let per_coordinate: f64 = target_norms.iter().sum();
    let trivial = alpha_norm(&vec![1.0; n]) * mu_lambda;
    let (value, terms) = if cost <= per_coordinate && cost <= trivial {
        (cost, terms)
    } else if per_coordinate <= trivial {
        let terms = (0..n)
            .filter(|&i| target_norms[i] > 0.0)
            .map(|i| {
                let mut y = vec![vec![0.0; m]; n];
                y[i] = lambda.column(i).to_vec();
                DecompositionTerm { alpha: unit(i), y, cost: target_norms[i] }
            })
            .collect();
        (per_coordinate, terms)
    } else {
        let term = DecompositionTerm { alpha: vec![1.0; n], y: lambda.columns().to_vec(), cost: trivial };
        (trivial, vec![term])
    };
    Ok(NormResult::from_above(value, lower, Method::ColumnGeneration, Witness::Decomposition(terms)))
}

/// `sum_j M_{alpha_j} y_j`.
pub fn decomposition_sum(terms: &[DecompositionTerm], n: usize, m: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; m]; n];
    for t in terms {
        for i in 0..n {
            for k in 0..m {
                out[i][k] += t.alpha[i] * t.y[i][k];
            }
        }
    }
    out
}

/// `sup { |sum_i <x_i, lambda_i>| : ||x||^{(p,q)} <= 1 }` for `lambda` in
/// `L^{t'}(w)^n`, with `x` ranging over `L^t(w)^n`.
///
/// The lower bound is attained by the tuple in the certificate; the upper
/// bound is the value of the final cutting-plane relaxation.
pub fn dual_value(lambda: &MultiVector, t: Exponent, p: Exponent, q: Exponent, cfg: &SolverConfig) -> Result<NormResult> {
    if p > q {
        return Err(precondition(format!("dual value needs p <= q, got p = {p}, q = {q}")));
    }
    let n = lambda.n();
    let m = lambda.m();
    let w = lambda.weights();
    if lambda.is_zero() {
        return Ok(NormResult::exact(0.0, Method::ClosedForm, Witness::Tuple(vec![vec![0.0; m]; n])));
    }
    if t.is_one() && p.is_one() && q.is_one() {
        // Extreme points of the max-norm ball are sign patterns at one point.
        let value = mu_pointwise_sup(lambda);
        let k = (0..m)
            .find(|&k| (lambda.columns().iter().map(|c| c[k].abs()).sum::<f64>() - value).abs() == 0.0)
            .unwrap_or(0);
        let x = lambda.columns().iter().map(|c| (0..m).map(|j| if j == k { c[k].signum() / w[k] } else { 0.0 }).collect()).collect();
        return Ok(NormResult::exact(value, Method::Enumeration, Witness::Tuple(x)));
    }
    let objective: Vec<f64> = flatten(lambda.columns()).iter().enumerate().map(|(e, v)| v * w[e % m]).collect();
    let mut cuts = Vec::new();
    for i in 0..n {
        for k in 0..m {
            let mut cut = vec![0.0; n * m];
            cut[i * m + k] = w[k].powf(t.recip());
            cuts.push(cut);
        }
    }
    let mut best = (0.0, vec![vec![0.0; m]; n]);
    let mut upper = f64::INFINITY;
    for _ in 0..cfg.column_budget {
        let (lp_value, xs) = cut_lp(&objective, &cuts)?;
        upper = upper.min(lp_value);
        let x = MultiVector::new(lambda.space().clone(), unflatten(&xs, n, m))?;
        let norm = weak_pq(&x, t, p, q, cfg)?;
        if norm.upper_bound > 0.0 {
            let candidate = lp_value / norm.upper_bound;
            if candidate > best.0 {
                best = (candidate, x.columns().iter().map(|c| c.iter().map(|v| v / norm.upper_bound).collect()).collect());
            }
        }
        if norm.lower_bound <= 1.0 + 1e-9 || upper - best.0 <= 1e-10 * upper {
            break;
        }
        let Witness::DualTuple(mu) = norm.certificate else {
            return Err(Error::Solver("weak norm returned no dual tuple".into()));
        };
        let c: Vec<f64> = x.columns().iter().zip(&mu).map(|(a, b)| pairing(a, b, Some(w))).collect();
        let beta = norming(&c, None, q);
        let cut: Vec<f64> = (0..n * m).map(|e| beta[e / m] * mu[e / m][e % m] * w[e % m]).collect();
        cuts.push(cut);
    }
    Ok(NormResult::from_below(best.0, upper, Method::CuttingPlane, Witness::Tuple(best.1)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityRow {
    pub sample: usize,
    pub dual_lower: f64,
    pub dual_upper: f64,
    pub multinorm_lower: f64,
    pub multinorm_upper: f64,
    pub relative_gap: f64,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub p: Exponent,
    pub q: Exponent,
    pub ambient: Exponent,
    pub rows: Vec<DualityRow>,
    pub max_relative_gap: f64,
    pub pass: bool,
}

/// Compares the dual of the weak `(p,q)` norm on `L^t(w)` with the dual
/// `(p,q')` multi-norm on `L^{t'}(w)` for each sample `lambda`.
pub fn duality_check(samples: &[MultiVector], t: Exponent, p: Exponent, q: Exponent, cfg: &SolverConfig) -> Result<DualityReport> {
    let mut rows = Vec::new();
    for (index, lambda) in samples.iter().enumerate() {
        let dv = dual_value(lambda, t, p, q, cfg)?;
        let up = dual_multinorm_upper(lambda, t.conjugate(), p, q.conjugate(), cfg)?;
        let slack = 1e-9 * up.upper_bound.max(dv.upper_bound).max(1e-12);
        let consistent = dv.lower_bound <= up.upper_bound + slack && up.lower_bound <= dv.upper_bound + slack;
        let relative_gap =
            if up.upper_bound > 0.0 { ((up.upper_bound - dv.lower_bound) / up.upper_bound).max(0.0) } else { 0.0 };
        rows.push(DualityRow {
            sample: index,
            dual_lower: dv.lower_bound,
            dual_upper: dv.upper_bound,
            multinorm_lower: up.lower_bound,
            multinorm_upper: up.upper_bound,
            relative_gap,
            consistent,
        });
    }
    let max_relative_gap = rows.iter().map(|r| r.relative_gap).fold(0.0, f64::max);
    let pass = rows.iter().all(|r| r.consistent);
    Ok(DualityReport { p, q, ambient: t, rows, max_relative_gap, pass })
}
