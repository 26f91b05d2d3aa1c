//! The weak `(p,q)` multi-norm
//! `||x||^{(p,q)} = sup { (sum_i |<x_i, lambda_i>|^q)^{1/q} : mu_{p,n}(lambda) <= 1 }`
//! on tuples in `L^r(w)`, with `lambda` ranging over `L^{r'}(w)^n`.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::concave::{self, L1Program, L2Program};
use super::partition::{self, PartitionMode, PartitionProblem};
use crate::config::SolverConfig;
use crate::error::{precondition, Result};
use crate::result::{Method, NormResult, Witness};
use crate::spaces::{lp_norm, norming, pairing, Exponent, MultiVector};
use crate::weaksum::mu_raw;

/// Weak `(p,q)` norm of `x` in `L^r(w)^n` for `1 <= p <= q`.
pub fn weak_pq(x: &MultiVector, r: Exponent, p: Exponent, q: Exponent, cfg: &SolverConfig) -> Result<NormResult> {
    if p > q {
        return Err(precondition(format!("weak (p,q) norm needs p <= q, got p = {p}, q = {q}")));
    }
    if p.is_infinite() {
        return Err(precondition("weak (p,q) norm needs a finite p"));
    }
    let cols = x.columns();
    let w = x.weights();
    let norms = x.column_norms(r);
    let trivial = lp_norm(&norms, None, q);
    if x.is_zero() {
        return Ok(NormResult::exact(0.0, Method::ClosedForm, Witness::DualTuple(vec![vec![0.0; x.m()]; x.n()])));
    }
    if x.n() == 1 || q.is_infinite() {
        // A single nonzero lambda_i has mu(lambda) = ||lambda_i||.
        let i = (0..x.n()).fold(0, |b, i| if norms[i] > norms[b] { i } else { b });
        let mut lambda = vec![vec![0.0; x.m()]; x.n()];
        lambda[i] = norming(&cols[i], Some(w), r);
        return Ok(NormResult::exact(norms[i], Method::ClosedForm, Witness::DualTuple(lambda)));
    }
    if r.is_one() && p.is_one() {
        return one_q(x, q, cfg);
    }
    if r.is_one() && p == q {
        return Ok(l1_pp(cols, w, p, cfg, trivial));
    }
    if r.is(2.0) && p.is(2.0) && q.is(2.0) {
        return Ok(l2_22(cols, w, cfg, trivial));
    }
    if r.is_one() {
        return l1_pq(x, p, q, cfg, trivial);
    }
    generic(cols, w, r, p, q, cfg, trivial)
}

fn coefficients(cols: &[Vec<f64>], lambda: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
    cols.iter().zip(lambda).map(|(c, l)| pairing(c, l, Some(w))).collect()
}

/// The `(1,q)` norm on `l^1(w)` as a partition supremum.
fn one_q(x: &MultiVector, q: Exponent, cfg: &SolverConfig) -> Result<NormResult> {
    let (outcome, lambda) = one_q_partition(x, q, PartitionMode::Auto, cfg)?;
    let value = lp_norm(&coefficients(x.columns(), &lambda, x.weights()), None, q);
    let upper = outcome.upper.max(value);
    let method = outcome.method;
    if method.is_exact() {
        Ok(NormResult::exact(value, method, Witness::DualTuple(lambda)))
    } else {
        Ok(NormResult::from_below(value, upper, method, Witness::DualTuple(lambda)))
    }
}

/// Partition outcome for `sup_X (sum_i ||chi_{X_i} x_i||_1^q)^{1/q}` and the
/// dual tuple `lambda_i = chi_{X_i} sign(x_i)`.
pub(crate) fn one_q_partition(
    x: &MultiVector,
    q: Exponent,
    mode: PartitionMode,
    cfg: &SolverConfig,
) -> Result<(partition::PartitionOutcome, Vec<Vec<f64>>)> {
    let w = x.weights();
    let a = x.columns().iter().map(|c| c.iter().zip(w).map(|(v, w)| w * v.abs()).collect()).collect();
    let problem = PartitionProblem::new(a, q.as_f64(), q.as_f64());
    let outcome = partition::solve(&problem, mode, cfg)?;
    let mut lambda = vec![vec![0.0; x.m()]; x.n()];
    for (k, &i) in outcome.assignment.iter().enumerate() {
        let v = x.columns()[i][k];
        lambda[i][k] = if v == 0.0 { 0.0 } else { v.signum() };
    }
    Ok((outcome, lambda))
}

/// The `(p,p)` norm on `l^1(w)` through its concave program.
fn l1_pp(cols: &[Vec<f64>], w: &[f64], p: Exponent, cfg: &SolverConfig, trivial: f64) -> NormResult {
    let program = L1Program { cols, w, p };
    let sol = concave::maximize(&program, cfg);
    let lambda = program.witness(&sol.gamma);
    let value = lp_norm(&coefficients(cols, &lambda, w), None, p);
    NormResult::from_below(value, sol.upper.min(trivial), Method::ConcaveProgram, Witness::DualTuple(lambda))
}

/// The `(2,2)` norm on `l^2(w)` through its concave program.
fn l2_22(cols: &[Vec<f64>], w: &[f64], cfg: &SolverConfig, trivial: f64) -> NormResult {
    let program = L2Program::new(cols, w);
    let sol = concave::maximize(&program, cfg);
    let polar = program.polar(&sol.gamma);
    let lambda: Vec<Vec<f64>> =
        (0..cols.len()).map(|i| (0..w.len()).map(|k| polar[(k, i)] / w[k].sqrt()).collect()).collect();
    let value = lp_norm(&coefficients(cols, &lambda, w), None, Exponent::TWO);
    NormResult::from_below(value, sol.upper.min(trivial), Method::ConcaveProgram, Witness::DualTuple(lambda))
}

/// The `(p,q)` norm on `l^1(w)` for `1 < p < q`: alternating maximization of
/// `sum_i beta_i <x_i, lambda_i>` over `||beta||_{q'} <= 1` and rows of
/// `lambda` in the unit ball of `l^p_n`.
fn l1_pq(x: &MultiVector, p: Exponent, q: Exponent, cfg: &SolverConfig, trivial: f64) -> Result<NormResult> {
    let cols = x.columns();
    let w = x.weights();
    let n = x.n();
    let m = x.m();

    // Certified upper bounds: (p,q) <= (q,q) and (p,q) <= (1, q2) with 1/q2 = 1/p' + 1/q.
    let qq = l1_pp(cols, w, q, cfg, trivial);
    let q2 = Exponent::new(1.0 / (p.conjugate().recip() + q.recip()))?;
    let (one, one_lambda) = one_q_partition(x, q2, PartitionMode::Auto, cfg)?;
    let upper = trivial.min(qq.upper_bound).min(one.upper);

    let rows = |beta: &[f64]| -> Vec<Vec<f64>> {
        let mut lambda = vec![vec![0.0; m]; n];
        for k in 0..m {
            let u: Vec<f64> = (0..n).map(|i| beta[i] * cols[i][k]).collect();
            let row = norming(&u, None, p.conjugate());
            for i in 0..n {
                lambda[i][k] = row[i];
            }
        }
        lambda
    };
    let mut starts: Vec<Vec<f64>> = Vec::new();
    starts.push(norming(&coefficients(cols, &one_lambda, w), None, q));
    if let Witness::DualTuple(l) = &qq.certificate {
        starts.push(norming(&coefficients(cols, l, w), None, q));
    }
    starts.push(vec![1.0; n]);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        starts.push(e);
    }
    for s in 0..cfg.restarts {
        let mut rng = cfg.rng(2_000 + s as u64);
        starts.push((0..n).map(|_| StandardNormal.sample(&mut rng)).map(|v: f64| v.abs()).collect());
    }
    let runs: Vec<(f64, Vec<Vec<f64>>)> = starts
        .into_par_iter()
        .map(|beta| {
            let mut lambda = rows(&beta);
            let mut value = lp_norm(&coefficients(cols, &lambda, w), None, q);
            for _ in 0..cfg.max_iter {
                let beta = norming(&coefficients(cols, &lambda, w), None, q);
                let next = rows(&beta);
                let next_value = lp_norm(&coefficients(cols, &next, w), None, q);
                if !(next_value > value * (1.0 + 1e-15)) {
                    break;
                }
                lambda = next;
                value = next_value;
            }
            (value, lambda)
        })
        .collect();
    let mut best = (qq.lower_bound.min(0.0), vec![vec![0.0; m]; n]);
    for run in runs {
        if run.0 > best.0 {
            best = run;
        }
    }
    Ok(NormResult::from_below(best.0, upper, Method::AlternatingAscent, Witness::DualTuple(best.1)))
}

/// Ratio ascent on `F(lambda) / mu_{p,n}(lambda)` for the remaining cases.
/// The returned witness is rescaled by the certified upper bound on `mu`.
fn generic(
    cols: &[Vec<f64>],
    w: &[f64],
    r: Exponent,
    p: Exponent,
    q: Exponent,
    cfg: &SolverConfig,
    trivial: f64,
) -> Result<NormResult> {
    let n = cols.len();
    let m = w.len();
    let rd = r.conjugate();
    let light = SolverConfig { restarts: 4, max_iter: 100, ..cfg.clone() };
    let (pf, qf) = (p.as_f64(), q.as_f64());

    let ratio = |lambda: &[Vec<f64>]| -> (f64, f64, f64, Vec<f64>) {
        let c = coefficients(cols, lambda, w);
        let f = lp_norm(&c, None, q);
        let mu = mu_raw(p, lambda, w, rd, &light);
        (if mu.value > 0.0 { f / mu.value } else { 0.0 }, f, mu.value, mu.witness)
    };
    let gradient = |lambda: &[Vec<f64>], f: f64, mu: f64, z: &[f64]| -> Vec<Vec<f64>> {
        let c = coefficients(cols, lambda, w);
        let d: Vec<f64> = lambda.iter().map(|l| pairing(l, z, Some(w))).collect();
        let rho = f / mu;
        (0..n)
            .map(|i| {
                let gf = f.powf(1.0 - qf) * c[i].abs().powf(qf - 1.0) * c[i].signum();
                let gm = mu.powf(1.0 - pf) * d[i].abs().powf(pf - 1.0) * d[i].signum();
                (0..m).map(|k| w[k] * (gf * cols[i][k] - rho * gm * z[k]) / mu).collect()
            })
            .collect()
    };

    let starts = 1 + cfg.restarts / 8;
    let runs: Vec<(f64, Vec<Vec<f64>>)> = (0..starts)
        .into_par_iter()
        .map(|s| {
            let mut lambda: Vec<Vec<f64>> = if s == 0 {
                cols.iter().map(|c| norming(c, Some(w), r)).collect()
            } else {
                let mut rng = cfg.rng(3_000 + s as u64);
                (0..n).map(|_| (0..m).map(|_| StandardNormal.sample(&mut rng)).collect()).collect()
            };
            let (mut value, mut f, mut mu, mut z) = ratio(&lambda);
            let mut step = 0.5;
            for _ in 0..cfg.max_iter.min(200) {
                let g = gradient(&lambda, f, mu, &z);
                let gnorm = g.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
                let lnorm = lambda.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
                if gnorm == 0.0 || !gnorm.is_finite() {
                    break;
                }
                let mut moved = false;
                while step > 1e-10 {
                    let next: Vec<Vec<f64>> = lambda
                        .iter()
                        .zip(&g)
                        .map(|(l, gi)| l.iter().zip(gi).map(|(a, b)| a + step * lnorm * b / gnorm).collect())
                        .collect();
                    let cand = ratio(&next);
                    if cand.0 > value * (1.0 + 1e-13) {
                        lambda = next;
                        (value, f, mu, z) = cand;
                        step *= 1.5;
                        moved = true;
                        break;
                    }
                    step *= 0.5;
                }
                if !moved {
                    break;
                }
            }
            (value, lambda)
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for run in runs {
        if run.0 > best.0 {
            best = run;
        }
    }
    let lambda = best.1;
    let mu = mu_raw(p, &lambda, w, rd, cfg);
    if mu.upper_bound == 0.0 {
        return Err(crate::error::Error::Solver("ratio ascent collapsed to zero".into()));
    }
    let scaled: Vec<Vec<f64>> = lambda.iter().map(|l| l.iter().map(|v| v / mu.upper_bound).collect()).collect();
    let value = lp_norm(&coefficients(cols, &scaled, w), None, q);
    Ok(NormResult::from_below(value, trivial, Method::Optimizer, Witness::DualTuple(scaled)))
}
