//! The weak `p`-summing norm
//! `mu_{p,n}(x) = sup { (sum_i |<x_i, lambda>|^p)^{1/p} : ||lambda||_{r'} <= 1 }`
//! of a tuple in `L^r(w)`.
//!
//! Exact routes cover `r = inf` (row formula), `r = 1` (sign vectors over the
//! points), `p = 1` (sign vectors over the tuple) and `p = r = 2` (largest
//! singular value). Everything else runs a multi-start ascent whose value is
//! always attained by the returned functional; the upper bound combines the
//! exact routes through monotonicity in `p` and inclusions between the
//! `L^r(w)` unit balls.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{precondition, Result};
use crate::result::Method;
use crate::spaces::{lp_norm, norming, pairing, Exponent, MultiVector};

/// Sign enumeration is used up to this many signs.
pub const SIGN_ENUMERATION_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuResult {
    /// `(sum_i |<x_i, witness>|^p)^{1/p}`, attained by `witness`.
    pub value: f64,
    pub upper_bound: f64,
    /// A functional in the unit ball of `L^{r'}(w)`.
    pub witness: Vec<f64>,
    pub method: Method,
}

impl MuResult {
    pub fn gap(&self) -> f64 {
        self.upper_bound - self.value
    }
}

/// `mu_{p,n}(x)` for `x` in `L^r(w)` with the default budgets.
pub fn mu(p: Exponent, x: &MultiVector, r: Exponent) -> MuResult {
    mu_with(p, x, r, &SolverConfig::default())
}

pub fn mu_with(p: Exponent, x: &MultiVector, r: Exponent, cfg: &SolverConfig) -> MuResult {
    mu_raw(p, x.columns(), x.weights(), r, cfg)
}

/// Skips the exact routes; used to cross-check them.
pub fn mu_optimizer(p: Exponent, x: &MultiVector, r: Exponent, cfg: &SolverConfig) -> MuResult {
    let cols = x.columns();
    let w = x.weights();
    let (value, witness) = ascend(p, cols, w, r, cfg);
    let upper = upper_bound(p, cols, w, r).max(value);
    MuResult { value, upper_bound: upper, witness, method: Method::Optimizer }
}

/// `mu_{1,n}` of a tuple in `l^inf`, which is `max_k sum_i |x_i(k)|`.
pub fn mu_pointwise_sup(x: &MultiVector) -> f64 {
    (0..x.m()).map(|k| x.columns().iter().map(|c| c[k].abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub(crate) fn evaluate(p: Exponent, cols: &[Vec<f64>], w: &[f64], lambda: &[f64]) -> f64 {
    let a: Vec<f64> = cols.iter().map(|c| pairing(c, lambda, Some(w))).collect();
    lp_norm(&a, None, p)
}

pub(crate) fn mu_raw(p: Exponent, cols: &[Vec<f64>], w: &[f64], r: Exponent, cfg: &SolverConfig) -> MuResult {
    let m = w.len();
    let n = cols.len();
    let exact = |value: f64, witness: Vec<f64>, method| MuResult { value, upper_bound: value, witness, method };
    if cols.iter().all(|c| c.iter().all(|v| *v == 0.0)) {
        return exact(0.0, vec![0.0; m], Method::ClosedForm);
    }
    if p.is_infinite() {
        let norms: Vec<f64> = cols.iter().map(|c| lp_norm(c, Some(w), r)).collect();
        let i = argmax(&norms);
        let lambda = norming(&cols[i], Some(w), r);
        return exact(evaluate(p, cols, w, &lambda), lambda, Method::ClosedForm);
    }
    if r.is_infinite() {
        let (k, _) = best_row(p, cols, m);
        let mut lambda = vec![0.0; m];
        lambda[k] = 1.0 / w[k];
        return exact(evaluate(p, cols, w, &lambda), lambda, Method::ClosedForm);
    }
    if p.is(2.0) && r.is(2.0) {
        let (_, lambda) = spectral(cols, w);
        return exact(evaluate(p, cols, w, &lambda), lambda, Method::Spectral);
    }
    if p.is_one() && n <= SIGN_ENUMERATION_LIMIT {
        let (_, y) = best_signed_sum(cols, w, r);
        let lambda = norming(&y, Some(w), r);
        return exact(evaluate(p, cols, w, &lambda), lambda, Method::BruteExtreme);
    }
    if r.is_one() && m <= SIGN_ENUMERATION_LIMIT {
        let (_, lambda) = best_point_signs(p, cols, w);
        return exact(evaluate(p, cols, w, &lambda), lambda, Method::BruteExtreme);
    }
    let (value, witness) = ascend(p, cols, w, r, cfg);
    let upper = upper_bound(p, cols, w, r).max(value);
    MuResult { value, upper_bound: upper, witness, method: Method::Optimizer }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Index and `l^p` norm of the row `(x_1(k), ..., x_n(k))` of largest norm.
fn best_row(p: Exponent, cols: &[Vec<f64>], m: usize) -> (usize, f64) {
    let norms: Vec<f64> = (0..m)
        .map(|k| {
            let row: Vec<f64> = cols.iter().map(|c| c[k]).collect();
            lp_norm(&row, None, p)
        })
        .collect();
    let k = argmax(&norms);
    (k, norms[k])
}

/// Largest singular value of `W^{1/2} X` and the matching functional.
fn spectral(cols: &[Vec<f64>], w: &[f64]) -> (f64, Vec<f64>) {
    let m = w.len();
    let a = DMatrix::from_fn(m, cols.len(), |k, i| w[k].sqrt() * cols[i][k]);
    let svd = a.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let j = argmax(svd.singular_values.as_slice());
    let lambda = (0..m).map(|k| u[(k, j)] / w[k].sqrt()).collect();
    (svd.singular_values[j], lambda)
}

/// Visits every sign vector in `{+1} x {+-1}^{len-1}` in Gray-code order,
/// passing the index that was flipped (none for the first).
fn gray_signs(len: usize, mut visit: impl FnMut(Option<usize>, &[f64])) {
    let mut signs = vec![1.0; len];
    visit(None, &signs);
    if len <= 1 {
        return;
    }
    for g in 1u64..(1u64 << (len - 1)) {
        let j = g.trailing_zeros() as usize + 1;
        signs[j] = -signs[j];
        visit(Some(j), &signs);
    }
}

/// `max_alpha ||sum_i alpha_i x_i||_r` over sign vectors, with the maximizer.
pub(crate) fn best_signed_sum(cols: &[Vec<f64>], w: &[f64], r: Exponent) -> (f64, Vec<f64>) {
    let m = w.len();
    let mut y: Vec<f64> = (0..m).map(|k| cols.iter().map(|c| c[k]).sum()).collect();
    let mut best = (f64::NEG_INFINITY, y.clone());
    gray_signs(cols.len(), |flip, signs| {
        if let Some(j) = flip {
            for k in 0..m {
                y[k] += 2.0 * signs[j] * cols[j][k];
            }
        }
        let v = lp_norm(&y, Some(w), r);
        if v > best.0 {
            best = (v, y.clone());
        }
    });
    best
}

/// `max_sigma (sum_i |<x_i, sigma>|^p)^{1/p}` over sign functions `sigma`.
fn best_point_signs(p: Exponent, cols: &[Vec<f64>], w: &[f64]) -> (f64, Vec<f64>) {
    let m = w.len();
    let mut a: Vec<f64> = cols.iter().map(|c| c.iter().zip(w).map(|(v, w)| v * w).sum()).collect();
    let mut best = (f64::NEG_INFINITY, vec![1.0; m]);
    gray_signs(m, |flip, signs| {
        if let Some(k) = flip {
            for (ai, c) in a.iter_mut().zip(cols) {
                *ai += 2.0 * signs[k] * w[k] * c[k];
            }
        }
        let v = lp_norm(&a, None, p);
        if v > best.0 {
            best = (v, signs.to_vec());
        }
    });
    best
}

/// Certified upper bound for the optimizer route.
pub(crate) fn upper_bound(p: Exponent, cols: &[Vec<f64>], w: &[f64], r: Exponent) -> f64 {
    let m = w.len();
    let norms: Vec<f64> = cols.iter().map(|c| lp_norm(c, Some(w), r)).collect();
    let mut best = lp_norm(&norms, None, p);
    if cols.len() <= SIGN_ENUMERATION_LIMIT {
        // mu is nonincreasing in p, and mu_1 is a signed-sum maximum.
        best = best.min(best_signed_sum(cols, w, r).0);
    }
    let total: f64 = w.iter().sum();
    // ||lambda||_{1,w} <= W^{1/r} ||lambda||_{r',w}.
    best = best.min(total.powf(r.recip()) * best_row(p, cols, m).1);
    if m <= SIGN_ENUMERATION_LIMIT {
        // ||lambda||_inf <= w_min^{-1/r'} ||lambda||_{r',w}.
        let w_min = w.iter().cloned().fold(f64::INFINITY, f64::min);
        best = best.min(w_min.powf(-r.conjugate().recip()) * best_point_signs(p, cols, w).0);
    }
    best
}

/// Conditional-gradient ascent from several starts. Each step replaces
/// `lambda` by the norming functional of the gradient of
/// `sum_i |<x_i, lambda>|^p`, which never decreases the objective.
pub(crate) fn ascend(p: Exponent, cols: &[Vec<f64>], w: &[f64], r: Exponent, cfg: &SolverConfig) -> (f64, Vec<f64>) {
    let m = w.len();
    let n = cols.len();
    let starts = n + cfg.restarts;
    let runs: Vec<(f64, Vec<f64>)> = (0..starts)
        .into_par_iter()
        .map(|s| {
            let h: Vec<f64> = if s < n {
                cols[s].clone()
            } else {
                let mut rng = cfg.rng(s as u64);
                (0..m).map(|_| StandardNormal.sample(&mut rng)).collect()
            };
            let start = norming(&h, Some(w), r);
            power_run(p, cols, w, r, start, cfg.max_iter)
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

fn power_run(p: Exponent, cols: &[Vec<f64>], w: &[f64], r: Exponent, start: Vec<f64>, max_iter: usize) -> (f64, Vec<f64>) {
    let m = w.len();
    let pf = p.as_f64();
    let mut lambda = start;
    let mut value = evaluate(p, cols, w, &lambda);
    for _ in 0..max_iter {
        let a: Vec<f64> = cols.iter().map(|c| pairing(c, &lambda, Some(w))).collect();
        let mut h = vec![0.0; m];
        for (ai, c) in a.iter().zip(cols) {
            let g = if pf == 1.0 { ai.signum() } else { ai.signum() * ai.abs().powf(pf - 1.0) };
            if g != 0.0 {
                for k in 0..m {
                    h[k] += g * c[k];
                }
            }
        }
        let next = norming(&h, Some(w), r);
        let next_value = evaluate(p, cols, w, &next);
        if next_value <= value * (1.0 + 1e-15) {
            if next_value > value {
                lambda = next;
                value = next_value;
            }
            break;
        }
        lambda = next;
        value = next_value;
    }
    (value, lambda)
}

/// Outcome of [`holder_interpolation_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub lhs: f64,
    pub lhs_upper: f64,
    pub alpha_norm: f64,
    pub rhs_mu: f64,
    pub rhs_mu_upper: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Checks `mu_{p,n}(M_alpha x) <= ||alpha||_{pu} mu_{pv,n}(x)` for conjugate
/// `u, v`.
pub fn holder_interpolation_check(
    p: Exponent,
    u: Exponent,
    v: Exponent,
    alpha: &[f64],
    x: &MultiVector,
    r: Exponent,
    cfg: &SolverConfig,
) -> Result<HolderReport> {
    if (u.recip() + v.recip() - 1.0).abs() > 1e-12 {
        return Err(precondition(format!("{u} and {v} are not conjugate")));
    }
    if p.is_infinite() {
        return Err(precondition("p must be finite"));
    }
    let pu = Exponent::new(p.as_f64() * u.as_f64())?;
    let pv = Exponent::new(p.as_f64() * v.as_f64())?;
    let lhs = mu_with(p, &x.scaled(alpha)?, r, cfg);
    let rhs = mu_with(pv, x, r, cfg);
    let alpha_norm = lp_norm(alpha, None, pu);
    let bound = alpha_norm * rhs.upper_bound;
    let holds = lhs.value <= bound * (1.0 + 1e-12) + 1e-12;
    Ok(HolderReport {
        lhs: lhs.value,
        lhs_upper: lhs.upper_bound,
        alpha_norm,
        rhs_mu: rhs.value,
        rhs_mu_upper: rhs.upper_bound,
        bound,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::DiscreteSpace;
    use std::sync::Arc;

    fn tuple(weights: Vec<f64>, cols: Vec<Vec<f64>>) -> MultiVector {
        MultiVector::new(Arc::new(DiscreteSpace::weighted(weights).unwrap()), cols).unwrap()
    }

    fn e(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn single_vector_is_its_norm() {
        let x = tuple(vec![1.0, 2.0, 0.5], vec![vec![1.0, -1.0, 3.0]]);
        for r in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            for p in [1.0, 2.0, 3.0] {
                let res = mu(e(p), &x, e(r));
                assert!((res.value - x.column_norms(e(r))[0]).abs() < 1e-9, "p={p} r={r}");
            }
        }
    }

    #[test]
    fn unit_vectors_in_l1() {
        // mu_1 of the unit vector basis of l^1_3 is the l^1 norm of (1,1,1).
        let x = tuple(vec![1.0; 3], vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        assert_eq!(mu(Exponent::ONE, &x, Exponent::ONE).value, 3.0);
        assert!((mu(Exponent::TWO, &x, Exponent::ONE).value - 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(mu(Exponent::ONE, &x, Exponent::INFINITY).value, 1.0);
        assert_eq!(mu(Exponent::TWO, &x, Exponent::TWO).value, 1.0);
    }

    #[test]
    fn witness_is_feasible() {
        let x = tuple(vec![1.0, 0.3, 2.0], vec![vec![0.2, -1.0, 0.7], vec![1.1, 0.4, -0.3]]);
        for (p, r) in [(1.5, 3.0), (2.0, 1.5), (3.0, 2.0), (1.0, 2.0)] {
            let res = mu(e(p), &x, e(r));
            let dual = lp_norm(&res.witness, Some(x.weights()), e(r).conjugate());
            assert!(dual <= 1.0 + 1e-12);
            assert!(res.value <= res.upper_bound);
            assert!((evaluate(e(p), x.columns(), x.weights(), &res.witness) - res.value).abs() < 1e-15);
        }
    }

    #[test]
    fn optimizer_matches_exact_routes() {
        let x = tuple(vec![1.0, 0.5, 2.0, 1.5], vec![vec![0.2, -1.0, 0.7, 0.1], vec![1.1, 0.4, -0.3, 0.0], vec![0.0, 0.3, 0.3, -2.0]]);
        let cfg = SolverConfig::default();
        for (p, r) in [(2.0, 2.0), (1.0, 3.0), (1.5, 1.0), (2.5, f64::INFINITY)] {
            let exact = mu(e(p), &x, e(r));
            let opt = mu_optimizer(e(p), &x, e(r), &cfg);
            assert!((exact.value - opt.value).abs() < 1e-8 * exact.value, "p={p} r={r}");
        }
    }

    #[test]
    fn pointwise_sup_is_mu_one_on_linf() {
        let x = tuple(vec![1.0, 3.0], vec![vec![0.5, -1.0], vec![0.25, 0.5]]);
        assert_eq!(mu_pointwise_sup(&x), 1.5);
        assert_eq!(mu(Exponent::ONE, &x, Exponent::INFINITY).value, 1.5);
    }

    #[test]
    fn holder_rejects_non_conjugates() {
        let x = tuple(vec![1.0], vec![vec![1.0]]);
        let cfg = SolverConfig::default();
        assert!(holder_interpolation_check(e(1.0), e(2.0), e(3.0), &[1.0], &x, e(2.0), &cfg).is_err());
        let ok = holder_interpolation_check(e(1.0), e(2.0), e(2.0), &[0.5], &x, e(2.0), &cfg).unwrap();
        assert!(ok.holds);
    }
}
