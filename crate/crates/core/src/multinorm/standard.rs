//! The standard `(p,q)` multi-norm on `L^p(w)`,
//! `sup_X (sum_i ||chi_{X_i} f_i||_p^q)^{1/q}` over partitions `X` of the
//! points, and the maximum multi-norm on `l^1(w)`.

use super::partition::{self, PartitionMode, PartitionProblem};
use crate::config::SolverConfig;
use crate::error::{precondition, Result};
use crate::result::{Method, NormResult, Witness};
use crate::spaces::{Exponent, MultiVector};

/// Standard `(p,q)` multi-norm of `f` in `L^p(w)^n`, `1 <= p <= q < inf`.
pub fn standard_pq(f: &MultiVector, p: Exponent, q: Exponent, mode: PartitionMode, cfg: &SolverConfig) -> Result<NormResult> {
    if p > q {
        return Err(precondition(format!("standard (p,q) norm needs p <= q, got p = {p}, q = {q}")));
    }
    if q.is_infinite() {
        return Err(precondition("standard (p,q) norm needs a finite q"));
    }
    let (pf, qf) = (p.as_f64(), q.as_f64());
    let w = f.weights();
    let a = f.columns().iter().map(|c| c.iter().zip(w).map(|(v, w)| w * v.abs().powf(pf)).collect()).collect();
    let problem = PartitionProblem::new(a, qf / pf, qf);
    let out = partition::solve(&problem, mode, cfg)?;
    let witness = Witness::Partition(out.assignment);
    Ok(if out.method.is_exact() {
        NormResult::exact(out.value, out.method, witness)
    } else {
        NormResult::from_below(out.value, out.upper, out.method, witness)
    })
}

/// `sum_k w_k max_i |mu_i(k)|` on `l^1(w)`, with a maximizing partition.
pub fn max_multinorm(mu: &MultiVector) -> NormResult {
    let w = mu.weights();
    let mut assignment = Vec::with_capacity(mu.m());
    let mut total = 0.0;
    for k in 0..mu.m() {
        let mut best = 0;
        for i in 1..mu.n() {
            if mu.column(i)[k].abs() > mu.column(best)[k].abs() {
                best = i;
            }
        }
        assignment.push(best);
        total += w[k] * mu.column(best)[k].abs();
    }
    NormResult::exact(total, Method::ClosedForm, Witness::Partition(assignment))
}

/// `sup_X (sum_i |mu_i|(X_i)^q)^{1/q}` on `l^1(w)`.
pub fn partition_sup_q(mu: &MultiVector, q: Exponent, mode: PartitionMode, cfg: &SolverConfig) -> Result<NormResult> {
    standard_pq(mu, Exponent::ONE, q, mode, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::DiscreteSpace;
    use std::sync::Arc;

    fn tuple(weights: Vec<f64>, cols: Vec<Vec<f64>>) -> MultiVector {
        MultiVector::new(Arc::new(DiscreteSpace::weighted(weights).unwrap()), cols).unwrap()
    }

    #[test]
    fn q_equal_p_is_greedy_and_exact() {
        let f = tuple(vec![1.0, 2.0], vec![vec![1.0, 0.0], vec![0.5, 1.0]]);
        let p = Exponent::new(2.0).unwrap();
        let res = standard_pq(&f, p, p, PartitionMode::Exact, &SolverConfig::default()).unwrap();
        assert!(res.is_exact());
        assert!((res.value - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(res.certificate, Witness::Partition(vec![0, 1]));
    }

    #[test]
    fn max_multinorm_matches_partition_sup_one() {
        let mu = tuple(vec![0.5, 1.0, 3.0], vec![vec![1.0, -2.0, 0.1], vec![-1.5, 0.5, 0.2]]);
        let a = max_multinorm(&mu);
        let b = partition_sup_q(&mu, Exponent::ONE, PartitionMode::Exact, &SolverConfig::default()).unwrap();
        assert!((a.value - (0.75 + 2.0 + 0.6)).abs() < 1e-15);
        assert!((a.value - b.value).abs() < 1e-15);
    }

    #[test]
    fn exact_mode_reports_guard_errors() {
        let m = 30;
        let f = tuple(vec![1.0; m], vec![vec![1.0; m], vec![1.0; m]]);
        let two = Exponent::new(2.0).unwrap();
        let err = standard_pq(&f, Exponent::ONE, two, PartitionMode::Exact, &SolverConfig::default());
        assert!(matches!(err, Err(crate::error::Error::GuardExceeded { .. })));
    }
}
