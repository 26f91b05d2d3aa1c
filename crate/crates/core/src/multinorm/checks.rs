//! Randomized checks of the multi-norm axioms and of the ordering between
//! weak `(p,q)` norms. Comparisons are gap-aware: two bracketed values are
//! "equal" when their brackets overlap.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::weak::weak_pq;
use super::{EngineKind, MultiNormEngine};
use crate::config::{rng, SolverConfig};
use crate::error::{precondition, Error, Result};
use crate::result::{interval_le, intervals_agree, NormResult};
use crate::spaces::{DiscreteSpace, Exponent, MultiVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomSummary {
    pub axiom: String,
    pub checked: usize,
    pub passed: usize,
    /// Largest amount by which a comparison missed, relative to its scale.
    pub max_violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub engine: String,
    pub kind: EngineKind,
    pub trials: usize,
    pub axioms: Vec<AxiomSummary>,
    pub pass: bool,
}

struct Tally {
    axioms: Vec<AxiomSummary>,
}

impl Tally {
    fn record(&mut self, axiom: &str, ok: bool, violation: f64) {
        let entry = match self.axioms.iter_mut().position(|a| a.axiom == axiom) {
            Some(i) => &mut self.axioms[i],
            None => {
                self.axioms.push(AxiomSummary { axiom: axiom.into(), checked: 0, passed: 0, max_violation: 0.0 });
                self.axioms.last_mut().expect("just pushed")
            }
        };
        entry.checked += 1;
        if ok {
            entry.passed += 1;
        }
        entry.max_violation = entry.max_violation.max(violation);
    }

    fn equal(&mut self, axiom: &str, a: &NormResult, b: &NormResult, tol: f64) {
        let scale = a.upper_bound.abs().max(b.upper_bound.abs()).max(1.0);
        let miss = (a.lower_bound - b.upper_bound).max(b.lower_bound - a.upper_bound).max(0.0) / scale;
        self.record(axiom, intervals_agree(a, b, tol), miss);
    }

    /// `a <= c * b`.
    fn below(&mut self, axiom: &str, a: &NormResult, b: &NormResult, c: f64, tol: f64) {
        let scaled = b.clone().scale(c);
        let scale = a.lower_bound.abs().max(scaled.upper_bound.abs()).max(1.0);
        let miss = (a.lower_bound - scaled.upper_bound).max(0.0) / scale;
        self.record(axiom, interval_le(a, &scaled, tol), miss);
    }
}

pub(crate) fn random_tuple(space: &Arc<DiscreteSpace>, n: usize, rng: &mut impl Rng) -> MultiVector {
    let cols = (0..n)
        .map(|_| (0..space.len()).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(-1.0..1.0) }).collect())
        .collect();
    MultiVector::new(space.clone(), cols).expect("shape matches the space")
}

/// Samples random tuples with `2 <= n <= n_max` and checks A1-A3, A4 (or B4
/// for dual engines) and the duplication sandwich
/// `||x|| <= ||(x, x_n)|| <= ||(x_1, ..., 2 x_n)||`.
pub fn axioms_check(
    engine: &dyn MultiNormEngine,
    space: &Arc<DiscreteSpace>,
    n_max: usize,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    if n_max < 2 {
        return Err(precondition("axiom checks need n_max >= 2"));
    }
    let tol = 1e-9;
    let mut tally = Tally { axioms: Vec::new() };
    for trial in 0..trials {
        let mut rng = rng(seed, trial as u64);
        let n = rng.random_range(2..=n_max);
        let x = random_tuple(space, n, &mut rng);
        let base = engine.evaluate(&x)?;

        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.shuffle(&mut rng);
        tally.equal("A1", &engine.evaluate(&x.permuted(&sigma)?)?, &base, tol);

        let alpha: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let amax = alpha.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        tally.below("A2", &engine.evaluate(&x.scaled(&alpha)?)?, &base, amax, tol);

        tally.equal("A3", &engine.evaluate(&x.with_zero())?, &base, tol);

        let dup = engine.evaluate(&x.with_last_repeated())?;
        let mut doubling = vec![1.0; n];
        doubling[n - 1] = 2.0;
        let doubled = engine.evaluate(&x.scaled(&doubling)?)?;
        match engine.kind() {
            EngineKind::MultiNorm => tally.equal("A4", &dup, &base, tol),
            EngineKind::DualMultiNorm => tally.equal("B4", &dup, &doubled, tol),
        }
        tally.below("sandwich_lower", &base, &dup, 1.0, tol);
        tally.below("sandwich_upper", &dup, &doubled, 1.0, tol);
    }
    let pass = tally.axioms.iter().all(|a| a.passed == a.checked);
    Ok(AxiomReport { engine: engine.name(), kind: engine.kind(), trials, axioms: tally.axioms, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderingRow {
    pub sample: usize,
    pub smaller_lower: f64,
    pub smaller_upper: f64,
    pub larger_lower: f64,
    pub larger_upper: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    /// `(p, q)` of the norm expected to be smaller.
    pub smaller: (Exponent, Exponent),
    pub larger: (Exponent, Exponent),
    pub rows: Vec<OrderingRow>,
    pub pass: bool,
}

/// Checks `||x||^{(p1,q1)} <= ||x||^{(p2,q2)}` on every sample, which holds
/// when `q2 <= q1` and `1/p2 - 1/q2 <= 1/p1 - 1/q1`.
pub fn ordering_check(
    samples: &[MultiVector],
    ambient: Exponent,
    first: (Exponent, Exponent),
    second: (Exponent, Exponent),
    cfg: &SolverConfig,
) -> Result<OrderingReport> {
    let ((p1, q1), (p2, q2)) = (first, second);
    let applicable = q2 <= q1 && p2.recip() - q2.recip() <= p1.recip() - q1.recip() + 1e-15;
    if !applicable {
        return Err(Error::NotApplicable(format!(
            "({p1},{q1}) <= ({p2},{q2}) needs q2 <= q1 and 1/p2 - 1/q2 <= 1/p1 - 1/q1"
        )));
    }
    let mut rows = Vec::new();
    for (sample, x) in samples.iter().enumerate() {
        let a = weak_pq(x, ambient, p1, q1, cfg)?;
        let b = weak_pq(x, ambient, p2, q2, cfg)?;
        rows.push(OrderingRow {
            sample,
            smaller_lower: a.lower_bound,
            smaller_upper: a.upper_bound,
            larger_lower: b.lower_bound,
            larger_upper: b.upper_bound,
            holds: interval_le(&a, &b, 1e-9),
        });
    }
    let pass = rows.iter().all(|r| r.holds);
    Ok(OrderingReport { smaller: first, larger: second, rows, pass })
}

/// The chain `(1,q) <= (p,q) <= (q,q) <= (p,p) <= (1,1)` for `1 <= p <= q`.
pub fn chain_check(samples: &[MultiVector], ambient: Exponent, p: Exponent, q: Exponent, cfg: &SolverConfig) -> Result<Vec<OrderingReport>> {
    let one = Exponent::ONE;
    let links = [((one, q), (p, q)), ((p, q), (q, q)), ((q, q), (p, p)), ((p, p), (one, one))];
    links.iter().map(|(a, b)| ordering_check(samples, ambient, *a, *b, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multinorm::{MaxEngine, WeakEngine};

    #[test]
    fn max_engine_satisfies_the_axioms() {
        let space = Arc::new(DiscreteSpace::weighted(vec![1.0, 0.5, 2.0]).unwrap());
        let report = axioms_check(&MaxEngine, &space, 4, 30, 7).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.axioms.len(), 6);
    }

    #[test]
    fn inapplicable_orderings_are_rejected() {
        let e = |p| Exponent::new(p).unwrap();
        let res = ordering_check(&[], Exponent::ONE, (e(2.0), e(2.0)), (e(1.0), e(3.0)), &SolverConfig::default());
        assert!(matches!(res, Err(Error::NotApplicable(_))));
    }

    #[test]
    fn weak_two_two_on_l2_axioms() {
        let space = Arc::new(DiscreteSpace::uniform(3).unwrap());
        let engine = WeakEngine { ambient: Exponent::TWO, p: Exponent::TWO, q: Exponent::TWO, config: SolverConfig::default() };
        let report = axioms_check(&engine, &space, 3, 10, 1).unwrap();
        assert!(report.pass, "{report:?}");
    }
}
