//! Lower estimates of the `(p,q)` extension norm
//! `sup { ||(T x_1, ..., T x_n)||^{std} : T: F -> L^p contraction }`
//! and its comparison with the weak `(p,q)` norm.

use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::partition::PartitionMode;
use super::standard::standard_pq;
use super::weak::weak_pq;
use crate::config::SolverConfig;
use crate::error::{precondition, Error, Result};
use crate::operators::{op_norm, LinOp};
use crate::result::{intervals_agree, Method, NormResult, Witness};
use crate::spaces::{DiscreteSpace, Exponent, MultiVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionResult {
    pub norm: NormResult,
    pub weak: NormResult,
    pub agrees: bool,
}

fn image(t: &[Vec<f64>], x: &MultiVector, target: &Arc<DiscreteSpace>) -> Result<MultiVector> {
    let cols = x.columns().iter().map(|c| t.iter().map(|row| row.iter().zip(c).map(|(a, b)| a * b).sum()).collect()).collect();
    MultiVector::new(target.clone(), cols)
}

/// Estimates the extension norm of `x` in `L^r(w)^n` through contractions
/// into `L^p(target)`.
///
/// The main candidate sends `x` to `sum_i <x, lambda_i> chi_{X_i} / m(X_i)^{1/p}`
/// with `lambda` a weak-norm witness and `X` a partition of the target into
/// `n` blocks; its norm is `mu_{p,n}(lambda) <= 1`. Random contractions and
/// the identity (when the spaces agree) are also tried.
pub fn extension_norm(
    x: &MultiVector,
    r: Exponent,
    target: &Arc<DiscreteSpace>,
    p: Exponent,
    q: Exponent,
    samples: usize,
    cfg: &SolverConfig,
) -> Result<ExtensionResult> {
    if target.len() < x.n() {
        return Err(precondition(format!("target needs at least {} points, has {}", x.n(), target.len())));
    }
    let weak = weak_pq(x, r, p, q, cfg)?;
    let Witness::DualTuple(lambda) = &weak.certificate else {
        return Err(Error::Solver("weak norm returned no dual tuple".into()));
    };
    let n = x.n();
    let mt = target.len();
    let w = x.weights();
    let block_mass: Vec<f64> = (0..n).map(|i| (i..mt).step_by(n).map(|j| target.weights()[j]).sum()).collect();
    let structured: Vec<Vec<f64>> = (0..mt)
        .map(|j| {
            let i = j % n;
            let scale = block_mass[i].powf(-p.recip());
            (0..x.m()).map(|k| scale * w[k] * lambda[i][k]).collect()
        })
        .collect();

    let mut best: Option<NormResult> = None;
    let mut consider = |res: NormResult| {
        if best.as_ref().is_none_or(|b| res.lower_bound > b.lower_bound) {
            best = Some(res);
        }
    };
    consider(standard_pq(&image(&structured, x, target)?, p, q, PartitionMode::Auto, cfg)?);
    if **target == **x.space() && r == p {
        consider(standard_pq(x, p, q, PartitionMode::Auto, cfg)?);
    }
    for s in 0..samples {
        let mut rng = cfg.rng(4_000 + s as u64);
        let t: Vec<Vec<f64>> = (0..mt).map(|_| (0..x.m()).map(|_| StandardNormal.sample(&mut rng)).collect()).collect();
        let op = LinOp::new(t.clone(), x.space().clone(), r, target.clone(), p)?;
        let bound = op_norm(&op, cfg).upper_bound;
        if bound == 0.0 {
            continue;
        }
        let scaled: Vec<Vec<f64>> = t.iter().map(|row| row.iter().map(|v| v / bound).collect()).collect();
        consider(standard_pq(&image(&scaled, x, target)?, p, q, PartitionMode::Auto, cfg)?);
    }
    let found = best.expect("at least one candidate");
    let norm = NormResult::from_below(found.lower_bound, weak.upper_bound, Method::Extension, found.certificate);
    let agrees = intervals_agree(&norm, &weak, 1e-9);
    Ok(ExtensionResult { norm, weak, agrees })
}
