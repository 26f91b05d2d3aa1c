//! Certified results shared by the norm engines.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    BruteExtreme,
    Spectral,
    Exhaustive,
    Greedy,
    LocalSearch,
    ConcaveProgram,
    AlternatingAscent,
    Optimizer,
    ColumnGeneration,
    CuttingPlane,
    Enumeration,
    Extension,
}

impl Method {
    /// Methods whose value is exact up to rounding.
    pub fn is_exact(self) -> bool {
        matches!(
            self,
            Method::ClosedForm | Method::BruteExtreme | Method::Spectral | Method::Exhaustive | Method::Enumeration
        )
    }
}

/// One term `M_alpha y` of a decomposition, costing `||alpha||_s mu(y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTerm {
    pub alpha: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Witness {
    None,
    /// Dual tuple `lambda` with `mu(lambda) <= 1`.
    DualTuple(Vec<Vec<f64>>),
    /// Block index of every point (0-based).
    Partition(Vec<usize>),
    Decomposition(Vec<DecompositionTerm>),
    /// A unit vector attaining a lower bound for an operator norm.
    Point(Vec<f64>),
    /// A tuple attaining a lower bound for an amplified norm.
    Tuple(Vec<Vec<f64>>),
}

/// A value bracketed by certified bounds.
///
/// For supremum-type quantities `value` is attained by the certificate and
/// equals `lower_bound`. For the dual multi-norm, an infimum, `value` is the
/// cost of the decomposition in the certificate and equals `upper_bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub gap: f64,
    pub method: Method,
    pub certificate: Witness,
}

impl NormResult {
    pub fn exact(value: f64, method: Method, certificate: Witness) -> Self {
        NormResult { value, lower_bound: value, upper_bound: value, gap: 0.0, method, certificate }
    }

    /// A supremum attained at `value` with a certified `upper`.
    pub fn from_below(value: f64, upper: f64, method: Method, certificate: Witness) -> Self {
        let upper = upper.max(value);
        NormResult { value, lower_bound: value, upper_bound: upper, gap: upper - value, method, certificate }
    }

    /// An infimum attained at `value` with a certified `lower`.
    pub fn from_above(value: f64, lower: f64, method: Method, certificate: Witness) -> Self {
        let lower = lower.min(value);
        NormResult { value, lower_bound: lower, upper_bound: value, gap: value - lower, method, certificate }
    }

    /// Relative gap, zero for an exact zero value.
    pub fn relative_gap(&self) -> f64 {
        if self.upper_bound == 0.0 {
            0.0
        } else {
            self.gap / self.upper_bound
        }
    }

    pub fn is_exact(&self) -> bool {
        self.gap == 0.0
    }

    pub fn scale(mut self, c: f64) -> Self {
        let c = c.abs();
        self.value *= c;
        self.lower_bound *= c;
        self.upper_bound *= c;
        self.gap *= c;
        self
    }
}

/// Do two bracketed values agree, allowing for their gaps and `tol`?
pub fn intervals_agree(a: &NormResult, b: &NormResult, tol: f64) -> bool {
    let slack = tol * a.upper_bound.abs().max(b.upper_bound.abs()).max(1.0);
    a.lower_bound <= b.upper_bound + slack && b.lower_bound <= a.upper_bound + slack
}

/// Is `a <= b` consistent with the brackets?
pub fn interval_le(a: &NormResult, b: &NormResult, tol: f64) -> bool {
    let slack = tol * a.lower_bound.abs().max(b.upper_bound.abs()).max(1.0);
    a.lower_bound <= b.upper_bound + slack
}
