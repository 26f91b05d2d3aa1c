//! Finite weighted measure spaces, the exponents acting on them, and tuples
//! of vectors in `L^r(w)`.
//!
//! A [`DiscreteSpace`] is a finite set of opaque point labels with strictly
//! positive weights. For `1 <= r <= inf` the space `L^r(w)` carries
//! `||f||_r = (sum_k w_k |f(k)|^r)^{1/r}` (the maximum of `|f(k)|` when
//! `r = inf`), and duality is the weighted pairing
//! `<f, g> = sum_k w_k f(k) g(k)`, which identifies the dual of `L^r(w)` with
//! `L^{r'}(w)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dims, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Ext {
    Finite(f64),
    Infinite,
}

/// An exponent in `[1, inf]`.
///
/// The conjugate is stored alongside the value, so `conjugate` is an exact
/// involution and `inf` is a tag rather than a large float.
#[derive(Clone, Copy, Debug)]
pub struct Exponent {
    value: Ext,
    dual: Ext,
}

impl Exponent {
    pub const ONE: Exponent = Exponent { value: Ext::Finite(1.0), dual: Ext::Infinite };
    pub const TWO: Exponent = Exponent { value: Ext::Finite(2.0), dual: Ext::Finite(2.0) };
    pub const INFINITY: Exponent = Exponent { value: Ext::Infinite, dual: Ext::Finite(1.0) };

    /// Builds a finite exponent; `f64::INFINITY` maps to the `inf` tag.
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            return Ok(Self::INFINITY);
        }
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidExponent(format!("{p}")));
        }
        if p == 1.0 {
            return Ok(Self::ONE);
        }
        Ok(Exponent { value: Ext::Finite(p), dual: Ext::Finite(p / (p - 1.0)) })
    }

    pub fn conjugate(self) -> Self {
        Exponent { value: self.dual, dual: self.value }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self.value, Ext::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self.value {
            Ext::Finite(p) => Some(p),
            Ext::Infinite => None,
        }
    }

    /// The value as a float, with `inf` mapped to `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    /// `1/p`, exactly zero for `inf`.
    pub fn recip(self) -> f64 {
        match self.value {
            Ext::Finite(p) => 1.0 / p,
            Ext::Infinite => 0.0,
        }
    }

    pub fn is_one(self) -> bool {
        self.value == Ext::Finite(1.0)
    }

    pub fn is(self, p: f64) -> bool {
        self.value == Ext::Finite(p)
    }
}

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.as_f64().partial_cmp(&other.as_f64())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Ext::Finite(p) => write!(f, "{p}"),
            Ext::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if matches!(t.as_str(), "inf" | "infinity" | "∞") {
            return Ok(Self::INFINITY);
        }
        let p: f64 = t.parse().map_err(|_| Error::InvalidExponent(s.to_string()))?;
        Exponent::new(p)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.value {
            Ext::Finite(p) => serializer.serialize_f64(p),
            Ext::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(deserializer)? {
            Raw::Num(p) => Exponent::new(p),
            Raw::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Weighted `l^p` norm of `values`; `weights = None` means counting measure.
pub fn lp_norm(values: &[f64], weights: Option<&[f64]>, p: Exponent) -> f64 {
    match p.finite() {
        None => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        Some(1.0) => match weights {
            Some(w) => values.iter().zip(w).map(|(v, w)| w * v.abs()).sum(),
            None => values.iter().map(|v| v.abs()).sum(),
        },
        Some(2.0) => {
            let s: f64 = match weights {
                Some(w) => values.iter().zip(w).map(|(v, w)| w * v * v).sum(),
                None => values.iter().map(|v| v * v).sum(),
            };
            s.sqrt()
        }
        Some(p) => {
            // Rescale by the largest entry to avoid overflow for large p.
            let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if scale == 0.0 {
                return 0.0;
            }
            let s: f64 = match weights {
                Some(w) => values.iter().zip(w).map(|(v, w)| w * (v.abs() / scale).powf(p)).sum(),
                None => values.iter().map(|v| (v.abs() / scale).powf(p)).sum(),
            };
            scale * s.powf(1.0 / p)
        }
    }
}

/// Weighted pairing `sum_k w_k a(k) b(k)`.
pub fn pairing(a: &[f64], b: &[f64], weights: Option<&[f64]>) -> f64 {
    match weights {
        Some(w) => a.iter().zip(b).zip(w).map(|((x, y), w)| w * x * y).sum(),
        None => a.iter().zip(b).map(|(x, y)| x * y).sum(),
    }
}

/// A norming functional: for `h` in `l^p(w)` returns `g` in the unit sphere of
/// `l^{p'}(w)` with `<h, g> = ||h||_p`. Returns zero for `h = 0`.
pub fn norming(h: &[f64], weights: Option<&[f64]>, p: Exponent) -> Vec<f64> {
    let norm = lp_norm(h, weights, p);
    if norm == 0.0 {
        return vec![0.0; h.len()];
    }
    match p.finite() {
        None => {
            let mut best = 0;
            for (k, v) in h.iter().enumerate() {
                if v.abs() > h[best].abs() {
                    best = k;
                }
            }
            let w = weights.map_or(1.0, |w| w[best]);
            let mut g = vec![0.0; h.len()];
            g[best] = h[best].signum() / w;
            g
        }
        Some(1.0) => h.iter().map(|v| if *v == 0.0 { 0.0 } else { v.signum() }).collect(),
        Some(p) => h
            .iter()
            .map(|v| v.signum() * (v.abs() / norm).powf(p - 1.0))
            .map(|v| if v.is_nan() { 0.0 } else { v })
            .collect(),
    }
}

/// A finite set of labelled points with strictly positive weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSpace {
    points: Vec<String>,
    weights: Vec<f64>,
}

impl DiscreteSpace {
    pub fn new(points: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        check_dims(points.len(), weights.len())?;
        if points.is_empty() {
            return Err(Error::InvalidSpace("a space needs at least one point".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidSpace(format!("weights must be positive and finite, got {w}")));
        }
        let mut sorted: Vec<&String> = points.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::InvalidSpace("duplicate point labels".into()));
        }
        Ok(DiscreteSpace { points, weights })
    }

    /// Counting measure on points labelled `0..m`.
    pub fn uniform(m: usize) -> Result<Self> {
        Self::new((0..m).map(|k| k.to_string()).collect(), vec![1.0; m])
    }

    pub fn weighted(weights: Vec<f64>) -> Result<Self> {
        Self::new((0..weights.len()).map(|k| k.to_string()).collect(), weights)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn norm(&self, f: &[f64], p: Exponent) -> f64 {
        lp_norm(f, Some(&self.weights), p)
    }

    pub fn pair(&self, f: &[f64], g: &[f64]) -> f64 {
        pairing(f, g, Some(&self.weights))
    }

    pub fn norming(&self, h: &[f64], p: Exponent) -> Vec<f64> {
        norming(h, Some(&self.weights), p)
    }
}

/// A single element of `L^r(w)` over a shared space.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    space: Arc<DiscreteSpace>,
    values: Vec<f64>,
}

impl Vector {
    pub fn new(space: Arc<DiscreteSpace>, values: Vec<f64>) -> Result<Self> {
        check_dims(space.len(), values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("vector entries must be finite".into()));
        }
        Ok(Vector { space, values })
    }

    pub fn space(&self) -> &Arc<DiscreteSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm(&self, p: Exponent) -> f64 {
        self.space.norm(&self.values, p)
    }
}

/// An `n`-tuple `(x_1, ..., x_n)` of vectors over one space.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiVector {
    space: Arc<DiscreteSpace>,
    columns: Vec<Vec<f64>>,
}

impl MultiVector {
    pub fn new(space: Arc<DiscreteSpace>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(precondition_empty());
        }
        for c in &columns {
            check_dims(space.len(), c.len())?;
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::Parse("vector entries must be finite".into()));
            }
        }
        Ok(MultiVector { space, columns })
    }

    pub fn from_vectors(vectors: &[Vector]) -> Result<Self> {
        let first = vectors.first().ok_or_else(precondition_empty)?;
        if vectors.iter().any(|v| v.space != first.space) {
            return Err(Error::InvalidSpace("vectors live on different spaces".into()));
        }
        Self::new(first.space.clone(), vectors.iter().map(|v| v.values.clone()).collect())
    }

    pub fn zeros(space: Arc<DiscreteSpace>, n: usize) -> Result<Self> {
        let m = space.len();
        Self::new(space, vec![vec![0.0; m]; n])
    }

    pub fn space(&self) -> &Arc<DiscreteSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        self.space.weights()
    }

    /// Number of vectors in the tuple.
    pub fn n(&self) -> usize {
        self.columns.len()
    }

    /// Number of points of the underlying space.
    pub fn m(&self) -> usize {
        self.space.len()
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.iter().all(|v| *v == 0.0))
    }

    /// Norms `||x_i||_r` of the individual vectors.
    pub fn column_norms(&self, r: Exponent) -> Vec<f64> {
        self.columns.iter().map(|c| self.space.norm(c, r)).collect()
    }

    /// `M_alpha x = (alpha_1 x_1, ..., alpha_n x_n)`.
    pub fn scaled(&self, alpha: &[f64]) -> Result<Self> {
        check_dims(self.n(), alpha.len())?;
        let columns = self.columns.iter().zip(alpha).map(|(c, a)| c.iter().map(|v| a * v).collect()).collect();
        Ok(MultiVector { space: self.space.clone(), columns })
    }

    /// `(x_{sigma(1)}, ..., x_{sigma(n)})`.
    pub fn permuted(&self, sigma: &[usize]) -> Result<Self> {
        check_dims(self.n(), sigma.len())?;
        let mut seen = vec![false; self.n()];
        for &s in sigma {
            if s >= self.n() || std::mem::replace(&mut seen[s], true) {
                return Err(Error::Precondition("not a permutation".into()));
            }
        }
        let columns = sigma.iter().map(|&s| self.columns[s].clone()).collect();
        Ok(MultiVector { space: self.space.clone(), columns })
    }

    pub fn with_column(&self, c: Vec<f64>) -> Result<Self> {
        let mut columns = self.columns.clone();
        columns.push(c);
        Self::new(self.space.clone(), columns)
    }

    pub fn with_zero(&self) -> Self {
        let mut columns = self.columns.clone();
        columns.push(vec![0.0; self.m()]);
        MultiVector { space: self.space.clone(), columns }
    }

    /// `(x_1, ..., x_n, x_n)`.
    pub fn with_last_repeated(&self) -> Self {
        let mut columns = self.columns.clone();
        columns.push(columns[columns.len() - 1].clone());
        MultiVector { space: self.space.clone(), columns }
    }

    /// Drops the last vector; `None` for a 1-tuple.
    pub fn truncated(&self) -> Option<Self> {
        (self.n() > 1).then(|| MultiVector { space: self.space.clone(), columns: self.columns[..self.n() - 1].to_vec() })
    }
}

fn precondition_empty() -> Error {
    Error::Precondition("a tuple needs at least one vector".into())
}

/// JSON input document: `{"points": [...], "weights": [...], "vectors": [[...], ...]}`.
///
/// `points` defaults to `0..m` and `weights` to counting measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub vectors: Vec<Vec<f64>>,
}

impl SpaceDocument {
    pub fn from_multivector(x: &MultiVector) -> Self {
        SpaceDocument {
            points: Some(x.space().points().to_vec()),
            weights: Some(x.weights().to_vec()),
            vectors: x.columns().to_vec(),
        }
    }

    pub fn into_multivector(self) -> Result<MultiVector> {
        let m = match (&self.points, &self.weights, self.vectors.first()) {
            (Some(p), _, _) => p.len(),
            (None, Some(w), _) => w.len(),
            (None, None, Some(v)) => v.len(),
            (None, None, None) => return Err(precondition_empty()),
        };
        let points = self.points.unwrap_or_else(|| (0..m).map(|k| k.to_string()).collect());
        let weights = self.weights.unwrap_or_else(|| vec![1.0; m]);
        let space = Arc::new(DiscreteSpace::new(points, weights)?);
        MultiVector::new(space, self.vectors)
    }

    pub fn parse(text: &str) -> Result<MultiVector> {
        let doc: SpaceDocument = serde_json::from_str(text)?;
        doc.into_multivector()
    }
}
