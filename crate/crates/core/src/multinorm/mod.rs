//! Multi-norm engines on tuples of vectors.

mod checks;
mod concave;
mod dual;
mod extension;
mod partition;
mod standard;
mod weak;

pub use checks::{axioms_check, chain_check, ordering_check, AxiomReport, AxiomSummary, OrderingReport, OrderingRow};
pub use dual::{decomposition_sum, dual_multinorm_upper, dual_value, duality_check, DualityReport, DualityRow};
pub use extension::{extension_norm, ExtensionResult};
pub use partition::PartitionMode;
pub use standard::{max_multinorm, partition_sup_q, standard_pq};
pub use weak::weak_pq;

use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::Result;
use crate::result::NormResult;
use crate::spaces::{Exponent, MultiVector};

/// Whether an engine satisfies the multi-norm axiom A4 or the dual axiom B4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    MultiNorm,
    DualMultiNorm,
}

/// A sequence of norms on `E^n`, `n >= 1`.
pub trait MultiNormEngine: Send + Sync {
    fn name(&self) -> String;
    fn kind(&self) -> EngineKind;
    fn evaluate(&self, x: &MultiVector) -> Result<NormResult>;
    /// The ambient exponent `r` of `E = L^r(w)`.
    fn ambient(&self) -> Exponent;
    /// `(p,q)` for weak engines.
    fn weak_parameters(&self) -> Option<(Exponent, Exponent)> {
        None
    }
}

#[derive(Clone, Debug)]
pub struct WeakEngine {
    pub ambient: Exponent,
    pub p: Exponent,
    pub q: Exponent,
    pub config: SolverConfig,
}

impl MultiNormEngine for WeakEngine {
    fn name(&self) -> String {
        format!("weak({},{}) on L^{}", self.p, self.q, self.ambient)
    }
    fn kind(&self) -> EngineKind {
        EngineKind::MultiNorm
    }
    fn evaluate(&self, x: &MultiVector) -> Result<NormResult> {
        weak_pq(x, self.ambient, self.p, self.q, &self.config)
    }
    fn ambient(&self) -> Exponent {
        self.ambient
    }
    fn weak_parameters(&self) -> Option<(Exponent, Exponent)> {
        Some((self.p, self.q))
    }
}

#[derive(Clone, Debug)]
pub struct StandardEngine {
    pub p: Exponent,
    pub q: Exponent,
    pub mode: PartitionMode,
    pub config: SolverConfig,
}

impl MultiNormEngine for StandardEngine {
    fn name(&self) -> String {
        format!("standard({},{}) on L^{}", self.p, self.q, self.p)
    }
    fn kind(&self) -> EngineKind {
        EngineKind::MultiNorm
    }
    fn evaluate(&self, x: &MultiVector) -> Result<NormResult> {
        standard_pq(x, self.p, self.q, self.mode, &self.config)
    }
    fn ambient(&self) -> Exponent {
        self.p
    }
}

/// The maximum multi-norm on `l^1(w)`.
#[derive(Clone, Debug, Default)]
pub struct MaxEngine;

impl MultiNormEngine for MaxEngine {
    fn name(&self) -> String {
        "max on L^1".into()
    }
    fn kind(&self) -> EngineKind {
        EngineKind::MultiNorm
    }
    fn evaluate(&self, x: &MultiVector) -> Result<NormResult> {
        Ok(max_multinorm(x))
    }
    fn ambient(&self) -> Exponent {
        Exponent::ONE
    }
}

#[derive(Clone, Debug)]
pub struct DualEngine {
    pub ambient: Exponent,
    pub r: Exponent,
    pub s: Exponent,
    pub config: SolverConfig,
}

impl MultiNormEngine for DualEngine {
    fn name(&self) -> String {
        format!("dual({},{}) on L^{}", self.r, self.s, self.ambient)
    }
    fn kind(&self) -> EngineKind {
        EngineKind::DualMultiNorm
    }
    fn evaluate(&self, x: &MultiVector) -> Result<NormResult> {
        dual_multinorm_upper(x, self.ambient, self.r, self.s, &self.config)
    }
    fn ambient(&self) -> Exponent {
        self.ambient
    }
}
