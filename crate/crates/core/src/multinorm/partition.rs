//! Partition suprema.
//!
//! Assigning point `k` to block `i` contributes mass `a[i][k]` to block `i`;
//! a partition is scored by `(sum_i s_i^e)^{1/q}` where `s_i` is the mass of
//! block `i`. With `a[i][k] = w_k |f_i(k)|^p` and `e = q/p` this is
//! `(sum_i ||chi_{X_i} f_i||_p^q)^{1/q}`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::result::Method;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMode {
    /// Greedy when it is exact, exhaustive within the guard, local search otherwise.
    #[default]
    Auto,
    Exact,
    Greedy,
    LocalSearch,
}

impl std::str::FromStr for PartitionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(PartitionMode::Auto),
            "exact" => Ok(PartitionMode::Exact),
            "greedy" => Ok(PartitionMode::Greedy),
            "local_search" | "local-search" => Ok(PartitionMode::LocalSearch),
            _ => Err(Error::Parse(format!("unknown partition mode {s}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct PartitionOutcome {
    pub assignment: Vec<usize>,
    pub value: f64,
    pub upper: f64,
    pub method: Method,
}

pub(crate) struct PartitionProblem {
    /// `a[i][k]`, nonnegative.
    a: Vec<Vec<f64>>,
    e: f64,
    q: f64,
    /// Blocks with positive mass at each point.
    candidates: Vec<Vec<usize>>,
}

impl PartitionProblem {
    pub fn new(a: Vec<Vec<f64>>, e: f64, q: f64) -> Self {
        let m = a.first().map_or(0, |c| c.len());
        let candidates = (0..m).map(|k| (0..a.len()).filter(|&i| a[i][k] > 0.0).collect()).collect();
        PartitionProblem { a, e, q, candidates }
    }

    fn n(&self) -> usize {
        self.a.len()
    }

    fn m(&self) -> usize {
        self.candidates.len()
    }

    fn masses(&self, assignment: &[usize]) -> Vec<f64> {
        let mut s = vec![0.0; self.n()];
        for (k, &i) in assignment.iter().enumerate() {
            s[i] += self.a[i][k];
        }
        s
    }

    fn objective(&self, s: &[f64]) -> f64 {
        if self.e == 1.0 {
            s.iter().sum()
        } else {
            // Incremental updates can leave masses at -1e-16.
            s.iter().map(|v| v.max(0.0).powf(self.e)).sum()
        }
    }

    pub fn value(&self, assignment: &[usize]) -> f64 {
        if self.e == 1.0 {
            // Point order, so the q = 1 value agrees bitwise with a pointwise sum.
            let total: f64 = assignment.iter().enumerate().map(|(k, &i)| self.a[i][k]).sum();
            return total.powf(1.0 / self.q);
        }
        self.objective(&self.masses(assignment)).powf(1.0 / self.q)
    }

    /// Every point goes to a block of largest mass, lowest index on ties.
    pub fn greedy(&self) -> Vec<usize> {
        (0..self.m())
            .map(|k| {
                let mut best = 0;
                for i in 1..self.n() {
                    if self.a[i][k] > self.a[best][k] {
                        best = i;
                    }
                }
                best
            })
            .collect()
    }

    /// `(sum_k max_i a[i][k])^{e/q}`, valid for `e >= 1`.
    pub fn greedy_upper(&self) -> f64 {
        let total: f64 = (0..self.m()).map(|k| self.a.iter().map(|c| c[k]).fold(0.0, f64::max)).sum();
        total.powf(self.e / self.q)
    }

    /// `log2` of the number of assignments the exhaustive search visits.
    pub fn search_size_log2(&self) -> f64 {
        self.candidates.iter().map(|c| (c.len().max(1) as f64).log2()).sum()
    }

    pub fn exact(&self, guard_log2: f64) -> Result<Vec<usize>> {
        let size = self.search_size_log2();
        if size > guard_log2 {
            return Err(Error::GuardExceeded {
                what: "exhaustive partition search (log2 of assignments)".into(),
                size,
                limit: guard_log2,
            });
        }
        let mut assignment = self.greedy();
        let mut base = vec![0.0; self.n()];
        let mut contested = Vec::new();
        for (k, c) in self.candidates.iter().enumerate() {
            match c.len() {
                0 => {}
                1 => base[c[0]] += self.a[c[0]][k],
                _ => contested.push(k),
            }
        }
        let mut best = (self.objective(&self.masses(&assignment)), assignment.clone());
        let mut current = assignment.clone();
        self.search(&contested, 0, &mut base, &mut current, &mut best);
        assignment = best.1;
        Ok(assignment)
    }

    fn search(&self, contested: &[usize], depth: usize, s: &mut [f64], current: &mut [usize], best: &mut (f64, Vec<usize>)) {
        if depth == contested.len() {
            let v = self.objective(s);
            if v > best.0 {
                *best = (v, current.to_vec());
            }
            return;
        }
        let k = contested[depth];
        for &i in &self.candidates[k] {
            s[i] += self.a[i][k];
            current[k] = i;
            self.search(contested, depth + 1, s, current, best);
            s[i] -= self.a[i][k];
        }
    }

    /// First-improvement single-point moves from the greedy partition and
    /// from random starts.
    pub fn local_search(&self, cfg: &SolverConfig) -> Vec<usize> {
        let starts = 1 + cfg.local_search_starts;
        let runs: Vec<(f64, Vec<usize>)> = (0..starts)
            .into_par_iter()
            .map(|s| {
                let start = if s == 0 {
                    self.greedy()
                } else {
                    let mut rng = cfg.rng(1_000 + s as u64);
                    self.candidates
                        .iter()
                        .map(|c| if c.is_empty() { 0 } else { c[rng.random_range(0..c.len())] })
                        .collect()
                };
                self.improve(start)
            })
            .collect();
        let mut best = (f64::NEG_INFINITY, Vec::new());
        for run in runs {
            if run.0 > best.0 {
                best = run;
            }
        }
        best.1
    }

    fn improve(&self, mut assignment: Vec<usize>) -> (f64, Vec<usize>) {
        let mut s = self.masses(&assignment);
        let pow = |v: f64| if self.e == 1.0 { v } else { v.max(0.0).powf(self.e) };
        let mut obj = self.objective(&s);
        loop {
            let mut improved = false;
            for k in 0..self.m() {
                let cur = assignment[k];
                for &j in &self.candidates[k] {
                    if j == cur || self.a[cur][k] < 0.0 {
                        continue;
                    }
                    let from = (s[cur] - self.a[cur][k]).max(0.0);
                    let delta = pow(from) + pow(s[j] + self.a[j][k]) - pow(s[cur]) - pow(s[j]);
                    if delta > 1e-14 * obj.max(1e-300) {
                        s[cur] = from;
                        s[j] += self.a[j][k];
                        assignment[k] = j;
                        obj = self.objective(&s);
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        (obj, assignment)
    }
}

pub(crate) fn solve(problem: &PartitionProblem, mode: PartitionMode, cfg: &SolverConfig) -> Result<PartitionOutcome> {
    let outcome = |assignment: Vec<usize>, upper: Option<f64>, method| {
        let value = problem.value(&assignment);
        PartitionOutcome { value, upper: upper.unwrap_or(value).max(value), assignment, method }
    };
    if problem.e == 1.0 {
        // Additive objective: the greedy partition is optimal.
        return Ok(outcome(problem.greedy(), None, Method::ClosedForm));
    }
    match mode {
        PartitionMode::Exact => Ok(outcome(problem.exact(cfg.partition_guard_log2)?, None, Method::Exhaustive)),
        PartitionMode::Greedy => Ok(outcome(problem.greedy(), Some(problem.greedy_upper()), Method::Greedy)),
        PartitionMode::LocalSearch => {
            Ok(outcome(problem.local_search(cfg), Some(problem.greedy_upper()), Method::LocalSearch))
        }
        PartitionMode::Auto => {
            if problem.search_size_log2() <= cfg.partition_guard_log2 {
                Ok(outcome(problem.exact(cfg.partition_guard_log2)?, None, Method::Exhaustive))
            } else {
                Ok(outcome(problem.local_search(cfg), Some(problem.greedy_upper()), Method::LocalSearch))
            }
        }
    }
}
