//! Parameter grids evaluated to one CSV row per point.
//!
//! ```json
//! {"grid": [
//!   {"task": "folner_scan", "group": "int", "ns": [1, 2, 3], "family": {"family": "rectangles", "max_side": 64}},
//!   {"task": "invariance", "group": "int", "support": "0", "ns": [1, 2, 4], "qs": [1, 2, "inf"]},
//!   {"task": "norm", "input": "pair.json", "kind": "weak", "ps": [1], "qs": [1, 2], "r": 1}
//! ]}
//! ```
//!
//! Rows follow the grid order, then `n`, then `p`, then `q`.

use std::path::Path;
use std::time::Instant;

use multinorm::amenability::{folner_search, invariance_constant, FolnerFamily, MeanCandidate};
use multinorm::multinorm::{dual_multinorm_upper, max_multinorm, standard_pq, weak_pq, PartitionMode};
use multinorm::{Exponent, NormResult, Result, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::input;
use crate::output::{method_name, num, Report, Table};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSpec {
    #[serde(default)]
    grid: Vec<Task>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case", deny_unknown_fields)]
enum Task {
    /// Smallest `|FS|/|S|` for `F` the first `n` elements.
    FolnerScan {
        group: String,
        ns: Vec<usize>,
        family: FolnerFamily,
    },
    /// Invariance constant of a mean over the first `n` elements.
    Invariance {
        group: String,
        #[serde(default)]
        mean: Option<String>,
        #[serde(default = "identity_support")]
        support: String,
        ns: Vec<usize>,
        #[serde(default = "one")]
        ps: Vec<Exponent>,
        qs: Vec<Exponent>,
    },
    /// A multi-norm of a tuple document; `input` is relative to the sweep file.
    Norm {
        input: String,
        kind: String,
        #[serde(default = "one")]
        ps: Vec<Exponent>,
        #[serde(default)]
        qs: Vec<Exponent>,
        #[serde(default)]
        r: Option<Exponent>,
        #[serde(default)]
        mode: Option<PartitionMode>,
    },
}

fn identity_support() -> String {
    "e".into()
}

fn one() -> Vec<Exponent> {
    vec![Exponent::ONE]
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub task: String,
    pub group: String,
    pub n: usize,
    pub p: Option<Exponent>,
    pub q: Option<Exponent>,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub method: String,
    pub runtime_ms: f64,
}

impl SweepRow {
    fn from_norm(task: &str, group: &str, n: usize, p: Option<Exponent>, q: Option<Exponent>, r: &NormResult, start: Instant) -> Self {
        SweepRow {
            task: task.into(),
            group: group.into(),
            n,
            p,
            q,
            value: r.value,
            lower: r.lower_bound,
            upper: r.upper_bound,
            gap: r.gap,
            method: method_name(r.method),
            runtime_ms: elapsed_ms(start),
        }
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

const HEADERS: [&str; 11] = ["task", "group", "n", "p", "q", "value", "lower", "upper", "gap", "method", "runtime_ms"];

pub fn run(text: &str, base: &Path, seed: u64, guard: usize, cfg: &SolverConfig) -> Result<Report> {
    let spec: SweepSpec = serde_json::from_str(text)?;
    let mut rows = Vec::new();
    for task in &spec.grid {
        evaluate(task, base, guard, cfg, &mut rows)?;
    }
    let opt = |e: &Option<Exponent>| e.map(|e| e.to_string()).unwrap_or_default();
    let mut table = Table::new(&HEADERS);
    for r in &rows {
        table.push(vec![
            r.task.clone(),
            r.group.clone(),
            r.n.to_string(),
            opt(&r.p),
            opt(&r.q),
            num(r.value),
            num(r.lower),
            num(r.upper),
            num(r.gap),
            r.method.clone(),
            num(r.runtime_ms),
        ]);
    }
    let gap = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
    Ok(Report::new("sweep", seed, "grid", gap, &rows).with_table(table))
}

fn evaluate(task: &Task, base: &Path, guard: usize, cfg: &SolverConfig, rows: &mut Vec<SweepRow>) -> Result<()> {
    match task {
        Task::FolnerScan { group, ns, family } => {
            let model = input::parse_group(group)?;
            for &n in ns {
                let start = Instant::now();
                let f = model.prefix(n, guard)?;
                let found = folner_search(&model, &f, family, guard)?;
                let ratio = found.best.ratio;
                rows.push(SweepRow {
                    task: "folner_scan".into(),
                    group: model.name().into(),
                    n,
                    p: None,
                    q: None,
                    value: ratio,
                    lower: ratio,
                    upper: ratio,
                    gap: 0.0,
                    method: "exhaustive".into(),
                    runtime_ms: elapsed_ms(start),
                });
            }
        }
        Task::Invariance { group, mean, support, ns, ps, qs } => {
            let model = input::parse_group(group)?;
            let a = match mean {
                Some(w) => MeanCandidate::new(input::parse_weights(&model, w)?)?,
                None => MeanCandidate::uniform(&input::parse_set(&model, support, guard)?)?,
            };
            for &n in ns {
                let f = model.prefix(n, guard)?;
                for &p in ps {
                    for &q in qs {
                        let start = Instant::now();
                        let r = invariance_constant(&model, a.vector(), &f, p, q, cfg)?;
                        rows.push(SweepRow::from_norm("invariance", model.name(), n, Some(p), Some(q), &r, start));
                    }
                }
            }
        }
        Task::Norm { input: path, kind, ps, qs, r, mode } => {
            let x = input::read_tuple(&base.join(path))?;
            let ambient = r.unwrap_or(Exponent::ONE);
            for &p in ps {
                let qs = if qs.is_empty() { vec![p] } else { qs.clone() };
                for q in qs {
                    let start = Instant::now();
                    let res = match kind.as_str() {
                        "weak" => weak_pq(&x, ambient, p, q, cfg)?,
                        "standard" => standard_pq(&x, p, q, mode.unwrap_or(PartitionMode::Exact), cfg)?,
                        "max" => max_multinorm(&x),
                        "dual" => dual_multinorm_upper(&x, ambient, p, q, cfg)?,
                        other => return Err(multinorm::Error::Parse(format!("unknown norm kind {other:?}"))),
                    };
                    rows.push(SweepRow::from_norm("norm", "", x.n(), Some(p), Some(q), &res, start));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv(text: &str) -> String {
        run(text, Path::new("."), 0, 1 << 20, &SolverConfig::default())
            .unwrap()
            .render(crate::output::Format::Csv)
            .unwrap()
    }

    #[test]
    fn empty_grid_is_header_only() {
        assert_eq!(csv(r#"{"grid": []}"#), "task,group,n,p,q,value,lower,upper,gap,method,runtime_ms\n");
    }

    #[test]
    fn disjoint_translates_give_n_to_the_one_over_q() {
        let out = csv(r#"{"grid": [{"task": "invariance", "group": "int", "support": "0", "ns": [4], "qs": [2]}]}"#);
        let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[5].parse::<f64>().unwrap(), 2.0);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(run(r#"{"grid": [{"task": "nope"}]}"#, Path::new("."), 0, 10, &SolverConfig::default()).is_err());
    }
}
