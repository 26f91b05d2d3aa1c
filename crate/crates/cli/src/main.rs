//! `multinorm` command line front end.
//!
//! Exit codes: 0 on success, 1 when a checked inequality fails, 2 on input
//! errors (including guard overruns).

mod input;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use multinorm::amenability::{
    compactness_obstruction, folner_ratio, folner_search, freegroup_obstruction, invariance_constant,
    pseudo_amenability_scan, FolnerFamily, MeanCandidate,
};
use multinorm::gmodules::{
    mean_from_retraction, pi, pi_tilde, q_map, retraction_from_mean, verify_module_identities, FiniteGroup,
};
use multinorm::groups::GroupModel;
use multinorm::multinorm::{
    axioms_check, chain_check, duality_check, DualEngine, MaxEngine, MultiNormEngine, PartitionMode, StandardEngine,
    WeakEngine,
};
use multinorm::operators::{mb_norm, LinOp};
use multinorm::weaksum::mu_with;
use multinorm::{DiscreteSpace, Error, Exponent, MultiVector, Result, SolverConfig};
use rand::Rng;
use serde_json::json;

use output::{method_name, num, Format, Report, Table};

#[derive(Parser, Debug)]
#[command(name = "multinorm", version, about = "Multi-norms, weak summing norms and amenability diagnostics")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// First exponent (`inf` allowed).
    #[arg(long, global = true)]
    p: Option<Exponent>,
    /// Second exponent.
    #[arg(long, global = true)]
    q: Option<Exponent>,
    /// Ambient or domain exponent.
    #[arg(long, global = true)]
    r: Option<Exponent>,
    /// Codomain exponent.
    #[arg(long, global = true)]
    s: Option<Exponent>,
    /// Size parameter; its meaning depends on the command.
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest enumeration size before a guard error.
    #[arg(long, global = true, default_value_t = 1 << 24)]
    guard: usize,
    /// Solver tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Defaults to csv for `sweep` and json otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Global {
    fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::with_seed(self.seed);
        cfg.partition_guard_log2 = (self.guard.max(1) as f64).log2();
        if let Some(tol) = self.tol {
            cfg.tol = tol;
        }
        cfg
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a multi-norm on a tuple document.
    Norm {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Weak)]
        kind: Kind,
        /// Partition search for the standard norm: exact, auto, greedy,
        /// local_search. Only `exact` fails when the guard is exceeded.
        #[arg(long, default_value = "exact")]
        mode: PartitionMode,
    },
    /// Weak p-summing norm of a tuple document.
    Mu { input: PathBuf },
    /// Multi-bounded norm of a matrix document.
    Mbnorm {
        input: PathBuf,
        /// Engine on both sides.
        #[arg(long, value_enum, default_value_t = Kind::Weak)]
        kind: Kind,
    },
    /// Randomized checks of the axioms, orderings and duality.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
    /// The ratio |FS|/|S| for explicit sets.
    Folner {
        #[arg(long)]
        group: String,
        /// The set `F`.
        #[arg(value_name = "F")]
        f_set: String,
        /// The set `S`.
        #[arg(value_name = "S")]
        s_set: String,
        /// Compare with `C n^{1-1/q}`.
        #[arg(long)]
        bound: Option<f64>,
    },
    /// (p,q)-amenability diagnostics.
    Amen {
        #[command(subcommand)]
        what: AmenCommand,
    },
    /// Module identities on finite groups.
    Module {
        #[command(subcommand)]
        what: ModuleCommand,
    },
    /// Evaluate a JSON parameter grid and write one CSV row per point.
    Sweep { spec: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Weak,
    Standard,
    Max,
    Dual,
}

#[derive(Subcommand, Debug)]
enum CheckCommand {
    /// Axioms of one engine on random tuples (`--n` is the largest tuple length).
    Axioms {
        #[arg(long, value_enum, default_value_t = Kind::Weak)]
        engine: Kind,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Points in the measure space.
        #[arg(long, default_value_t = 3)]
        points: usize,
    },
    /// The ordering chain of weak norms on random tuples.
    Ordering {
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        points: usize,
    },
    /// Dual of the weak norm against the dual multi-norm on random tuples.
    Duality {
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        points: usize,
    },
}

#[derive(Subcommand, Debug)]
enum AmenCommand {
    /// Smallest |FS|/|S| over a family, for F the first `--n` elements.
    Folner {
        #[arg(long)]
        group: String,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Invariance constant of a finitely supported mean over a set of shifts.
    Constant {
        #[arg(long)]
        group: String,
        /// `label=weight,...`; defaults to the uniform mean on `--support`.
        #[arg(long)]
        mean: Option<String>,
        #[arg(long, default_value = "e")]
        support: String,
        /// Shift set; defaults to the first `--n` elements.
        #[arg(long)]
        shifts: Option<String>,
    },
    /// Følner ratios against `n^{1-1/q}` over a range of `n`.
    Scan {
        #[arg(long)]
        group: String,
        /// `1..=8` or `1,2,4`.
        #[arg(long, default_value = "1..=8")]
        ns: String,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Lower bounds on the invariance constant: ping-pong pieces on the free
    /// group of rank two, disjoint translates on other infinite groups.
    Obstruct {
        #[arg(long)]
        group: String,
        #[arg(long)]
        mean: Option<String>,
        #[arg(long, default_value = "e")]
        support: String,
    },
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum, default_value_t = FamilyKind::Balls)]
    family: FamilyKind,
    /// Radius, side length or set size, by family.
    #[arg(long, default_value_t = 6)]
    size: usize,
    /// Search radius for connected subsets.
    #[arg(long)]
    radius: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    Balls,
    Rectangles,
    Connected,
}

impl FamilyArgs {
    fn family(&self) -> FolnerFamily {
        match self.family {
            FamilyKind::Balls => FolnerFamily::Balls { max_radius: self.size },
            FamilyKind::Rectangles => FolnerFamily::Rectangles { max_side: self.size },
            FamilyKind::Connected => FolnerFamily::ConnectedSubsets { max_size: self.size, radius: self.radius },
        }
    }
}

#[derive(Subcommand, Debug)]
enum ModuleCommand {
    /// Run the identity suite with the uniform mean.
    Verify {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// The maps on the cyclic group of order three for a fixed vector.
    Demo,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default = if matches!(cli.command, Command::Sweep { .. }) { Format::Csv } else { Format::Json };
    let format = cli.global.format.unwrap_or(default);
    match run(&cli) {
        Ok(report) => {
            if let Err(e) = report.emit(format, cli.global.out.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    let cfg = g.config();
    match &cli.command {
        Command::Norm { input, kind, mode } => {
            let x = input::read_tuple(input)?;
            let engine = engine(*kind, g, *mode, &cfg)?;
            let r = engine.evaluate(&x)?;
            Ok(Report::from_norm("norm", g.seed, &r))
        }
        Command::Mu { input } => {
            let x = input::read_tuple(input)?;
            let p = g.p.unwrap_or(Exponent::ONE);
            let r = mu_with(p, &x, g.r.unwrap_or(Exponent::ONE), &cfg);
            Ok(Report::new("mu", g.seed, method_name(r.method), r.gap(), &r))
        }
        Command::Mbnorm { input, kind } => {
            let doc = input::MatrixDocument::read(input)?;
            let (dom, cod) = doc.spaces()?;
            let r = g.r.unwrap_or(Exponent::TWO);
            let t = g.s.unwrap_or(r);
            let op = LinOp::new(doc.matrix.clone(), dom, r, cod, t)?;
            let (p, q) = (g.p.unwrap_or(Exponent::ONE), g.q.unwrap_or(Exponent::TWO));
            let side = |ambient: Exponent| -> Result<Box<dyn MultiNormEngine>> {
                match kind {
                    Kind::Weak => Ok(Box::new(WeakEngine { ambient, p, q, config: cfg.clone() })),
                    Kind::Standard => {
                        Ok(Box::new(StandardEngine { p: ambient, q, mode: PartitionMode::Exact, config: cfg.clone() }))
                    }
                    Kind::Max => Ok(Box::new(MaxEngine)),
                    Kind::Dual => Ok(Box::new(DualEngine { ambient, r: p, s: q, config: cfg.clone() })),
                }
            };
            let report = mb_norm(&op, g.n.unwrap_or(4), side(r)?.as_ref(), side(t)?.as_ref(), &cfg)?;
            let passed = report.matches_op_norm != Some(false);
            let v = &report.value;
            Ok(Report::new("mbnorm", g.seed, method_name(v.method), v.gap, &report).passed(passed))
        }
        Command::Check { what } => check(what, g, &cfg),
        Command::Folner { group, f_set, s_set, bound } => {
            let model = input::parse_group(group)?;
            let f = input::parse_set(&model, f_set, g.guard)?;
            let s = input::parse_set(&model, s_set, g.guard)?;
            let mut report = folner_ratio(&model, &f, &s)?;
            if let Some(c) = bound {
                report.check_bound(*c, g.q.unwrap_or(Exponent::ONE));
            }
            let passed = report.bound_checked.as_ref().is_none_or(|b| b.holds);
            Ok(Report::new("folner", g.seed, "exhaustive", 0.0, &report).passed(passed))
        }
        Command::Amen { what } => amen(what, g, &cfg),
        Command::Module { what } => module(what, g, &cfg),
        Command::Sweep { spec } => {
            let base = spec.parent().unwrap_or(std::path::Path::new("."));
            sweep::run(&input::read_text(spec)?, base, g.seed, g.guard, &cfg)
        },
    }
}

fn engine(kind: Kind, g: &Global, mode: PartitionMode, cfg: &SolverConfig) -> Result<Box<dyn MultiNormEngine>> {
    let p = g.p.unwrap_or(Exponent::ONE);
    let q = g.q.unwrap_or(p);
    let ordered = || {
        if p > q {
            Err(Error::Precondition(format!("the ({p},{q}) norms need p <= q")))
        } else {
            Ok(())
        }
    };
    Ok(match kind {
        Kind::Weak => {
            ordered()?;
            Box::new(WeakEngine { ambient: g.r.unwrap_or(Exponent::ONE), p, q, config: cfg.clone() })
        }
        Kind::Standard => {
            ordered()?;
            Box::new(StandardEngine { p, q, mode, config: cfg.clone() })
        }
        Kind::Max => Box::new(MaxEngine),
        Kind::Dual => Box::new(DualEngine { ambient: g.r.unwrap_or(Exponent::ONE), r: p, s: q, config: cfg.clone() }),
    })
}

fn random_samples(points: usize, trials: usize, n: usize, seed: u64) -> Result<Vec<MultiVector>> {
    if points == 0 || n == 0 {
        return Err(Error::Precondition("need at least one point and one vector".into()));
    }
    let space = Arc::new(DiscreteSpace::weighted(vec![1.0; points])?);
    (0..trials)
        .map(|t| {
            let mut rng = multinorm::config::rng(seed, 9000 + t as u64);
            let cols = (0..n).map(|_| (0..points).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            MultiVector::new(space.clone(), cols)
        })
        .collect()
}

fn check(what: &CheckCommand, g: &Global, cfg: &SolverConfig) -> Result<Report> {
    match what {
        CheckCommand::Axioms { engine: kind, trials, points } => {
            let e = engine(*kind, g, PartitionMode::Exact, cfg)?;
            let space = Arc::new(DiscreteSpace::weighted(vec![1.0; (*points).max(1)])?);
            let report = axioms_check(e.as_ref(), &space, g.n.unwrap_or(4), *trials, g.seed)?;
            let mut table = Table::new(&["axiom", "checked", "passed", "max_violation"]);
            for a in &report.axioms {
                table.push(vec![a.axiom.clone(), a.checked.to_string(), a.passed.to_string(), num(a.max_violation)]);
            }
            let gap = report.axioms.iter().map(|a| a.max_violation).fold(0.0, f64::max);
            Ok(Report::new("check axioms", g.seed, "sampled", gap, &report).with_table(table).passed(report.pass))
        }
        CheckCommand::Ordering { trials, points } => {
            let p = g.p.unwrap_or(Exponent::new(1.5)?);
            let q = g.q.unwrap_or(Exponent::TWO);
            if p > q {
                return Err(Error::Precondition(format!("the chain needs p <= q, got ({p},{q})")));
            }
            let samples = random_samples(*points, *trials, g.n.unwrap_or(3), g.seed)?;
            let reports = chain_check(&samples, g.r.unwrap_or(Exponent::ONE), p, q, cfg)?;
            let mut table =
                Table::new(&["smaller", "larger", "sample", "smaller_lower", "smaller_upper", "larger_lower", "larger_upper", "holds"]);
            let mut gap = 0.0f64;
            for rep in &reports {
                for row in &rep.rows {
                    gap = gap.max(row.smaller_upper - row.smaller_lower).max(row.larger_upper - row.larger_lower);
                    table.push(vec![
                        format!("({},{})", rep.smaller.0, rep.smaller.1),
                        format!("({},{})", rep.larger.0, rep.larger.1),
                        row.sample.to_string(),
                        num(row.smaller_lower),
                        num(row.smaller_upper),
                        num(row.larger_lower),
                        num(row.larger_upper),
                        row.holds.to_string(),
                    ]);
                }
            }
            let pass = reports.iter().all(|r| r.pass);
            let result = json!({ "links": reports, "pass": pass });
            Ok(Report::new("check ordering", g.seed, "interval", gap, &result).with_table(table).passed(pass))
        }
        CheckCommand::Duality { trials, points } => {
            let p = g.p.unwrap_or(Exponent::ONE);
            let q = g.q.unwrap_or(Exponent::TWO);
            if p > q {
                return Err(Error::Precondition(format!("the duality needs p <= q, got ({p},{q})")));
            }
            let samples = random_samples(*points, *trials, g.n.unwrap_or(2), g.seed)?;
            let report = duality_check(&samples, g.r.unwrap_or(Exponent::TWO), p, q, cfg)?;
            let mut table =
                Table::new(&["sample", "dual_lower", "dual_upper", "multinorm_lower", "multinorm_upper", "relative_gap", "consistent"]);
            for row in &report.rows {
                table.push(vec![
                    row.sample.to_string(),
                    num(row.dual_lower),
                    num(row.dual_upper),
                    num(row.multinorm_lower),
                    num(row.multinorm_upper),
                    num(row.relative_gap),
                    row.consistent.to_string(),
                ]);
            }
            let gap = report.max_relative_gap;
            Ok(Report::new("check duality", g.seed, "interval", gap, &report).with_table(table).passed(report.pass))
        }
    }
}

fn mean(model: &GroupModel, weights: &Option<String>, support: &str, guard: usize) -> Result<MeanCandidate> {
    match weights {
        Some(w) => MeanCandidate::new(input::parse_weights(model, w)?),
        None => MeanCandidate::uniform(&input::parse_set(model, support, guard)?),
    }
}

fn amen(what: &AmenCommand, g: &Global, cfg: &SolverConfig) -> Result<Report> {
    match what {
        AmenCommand::Folner { group, family } => {
            let model = input::parse_group(group)?;
            let f = model.prefix(g.n.unwrap_or(2), g.guard)?;
            let report = folner_search(&model, &f, &family.family(), g.guard)?;
            Ok(Report::new("amen folner", g.seed, "exhaustive", 0.0, &report))
        }
        AmenCommand::Constant { group, mean: weights, support, shifts } => {
            let model = input::parse_group(group)?;
            let a = mean(&model, weights, support, g.guard)?;
            let f = match shifts {
                Some(s) => input::parse_set(&model, s, g.guard)?,
                None => model.prefix(g.n.unwrap_or(2), g.guard)?,
            };
            let p = g.p.unwrap_or(Exponent::ONE);
            let q = g.q.unwrap_or(Exponent::ONE);
            let r = invariance_constant(&model, a.vector(), &f, p, q, cfg)?;
            Ok(Report::from_norm("amen constant", g.seed, &r))
        }
        AmenCommand::Scan { group, ns, family } => {
            let model = input::parse_group(group)?;
            let ns = input::parse_counts(ns)?;
            let report = pseudo_amenability_scan(&model, &ns, &family.family(), g.q.unwrap_or(Exponent::TWO), g.guard)?;
            let mut table = Table::new(&["n", "family", "best_ratio", "bound"]);
            for row in &report.rows {
                table.push(vec![row.n.to_string(), row.family.clone(), num(row.best_ratio), num(row.bound)]);
            }
            Ok(Report::new("amen scan", g.seed, "exhaustive", 0.0, &report).with_table(table))
        }
        AmenCommand::Obstruct { group, mean: weights, support } => {
            let model = input::parse_group(group)?;
            let a = mean(&model, weights, support, g.guard)?;
            let q = g.q.unwrap_or(Exponent::TWO);
            let n = g.n.unwrap_or(4);
            if model.free_rank() == Some(2) {
                let r = freegroup_obstruction(&model, &a, q, n, cfg)?;
                let c = &r.computed;
                Ok(Report::new("amen obstruct", g.seed, method_name(c.method), c.gap, &r).passed(r.holds))
            } else {
                let r = compactness_obstruction(&model, &a, q, n, g.guard, cfg)?;
                let c = &r.computed;
                Ok(Report::new("amen obstruct", g.seed, method_name(c.method), c.gap, &r).passed(r.holds))
            }
        }
    }
}

fn module(what: &ModuleCommand, g: &Global, cfg: &SolverConfig) -> Result<Report> {
    match what {
        ModuleCommand::Verify { group, samples } => {
            let model = input::parse_group(group)?;
            let p = g.p.unwrap_or(Exponent::TWO);
            let report = verify_module_identities(&model, p, *samples, cfg)?;
            let mut table = Table::new(&["identity", "samples", "max_residual", "passed"]);
            for id in &report.identities {
                table.push(vec![id.identity.clone(), id.samples.to_string(), num(id.max_residual), id.passed.to_string()]);
            }
            let norm = report.retraction_norm;
            Ok(Report::new("module verify", g.seed, "exact", norm.upper - norm.lower, &report)
                .with_table(table)
                .passed(report.passed))
        }
        ModuleCommand::Demo => {
            let model = GroupModel::cyclic(3)?;
            let group = FiniteGroup::new(&model)?;
            let p = g.p.unwrap_or(Exponent::TWO);
            let x = vec![1.0, 2.0, 3.0];
            let pix = pi(&group, p, &x);
            let qpi = q_map(&pix);
            let tilde = pi_tilde(&group, p, &x);
            let uniform = vec![1.0 / 3.0; 3];
            let r = retraction_from_mean(&group, &uniform, p, cfg)?;
            let back = r.apply(&tilde);
            let recovered = mean_from_retraction(&r, cfg)?;
            let residual = qpi.max_abs_diff(&tilde).max(back.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            let result = json!({
                "group": model.name(),
                "p": p,
                "x": x,
                "pi_x": pix.entries(),
                "q_pi_x": qpi.entries(),
                "pi_tilde_x": tilde.entries(),
                "r_pi_tilde_x": back,
                "max_residual": residual,
                "retraction_norm": r.norm_estimate(),
                "recovered_mean": recovered,
            });
            let gap = r.norm_estimate().upper - r.norm_estimate().lower;
            let passed = residual <= multinorm::gmodules::IDENTITY_TOL && recovered.unit_mass;
            Ok(Report::new("module demo", g.seed, "exact", gap, &result).passed(passed))
        }
    }
}
