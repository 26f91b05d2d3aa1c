//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use multinorm::amenability::{
    folner_ratio, folner_search, freegroup_obstruction, invariance_constant, layered_closed_form, layered_function, FolnerFamily,
    MeanCandidate,
};
use multinorm::config::rng;
use multinorm::gmodules::{sign_lemma_check, verify_module_identities};
use multinorm::groups::{Element, GroupModel};
use multinorm::multinorm::{
    axioms_check, chain_check, duality_check, max_multinorm, partition_sup_q, standard_pq, PartitionMode, WeakEngine,
};
use multinorm::operators::{mb_norm, op_norm, random_operator};
use multinorm::{DiscreteSpace, Exponent, MultiVector, SolverConfig};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exp(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

fn random_space(rng: &mut ChaCha8Rng, m: usize, unit: bool) -> Arc<DiscreteSpace> {
    let w = (0..m).map(|_| if unit { 1.0 } else { rng.random_range(0.1..3.0) }).collect();
    Arc::new(DiscreteSpace::weighted(w).unwrap())
}

fn random_tuple(rng: &mut ChaCha8Rng, space: &Arc<DiscreteSpace>, n: usize) -> MultiVector {
    let cols = (0..n)
        .map(|_| (0..space.len()).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(-2.0..2.0) }).collect())
        .collect();
    MultiVector::new(space.clone(), cols).unwrap()
}

/// `sup` over all `n^m` assignments of `(sum_i (sum_{k in X_i} w_k |f_i(k)|^p)^{q/p})^{1/q}`.
fn brute_partition(x: &MultiVector, p: f64, q: f64) -> f64 {
    let (n, m) = (x.n(), x.m());
    let w = x.weights();
    let mut best: f64 = 0.0;
    let mut assign = vec![0usize; m];
    loop {
        let mut blocks = vec![0.0; n];
        for k in 0..m {
            blocks[assign[k]] += w[k] * x.column(assign[k])[k].abs().powf(p);
        }
        best = best.max(blocks.iter().map(|b: &f64| b.powf(q / p)).sum::<f64>().powf(1.0 / q));
        let mut pos = 0;
        while pos < m {
            assign[pos] += 1;
            if assign[pos] < n {
                break;
            }
            assign[pos] = 0;
            pos += 1;
        }
        if pos == m {
            return best;
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let mut r = rng(1, 0);
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let m = r.random_range(1..=8);
        let n = r.random_range(1..=4);
        let space = random_space(&mut r, m, trial % 2 == 0);
        let x = random_tuple(&mut r, &space, n);
        let p = [1.0, 1.5, 2.0, 3.0][trial % 4];
        let got = standard_pq(&x, exp(p), exp(p), PartitionMode::Greedy, &cfg).map_err(|e| e.to_string())?;
        let oracle = brute_partition(&x, p, p);
        let diff = (got.value - oracle).abs();
        worst = worst.max(diff);
        ensure(diff <= 1e-12 * oracle.max(1.0), || format!("trial {trial}: greedy {} vs brute force {oracle}", got.value))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("took {secs:.2}s"))?;
    Ok(format!("200 instances, max |greedy - brute force| = {worst:.1e}, {secs:.2}s"))
}

fn criterion_2() -> Outcome {
    let cfg = SolverConfig::default();
    let mut r = rng(2, 0);
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let m = r.random_range(1..=8);
        let n = r.random_range(1..=4);
        let space = random_space(&mut r, m, trial % 2 == 0);
        let x = random_tuple(&mut r, &space, n);
        let a = partition_sup_q(&x, Exponent::ONE, PartitionMode::Exact, &cfg).map_err(|e| e.to_string())?;
        let b = max_multinorm(&x);
        worst = worst.max((a.value - b.value).abs());
        ensure(a.value == b.value, || format!("trial {trial}: {} vs {}", a.value, b.value))?;
    }
    Ok(format!("200 instances, max difference {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let mut lines = Vec::new();
    for (i, (p, q)) in [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (1.5, 3.0)].into_iter().enumerate() {
        let engine = WeakEngine { ambient: Exponent::ONE, p: exp(p), q: exp(q), config: SolverConfig::default() };
        let space = Arc::new(DiscreteSpace::weighted(vec![1.0, 0.5, 2.0]).unwrap());
        let report = axioms_check(&engine, &space, 4, 100, 30 + i as u64).map_err(|e| e.to_string())?;
        let failed: Vec<String> = report
            .axioms
            .iter()
            .filter(|a| a.passed != a.checked)
            .map(|a| format!("{} {}/{} (max violation {:.1e})", a.axiom, a.passed, a.checked, a.max_violation))
            .collect();
        ensure(report.pass, || format!("({p},{q}): {}", failed.join(", ")))?;
        lines.push(format!("({p},{q})"));
    }
    Ok(format!("A1-A4 and duplication sandwich on 100 instances each for {}", lines.join(" ")))
}

fn criterion_4() -> Outcome {
    let cfg = SolverConfig::default();
    let mut r = rng(4, 0);
    let samples: Vec<MultiVector> = (0..100)
        .map(|i| {
            let m = r.random_range(2..=4);
            let n = r.random_range(1..=3);
            let space = random_space(&mut r, m, i % 2 == 0);
            random_tuple(&mut r, &space, n)
        })
        .collect();
    let reports = chain_check(&samples, Exponent::ONE, exp(1.5), exp(2.0), &cfg).map_err(|e| e.to_string())?;
    for rep in &reports {
        let bad = rep.rows.iter().filter(|r| !r.holds).count();
        ensure(rep.pass, || format!("{:?} <= {:?} failed on {bad} samples", rep.smaller, rep.larger))?;
    }
    Ok("(1,2) <= (1.5,2) <= (2,2) <= (1.5,1.5) <= (1,1) on 100 instances".into())
}

fn criterion_5() -> Outcome {
    let cfg = SolverConfig::default();
    let mut r = rng(5, 0);
    let mut exact_samples = Vec::new();
    for m in [2, 3] {
        for _ in 0..10 {
            let n = r.random_range(1..=3);
            let space = random_space(&mut r, m, false);
            exact_samples.push(random_tuple(&mut r, &space, n));
        }
    }
    let one = duality_check(&exact_samples, Exponent::ONE, Exponent::ONE, Exponent::ONE, &cfg).map_err(|e| e.to_string())?;
    ensure(one.pass && one.max_relative_gap <= 1e-6, || format!("(1,1): max relative gap {:.2e}", one.max_relative_gap))?;
    let samples: Vec<MultiVector> = (0..50)
        .map(|_| {
            let m = r.random_range(2..=3);
            let n = r.random_range(1..=3);
            let space = random_space(&mut r, m, false);
            random_tuple(&mut r, &space, n)
        })
        .collect();
    let two = duality_check(&samples, Exponent::ONE, Exponent::ONE, exp(2.0), &cfg).map_err(|e| e.to_string())?;
    let inconsistent = two.rows.iter().filter(|r| !r.consistent).count();
    ensure(inconsistent == 0, || format!("(1,2): {inconsistent} inconsistent brackets"))?;
    ensure(two.max_relative_gap <= 0.05, || format!("(1,2): max relative gap {:.3}", two.max_relative_gap))?;
    Ok(format!("(1,1) max gap {:.1e} on 20 instances; (1,2) max gap {:.2e} on 50 instances", one.max_relative_gap, two.max_relative_gap))
}

fn criterion_6() -> Outcome {
    let cfg = SolverConfig::default();
    let mut r = rng(6, 0);
    let two = Exponent::TWO;
    let mut worst: f64 = 0.0;
    for trial in 0..20 {
        let m = r.random_range(1..=4);
        let space = Arc::new(DiscreteSpace::uniform(m).unwrap());
        let op = random_operator(space.clone(), two, space.clone(), two, &mut r);
        let engine = WeakEngine { ambient: two, p: two, q: two, config: cfg.clone() };
        let rep = mb_norm(&op, 5, &engine, &engine, &cfg).map_err(|e| e.to_string())?;
        let spectral = op_norm(&op, &cfg);
        ensure(spectral.is_exact(), || format!("trial {trial}: spectral norm not exact"))?;
        ensure(rep.monotone, || format!("trial {trial}: amplification norms not monotone"))?;
        ensure(rep.matches_op_norm == Some(true), || format!("trial {trial}: mb {:?} vs spectral {}", rep.value, spectral.value))?;
        let rel = (rep.value.lower_bound - spectral.value).abs() / spectral.value.max(1e-300);
        worst = worst.max(rel);
        ensure(rep.value.lower_bound <= rep.value.upper_bound, || format!("trial {trial}: empty interval"))?;
    }
    Ok(format!("20 operators, k <= 5, max relative distance to spectral norm {worst:.1e}"))
}

fn criterion_7() -> Outcome {
    let cfg = SolverConfig::default();
    let z = GroupModel::lattice(1).unwrap();
    let int = |v: i64| Element::Lattice(vec![v]);
    let worked = layered_closed_form(&z, &[0.5, 0.5], &[vec![int(0)], vec![int(0), int(1)]], &[int(0), int(1)]).map_err(|e| e.to_string())?;
    ensure(worked == 2.5, || format!("worked example gives {worked}"))?;
    let mut r = rng(7, 0);
    let mut cases = 0;
    let z6 = GroupModel::cyclic(6).unwrap();
    for group in [&z, &z6] {
        for _ in 0..40 {
            let layers = r.random_range(1..=3);
            let n = r.random_range(1..=4);
            let universe: Vec<Element> = if group.is_finite() { group.elements().unwrap() } else { (-4..=4).map(int).collect() };
            let mut sets: Vec<Vec<Element>> = Vec::new();
            let mut current: Vec<Element> = Vec::new();
            for _ in 0..layers {
                let extra = r.random_range(1..=2);
                for _ in 0..extra {
                    let a = universe[r.random_range(0..universe.len())].clone();
                    if !current.contains(&a) {
                        current.push(a);
                    }
                }
                sets.push(current.clone());
            }
            let beta: Vec<f64> = (0..layers).map(|_| r.random_range(0.0..1.0)).collect();
            let mut f: Vec<Element> = Vec::new();
            while f.len() < n.min(universe.len()) {
                let a = universe[r.random_range(0..universe.len())].clone();
                if !f.contains(&a) {
                    f.push(a);
                }
            }
            let closed = layered_closed_form(group, &beta, &sets, &f).map_err(|e| e.to_string())?;
            let computed = invariance_constant(group, &layered_function(&beta, &sets), &f, Exponent::ONE, Exponent::ONE, &cfg)
                .map_err(|e| e.to_string())?;
            ensure((closed - computed.value).abs() <= 1e-12 * closed.max(1.0), || {
                format!("{}: closed form {closed} vs computed {}", group.name(), computed.value)
            })?;
            cases += 1;
        }
    }
    Ok(format!("worked value 2.5; {cases} layered instances on Z and Z6 agree to 1e-12"))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let z = GroupModel::lattice(1).unwrap();
    let int = |v: i64| Element::Lattice(vec![v]);
    let r1 = folner_ratio(&z, &[int(0), int(1)], &(0..5).map(int).collect::<Vec<_>>()).map_err(|e| e.to_string())?;
    ensure(r1.ratio == 1.2, || format!("Z ratio {}", r1.ratio))?;
    let f2 = GroupModel::free(2).unwrap();
    let a = f2.parse_element("a").unwrap();
    let r2 = folner_ratio(&f2, &[f2.identity(), a], &f2.ball(1, 100).unwrap()).map_err(|e| e.to_string())?;
    ensure(r2.ratio == 1.6, || format!("free(2) ratio {}", r2.ratio))?;
    let mut trend = Vec::new();
    for side in [1, 10, 100, 1000] {
        let found = folner_search(&z, &[int(0), int(1)], &FolnerFamily::Rectangles { max_side: side }, 10_000).map_err(|e| e.to_string())?;
        trend.push(found.best.ratio);
    }
    ensure(trend.windows(2).all(|w| w[1] < w[0]) && trend[3] - 1.0 < 2e-3, || format!("Z trend {trend:?}"))?;
    let f = vec![f2.identity(), f2.parse_element("a").unwrap(), f2.parse_element("b").unwrap()];
    let family = FolnerFamily::ConnectedSubsets { max_size: 10, radius: None };
    let found = folner_search(&f2, &f, &family, 100_000).map_err(|e| e.to_string())?;
    ensure(found.best.ratio > 1.0, || format!("free(2) connected subsets reach ratio {}", found.best.ratio))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!(
        "Z: 1.2, free(2): 1.6, Z trend {:?} -> 1, free(2) min over {} connected sets = {:.4}, {secs:.1}s",
        trend, found.candidates, found.best.ratio
    ))
}

fn criterion_9() -> Outcome {
    let cfg = SolverConfig::default();
    let f2 = GroupModel::free(2).unwrap();
    let a = MeanCandidate::uniform(&f2.ball(1, 100).unwrap()).map_err(|e| e.to_string())?;
    let mut count = 0;
    for q in [1.0, 2.0] {
        for n in 1..=6 {
            let rep = freegroup_obstruction(&f2, &a, exp(q), n, &cfg).map_err(|e| e.to_string())?;
            ensure(rep.piece == "W(a)" && rep.shift == "b", || format!("chose {} with shift {}", rep.piece, rep.shift))?;
            ensure(rep.computed.is_exact(), || format!("q={q}, n={n}: {:?} is not exact", rep.computed.method))?;
            ensure(rep.holds, || format!("q={q}, n={n}: {} < {}", rep.computed.value, rep.bound))?;
            count += 1;
        }
    }
    Ok(format!("{count} cases, ||(b.a, ..., b^n.a)||^(1,q) >= n^(1/q)/5 exactly"))
}

fn criterion_10() -> Outcome {
    let cfg = SolverConfig::default();
    let mut runs = 0;
    for name in ["z2", "z3", "z4", "s3"] {
        let g = GroupModel::named(name).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let rep = verify_module_identities(&g, exp(p), 50, &cfg).map_err(|e| e.to_string())?;
            let worst = rep.identities.iter().map(|i| i.max_residual).fold(0.0, f64::max);
            ensure(rep.passed, || {
                format!(
                    "{name}, p={p}: residual {worst:.1e}, C = [{}, {}], ||R|| <= {}, diagonal {}",
                    rep.uniform_constant.lower_bound, rep.uniform_constant.upper_bound, rep.retraction_norm.upper, rep.diagonal_holds
                )
            })?;
            runs += 1;
        }
    }
    Ok(format!("{runs} group/exponent pairs, 50 samples each, all identities within 1e-12"))
}

fn criterion_11() -> Outcome {
    let mut r = rng(11, 0);
    let mut min_slack = f64::INFINITY;
    for trial in 0..100 {
        let n = r.random_range(1..=10);
        let dim = r.random_range(1..=3);
        let p = [1.0, 1.5, 2.0, 3.0][trial % 4];
        let f: Vec<Vec<Vec<f64>>> =
            (0..n).map(|_| (0..n).map(|_| (0..dim).map(|_| r.random_range(-1.0..1.0)).collect()).collect()).collect();
        let rep = sign_lemma_check(&f, exp(p)).map_err(|e| e.to_string())?;
        ensure(rep.holds, || format!("trial {trial}: diagonal {} > C {}", rep.diagonal, rep.c))?;
        min_slack = min_slack.min(rep.c - rep.diagonal);
    }
    let v = vec![0.3, -1.2];
    let zero = vec![0.0, 0.0];
    let diag: Vec<Vec<Vec<f64>>> = (0..4).map(|i| (0..4).map(|j| if i == j { v.clone() } else { zero.clone() }).collect()).collect();
    let eq = sign_lemma_check(&diag, exp(1.5)).map_err(|e| e.to_string())?;
    ensure((eq.c - eq.diagonal).abs() <= 1e-15 * eq.c, || format!("diagonal instance: {} vs {}", eq.diagonal, eq.c))?;
    Ok(format!("100 instances, min slack {min_slack:.2e}; equality on the diagonal instance"))
}

fn reports(seed: u64) -> Vec<String> {
    let cfg = SolverConfig::with_seed(seed);
    let mut r = rng(seed, 0);
    let space = Arc::new(DiscreteSpace::weighted(vec![1.0, 0.5, 2.0]).unwrap());
    let samples: Vec<MultiVector> = (0..5).map(|_| random_tuple(&mut r, &space, 3)).collect();
    let engine = WeakEngine { ambient: Exponent::ONE, p: exp(1.5), q: exp(3.0), config: cfg.clone() };
    let z3 = GroupModel::named("z3").unwrap();
    vec![
        serde_json::to_string_pretty(&axioms_check(&engine, &space, 4, 10, seed).unwrap()).unwrap(),
        serde_json::to_string_pretty(&duality_check(&samples, Exponent::ONE, Exponent::ONE, exp(2.0), &cfg).unwrap()).unwrap(),
        serde_json::to_string_pretty(&chain_check(&samples, Exponent::ONE, exp(1.5), exp(2.0), &cfg).unwrap()).unwrap(),
        serde_json::to_string_pretty(&verify_module_identities(&z3, exp(2.0), 10, &cfg).unwrap()).unwrap(),
    ]
}

fn criterion_12() -> Outcome {
    let a = reports(12);
    let b = reports(12);
    ensure(a == b, || "reports differ between runs".into())?;
    let bytes: usize = a.iter().map(|s| s.len()).sum();
    Ok(format!("{} JSON reports ({bytes} bytes) identical across two runs", a.len()))
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome); 12] = [
        (1, "greedy equals exhaustive partition search", criterion_1),
        (2, "q = 1 partition supremum equals the maximum multi-norm", criterion_2),
        (3, "weak (p,q) axioms", criterion_3),
        (4, "ordering chain", criterion_4),
        (5, "duality", criterion_5),
        (6, "multi-bounded norm equals the operator norm", criterion_6),
        (7, "layered closed form", criterion_7),
        (8, "Følner numbers", criterion_8),
        (9, "free-group obstruction", criterion_9),
        (10, "coretraction identities on finite groups", criterion_10),
        (11, "sign-vector lemma", criterion_11),
        (12, "determinism", criterion_12),
    ];
    let mut failures = 0;
    for (n, name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] criterion {n}: {name}: {detail} ({secs:.2}s)"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] criterion {n}: {name}: {detail} ({secs:.2}s)");
            }
        }
    }
    println!("{} of 12 acceptance criteria passed", 12 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
