//! Reference values checked against independent brute-force oracles.

use std::collections::BTreeSet;
use std::sync::Arc;

use multinorm::amenability::{compactness_obstruction, folner_search, invariance_constant, FolnerFamily, MeanCandidate};
use multinorm::config::rng;
use multinorm::groups::{Element, GroupModel, GroupVector};
use multinorm::multinorm::{
    dual_multinorm_upper, dual_value, extension_norm, max_multinorm, partition_sup_q, standard_pq, weak_pq, MaxEngine,
    PartitionMode, WeakEngine,
};
use multinorm::operators::{mb_norm, mb_set_constant, op_norm, LinOp};
use multinorm::weaksum::mu;
use multinorm::{DiscreteSpace, Exponent, MultiVector, SolverConfig, Vector};
use rand::Rng;

fn exp(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

fn tuple(weights: Vec<f64>, cols: Vec<Vec<f64>>) -> MultiVector {
    MultiVector::new(Arc::new(DiscreteSpace::weighted(weights).unwrap()), cols).unwrap()
}

fn deltas() -> MultiVector {
    tuple(vec![1.0, 1.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]])
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// `max over signs of ||sum_i eps_i x_i||_inf`.
fn sign_oracle(cols: &[Vec<f64>]) -> f64 {
    let n = cols.len();
    let m = cols[0].len();
    (0..1u32 << n)
        .map(|mask| {
            (0..m)
                .map(|k| (0..n).map(|i| if mask >> i & 1 == 1 { -cols[i][k] } else { cols[i][k] }).sum::<f64>().abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[test]
fn weak_one_summing_in_l_infinity_matches_sign_enumeration() {
    let x = tuple(vec![1.0, 1.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    assert!(close(mu(Exponent::ONE, &x, Exponent::INFINITY).value, 1.0, 1e-12));
    let mut r = rng(101, 0);
    for _ in 0..30 {
        let n = r.random_range(1..=4);
        let m = r.random_range(1..=4);
        let cols: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
        let x = tuple(vec![1.0; m], cols.clone());
        let got = mu(Exponent::ONE, &x, Exponent::INFINITY);
        assert!(close(got.value, sign_oracle(&cols), 1e-12), "{} vs {}", got.value, sign_oracle(&cols));
    }
}

#[test]
fn weak_two_summing_in_l2_is_the_largest_singular_value() {
    assert!(close(mu(Exponent::TWO, &deltas(), Exponent::TWO).value, 1.0, 1e-12));
    let mut r = rng(102, 0);
    for _ in 0..30 {
        let n = r.random_range(1..=4);
        let cols: Vec<Vec<f64>> = (0..n).map(|_| (0..2).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
        // Largest eigenvalue of the 2x2 Gram matrix sum_i x_i x_i^T.
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for x in &cols {
            a += x[0] * x[0];
            b += x[0] * x[1];
            c += x[1] * x[1];
        }
        let top = (a + c) / 2.0 + (((a - c) / 2.0).powi(2) + b * b).sqrt();
        let got = mu(Exponent::TWO, &tuple(vec![1.0, 1.0], cols), Exponent::TWO);
        assert!(close(got.value, top.sqrt(), 1e-10), "{} vs {}", got.value, top.sqrt());
    }
}

#[test]
fn max_multinorm_values() {
    assert_eq!(max_multinorm(&deltas()).value, 2.0);
    assert_eq!(max_multinorm(&tuple(vec![1.0, 1.0], vec![vec![1.0, 1.0], vec![1.0, 1.0]])).value, 2.0);
    assert_eq!(max_multinorm(&tuple(vec![1.0, 1.0], vec![vec![2.0, 0.0], vec![1.0, 1.0]])).value, 3.0);
}

#[test]
fn partition_values_on_two_atoms() {
    let cfg = SolverConfig::default();
    for q in [1.0, 1.5, 2.0, 4.0] {
        let expected = 2f64.powf(1.0 / q);
        let weak = weak_pq(&deltas(), Exponent::ONE, Exponent::ONE, exp(q), &cfg).unwrap();
        assert!(close(weak.value, expected, 1e-12), "q = {q}: {}", weak.value);
        let sup = partition_sup_q(&deltas(), exp(q), PartitionMode::Exact, &cfg).unwrap();
        assert!(close(sup.value, expected, 1e-12));
        let standard = standard_pq(&deltas(), exp(q), exp(q), PartitionMode::Exact, &cfg).unwrap();
        assert!(close(standard.value, expected, 1e-12));
    }
    let ones = tuple(vec![1.0, 1.0], vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
    let v = standard_pq(&ones, Exponent::ONE, exp(2.0), PartitionMode::Exact, &cfg).unwrap();
    assert!(close(v.value, 2.0, 1e-15));
}

#[test]
fn single_atom_partition_supremum() {
    let cfg = SolverConfig::default();
    let mu = tuple(vec![0.7], vec![vec![0.5], vec![-2.0], vec![1.0]]);
    for q in [1.0, 2.0, 3.0] {
        let v = partition_sup_q(&mu, exp(q), PartitionMode::Exact, &cfg).unwrap();
        let oracle = [0.5f64, 2.0, 1.0].iter().map(|a| a * 0.7).fold(0.0, f64::max);
        assert!(close(v.value, oracle, 1e-15));
    }
}

#[test]
fn weak_chain_on_two_atoms() {
    let cfg = SolverConfig::default();
    let small = weak_pq(&deltas(), Exponent::ONE, Exponent::ONE, exp(2.0), &cfg).unwrap();
    let large = weak_pq(&deltas(), Exponent::ONE, Exponent::ONE, Exponent::ONE, &cfg).unwrap();
    assert!(close(small.value, 2f64.sqrt(), 1e-12));
    assert!(close(large.value, 2.0, 1e-12));
}

#[test]
fn dual_of_the_maximum_multinorm_on_two_atoms() {
    let cfg = SolverConfig::default();
    let lambda = deltas();
    let dv = dual_value(&lambda, Exponent::ONE, Exponent::ONE, Exponent::ONE, &cfg).unwrap();
    assert!(close(dv.value, 1.0, 1e-9), "{dv:?}");
    let up = dual_multinorm_upper(&lambda, Exponent::INFINITY, Exponent::ONE, Exponent::INFINITY, &cfg).unwrap();
    assert!(close(up.upper_bound, 1.0, 1e-9), "{up:?}");
}

/// Dense grid over dual tuples: a lower bound for the weak (1,2) norm on a
/// two-point `l^1` space, where `mu_1(lambda) = max_k sum_i |lambda_i(k)|`.
#[test]
fn weak_one_two_against_a_dual_grid() {
    let cfg = SolverConfig::default();
    let x = tuple(vec![1.0, 1.0], vec![vec![0.8, -0.3], vec![0.2, 0.9]]);
    let got = weak_pq(&x, Exponent::ONE, Exponent::ONE, exp(2.0), &cfg).unwrap();
    let steps = 40;
    let grid: Vec<f64> = (0..=steps).map(|i| -1.0 + 2.0 * i as f64 / steps as f64).collect();
    let mut best: f64 = 0.0;
    for &a0 in &grid {
        for &a1 in &grid {
            for &b0 in &grid {
                for &b1 in &grid {
                    let mu1 = (a0.abs() + b0.abs()).max(a1.abs() + b1.abs());
                    if mu1 > 1.0 + 1e-12 || mu1 == 0.0 {
                        continue;
                    }
                    let s = (0.8 * a0 - 0.3 * a1) / mu1;
                    let t = (0.2 * b0 + 0.9 * b1) / mu1;
                    best = best.max((s * s + t * t).sqrt());
                }
            }
        }
    }
    assert!(got.lower_bound >= best - 1e-12, "{} < grid {best}", got.lower_bound);
    assert!(got.upper_bound <= best * 1.02, "{} vs grid {best}", got.upper_bound);
}

#[test]
fn extension_agrees_with_weak_norm_for_equal_exponents() {
    let cfg = SolverConfig::default();
    let target = Arc::new(DiscreteSpace::uniform(4).unwrap());
    for q in [1.0, 2.0] {
        let ext = extension_norm(&deltas(), Exponent::ONE, &target, exp(q), exp(q), 16, &cfg).unwrap();
        let expected = 2f64.powf(1.0 / q);
        assert!(close(ext.weak.value, expected, 1e-9));
        assert!(close(ext.norm.value, expected, 1e-9), "{:?}", ext.norm);
        assert!(ext.agrees);
    }
}

#[test]
fn rank_one_operator_norm() {
    let cfg = SolverConfig::default();
    let x = [0.5, -1.0, 2.0];
    let lambda = [1.0, -0.5];
    for (r, t) in [(1.0, 1.0), (1.5, 3.0), (2.0, 2.0), (3.0, 1.5)] {
        let dom = Arc::new(DiscreteSpace::uniform(2).unwrap());
        let cod = Arc::new(DiscreteSpace::uniform(3).unwrap());
        let matrix = x.iter().map(|xi| lambda.iter().map(|l| xi * l).collect()).collect();
        let op = LinOp::new(matrix, dom, exp(r), cod, exp(t)).unwrap();
        let norm = |v: &[f64], p: f64| v.iter().map(|a: &f64| a.abs().powf(p)).sum::<f64>().powf(1.0 / p);
        let rc = exp(r).conjugate();
        let oracle = norm(&x, t) * if rc.is_infinite() { 1.0 } else { norm(&lambda, rc.as_f64()) };
        let got = op_norm(&op, &cfg);
        assert!(got.lower_bound <= oracle * (1.0 + 1e-9) && oracle <= got.upper_bound * (1.0 + 1e-9), "({r},{t}): {got:?} vs {oracle}");
        assert!(close(got.value, oracle, 1e-8), "({r},{t}): {} vs {oracle}", got.value);
    }
}

#[test]
fn multi_bounded_norms_of_scaled_identities() {
    let cfg = SolverConfig::default();
    let two = Exponent::TWO;
    let space = Arc::new(DiscreteSpace::uniform(2).unwrap());
    let engine = WeakEngine { ambient: two, p: two, q: two, config: cfg.clone() };
    for c in [1.0, 2.0] {
        let op = LinOp::new(vec![vec![c, 0.0], vec![0.0, c]], space.clone(), two, space.clone(), two).unwrap();
        let rep = mb_norm(&op, 5, &engine, &engine, &cfg).unwrap();
        assert!(close(rep.value.lower_bound, c, 1e-9), "{:?}", rep.value);
        assert!(rep.per_k.iter().all(|a| close(a.result.lower_bound, c, 1e-9)));
    }
}

#[test]
fn set_constant_of_two_atoms() {
    let space = Arc::new(DiscreteSpace::uniform(2).unwrap());
    let b = vec![Vector::new(space.clone(), vec![1.0, 0.0]).unwrap(), Vector::new(space, vec![0.0, 1.0]).unwrap()];
    let rep = mb_set_constant(&b, &MaxEngine, 3, 1000).unwrap();
    assert_eq!(rep.subset_value, 2.0);
    assert_eq!(rep.tuple_value, 2.0);
}

#[test]
fn free_group_spheres_follow_the_recurrence() {
    let f2 = GroupModel::free(2).unwrap();
    let mut previous = 0;
    for r in 0..=6 {
        let ball = f2.ball(r, 10_000).unwrap();
        let sphere = ball.len() - previous;
        let expected = if r == 0 { 1 } else { 4 * 3usize.pow(r as u32 - 1) };
        assert_eq!(sphere, expected);
        assert_eq!(ball.len(), 2 * 3usize.pow(r as u32) - 1);
        previous = ball.len();
    }
}

#[test]
fn product_set_in_the_free_group() {
    let f2 = GroupModel::free(2).unwrap();
    let f = vec![f2.identity(), f2.parse_element("a").unwrap()];
    let fs = f2.product_set(&f, &f2.ball(1, 100).unwrap()).unwrap();
    let expected: BTreeSet<Element> = ["e", "a", "A", "b", "B", "aa", "ab", "aB"].iter().map(|w| f2.parse_element(w).unwrap()).collect();
    assert_eq!(fs, expected);
}

#[test]
fn integer_intervals_have_ratio_n_plus_m_minus_one_over_m() {
    let z = GroupModel::lattice(1).unwrap();
    let int = |v: i64| Element::Lattice(vec![v]);
    for n in 2..=5i64 {
        let f: Vec<Element> = (0..n).map(int).collect();
        let found = folner_search(&z, &f, &FolnerFamily::Rectangles { max_side: 40 }, 1000).unwrap();
        assert_eq!(found.best.s_size, 40);
        assert_eq!(found.best.fs_size as i64, n + 39);
        let found = folner_search(&z, &f, &FolnerFamily::Balls { max_radius: 10 }, 1000).unwrap();
        assert_eq!(found.best.ratio, (n + 20) as f64 / 21.0);
    }
}

#[test]
fn invariance_constant_of_interval_means() {
    let cfg = SolverConfig::default();
    let z = GroupModel::lattice(1).unwrap();
    let int = |v: i64| Element::Lattice(vec![v]);
    for m in 1..=4i64 {
        for n in 1..=4i64 {
            let a = GroupVector::uniform(&(0..m).map(int).collect::<Vec<_>>());
            let f: Vec<Element> = (0..n).map(int).collect();
            let c = invariance_constant(&z, &a, &f, Exponent::ONE, Exponent::ONE, &cfg).unwrap();
            assert!(close(c.value, (n + m - 1) as f64 / m as f64, 1e-12), "m={m} n={n}: {}", c.value);
        }
    }
}

#[test]
fn disjoint_translates_of_a_point_mass() {
    let cfg = SolverConfig::default();
    let f2 = GroupModel::free(2).unwrap();
    let delta = GroupVector::indicator(&[f2.identity()]);
    let f = f2.ball(1, 100).unwrap();
    for q in [1.0, 2.0, 3.0] {
        let c = invariance_constant(&f2, &delta, &f, Exponent::ONE, exp(q), &cfg).unwrap();
        assert!(close(c.value, 5f64.powf(1.0 / q), 1e-12), "q={q}: {}", c.value);
    }
}

#[test]
fn compactness_bound_for_interval_mean() {
    let cfg = SolverConfig::default();
    let z = GroupModel::lattice(1).unwrap();
    let a = MeanCandidate::uniform(&(0..3).map(|v| Element::Lattice(vec![v])).collect::<Vec<_>>()).unwrap();
    for q in [1.0, 2.0] {
        for count in 1..=4 {
            let rep = compactness_obstruction(&z, &a, exp(q), count, 10_000, &cfg).unwrap();
            assert_eq!(rep.c, 1.0);
            assert!(close(rep.bound, (count as f64).powf(1.0 / q), 1e-15));
            assert!(close(rep.computed.value, rep.bound, 1e-12) && rep.holds);
        }
    }
}
