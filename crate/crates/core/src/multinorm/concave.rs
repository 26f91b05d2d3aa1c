//! Concave reformulations of the weak `(p,p)` norms.
//!
//! Writing the supremum over `beta` in the unit sphere of `l^{p'}_n` first
//! and `gamma_i = |beta_i|^{p'}`, the weak `(p,p)` norm becomes the maximum of
//! a concave function `h` over the probability simplex:
//!
//! * on `l^1(w)`: `h(gamma) = sum_k w_k (sum_i gamma_i |x_i(k)|^{p'})^{1/p'}`;
//! * on `l^2(w)` with `p = 2`: `h(gamma) = tr (sum_i gamma_i y_i y_i^T)^{1/2}`
//!   where `y_i = w^{1/2} x_i`.
//!
//! Concavity gives the certified bound
//! `max h <= h(gamma) + max_j dh/dgamma_j - <grad h, gamma>`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::config::SolverConfig;
use crate::spaces::{norming, Exponent};

pub(crate) trait SimplexProgram {
    fn dim(&self) -> usize;
    fn value(&self, gamma: &[f64]) -> f64;
    fn gradient(&self, gamma: &[f64]) -> Vec<f64>;
    /// One block-coordinate ascent step of the underlying bilinear problem.
    fn step(&self, gamma: &[f64]) -> Vec<f64>;

    fn frank_wolfe_bound(&self, gamma: &[f64]) -> f64 {
        let g = self.gradient(gamma);
        let max = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let inner: f64 = g.iter().zip(gamma).map(|(g, c)| if *c == 0.0 { 0.0 } else { g * c }).sum();
        let bound = self.value(gamma) + max - inner;
        if bound.is_nan() {
            f64::INFINITY
        } else {
            bound
        }
    }
}

pub(crate) struct SimplexSolution {
    pub gamma: Vec<f64>,
    pub upper: f64,
}

/// Block ascent to a fixed point, then multiplicative-gradient polishing
/// until the Frank-Wolfe bound closes.
pub(crate) fn maximize(program: &dyn SimplexProgram, cfg: &SolverConfig) -> SimplexSolution {
    let n = program.dim();
    let mut gamma = vec![1.0 / n as f64; n];
    let mut value = program.value(&gamma);
    for _ in 0..cfg.max_iter.max(1) * 4 {
        let next = program.step(&gamma);
        let next_value = program.value(&next);
        if !(next_value > value * (1.0 + 1e-15)) {
            break;
        }
        gamma = next;
        value = next_value;
    }
    let mut upper = bound_near(program, &gamma);
    let mut eta = 1.0;
    let mut iter = 0;
    while upper - value > 1e-12 * value.max(1e-300) && iter < cfg.max_iter * 4 {
        iter += 1;
        let g = program.gradient(&gamma);
        let scale = g.iter().cloned().filter(|v| v.is_finite()).fold(0.0, f64::max).max(1e-300);
        let mut accepted = false;
        while eta > 1e-12 {
            let mut next: Vec<f64> = gamma
                .iter()
                .zip(&g)
                .map(|(c, gi)| {
                    let gi = if gi.is_finite() { *gi } else { scale };
                    c.max(1e-300) * (eta * (gi - scale) / scale).exp()
                })
                .collect();
            let total: f64 = next.iter().sum();
            next.iter_mut().for_each(|v| *v /= total);
            let next_value = program.value(&next);
            if next_value > value {
                gamma = next;
                value = next_value;
                eta *= 1.5;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        upper = upper.min(bound_near(program, &gamma));
        if !accepted {
            break;
        }
    }
    SimplexSolution { gamma, upper: upper.max(value) }
}

/// Frank-Wolfe bounds at `gamma` and at slightly smoothed copies, which stay
/// finite when the gradient blows up on the boundary.
fn bound_near(program: &dyn SimplexProgram, gamma: &[f64]) -> f64 {
    let n = gamma.len() as f64;
    let mut best = program.frank_wolfe_bound(gamma);
    for eps in [1e-12, 1e-9, 1e-6] {
        let smoothed: Vec<f64> = gamma.iter().map(|c| (1.0 - eps) * c + eps / n).collect();
        best = best.min(program.frank_wolfe_bound(&smoothed));
    }
    best
}

/// The `(p,p)` program on `l^1(w)` for `1 < p < inf`.
pub(crate) struct L1Program<'a> {
    pub cols: &'a [Vec<f64>],
    pub w: &'a [f64],
    pub p: Exponent,
}

impl L1Program<'_> {
    fn p_dual(&self) -> f64 {
        self.p.conjugate().as_f64()
    }

    fn row_sums(&self, gamma: &[f64]) -> Vec<f64> {
        let pd = self.p_dual();
        (0..self.w.len())
            .map(|k| self.cols.iter().zip(gamma).map(|(c, g)| g * c[k].abs().powf(pd)).sum())
            .collect()
    }

    /// Row-wise optimal `lambda` for `beta_i = gamma_i^{1/p'}`.
    pub fn witness(&self, gamma: &[f64]) -> Vec<Vec<f64>> {
        let pd = self.p_dual();
        let beta: Vec<f64> = gamma.iter().map(|g| g.max(0.0).powf(1.0 / pd)).collect();
        let m = self.w.len();
        let n = self.cols.len();
        let mut lambda = vec![vec![0.0; m]; n];
        for k in 0..m {
            let u: Vec<f64> = (0..n).map(|i| beta[i] * self.cols[i][k]).collect();
            let row = norming(&u, None, self.p.conjugate());
            for i in 0..n {
                lambda[i][k] = row[i];
            }
        }
        lambda
    }
}

impl SimplexProgram for L1Program<'_> {
    fn dim(&self) -> usize {
        self.cols.len()
    }

    fn value(&self, gamma: &[f64]) -> f64 {
        let e = 1.0 / self.p_dual();
        self.row_sums(gamma).iter().zip(self.w).map(|(s, w)| w * s.powf(e)).sum()
    }

    fn gradient(&self, gamma: &[f64]) -> Vec<f64> {
        let pd = self.p_dual();
        let s = self.row_sums(gamma);
        self.cols
            .iter()
            .map(|c| {
                let mut g = 0.0;
                for k in 0..self.w.len() {
                    let ck = c[k].abs().powf(pd);
                    if ck > 0.0 {
                        g += if s[k] > 0.0 { self.w[k] * s[k].powf(1.0 / pd - 1.0) * ck / pd } else { f64::INFINITY };
                    }
                }
                g
            })
            .collect()
    }

    fn step(&self, gamma: &[f64]) -> Vec<f64> {
        let lambda = self.witness(gamma);
        let p = self.p.as_f64();
        let c: Vec<f64> = self
            .cols
            .iter()
            .zip(&lambda)
            .map(|(x, l)| x.iter().zip(l).zip(self.w).map(|((x, l), w)| w * x * l).sum::<f64>().abs().powf(p))
            .collect();
        let total: f64 = c.iter().sum();
        if total == 0.0 {
            return gamma.to_vec();
        }
        c.iter().map(|v| v / total).collect()
    }
}

/// The `(2,2)` program on `l^2(w)`; columns are pre-multiplied by `w^{1/2}`.
pub(crate) struct L2Program {
    pub y: DMatrix<f64>,
}

impl L2Program {
    pub fn new(cols: &[Vec<f64>], w: &[f64]) -> Self {
        let y = DMatrix::from_fn(w.len(), cols.len(), |k, i| w[k].sqrt() * cols[i][k]);
        L2Program { y }
    }

    fn gram(&self, gamma: &[f64]) -> SymmetricEigen<f64, nalgebra::Dyn> {
        let scaled = DMatrix::from_fn(self.y.nrows(), self.y.ncols(), |k, i| self.y[(k, i)] * gamma[i].max(0.0).sqrt());
        SymmetricEigen::new(&scaled * scaled.transpose())
    }

    /// Polar factor of `Y diag(gamma^{1/2})`, an operator of norm at most one.
    pub fn polar(&self, gamma: &[f64]) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.y.nrows(), self.y.ncols(), |k, i| self.y[(k, i)] * gamma[i].max(0.0).sqrt());
        let svd = scaled.svd(true, true);
        let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let mut polar = DMatrix::zeros(self.y.nrows(), self.y.ncols());
        for (j, s) in svd.singular_values.iter().enumerate() {
            if *s > 1e-13 * smax {
                polar += u.column(j) * vt.row(j);
            }
        }
        polar
    }

    /// `c_i = y_i^T (polar e_i)`.
    pub fn pairings(&self, polar: &DMatrix<f64>) -> Vec<f64> {
        (0..self.y.ncols()).map(|i| self.y.column(i).dot(&polar.column(i))).collect()
    }
}

impl SimplexProgram for L2Program {
    fn dim(&self) -> usize {
        self.y.ncols()
    }

    fn value(&self, gamma: &[f64]) -> f64 {
        self.gram(gamma).eigenvalues.iter().map(|v| v.max(0.0).sqrt()).sum()
    }

    fn gradient(&self, gamma: &[f64]) -> Vec<f64> {
        let eig = self.gram(gamma);
        let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let m = self.y.nrows();
        let mut inv_sqrt = DMatrix::zeros(m, m);
        let mut range = DMatrix::zeros(m, m);
        for (j, v) in eig.eigenvalues.iter().enumerate() {
            if *v > 1e-14 * top {
                let u = eig.eigenvectors.column(j);
                inv_sqrt += (u * u.transpose()) / v.sqrt();
                range += u * u.transpose();
            }
        }
        (0..self.y.ncols())
            .map(|i| {
                let y = self.y.column(i);
                // A column outside the range of the Gram matrix has unbounded slope.
                let outside = (y - &range * y).norm();
                if outside > 1e-10 * y.norm().max(1e-300) {
                    f64::INFINITY
                } else {
                    0.5 * y.dot(&(&inv_sqrt * y))
                }
            })
            .collect()
    }

    fn step(&self, gamma: &[f64]) -> Vec<f64> {
        let c = self.pairings(&self.polar(gamma));
        let total: f64 = c.iter().map(|v| v * v).sum();
        if total == 0.0 {
            return gamma.to_vec();
        }
        c.iter().map(|v| v * v / total).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_program_certificate_closes() {
        let cols = vec![vec![1.0, 0.5, 0.0], vec![0.2, 1.0, 0.7], vec![0.0, 0.3, 1.2]];
        let w = vec![1.0, 2.0, 0.5];
        let program = L1Program { cols: &cols, w: &w, p: Exponent::new(1.5).unwrap() };
        let sol = maximize(&program, &SolverConfig::default());
        let v = program.value(&sol.gamma);
        assert!(sol.upper - v < 1e-9 * v, "gap {}", sol.upper - v);
    }

    #[test]
    fn l2_program_value_is_nuclear_norm() {
        let cols = vec![vec![1.0, 0.0], vec![0.0, 2.0]];
        let program = L2Program::new(&cols, &[1.0, 1.0]);
        assert!((program.value(&[0.5, 0.5]) - (0.5f64.sqrt() + 2.0 * 0.5f64.sqrt())).abs() < 1e-12);
        let sol = maximize(&program, &SolverConfig::default());
        // max over the simplex of sqrt(g1) + 2 sqrt(g2) is sqrt(5).
        assert!((program.value(&sol.gamma) - 5f64.sqrt()).abs() < 1e-10);
        assert!(sol.upper - 5f64.sqrt() < 1e-9);
    }
}
