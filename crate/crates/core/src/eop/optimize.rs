//! Multi-start Riemannian gradient descent over ancilla unitaries and
//! factorizations.

use rayon::prelude::*;

use crate::linalg::{self, CMat, C64};
use crate::qdense::{derive_seed, haar_unitary, rng_from_seed};

use super::objective::{Layout, Problem};
use super::OptimizerConfig;

const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACK: usize = 40;
const STALL_TOL: f64 = 1e-14;
const STALL_LIMIT: usize = 8;

pub(crate) struct Run {
    /// `Σ_i S(A_i R_i)` at the end of the run.
    pub sum: f64,
    pub u: CMat,
    /// Objective (halved) after every accepted step, starting value first.
    pub trace: Vec<f64>,
}

/// Exponential map `exp(−ηG)` from a cached eigendecomposition of `iG`.
struct Direction {
    vals: Vec<f64>,
    vecs: CMat,
}

impl Direction {
    fn new(g: &CMat) -> Self {
        let ig = g.map(|z| z * linalg::I);
        let (vals, vecs) = linalg::hermitian_eigen(&ig);
        Direction { vals, vecs }
    }

    fn step(&self, eta: f64) -> CMat {
        // −ηG = iη(iG)
        linalg::spectral_apply(&self.vals, &self.vecs, |l| C64::from_polar(1.0, eta * l))
    }
}

fn frob_sq(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

fn inner_re(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

const LBFGS_MEMORY: usize = 12;

/// L-BFGS two-loop recursion on the Lie algebra, where gradients at
/// different iterates are compared directly (left-trivialized transport).
fn lbfgs_direction(g: &CMat, history: &[(CMat, CMat, f64)]) -> CMat {
    let mut q = g.clone();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * inner_re(s, &q);
        q -= y.scale(a);
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.last() {
        q *= C64::from(inner_re(s, y) / frob_sq(y));
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * inner_re(y, &q);
        q += s.scale(a - b);
    }
    q
}

/// Riemannian L-BFGS with Armijo backtracking along `U ← exp(−ηP) U`;
/// every accepted step strictly decreases the objective.
pub(crate) fn descend(
    layout: &Layout,
    psi0: &CMat,
    u0: CMat,
    cfg: &OptimizerConfig,
    floor_sum: f64,
) -> Run {
    let mut u = u0;
    let (mut f, mut g) = layout.value_and_gradient(psi0, &u);
    let mut trace = vec![0.5 * f];
    let mut history: Vec<(CMat, CMat, f64)> = Vec::new();
    let mut stall = 0;
    for _ in 0..cfg.max_iters {
        let gn2 = frob_sq(&g);
        if gn2.sqrt() < cfg.grad_tol || f <= floor_sum + 1e-12 {
            break;
        }
        let mut p = lbfgs_direction(&g, &history);
        let mut slope = inner_re(&g, &p);
        let mut eta = 1.0;
        if history.is_empty() || slope <= 1e-14 * gn2.sqrt() * frob_sq(&p).sqrt() {
            history.clear();
            p = g.clone();
            slope = gn2;
            eta = 0.5 / gn2.sqrt();
        }
        let dir = Direction::new(&p);
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACK {
            let cand = dir.step(eta) * &u;
            let fc = layout.value(psi0, &cand);
            if fc <= f - ARMIJO_C * eta * slope && fc < f {
                accepted = Some((cand, fc));
                break;
            }
            eta *= 0.5;
        }
        let Some((cand, fc)) = accepted else {
            if history.is_empty() {
                break;
            }
            history.clear();
            continue;
        };
        let decrease = f - fc;
        u = cand;
        let (f_new, g_new) = layout.value_and_gradient(psi0, &u);
        debug_assert!((f_new - fc).abs() < 1e-9);
        let s_k = p.scale(-eta);
        let y_k = &g_new - &g;
        let sy = inner_re(&s_k, &y_k);
        if sy > 1e-16 * frob_sq(&s_k).sqrt() * frob_sq(&y_k).sqrt() && sy > 0.0 {
            history.push((s_k, y_k, 1.0 / sy));
            if history.len() > LBFGS_MEMORY {
                history.remove(0);
            }
        }
        f = f_new.min(fc);
        g = g_new;
        trace.push(0.5 * f);
        if decrease < STALL_TOL {
            stall += 1;
            if stall >= STALL_LIMIT {
                break;
            }
        } else {
            stall = 0;
        }
    }
    Run { sum: f, u, trace }
}

/// Ordered factorizations of `d` into `k` positive factors.
pub(crate) fn factorizations(d: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for f in 1..=d {
        if d.is_multiple_of(f) {
            for mut rest in factorizations(d / f, k - 1) {
                rest.insert(0, f);
                out.push(rest);
            }
        }
    }
    out
}

/// Embedded ancilla dimensions: the rank itself, then powers of two in
/// `(rank, cap]`.
pub(crate) fn candidate_dims(rank: usize, cap: usize) -> Vec<usize> {
    let mut out = vec![rank];
    let mut p = 1;
    while p <= cap {
        if p > rank {
            out.push(p);
        }
        p *= 2;
    }
    out
}

pub(crate) fn is_trivial(factors: &[usize]) -> bool {
    factors.iter().filter(|&&f| f > 1).count() <= 1
}

pub(crate) struct Branch {
    pub factors: Vec<usize>,
    pub start: usize,
    pub run: Run,
}

/// Runs every (factorization, start) task and returns them in a fixed order.
pub(crate) fn run_all(problem: &Problem, cfg: &OptimizerConfig, cap: usize) -> Vec<Branch> {
    let k = problem.dims.len();
    let floor = 2.0 * problem.lower_bound();
    let mut tasks: Vec<(Vec<usize>, usize)> = Vec::new();
    for d in candidate_dims(problem.rank(), cap) {
        for f in factorizations(d, k) {
            if is_trivial(&f) {
                // the unitary acts inside one party's ancilla: no effect
                if d == problem.rank() {
                    tasks.push((f, 0));
                }
            } else {
                for s in 0..=cfg.restarts {
                    tasks.push((f.clone(), s));
                }
            }
        }
    }
    let run_task = |(factors, start): &(Vec<usize>, usize)| {
        let layout = Layout::new(problem, factors);
        let psi0 = layout.embedded_psi0(problem);
        let d = layout.embed_dim;
        let u0 = if *start == 0 {
            CMat::identity(d, d)
        } else {
            let mut key = vec![d as u64, factors.len() as u64];
            key.extend(factors.iter().map(|&f| f as u64));
            key.push(*start as u64);
            let mut rng = rng_from_seed(derive_seed(cfg.seed, &key));
            haar_unitary(d, &mut rng)
        };
        let run = if is_trivial(factors) {
            let sum = layout.value(&psi0, &u0);
            Run {
                sum,
                u: u0,
                trace: vec![0.5 * sum],
            }
        } else {
            descend(&layout, &psi0, u0, cfg, floor)
        };
        Branch {
            factors: factors.clone(),
            start: *start,
            run,
        }
    };
    tasks.par_iter().map(run_task).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_counts() {
        assert_eq!(factorizations(4, 2).len(), 3);
        assert_eq!(factorizations(16, 3).len(), 15);
        assert_eq!(factorizations(1, 3), vec![vec![1, 1, 1]]);
        assert_eq!(factorizations(6, 2).len(), 4);
    }

    #[test]
    fn candidates() {
        assert_eq!(candidate_dims(3, 4), vec![3, 4]);
        assert_eq!(candidate_dims(4, 16), vec![4, 8, 16]);
        assert_eq!(candidate_dims(2, 2), vec![2]);
    }
}
