//! The objective `Σ_i S(A_i R_i)` of a purification `Ψ = Ψ₀ Uᵀ` and its
//! Riemannian gradient on `U(D)`.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Split, C64, EIG_EPS, ZERO};
use crate::qdense::{ensure_disjoint, DensityOperator, PureState, Region};

/// A compressed purification of the reduced state on `α`: column `j` of
/// `psi0` is `√λ_j u_j` for the nonzero eigenpairs of `ρ_α`.
#[derive(Clone, Debug)]
pub struct Problem {
    pub alpha: Vec<Region>,
    /// Local dimension of each `A_i`.
    pub dims: Vec<usize>,
    /// `dim(α) × r`.
    pub psi0: CMat,
    pub marginal_entropies: Vec<f64>,
    /// `S(α) = S(Ā_{n+1})`.
    pub joint_entropy: f64,
}

impl Problem {
    pub fn rank(&self) -> usize {
        self.psi0.ncols()
    }

    pub fn alpha_dim(&self) -> usize {
        self.psi0.nrows()
    }

    pub fn from_pure(psi: &PureState, alpha: &[Region]) -> Result<Self> {
        check_alpha(alpha)?;
        let spec = psi.spec();
        let mut keep = Vec::new();
        let mut dims = Vec::new();
        for r in alpha {
            let idx = spec.indices(r)?;
            dims.push(idx.iter().map(|&i| spec.parties()[i].dim).product());
            keep.extend(idx);
        }
        let split = Split::new(&spec.dims(), &keep);
        let m = split.to_matrix(psi.amplitudes().as_slice());
        let psi0 = compress(&m);
        Self::finish(alpha, dims, psi0)
    }

    /// Purifies `rho` through its eigendecomposition; parties of `rho`
    /// outside `α` are traced out.
    pub fn from_density(rho: &DensityOperator, alpha: &[Region]) -> Result<Self> {
        check_alpha(alpha)?;
        let spec = rho.spec();
        let mut order = Vec::new();
        let mut dims = Vec::new();
        for r in alpha {
            let idx = spec.indices(r)?;
            dims.push(idx.iter().map(|&i| spec.parties()[i].dim).product());
            order.extend(idx);
        }
        let union = alpha.iter().fold(Region::empty(), |acc, r| acc.union(r));
        let reduced = rho.partial_trace(&union)?;
        // partial_trace keeps spec order; reorder factors into α order
        let rspec = reduced.spec();
        let mut sorted = order.clone();
        sorted.sort_unstable();
        let perm: Vec<usize> = order
            .iter()
            .map(|o| sorted.iter().position(|s| s == o).unwrap())
            .collect();
        let m = linalg::permute_operator(reduced.matrix(), &rspec.dims(), &perm);
        let (vals, vecs) = linalg::hermitian_eigen(&m);
        let r = vals.iter().filter(|&&x| x > EIG_EPS).count().max(1);
        let psi0 = CMat::from_fn(m.nrows(), r, |a, j| vecs[(a, j)] * vals[j].max(0.0).sqrt());
        Self::finish(alpha, dims, psi0)
    }

    fn finish(alpha: &[Region], dims: Vec<usize>, psi0: CMat) -> Result<Self> {
        let k = dims.len();
        let mut marginal_entropies = Vec::with_capacity(k);
        for i in 0..k {
            let split = Split::new(&[dims.clone(), vec![psi0.ncols()]].concat(), &[i]);
            marginal_entropies.push(split_entropy(&split, &flatten(&psi0)));
        }
        let rho = &psi0 * psi0.adjoint();
        let joint_entropy = linalg::entropy_of_spectrum(&linalg::hermitian_eigenvalues(&rho));
        Ok(Problem {
            alpha: alpha.to_vec(),
            dims,
            psi0,
            marginal_entropies,
            joint_entropy,
        })
    }

    /// `½(Σ S(A_i) − S(Ā_{n+1}))`.
    pub fn lower_bound(&self) -> f64 {
        0.5 * (self.marginal_entropies.iter().sum::<f64>() - self.joint_entropy)
    }

    /// `½ min_i [S(A_i Ā_{n+1}) + Σ_{j≠i} S(A_j)]`: the whole purifier given
    /// to one party.
    pub fn trivial_upper_bound(&self) -> f64 {
        let total: f64 = self.marginal_entropies.iter().sum();
        let mut best = f64::INFINITY;
        for i in 0..self.dims.len() {
            // S(A_i P) = S(α \ A_i) for the pure state on α ∪ P
            let rest: Vec<usize> = (0..self.dims.len()).filter(|&j| j != i).collect();
            let s_rest = if rest.is_empty() {
                0.0
            } else {
                let split = Split::new(&[self.dims.clone(), vec![self.rank()]].concat(), &rest);
                split_entropy(&split, &flatten(&self.psi0))
            };
            best = best.min(s_rest + total - self.marginal_entropies[i]);
        }
        0.5 * best
    }
}

fn check_alpha(alpha: &[Region]) -> Result<()> {
    if alpha.len() < 2 {
        return Err(Error::Partition("α needs at least two regions".into()));
    }
    let refs: Vec<&Region> = alpha.iter().collect();
    ensure_disjoint(&refs)
}

/// Columns `√λ_j u_j` of the nonzero part of `m m†`.
fn compress(m: &CMat) -> CMat {
    let (rows, cols) = m.shape();
    if rows <= cols {
        let (vals, vecs) = linalg::hermitian_eigen(&(m * m.adjoint()));
        let r = vals.iter().filter(|&&x| x > EIG_EPS).count().max(1);
        CMat::from_fn(rows, r, |a, j| vecs[(a, j)] * vals[j].max(0.0).sqrt())
    } else {
        let (vals, vecs) = linalg::hermitian_eigen(&(m.adjoint() * m));
        let r = vals.iter().filter(|&&x| x > EIG_EPS).count().max(1);
        m * vecs.columns(0, r)
    }
}

/// Row-major flattening of a matrix (row index most significant).
pub(crate) fn flatten(m: &CMat) -> Vec<C64> {
    let (rows, cols) = m.shape();
    let mut out = Vec::with_capacity(rows * cols);
    for a in 0..rows {
        for c in 0..cols {
            out.push(m[(a, c)]);
        }
    }
    out
}

fn split_entropy(split: &Split, flat: &[C64]) -> f64 {
    crate::qdense::pure_split_entropy(split, flat)
}

/// A fixed ancilla factorization together with the index maps needed to
/// evaluate the objective.
#[derive(Clone, Debug)]
pub struct Layout {
    pub factors: Vec<usize>,
    pub embed_dim: usize,
    splits: Vec<Split>,
}

impl Layout {
    pub fn new(problem: &Problem, factors: &[usize]) -> Self {
        let k = problem.dims.len();
        let mut all = problem.dims.clone();
        all.extend_from_slice(factors);
        let splits = (0..k).map(|i| Split::new(&all, &[i, k + i])).collect();
        Layout {
            factors: factors.to_vec(),
            embed_dim: factors.iter().product(),
            splits,
        }
    }

    /// `Ψ₀` padded with zero columns to the embedded dimension.
    pub fn embedded_psi0(&self, problem: &Problem) -> CMat {
        let mut out = CMat::zeros(problem.alpha_dim(), self.embed_dim);
        out.columns_mut(0, problem.rank()).copy_from(&problem.psi0);
        out
    }

    /// Per-party entropies `S(A_i R_i)` of `Ψ` (row-major flat vector).
    pub fn entropies(&self, flat: &[C64]) -> Vec<f64> {
        self.splits.iter().map(|s| split_entropy(s, flat)).collect()
    }

    /// `Σ_i S(A_i R_i)` and `Φ = Σ_i (log ρ_i ⊗ I) Ψ`.
    fn value_and_phi(&self, flat: &[C64]) -> (f64, Vec<C64>) {
        let mut total = 0.0;
        let mut phi = vec![ZERO; flat.len()];
        let mut buf = vec![ZERO; flat.len()];
        for split in &self.splits {
            let m = split.to_matrix(flat);
            let lm = if split.keep_dim <= split.rest_dim {
                let (vals, vecs) = linalg::hermitian_eigen(&(&m * m.adjoint()));
                total += linalg::entropy_of_spectrum(&vals);
                let log = linalg::spectral_apply(&vals, &vecs, |x| linalg::c(x.max(EIG_EPS).ln(), 0.0));
                log * &m
            } else {
                let (vals, vecs) = linalg::hermitian_eigen(&(m.adjoint() * &m));
                total += linalg::entropy_of_spectrum(&vals);
                let log = linalg::spectral_apply(&vals, &vecs, |x| linalg::c(x.max(EIG_EPS).ln(), 0.0));
                &m * log
            };
            split.from_matrix(&lm, &mut buf);
            for (p, b) in phi.iter_mut().zip(&buf) {
                *p += b;
            }
        }
        (total, phi)
    }

    pub fn value(&self, psi0: &CMat, u: &CMat) -> f64 {
        let psi = psi0 * u.transpose();
        self.entropies(&flatten(&psi)).iter().sum()
    }

    /// Objective and Riemannian gradient `G` (anti-Hermitian): the first-order
    /// change under `U ← exp(X) U` is `Re⟨X, G⟩`.
    pub fn value_and_gradient(&self, psi0: &CMat, u: &CMat) -> (f64, CMat) {
        let psi = psi0 * u.transpose();
        let flat = flatten(&psi);
        let (value, phi) = self.value_and_phi(&flat);
        let d = self.embed_dim;
        let phim = CMat::from_fn(psi.nrows(), d, |a, c| phi[a * d + c]);
        // df = −2 Re Σ conj(X) ∘ W with W = Φᵀ Ψ̄
        let w = phim.transpose() * psi.conjugate();
        let b = w.scale(-2.0);
        let g = (&b - b.adjoint()).scale(0.5);
        (value, g)
    }
}

/// Anti-Hermitian matrix from `D²` real parameters: `iθ_j` on the diagonal,
/// then for each `a < b` the pair `(θ_re, θ_im)` with
/// `X[a,b] = θ_re + iθ_im`, `X[b,a] = −θ_re + iθ_im`.
pub fn antihermitian_from_params(theta: &[f64], d: usize) -> CMat {
    let mut x = CMat::zeros(d, d);
    for j in 0..d {
        x[(j, j)] = linalg::c(0.0, theta[j]);
    }
    let mut p = d;
    for a in 0..d {
        for b in a + 1..d {
            let (re, im) = (theta[p], theta[p + 1]);
            x[(a, b)] = linalg::c(re, im);
            x[(b, a)] = linalg::c(-re, im);
            p += 2;
        }
    }
    x
}

pub fn params_from_antihermitian(x: &CMat) -> Vec<f64> {
    let d = x.nrows();
    let mut theta = Vec::with_capacity(d * d);
    for j in 0..d {
        theta.push(x[(j, j)].im);
    }
    for a in 0..d {
        for b in a + 1..d {
            theta.push(0.5 * (x[(a, b)].re - x[(b, a)].re));
            theta.push(0.5 * (x[(a, b)].im + x[(b, a)].im));
        }
    }
    theta
}

/// `∂f/∂θ` at `θ = 0` for `U(θ) = exp(X(θ)) U₀`, from the Riemannian
/// gradient `G`: `∂f/∂θ_p = Re⟨∂X/∂θ_p, G⟩`.
pub fn param_gradient(g: &CMat) -> Vec<f64> {
    let d = g.nrows();
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        // ∂X = i e_jj
        out.push(g[(j, j)].im);
    }
    for a in 0..d {
        for b in a + 1..d {
            // re: X[a,b] = 1, X[b,a] = −1; im: X[a,b] = X[b,a] = i
            out.push(g[(a, b)].re - g[(b, a)].re);
            out.push(g[(a, b)].im + g[(b, a)].im);
        }
    }
    out
}
