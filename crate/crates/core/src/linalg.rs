//! Dense complex linear algebra shared by every module.
//!
//! All matrix functions (square roots, logarithms, fractional powers,
//! exponentials of anti-Hermitian generators) go through a Hermitian
//! eigendecomposition. Spectra are sorted in descending order so that
//! downstream code sees a stable basis.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Eigenvalues at or below this are treated as zero before logs and inverse
/// powers.
pub const EIG_EPS: f64 = 1e-12;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Eigendecomposition of `(m + m†)/2`, eigenvalues descending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    if n == 1 {
        return (vec![m[(0, 0)].re], CMat::from_element(1, 1, ONE));
    }
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// `V diag(f(λ)) V†` for a Hermitian eigendecomposition.
pub fn spectral_apply(values: &[f64], vectors: &CMat, f: impl Fn(f64) -> C64) -> CMat {
    let n = values.len();
    let mut scaled = vectors.clone();
    for (j, &lam) in values.iter().enumerate() {
        let fj = f(lam);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    scaled * vectors.adjoint()
}

pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> C64) -> CMat {
    let (values, vectors) = hermitian_eigen(m);
    spectral_apply(&values, &vectors, f)
}

pub fn sqrt_psd(m: &CMat) -> CMat {
    hermitian_fn(m, |x| c(x.max(0.0).sqrt(), 0.0))
}

/// `m^(a + i b)` restricted to the support of `m` (zero on the kernel).
pub fn complex_power_on_support(m: &CMat, a: f64, b: f64) -> CMat {
    hermitian_fn(m, |x| {
        if x > EIG_EPS {
            let l = x.ln();
            C64::from_polar((a * l).exp(), b * l)
        } else {
            ZERO
        }
    })
}

/// Matrix log with eigenvalues clipped at [`EIG_EPS`].
pub fn log_clipped(m: &CMat) -> CMat {
    hermitian_fn(m, |x| c(x.max(EIG_EPS).ln(), 0.0))
}

/// `-Σ λ ln λ` over eigenvalues above [`EIG_EPS`].
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let s: f64 = values
        .iter()
        .filter(|&&x| x > EIG_EPS)
        .map(|&x| -x * x.ln())
        .sum();
    s.max(0.0)
}

pub fn shannon_entropy(p: &[f64]) -> f64 {
    entropy_of_spectrum(p)
}

/// Largest entry-wise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(m: &CMat) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

pub fn outer(v: &CVec) -> CMat {
    v * v.adjoint()
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    a.kronecker(b)
}

/// `exp(X)` for an anti-Hermitian `X`, computed from the eigendecomposition
/// of the Hermitian matrix `iX`.
pub fn expm_antihermitian(x: &CMat) -> CMat {
    let h = x.scale(1.0).map(|z| z * I);
    let (values, vectors) = hermitian_eigen(&h);
    // exp(X) = exp(-i (iX))
    spectral_apply(&values, &vectors, |lam| C64::from_polar(1.0, -lam))
}

/// Principal logarithm of a unitary matrix, returned as an anti-Hermitian
/// matrix. Common eigenvectors are obtained from a generic real combination
/// of the commuting Hermitian parts of `u`.
pub fn logm_unitary(u: &CMat) -> CMat {
    let n = u.nrows();
    let herm = (u + u.adjoint()).scale(0.5);
    let anti = (u - u.adjoint()).map(|z| z * c(0.0, -0.5));
    let mix = herm + anti.scale(std::f64::consts::FRAC_1_SQRT_2 * 1.618_033_988_749_895);
    let (_, vectors) = hermitian_eigen(&mix);
    let diag = vectors.adjoint() * u * &vectors;
    let mut phases = CMat::zeros(n, n);
    for j in 0..n {
        let z = diag[(j, j)];
        phases[(j, j)] = c(0.0, z.arg());
    }
    &vectors * phases * vectors.adjoint()
}

/// Row-major multi-index helper: mixed-radix digits of `index` for `dims`.
pub fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (k, &d) in dims.iter().enumerate().rev() {
        out[k] = index % d;
        index /= d;
    }
}

/// A bipartition of tensor factors into a kept subset and the rest.
///
/// Full-space indices are row-major over `dims` (factor 0 most significant).
/// The kept index is row-major over the kept factors in the order given; the
/// rest index is row-major over the remaining factors in ascending order.
#[derive(Clone, Debug)]
pub struct Split {
    pub keep_dim: usize,
    pub rest_dim: usize,
    /// `full_of[k * rest_dim + r]` is the full index of `(k, r)`.
    full_of: Vec<usize>,
}

impl Split {
    pub fn new(dims: &[usize], keep: &[usize]) -> Self {
        let rest: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
        let keep_dim: usize = keep.iter().map(|&i| dims[i]).product();
        let rest_dim: usize = rest.iter().map(|&i| dims[i]).product();
        let total: usize = dims.iter().product();
        let mut full_of = vec![0usize; total];
        let mut dig = vec![0usize; dims.len()];
        for full in 0..total {
            digits(full, dims, &mut dig);
            let k = keep.iter().fold(0, |acc, &i| acc * dims[i] + dig[i]);
            let r = rest.iter().fold(0, |acc, &i| acc * dims[i] + dig[i]);
            full_of[k * rest_dim + r] = full;
        }
        Split {
            keep_dim,
            rest_dim,
            full_of,
        }
    }

    #[inline]
    pub fn full_index(&self, k: usize, r: usize) -> usize {
        self.full_of[k * self.rest_dim + r]
    }

    /// Reshape a state vector into a `keep_dim × rest_dim` matrix.
    pub fn to_matrix(&self, v: &[C64]) -> CMat {
        CMat::from_fn(self.keep_dim, self.rest_dim, |k, r| v[self.full_index(k, r)])
    }

    /// Inverse of [`Split::to_matrix`].
    pub fn from_matrix(&self, m: &CMat, out: &mut [C64]) {
        for k in 0..self.keep_dim {
            for r in 0..self.rest_dim {
                out[self.full_index(k, r)] = m[(k, r)];
            }
        }
    }

    /// Reduced density matrix of a pure state on the kept factors.
    pub fn reduce_pure(&self, v: &[C64]) -> CMat {
        let m = self.to_matrix(v);
        &m * m.adjoint()
    }

    /// Partial trace of an operator over the rest factors.
    pub fn trace_out(&self, rho: &CMat) -> CMat {
        let mut out = CMat::zeros(self.keep_dim, self.keep_dim);
        for k in 0..self.keep_dim {
            for kp in 0..self.keep_dim {
                let mut acc = ZERO;
                for r in 0..self.rest_dim {
                    acc += rho[(self.full_index(k, r), self.full_index(kp, r))];
                }
                out[(k, kp)] = acc;
            }
        }
        out
    }

    /// `op ⊗ I_rest` written in the full-space ordering.
    pub fn embed(&self, op: &CMat) -> CMat {
        let n = self.keep_dim * self.rest_dim;
        let mut out = CMat::zeros(n, n);
        for r in 0..self.rest_dim {
            for k in 0..self.keep_dim {
                for kp in 0..self.keep_dim {
                    out[(self.full_index(k, r), self.full_index(kp, r))] = op[(k, kp)];
                }
            }
        }
        out
    }

    /// Apply `op ⊗ I_rest` to a state vector.
    pub fn apply(&self, op: &CMat, v: &[C64]) -> Vec<C64> {
        let m = self.to_matrix(v);
        let applied = op * m;
        let mut out = vec![ZERO; v.len()];
        self.from_matrix(&applied, &mut out);
        out
    }
}

/// Reorder the tensor factors of a vector: output factor `j` is input factor
/// `perm[j]`.
pub fn permute_factors(v: &[C64], dims: &[usize], perm: &[usize]) -> Vec<C64> {
    let split = Split::new(dims, perm);
    debug_assert_eq!(split.rest_dim, 1);
    (0..v.len()).map(|k| v[split.full_index(k, 0)]).collect()
}

/// Same as [`permute_factors`] for an operator.
pub fn permute_operator(m: &CMat, dims: &[usize], perm: &[usize]) -> CMat {
    let split = Split::new(dims, perm);
    let n = m.nrows();
    CMat::from_fn(n, n, |i, j| m[(split.full_index(i, 0), split.full_index(j, 0))])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> CMat {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = CMat::from_fn(n, n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        (&a + a.adjoint()).scale(0.5)
    }

    #[test]
    fn eigen_reconstructs_and_sorts() {
        let h = random_hermitian(7, 3);
        let (vals, vecs) = hermitian_eigen(&h);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let back = spectral_apply(&vals, &vecs, |x| c(x, 0.0));
        assert!(max_abs(&(back - h)) < 1e-12);
    }

    #[test]
    fn exp_and_log_of_unitary_round_trip() {
        let h = random_hermitian(5, 9);
        let x = h.map(|z| z * I);
        let u = expm_antihermitian(&x);
        let eye = CMat::identity(5, 5);
        assert!(max_abs(&(u.adjoint() * &u - eye)) < 1e-12);
        let back = expm_antihermitian(&logm_unitary(&u));
        assert!(max_abs(&(back - u)) < 1e-10);
    }

    #[test]
    fn split_partial_trace_matches_reduce_pure() {
        let dims = [2, 3, 2];
        let v: Vec<C64> = (0..12).map(|i| c(i as f64 * 0.1, 1.0 - i as f64 * 0.05)).collect();
        let cv = CVec::from_vec(v.clone());
        let rho = outer(&cv);
        let split = Split::new(&dims, &[2, 0]);
        let a = split.trace_out(&rho);
        let b = split.reduce_pure(&v);
        assert!(max_abs(&(a - b)) < 1e-12);
    }

    #[test]
    fn permutation_of_product_vector() {
        let a = CVec::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0)]);
        let b = CVec::from_vec(vec![c(3.0, 0.0), c(4.0, 0.0), c(5.0, 0.0)]);
        let ab = kron_vec(&a, &b);
        let ba = permute_factors(ab.as_slice(), &[2, 3], &[1, 0]);
        let expect = kron_vec(&b, &a);
        for (x, y) in ba.iter().zip(expect.iter()) {
            assert!((x - y).norm() < 1e-14);
        }
    }
}
