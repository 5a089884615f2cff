use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, Split, C64, ZERO};
use crate::qdense::{complex_normal, rng_from_seed, PureState};

/// Singular values below this are treated as absent from the spectrum.
const SCHMIDT_CUTOFF: f64 = 1e-10;
/// Relative spacing below which Schmidt coefficients form one block.
const DEGENERACY_TOL: f64 = 1e-7;
const RECONSTRUCTION_TOL: f64 = 1e-8;
const TIEBREAK_SEED: u64 = 0x6773_6421;
const TIEBREAK_ATTEMPTS: usize = 4;

/// `|ψ⟩ = Σ_l √p_l ⊗_i |ψ^l_i⟩` with per-party orthonormal vectors.
#[derive(Clone, Debug)]
pub struct GsdForm {
    pub spectrum: Vec<f64>,
    /// Per party, the local vectors as matrix columns in spectrum order.
    pub local_bases: Vec<CMat>,
}

impl GsdForm {
    pub fn reconstruct(&self) -> CVec {
        let m = self.spectrum.len();
        let total: usize = self.local_bases.iter().map(|b| b.nrows()).product();
        let mut v = CVec::zeros(total);
        for l in 0..m {
            let mut term = CVec::from_element(1, linalg::c(self.spectrum[l].sqrt(), 0.0));
            for b in &self.local_bases {
                term = linalg::kron_vec(&term, &b.column(l).into_owned());
            }
            v += term;
        }
        v
    }

    pub fn entropy(&self) -> f64 {
        linalg::shannon_entropy(&self.spectrum)
    }
}

/// Result of [`gsd_detect`]. A form is absent either because none exists
/// or because a degenerate block could not be resolved.
#[derive(Clone, Debug)]
pub struct GsdDetection {
    pub form: Option<GsdForm>,
    pub degenerate_ambiguous: bool,
}

fn max_abs_vec(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Splits `v` on `dims` into unit factors and a phase, if it is a product.
fn product_factors(v: &CVec, dims: &[usize]) -> Option<(C64, Vec<CVec>)> {
    let mut factors = Vec::with_capacity(dims.len());
    let mut prod = CVec::from_element(1, linalg::ONE);
    for j in 0..dims.len() {
        let rho = Split::new(dims, &[j]).reduce_pure(v.as_slice());
        let (_, vecs) = linalg::hermitian_eigen(&rho);
        let f = vecs.column(0).into_owned();
        prod = linalg::kron_vec(&prod, &f);
        factors.push(f);
    }
    let c = prod.dotc(v);
    if (1.0 - c.norm()).abs() > RECONSTRUCTION_TOL {
        return None;
    }
    Some((c, factors))
}

fn random_hermitian(d: usize, rng: &mut crate::qdense::SeededRng) -> CMat {
    let a = CMat::from_fn(d, d, |_, _| complex_normal(rng));
    (&a + a.adjoint()).scale(0.5)
}

/// Rotates a degenerate block of rest-vectors `xi` (with partner vectors
/// `u` on the first party) into the basis where a random Hermitian on the
/// second party is diagonal. For a true GSD the compression of `H ⊗ I` to
/// the block's span is diagonal in the product basis with generically
/// distinct entries, so its eigenvectors recover that basis.
fn resolve_block(u: &CMat, xi: &CMat, rest_dims: &[usize], rng: &mut crate::qdense::SeededRng) -> Option<(CMat, CMat)> {
    let m = xi.ncols();
    let split = Split::new(rest_dims, &[0]);
    for _ in 0..TIEBREAK_ATTEMPTS {
        let h = split.embed(&random_hermitian(rest_dims[0], rng));
        let k = xi.adjoint() * h * xi;
        let (vals, w) = linalg::hermitian_eigen(&((&k + k.adjoint()).scale(0.5)));
        let spacing = vals.windows(2).map(|p| (p[0] - p[1]).abs()).fold(f64::INFINITY, f64::min);
        if m > 1 && spacing < 1e-6 {
            continue;
        }
        return Some((u * w.map(|z| z.conj()), xi * w));
    }
    None
}

/// Detects a generalized Schmidt decomposition by Schmidt-decomposing
/// across the first party and testing the rest-vectors for product form
/// and per-party orthogonality.
pub fn gsd_detect(psi: &PureState) -> GsdDetection {
    let absent = |ambiguous| GsdDetection {
        form: None,
        degenerate_ambiguous: ambiguous,
    };
    let dims = psi.spec().dims();
    let d1 = dims[0];
    let rest_dims: Vec<usize> = if dims.len() > 1 { dims[1..].to_vec() } else { vec![1] };
    let rest: usize = rest_dims.iter().product();
    let v = psi.amplitudes();
    let m = CMat::from_fn(d1, rest, |a, r| v[a * rest + r]);
    let (vals, vecs) = linalg::hermitian_eigen(&(&m * m.adjoint()));
    let kept: Vec<usize> = (0..d1).filter(|&l| vals[l].max(0.0).sqrt() > SCHMIDT_CUTOFF).collect();
    let s: Vec<f64> = kept.iter().map(|&l| vals[l].sqrt()).collect();
    let u = CMat::from_fn(d1, kept.len(), |a, j| vecs[(a, kept[j])]);
    let xi = CMat::from_fn(rest, kept.len(), |r, j| {
        let mut acc = ZERO;
        for a in 0..d1 {
            acc += u[(a, j)].conj() * m[(a, r)];
        }
        acc / s[j]
    });

    // group equal Schmidt coefficients; each block may need a rotation
    let mut u_fixed = u.clone();
    let mut xi_fixed = xi.clone();
    let mut degenerate = false;
    if rest_dims.len() > 1 {
        let mut rng = rng_from_seed(TIEBREAK_SEED);
        let mut start = 0;
        while start < s.len() {
            let mut end = start + 1;
            while end < s.len() && (s[start] - s[end]).abs() <= DEGENERACY_TOL * s[start] {
                end += 1;
            }
            if end - start > 1 {
                degenerate = true;
                let ub = u.columns(start, end - start).into_owned();
                let xb = xi.columns(start, end - start).into_owned();
                match resolve_block(&ub, &xb, &rest_dims, &mut rng) {
                    Some((un, xn)) => {
                        u_fixed.columns_mut(start, end - start).copy_from(&un);
                        xi_fixed.columns_mut(start, end - start).copy_from(&xn);
                    }
                    None => return absent(true),
                }
            }
            start = end;
        }
    }

    let k = s.len();
    let mut bases: Vec<CMat> = std::iter::once(CMat::zeros(d1, k))
        .chain(rest_dims.iter().map(|&d| CMat::zeros(d, k)))
        .collect();
    for l in 0..k {
        let x = xi_fixed.column(l).into_owned();
        let (phase, factors) = if rest_dims.len() > 1 {
            match product_factors(&x, &rest_dims) {
                Some(pf) => pf,
                None => return absent(degenerate),
            }
        } else {
            (linalg::ONE, vec![x])
        };
        bases[0].set_column(l, &(u_fixed.column(l) * phase));
        for (j, f) in factors.iter().enumerate() {
            bases[j + 1].set_column(l, f);
        }
    }
    if dims.len() == 1 {
        bases.truncate(1);
    }
    for b in &bases {
        let gram = b.adjoint() * b;
        if linalg::max_abs(&(gram - CMat::identity(k, k))) > RECONSTRUCTION_TOL {
            return absent(degenerate);
        }
    }
    let form = GsdForm {
        spectrum: s.iter().map(|x| x * x).collect(),
        local_bases: bases,
    };
    let total: f64 = form.spectrum.iter().sum();
    let form = GsdForm {
        spectrum: form.spectrum.iter().map(|p| p / total).collect(),
        local_bases: form.local_bases,
    };
    let rec = form.reconstruct();
    let phase = rec.dotc(v);
    let phase = if phase.norm() > 0.0 { phase / phase.norm() } else { linalg::ONE };
    if max_abs_vec(&(rec * phase - v)) > RECONSTRUCTION_TOL {
        return absent(degenerate);
    }
    GsdDetection {
        form: Some(form),
        degenerate_ambiguous: false,
    }
}

/// Closed-form values for a GSD state with `n` parties in `α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GsdValues {
    /// `(n/2) H(p)`.
    pub eop: f64,
    /// `H(p)/2`, also equal to `g(A_i, A_j)` for every pair.
    pub gap: f64,
    /// `g(A_i : A_j) = H(p)` in the bipartite convention.
    pub pairwise_gap: f64,
}

pub fn gsd_values(form: &GsdForm, n_parties_in_alpha: usize) -> Result<GsdValues> {
    if form.spectrum.is_empty() {
        return Err(Error::Domain("empty GSD spectrum".into()));
    }
    if n_parties_in_alpha == 0 {
        return Err(Error::Config("α needs at least one party".into()));
    }
    let h = form.entropy();
    Ok(GsdValues {
        eop: 0.5 * n_parties_in_alpha as f64 * h,
        gap: 0.5 * h,
        pairwise_gap: h,
    })
}
