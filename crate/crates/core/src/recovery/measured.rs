//! Lower bounds on the measured relative entropy
//! `D_M(ρ‖σ) = sup_M D(M(ρ) ‖ M(σ))` from explicit projective measurements.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, EIG_EPS};
use crate::qdense::{complex_normal, rng_from_seed, DensityOperator};

const LOCAL_SEARCH_STEPS: usize = 200;
const LOCAL_SEARCH_SEED: u64 = 0x4d65_6173;

/// Classical relative entropy of the outcome distributions of the
/// measurement in the columns of `basis`.
pub fn basis_relative_entropy(rho: &CMat, sigma: &CMat, basis: &CMat) -> f64 {
    let mut d = 0.0;
    for k in 0..basis.ncols() {
        let v = basis.column(k);
        let p = (v.adjoint() * rho * v)[(0, 0)].re.max(0.0);
        let q = (v.adjoint() * sigma * v)[(0, 0)].re.max(0.0);
        if p <= EIG_EPS {
            continue;
        }
        if q <= EIG_EPS * 1e-2 {
            return f64::INFINITY;
        }
        d += p * (p / q).ln();
    }
    d.max(0.0)
}

/// Eigenbasis of `σ^{-1/2} (σ^{1/2} ρ σ^{1/2})^{1/2} σ^{-1/2}`; its
/// outcome distributions reach the quantum fidelity.
fn fidelity_basis(rho: &CMat, sigma: &CMat) -> CMat {
    let s_half = linalg::complex_power_on_support(sigma, 0.5, 0.0);
    let s_minus = linalg::complex_power_on_support(sigma, -0.5, 0.0);
    let mid = linalg::sqrt_psd(&(&s_half * rho * &s_half));
    linalg::hermitian_eigen(&(&s_minus * mid * &s_minus)).1
}

/// Certified lower bound on `D_M(ρ‖σ)`: the best of several measurement
/// bases (eigenbases of σ, ρ and a mixture, the fidelity-achieving basis),
/// refined by a seeded local search over basis rotations.
pub fn measured_relent_lb(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.spec().dims() != sigma.spec().dims() {
        return Err(Error::dim("ρ and σ live on different spaces"));
    }
    Ok(measured_lb_matrices(rho.matrix(), sigma.matrix()))
}

pub(crate) fn measured_lb_matrices(rho: &CMat, sigma: &CMat) -> f64 {
    let mix = rho + sigma.scale(0.618_033_988_749_895);
    let candidates = [
        linalg::hermitian_eigen(sigma).1,
        linalg::hermitian_eigen(rho).1,
        linalg::hermitian_eigen(&mix).1,
        fidelity_basis(rho, sigma),
    ];
    let mut best_basis = candidates[0].clone();
    let mut best = f64::NEG_INFINITY;
    for b in candidates {
        let v = basis_relative_entropy(rho, sigma, &b);
        if v > best {
            best = v;
            best_basis = b;
        }
    }
    if best.is_infinite() {
        return best;
    }
    let d = rho.nrows();
    let mut rng = rng_from_seed(LOCAL_SEARCH_SEED);
    let mut scale = 0.1;
    for _ in 0..LOCAL_SEARCH_STEPS {
        let a = CMat::from_fn(d, d, |_, _| complex_normal(&mut rng));
        let h = (&a + a.adjoint()).scale(0.5 * scale);
        let rot = linalg::expm_antihermitian(&h.map(|z| z * linalg::I));
        let cand = rot * &best_basis;
        let v = basis_relative_entropy(rho, sigma, &cand);
        if v > best {
            best = v;
            best_basis = cand;
            if v.is_infinite() {
                break;
            }
        } else {
            scale *= 0.97;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qdense::{haar_random_pure, relative_entropy, PartySpec, Region};

    #[test]
    fn classical_case_is_exact() {
        let spec = PartySpec::uniform(1, 3).unwrap();
        let diag = |v: [f64; 3]| {
            CMat::from_diagonal(&crate::linalg::CVec::from_iterator(3, v.iter().map(|&x| linalg::c(x, 0.0))))
        };
        let rho = DensityOperator::new(spec.clone(), diag([0.5, 0.3, 0.2])).unwrap();
        let sigma = DensityOperator::new(spec, diag([0.2, 0.2, 0.6])).unwrap();
        let lb = measured_relent_lb(&rho, &sigma).unwrap();
        let d = relative_entropy(&rho, &sigma).unwrap();
        assert!((lb - d).abs() < 1e-12);
        assert!(measured_relent_lb(&rho, &rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sandwiched_between_fidelity_and_relative_entropy() {
        for seed in 0..20 {
            let spec = PartySpec::uniform(3, 2).unwrap();
            let rho = haar_random_pure(&spec, seed).reduced(&Region::parse("A,B")).unwrap();
            let sigma = haar_random_pure(&spec, 500 + seed).reduced(&Region::parse("A,B")).unwrap();
            let lb = measured_relent_lb(&rho, &sigma).unwrap();
            let d = relative_entropy(&rho, &sigma).unwrap();
            let f = crate::qdense::fidelity(&rho, &sigma).unwrap();
            assert!(lb <= d + 1e-8);
            assert!(lb >= -2.0 * f.ln() - 1e-8);
        }
    }
}
