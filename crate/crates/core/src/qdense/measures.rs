//! Entropic functionals, fidelity and negativity. All values in nats.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Split, EIG_EPS};

use super::party::{ensure_disjoint, Region};
use super::state::{DensityOperator, PureState};

/// Anything with well-defined region entropies.
pub trait Entropies {
    fn region_entropy(&self, region: &Region) -> Result<f64>;
}

impl Entropies for DensityOperator {
    fn region_entropy(&self, region: &Region) -> Result<f64> {
        self.entropy_of(region)
    }
}

impl Entropies for PureState {
    fn region_entropy(&self, region: &Region) -> Result<f64> {
        self.entropy_of(region)
    }
}

pub fn entropy(state: &DensityOperator) -> f64 {
    linalg::entropy_of_spectrum(&state.eigenvalues())
}

pub fn mutual_information<S: Entropies>(state: &S, a: &Region, b: &Region) -> Result<f64> {
    ensure_disjoint(&[a, b])?;
    Ok(state.region_entropy(a)? + state.region_entropy(b)? - state.region_entropy(&a.union(b))?)
}

/// `I(A:C|B) = S(AB) + S(BC) - S(ABC) - S(B)`.
pub fn conditional_mutual_information<S: Entropies>(
    state: &S,
    a: &Region,
    c: &Region,
    b: &Region,
) -> Result<f64> {
    ensure_disjoint(&[a, b, c])?;
    let ab = a.union(b);
    let bc = b.union(c);
    let abc = ab.union(c);
    Ok(state.region_entropy(&ab)? + state.region_entropy(&bc)?
        - state.region_entropy(&abc)?
        - state.region_entropy(b)?)
}

fn same_shape(rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
    if rho.spec().dims() != sigma.spec().dims() {
        return Err(Error::dim(format!(
            "dims {:?} vs {:?}",
            rho.spec().dims(),
            sigma.spec().dims()
        )));
    }
    Ok(())
}

/// Weight of `rho` outside the support of `sigma` above which the relative
/// entropy is reported as infinite.
const SUPPORT_LEAK_TOL: f64 = 1e-10;

/// `D(ρ‖σ) = Tr ρ (log ρ − log σ)`, `+∞` on support violation.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_shape(rho, sigma)?;
    Ok(relative_entropy_matrices(rho.matrix(), sigma.matrix()))
}

pub(crate) fn relative_entropy_matrices(rho: &CMat, sigma: &CMat) -> f64 {
    let (sv, su) = linalg::hermitian_eigen(sigma);
    let mut cross = 0.0;
    let mut leak = 0.0;
    for (j, &lam) in sv.iter().enumerate() {
        let col = su.column(j);
        let w = (col.adjoint() * rho * col)[(0, 0)].re;
        if lam > EIG_EPS {
            cross -= w * lam.ln();
        } else {
            leak += w;
        }
    }
    if leak > SUPPORT_LEAK_TOL {
        return f64::INFINITY;
    }
    let s = linalg::entropy_of_spectrum(&linalg::hermitian_eigenvalues(rho));
    (cross - s).max(0.0)
}

/// `F(ρ,σ) = ‖√ρ √σ‖₁`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_shape(rho, sigma)?;
    Ok(fidelity_matrices(rho.matrix(), sigma.matrix()))
}

pub(crate) fn fidelity_matrices(rho: &CMat, sigma: &CMat) -> f64 {
    let sr = linalg::sqrt_psd(rho);
    let inner = &sr * sigma * &sr;
    linalg::hermitian_eigenvalues(&inner)
        .iter()
        .map(|&x| x.max(0.0).sqrt())
        .sum()
}

/// Partial transpose on the parties of `b`.
pub fn partial_transpose(state: &DensityOperator, b: &Region) -> Result<CMat> {
    let spec = state.spec();
    let idx = spec.indices(b)?;
    let split = Split::new(&spec.dims(), &idx);
    let m = state.matrix();
    let n = m.nrows();
    let mut out = CMat::zeros(n, n);
    for kb in 0..split.keep_dim {
        for kbp in 0..split.keep_dim {
            for r in 0..split.rest_dim {
                for rp in 0..split.rest_dim {
                    out[(split.full_index(kbp, r), split.full_index(kb, rp))] =
                        m[(split.full_index(kb, r), split.full_index(kbp, rp))];
                }
            }
        }
    }
    Ok(out)
}

/// `E_N = log ‖ρ_AB^{T_B}‖₁`. Parties outside `A ∪ B` are traced out first.
pub fn log_negativity(state: &DensityOperator, a: &Region, b: &Region) -> Result<f64> {
    ensure_disjoint(&[a, b])?;
    let ab = state.partial_trace(&a.union(b))?;
    let pt = partial_transpose(&ab, b)?;
    let norm: f64 = linalg::hermitian_eigenvalues(&pt).iter().map(|x| x.abs()).sum();
    Ok(norm.ln().max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qdense::{fixtures, PartySpec};

    #[test]
    fn entropy_of_known_spectra() {
        let spec = PartySpec::uniform(1, 2).unwrap();
        let mixed = DensityOperator::maximally_mixed(spec.clone());
        assert!((entropy(&mixed) - 2f64.ln()).abs() < 1e-14);
        let m = CMat::from_diagonal(&crate::linalg::CVec::from_vec(vec![
            linalg::c(0.7, 0.0),
            linalg::c(0.3, 0.0),
        ]));
        let rho = DensityOperator::new(spec, m).unwrap();
        let h = -0.7 * 0.7f64.ln() - 0.3 * 0.3f64.ln();
        assert!((entropy(&rho) - h).abs() < 1e-14);
        assert!(entropy(&fixtures::bell().density()) < 1e-12);
    }

    #[test]
    fn bell_and_ghz_correlations() {
        let bell = fixtures::bell().density();
        let (a, b) = (Region::parse("A"), Region::parse("B"));
        assert!((mutual_information(&bell, &a, &b).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!((log_negativity(&bell, &a, &b).unwrap() - 2f64.ln()).abs() < 1e-12);

        let ghz = fixtures::ghz(3).density();
        let ab = ghz.partial_trace(&Region::parse("A,B")).unwrap();
        assert!((mutual_information(&ab, &a, &b).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!(log_negativity(&ab, &a, &b).unwrap().abs() < 1e-12);
        let c = Region::parse("C");
        let pure = conditional_mutual_information(&ghz, &a, &c, &b).unwrap();
        assert!((pure - 2f64.ln()).abs() < 1e-12);
        let dephased = fixtures::ghz(4).density().partial_trace(&Region::parse("A,B,C")).unwrap();
        assert!(conditional_mutual_information(&dephased, &a, &c, &b).unwrap().abs() < 1e-12);
    }

    #[test]
    fn overlapping_regions_rejected() {
        let bell = fixtures::bell().density();
        let a = Region::parse("A");
        assert!(matches!(
            mutual_information(&bell, &a, &a),
            Err(Error::Region(_))
        ));
    }

    #[test]
    fn fidelity_closed_forms() {
        let spec = PartySpec::uniform(1, 2).unwrap();
        let mut z0 = CMat::zeros(2, 2);
        z0[(0, 0)] = linalg::ONE;
        let mut z1 = CMat::zeros(2, 2);
        z1[(1, 1)] = linalg::ONE;
        let r0 = DensityOperator::new(spec.clone(), z0).unwrap();
        let r1 = DensityOperator::new(spec.clone(), z1).unwrap();
        let mixed = DensityOperator::maximally_mixed(spec);
        assert!((fidelity(&r0, &r0).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&r0, &r1).unwrap().abs() < 1e-12);
        assert!((fidelity(&r0, &mixed).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(relative_entropy(&r0, &r1).unwrap(), f64::INFINITY);
        assert!(relative_entropy(&mixed, &mixed).unwrap().abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_to_product_is_mutual_information() {
        let psi = crate::qdense::haar_random_pure(&PartySpec::uniform(3, 2).unwrap(), 11);
        let rho = psi.reduced(&Region::parse("A,B")).unwrap();
        let (a, b) = (Region::parse("A"), Region::parse("B"));
        let prod = rho.partial_trace(&a).unwrap().tensor(&rho.partial_trace(&b).unwrap()).unwrap();
        let d = relative_entropy(&rho, &prod).unwrap();
        assert!((d - mutual_information(&rho, &a, &b).unwrap()).abs() < 1e-10);
    }
}
