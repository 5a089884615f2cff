use crate::error::Result;
use crate::linalg::{self, CVec};

use super::measures::mutual_information;
use super::party::{ensure_disjoint, Party, PartySpec, Region};
use super::state::{DensityOperator, PureState};

/// Label given to the mirror copy of `label`.
pub fn mirror_label(label: &str) -> String {
    format!("{label}_bar")
}

/// `|√ρ⟩ = (√ρ ⊗ I)|Φ⟩` with `|Φ⟩ = Σ_j |j⟩|j⟩`. Mirror parties follow the
/// originals in spec order.
pub fn canonical_purification(rho: &DensityOperator) -> Result<PureState> {
    let d = rho.dim();
    let sqrt = linalg::sqrt_psd(rho.matrix());
    // row-major over (original, mirror): amplitude (i, j) = √ρ[i, j]
    let amps = CVec::from_fn(d * d, |k, _| sqrt[(k / d, k % d)]);
    let mut parties = rho.spec().parties().to_vec();
    for p in rho.spec().parties() {
        let mut label = mirror_label(&p.label);
        while parties.iter().any(|q| q.label == label) {
            label.push('\'');
        }
        parties.push(Party { label, dim: p.dim });
    }
    let spec = PartySpec::try_from(parties)?;
    PureState::normalized(spec, amps)
}

/// Labels of the mirror copies of `region` in a canonical purification of a
/// state on `spec`.
fn mirrored(spec: &PartySpec, purified: &PartySpec, region: &Region) -> Result<Region> {
    let idx = spec.indices(region)?;
    let n = spec.len();
    Ok(Region::new(
        idx.iter().map(|&i| purified.parties()[n + i].label.clone()),
    ))
}

/// `S_R(A:B) = S(AĀ)` of the canonical purification.
pub fn reflected_entropy(rho: &DensityOperator, a: &Region, b: &Region) -> Result<f64> {
    ensure_disjoint(&[a, b])?;
    let rho_ab = rho.partial_trace(&a.union(b))?;
    let psi = canonical_purification(&rho_ab)?;
    let a_bar = mirrored(rho_ab.spec(), psi.spec(), a)?;
    psi.entropy_of(&a.union(&a_bar))
}

/// `h = S_R − I(A:B)`.
pub fn markov_gap(rho: &DensityOperator, a: &Region, b: &Region) -> Result<f64> {
    Ok(reflected_entropy(rho, a, b)? - mutual_information(rho, a, b)?)
}
