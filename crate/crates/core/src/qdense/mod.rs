//! Dense states on labelled tensor factors and the entropic quantities
//! built from them.

pub mod fixtures;
mod measures;
mod party;
mod purification;
mod random;
mod state;

pub use measures::{
    conditional_mutual_information, entropy, fidelity, log_negativity, mutual_information,
    partial_transpose, relative_entropy, Entropies,
};
pub use party::{Party, PartySpec, Region};
pub(crate) use party::{default_label, ensure_disjoint};
pub use purification::{canonical_purification, markov_gap, mirror_label, reflected_entropy};
pub use random::{
    complex_normal, derive_seed, haar_random_pure, haar_random_pure_with, haar_unitary, mix64,
    rng_from_seed, SeededRng,
};
pub(crate) use state::pure_split_entropy;
pub use state::{DensityOperator, PureState, NORM_TOL, OPERATOR_TOL};

/// `partial_trace(state, keep)` as a free function.
pub fn partial_trace(state: &DensityOperator, keep: &Region) -> crate::Result<DensityOperator> {
    state.partial_trace(keep)
}
