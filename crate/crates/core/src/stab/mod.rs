//! Stabilizer states over GF(2): sampling, region entropies, and the
//! tripartite decomposition into local qubits, Bell pairs and GHZ triples.

pub(crate) mod bits;
mod counts;
mod dense;
mod sample;
mod tableau;
mod text;

pub use counts::{local_count, region_entropy, region_entropy_bits, tripartite_counts, CanonicalCounts};
pub use dense::{apply_pauli, qubit_spec, to_dense, MAX_DENSE_QUBITS};
pub use sample::{random_stabilizer, random_stabilizer_with};
pub use tableau::{Pauli, StabilizerTableau};
pub use text::{format_tableau, parse_tableau};

/// `|GHZ_n⟩` stabilized by `X…X` and `Z_i Z_{i+1}`.
pub fn ghz_tableau(n: usize) -> crate::Result<StabilizerTableau> {
    let mut gens = vec!["X".repeat(n)];
    for i in 0..n.saturating_sub(1) {
        let mut s: Vec<char> = vec!['I'; n];
        s[i] = 'Z';
        s[i + 1] = 'Z';
        gens.push(s.into_iter().collect());
    }
    let refs: Vec<&str> = gens.iter().map(String::as_str).collect();
    StabilizerTableau::from_strings(&refs)
}
