use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::linalg::{c, CVec, C64, ZERO};
use crate::qdense::{complex_normal, PartySpec, PureState};

use super::tableau::{Pauli, StabilizerTableau};

pub const MAX_DENSE_QUBITS: usize = 14;

/// `P|ψ⟩` for a Pauli with `Y = iXZ`; qubit 0 is the most significant bit.
pub fn apply_pauli(p: &Pauli, n: usize, v: &[C64]) -> Vec<C64> {
    let mut xmask = 0usize;
    let mut zmask = 0usize;
    let mut ny = 0u32;
    for q in 0..n {
        let bit = 1usize << (n - 1 - q);
        if p.x_bit(q) {
            xmask |= bit;
        }
        if p.z_bit(q) {
            zmask |= bit;
        }
        if p.x_bit(q) && p.z_bit(q) {
            ny += 1;
        }
    }
    let mut phase = match ny % 4 {
        0 => c(1.0, 0.0),
        1 => c(0.0, 1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, -1.0),
    };
    if p.negative {
        phase = -phase;
    }
    let mut out = vec![ZERO; v.len()];
    for (b, &amp) in v.iter().enumerate() {
        let sign = if (b & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[b ^ xmask] = amp * phase * sign;
    }
    out
}

/// Per-qubit party spec with labels `q0, q1, …`.
pub fn qubit_spec(n: usize) -> PartySpec {
    PartySpec::new((0..n).map(|q| (format!("q{q}"), 2))).expect("n >= 1")
}

/// Dense state vector of the tableau, parties `q0 … q{n-1}`. The global
/// phase makes the first amplitude of maximal modulus real and positive.
pub fn to_dense(tab: &StabilizerTableau) -> Result<PureState> {
    let n = tab.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity(format!(
            "dense conversion limited to {MAX_DENSE_QUBITS} qubits, got {n}"
        )));
    }
    let d = 1usize << n;
    for attempt in 0u64.. {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed ^ attempt);
        let mut v: Vec<C64> = (0..d).map(|_| complex_normal(&mut rng)).collect();
        for g in tab.generators() {
            let gv = apply_pauli(g, n, &v);
            for (a, b) in v.iter_mut().zip(gv) {
                *a = (*a + b) * 0.5;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pivot = v.iter().find(|z| z.norm() > max * (1.0 - 1e-9)).copied().unwrap();
        let phase = pivot.conj() / pivot.norm();
        let amps = CVec::from_iterator(d, v.into_iter().map(|z| z * phase / norm));
        return PureState::normalized(qubit_spec(n), amps);
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(gens: &[&str], expect: &[(usize, f64)]) {
        let t = StabilizerTableau::from_strings(gens).unwrap();
        let psi = to_dense(&t).unwrap();
        for (k, z) in psi.amplitudes().iter().enumerate() {
            let e = expect.iter().find(|(i, _)| *i == k).map_or(0.0, |x| x.1);
            assert!((z - c(e, 0.0)).norm() < 1e-12, "amp {k}: {z}");
        }
    }

    #[test]
    fn known_states() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        check(&["Z"], &[(0, 1.0)]);
        check(&["-Z"], &[(1, 1.0)]);
        check(&["XX", "ZZ"], &[(0, s), (3, s)]);
        check(&["XXX", "ZZI", "IZZ"], &[(0, s), (7, s)]);
    }

    #[test]
    fn generators_stabilize_random_states() {
        for seed in 0..10 {
            let t = super::super::random_stabilizer(6, seed).unwrap();
            let psi = to_dense(&t).unwrap();
            let v = psi.amplitudes().as_slice();
            for g in t.generators() {
                let gv = apply_pauli(g, 6, v);
                let err = gv.iter().zip(v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(err < 1e-10);
            }
        }
    }

    #[test]
    fn capacity_limit() {
        let t = StabilizerTableau::zero_state(15).unwrap();
        assert!(matches!(to_dense(&t), Err(Error::Capacity(_))));
    }
}
