//! Uniform random stabilizer states from uniformly random symplectic
//! matrices (transvection construction of Koenig and Smolin).
//!
//! Symplectic vectors here use the interleaved layout: bit `2i` is the X part
//! and bit `2i+1` the Z part of qubit `i`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::qdense::rng_from_seed;

use super::bits::{self, Word};
use super::tableau::{Pauli, StabilizerTableau};

const EVEN: Word = 0x5555_5555_5555_5555;

type SVec = Vec<Word>;

fn inner(v: &[Word], w: &[Word]) -> bool {
    let mut parity = 0;
    for (a, b) in v.iter().zip(w) {
        parity ^= ((((a & EVEN) << 1) & b) ^ (((b & EVEN) << 1) & a)).count_ones();
    }
    parity & 1 == 1
}

fn transvect(k: &[Word], v: &mut [Word]) {
    if inner(k, v) {
        bits::xor_into(v, k);
    }
}

fn pair(v: &[Word], i: usize) -> (bool, bool) {
    (bits::get(v, 2 * i), bits::get(v, 2 * i + 1))
}

fn set_pair(v: &mut [Word], i: usize, x: bool, z: bool) {
    bits::set(v, 2 * i, x);
    bits::set(v, 2 * i + 1, z);
}

/// Two vectors `h1, h2` with `y = Z_{h2} Z_{h1} x`, where `Z_h` is the
/// transvection `v ↦ v + ⟨h,v⟩ h`. Zero vectors act as the identity.
fn find_transvection(x: &[Word], y: &[Word], n: usize) -> (SVec, SVec) {
    let w = x.len();
    let zero = vec![0; w];
    if x == y {
        return (zero.clone(), zero);
    }
    if inner(x, y) {
        let mut h = x.to_vec();
        bits::xor_into(&mut h, y);
        return (h, zero);
    }
    let mut z = vec![0; w];
    let nonzero = |v: &[Word], i: usize| {
        let (a, b) = pair(v, i);
        a || b
    };
    for i in 0..n {
        if nonzero(x, i) && nonzero(y, i) {
            let (x0, x1) = pair(x, i);
            let (y0, y1) = pair(y, i);
            let (mut z0, mut z1) = (x0 ^ y0, x1 ^ y1);
            if !z0 && !z1 {
                z1 = true;
                if x0 != x1 {
                    z0 = true;
                }
            }
            set_pair(&mut z, i, z0, z1);
            let mut h1 = x.to_vec();
            bits::xor_into(&mut h1, &z);
            let mut h2 = y.to_vec();
            bits::xor_into(&mut h2, &z);
            return (h1, h2);
        }
    }
    for i in 0..n {
        if nonzero(x, i) && !nonzero(y, i) {
            let (x0, x1) = pair(x, i);
            if x0 == x1 {
                set_pair(&mut z, i, false, true);
            } else {
                set_pair(&mut z, i, x1, x0);
            }
            break;
        }
    }
    for i in 0..n {
        if !nonzero(x, i) && nonzero(y, i) {
            let (y0, y1) = pair(y, i);
            if y0 == y1 {
                set_pair(&mut z, i, false, true);
            } else {
                set_pair(&mut z, i, y1, y0);
            }
            break;
        }
    }
    let mut h1 = x.to_vec();
    bits::xor_into(&mut h1, &z);
    let mut h2 = y.to_vec();
    bits::xor_into(&mut h2, &z);
    (h1, h2)
}

/// Uniformly random symplectic matrix on `n` qubits; row `j` is the image of
/// basis vector `e_j`.
pub(crate) fn random_symplectic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<SVec> {
    let nn = 2 * n;
    let w = bits::words_for(nn);
    // Image of e_1: uniform nonzero vector.
    let mut f1 = vec![0; w];
    loop {
        for i in 0..nn {
            bits::set(&mut f1, i, rng.random::<bool>());
        }
        if !bits::is_zero(&f1) {
            break;
        }
    }
    let mut e1 = vec![0; w];
    bits::set(&mut e1, 0, true);
    let (t0, t1) = find_transvection(&e1, &f1, n);

    let rbits: Vec<bool> = (0..nn - 1).map(|_| rng.random::<bool>()).collect();
    let mut eprime = e1.clone();
    for j in 2..nn {
        bits::set(&mut eprime, j, rbits[j - 1]);
    }
    let mut h0 = eprime;
    transvect(&t0, &mut h0);
    transvect(&t1, &mut h0);
    if rbits[0] {
        f1.iter_mut().for_each(|x| *x = 0);
    }

    // identity on the first qubit ⊕ random symplectic on the rest
    let mut g: Vec<SVec> = (0..nn)
        .map(|j| {
            let mut v = vec![0; w];
            if j < 2 {
                bits::set(&mut v, j, true);
            }
            v
        })
        .collect();
    if n > 1 {
        let sub = random_symplectic(n - 1, rng);
        for (r, row) in sub.iter().enumerate() {
            for c in 0..2 * (n - 1) {
                if bits::get(row, c) {
                    bits::set(&mut g[r + 2], c + 2, true);
                }
            }
        }
    }
    for row in g.iter_mut() {
        transvect(&t0, row);
        transvect(&t1, row);
        transvect(&h0, row);
        transvect(&f1, row);
    }
    g
}

/// Uniformly random `n`-qubit stabilizer state.
pub fn random_stabilizer(n_qubits: usize, seed: u64) -> Result<StabilizerTableau> {
    random_stabilizer_with(n_qubits, &mut rng_from_seed(seed))
}

pub fn random_stabilizer_with<R: Rng + ?Sized>(
    n_qubits: usize,
    rng: &mut R,
) -> Result<StabilizerTableau> {
    if n_qubits == 0 {
        return Err(Error::Spec("random_stabilizer needs n >= 1".into()));
    }
    let n = n_qubits;
    let s = random_symplectic(n, rng);
    let gens = (0..n)
        .map(|i| {
            // image of Z_i
            let row = &s[2 * i + 1];
            let mut p = Pauli::identity(n);
            for q in 0..n {
                bits::set(&mut p.x, q, bits::get(row, 2 * q));
                bits::set(&mut p.z, q, bits::get(row, 2 * q + 1));
            }
            p.negative = rng.random::<bool>();
            p
        })
        .collect();
    Ok(StabilizerTableau::new_unchecked(n, gens))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_symplectic(g: &[SVec], n: usize) -> bool {
        for i in 0..2 * n {
            for j in 0..2 * n {
                let expect = i / 2 == j / 2 && i != j;
                if inner(&g[i], &g[j]) != expect {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn sampled_matrices_are_symplectic() {
        let mut rng = rng_from_seed(3);
        for n in [1, 2, 3, 7, 33, 40] {
            for _ in 0..5 {
                assert!(is_symplectic(&random_symplectic(n, &mut rng), n));
            }
        }
    }

    #[test]
    fn sampled_tableaux_validate() {
        for seed in 0..20 {
            let t = random_stabilizer(9, seed).unwrap();
            let strings: Vec<String> = t.generators().iter().map(|g| g.to_string_n(9)).collect();
            let refs: Vec<&str> = strings.iter().map(String::as_str).collect();
            assert!(StabilizerTableau::from_strings(&refs).is_ok());
        }
        assert_eq!(random_stabilizer(5, 1).unwrap(), random_stabilizer(5, 1).unwrap());
        assert!(random_stabilizer(0, 1).is_err());
    }
}
