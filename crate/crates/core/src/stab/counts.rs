use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::bits::{self, Word};
use super::tableau::StabilizerTableau;

const LN2: f64 = std::f64::consts::LN_2;

fn check_qubits(tab: &StabilizerTableau, qubits: &[usize]) -> Result<()> {
    let n = tab.n_qubits();
    let mut seen = vec![false; n];
    for &q in qubits {
        if q >= n {
            return Err(Error::region(format!("qubit {q} out of range for n={n}")));
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::region(format!("qubit {q} repeated")));
        }
    }
    Ok(())
}

fn complement(n: usize, qubits: &[usize]) -> Vec<usize> {
    (0..n).filter(|q| !qubits.contains(q)).collect()
}

/// `s_X = log₂|G_X|`: the number of independent stabilizers supported
/// inside `X`, i.e. `n − rank` of the generators restricted to `X̄`.
pub fn local_count(tab: &StabilizerTableau, qubits: &[usize]) -> Result<usize> {
    check_qubits(tab, qubits)?;
    let rest = complement(tab.n_qubits(), qubits);
    let rows = tab.restricted_rows(&rest);
    Ok(tab.n_qubits() - bits::rank(rows, 2 * rest.len()))
}

/// `S(X)` in bits: `|X| − s_X`.
pub fn region_entropy_bits(tab: &StabilizerTableau, qubits: &[usize]) -> Result<usize> {
    Ok(qubits.len() - local_count(tab, qubits)?)
}

/// `S(X)` in nats.
pub fn region_entropy(tab: &StabilizerTableau, qubits: &[usize]) -> Result<f64> {
    Ok(region_entropy_bits(tab, qubits)? as f64 * LN2)
}

/// Generators of the subgroup supported on `region`, restricted to `region`
/// (as `(x|z)` bit rows of width `2|region|`).
fn local_subgroup(tab: &StabilizerTableau, region: &[usize]) -> Vec<Vec<Word>> {
    let rest = complement(tab.n_qubits(), region);
    let k = rest.len();
    // columns: rest bits first (pivot prefix), then region bits
    let mut order = rest.clone();
    order.extend_from_slice(region);
    let rows: Vec<Vec<Word>> = tab
        .generators()
        .iter()
        .map(|g| {
            let m = order.len();
            let mut v = vec![0; bits::words_for(2 * m)];
            for (j, &q) in rest.iter().enumerate() {
                bits::set(&mut v, 2 * j, g.x_bit(q));
                bits::set(&mut v, 2 * j + 1, g.z_bit(q));
            }
            for (j, &q) in region.iter().enumerate() {
                bits::set(&mut v, 2 * (k + j), g.x_bit(q));
                bits::set(&mut v, 2 * (k + j) + 1, g.z_bit(q));
            }
            v
        })
        .collect();
    let (rank, rows) = bits::eliminate_prefix(rows, 2 * k);
    rows[rank..]
        .iter()
        .map(|v| {
            let mut out = vec![0; bits::words_for(2 * region.len())];
            for j in 0..2 * region.len() {
                bits::set(&mut out, j, bits::get(v, 2 * k + j));
            }
            out
        })
        .collect()
}

/// Half the rank of the commutation matrix of the `sub` restrictions of the
/// local subgroup on `region`. `sub` holds positions inside `region`.
fn bell_count(tab: &StabilizerTableau, region: &[usize], sub: &[usize]) -> Result<usize> {
    let gens = local_subgroup(tab, region);
    let restricted: Vec<(Vec<bool>, Vec<bool>)> = gens
        .iter()
        .map(|v| {
            let x = sub.iter().map(|&j| bits::get(v, 2 * j)).collect();
            let z = sub.iter().map(|&j| bits::get(v, 2 * j + 1)).collect();
            (x, z)
        })
        .collect();
    let m = restricted.len();
    let comm: Vec<Vec<Word>> = (0..m)
        .map(|i| {
            let mut row = vec![0; bits::words_for(m.max(1))];
            for j in 0..m {
                let (xi, zi) = &restricted[i];
                let (xj, zj) = &restricted[j];
                let par = (0..sub.len()).fold(false, |acc, q| acc ^ (xi[q] & zj[q]) ^ (zi[q] & xj[q]));
                bits::set(&mut row, j, par);
            }
            row
        })
        .collect();
    let r = bits::rank(comm, m);
    if !r.is_multiple_of(2) {
        return Err(Error::Internal(format!("odd commutation rank {r}")));
    }
    Ok(r / 2)
}

/// Local qubits, Bell pairs and GHZ triples of a tripartite stabilizer state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalCounts {
    /// `s_A, s_B, s_C`.
    pub locals: [usize; 3],
    pub e_ab: usize,
    pub e_bc: usize,
    pub e_ac: usize,
    pub g: usize,
}

impl CanonicalCounts {
    /// Bell count between parties `i` and `j` (0 = A, 1 = B, 2 = C).
    pub fn e(&self, i: usize, j: usize) -> usize {
        match (i.min(j), i.max(j)) {
            (0, 1) => self.e_ab,
            (1, 2) => self.e_bc,
            (0, 2) => self.e_ac,
            _ => 0,
        }
    }

    /// `S(X)/log 2 = e_XY + e_XZ + g` for a single party.
    pub fn entropy_bits(&self, party: usize) -> usize {
        let others: Vec<usize> = (0..3).filter(|&j| j != party).collect();
        self.e(party, others[0]) + self.e(party, others[1]) + self.g
    }

    /// `I(X:Y)/log 2 = 2 e_XY + g`.
    pub fn mutual_information_bits(&self, i: usize, j: usize) -> usize {
        2 * self.e(i, j) + self.g
    }

    pub fn total_qubits(&self) -> usize {
        self.locals.iter().sum::<usize>() + 2 * (self.e_ab + self.e_bc + self.e_ac) + 3 * self.g
    }
}

/// Canonical counts for the partition `(a, b, c)` of all qubits.
pub fn tripartite_counts(
    tab: &StabilizerTableau,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<CanonicalCounts> {
    let n = tab.n_qubits();
    let mut all: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    all.sort_unstable();
    if all.len() != n || all.iter().enumerate().any(|(i, &q)| i != q) {
        return Err(Error::Partition(
            "A, B, C must partition the qubits".into(),
        ));
    }
    let join = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
    let s = [local_count(tab, a)?, local_count(tab, b)?, local_count(tab, c)?];
    let parts = [a, b, c];
    // pair (i, j): region = X_i ∪ X_j, Bell count from the X_j restriction
    let mut e = [[0usize; 3]; 3];
    let mut g_from = Vec::with_capacity(3);
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let region = join(parts[i], parts[j]);
        let sub: Vec<usize> = (parts[i].len()..region.len()).collect();
        let eij = bell_count(tab, &region, &sub)?;
        let sij = local_count(tab, &region)?;
        e[i][j] = eij;
        let g = sij as i64 - s[i] as i64 - s[j] as i64 - 2 * eij as i64;
        g_from.push(g);
    }
    if g_from.iter().any(|&g| g != g_from[0] || g < 0) {
        return Err(Error::Internal(format!(
            "GHZ count differs between pairs: {g_from:?}"
        )));
    }
    let counts = CanonicalCounts {
        locals: s,
        e_ab: e[0][1],
        e_bc: e[1][2],
        e_ac: e[0][2],
        g: g_from[0] as usize,
    };
    if counts.total_qubits() != n {
        return Err(Error::Internal(format!(
            "qubit accounting failed: {counts:?} for n={n}"
        )));
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_and_bell_counts() {
        let ghz = StabilizerTableau::from_strings(&["XXX", "ZZI", "IZZ"]).unwrap();
        let c = tripartite_counts(&ghz, &[0], &[1], &[2]).unwrap();
        assert_eq!((c.locals, c.e_ab, c.e_bc, c.e_ac, c.g), ([0, 0, 0], 0, 0, 0, 1));
        assert_eq!(region_entropy_bits(&ghz, &[0]).unwrap(), 1);

        let bell = StabilizerTableau::from_strings(&["XX", "ZZ"]).unwrap();
        // GHZ on (A,B,C) ⊗ Bell(A,B) ⊗ Bell(B,C)
        let t = ghz.tensor(&bell).tensor(&bell);
        let c = tripartite_counts(&t, &[0, 3], &[1, 4, 5], &[2, 6]).unwrap();
        assert_eq!((c.e_ab, c.e_bc, c.e_ac, c.g), (1, 1, 0, 1));
        assert_eq!(c.locals, [0, 0, 0]);
    }

    #[test]
    fn zero_state_is_all_local() {
        let t = StabilizerTableau::zero_state(5).unwrap();
        for q in 0..5 {
            assert_eq!(region_entropy_bits(&t, &[q]).unwrap(), 0);
        }
        let c = tripartite_counts(&t, &[0, 1], &[2], &[3, 4]).unwrap();
        assert_eq!(c.locals, [2, 1, 2]);
    }

    #[test]
    fn non_partition_rejected() {
        let t = StabilizerTableau::zero_state(3).unwrap();
        assert!(matches!(
            tripartite_counts(&t, &[0], &[1], &[1]),
            Err(Error::Partition(_))
        ));
    }
}
