use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::bits::{self, Word};

/// One Pauli operator `±P_0 ⊗ … ⊗ P_{n-1}` in `(x|z)` form, `Y = iXZ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pauli {
    pub x: Vec<Word>,
    pub z: Vec<Word>,
    pub negative: bool,
}

impl Pauli {
    pub fn identity(n: usize) -> Self {
        let w = bits::words_for(n);
        Pauli {
            x: vec![0; w],
            z: vec![0; w],
            negative: false,
        }
    }

    pub fn x_bit(&self, q: usize) -> bool {
        bits::get(&self.x, q)
    }

    pub fn z_bit(&self, q: usize) -> bool {
        bits::get(&self.z, q)
    }

    pub fn set(&mut self, q: usize, letter: char) -> bool {
        let (x, z) = match letter {
            'I' => (false, false),
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            _ => return false,
        };
        bits::set(&mut self.x, q, x);
        bits::set(&mut self.z, q, z);
        true
    }

    pub fn letter(&self, q: usize) -> char {
        match (self.x_bit(q), self.z_bit(q)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    /// Parses `+XZI`, `-YY` or an unsigned string.
    pub fn parse(s: &str) -> Option<Self> {
        let (negative, body) = match s.as_bytes().first()? {
            b'+' => (false, &s[1..]),
            b'-' => (true, &s[1..]),
            _ => (false, s),
        };
        let n = body.chars().count();
        if n == 0 {
            return None;
        }
        let mut p = Pauli::identity(n);
        p.negative = negative;
        for (q, ch) in body.chars().enumerate() {
            if !p.set(q, ch.to_ascii_uppercase()) {
                return None;
            }
        }
        Some(p)
    }

    pub fn to_string_n(&self, n: usize) -> String {
        let mut s = String::with_capacity(n + 1);
        s.push(if self.negative { '-' } else { '+' });
        s.extend((0..n).map(|q| self.letter(q)));
        s
    }

    /// True if the two operators anticommute.
    pub fn anticommutes(&self, other: &Pauli) -> bool {
        let mut parity = 0u32;
        for i in 0..self.x.len() {
            parity ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones();
        }
        parity & 1 == 1
    }

    /// Concatenated `(x | z)` bits restricted to `qubits`.
    pub fn restricted(&self, qubits: &[usize]) -> Vec<Word> {
        let k = qubits.len();
        let mut v = vec![0; bits::words_for(2 * k)];
        for (j, &q) in qubits.iter().enumerate() {
            bits::set(&mut v, j, self.x_bit(q));
            bits::set(&mut v, k + j, self.z_bit(q));
        }
        v
    }
}

/// Generators of an `n`-qubit stabilizer group of a pure state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    generators: Vec<Pauli>,
}

impl StabilizerTableau {
    /// Checks that the `n` generators commute pairwise and are independent.
    pub fn new(n: usize, generators: Vec<Pauli>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Spec("a tableau needs at least one qubit".into()));
        }
        if generators.len() != n {
            return Err(Error::Domain(format!(
                "{} generators for {n} qubits",
                generators.len()
            )));
        }
        let w = bits::words_for(n);
        for (i, g) in generators.iter().enumerate() {
            if g.x.len() != w || g.z.len() != w {
                return Err(Error::dim(format!("generator {i} has wrong width")));
            }
            let tail = n % 64;
            if tail != 0 && ((g.x[w - 1] | g.z[w - 1]) >> tail) != 0 {
                return Err(Error::dim(format!("generator {i} acts beyond qubit {n}")));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if generators[i].anticommutes(&generators[j]) {
                    return Err(Error::Domain(format!(
                        "generators {i} and {j} anticommute"
                    )));
                }
            }
        }
        let all: Vec<usize> = (0..n).collect();
        let rows = generators.iter().map(|g| g.restricted(&all)).collect();
        if bits::rank(rows, 2 * n) != n {
            return Err(Error::Domain("generators are not independent".into()));
        }
        Ok(StabilizerTableau { n, generators })
    }

    pub(crate) fn new_unchecked(n: usize, generators: Vec<Pauli>) -> Self {
        StabilizerTableau { n, generators }
    }

    /// `|0…0⟩`, stabilized by `Z_i`.
    pub fn zero_state(n: usize) -> Result<Self> {
        let gens = (0..n)
            .map(|q| {
                let mut p = Pauli::identity(n);
                p.set(q, 'Z');
                p
            })
            .collect();
        Self::new(n, gens)
    }

    pub fn from_strings(gens: &[&str]) -> Result<Self> {
        let n = gens.len();
        let parsed = gens
            .iter()
            .map(|s| {
                let p = Pauli::parse(s).ok_or_else(|| Error::Spec(format!("bad Pauli {s}")))?;
                if s.trim_start_matches(['+', '-']).chars().count() != n {
                    return Err(Error::dim(format!("{s} does not act on {n} qubits")));
                }
                Ok(p)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, parsed)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Pauli] {
        &self.generators
    }

    /// Bits `(x | z)` of every generator restricted to `qubits`.
    pub(crate) fn restricted_rows(&self, qubits: &[usize]) -> Vec<Vec<Word>> {
        self.generators.iter().map(|g| g.restricted(qubits)).collect()
    }

    /// Tensor product; qubits of `other` follow those of `self`.
    pub fn tensor(&self, other: &StabilizerTableau) -> StabilizerTableau {
        let n = self.n + other.n;
        let mut gens = Vec::with_capacity(n);
        for (src, offset, m) in [(self, 0, self.n), (other, self.n, other.n)] {
            for g in &src.generators {
                let mut p = Pauli::identity(n);
                p.negative = g.negative;
                for q in 0..m {
                    p.set(offset + q, g.letter(q));
                }
                gens.push(p);
            }
        }
        StabilizerTableau::new_unchecked(n, gens)
    }

    /// Relabels qubits: new qubit `j` is old qubit `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<StabilizerTableau> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n || perm.iter().any(|&p| p >= self.n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Partition("not a permutation of the qubits".into()));
        }
        let gens = self
            .generators
            .iter()
            .map(|g| {
                let mut p = Pauli::identity(self.n);
                p.negative = g.negative;
                for (j, &q) in perm.iter().enumerate() {
                    p.set(j, g.letter(q));
                }
                p
            })
            .collect();
        Ok(StabilizerTableau::new_unchecked(self.n, gens))
    }
}

impl Serialize for StabilizerTableau {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.generators.iter().map(|g| g.to_string_n(self.n)).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StabilizerTableau {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        let refs: Vec<&str> = v.iter().map(String::as_str).collect();
        StabilizerTableau::from_strings(&refs).map_err(serde::de::Error::custom)
    }
}
