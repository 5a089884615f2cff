//! Oracles shared by the integration suites. Nothing here calls into the
//! stabilizer module beyond reading generator strings.
#![allow(dead_code)]

use std::collections::BTreeMap;

use eopgap::linalg::{c, CMat};
use eopgap::qdense::Region;
use eopgap::stab::StabilizerTableau;

pub const LN2: f64 = std::f64::consts::LN_2;

fn pauli_matrix(letter: char) -> CMat {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match letter {
        'I' => CMat::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => CMat::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => CMat::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("bad Pauli letter {letter}"),
    }
}

/// Dense matrix of a signed Pauli string such as `-XZ`; qubit 0 is the
/// leftmost tensor factor.
pub fn pauli_dense(s: &str) -> CMat {
    let (sign, letters) = match s.as_bytes()[0] {
        b'-' => (-1.0, &s[1..]),
        b'+' => (1.0, &s[1..]),
        _ => (1.0, s),
    };
    let m = letters
        .chars()
        .map(pauli_matrix)
        .reduce(|a, b| a.kronecker(&b))
        .expect("non-empty string");
    m * c(sign, 0.0)
}

/// `Π (I + g)/2` over the given generator strings.
pub fn projector(gens: &[String]) -> CMat {
    let n = gens[0].trim_start_matches(['+', '-']).len();
    let d = 1usize << n;
    gens.iter().fold(CMat::identity(d, d), |acc, g| {
        acc * ((CMat::identity(d, d) + pauli_dense(g)) * c(0.5, 0.0))
    })
}

pub fn tableau_projector(tab: &StabilizerTableau) -> CMat {
    let n = tab.n_qubits();
    let gens: Vec<String> = tab.generators().iter().map(|p| p.to_string_n(n)).collect();
    projector(&gens)
}

/// Rounded entries used as a dedup key for rank-one projectors.
pub fn key(p: &CMat) -> String {
    p.iter()
        .map(|z| format!("{:.6},{:.6};", z.re + 0.0, z.im + 0.0))
        .collect::<String>()
        .replace("-0.000000", "0.000000")
}

/// All `n`-qubit stabilizer states by brute force over signed generator
/// tuples, keyed by their projector.
pub fn enumerate_stabilizer_states(n: usize) -> BTreeMap<String, CMat> {
    let letters = ['I', 'X', 'Y', 'Z'];
    let mut strings = Vec::new();
    for idx in 1..4usize.pow(n as u32) {
        let mut s = String::new();
        let mut k = idx;
        for _ in 0..n {
            s.push(letters[k % 4]);
            k /= 4;
        }
        strings.push(format!("+{s}"));
        strings.push(format!("-{s}"));
    }
    let mut out = BTreeMap::new();
    let mut tuple = vec![0usize; n];
    loop {
        let gens: Vec<String> = tuple.iter().map(|&i| strings[i].clone()).collect();
        let p = projector(&gens);
        let tr = p.trace().re;
        let idempotent = (&p * &p - &p).norm() < 1e-9;
        if (tr - 1.0).abs() < 1e-9 && idempotent {
            out.entry(key(&p)).or_insert(p);
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            tuple[i] += 1;
            if tuple[i] < strings.len() {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

/// Entropy of qubit 0 of a two-qubit pure state given by its projector.
pub fn first_qubit_entropy(p: &CMat) -> f64 {
    let mut r = CMat::zeros(2, 2);
    for a in 0..2 {
        for b in 0..2 {
            r[(a, b)] = p[(2 * a, 2 * b)] + p[(2 * a + 1, 2 * b + 1)];
        }
    }
    r.symmetric_eigenvalues()
        .iter()
        .filter(|&&x| x > 1e-12)
        .map(|&x| -x * x.ln())
        .sum()
}

pub fn qubits(region: &[usize]) -> Region {
    Region::new(region.iter().map(|q| format!("q{q}")))
}
