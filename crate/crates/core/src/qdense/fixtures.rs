//! Standard test states: GHZ, W, Bell pairs, networks of bipartite states,
//! and random states with a generalized Schmidt decomposition.

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, ONE};

use super::party::{default_label, PartySpec};
use super::random::{haar_random_pure_with, haar_unitary, rng_from_seed};
use super::state::PureState;

pub fn bell() -> PureState {
    ghz(2)
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits labelled A, B, ….
pub fn ghz(n: usize) -> PureState {
    let spec = PartySpec::uniform(n, 2).expect("n >= 1");
    let d = spec.total_dim();
    let mut v = CVec::zeros(d);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    v[0] = c(s, 0.0);
    v[d - 1] += c(s, 0.0);
    PureState::normalized(spec, v).expect("nonzero")
}

/// Equal superposition of the `n` single-excitation basis states.
pub fn w(n: usize) -> PureState {
    let spec = PartySpec::uniform(n, 2).expect("n >= 1");
    let mut v = CVec::zeros(spec.total_dim());
    for k in 0..n {
        v[1 << k] = ONE;
    }
    PureState::normalized(spec, v).expect("nonzero")
}

/// Computational basis product state.
pub fn basis_state(spec: PartySpec, index: usize) -> Result<PureState> {
    let d = spec.total_dim();
    if index >= d {
        return Err(Error::dim("basis index out of range"));
    }
    let mut v = CVec::zeros(d);
    v[index] = ONE;
    PureState::new(spec, v)
}

/// One bipartite pure state shared between parties `a` and `b`.
#[derive(Clone, Debug)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    /// Two-party state; its first factor goes to `a`.
    pub state: PureState,
}

impl Link {
    pub fn bell(a: usize, b: usize) -> Self {
        Link { a, b, state: bell() }
    }
}

/// Tensor product of bipartite states distributed over `labels`. Each
/// party's local space is the product of its link ends in link order; a
/// party without links gets dimension 1.
pub fn two_producible(labels: &[&str], links: &[Link]) -> Result<PureState> {
    let n = labels.len();
    let mut amps = CVec::from_element(1, ONE);
    let mut dims = Vec::new();
    let mut owner = Vec::new();
    for link in links {
        if link.a >= n || link.b >= n || link.a == link.b {
            return Err(Error::Partition(format!("bad link {}-{}", link.a, link.b)));
        }
        if link.state.spec().len() != 2 {
            return Err(Error::Spec("link state must have two parties".into()));
        }
        amps = linalg::kron_vec(&amps, link.state.amplitudes());
        let d = link.state.spec().dims();
        dims.extend([d[0], d[1]]);
        owner.extend([link.a, link.b]);
    }
    let mut perm = Vec::new();
    let mut party_dims = Vec::new();
    for p in 0..n {
        let mine: Vec<usize> = (0..owner.len()).filter(|&f| owner[f] == p).collect();
        party_dims.push(mine.iter().map(|&f| dims[f]).product::<usize>());
        perm.extend(mine);
    }
    let v = if dims.is_empty() {
        amps.as_slice().to_vec()
    } else {
        linalg::permute_factors(amps.as_slice(), &dims, &perm)
    };
    let spec = PartySpec::new(labels.iter().copied().zip(party_dims))?;
    PureState::new(spec, CVec::from_vec(v))
}

/// Bell pairs on every edge of the triangle A, B, C.
pub fn triangle() -> PureState {
    two_producible(
        &["A", "B", "C"],
        &[Link::bell(0, 1), Link::bell(1, 2), Link::bell(2, 0)],
    )
    .expect("valid wiring")
}

/// Bell pairs around an `n`-gon.
pub fn polygon(n: usize) -> PureState {
    let labels: Vec<String> = (0..n).map(default_label).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let links: Vec<Link> = (0..n).map(|i| Link::bell(i, (i + 1) % n)).collect();
    two_producible(&refs, &links).expect("valid wiring")
}

/// Haar-random two-party state with local dims `da`, `db`.
pub fn random_bipartite(da: usize, db: usize, seed: u64) -> PureState {
    let spec = PartySpec::new([("L", da), ("R", db)]).expect("dims >= 1");
    haar_random_pure_with(&spec, &mut rng_from_seed(seed))
}

/// `Σ_l √p_l ⊗_i |ψ^l_i⟩` with Haar-random orthonormal local vectors.
/// Returns the state and, per party, the matrix whose columns are the local
/// vectors.
pub fn random_gsd(p: &[f64], party_dims: &[usize], seed: u64) -> Result<(PureState, Vec<CMat>)> {
    let m = p.len();
    if m == 0 || p.iter().any(|&x| x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain("spectrum must be a probability vector".into()));
    }
    if party_dims.iter().any(|&d| d < m) {
        return Err(Error::dim("every party needs dimension >= spectrum length"));
    }
    let mut rng = rng_from_seed(seed);
    let bases: Vec<CMat> = party_dims
        .iter()
        .map(|&d| haar_unitary(d, &mut rng).columns(0, m).into_owned())
        .collect();
    let spec = PartySpec::new(party_dims.iter().enumerate().map(|(i, &d)| (default_label(i), d)))?;
    let mut v = CVec::zeros(spec.total_dim());
    for (l, &pl) in p.iter().enumerate() {
        let mut term = CVec::from_element(1, c(pl.sqrt(), 0.0));
        for b in &bases {
            term = linalg::kron_vec(&term, &b.column(l).into_owned());
        }
        v += term;
    }
    Ok((PureState::normalized(spec, v)?, bases))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qdense::Region;

    #[test]
    fn triangle_marginals() {
        let t = triangle();
        assert_eq!(t.spec().dims(), vec![4, 4, 4]);
        for l in ["A", "B", "C"] {
            let s = t.entropy_of(&Region::parse(l)).unwrap();
            assert!((s - 2.0 * 2f64.ln()).abs() < 1e-12);
        }
        let ab = t.entropy_of(&Region::parse("A,B")).unwrap();
        assert!((ab - 2.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn w_state_has_unit_norm_and_symmetric_marginals() {
        let s = w(3);
        let a = s.entropy_of(&Region::parse("A")).unwrap();
        let c = s.entropy_of(&Region::parse("C")).unwrap();
        assert!((a - c).abs() < 1e-12);
    }

    #[test]
    fn gsd_marginal_entropy_is_shannon() {
        let p = [0.5, 0.3, 0.2];
        let (psi, _) = random_gsd(&p, &[3, 3, 3], 2).unwrap();
        let h = linalg::shannon_entropy(&p);
        let s = psi.entropy_of(&Region::parse("B")).unwrap();
        assert!((s - h).abs() < 1e-10);
    }
}
