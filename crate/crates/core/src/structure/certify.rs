use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eop::{self, OptimizerConfig, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::qdense::{ensure_disjoint, PureState, Region};
use crate::stab::{self, CanonicalCounts, StabilizerTableau};

use super::gsd::gsd_detect;

pub const DEFAULT_THRESHOLD: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified2Producible,
    NotCertified,
    Refuted,
}

/// An exact positive value of some gap, which 2-producible states cannot have.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Refutation {
    /// `"gsd"` or `"stabilizer"`.
    pub route: String,
    pub alpha: Vec<Region>,
    pub lower_bound: f64,
}

/// The distance inequality `max_α g(α) ≤ min_μ D(σ‖μ)` evaluated with
/// `σ = ρ`. For a pure `ρ` and pure 2-producible `μ` the right side is 0
/// when `ρ` is itself 2-producible and unbounded otherwise.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceCheck {
    pub lhs: f64,
    /// `None` stands for `+∞`.
    pub rhs_relaxed: Option<f64>,
    pub holds: bool,
}

/// Stabilizer Bell and GHZ counts for the grouping `(A_i : A_j : rest)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairCounts {
    pub i: usize,
    pub j: usize,
    pub counts: CanonicalCounts,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub chain: Vec<Vec<Region>>,
    /// Optimizer upper bounds on `g(α)` along the chain.
    pub gaps: Vec<f64>,
    /// `½(Σ S(A_i) − S(Ā))` along the chain.
    pub lower_bounds: Vec<f64>,
    pub threshold: f64,
    pub verdict: Verdict,
    pub refutations: Vec<Refutation>,
    pub distance_check: DistanceCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stabilizer_pairs: Option<Vec<PairCounts>>,
}

/// `α_k` = the first `k` parties, `k = 2 … n−1`.
pub fn default_chain(psi: &PureState) -> Vec<Vec<Region>> {
    let singles = psi.spec().singletons();
    (2..singles.len()).map(|k| singles[..k].to_vec()).collect()
}

fn covered(alpha: &[Region]) -> Vec<String> {
    let mut labels: Vec<String> = alpha.iter().flat_map(|r| r.labels().iter().cloned()).collect();
    labels.sort();
    labels
}

fn validate_chain(psi: &PureState, chain: &[Vec<Region>]) -> Result<()> {
    if chain.is_empty() {
        return Err(Error::Config("empty certification chain".into()));
    }
    let mut prev: Vec<String> = Vec::new();
    for alpha in chain {
        if alpha.len() < 2 {
            return Err(Error::Partition("every chain element needs at least two regions".into()));
        }
        for r in alpha {
            psi.spec().indices(r)?;
        }
        ensure_disjoint(&alpha.iter().collect::<Vec<_>>())?;
        let cur = covered(alpha);
        let grows = cur.len() > prev.len() && prev.iter().all(|l| cur.contains(l));
        if !grows {
            return Err(Error::Partition("chain must be strictly increasing".into()));
        }
        prev = cur;
    }
    Ok(())
}

fn gsd_refutation(psi: &PureState) -> Option<Refutation> {
    let form = gsd_detect(psi).form?;
    let singles = psi.spec().singletons();
    Some(Refutation {
        route: "gsd".into(),
        alpha: singles[..2].to_vec(),
        lower_bound: 0.5 * form.entropy(),
    })
}

fn finish(
    chain: Vec<Vec<Region>>,
    gaps: Vec<f64>,
    lower_bounds: Vec<f64>,
    threshold: f64,
    refutations: Vec<Refutation>,
    stabilizer_pairs: Option<Vec<PairCounts>>,
) -> Certificate {
    let refuted = refutations.iter().any(|r| r.lower_bound > threshold);
    let all_small = gaps.iter().all(|&g| g <= threshold);
    let verdict = if refuted {
        Verdict::Refuted
    } else if all_small {
        Verdict::Certified2Producible
    } else {
        Verdict::NotCertified
    };
    let lhs = gaps.iter().copied().fold(0.0, f64::max);
    let rhs_relaxed = (verdict == Verdict::Certified2Producible).then_some(0.0);
    let holds = match rhs_relaxed {
        Some(r) => lhs <= r + threshold,
        None => true,
    };
    Certificate {
        schema_version: SCHEMA_VERSION,
        chain,
        gaps,
        lower_bounds,
        threshold,
        verdict,
        refutations,
        distance_check: DistanceCheck { lhs, rhs_relaxed, holds },
        stabilizer_pairs,
    }
}

fn chain_gaps(psi: &PureState, chain: &[Vec<Region>], cfg: &OptimizerConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let results: Vec<Result<(f64, f64)>> = chain
        .par_iter()
        .map(|alpha| {
            let r = eop::generalized_eop(psi, alpha, cfg)?;
            Ok((r.gap(), r.lower_bound))
        })
        .collect();
    let pairs = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(pairs.into_iter().unzip())
}

/// Certifies 2-producibility: every `α_k` of the chain must have a gap
/// estimate at most `threshold`. Exact positive gaps from a detected
/// generalized Schmidt decomposition refute.
pub fn certify_2producible(
    psi: &PureState,
    chain: Option<Vec<Vec<Region>>>,
    cfg: &OptimizerConfig,
    threshold: f64,
) -> Result<Certificate> {
    if psi.spec().len() < 3 {
        return Err(Error::Partition("certification needs at least three parties".into()));
    }
    if !(threshold >= 0.0) {
        return Err(Error::Config("threshold must be non-negative".into()));
    }
    let chain = chain.unwrap_or_else(|| default_chain(psi));
    validate_chain(psi, &chain)?;
    let (gaps, lower_bounds) = chain_gaps(psi, &chain, cfg)?;
    let refutations = gsd_refutation(psi).into_iter().collect();
    Ok(finish(chain, gaps, lower_bounds, threshold, refutations, None))
}

/// Certification of a stabilizer state whose parties are the given qubit
/// groups. Adds exact pairwise counts: `g_{ij} > 0` for some pair gives the
/// exact gap `g(A_i, A_j) = g_{ij} log 2 / 2`.
pub fn certify_tableau(
    tab: &StabilizerTableau,
    groups: &[(String, Vec<usize>)],
    chain: Option<Vec<Vec<Region>>>,
    cfg: &OptimizerConfig,
    threshold: f64,
) -> Result<Certificate> {
    let n = tab.n_qubits();
    let mut seen = vec![false; n];
    for (_, qs) in groups {
        for &q in qs {
            if q >= n || seen[q] {
                return Err(Error::Partition("qubit groups must partition the qubits".into()));
            }
            seen[q] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Partition("qubit groups must partition the qubits".into()));
    }
    let dense = stab::to_dense(tab)?;
    let regrouped: Vec<(String, Region)> = groups
        .iter()
        .map(|(l, qs)| (l.clone(), Region::new(qs.iter().map(|q| format!("q{q}")))))
        .collect();
    let psi = dense.regroup(&regrouped)?;
    let mut cert = certify_2producible(&psi, chain, cfg, threshold)?;

    let mut pairs = Vec::new();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            let rest: Vec<usize> = groups
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i && k != j)
                .flat_map(|(_, (_, qs))| qs.iter().copied())
                .collect();
            let counts = stab::tripartite_counts(tab, &groups[i].1, &groups[j].1, &rest)?;
            if counts.g > 0 {
                cert.refutations.push(Refutation {
                    route: "stabilizer".into(),
                    alpha: vec![Region::new([groups[i].0.clone()]), Region::new([groups[j].0.clone()])],
                    lower_bound: 0.5 * counts.g as f64 * std::f64::consts::LN_2,
                });
            }
            pairs.push(PairCounts { i, j, counts });
        }
    }
    Ok(finish(
        cert.chain,
        cert.gaps,
        cert.lower_bounds,
        threshold,
        cert.refutations,
        Some(pairs),
    ))
}

/// Bipartite gap estimates `g(A_i : A_j) = 2E_p − I` of every two-party
/// marginal.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairwiseScan {
    pub schema_version: u32,
    pub labels: Vec<String>,
    pub gaps: Vec<Vec<f64>>,
}

pub fn pairwise_gap_scan(psi: &PureState, cfg: &OptimizerConfig) -> Result<PairwiseScan> {
    let labels: Vec<String> = psi.spec().labels().iter().map(|s| s.to_string()).collect();
    let n = labels.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let a = Region::new([labels[i].clone()]);
            let b = Region::new([labels[j].clone()]);
            let rho = psi.reduced(&a.union(&b))?;
            let r = eop::eop_bipartite_regions(&rho, &a, &b, cfg)?;
            Ok(eop::bipartite_gap_of(&r))
        })
        .collect();
    let mut gaps = vec![vec![0.0; n]; n];
    for (&(i, j), v) in pairs.iter().zip(values) {
        let v = v?;
        gaps[i][j] = v;
        gaps[j][i] = v;
    }
    Ok(PairwiseScan {
        schema_version: SCHEMA_VERSION,
        labels,
        gaps,
    })
}
