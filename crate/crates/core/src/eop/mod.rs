//! Entanglement of purification and its multipartite generalization.
//!
//! Every reported value is the best objective found, hence an upper bound
//! on the true minimum. The trivial partition (whole purifier handed to one
//! party) is always evaluated, so `value ≤ upper_bound` holds exactly.

mod objective;
mod optimize;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::qdense::{
    canonical_purification, DensityOperator, PartySpec, PureState, Region,
};

pub use objective::{antihermitian_from_params, param_gradient, params_from_antihermitian, Layout, Problem};

pub const SCHEMA_VERSION: u32 = 1;
/// Default cap on the embedded ancilla dimension.
pub const DEFAULT_MAX_CAP: usize = 64;
/// Slack beyond which polygamy or monotonicity violations are flagged.
pub const VIOLATION_TOL: f64 = 5e-3;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    /// Largest embedded ancilla dimension; `None` uses the smallest power of
    /// two at least the purifier rank (clamped to 64).
    pub ancilla_cap: Option<usize>,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 8,
            max_iters: 2000,
            grad_tol: 1e-9,
            ancilla_cap: None,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        if !(self.grad_tol >= 0.0) {
            return Err(Error::Config("grad_tol must be non-negative".into()));
        }
        Ok(())
    }

    fn cap_for(&self, rank: usize) -> Result<usize> {
        match self.ancilla_cap {
            Some(c) if c < rank => Err(Error::Config(format!(
                "ancilla cap {c} is below the purifier rank {rank}"
            ))),
            Some(c) => Ok(c),
            None => Ok(rank.next_power_of_two().min(DEFAULT_MAX_CAP).max(rank)),
        }
    }
}

/// Split of the embedded ancilla into one factor per party of `α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncillaPartition {
    pub factor_dims: Vec<usize>,
    /// Region receiving each factor, in `α` order.
    pub assignment: Vec<Region>,
}

impl AncillaPartition {
    pub fn embed_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    pub fn validate(&self, alpha: &[Region]) -> Result<()> {
        if self.factor_dims.len() != alpha.len() || self.assignment.as_slice() != alpha {
            return Err(Error::Partition(
                "ancilla partition does not match the parties of α".into(),
            ));
        }
        if self.factor_dims.contains(&0) {
            return Err(Error::Partition("zero-dimensional ancilla factor".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EopResult {
    pub schema_version: u32,
    /// SHA-256 of the input state (spec and entries).
    pub state_fingerprint: String,
    pub alpha: Vec<Region>,
    /// Best `½ Σ S(A_i R_i)` found (nats).
    pub value: f64,
    /// `½(Σ S(A_i) − S(Ā_{n+1}))`.
    pub lower_bound: f64,
    /// Trivial-partition value.
    pub upper_bound: f64,
    pub best_partition: AncillaPartition,
    /// Rank of the reduced state on `α` (minimal purifier dimension).
    pub purifier_rank: usize,
    /// Parameters `θ` of `U = exp(X(θ))` on the embedded ancilla.
    pub unitary_params: Vec<f64>,
    /// Objective after every accepted iteration of the winning run.
    pub trace: Vec<f64>,
    /// Final values of every start on the winning factorization.
    pub restart_values: Vec<f64>,
    pub marginal_entropies: Vec<f64>,
    /// `S(A_i R_i)` at the best configuration.
    pub party_entropies: Vec<f64>,
    pub joint_entropy: f64,
    pub config: OptimizerConfig,
}

impl EopResult {
    pub fn gap(&self) -> f64 {
        self.value - self.lower_bound
    }

    /// Ancilla unitary of the best configuration.
    pub fn unitary(&self) -> Result<CMat> {
        let d = self.best_partition.embed_dim();
        if self.unitary_params.len() != d * d {
            return Err(Error::Version(format!(
                "{} unitary parameters for ancilla dimension {d}",
                self.unitary_params.len()
            )));
        }
        Ok(linalg::expm_antihermitian(&antihermitian_from_params(
            &self.unitary_params,
            d,
        )))
    }
}

pub fn fingerprint_pure(psi: &PureState) -> String {
    fingerprint(psi.spec(), "pure", psi.amplitudes().iter())
}

pub fn fingerprint_density(rho: &DensityOperator) -> String {
    fingerprint(rho.spec(), "density", rho.matrix().transpose().iter())
}

fn fingerprint<'a>(spec: &PartySpec, kind: &str, entries: impl Iterator<Item = &'a linalg::C64>) -> String {
    let mut h = Sha256::new();
    h.update(kind.as_bytes());
    for p in spec.parties() {
        h.update(p.label.as_bytes());
        h.update([0u8]);
        h.update((p.dim as u64).to_le_bytes());
    }
    for z in entries {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn solve(problem: &Problem, cfg: &OptimizerConfig, fingerprint: String) -> Result<EopResult> {
    cfg.validate()?;
    let cap = cfg.cap_for(problem.rank())?;
    let branches = optimize::run_all(problem, cfg, cap);
    let best_idx = branches
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.run.sum.total_cmp(&b.run.sum).then(i.cmp(j)))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Internal("no optimizer branches".into()))?;
    let best = &branches[best_idx];
    let restart_values = branches
        .iter()
        .filter(|b| b.factors == best.factors)
        .map(|b| 0.5 * b.run.sum)
        .collect();
    let layout = Layout::new(problem, &best.factors);
    let psi = layout.embedded_psi0(problem) * best.run.u.transpose();
    let party_entropies = layout.entropies(&objective::flatten(&psi));
    let unitary_params = params_from_antihermitian(&linalg::logm_unitary(&best.run.u));
    let lower_bound = problem.lower_bound();
    let upper_bound = problem.trivial_upper_bound();
    let value = 0.5 * best.run.sum;
    log::debug!(
        "eop: value {value:.9} in [{lower_bound:.9}, {upper_bound:.9}] with factors {:?} (start {})",
        best.factors,
        best.start
    );
    Ok(EopResult {
        schema_version: SCHEMA_VERSION,
        state_fingerprint: fingerprint,
        alpha: problem.alpha.clone(),
        value,
        lower_bound,
        upper_bound,
        best_partition: AncillaPartition {
            factor_dims: best.factors.clone(),
            assignment: problem.alpha.clone(),
        },
        purifier_rank: problem.rank(),
        unitary_params,
        trace: best.run.trace.clone(),
        restart_values,
        marginal_entropies: problem.marginal_entropies.clone(),
        party_entropies,
        joint_entropy: problem.joint_entropy,
        config: cfg.clone(),
    })
}

/// `E_p(A:B)` of a two-party state.
pub fn eop_bipartite(rho: &DensityOperator, cfg: &OptimizerConfig) -> Result<EopResult> {
    let labels = rho.spec().labels();
    if labels.len() != 2 {
        return Err(Error::Partition(format!(
            "bipartite EoP needs exactly two parties, got {}",
            labels.len()
        )));
    }
    eop_bipartite_regions(rho, &Region::new([labels[0]]), &Region::new([labels[1]]), cfg)
}

/// `E_p(A:B)` of the marginal on `A ∪ B`.
pub fn eop_bipartite_regions(
    rho: &DensityOperator,
    a: &Region,
    b: &Region,
    cfg: &OptimizerConfig,
) -> Result<EopResult> {
    let problem = Problem::from_density(rho, &[a.clone(), b.clone()])?;
    solve(&problem, cfg, fingerprint_density(rho))
}

/// `g(A:B) = 2 E_p(A:B) − I(A:B)`, an upper bound on the true gap.
pub fn gap_bipartite(rho: &DensityOperator, cfg: &OptimizerConfig) -> Result<f64> {
    let r = eop_bipartite(rho, cfg)?;
    Ok(bipartite_gap_of(&r))
}

/// `2 E_p − I` from a bipartite result.
pub fn bipartite_gap_of(r: &EopResult) -> f64 {
    let mi = 2.0 * r.lower_bound;
    2.0 * r.value - mi
}

/// `E_p(A_1, …, A_k) = ½ min Σ S(A_i R_i)`, the purifier being every party
/// outside `α`.
pub fn generalized_eop(psi: &PureState, alpha: &[Region], cfg: &OptimizerConfig) -> Result<EopResult> {
    let problem = Problem::from_pure(psi, alpha)?;
    solve(&problem, cfg, fingerprint_pure(psi))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapReport {
    pub schema_version: u32,
    /// `½[Σ(S(A_iR_i) − S(A_i)) + S(Ā_{n+1})]`.
    pub gap: f64,
    /// `½ Σ_i I(R_i : Ā_i R̄_i | A_i)` at the same configuration.
    pub gap_telescoped: f64,
    /// Per-party terms of the telescoped sum (not halved).
    pub cmi_terms: Vec<f64>,
    pub eop: EopResult,
}

/// Generalized gap at the best configuration found by [`generalized_eop`].
pub fn generalized_gap(psi: &PureState, alpha: &[Region], cfg: &OptimizerConfig) -> Result<GapReport> {
    let eop = generalized_eop(psi, alpha, cfg)?;
    let purified = optimal_purification(psi, &eop)?;
    gap_report(&purified, eop)
}

fn gap_report(purified: &PureState, eop: EopResult) -> Result<GapReport> {
    let k = eop.alpha.len();
    let labels: Vec<String> = purified.spec().labels().iter().map(|s| s.to_string()).collect();
    let a = |i: usize| Region::new([labels[i].clone()]);
    let r_upto = |i: usize| Region::new((0..i).map(|j| labels[k + j].clone()));
    let gap = eop.value - eop.lower_bound;
    // I(R_i : Ā_i R̄_i | A_i) = S(A_iR_i) + S(α ∪ R_{>i}) − S(A_i) − S(α ∪ R_{≥i}),
    // with S(α ∪ R_{>i}) = S(R_{≤i}) for the pure state on α ∪ R.
    let mut cmi_terms = Vec::with_capacity(k);
    for i in 0..k {
        let s_air = purified.entropy_of(&a(i).union(&Region::new([labels[k + i].clone()])))?;
        let s_ai = purified.entropy_of(&a(i))?;
        let s_after = purified.entropy_of(&r_upto(i + 1))?;
        let s_before = purified.entropy_of(&r_upto(i))?;
        cmi_terms.push(s_air + s_after - s_ai - s_before);
    }
    let gap_telescoped = 0.5 * cmi_terms.iter().sum::<f64>();
    if (gap - gap_telescoped).abs() > 1e-6 {
        return Err(Error::Internal(format!(
            "gap forms disagree: {gap} vs telescoped {gap_telescoped}"
        )));
    }
    Ok(GapReport {
        schema_version: SCHEMA_VERSION,
        gap,
        gap_telescoped,
        cmi_terms,
        eop,
    })
}

/// Label of the ancilla factor held by party `i` (0-based) of `α`.
pub fn ancilla_label(i: usize) -> String {
    format!("R[{}]", i + 1)
}

/// Label of the `i`-th region of `α` in a purified state.
pub fn alpha_label(region: &Region) -> String {
    region.to_string()
}

/// The pure state on `A_1 … A_k R_1 … R_k` realizing `eop`'s best value.
pub fn optimal_purification(psi: &PureState, eop: &EopResult) -> Result<PureState> {
    let problem = Problem::from_pure(psi, &eop.alpha)?;
    purification_from(&problem, eop)
}

/// As [`optimal_purification`] for a result computed from a density input.
pub fn optimal_purification_density(rho: &DensityOperator, eop: &EopResult) -> Result<PureState> {
    let problem = Problem::from_density(rho, &eop.alpha)?;
    purification_from(&problem, eop)
}

fn purification_from(problem: &Problem, eop: &EopResult) -> Result<PureState> {
    eop.best_partition.validate(&eop.alpha)?;
    if problem.rank() > eop.best_partition.embed_dim() {
        return Err(Error::Version(format!(
            "result ancilla dimension {} is below the purifier rank {}",
            eop.best_partition.embed_dim(),
            problem.rank()
        )));
    }
    let layout = Layout::new(problem, &eop.best_partition.factor_dims);
    let u = eop.unitary()?;
    let psi = layout.embedded_psi0(problem) * u.transpose();
    let flat = objective::flatten(&psi);
    let mut parties: Vec<(String, usize)> = eop
        .alpha
        .iter()
        .zip(&problem.dims)
        .map(|(r, &d)| (alpha_label(r), d))
        .collect();
    for (i, &f) in eop.best_partition.factor_dims.iter().enumerate() {
        parties.push((ancilla_label(i), f));
    }
    let spec = PartySpec::new(parties)?;
    PureState::normalized(spec, CVec::from_vec(flat))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolygamyReport {
    pub schema_version: u32,
    pub eop_ab: EopResult,
    pub eop_ac: EopResult,
    /// `E_p(A:BC) = S(A)` for a pure input.
    pub eop_a_bc: f64,
    /// `E_p(A:B) + E_p(A:C) − E_p(A:BC)`.
    pub slack: f64,
    /// True if the slack is below `−5e-3`: an optimizer failure, since the
    /// exact values cannot violate the inequality.
    pub flagged: bool,
}

/// Checks `E_p(A:B) + E_p(A:C) ≥ E_p(A:BC)` on a tripartite pure state.
pub fn verify_polygamy(psi: &PureState, cfg: &OptimizerConfig) -> Result<PolygamyReport> {
    let labels = psi.spec().labels();
    if labels.len() != 3 {
        return Err(Error::Partition("polygamy check needs three parties".into()));
    }
    let (a, b, c) = (
        Region::new([labels[0]]),
        Region::new([labels[1]]),
        Region::new([labels[2]]),
    );
    let rho = psi.density();
    let eop_ab = eop_bipartite_regions(&rho, &a, &b, cfg)?;
    let eop_ac = eop_bipartite_regions(&rho, &a, &c, cfg)?;
    let eop_a_bc = psi.entropy_of(&a)?;
    let slack = eop_ab.value + eop_ac.value - eop_a_bc;
    Ok(PolygamyReport {
        schema_version: SCHEMA_VERSION,
        eop_ab,
        eop_ac,
        eop_a_bc,
        slack,
        flagged: slack < -VIOLATION_TOL,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub schema_version: u32,
    pub before: EopResult,
    pub after: EopResult,
    pub discarded: Region,
    /// `E_p(before) − E_p(after)`.
    pub slack: f64,
    pub flagged: bool,
}

/// Checks that `E_p(α)` does not increase when the parties in `discard` are
/// removed from the regions of `α`. `rho` is purified canonically.
pub fn verify_monotonicity(
    rho: &DensityOperator,
    alpha: &[Region],
    discard: &Region,
    cfg: &OptimizerConfig,
) -> Result<MonotonicityReport> {
    let psi = canonical_purification(rho)?;
    let reduced: Vec<Region> = alpha
        .iter()
        .map(|r| Region::new(r.labels().iter().filter(|l| !discard.labels().contains(l)).cloned()))
        .filter(|r| !r.is_empty())
        .collect();
    let mut known = Region::empty();
    for r in alpha {
        known = known.union(r);
    }
    for l in discard.labels() {
        if !known.labels().contains(l) {
            return Err(Error::region(format!("discarded label {l} is not in α")));
        }
    }
    if reduced.len() < 2 {
        return Err(Error::Partition("discarding leaves fewer than two regions".into()));
    }
    let before = generalized_eop(&psi, alpha, cfg)?;
    let after = generalized_eop(&psi, &reduced, cfg)?;
    let slack = before.value - after.value;
    Ok(MonotonicityReport {
        schema_version: SCHEMA_VERSION,
        discarded: discard.clone(),
        slack,
        flagged: slack < -VIOLATION_TOL,
        before,
        after,
    })
}
