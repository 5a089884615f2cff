//! Petz and rotated-Petz recovery of an optimal purification from the
//! marginal on the parties, and the fidelity bound it obeys.

mod measured;
mod petz;
mod quadrature;

use serde::{Deserialize, Serialize};

use crate::eop::{self, EopResult, OptimizerConfig, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::qdense::{DensityOperator, PureState, Region};

pub use measured::{basis_relative_entropy, measured_relent_lb};
pub use petz::{petz_apply, PetzSpec, MAX_OUTPUT_DIM};
pub use quadrature::{beta0, beta0_mass, beta0_quadrature, default_quadrature, gauss_legendre, QuadratureWeight};

/// Slack allowed in the fidelity bound.
pub const BOUND_TOL: f64 = 1e-6;

fn parties_of(eop: &EopResult, purified: &PureState) -> Result<usize> {
    let k = eop.alpha.len();
    if purified.spec().len() != 2 * k {
        return Err(Error::Partition(format!(
            "purified state has {} factors, expected {}",
            purified.spec().len(),
            2 * k
        )));
    }
    Ok(k)
}

/// `(⊗_i R⁰_{A_i→A_iR_i})(ρ_α)` on the optimal purification's parties
/// `A_1 … A_k R_1 … R_k`.
pub fn local_petz_recover(psi: &PureState, eop: &EopResult) -> Result<DensityOperator> {
    rotated_locc_recover(psi, eop, &QuadratureWeight::petz())
}

/// `Σ_m w_m (⊗_i R^{t_m}_{A_i→A_iR_i})(ρ_α)` with the same `t_m` on every party.
pub fn rotated_locc_recover(psi: &PureState, eop: &EopResult, quad: &QuadratureWeight) -> Result<DensityOperator> {
    let purified = eop::optimal_purification(psi, eop)?;
    let k = parties_of(eop, &purified)?;
    petz::recovered_state(&purified, k, quad)
}

/// Fidelity between the optimal purification and its recovery from `ρ_α`.
pub fn recovery_fidelity(purified: &PureState, k: usize, quad: &QuadratureWeight) -> Result<f64> {
    QuadratureWeight::new(quad.nodes.clone(), quad.weights.clone())?;
    petz::recovery_fidelity(purified, k, quad)
}

/// Outcome of comparing the recovery fidelity with the gap estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub schema_version: u32,
    pub fidelity: f64,
    #[serde(rename = "minus_two_log_F")]
    pub minus_two_log_f: f64,
    /// Optimizer's gap estimate, `value − lower_bound`.
    pub g_estimate: f64,
    /// `Σ_i I(R_i : Ā_iR̄_i | A_i) = 2·g_estimate`, the quantity that bounds
    /// `−2 log F`.
    pub cmi_sum: f64,
    /// `cmi_sum ≥ −2 log F − BOUND_TOL`.
    pub bound_satisfied: bool,
    /// The same comparison against `g_estimate` itself. Informational.
    pub halved_bound_satisfied: bool,
    pub quadrature_nodes: usize,
    pub factor_dims: Vec<usize>,
}

fn report(purified: &PureState, eop: &EopResult, quad: &QuadratureWeight) -> Result<RecoveryReport> {
    let k = parties_of(eop, purified)?;
    let fidelity = recovery_fidelity(purified, k, quad)?.min(1.0);
    let m2 = if fidelity > 0.0 { -2.0 * fidelity.ln() } else { f64::INFINITY };
    let g = eop.gap();
    Ok(RecoveryReport {
        schema_version: SCHEMA_VERSION,
        fidelity,
        minus_two_log_f: m2,
        g_estimate: g,
        cmi_sum: 2.0 * g,
        bound_satisfied: 2.0 * g >= m2 - BOUND_TOL,
        halved_bound_satisfied: g >= m2 - BOUND_TOL,
        quadrature_nodes: quad.len(),
        factor_dims: eop.best_partition.factor_dims.clone(),
    })
}

/// Recovery report at the partition and unitary stored in `eop`.
pub fn recovery_report(psi: &PureState, eop: &EopResult, quad: &QuadratureWeight) -> Result<RecoveryReport> {
    let purified = eop::optimal_purification(psi, eop)?;
    report(&purified, eop, quad)
}

/// As [`recovery_report`] for a mixed input, purified through `eop`.
pub fn recovery_report_density(rho: &DensityOperator, eop: &EopResult, quad: &QuadratureWeight) -> Result<RecoveryReport> {
    let purified = eop::optimal_purification_density(rho, eop)?;
    report(&purified, eop, quad)
}

/// Optimize, then evaluate the local Petz recovery at the optimizer's best
/// partition.
pub fn local_recovery_check(psi: &PureState, alpha: &[Region], cfg: &OptimizerConfig) -> Result<RecoveryReport> {
    let res = eop::generalized_eop(psi, alpha, cfg)?;
    recovery_report(psi, &res, &QuadratureWeight::petz())
}

/// Lower bound on `D_M(ψ ‖ R^LOCC(ρ_α))` set against the CMI sum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasuredCheck {
    pub schema_version: u32,
    pub measured_lb: f64,
    pub cmi_sum: f64,
    pub satisfied: bool,
}

pub fn measured_bound_check(psi: &PureState, eop: &EopResult, quad: &QuadratureWeight) -> Result<MeasuredCheck> {
    let purified = eop::optimal_purification(psi, eop)?;
    let k = parties_of(eop, &purified)?;
    let sigma = petz::recovered_state(&purified, k, quad)?;
    let lb = measured::measured_lb_matrices(purified.density().matrix(), sigma.matrix());
    let cmi_sum = 2.0 * eop.gap();
    Ok(MeasuredCheck {
        schema_version: SCHEMA_VERSION,
        measured_lb: lb,
        cmi_sum,
        satisfied: lb <= cmi_sum + BOUND_TOL,
    })
}
