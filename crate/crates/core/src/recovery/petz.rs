use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, Split, C64};
use crate::qdense::{DensityOperator, PureState, Region, OPERATOR_TOL};

use super::quadrature::QuadratureWeight;

/// Largest output dimension for which recovered states are built densely.
pub const MAX_OUTPUT_DIM: usize = 4096;

/// Rotated Petz map `R^t_{A→AR}` built from `ρ_AR` and `ρ_A`.
#[derive(Clone, Debug)]
pub struct PetzSpec {
    pub joint: DensityOperator,
    pub marginal: DensityOperator,
    pub t: f64,
    keep: Vec<usize>,
}

impl PetzSpec {
    /// `marginal` must equal the partial trace of `joint` onto the
    /// marginal's parties, which appear in `joint` in the same order.
    pub fn new(joint: DensityOperator, marginal: DensityOperator, t: f64) -> Result<Self> {
        let labels = marginal.spec().labels();
        let region = Region::new(labels.iter().copied());
        let keep = joint.spec().indices(&region)?;
        let order: Vec<usize> = labels
            .iter()
            .map(|l| joint.spec().index_of(l))
            .collect::<Result<_>>()?;
        if order != keep {
            return Err(Error::Spec("marginal parties must keep the joint's order".into()));
        }
        let reduced = joint.partial_trace(&region)?;
        let err = linalg::max_abs(&(reduced.matrix() - marginal.matrix()));
        if err > OPERATOR_TOL {
            return Err(Error::Domain(format!(
                "marginal differs from the partial trace of the joint by {err:e}"
            )));
        }
        if !t.is_finite() {
            return Err(Error::Config("rotation parameter must be finite".into()));
        }
        Ok(PetzSpec {
            joint,
            marginal,
            t,
            keep,
        })
    }

    /// `B = ρ_AR^{(1+it)/2} (ρ_A^{−(1+it)/2} ⊗ I_R)`, so that
    /// `R^t(X) = B (X ⊗ I_R) B†`.
    fn operator(&self) -> CMat {
        let split = Split::new(&self.joint.spec().dims(), &self.keep);
        let left = linalg::complex_power_on_support(self.joint.matrix(), 0.5, 0.5 * self.t);
        let inv = linalg::complex_power_on_support(self.marginal.matrix(), -0.5, -0.5 * self.t);
        left * split.embed(&inv)
    }
}

/// `R^t(X) = ρ_AR^{(1+it)/2} (ρ_A^{−(1+it)/2} X ρ_A^{−(1−it)/2} ⊗ I_R) ρ_AR^{(1−it)/2}`
/// with inverse powers taken on the support of `ρ_A`.
pub fn petz_apply(spec: &PetzSpec, input: &DensityOperator) -> Result<DensityOperator> {
    if input.spec().dims() != spec.marginal.spec().dims() {
        return Err(Error::dim("input does not live on the marginal's parties"));
    }
    let split = Split::new(&spec.joint.spec().dims(), &spec.keep);
    let b = spec.operator();
    let out = &b * split.embed(input.matrix()) * b.adjoint();
    let out = (&out + out.adjoint()).scale(0.5);
    DensityOperator::new(spec.joint.spec().clone(), out)
}

/// Per-party Petz operators `B_i` on the `(A_i, R_i)` factor pair of a state
/// laid out as `A_1 … A_k R_1 … R_k`.
pub(crate) struct LocalPetz {
    dims: Vec<usize>,
    k: usize,
    ops: Vec<CMat>,
}

impl LocalPetz {
    pub fn new(purified: &PureState, k: usize, t: f64) -> Result<Self> {
        let dims = purified.spec().dims();
        if dims.len() != 2 * k {
            return Err(Error::Partition("purified state must hold k parties and k ancillas".into()));
        }
        let v = purified.amplitudes().as_slice();
        let mut ops = Vec::with_capacity(k);
        for i in 0..k {
            let joint = Split::new(&dims, &[i, k + i]).reduce_pure(v);
            let marg = Split::new(&dims, &[i]).reduce_pure(v);
            let left = linalg::complex_power_on_support(&joint, 0.5, 0.5 * t);
            let inv = linalg::complex_power_on_support(&marg, -0.5, -0.5 * t);
            let r = dims[k + i];
            ops.push(left * linalg::kron(&inv, &CMat::identity(r, r)));
        }
        Ok(LocalPetz { dims, k, ops })
    }

    fn split(&self, i: usize) -> Split {
        Split::new(&self.dims, &[i, self.k + i])
    }

    /// `(⊗ B_i)† v`.
    fn adjoint_apply(&self, v: &[C64]) -> Vec<C64> {
        let mut cur = v.to_vec();
        for (i, op) in self.ops.iter().enumerate() {
            cur = self.split(i).apply(&op.adjoint(), &cur);
        }
        cur
    }

    /// `(⊗ B_i) M` for a square matrix in the full layout.
    fn left_apply(&self, m: &CMat) -> CMat {
        let mut out = m.clone();
        for (i, op) in self.ops.iter().enumerate() {
            let split = self.split(i);
            for j in 0..out.ncols() {
                let col: Vec<C64> = out.column(j).iter().copied().collect();
                let new = split.apply(op, &col);
                out.set_column(j, &CVec::from_vec(new));
            }
        }
        out
    }
}

fn alpha_matrix(purified: &PureState, k: usize) -> CMat {
    let dims = purified.spec().dims();
    let da: usize = dims[..k].iter().product();
    let d: usize = dims[k..].iter().product();
    let v = purified.amplitudes();
    CMat::from_fn(da, d, |a, c| v[a * d + c])
}

/// `F(ψ, Σ_m w_m (⊗_i R^{t_m}_i)(ρ_α))` for the purified target `ψ`,
/// without forming the recovered operator.
pub(crate) fn recovery_fidelity(purified: &PureState, k: usize, quad: &QuadratureWeight) -> Result<f64> {
    let psi_m = alpha_matrix(purified, k);
    let (da, d) = psi_m.shape();
    let mut f2 = 0.0;
    for (&t, &w) in quad.nodes.iter().zip(&quad.weights) {
        let petz = LocalPetz::new(purified, k, t)?;
        let y = petz.adjoint_apply(purified.amplitudes().as_slice());
        let ym = CMat::from_fn(da, d, |a, c| y[a * d + c]);
        let overlap = psi_m.adjoint() * ym;
        f2 += w * overlap.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    Ok(f2.max(0.0).sqrt())
}

/// `Σ_m w_m (⊗_i R^{t_m}_i)(ρ_α)` as a density operator on the purified
/// state's parties.
pub(crate) fn recovered_state(purified: &PureState, k: usize, quad: &QuadratureWeight) -> Result<DensityOperator> {
    let n = purified.spec().total_dim();
    if n > MAX_OUTPUT_DIM {
        return Err(Error::Capacity(format!(
            "recovered operator of dimension {n} exceeds {MAX_OUTPUT_DIM}"
        )));
    }
    let psi_m = alpha_matrix(purified, k);
    let d = psi_m.ncols();
    let rho_alpha = &psi_m * psi_m.adjoint();
    let input = linalg::kron(&rho_alpha, &CMat::identity(d, d));
    let mut out = CMat::zeros(n, n);
    for (&t, &w) in quad.nodes.iter().zip(&quad.weights) {
        let petz = LocalPetz::new(purified, k, t)?;
        let half = petz.left_apply(&input);
        let full = petz.left_apply(&half.adjoint()).adjoint();
        out += full.scale(w);
    }
    let out = (&out + out.adjoint()).scale(0.5);
    DensityOperator::new(purified.spec().clone(), out)
}
