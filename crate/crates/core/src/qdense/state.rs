use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, Split, C64};

use super::party::{PartySpec, Region};

pub const NORM_TOL: f64 = 1e-12;
pub const OPERATOR_TOL: f64 = 1e-10;

/// Eigenvalue validation is skipped above this dimension; such operators are
/// only produced internally from already-valid inputs.
const EIG_CHECK_MAX_DIM: usize = 1024;

#[derive(Clone, Debug)]
pub struct PureState {
    amps: CVec,
    spec: PartySpec,
}

impl PureState {
    pub fn new(spec: PartySpec, amps: CVec) -> Result<Self> {
        if amps.len() != spec.total_dim() {
            return Err(Error::dim(format!(
                "{} amplitudes for total dimension {}",
                amps.len(),
                spec.total_dim()
            )));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!("state norm {norm} is not 1")));
        }
        Ok(PureState { amps, spec })
    }

    /// Normalizes `amps` first; fails only on a zero vector.
    pub fn normalized(spec: PartySpec, amps: CVec) -> Result<Self> {
        let norm = amps.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero vector".into()));
        }
        Self::new(spec, amps.unscale(norm))
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn spec(&self) -> &PartySpec {
        &self.spec
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            matrix: linalg::outer(&self.amps),
            spec: self.spec.clone(),
        }
    }

    pub(crate) fn split(&self, region: &Region) -> Result<Split> {
        let idx = self.spec.indices(region)?;
        Ok(Split::new(&self.spec.dims(), &idx))
    }

    /// Reduced matrix on `keep`; factors stay in spec order.
    pub fn reduced(&self, keep: &Region) -> Result<DensityOperator> {
        let idx = self.spec.indices(keep)?;
        let split = Split::new(&self.spec.dims(), &idx);
        let matrix = split.reduce_pure(self.amps.as_slice());
        Ok(DensityOperator {
            matrix,
            spec: self.spec.sub(&idx),
        })
    }

    /// Entropy of the reduced state on `region` (nats). Uses the smaller side
    /// of the bipartition.
    pub fn entropy_of(&self, region: &Region) -> Result<f64> {
        if region.is_empty() {
            return Ok(0.0);
        }
        let split = self.split(region)?;
        Ok(pure_split_entropy(&split, self.amps.as_slice()))
    }

    /// Reorders the parties into the order given by `labels` (a permutation
    /// of the spec's labels).
    pub fn permuted(&self, labels: &[&str]) -> Result<PureState> {
        if labels.len() != self.spec.len() {
            return Err(Error::region("permutation must list every party"));
        }
        let perm = labels
            .iter()
            .map(|l| self.spec.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::region("permutation repeats a party"));
            }
        }
        let v = linalg::permute_factors(self.amps.as_slice(), &self.spec.dims(), &perm);
        Ok(PureState {
            amps: CVec::from_vec(v),
            spec: self.spec.sub(&perm),
        })
    }

    /// Tensor product; labels must stay unique.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let mut parties = self.spec.parties().to_vec();
        parties.extend(other.spec.parties().iter().cloned());
        let spec = PartySpec::try_from(parties)?;
        Ok(PureState {
            amps: linalg::kron_vec(&self.amps, &other.amps),
            spec,
        })
    }

    /// Groups consecutive-or-not parties into new named parties; each group's
    /// factors keep their spec order. Groups must cover every party.
    pub fn regroup(&self, groups: &[(String, Region)]) -> Result<PureState> {
        let mut order = Vec::new();
        let mut new_parties = Vec::new();
        for (label, region) in groups {
            let idx = self.spec.indices(region)?;
            if idx.is_empty() {
                return Err(Error::region(format!("group {label} is empty")));
            }
            let dim = idx.iter().map(|&i| self.spec.parties()[i].dim).product();
            order.extend(idx);
            new_parties.push((label.clone(), dim));
        }
        let mut sorted = order.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != order.len() || order.len() != self.spec.len() {
            return Err(Error::Partition("groups must partition the parties".into()));
        }
        let v = linalg::permute_factors(self.amps.as_slice(), &self.spec.dims(), &order);
        Ok(PureState {
            amps: CVec::from_vec(v),
            spec: PartySpec::new(new_parties)?,
        })
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::dim("inner product of different dimensions"));
        }
        Ok(self.amps.dotc(&other.amps))
    }
}

pub(crate) fn pure_split_entropy(split: &Split, amps: &[C64]) -> f64 {
    let m = split.to_matrix(amps);
    let gram = if split.keep_dim <= split.rest_dim {
        &m * m.adjoint()
    } else {
        m.adjoint() * &m
    };
    linalg::entropy_of_spectrum(&linalg::hermitian_eigenvalues(&gram))
}

#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: CMat,
    spec: PartySpec,
}

impl DensityOperator {
    pub fn new(spec: PartySpec, matrix: CMat) -> Result<Self> {
        let d = spec.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::dim(format!(
                "{}x{} matrix for total dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = linalg::max_abs(&(&matrix - matrix.adjoint()));
        if herm > OPERATOR_TOL {
            return Err(Error::Domain(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > OPERATOR_TOL || tr.im.abs() > OPERATOR_TOL {
            return Err(Error::Domain(format!("trace {tr} is not 1")));
        }
        if d <= EIG_CHECK_MAX_DIM {
            let min = linalg::hermitian_eigenvalues(&matrix)
                .last()
                .copied()
                .unwrap_or(0.0);
            if min < -OPERATOR_TOL {
                return Err(Error::Domain(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(DensityOperator { matrix, spec })
    }

    pub fn maximally_mixed(spec: PartySpec) -> Self {
        let d = spec.total_dim();
        DensityOperator {
            matrix: CMat::identity(d, d).unscale(d as f64),
            spec,
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn spec(&self) -> &PartySpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn partial_trace(&self, keep: &Region) -> Result<DensityOperator> {
        let idx = self.spec.indices(keep)?;
        let split = Split::new(&self.spec.dims(), &idx);
        Ok(DensityOperator {
            matrix: split.trace_out(&self.matrix),
            spec: self.spec.sub(&idx),
        })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn entropy_of(&self, region: &Region) -> Result<f64> {
        if region.is_empty() {
            return Ok(0.0);
        }
        Ok(super::measures::entropy(&self.partial_trace(region)?))
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        let mut parties = self.spec.parties().to_vec();
        parties.extend(other.spec.parties().iter().cloned());
        Ok(DensityOperator {
            matrix: linalg::kron(&self.matrix, &other.matrix),
            spec: PartySpec::try_from(parties)?,
        })
    }

    /// Reorders parties as in [`PureState::permuted`].
    pub fn permuted(&self, labels: &[&str]) -> Result<DensityOperator> {
        if labels.len() != self.spec.len() {
            return Err(Error::region("permutation must list every party"));
        }
        let perm = labels
            .iter()
            .map(|l| self.spec.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        let m = linalg::permute_operator(&self.matrix, &self.spec.dims(), &perm);
        Ok(DensityOperator {
            matrix: m,
            spec: self.spec.sub(&perm),
        })
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}

impl From<&PureState> for DensityOperator {
    fn from(p: &PureState) -> Self {
        p.density()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn bell() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            PartySpec::uniform(2, 2).unwrap(),
            CVec::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]),
        )
        .unwrap()
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = bell().density().partial_trace(&Region::parse("A")).unwrap();
        let expect = CMat::identity(2, 2).unscale(2.0);
        assert!(linalg::max_abs(&(rho.matrix() - expect)) < 1e-15);
    }

    #[test]
    fn product_marginal() {
        let spec = PartySpec::uniform(2, 2).unwrap();
        let mut v = CVec::zeros(4);
        v[1] = c(1.0, 0.0); // |0>_A |1>_B
        let psi = PureState::new(spec, v).unwrap();
        let rho_b = psi.reduced(&Region::parse("B")).unwrap();
        assert!((rho_b.matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
        assert!(rho_b.matrix()[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn validation_rejects_bad_operators() {
        let spec = PartySpec::uniform(1, 2).unwrap();
        let mut m = CMat::identity(2, 2).unscale(2.0);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(
            DensityOperator::new(spec.clone(), m),
            Err(Error::Domain(_))
        ));
        let neg = CMat::from_diagonal(&CVec::from_vec(vec![c(1.5, 0.0), c(-0.5, 0.0)]));
        assert!(DensityOperator::new(spec.clone(), neg).is_err());
        assert!(PureState::new(spec, CVec::zeros(2)).is_err());
    }

    #[test]
    fn unknown_label_is_region_error() {
        let rho = bell().density();
        assert!(matches!(
            rho.partial_trace(&Region::parse("Z")),
            Err(Error::Region(_))
        ));
    }
}
