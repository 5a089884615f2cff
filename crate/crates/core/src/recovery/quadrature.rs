use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `β₀(t) = π / (2(cosh πt + 1))`.
pub fn beta0(t: f64) -> f64 {
    std::f64::consts::PI / (2.0 * ((std::f64::consts::PI * t).cosh() + 1.0))
}

/// Discrete approximation of the `β₀` weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureWeight {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureWeight {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::Config("quadrature needs matching nonempty nodes and weights".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) || nodes.iter().any(|t| !t.is_finite()) {
            return Err(Error::Config("quadrature weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::Config(format!("quadrature weights sum to {total}")));
        }
        Ok(QuadratureWeight { nodes, weights })
    }

    /// The single node `t = 0`, i.e. the plain Petz map.
    pub fn petz() -> Self {
        QuadratureWeight {
            nodes: vec![0.0],
            weights: vec![1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `n`-point rule for `β₀` on `t ∈ [−t_max, t_max]`. In `s = tanh(πt/2)`
/// the weight becomes `ds/2`, so Gauss–Legendre in `s` is exact for the
/// measure; the truncated tail is renormalized away.
pub fn beta0_quadrature(n: usize, t_max: f64) -> Result<QuadratureWeight> {
    if n == 0 || !(t_max > 0.0) {
        return Err(Error::Config("quadrature needs n >= 1 and t_max > 0".into()));
    }
    let half = std::f64::consts::FRAC_PI_2;
    let s_max = (half * t_max).tanh();
    let (x, w) = gauss_legendre(n);
    let nodes: Vec<f64> = x.iter().map(|&xi| (s_max * xi).atanh() / half).collect();
    let raw: Vec<f64> = w.iter().map(|&wi| 0.5 * s_max * wi).collect();
    let total: f64 = raw.iter().sum();
    QuadratureWeight::new(nodes, raw.iter().map(|w| w / total).collect())
}

/// 41 nodes on `[−8, 8]`.
pub fn default_quadrature() -> QuadratureWeight {
    beta0_quadrature(41, 8.0).expect("valid defaults")
}

/// Mass of `β₀` captured by `[−t_max, t_max]` before renormalization.
pub fn beta0_mass(t_max: f64) -> f64 {
    (std::f64::consts::FRAC_PI_2 * t_max).tanh()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m4 - 0.4).abs() < 1e-14);
        let m12: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((m12 - 2.0 / 13.0).abs() < 1e-14);
    }

    #[test]
    fn default_rule_properties() {
        let q = default_quadrature();
        assert_eq!(q.len(), 41);
        assert!((q.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(q.nodes.iter().all(|t| t.abs() <= 8.0 + 1e-12));
        assert!((1.0 - beta0_mass(8.0)) < 1e-9);
        assert!((beta0(0.0) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        // characteristic function of β₀ at 1 is 1/sinh(1); oscillatory
        // moments converge far more slowly than the mass
        let cf: f64 = q.nodes.iter().zip(&q.weights).map(|(t, w)| w * t.cos()).sum();
        assert!((cf - 1.0 / 1f64.sinh()).abs() < 1e-4, "{cf}");
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(QuadratureWeight::new(vec![0.0, 1.0], vec![0.5, 0.4]).is_err());
        assert!(QuadratureWeight::new(vec![0.0, 1.0], vec![1.5, -0.5]).is_err());
        assert!(QuadratureWeight::new(vec![], vec![]).is_err());
    }
}
