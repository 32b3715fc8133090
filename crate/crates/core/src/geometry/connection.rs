use super::metric::MetricData;
use super::tensor::{JetTensor, Slot, TensorValue};
use crate::error::Result;
use crate::jet::Jet3;

/// Christoffel symbols `Γ^k_ij` of the Levi-Civita connection, stored as jets
/// one order below the metric they came from.
#[derive(Debug, Clone)]
pub struct ConnectionData {
    n: usize,
    gamma: Vec<Jet3>,
}

impl ConnectionData {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u8 {
        self.gamma.iter().map(Jet3::order).min().unwrap_or(0)
    }

    /// `Γ^k_ij`
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma_jet(k, i, j).value()
    }

    /// `∂_m Γ^k_ij`
    pub fn dgamma(&self, m: usize, k: usize, i: usize, j: usize) -> f64 {
        self.gamma_jet(k, i, j).grad(m)
    }

    /// `∂_m ∂_p Γ^k_ij`
    pub fn d2gamma(&self, m: usize, p: usize, k: usize, i: usize, j: usize) -> f64 {
        self.gamma_jet(k, i, j).hess(m, p)
    }

    pub fn gamma_jet(&self, k: usize, i: usize, j: usize) -> &Jet3 {
        &self.gamma[(k * self.n + i) * self.n + j]
    }
}

/// `Γ^k_ij = ½ g^kl (∂_i g_jl + ∂_j g_il - ∂_l g_ij)`.
pub fn christoffel_at(md: &MetricData) -> Result<ConnectionData> {
    md.require("Christoffel symbols", 1)?;
    let n = md.dim();
    let d = |k: usize, i: usize, j: usize| md.g_jet(i, j).partial(k);
    // first kind, Γ_lij
    let mut first = Vec::with_capacity(n * n * n);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                first.push((d(i, j, l) + d(j, i, l) - d(l, i, j)).scale(0.5));
            }
        }
    }
    let mut gamma = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = md.g_inv_jet(k, 0) * &first[i * n + j];
                for l in 1..n {
                    acc = acc + md.g_inv_jet(k, l) * &first[(l * n + i) * n + j];
                }
                gamma.push(acc);
            }
        }
    }
    Ok(ConnectionData { n, gamma })
}

/// `R^l_kij = ∂_i Γ^l_jk - ∂_j Γ^l_ik + Γ^l_im Γ^m_jk - Γ^l_jm Γ^m_ik`, slots `[l, k, i, j]`,
/// so that `R(∂_i, ∂_j)∂_k = R^l_kij ∂_l` with `R(X,Y) = ∇_X∇_Y - ∇_Y∇_X - ∇_[X,Y]`.
pub(crate) fn riemann_jets(conn: &ConnectionData) -> JetTensor {
    let n = conn.dim();
    JetTensor::from_fn(vec![Slot::Up, Slot::Down, Slot::Down, Slot::Down], n, |idx| {
        let [l, k, i, j] = [idx[0], idx[1], idx[2], idx[3]];
        let mut acc = conn.gamma_jet(l, j, k).partial(i) - conn.gamma_jet(l, i, k).partial(j);
        for m in 0..n {
            acc = acc + conn.gamma_jet(l, i, m) * conn.gamma_jet(m, j, k)
                - conn.gamma_jet(l, j, m) * conn.gamma_jet(m, i, k);
        }
        acc
    })
}

/// `Ric_jk = R^i_jik`.
pub(crate) fn ricci_jets(riemann: &JetTensor) -> JetTensor {
    let n = riemann.dim();
    JetTensor::from_fn(vec![Slot::Down, Slot::Down], n, |idx| {
        let (j, k) = (idx[0], idx[1]);
        (1..n).fold(riemann.get(&[0, j, 0, k]).clone(), |acc, i| acc + riemann.get(&[i, j, i, k]))
    })
}

pub(crate) fn scalar_jet(md: &MetricData, ricci: &JetTensor) -> Jet3 {
    let n = md.dim();
    let mut acc = md.g_inv_jet(0, 0) * ricci.get(&[0, 0]);
    for j in 0..n {
        for k in 0..n {
            if (j, k) != (0, 0) {
                acc = acc + md.g_inv_jet(j, k) * ricci.get(&[j, k]);
            }
        }
    }
    acc
}

/// Riemann tensor with slots `[l, k, i, j]`; needs metric order ≥ 2.
pub fn riemann_at(md: &MetricData, conn: &ConnectionData) -> Result<TensorValue> {
    md.require("Riemann tensor", 2)?;
    Ok(riemann_jets(conn).value(md.point()))
}

/// Ricci tensor `Ric_jk`; needs metric order ≥ 2.
pub fn ricci_at(md: &MetricData, conn: &ConnectionData) -> Result<TensorValue> {
    md.require("Ricci tensor", 2)?;
    Ok(ricci_jets(&riemann_jets(conn)).value(md.point()))
}

/// `scal = g^jk Ric_jk`.
pub fn scalar_curvature_at(md: &MetricData, ric: &TensorValue) -> f64 {
    let n = md.dim();
    let mut s = 0.0;
    for j in 0..n {
        for k in 0..n {
            s += md.g_inv(j, k) * ric.get(&[j, k]);
        }
    }
    s
}
