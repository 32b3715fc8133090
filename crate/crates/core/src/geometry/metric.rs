use nalgebra::DMatrix;

use super::linalg;
use crate::error::{Error, Result};
use crate::expr::ManifoldSpec;
use crate::jet::{eval_jet, Jet3, Point};

/// Determinant magnitude below which the metric counts as singular.
pub const SINGULAR_DET: f64 = 1e-12;

/// Metric, inverse metric and their partial derivatives at a point.
///
/// Components are stored as jets; `dg`, `d2g`, `d3g` read the derivative
/// layers, populated through `order`.
#[derive(Debug, Clone)]
pub struct MetricData {
    point: Point,
    order: u8,
    g: Vec<Jet3>,
    g_inv: Vec<Jet3>,
    det: f64,
}

impl MetricData {
    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    pub fn det_g(&self) -> f64 {
        self.det
    }

    pub fn g(&self, i: usize, j: usize) -> f64 {
        self.g[i * self.dim() + j].value()
    }

    pub fn g_inv(&self, i: usize, j: usize) -> f64 {
        self.g_inv[i * self.dim() + j].value()
    }

    /// `∂_k g_ij`
    pub fn dg(&self, k: usize, i: usize, j: usize) -> f64 {
        self.g[i * self.dim() + j].grad(k)
    }

    /// `∂_k ∂_l g_ij`
    pub fn d2g(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        self.g[i * self.dim() + j].hess(k, l)
    }

    /// `∂_k ∂_l ∂_m g_ij`
    pub fn d3g(&self, k: usize, l: usize, m: usize, i: usize, j: usize) -> f64 {
        self.g[i * self.dim() + j].third(k, l, m)
    }

    pub fn g_jet(&self, i: usize, j: usize) -> &Jet3 {
        &self.g[i * self.dim() + j]
    }

    pub fn g_inv_jet(&self, i: usize, j: usize) -> &Jet3 {
        &self.g_inv[i * self.dim() + j]
    }

    pub(crate) fn require(&self, what: &'static str, needed: u8) -> Result<()> {
        if self.order < needed {
            return Err(Error::InsufficientOrder { what, needed, have: self.order });
        }
        Ok(())
    }
}

/// Evaluates the metric of `spec` at `point` with derivatives through `order`
/// and validates that it is positive definite and non-singular.
pub fn metric_data_at(spec: &ManifoldSpec, point: &Point, order: u8) -> Result<MetricData> {
    let order = order.min(3);
    spec.chart().check_point(point)?;
    let n = spec.dim();
    let mut g = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            g.push(eval_jet(spec.metric(i, j), point, order)?);
        }
    }
    let values = DMatrix::from_fn(n, n, |i, j| g[i * n + j].value());
    let chol = values
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite(point.coords().to_vec()))?;
    let det = chol.l().diagonal().iter().map(|d| d * d).product::<f64>();
    if det.abs() < SINGULAR_DET {
        return Err(Error::SingularMetric { point: point.coords().to_vec(), det });
    }

    let rows: Vec<Vec<Jet3>> = (0..n).map(|i| g[i * n..(i + 1) * n].to_vec()).collect();
    let identity: Vec<Vec<Jet3>> = (0..n)
        .map(|i| (0..n).map(|j| Jet3::constant(n, f64::from(u8::from(i == j)), order)).collect())
        .collect();
    let g_inv = linalg::solve(rows, identity, "metric inverse")?.into_iter().flatten().collect();

    Ok(MetricData { point: point.clone(), order, g, g_inv, det })
}
